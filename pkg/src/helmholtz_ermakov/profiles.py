"""Index profiles phi(t) and their text grammar.

A profile is the positive coefficient function in

    psi'' + lambda * phi(t) * psi = 0

with the propagation coordinate x renamed to t.  Four kinds exist:

    const:c=<c>                  phi = c
    powerlaw:b=<b>,m=<m>         phi = b**2 * t**m   (Omega = b t^(m/2))
    periodic:c=<c>,eps=<e>,T=<T> phi = c * (1 + e sin(2 pi t / T))
    table:file=<path>            monotone cubic through CSV samples (t, phi)

Profiles are immutable; every evaluation function accepts scalars or arrays.
"""

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .exceptions import DomainError


class ProfileParseError(ValueError):
    """Malformed profile text; ``position`` is the 0-based column of the fault."""

    def __init__(self, text, position, reason):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position} in {text!r}")


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise DomainError("c must be positive")


@dataclass(frozen=True)
class PowerLaw:
    """phi(t) = b**2 * t**m, i.e. Omega(t) = b * t**(m/2)."""

    b: float
    m: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError("b must be positive")
        if not math.isfinite(self.m):
            raise DomainError("m must be finite")
        if self.m == -2:
            raise DomainError("m must differ from -2")


@dataclass(frozen=True)
class Periodic:
    c: float
    eps: float
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise DomainError("c must be positive")
        if not (math.isfinite(self.eps) and abs(self.eps) < 1):
            raise DomainError("eps must satisfy |eps| < 1")
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError("T must be positive")


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Shape-preserving cubic through strictly increasing (t, phi) samples."""

    t: np.ndarray
    phi: np.ndarray
    source: Optional[str] = None
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        phi = np.array(self.phi, dtype=float)
        if t.ndim != 1 or t.shape != phi.shape or t.size < 2:
            raise DomainError("table needs at least two (t, phi) rows")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(phi))):
            raise DomainError("table values must be finite")
        if np.any(np.diff(t) <= 0):
            raise DomainError("table abscissae must be strictly increasing")
        if np.any(phi <= 0):
            raise DomainError("table ordinates must be positive")
        t.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "_interp", PchipInterpolator(t, phi, extrapolate=False))

    def __eq__(self, other):
        return (
            isinstance(other, Tabulated)
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.phi, other.phi)
        )

    def __hash__(self):
        return hash((self.t.tobytes(), self.phi.tobytes()))


Profile = Union[Constant, PowerLaw, Periodic, Tabulated]


def domain(profile):
    """Closed-interval bounds (lo, hi) on which ``profile`` may be evaluated.

    Power laws with m < 0 exclude t = 0 itself; callers get ``lo = 0`` and
    the open end is enforced by :func:`check_domain`.
    """
    if isinstance(profile, Tabulated):
        return float(profile.t[0]), float(profile.t[-1])
    if isinstance(profile, PowerLaw):
        return 0.0, math.inf
    return -math.inf, math.inf


def check_domain(profile, t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("t must be finite")
    if isinstance(profile, PowerLaw):
        bad = t <= 0 if profile.m < 0 else t < 0
        if np.any(bad):
            limit = "t > 0" if profile.m < 0 else "t >= 0"
            raise DomainError(f"power-law profile with m={profile.m} requires {limit}")
    elif isinstance(profile, Tabulated):
        lo, hi = domain(profile)
        if np.any((t < lo) | (t > hi)):
            raise DomainError(f"t outside table range [{lo}, {hi}]")


def _maybe_scalar(t, value):
    return float(value) if np.ndim(t) == 0 else value


def eval_profile(profile, t):
    """phi(t), elementwise for array input."""
    check_domain(profile, t)
    ta = np.asarray(t, dtype=float)
    if isinstance(profile, Constant):
        val = np.full_like(ta, profile.c)
    elif isinstance(profile, PowerLaw):
        val = profile.b**2 * ta**profile.m
    elif isinstance(profile, Periodic):
        val = profile.c * (1.0 + profile.eps * np.sin(2 * np.pi * ta / profile.T))
    elif isinstance(profile, Tabulated):
        val = profile._interp(ta)
    else:
        raise TypeError(f"not a profile: {profile!r}")
    return _maybe_scalar(t, val)


def scalar_evaluator(profile):
    """Unchecked float -> float phi for ODE right-hand sides.

    Callers validate the integration span with :func:`check_domain` first.
    """
    if isinstance(profile, Constant):
        c = profile.c
        return lambda t: c
    if isinstance(profile, PowerLaw):
        b2, m = profile.b**2, profile.m
        return lambda t: b2 * t**m
    if isinstance(profile, Periodic):
        c, eps, w = profile.c, profile.eps, 2 * math.pi / profile.T
        return lambda t: c * (1.0 + eps * math.sin(w * t))
    if isinstance(profile, Tabulated):
        interp = profile._interp
        return lambda t: float(interp(t))
    raise TypeError(f"not a profile: {profile!r}")


def profile_derivative(profile, t, order=1):
    """d^k phi / dt^k for k in {0, 1, 2}.

    Tabulated profiles use the interpolant's derivatives, which are only
    piecewise continuous at order 2.
    """
    if order == 0:
        return eval_profile(profile, t)
    if order not in (1, 2):
        raise ValueError("order must be 0, 1 or 2")
    check_domain(profile, t)
    ta = np.asarray(t, dtype=float)
    if isinstance(profile, Constant):
        val = np.zeros_like(ta)
    elif isinstance(profile, PowerLaw):
        b2, m = profile.b**2, profile.m
        if order == 1:
            val = b2 * m * ta ** (m - 1) if m != 0 else np.zeros_like(ta)
        else:
            val = b2 * m * (m - 1) * ta ** (m - 2) if m not in (0, 1) else np.zeros_like(ta)
    elif isinstance(profile, Periodic):
        w = 2 * np.pi / profile.T
        if order == 1:
            val = profile.c * profile.eps * w * np.cos(w * ta)
        else:
            val = -profile.c * profile.eps * w**2 * np.sin(w * ta)
    elif isinstance(profile, Tabulated):
        val = profile._interp(ta, nu=order)
    else:
        raise TypeError(f"not a profile: {profile!r}")
    return _maybe_scalar(t, val)


def load_table(path):
    """Read a two-column CSV (t, phi), header optional, into a Tabulated profile."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise DomainError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows or lineno > 1:
                    raise DomainError(f"{path}:{lineno}: non-numeric row {row!r}") from None
    if not rows:
        raise DomainError(f"{path}: no data rows")
    data = np.array(rows)
    return Tabulated(data[:, 0], data[:, 1], source=str(path))


# ---------------------------------------------------------------------------
# text grammar:  kind ':' key '=' value (',' key '=' value)*

_KEYS = {
    "const": ("c",),
    "powerlaw": ("b", "m"),
    "periodic": ("c", "eps", "T"),
    "table": ("file",),
}
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")


def parse_profile(text, base_dir=None):
    """Parse profile text into a profile object.

    Whitespace around ``:``, ``=`` and ``,`` is ignored.  ``table`` paths are
    resolved relative to ``base_dir`` when given.

    Raises
    ------
    ProfileParseError
        With the column and reason of the first fault.
    """
    if not isinstance(text, str):
        raise TypeError("profile text must be a string")
    colon = text.find(":")
    if colon < 0:
        raise ProfileParseError(text, len(text), "expected ':' after profile kind")
    kind = text[:colon].strip()
    if kind not in _KEYS:
        pos = len(text[:colon]) - len(text[:colon].lstrip())
        raise ProfileParseError(
            text, pos, f"unknown profile kind {kind!r} (expected one of {', '.join(_KEYS)})"
        )
    allowed = _KEYS[kind]
    values = {}
    start = colon + 1
    for item in text[colon + 1:].split(","):
        eq = item.find("=")
        lead = len(item) - len(item.lstrip())
        if eq < 0:
            raise ProfileParseError(text, start + lead, "expected key=value")
        key = item[:eq].strip()
        raw = item[eq + 1:].strip()
        val_pos = start + eq + 1 + (len(item[eq + 1:]) - len(item[eq + 1:].lstrip()))
        if key not in allowed:
            raise ProfileParseError(
                text, start + lead, f"unknown key {key!r} for {kind} (expected {', '.join(allowed)})"
            )
        if key in values:
            raise ProfileParseError(text, start + lead, f"duplicate key {key!r}")
        if key == "file":
            if not raw:
                raise ProfileParseError(text, val_pos, "empty file path")
            values[key] = raw
        else:
            if not _NUMBER.match(raw):
                raise ProfileParseError(text, val_pos, f"non-numeric value {raw!r} for {key!r}")
            values[key] = float(raw)
        start += len(item) + 1
    missing = [k for k in allowed if k not in values]
    if missing:
        raise ProfileParseError(text, len(text), f"missing key(s) {', '.join(missing)} for {kind}")

    try:
        if kind == "const":
            return Constant(values["c"])
        if kind == "powerlaw":
            return PowerLaw(values["b"], values["m"])
        if kind == "periodic":
            return Periodic(values["c"], values["eps"], values["T"])
        path = Path(values["file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_table(path)
    except (DomainError, OSError) as exc:
        raise ProfileParseError(text, colon + 1, str(exc)) from None


def render_profile(profile):
    """Canonical text form; ``parse_profile(render_profile(p)) == p``."""
    if isinstance(profile, Constant):
        return f"const:c={profile.c!r}"
    if isinstance(profile, PowerLaw):
        return f"powerlaw:b={profile.b!r},m={profile.m!r}"
    if isinstance(profile, Periodic):
        return f"periodic:c={profile.c!r},eps={profile.eps!r},T={profile.T!r}"
    if isinstance(profile, Tabulated):
        if profile.source is None:
            raise ValueError("tabulated profile has no source file to render")
        return f"table:file={profile.source}"
    raise TypeError(f"not a profile: {profile!r}")
