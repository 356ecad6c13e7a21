import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from helmholtz_ermakov.exceptions import DomainError
from helmholtz_ermakov.profiles import (
    Constant,
    Periodic,
    PowerLaw,
    ProfileParseError,
    Tabulated,
    eval_profile,
    load_table,
    parse_profile,
    profile_derivative,
    render_profile,
    scalar_evaluator,
)


def test_constant_value():
    assert eval_profile(Constant(1.0), 5.0) == 1.0


def test_power_law_value():
    assert eval_profile(PowerLaw(1.0, 2.0), 2.0) == 4.0


def test_periodic_peak():
    p = Periodic(1.0, 0.1, 2 * math.pi)
    assert eval_profile(p, math.pi / 2) == pytest.approx(1.1, abs=1e-15)


def test_vectorized_matches_scalar():
    p = Periodic(2.0, -0.3, 1.7)
    t = np.linspace(-3, 3, 11)
    assert np.array_equal(eval_profile(p, t), [eval_profile(p, x) for x in t])


@pytest.mark.parametrize("profile", [Constant(2.5), PowerLaw(1.3, -0.7), Periodic(1.0, 0.4, 3.0)])
def test_scalar_evaluator_agrees(profile):
    f = scalar_evaluator(profile)
    for t in (0.3, 1.0, 2.9):
        assert f(t) == pytest.approx(eval_profile(profile, t), rel=1e-15)


def test_negative_power_rejects_origin():
    with pytest.raises(DomainError):
        eval_profile(PowerLaw(1.0, -1.0), 0.0)
    with pytest.raises(DomainError):
        eval_profile(PowerLaw(1.0, 0.5), -1.0)
    # non-negative exponents are finite at the origin
    assert eval_profile(PowerLaw(1.0, 1.0), 0.0) == 0.0


@pytest.mark.parametrize("kwargs", [dict(c=0.0), dict(c=-1.0), dict(c=math.nan)])
def test_constant_invariants(kwargs):
    with pytest.raises(DomainError):
        Constant(**kwargs)


def test_periodic_invariants():
    with pytest.raises(DomainError):
        Periodic(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        Periodic(1.0, 0.1, 0.0)


def test_derivatives_against_finite_differences():
    h = 1e-4
    for p in (PowerLaw(1.5, 2.5), Periodic(1.0, 0.2, 2.0), PowerLaw(0.7, -1.3)):
        t = 1.3
        d1 = (eval_profile(p, t + h) - eval_profile(p, t - h)) / (2 * h)
        d2 = (eval_profile(p, t + h) - 2 * eval_profile(p, t) + eval_profile(p, t - h)) / h**2
        assert profile_derivative(p, t, 1) == pytest.approx(d1, rel=1e-7)
        assert profile_derivative(p, t, 2) == pytest.approx(d2, rel=1e-5)


@given(
    st.floats(0.01, 100.0),
    st.floats(-5.0, 5.0).filter(lambda m: m != -2),
    st.floats(0.01, 100.0),
)
def test_power_law_within_two_ulp(b, m, t):
    # reference b^2 exp(m ln t) carried out in 50-digit arithmetic
    with mpmath.workdps(50):
        ref = float(mpmath.mpf(b) ** 2 * mpmath.exp(mpmath.mpf(m) * mpmath.log(mpmath.mpf(t))))
    got = eval_profile(PowerLaw(b, m), t)
    assert abs(got - ref) <= 2 * math.ulp(ref)


# -- tables


def test_table_interpolates_and_refuses_extrapolation(tmp_path):
    path = tmp_path / "phi.csv"
    path.write_text("t,phi\n0,1\n1,2\n2,4\n")
    prof = load_table(path)
    assert eval_profile(prof, 1.0) == 2.0
    assert 1.0 < eval_profile(prof, 0.5) < 2.0
    with pytest.raises(DomainError):
        eval_profile(prof, 2.5)


def test_table_without_header(tmp_path):
    path = tmp_path / "phi.csv"
    path.write_text("0,1\n1,1.5\n")
    assert eval_profile(load_table(path), 0.0) == 1.0


@pytest.mark.parametrize("body", ["t,phi\n1,1\n0,2\n", "0,1\n1,-2\n", "0,1\n", "0,1,2\n1,1,1\n"])
def test_bad_tables(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DomainError):
        load_table(path)


def test_table_monotone_between_positive_samples():
    prof = Tabulated([0, 1, 2, 3], [1.0, 1e-3, 1e-3, 5.0])
    t = np.linspace(0, 3, 301)
    assert np.all(eval_profile(prof, t) > 0)


# -- grammar


def test_parse_const():
    assert parse_profile("const:c=1.0") == Constant(1.0)


def test_parse_power_law():
    assert parse_profile("powerlaw:b=2,m=-1") == PowerLaw(2.0, -1.0)


def test_parse_rejects_m_minus_two():
    with pytest.raises(ProfileParseError, match="m must differ from -2"):
        parse_profile("powerlaw:b=1,m=-2")


def test_parse_tolerates_spaces_and_scientific():
    assert parse_profile(" periodic : c = 1e0 , eps=-2.5E-1, T = 6.5 ") == Periodic(1.0, -0.25, 6.5)


@pytest.mark.parametrize(
    "text, reason, position",
    [
        ("cosh:c=1", "unknown profile kind", 0),
        ("const:c=1,c=2", "duplicate key", 10),
        ("powerlaw:b=1", "missing key", 12),
        ("const:c=abc", "non-numeric", 8),
        ("const:d=1", "unknown key", 6),
        ("const", "expected ':'", 5),
        ("const:c", "expected key=value", 6),
        ("table:file=", "empty file path", 11),
    ],
)
def test_parse_errors_carry_position(text, reason, position):
    with pytest.raises(ProfileParseError) as info:
        parse_profile(text)
    assert reason in info.value.reason
    assert info.value.position == position


def test_parse_table_relative_to_base(tmp_path):
    (tmp_path / "n.csv").write_text("0,1\n1,2\n")
    prof = parse_profile("table:file=n.csv", base_dir=tmp_path)
    assert isinstance(prof, Tabulated)
    assert parse_profile(render_profile(prof)) == prof


def test_parse_missing_table_file(tmp_path):
    with pytest.raises(ProfileParseError):
        parse_profile(f"table:file={tmp_path / 'absent.csv'}")


positive = st.floats(1e-6, 1e6, allow_nan=False)
profiles = st.one_of(
    st.builds(Constant, positive),
    st.builds(PowerLaw, positive, st.floats(-50, 50).filter(lambda m: m != -2)),
    st.builds(Periodic, positive, st.floats(-0.999, 0.999), positive),
)


@given(profiles)
def test_render_parse_roundtrip(profile):
    assert parse_profile(render_profile(profile)) == profile
