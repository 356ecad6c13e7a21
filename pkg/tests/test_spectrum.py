import math

import numpy as np
import pytest
from scipy.integrate import simpson

from helmholtz_ermakov import spectrum
from helmholtz_ermakov.exceptions import DomainError, SpectrumError
from helmholtz_ermakov.profiles import Constant, Periodic, PowerLaw
from helmholtz_ermakov.spectrum import (
    SpectrumProblem,
    count_nodes,
    finite_difference_eigenvalues,
    solve_dirichlet_eigenvalues,
)

UNIT = SpectrumProblem(Constant(1.0), (0.0, math.pi), 3)


def test_nodes_between_eigenvalues():
    nodes, _ = count_nodes(UNIT, 6.25)
    assert nodes == 2


def test_nodes_below_first_eigenvalue():
    nodes, end = count_nodes(UNIT, 0.25)
    assert nodes == 0
    assert end == pytest.approx(math.sin(0.5 * math.pi) / 0.5, rel=1e-9)


def test_nodes_at_first_eigenvalue():
    nodes, end = count_nodes(UNIT, 1.0)
    assert nodes == 0
    assert abs(end) < 1e-8


def test_nonpositive_lambda_has_no_nodes():
    assert count_nodes(UNIT, -3.0)[0] == 0


@pytest.fixture(scope="module")
def unit_result():
    return solve_dirichlet_eigenvalues(UNIT)


def test_unit_interval_pi(unit_result):
    assert np.max(np.abs(unit_result.eigenvalues - [1, 4, 9])) < 1e-8


def test_unit_interval_one():
    res = solve_dirichlet_eigenvalues(SpectrumProblem(Constant(1.0), (0.0, 1.0), 2))
    assert np.allclose(res.eigenvalues, [math.pi**2, 4 * math.pi**2], atol=1e-6, rtol=0)


def test_linear_profile_vs_finite_differences():
    prof = PowerLaw(1.0, 1.0)
    got = solve_dirichlet_eigenvalues(SpectrumProblem(prof, (0.0, 1.0), 3)).eigenvalues
    ref = finite_difference_eigenvalues(prof, (0.0, 1.0), 3, points=2000)
    assert np.max(np.abs(got - ref) / ref) < 1e-4


def test_finite_difference_oracle_itself():
    ref = finite_difference_eigenvalues(Constant(1.0), (0.0, math.pi), 3, points=2000)
    assert np.allclose(ref, [1, 4, 9], rtol=1e-5)


def test_eigenfunctions(unit_result):
    for pair in unit_result.pairs:
        assert pair.nodes == pair.n - 1
        signs = np.sign(pair.psi[1:-1])
        assert np.count_nonzero(signs[1:] != signs[:-1]) == pair.n - 1
        assert simpson(pair.psi**2, x=pair.x) == pytest.approx(1.0, abs=1e-10)
        assert pair.psi[1] > 0
        assert pair.boundary_residual < 1e-8
        assert np.allclose(pair.psi, math.sqrt(2 / math.pi) * np.sin(pair.n * pair.x), atol=1e-7)


def test_doubling_profile_halves_spectrum():
    prof = Periodic(1.0, 0.3, 1.0)
    twice = Periodic(2.0, 0.3, 1.0)
    a = solve_dirichlet_eigenvalues(SpectrumProblem(prof, (0.0, 2.0), 4)).eigenvalues
    b = solve_dirichlet_eigenvalues(SpectrumProblem(twice, (0.0, 2.0), 4)).eigenvalues
    assert np.allclose(b, a / 2, rtol=1e-9)


def test_strictly_increasing():
    res = solve_dirichlet_eigenvalues(SpectrumProblem(PowerLaw(2.0, -1.0), (0.5, 3.0), 6))
    assert np.all(np.diff(res.eigenvalues) > 0)
    assert [p.nodes for p in res.pairs] == list(range(6))


def test_problem_validation():
    with pytest.raises(DomainError):
        SpectrumProblem(Constant(1.0), (1.0, 1.0), 1)
    with pytest.raises(DomainError):
        SpectrumProblem(Constant(1.0), (0.0, 1.0), 0)
    with pytest.raises(DomainError):
        SpectrumProblem(PowerLaw(1.0, -1.0), (0.0, 1.0), 1)


def test_search_cap(monkeypatch):
    monkeypatch.setattr(spectrum, "LAMBDA_CAP_FACTOR", 0.5)
    with pytest.raises(SpectrumError, match="search cap"):
        solve_dirichlet_eigenvalues(SpectrumProblem(Constant(1.0), (0.0, math.pi), 5))
