from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from spinbath.dynamics import bare_transfer, first_peak, time_grid
from spinbath.model import BathSpec, ChainSpec, SpecError, hopping_matrix
from spinbath.optimize import (
    BudgetExhausted,
    OutOfBounds,
    SearchProblem,
    nelder_mead,
    objective,
    peak_value,
    search,
)
from spinbath.oracle import build_full, oracle_transfer
from spinbath.spectra import eigendecompose, engineered_couplings


def test_engineered_chain_objective_is_one():
    problem = SearchProblem(5, 0.0, t_max=10.0, bounds=(0.05, 3.0))
    assert objective(engineered_couplings(5), problem) == pytest.approx(1.0, abs=1e-10)


def test_disconnected_chain_has_no_transport():
    assert peak_value([0.0] * 9, 0.0, 20.0) == 0.0
    assert peak_value([0.0] * 9, 0.3, 20.0, kind="first_peak") == 0.0


def test_uniform_objective_is_bare_first_peak():
    problem = SearchProblem(10, 0.0, t_max=20.0)
    value = objective(np.ones(9), problem)
    chain = ChainSpec.uniform(10)
    t = time_grid(20, 1e-3)
    _, ref = first_peak(bare_transfer(eigendecompose(hopping_matrix(chain)), 1, 10, t))
    orc = np.abs(oracle_transfer(build_full(chain, BathSpec.empty(10)), 1, 10, t).amplitudes)
    assert value == pytest.approx(ref, abs=1e-9)
    assert value == pytest.approx(orc.max(), abs=1e-6)


def test_objective_rejects_out_of_bounds():
    problem = SearchProblem(3, 0.2)
    with pytest.raises(OutOfBounds):
        objective([0.01, 1.0], problem)
    with pytest.raises(OutOfBounds):
        objective([1.0, 1.0, 1.0], problem)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_scale_covariance(c):
    js = np.array([0.3, 0.8, 0.55, 0.9, 0.4])
    for kind in ("global_peak", "first_peak"):
        base = peak_value(js, 0.0, 25.0, kind)
        assert peak_value(c * js, 0.0, 25.0 / c, kind) == pytest.approx(base, abs=1e-9)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_sites=1), dict(n_sites=3, bounds=(0.0, 1.0)), dict(n_sites=3, bounds=(2.0, 1.0)),
     dict(n_sites=3, t_max=0.0), dict(n_sites=3, g_eff=-1.0), dict(n_sites=3, objective="mean")],
)
def test_invalid_problems(kwargs):
    with pytest.raises(SpecError):
        SearchProblem(**kwargs)


def test_zero_budget_is_an_error():
    with pytest.raises(BudgetExhausted):
        search(SearchProblem(3, 0.0, budget=0))


def test_nelder_mead_finds_box_maximum():
    f = lambda x: -np.sum((x - np.array([0.3, -0.2])) ** 2)
    x, fx = nelder_mead(f, np.array([0.9, 0.9]), -1.0, 1.0, step=0.2)
    np.testing.assert_allclose(x, [0.3, -0.2], atol=1e-6)
    # optimum outside the box is pinned to the boundary
    g = lambda x: -np.sum((x - 3.0) ** 2)
    x, _ = nelder_mead(g, np.array([0.0, 0.0]), -1.0, 1.0, step=0.2)
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-6)


def test_two_site_search_reaches_full_transfer():
    result = search(SearchProblem(2, 0.0, t_max=2 * np.pi, budget=200, restarts=2))
    assert result.value == pytest.approx(1.0, abs=1e-9)
    assert result.value_bare == pytest.approx(1.0, abs=1e-9)


@pytest.fixture(scope="module")
def small_result():
    problem = SearchProblem(5, 0.3, t_max=15.0, budget=300, restarts=3, seed=11)
    return problem, search(problem)


def test_search_deterministic(small_result):
    problem, first = small_result
    second = search(problem)
    np.testing.assert_array_equal(first.couplings, second.couplings)
    assert first.value == second.value and first.trace == second.trace
    assert first.evaluations == second.evaluations


def test_search_independent_of_map(small_result):
    problem, first = small_result
    with ThreadPoolExecutor(3) as pool:
        par = search(problem, map_fn=pool.map)
    np.testing.assert_array_equal(first.couplings, par.couplings)
    assert first.value == par.value


def test_incumbent_trace_monotone(small_result):
    _, result = small_result
    assert np.all(np.diff(result.trace) >= 0)
    assert result.trace[-1] == result.value
    assert len(result.trace) == result.evaluations


def test_result_reproducible_by_reevaluation(small_result):
    problem, result = small_result
    lo, hi = problem.bounds
    assert np.all((result.couplings >= lo) & (result.couplings <= hi))
    assert objective(result.couplings, problem) == pytest.approx(result.value, abs=1e-9)
    assert objective(result.couplings, problem, g_eff=0.0) == pytest.approx(result.value_bare, abs=1e-9)


def test_budget_respected():
    problem = SearchProblem(4, 0.2, t_max=10.0, budget=25, restarts=2)
    result = search(problem, polish_budget=5)
    assert result.evaluations <= 2 * 25 + 5
