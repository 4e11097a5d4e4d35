"""Derivative-free search over chain couplings for the best transfer peak.

Each restart runs a bounded Nelder-Mead simplex from a seeded random start;
the best restart is then polished coordinate by coordinate. Restarts draw
from independent streams ``default_rng([seed, index])`` so they can be
mapped in any order (or in parallel) with the same result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import _propagate, default_dt, time_grid
from .model import ChainSpec, SpecError, hopping_matrix
from .spectra import dress, eigendecompose

OBJECTIVES = ("first_peak", "global_peak")


class BudgetExhausted(RuntimeError):
    pass


class OutOfBounds(ValueError):
    pass


@dataclass(frozen=True)
class SearchProblem:
    n_sites: int
    g_eff: float = 0.0
    t_max: float = 30.0
    bounds: tuple = (0.05, 2.0)
    objective: str = "global_peak"
    seed: int = 0
    budget: int = 5000  # objective evaluations per restart
    restarts: int = 10

    def __post_init__(self):
        lo, hi = self.bounds
        if self.n_sites < 2:
            raise SpecError("need at least 2 sites to optimize couplings")
        if not 0 < lo < hi:
            raise SpecError(f"bounds must be positive and ordered, got {self.bounds}")
        if not self.t_max > 0:
            raise SpecError("t_max must be positive")
        if self.g_eff < 0:
            raise SpecError("g_eff must be >= 0")
        if self.objective not in OBJECTIVES:
            raise SpecError(f"objective must be one of {OBJECTIVES}")
        if self.restarts < 1:
            raise SpecError("need at least one restart")

    @property
    def dim(self) -> int:
        return self.n_sites - 1


@dataclass
class SearchResult:
    couplings: np.ndarray
    value: float  # objective with the bath
    value_bare: float  # same couplings, G = 0
    evaluations: int
    trace: list = field(default_factory=list)
    restart: int = 0

    @property
    def improved(self) -> bool:
        return self.value > self.value_bare


def _refined_peak(energies, weights, times, mags, i) -> float:
    # continuous maximum of |f| in the bracket around grid point i
    if i == 0 or i == len(times) - 1:
        return float(mags[i])

    def neg(t):
        return -abs(_propagate(energies, weights, np.array([t]))[0])

    res = minimize_scalar(neg, bounds=(times[i - 1], times[i + 1]), method="bounded",
                          options={"xatol": 1e-12})
    return max(float(mags[i]), -float(res.fun))


def peak_value(couplings, g_eff: float, t_max: float, kind: str = "global_peak", source: int = 1,
               target: Optional[int] = None) -> float:
    """Peak of ``|f_{target,source}|`` over ``[0, t_max]`` with bath coupling ``g_eff``."""
    chain = ChainSpec(len(couplings) + 1, couplings=tuple(couplings))
    target = chain.n_sites if target is None else target
    spec = eigendecompose(hopping_matrix(chain))
    dressed = dress(spec, g_eff)
    a = spec.eigenvectors
    pair = a[:, target - 1] * np.conj(a[:, source - 1])
    weights = ((dressed.chain_coeff ** 2) * pair[:, None]).ravel()
    energies = dressed.energies.ravel()
    times = time_grid(t_max, default_dt(spec.norm, g_eff))
    mags = np.abs(_propagate(energies, weights, times))
    if source == target:
        # skip the trivial peak at t = 0
        mags = mags.copy()
        mags[0] = 0.0
    if kind == "global_peak":
        i = int(np.argmax(mags))
        return _refined_peak(energies, weights, times, mags, i)
    if kind == "first_peak":
        from .dynamics import PEAK_FLOOR

        up = (mags[1:-1] > mags[:-2]) & (mags[1:-1] >= mags[2:]) & (mags[1:-1] > PEAK_FLOOR)
        idx = np.flatnonzero(up)
        if idx.size == 0:
            return 0.0
        return _refined_peak(energies, weights, times, mags, int(idx[0]) + 1)
    raise ValueError(f"unknown objective {kind!r}")


def objective(couplings, problem: SearchProblem, g_eff: Optional[float] = None) -> float:
    js = np.asarray(couplings, dtype=float)
    lo, hi = problem.bounds
    if js.shape != (problem.dim,):
        raise OutOfBounds(f"expected {problem.dim} couplings, got shape {js.shape}")
    if np.any(js < lo) or np.any(js > hi):
        raise OutOfBounds(f"couplings outside bounds [{lo}, {hi}]")
    g = problem.g_eff if g_eff is None else g_eff
    return peak_value(js, g, problem.t_max, problem.objective)


class _Counter:
    def __init__(self, fn: Callable, budget: int):
        self.fn = fn
        self.budget = budget
        self.calls = 0
        self.best_x = None
        self.best_f = -np.inf
        self.trace = []

    def __call__(self, x):
        if self.calls >= self.budget:
            raise BudgetExhausted
        self.calls += 1
        f = self.fn(x)
        if f > self.best_f:
            self.best_f, self.best_x = f, np.array(x)
        self.trace.append(self.best_f)
        return f


def nelder_mead(f: Callable, x0, lo: float, hi: float, step: float, tol: float = 1e-10,
                alpha=1.0, gamma=2.0, rho=0.5, sigma=0.5):
    """Maximize ``f`` inside the box ``[lo, hi]^d``; trial points are clipped to the box.

    Runs until the simplex collapses below ``tol`` or ``f`` raises BudgetExhausted.
    """
    dim = len(x0)
    pts = [np.clip(np.asarray(x0, float), lo, hi)]
    for i in range(dim):
        x = pts[0].copy()
        x[i] = x[i] + step if x[i] + step <= hi else x[i] - step
        pts.append(x)
    vals = [f(p) for p in pts]
    while True:
        order = np.argsort(vals, kind="stable")[::-1]
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        size = max(np.max(np.abs(p - pts[0])) for p in pts[1:])
        if size < tol or vals[0] - vals[-1] < tol * tol:
            return pts[0], vals[0]
        centroid = np.mean(pts[:-1], axis=0)
        xr = np.clip(centroid + alpha * (centroid - pts[-1]), lo, hi)
        fr = f(xr)
        if fr > vals[0]:
            xe = np.clip(centroid + gamma * (xr - centroid), lo, hi)
            fe = f(xe)
            pts[-1], vals[-1] = (xe, fe) if fe > fr else (xr, fr)
        elif fr > vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            if fr > vals[-1]:
                xc = np.clip(centroid + rho * (xr - centroid), lo, hi)
            else:
                xc = np.clip(centroid + rho * (pts[-1] - centroid), lo, hi)
            fc = f(xc)
            if fc > max(fr, vals[-1]):
                pts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, len(pts)):
                    pts[i] = np.clip(pts[0] + sigma * (pts[i] - pts[0]), lo, hi)
                    vals[i] = f(pts[i])


def coordinate_polish(f: Callable, x0, f0: float, lo: float, hi: float, step: float, min_step: float = 1e-7):
    x, fx = np.array(x0, float), f0
    while step >= min_step:
        moved = False
        for i in range(len(x)):
            for sgn in (1.0, -1.0):
                y = x.copy()
                y[i] = np.clip(y[i] + sgn * step, lo, hi)
                if y[i] == x[i]:
                    continue
                fy = f(y)
                if fy > fx:
                    x, fx, moved = y, fy, True
                    break
        if not moved:
            step *= 0.5
    return x, fx


def _run_restart(problem: SearchProblem, index: int):
    lo, hi = problem.bounds
    rng = np.random.default_rng([problem.seed, index])
    x0 = rng.uniform(lo, hi, size=problem.dim)
    counter = _Counter(lambda x: objective(x, problem), problem.budget)
    try:
        nelder_mead(counter, x0, lo, hi, step=0.1 * (hi - lo))
    except BudgetExhausted:
        pass
    if counter.best_x is None:
        raise BudgetExhausted("budget exhausted before any evaluation")
    return index, counter.best_x, counter.best_f, counter.calls, counter.trace


def search(problem: SearchProblem, map_fn: Callable = map, polish_budget: Optional[int] = None) -> SearchResult:
    """Multi-start simplex search maximizing the transfer peak with the bath.

    ``map_fn`` may be an executor's ``map``; the reduction (max value, ties to the
    lowest restart index) does not depend on evaluation order.
    """
    if problem.budget < 1:
        raise BudgetExhausted("budget exhausted before any evaluation")
    runs = list(map_fn(_run_restart, [problem] * problem.restarts, range(problem.restarts)))
    runs.sort(key=lambda r: r[0])
    best = max(runs, key=lambda r: (r[2], -r[0]))
    index, x, fx, _, _ = best
    evaluations = sum(r[3] for r in runs)
    trace = []
    for r in runs:
        for v in r[4]:
            trace.append(max(v, trace[-1]) if trace else v)
    lo, hi = problem.bounds
    counter = _Counter(lambda y: objective(y, problem),
                       polish_budget if polish_budget is not None else 50 * problem.dim)
    counter.best_x, counter.best_f = x, fx
    try:
        coordinate_polish(counter, x, fx, lo, hi, step=0.01 * (hi - lo))
    except BudgetExhausted:
        pass
    x, fx = counter.best_x, counter.best_f
    evaluations += counter.calls
    for v in counter.trace:
        trace.append(max(v, trace[-1]))
    value_bare = objective(x, problem, g_eff=0.0)
    return SearchResult(np.array(x), float(fx), float(value_bare), evaluations, trace, index)
