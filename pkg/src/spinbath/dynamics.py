"""Transfer amplitudes ``f_{m,n}(t) = <m| exp(-iHt) |n>`` on a time grid.

Sites are 1-based throughout: ``source`` is where the excitation starts,
``target`` where it is read out. Times are in units of inverse energy
(hbar = 1).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spectra import DressedSpectrum, SpectralData

PEAK_FLOOR = 0.05
WEAK_EPS_TOL = 1e-8
_SERIES_X = 0.1
_SERIES_TERMS = 14

FORMULAS = ("bare", "exact", "strong_approx", "weak_corrected", "oracle")


class PeakNotFound(LookupError):
    pass


@dataclass(frozen=True)
class TransferSeries:
    times: np.ndarray
    amplitudes: np.ndarray
    source: int
    target: int
    formula: str
    parameters: dict = field(default_factory=dict)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    def __len__(self):
        return len(self.times)


def chain_hash(h) -> str:
    h = np.ascontiguousarray(np.asarray(h, dtype=complex))
    return hashlib.sha256(h.tobytes()).hexdigest()[:16]


def default_dt(norm: float, g_eff: float = 0.0) -> float:
    """Step resolving both the chain dynamics and the ``cos(Gt)`` modulation."""
    dt = 0.05 / max(1.0, float(g_eff))
    if norm > 0:
        dt = min(dt, 0.05 / norm)
    return dt


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid on ``[0, t_max]`` with spacing at most ``dt``, endpoint included."""
    if t_max < 0 or not dt > 0:
        raise ValueError("need t_max >= 0 and dt > 0")
    steps = max(1, int(math.ceil(t_max / dt - 1e-9)))
    return np.linspace(0.0, float(t_max), steps + 1)


def _check_site(site: int, n: int, name: str):
    if not 1 <= site <= n:
        raise IndexError(f"{name} site {site} out of range 1..{n}")


def _propagate(energies, weights, times) -> np.ndarray:
    # sum_j exp(-i E_j t) weights_j, fixed order per time point
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(times, energies))
    return phases @ weights


def bare_amplitudes(spec: SpectralData, source: int, target: int, times) -> np.ndarray:
    n = spec.n_sites
    _check_site(source, n, "source")
    _check_site(target, n, "target")
    a = spec.eigenvectors
    weights = a[:, target - 1] * np.conj(a[:, source - 1])
    return _propagate(spec.eigenvalues, weights, times)


def bare_transfer(spec: SpectralData, source: int, target: int, times) -> TransferSeries:
    """Transfer amplitude of the isolated chain, ``sum_k exp(-i eps_k t) a_k,target a*_k,source``."""
    times = np.asarray(times, dtype=float)
    amps = bare_amplitudes(spec, source, target, times)
    return TransferSeries(times, amps, source, target, "bare",
                          {"g_eff": 0.0, "chain": chain_hash(spec.matrix)})


def exact_amplitudes(dressed: DressedSpectrum, source: int, target: int, times) -> np.ndarray:
    spec = dressed.spectral
    n = spec.n_sites
    _check_site(source, n, "source")
    _check_site(target, n, "target")
    a = spec.eigenvectors
    pair = a[:, target - 1] * np.conj(a[:, source - 1])
    weights = (dressed.chain_coeff ** 2) * pair[:, None]
    return _propagate(dressed.energies.ravel(), weights.ravel(), times)


def exact_transfer(dressed: DressedSpectrum, source: int, target: int, times) -> TransferSeries:
    """Chain transfer amplitude with a homogeneous bath, summed over all ``2N`` dressed states."""
    times = np.asarray(times, dtype=float)
    amps = exact_amplitudes(dressed, source, target, times)
    return TransferSeries(times, amps, source, target, "exact",
                          {"g_eff": dressed.g_eff, "chain": chain_hash(dressed.spectral.matrix)})


def chain_amplitudes(dressed: DressedSpectrum, source: int, times) -> np.ndarray:
    """``[t, l]`` amplitudes on every chain site for an excitation started at ``source``."""
    n = dressed.spectral.n_sites
    _check_site(source, n, "source")
    w = dressed.chain_weights.reshape(2 * n, n)
    weights = w * np.conj(w[:, source - 1])[:, None]
    return _propagate(dressed.energies.ravel(), weights, times)


def bath_amplitudes(dressed: DressedSpectrum, source: int, times) -> np.ndarray:
    """``[t, l]`` amplitudes on the effective bath spin of every site."""
    n = dressed.spectral.n_sites
    _check_site(source, n, "source")
    w = dressed.chain_weights.reshape(2 * n, n)
    b = dressed.bath_weights.reshape(2 * n, n)
    weights = b * np.conj(w[:, source - 1])[:, None]
    return _propagate(dressed.energies.ravel(), weights, times)


def _weak_bracket(eps: float, times: np.ndarray) -> np.ndarray:
    # exp(-i eps t)(-1/eps^2 - i t/eps) + 1/eps^2, cancellation-free
    if abs(eps) <= WEAK_EPS_TOL:
        return -0.5 * times ** 2 + 0j
    x = eps * times
    out = np.empty(times.shape, dtype=complex)
    small = np.abs(x) < _SERIES_X
    if np.any(small):
        xs = x[small]
        acc = np.zeros(xs.shape, dtype=complex)
        for j in range(_SERIES_TERMS, 1, -1):
            acc = acc * xs + (-1j) ** j * (1 - j) / math.factorial(j)
        out[small] = -(times[small] ** 2) * acc
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = (np.exp(-1j * xb) * (-1.0 - 1j * xb) + 1.0) / eps ** 2
    return out


def weak_correction(spec: SpectralData, source: int, target: int, t, g_eff: float):
    """Leading ``G^2`` change of the transfer amplitude.

    Returns a complex scalar for scalar ``t``, an array otherwise.
    """
    n = spec.n_sites
    _check_site(source, n, "source")
    _check_site(target, n, "target")
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    a = spec.eigenvectors
    pair = a[:, target - 1] * np.conj(a[:, source - 1])
    total = np.zeros(times.shape, dtype=complex)
    for k, eps in enumerate(spec.eigenvalues):
        total += pair[k] * _weak_bracket(float(eps), times)
    total *= float(g_eff) ** 2
    return complex(total[0]) if scalar else total


def weak_corrected_transfer(spec: SpectralData, source: int, target: int, times, g_eff: float) -> TransferSeries:
    times = np.asarray(times, dtype=float)
    amps = bare_amplitudes(spec, source, target, times) + weak_correction(spec, source, target, times, g_eff)
    eps_min = float(np.min(np.abs(spec.eigenvalues)))
    return TransferSeries(times, amps, source, target, "weak_corrected",
                          {"g_eff": float(g_eff), "chain": chain_hash(spec.matrix), "min_abs_eps": eps_min})


def strong_coupling_approx(spec: SpectralData, source: int, target: int, times, g_eff: float) -> TransferSeries:
    """``cos(G t) f0(t / 2)``: the bare transfer slowed by half and modulated."""
    times = np.asarray(times, dtype=float)
    g = float(g_eff)
    amps = np.cos(g * times) * bare_amplitudes(spec, source, target, 0.5 * times)
    return TransferSeries(times, amps, source, target, "strong_approx",
                          {"g_eff": g, "chain": chain_hash(spec.matrix)})


def modulate(bare_half: TransferSeries, g_eff: float) -> TransferSeries:
    """Apply the modulation to a bare series already sampled at ``t/2``.

    ``bare_half.times`` are the half-times; the result lives on ``2 * times``.
    """
    times = 2.0 * bare_half.times
    amps = np.cos(float(g_eff) * times) * bare_half.amplitudes
    params = dict(bare_half.parameters, g_eff=float(g_eff))
    return TransferSeries(times, amps, bare_half.source, bare_half.target, "strong_approx", params)


def _refine(times, mags, i):
    y0, y1, y2 = mags[i - 1], mags[i], mags[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(times[i]), float(y1)
    delta = 0.5 * (y0 - y2) / denom
    h = times[i + 1] - times[i]
    return float(times[i] + delta * h), float(y1 - 0.25 * (y0 - y2) * delta)


def first_peak(series: TransferSeries, floor: float = PEAK_FLOOR):
    """First local maximum of ``|f|`` above ``floor``, refined by a parabola through 3 points."""
    mags = series.magnitude
    if mags.size < 3:
        raise ValueError("need at least 3 points to locate a peak")
    t = series.times
    up = (mags[1:-1] > mags[:-2]) & (mags[1:-1] >= mags[2:]) & (mags[1:-1] > floor)
    idx = np.flatnonzero(up)
    if idx.size == 0:
        raise PeakNotFound("no local maximum above the floor")
    return _refine(t, mags, int(idx[0]) + 1)


def global_peak(series: TransferSeries):
    """Largest ``|f|`` on the grid, refined when it sits in the interior."""
    mags = series.magnitude
    if mags.size == 0:
        raise ValueError("empty series")
    i = int(np.argmax(mags))
    if 0 < i < mags.size - 1:
        return _refine(series.times, mags, i)
    return float(series.times[i]), float(mags[i])


def sup_distance(a: TransferSeries, b: TransferSeries) -> float:
    if not np.array_equal(a.times, b.times):
        raise ValueError("series live on different grids")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def evaluate(formula: str, spec: SpectralData, source: int, target: int, times,
             g_eff: float = 0.0, dressed: Optional[DressedSpectrum] = None) -> TransferSeries:
    """Dispatch on a formula name (everything except the oracle)."""
    from .spectra import dress

    if formula == "bare":
        return bare_transfer(spec, source, target, times)
    if formula == "exact":
        return exact_transfer(dressed if dressed is not None else dress(spec, g_eff), source, target, times)
    if formula == "strong_approx":
        return strong_coupling_approx(spec, source, target, times, g_eff)
    if formula == "weak_corrected":
        return weak_corrected_transfer(spec, source, target, times, g_eff)
    raise ValueError(f"unknown formula {formula!r}")
