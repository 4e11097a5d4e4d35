"""Brute-force reference: the unreduced one-excitation Hamiltonian.

Basis: the ``N`` chain flips first, then every bath spin flip in site-major
order. Nothing is assumed about the bath beyond what the model states, so
this is the independent check on the effective ``2N`` reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import TransferSeries, _check_site, chain_hash, exact_amplitudes
from .model import BathSpec, ChainSpec, SpecError, homogenize, hopping_matrix
from .spectra import dress, eigendecompose

MAX_DIMENSION = 2000


class DimensionCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FullSectorHamiltonian:
    matrix: np.ndarray
    n_sites: int
    bath_sites: tuple  # chain site (1-based) of each bath basis state

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def build_full(chain: ChainSpec, bath: BathSpec) -> FullSectorHamiltonian:
    n = chain.n_sites
    if bath.n_sites != n:
        raise SpecError(f"bath has {bath.n_sites} sites, chain has {n}")
    dim = n + bath.n_bath_spins
    if dim > MAX_DIMENSION:
        raise DimensionCapExceeded(f"sector dimension {dim} exceeds cap {MAX_DIMENSION}")
    h = hopping_matrix(chain)
    mat = np.zeros((dim, dim), dtype=h.dtype)
    mat[:n, :n] = h
    owners = []
    row = n
    for site, gs in enumerate(bath.per_site):
        for g in gs:
            mat[row, site] = -g
            mat[site, row] = -g
            owners.append(site + 1)
            row += 1
    mat.setflags(write=False)
    return FullSectorHamiltonian(mat, n, tuple(owners))


class Propagator:
    """Eigendecomposition of the full matrix, reused across time points."""

    def __init__(self, full: FullSectorHamiltonian):
        self.full = full
        w, v = np.linalg.eigh(full.matrix)
        self.energies = w
        self.vectors = v

    def column(self, source: int, times) -> np.ndarray:
        """``[t, j]`` amplitudes on every basis state ``j`` after starting at chain ``source``."""
        _check_site(source, self.full.n_sites, "source")
        v = self.vectors
        weights = v * np.conj(v[source - 1])[None, :]
        phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), self.energies))
        return phases @ weights.T

    def amplitudes(self, source: int, target: int, times) -> np.ndarray:
        _check_site(source, self.full.n_sites, "source")
        _check_site(target, self.full.n_sites, "target")
        v = self.vectors
        weights = v[target - 1] * np.conj(v[source - 1])
        phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), self.energies))
        return phases @ weights


def oracle_transfer(full: FullSectorHamiltonian, source: int, target: int, times) -> TransferSeries:
    """``<target| exp(-iHt) |source>`` from a dense eigendecomposition of the full sector."""
    times = np.asarray(times, dtype=float)
    amps = Propagator(full).amplitudes(source, target, times)
    return TransferSeries(times, amps, source, target, "oracle",
                          {"chain": chain_hash(full.matrix[: full.n_sites, : full.n_sites]),
                           "dimension": full.dimension})


def inhomogeneity_deviation(chain: ChainSpec, bath: BathSpec, times, source: int = 1, target=None) -> float:
    """Sup-norm gap between the oracle and the analytic formula at ``G = mean(G_l)``."""
    target = chain.n_sites if target is None else target
    g = homogenize(bath, approximate=True).g_eff
    exact = exact_amplitudes(dress(eigendecompose(hopping_matrix(chain)), g), source, target, times)
    full = oracle_transfer(build_full(chain, bath), source, target, times).amplitudes
    return float(np.max(np.abs(full - exact)))


def random_bath(rng: np.random.Generator, g_targets, m_range=(1, 4), low=0.2, high=1.0) -> BathSpec:
    """Random couplings per site, uniform on ``[low, high]``, rescaled to hit ``g_targets``."""
    per_site = []
    for g in g_targets:
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        gs = rng.uniform(low, high, size=m)
        if m and g > 0:
            gs = gs * (g / np.sqrt(np.sum(gs ** 2)))
            per_site.append(tuple(gs))
        else:
            per_site.append(())
    return BathSpec(tuple(per_site))


def spread_bath(n_sites: int, g_mean: float, spread: float, seed: int = 0, spins_per_site: int = 3) -> BathSpec:
    """Bath whose ``G_l`` scatter by at most ``spread`` (relative) around ``g_mean``.

    The scatter pattern depends only on ``seed``, so varying ``spread`` scales
    one fixed pattern.
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, size=n_sites)
    u = u - u.mean()
    u = u / np.max(np.abs(u)) if np.any(u) else u
    g_targets = g_mean * (1.0 + spread * u)
    return random_bath(rng, g_targets, m_range=(spins_per_site, spins_per_site))
