"""Chain and bath specifications for the single-excitation sector.

A chain is either a nearest-neighbour XX chain with couplings ``J_l`` or a
general Hermitian hopping matrix (any excitation-conserving Hamiltonian
restricted to one flip). Each chain site may carry its own bath of spins
with couplings ``g_k``; only the root-sum-square ``G_l`` enters the
effective dynamics, the individual couplings are kept for the brute-force
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12
DEFAULT_HOMOGENEITY_RTOL = 1e-9


class SpecError(ValueError):
    """Invalid chain or bath specification."""


class HeterogeneityError(ValueError):
    """Effective bath couplings differ by more than the allowed tolerance."""

    def __init__(self, spread: float, mean: float, rel_tol: float):
        self.spread = spread
        self.mean = mean
        self.rel_tol = rel_tol
        super().__init__(
            f"bath couplings are not homogeneous: spread {spread:.6g} around "
            f"mean {mean:.6g} exceeds rel_tol {rel_tol:g}"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= rtol * scale)


@dataclass(frozen=True)
class ChainSpec:
    """Chain of ``n_sites`` spins.

    Exactly one of ``couplings`` (length ``n_sites - 1``) or ``hopping``
    (``n_sites x n_sites`` Hermitian) must be given.
    """

    n_sites: int
    couplings: Optional[tuple] = None
    hopping: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise SpecError(f"n_sites must be a positive integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if (self.couplings is None) == (self.hopping is None):
            raise SpecError("give exactly one of couplings or hopping")
        if self.couplings is not None:
            js = tuple(float(j) for j in self.couplings)
            if len(js) != self.n_sites - 1:
                raise SpecError(
                    f"expected {self.n_sites - 1} couplings for {self.n_sites} sites, got {len(js)}"
                )
            if not all(np.isfinite(js)):
                raise SpecError("couplings must be finite")
            object.__setattr__(self, "couplings", js)
        else:
            h = np.asarray(self.hopping)
            if h.shape != (self.n_sites, self.n_sites):
                raise SpecError(f"hopping matrix must be {self.n_sites}x{self.n_sites}, got {h.shape}")
            if not np.all(np.isfinite(h)):
                raise SpecError("hopping matrix must be finite")
            if not is_hermitian(h):
                raise SpecError("hopping matrix is not Hermitian")
            h = h.astype(complex) if np.iscomplexobj(h) else h.astype(float)
            object.__setattr__(self, "hopping", _frozen(h))

    @classmethod
    def uniform(cls, n_sites: int, coupling: float = 1.0) -> "ChainSpec":
        return cls(n_sites, couplings=(coupling,) * (n_sites - 1))

    @classmethod
    def from_hopping(cls, h) -> "ChainSpec":
        h = np.asarray(h)
        return cls(h.shape[0], hopping=h)

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return self.n_sites == other.n_sites and np.array_equal(
            hopping_matrix(self), hopping_matrix(other)
        )

    def __hash__(self):
        return hash((self.n_sites, hopping_matrix(self).tobytes()))


@dataclass(frozen=True)
class BathSpec:
    """Independent spin baths, one list of couplings ``g_k`` per chain site."""

    per_site: tuple

    def __post_init__(self):
        sites = tuple(tuple(float(g) for g in gs) for gs in self.per_site)
        for gs in sites:
            if not all(np.isfinite(gs)):
                raise SpecError("bath couplings must be finite")
        object.__setattr__(self, "per_site", sites)

    @classmethod
    def empty(cls, n_sites: int) -> "BathSpec":
        return cls(((),) * n_sites)

    @classmethod
    def from_effective(cls, g_eff: Sequence[float]) -> "BathSpec":
        """One effective bath spin per site with coupling ``G_l``.

        Exact for the chain dynamics, since only ``G_l`` enters.
        """
        gs = [float(g) for g in g_eff]
        if any(g < 0 for g in gs):
            raise SpecError("effective couplings must be nonnegative")
        return cls(tuple((g,) if g > 0 else () for g in gs))

    @classmethod
    def homogeneous(cls, n_sites: int, g_eff: float) -> "BathSpec":
        return cls.from_effective([g_eff] * n_sites)

    @property
    def n_sites(self) -> int:
        return len(self.per_site)

    @property
    def n_bath_spins(self) -> int:
        return sum(len(gs) for gs in self.per_site)

    def effective(self) -> np.ndarray:
        """All ``G_l`` as an array."""
        return np.array([np.sqrt(np.sum(np.square(gs))) for gs in self.per_site], dtype=float)


@dataclass(frozen=True)
class HomogeneousBath:
    g_eff: float

    def __post_init__(self):
        if not np.isfinite(self.g_eff) or self.g_eff < 0:
            raise SpecError(f"effective coupling must be finite and >= 0, got {self.g_eff!r}")
        object.__setattr__(self, "g_eff", float(self.g_eff))


def effective_bath_coupling(bath: BathSpec, site: int) -> float:
    """Root-sum-square coupling of the bath at ``site`` (1-based)."""
    if not 1 <= site <= bath.n_sites:
        raise IndexError(f"site {site} out of range 1..{bath.n_sites}")
    return float(np.sqrt(np.sum(np.square(bath.per_site[site - 1]))))


def homogenize(
    bath: BathSpec, rel_tol: float = DEFAULT_HOMOGENEITY_RTOL, approximate: bool = False
) -> HomogeneousBath:
    """Collapse per-site ``G_l`` to their mean.

    Raises HeterogeneityError when ``max |G_l - mean| > rel_tol * mean``,
    unless ``approximate`` is set, in which case the mean is returned anyway.
    """
    gs = bath.effective()
    if gs.size == 0:
        raise SpecError("bath has no sites")
    if np.all(gs == gs[0]):
        return HomogeneousBath(float(gs[0]))
    mean = float(np.mean(gs))
    spread = float(np.max(np.abs(gs - mean)))
    if spread > rel_tol * mean and not approximate:
        raise HeterogeneityError(spread, mean, rel_tol)
    return HomogeneousBath(mean)


def relative_spread(bath: BathSpec) -> float:
    gs = bath.effective()
    mean = float(np.mean(gs))
    if mean == 0.0:
        return 0.0
    return float(np.max(np.abs(gs - mean)) / mean)


def hopping_matrix(chain: ChainSpec) -> np.ndarray:
    """Single-excitation matrix of the chain Hamiltonian.

    For couplings ``J_l`` this is tridiagonal with ``-J_l`` between sites
    ``l`` and ``l+1``.
    """
    if chain.hopping is not None:
        return chain.hopping
    n = chain.n_sites
    h = np.zeros((n, n))
    if n > 1:
        js = -np.asarray(chain.couplings, dtype=float)
        h[np.arange(n - 1), np.arange(1, n)] = js
        h[np.arange(1, n), np.arange(n - 1)] = js
    h.setflags(write=False)
    return h
