"""Bare and bath-dressed spectra of the single-excitation Hamiltonian.

With a homogeneous effective bath coupling ``G`` the ``2N`` dimensional
chain + effective-bath space splits into ``N`` independent 2x2 blocks, one
per bare eigenmode ``eps_k``. Each block gives two dressed energies
``(eps_k +/- Delta_k) / 2`` with ``Delta_k = sqrt(4 G^2 + eps_k^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import SpecError, is_hermitian

DEGENERATE_RTOL = 1e-12
_SIGN_ATOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Eigensystem of a hopping matrix.

    ``eigenvectors[k, l]`` is the amplitude of mode ``k`` on site ``l``, so
    row ``k`` is the eigenvector of ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    norm: float
    matrix: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def degenerate_tol(self) -> float:
        return DEGENERATE_RTOL * max(1.0, self.norm)


@dataclass(frozen=True)
class DressedSpectrum:
    """Dressed eigensystem for a homogeneous bath coupling ``g_eff``.

    Arrays indexed ``[k, n]`` hold the branch ``n in {0, 1}`` of mode ``k``;
    ``chain_weights[k, n, l]`` is the overlap of site ``l`` (chain side) with
    dressed state ``(k, n)`` and ``bath_weights[k, n, l]`` the overlap of the
    effective bath spin of site ``l``.
    """

    spectral: SpectralData
    g_eff: float
    delta: np.ndarray
    energies: np.ndarray
    norms: np.ndarray
    chain_coeff: np.ndarray
    bath_coeff: np.ndarray
    degenerate: np.ndarray

    @property
    def chain_weights(self) -> np.ndarray:
        return self.chain_coeff[:, :, None] * self.spectral.eigenvectors[:, None, :]

    @property
    def bath_weights(self) -> np.ndarray:
        return self.bath_coeff[:, :, None] * self.spectral.eigenvectors[:, None, :]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # rows: make the first non-negligible component real and positive
    out = vecs.copy()
    for k in range(out.shape[0]):
        row = out[k]
        idx = int(np.argmax(np.abs(row) > _SIGN_ATOL))
        pivot = row[idx]
        if np.iscomplexobj(out):
            out[k] = row * (abs(pivot) / pivot)
        elif pivot < 0:
            out[k] = -row
    return out


def eigendecompose(h) -> SpectralData:
    """Diagonalize a Hermitian hopping matrix.

    Eigenvalues ascend; each eigenvector's first non-negligible entry is made
    real positive so repeated runs serialize identically.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise SpecError(f"expected a nonempty square matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise SpecError("matrix is not Hermitian")
    if not np.iscomplexobj(h) or np.all(h.imag == 0):
        h = np.real(h).astype(float)
    # symmetrize so eigh sees exactly Hermitian input
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    vecs = _fix_signs(v.T)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    for a in (w, vecs, h):
        a.setflags(write=False)
    return SpectralData(w, vecs, norm, h)


def engineered_couplings(n_sites: int, rescale_to: Optional[float] = None) -> list:
    """Perfect-transfer couplings ``J_l = sqrt(l (N - l))``.

    With ``rescale_to`` the couplings are scaled uniformly so they sum to it.
    """
    if int(n_sites) != n_sites or n_sites < 2:
        raise SpecError(f"engineered chain needs at least 2 sites, got {n_sites!r}")
    n = int(n_sites)
    js = [float(np.sqrt(l * (n - l))) for l in range(1, n)]
    if rescale_to is not None:
        scale = float(rescale_to) / sum(js)
        js = [j * scale for j in js]
    return js


def dress(spec: SpectralData, g_eff: float) -> DressedSpectrum:
    """Block-diagonalize chain + homogeneous effective bath.

    Branch ``n=0`` uses ``Delta - 2G = eps^2 / (Delta + 2G)`` to avoid
    cancellation. Modes with ``|eps| <= degenerate_tol`` take the analytic
    limit: energies ``+G`` / ``-G`` and chain overlaps ``+-1/sqrt(2)``.
    """
    g = float(g_eff)
    if not np.isfinite(g) or g < 0:
        raise SpecError(f"g_eff must be finite and >= 0, got {g_eff!r}")
    eps = np.asarray(spec.eigenvalues, dtype=float)
    n = eps.shape[0]
    delta = np.sqrt(4.0 * g * g + eps * eps)
    energies = np.empty((n, 2))
    norms = np.empty((n, 2))
    chain = np.empty((n, 2))
    bath = np.empty((n, 2))
    degenerate = np.abs(eps) <= spec.degenerate_tol
    s2 = np.sqrt(2.0)
    for k in range(n):
        e, d = eps[k], delta[k]
        if degenerate[k]:
            # |E^0> -> |Psi^1>, |E^1> -> -|Psi^0>, the eps -> 0+ limit
            energies[k] = (g, -g)
            norms[k] = (0.0, 4.0 * g)
            chain[k] = (1.0 / s2, -1.0 / s2)
            bath[k] = (-1.0 / s2, -1.0 / s2)
            continue
        energies[k] = (0.5 * (e + d), 0.5 * (e - d))
        # branch 0: (Delta - 2G) = eps * x with x = eps / (Delta + 2G)
        x = e / (d + 2.0 * g)
        c0 = abs(e) * np.hypot(1.0, x)
        sgn = 1.0 if e > 0 else -1.0
        r = np.hypot(1.0, x)
        chain[k, 0] = sgn * (x + 1.0) / (s2 * r)
        bath[k, 0] = sgn * (x - 1.0) / (s2 * r)
        # branch 1: (-Delta - 2G) never cancels
        m = -d - 2.0 * g
        c1 = np.hypot(m, e)
        chain[k, 1] = (m + e) / (s2 * c1)
        bath[k, 1] = (m - e) / (s2 * c1)
        norms[k] = (c0, c1)
    for a in (delta, energies, norms, chain, bath, degenerate):
        a.setflags(write=False)
    return DressedSpectrum(spec, g, delta, energies, norms, chain, bath, degenerate)


def effective_hamiltonian(h, g_eff) -> np.ndarray:
    """``2N x 2N`` matrix on chain sites followed by effective bath spins.

    ``g_eff`` may be a scalar or one value per site.
    """
    h = np.asarray(h)
    n = h.shape[0]
    gs = np.broadcast_to(np.asarray(g_eff, dtype=float), (n,))
    dtype = complex if np.iscomplexobj(h) else float
    heff = np.zeros((2 * n, 2 * n), dtype=dtype)
    heff[:n, :n] = h
    idx = np.arange(n)
    heff[idx, n + idx] = -gs
    heff[n + idx, idx] = -gs
    return heff
