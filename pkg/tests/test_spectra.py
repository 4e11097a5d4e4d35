import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian
from spinbath.dynamics import bare_amplitudes, exact_amplitudes
from spinbath.model import ChainSpec, SpecError, hopping_matrix
from spinbath.spectra import (
    SpectralData,
    dress,
    effective_hamiltonian,
    eigendecompose,
    engineered_couplings,
)

seeds = st.integers(0, 2**32 - 1)


def test_two_site_eigensystem():
    spec = eigendecompose(hopping_matrix(ChainSpec(2, couplings=[1])))
    np.testing.assert_allclose(spec.eigenvalues, [-1, 1], atol=1e-15)
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(spec.eigenvectors, [[s, s], [s, -s]], atol=1e-15)


def test_single_site():
    spec = eigendecompose(hopping_matrix(ChainSpec(1, couplings=[])))
    assert spec.eigenvalues.tolist() == [0.0]
    assert spec.eigenvectors.tolist() == [[1.0]]


def test_uniform_chain_closed_form_spectrum():
    n = 10
    spec = eigendecompose(hopping_matrix(ChainSpec.uniform(n)))
    k = np.arange(1, n + 1)
    np.testing.assert_allclose(spec.eigenvalues, -2 * np.cos(k * np.pi / (n + 1)), atol=1e-13)
    # sine-wave eigenvectors, up to sign
    modes = np.sqrt(2 / (n + 1)) * np.sin(np.outer(k, k) * np.pi / (n + 1))
    np.testing.assert_allclose(np.abs(spec.eigenvectors), np.abs(modes), atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(SpecError):
        eigendecompose(np.array([[0, 1], [0, 0]]))


def test_sign_convention_first_component_positive(rng):
    spec = eigendecompose(random_hermitian(rng, 6))
    for row in spec.eigenvectors:
        first = row[np.abs(row) > 1e-12][0]
        assert first.real > 0 and abs(first.imag) < 1e-14


@given(seeds, st.integers(1, 12), st.booleans())
def test_eigendecompose_invariants(seed, n, cplx):
    h = random_hermitian(np.random.default_rng(seed), n, cplx)
    spec = eigendecompose(h)
    a = spec.eigenvectors
    assert np.max(np.abs(a @ a.conj().T - np.eye(n))) <= 1e-10
    resid = np.linalg.norm(h @ a.T - a.T * spec.eigenvalues, axis=0)
    assert np.max(resid) <= 1e-10 * max(1.0, np.linalg.norm(h, 2))
    assert np.all(np.diff(spec.eigenvalues) >= 0)


@pytest.mark.parametrize(
    "n, expected",
    [(2, [1.0]), (3, [np.sqrt(2), np.sqrt(2)]), (5, [2.0, np.sqrt(6), np.sqrt(6), 2.0])],
)
def test_engineered_couplings(n, expected):
    np.testing.assert_allclose(engineered_couplings(n), expected, rtol=1e-15)


def test_engineered_rescaled_sum():
    js = engineered_couplings(10, rescale_to=9.0)
    assert sum(js) == pytest.approx(9.0, rel=1e-14)
    ratio = np.array(js) / np.array(engineered_couplings(10))
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-14)


def test_engineered_needs_two_sites():
    with pytest.raises(SpecError):
        engineered_couplings(1)


def _spec(eps):
    eps = np.asarray(eps, float)
    return SpectralData(eps, np.eye(len(eps)), float(np.max(np.abs(eps))), np.diag(eps))


@pytest.mark.parametrize(
    "eps, g, delta, e0, e1",
    [(0.0, 1.0, 2.0, 1.0, -1.0), (3.0, 2.0, 5.0, 4.0, -1.0)],
)
def test_dress_arithmetic(eps, g, delta, e0, e1):
    d = dress(_spec([eps]), g)
    assert d.delta[0] == pytest.approx(delta)
    assert d.energies[0].tolist() == pytest.approx([e0, e1])


def test_dress_zero_coupling():
    eps = np.array([-1.5, -0.5, 0.7, 2.0])
    d = dress(_spec(eps), 0.0)
    np.testing.assert_allclose(d.delta, np.abs(eps))
    for k, e in enumerate(eps):
        assert sorted(d.energies[k]) == pytest.approx(sorted([e, 0.0]))
    # chain weight sits entirely on the branch with energy eps
    weights = d.chain_coeff ** 2
    on_eps = np.where(np.isclose(d.energies, eps[:, None]), weights, 0).sum(axis=1)
    np.testing.assert_allclose(on_eps, 1.0, atol=1e-15)


def test_dress_matches_closed_form_normalization():
    # direct transcription of the textbook expressions, nondegenerate modes
    eps = np.array([-1.7, -0.3, 0.4, 2.2])
    g = 0.8
    d = dress(_spec(eps), g)
    delta = np.sqrt(4 * g**2 + eps**2)
    for n, s in enumerate((1, -1)):
        c = np.sqrt((s * delta - 2 * g) ** 2 + eps**2)
        np.testing.assert_allclose(d.norms[:, n], c, rtol=1e-12)
        np.testing.assert_allclose(d.chain_coeff[:, n], (s * delta - 2 * g + eps) / (np.sqrt(2) * c), rtol=1e-12)
        np.testing.assert_allclose(d.energies[:, n], 0.5 * (eps + s * delta), rtol=1e-12)


def test_degenerate_mode_is_continuous_limit():
    g = 0.7
    exact0 = dress(_spec([0.0]), g)
    near = dress(_spec([1e-9]), g)
    np.testing.assert_allclose(near.energies, exact0.energies, atol=1e-9)
    np.testing.assert_allclose(near.chain_coeff, exact0.chain_coeff, atol=1e-9)
    np.testing.assert_allclose(near.bath_coeff, exact0.bath_coeff, atol=1e-9)
    assert exact0.degenerate[0] and not near.degenerate[0]


def test_odd_chain_zero_mode_flagged():
    d = dress(eigendecompose(hopping_matrix(ChainSpec.uniform(5))), 1.0)
    assert d.degenerate.sum() == 1


@given(seeds, st.integers(1, 10), st.floats(0, 5))
def test_dressed_energies_match_effective_hamiltonian(seed, n, g):
    h = random_hermitian(np.random.default_rng(seed), n)
    d = dress(eigendecompose(h), g)
    ref = np.linalg.eigvalsh(effective_hamiltonian(h, g))
    np.testing.assert_allclose(np.sort(d.energies.ravel()), ref, atol=1e-10 * max(1, np.max(np.abs(ref))))
    # trace preservation
    assert d.energies.sum() == pytest.approx(np.trace(h).real, abs=1e-10 * max(1, n * np.max(np.abs(ref))))
    np.testing.assert_allclose(d.energies[:, 0] + d.energies[:, 1], eigendecompose(h).eigenvalues, atol=1e-12 * max(1, g))
    np.testing.assert_allclose(d.energies[:, 0] - d.energies[:, 1], d.delta, atol=1e-12 * max(1, g))
    assert np.all(d.delta >= 2 * g - 1e-15)


@given(seeds, st.integers(1, 10), st.floats(0, 5))
def test_dressed_states_complete_and_orthonormal(seed, n, g):
    h = random_hermitian(np.random.default_rng(seed), n, complex_=False)
    d = dress(eigendecompose(h), g)
    # 2N x 2N matrix of overlaps: rows = (chain sites, bath spins), cols = dressed states
    states = np.concatenate(
        [d.chain_weights.reshape(2 * n, n).T, d.bath_weights.reshape(2 * n, n).T], axis=0
    )
    assert np.max(np.abs(states.conj().T @ states - np.eye(2 * n))) <= 1e-10
    chain = states[:n]
    assert np.max(np.abs(chain @ chain.conj().T - np.eye(n))) <= 1e-10
    heff = effective_hamiltonian(h, g)
    resid = heff @ states - states * d.energies.ravel()
    assert np.max(np.abs(resid)) <= 1e-10 * max(1.0, g, d.spectral.norm)


def test_degenerate_subspace_rotation_leaves_transfer_invariant(rng):
    # eigenvalues with multiplicity: {-1, -1, 0.5, 2, 2, 2}
    lam = np.array([-1.0, -1.0, 0.5, 2.0, 2.0, 2.0])
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    h = q @ np.diag(lam) @ q.T
    spec = eigendecompose(h)
    rot = np.eye(6)
    for block in ([0, 1], [3, 4, 5]):
        r, _ = np.linalg.qr(rng.normal(size=(len(block), len(block))))
        rot[np.ix_(block, block)] = r
    rotated = SpectralData(spec.eigenvalues, rot @ spec.eigenvectors, spec.norm, spec.matrix)
    times = np.linspace(0, 10, 101)
    for src, dst in [(1, 6), (2, 3), (4, 4)]:
        np.testing.assert_allclose(bare_amplitudes(rotated, src, dst, times),
                                   bare_amplitudes(spec, src, dst, times), atol=1e-12)
        np.testing.assert_allclose(exact_amplitudes(dress(rotated, 0.9), src, dst, times),
                                   exact_amplitudes(dress(spec, 0.9), src, dst, times), atol=1e-12)
