import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinbath.model import (
    BathSpec,
    ChainSpec,
    HeterogeneityError,
    SpecError,
    effective_bath_coupling,
    homogenize,
    hopping_matrix,
    is_hermitian,
)

couplings = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("gs, expected", [([3, 4], 5.0), ([], 0.0), ([1, 1, 1, 1], 2.0)])
def test_effective_bath_coupling(gs, expected):
    bath = BathSpec((gs,))
    assert effective_bath_coupling(bath, 1) == expected


def test_effective_bath_coupling_site_range():
    bath = BathSpec(((1.0,), (2.0,)))
    with pytest.raises(IndexError):
        effective_bath_coupling(bath, 0)
    with pytest.raises(IndexError):
        effective_bath_coupling(bath, 3)


@given(st.lists(couplings, max_size=8), st.randoms(use_true_random=False))
def test_effective_coupling_permutation_and_sign_invariant(gs, rnd):
    shuffled = list(gs)
    rnd.shuffle(shuffled)
    flipped = [g if rnd.random() < 0.5 else -g for g in shuffled]
    a = effective_bath_coupling(BathSpec((gs,)), 1)
    b = effective_bath_coupling(BathSpec((flipped,)), 1)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


def test_homogenize_exact():
    assert homogenize(BathSpec.from_effective([2, 2, 2]), rel_tol=0).g_eff == 2.0
    assert homogenize(BathSpec.from_effective([0.1] * 3), rel_tol=0).g_eff == 0.1


def test_homogenize_within_tolerance():
    assert homogenize(BathSpec.from_effective([1.00, 1.02, 0.98]), rel_tol=0.05).g_eff == pytest.approx(1.0)


def test_homogenize_rejects_spread():
    with pytest.raises(HeterogeneityError) as info:
        homogenize(BathSpec.from_effective([1, 3]), rel_tol=0.1)
    assert info.value.spread == pytest.approx(1.0)


def test_homogenize_approximate_mode_returns_mean():
    assert homogenize(BathSpec.from_effective([1, 3]), approximate=True).g_eff == 2.0


@given(st.floats(0, 10, allow_nan=False), st.integers(1, 6), st.integers(1, 4))
def test_homogenize_identical_sites_returns_that_g(g, n, m):
    # several spins per site, all rescaled to the same G
    per_site = tuple((g / np.sqrt(m),) * m for _ in range(n))
    target = effective_bath_coupling(BathSpec(per_site), 1)
    assert homogenize(BathSpec(per_site)).g_eff == target


def test_bath_without_spins_has_zero_g():
    bath = BathSpec(((), (1.0,)))
    assert bath.effective().tolist() == [0.0, 1.0]


@pytest.mark.parametrize(
    "chain, expected",
    [
        (ChainSpec(2, couplings=[1]), [[0, -1], [-1, 0]]),
        (ChainSpec(3, couplings=[1, 2]), [[0, -1, 0], [-1, 0, -2], [0, -2, 0]]),
        (ChainSpec(1, couplings=[]), [[0]]),
    ],
)
def test_hopping_matrix(chain, expected):
    np.testing.assert_array_equal(hopping_matrix(chain), expected)


@given(st.lists(couplings, min_size=0, max_size=11))
def test_hopping_matrix_hermitian(js):
    h = hopping_matrix(ChainSpec(len(js) + 1, couplings=js))
    assert np.array_equal(h, h.conj().T)


def test_couplings_and_hopping_representations_agree():
    chain = ChainSpec(4, couplings=[0.5, 1.0, 0.0])
    general = ChainSpec.from_hopping(hopping_matrix(chain))
    assert chain == general


def test_hopping_spec_is_immutable():
    chain = ChainSpec.from_hopping(np.eye(2))
    with pytest.raises(ValueError):
        chain.hopping[0, 0] = 5


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_sites=0, couplings=[]),
        dict(n_sites=3, couplings=[1.0]),
        dict(n_sites=2),
        dict(n_sites=2, couplings=[1.0], hopping=np.zeros((2, 2))),
        dict(n_sites=2, hopping=np.array([[0, 1], [2, 0]])),
        dict(n_sites=2, couplings=[np.nan]),
    ],
)
def test_invalid_chain_specs(kwargs):
    with pytest.raises(SpecError):
        ChainSpec(**kwargs)


def test_hermitian_tolerance_is_relative():
    h = np.array([[0, 1e6], [1e6 + 1e-7, 0]])
    assert is_hermitian(h)
    assert not is_hermitian(np.array([[0, 1.0], [1.0 + 1e-9, 0]]))
