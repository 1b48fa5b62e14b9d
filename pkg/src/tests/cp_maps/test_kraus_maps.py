import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.common.exception.dilation_exceptions import InvalidInput, NotContractive
from src.components.linalg_core.matrix_ops import Tolerance, adjoint
from src.components.cp_maps.kraus_maps import (
    KrausFamily,
    apply_cp,
    channel_from_choi,
    choi_distance,
    choi_matrix,
    commute_residual,
    compose_cp,
    maps_commute,
    multiplicativity_residual,
    reduce_kraus,
)
from src.utils import fixture_catalogue as catalogue


def _random_family(seed: int, d: int, size: int) -> KrausFamily:
    rng = np.random.default_rng(seed)
    ops = rng.standard_normal((size, d, d)) + 1j * rng.standard_normal((size, d, d))
    gram = np.einsum("ipq,irq->pr", ops, ops.conj())
    scale = np.sqrt(np.linalg.eigvalsh(gram).max())
    return KrausFamily(d=d, ops=list(ops / scale))


def test_kraus_family_rejects_wrong_shape():
    with pytest.raises(InvalidInput) as err:
        KrausFamily(d=2, ops=[np.eye(3)])
    assert err.value.identity == "kraus_shape"


def test_kraus_family_rejects_non_contractive_family():
    with pytest.raises(NotContractive):
        KrausFamily(d=2, ops=[np.eye(2), np.eye(2)])


def test_kraus_operators_are_read_only():
    family = catalogue.identity_channel(2)
    with pytest.raises(ValueError):
        family.ops[0][0, 0] = 5.0


def test_choi_matrix_of_identity_channel():
    choi = choi_matrix(catalogue.identity_channel(2)).mat
    expected = np.zeros((4, 4))
    for a in (0, 3):
        for b in (0, 3):
            expected[a, b] = 1.0
    assert np.allclose(choi, expected)


def test_apply_bit_flip_mixes_the_diagonal():
    out = apply_cp(catalogue.bit_flip(0.5), np.diag([1.0, 0.0]))
    assert np.allclose(out, 0.5 * np.eye(2))


@pytest.mark.parametrize("name", sorted(catalogue.COMMUTING_PAIRS))
def test_catalogue_pairs_commute(name):
    theta, phi = catalogue.COMMUTING_PAIRS[name]()
    assert maps_commute(theta, phi)
    assert commute_residual(theta, phi) < 1e-12


def test_conjugations_by_x_and_hadamard_do_not_commute():
    theta, phi = catalogue.noncommuting_pair()
    assert not maps_commute(theta, phi)
    assert commute_residual(theta, phi) > 1e-3


def test_compose_orders_products_lexicographically(pauli_pair):
    theta, phi = pauli_pair
    composed = compose_cp(theta, phi)
    assert composed.n == 4
    assert np.allclose(composed.ops[1], theta.ops[0] @ phi.ops[1])
    assert np.allclose(composed.ops[2], theta.ops[1] @ phi.ops[0])


def test_reduce_kraus_merges_repeated_operators(tol):
    family = KrausFamily(d=2, ops=[np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)])
    reduced = reduce_kraus(family, tol)
    assert reduced.n == 1
    assert choi_distance(family, reduced) < 1e-12


def test_reduce_kraus_keeps_independent_family(pauli_pair, tol):
    theta, _ = pauli_pair
    assert reduce_kraus(theta, tol) is theta


def test_reduce_kraus_of_zero_map_is_empty(tol):
    reduced = reduce_kraus(catalogue.zero_map(2), tol)
    assert reduced.n == 0
    assert np.allclose(apply_cp(reduced, np.eye(2)), 0.0)


def test_channel_from_choi_recovers_the_map(tol):
    theta = catalogue.bit_flip(0.25)
    rebuilt = channel_from_choi(choi_matrix(theta), tol)
    assert rebuilt.n == 2
    assert choi_distance(theta, rebuilt) < 1e-12


def test_multiplicativity_separates_endomorphisms_from_channels():
    assert multiplicativity_residual(catalogue.conjugation(catalogue.X)) < 1e-12
    assert multiplicativity_residual(catalogue.bit_flip(0.5)) > 0.1


def test_dimension_mismatch_is_rejected():
    with pytest.raises(InvalidInput):
        compose_cp(catalogue.identity_channel(2), catalogue.identity_channel(3))


@settings(max_examples=20, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    d=st.integers(min_value=1, max_value=3),
    size=st.integers(min_value=1, max_value=4),
)
def test_choi_matrix_is_psd_and_determines_the_map(seed, d, size):
    theta = _random_family(seed, d, size)
    choi = choi_matrix(theta)
    assert np.linalg.eigvalsh(choi.mat).min() > -1e-10
    rebuilt = channel_from_choi(choi, Tolerance(eps=1e-9))
    assert rebuilt.n <= min(size, d * d)
    assert choi_distance(theta, rebuilt) < 1e-9


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), d=st.integers(min_value=1, max_value=3))
def test_apply_cp_is_completely_positive_on_a_psd_input(seed, d):
    theta = _random_family(seed, d, 2)
    rng = np.random.default_rng(seed + 1)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    out = apply_cp(theta, z @ adjoint(z))
    assert np.allclose(out, adjoint(out))
    assert np.linalg.eigvalsh(0.5 * (out + adjoint(out))).min() > -1e-10
