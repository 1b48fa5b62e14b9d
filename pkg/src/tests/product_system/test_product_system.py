import numpy as np
import pytest

from src.common.exception.dilation_exceptions import InvalidFlip, InvalidInput, NotContractive
from src.components.product_system.product_system import (
    CovariantRep,
    check_compatible,
    commutation_residual,
    flip_coherence_residual,
    flip_mn,
    induced_cp_pair,
    make_system,
    row_matrix,
    row_norm,
)
from src.components.linalg_core.matrix_ops import unitarity_residual
from src.utils import fixture_catalogue as catalogue


def test_make_system_rejects_wrong_shape():
    with pytest.raises(InvalidFlip) as err:
        make_system(2, 2, np.eye(3))
    assert err.value.identity == "flip_shape"


def test_make_system_rejects_non_unitary_flip():
    with pytest.raises(InvalidFlip):
        make_system(1, 2, 0.5 * np.eye(2))


def test_rep_rejects_non_contractive_row():
    with pytest.raises(NotContractive):
        CovariantRep(h=1, T=[[[0.8]], [[0.8]]], S=[[[0.1]]])


def test_rep_needs_operators_on_both_sides():
    with pytest.raises(InvalidInput):
        CovariantRep(h=1, T=[[[0.5]]], S=[])


def test_rep_rejects_mismatched_system(pauli_rep):
    _, rep = pauli_rep
    with pytest.raises(InvalidInput):
        check_compatible(make_system(1, 1, [[1.0]]), rep)


@pytest.mark.parametrize("powers", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_pauli_rep_commutes_through_every_flip(pauli_rep, powers):
    sys, rep = pauli_rep
    assert commutation_residual(sys, rep, *powers) < 1e-12


@pytest.mark.parametrize("name", sorted(catalogue.REPRESENTATIONS))
def test_catalogue_representations_satisfy_the_relation(name):
    sys, rep = catalogue.REPRESENTATIONS[name]()
    assert commutation_residual(sys, rep, 1, 1) < 1e-12


def test_noncommuting_rep_misses_the_relation():
    sys, rep = catalogue.noncommuting_rep()
    assert commutation_residual(sys, rep, 1, 1) == pytest.approx(0.25)


def test_flip_powers_are_unitary_and_coherent(pauli_rep):
    sys, _ = pauli_rep
    for powers in [(1, 1), (2, 1), (1, 2), (2, 3)]:
        assert unitarity_residual(flip_mn(sys, *powers)) < 1e-12
    assert flip_coherence_residual(sys, 1, 1, 2) < 1e-12
    assert np.allclose(flip_mn(sys, 0, 3), np.eye(8))
    assert flip_mn(sys, 2, 2) is flip_mn(sys, 2, 2)


def test_row_matrix_of_length_zero_is_identity(pauli_rep):
    _, rep = pauli_rep
    assert np.allclose(row_matrix(rep, "T", 0), np.eye(2))
    assert row_matrix(rep, "S", 2).shape == (2, 8)
    assert row_norm(rep, "T") == pytest.approx(1.0)


def test_induced_pair_uses_the_operators(pauli_rep):
    _, rep = pauli_rep
    theta, phi = induced_cp_pair(rep)
    assert (theta.n, phi.n) == (2, 2)
    assert np.allclose(theta.ops[1], rep.T[1])
