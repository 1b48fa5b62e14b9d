import numpy as np
import pytest

from src.common.exception.dilation_exceptions import TooLarge
from src.components.cp_maps.flip_construction import strong_commute_kernel_test
from src.components.cp_maps.kraus_maps import KrausFamily, choi_distance
from src.components.cp_maps.tensor_spaces import (
    gram_tensor_space,
    intertwiner_space,
    strong_commute_direct,
)
from src.utils import fixture_catalogue as catalogue


def test_gram_space_is_psd(pauli_pair, tol):
    space = gram_tensor_space(*pauli_pair, order="phi_theta", tol=tol)
    assert space.gram.shape == (32, 32)
    assert len(space.generators) == 32
    assert np.linalg.eigvalsh(space.gram).min() > -1e-10
    assert 0 < space.rank <= 32


def test_direct_test_agrees_with_kernel_test_on_pauli(pauli_pair, tol):
    report = strong_commute_direct(*pauli_pair, tol=tol)
    assert report.verdict
    assert report.isometry_residual < 1e-10
    assert report.complement_dims[0] == report.complement_dims[1]


@pytest.mark.parametrize("name", sorted(catalogue.COMMUTING_PAIRS))
def test_direct_and_kernel_tests_agree_on_the_catalogue(name, tol):
    theta, phi = catalogue.COMMUTING_PAIRS[name]()
    _, _, kernel_verdict = strong_commute_kernel_test(theta, phi, tol)
    direct = strong_commute_direct(theta, phi, tol=tol)
    assert direct.verdict == kernel_verdict
    assert direct.isometry_residual < 1e-9


def test_direct_test_rejects_noncommuting_pair(tol):
    report = strong_commute_direct(*catalogue.noncommuting_pair(), tol=tol)
    assert not report.verdict
    assert report.isometry_residual > 1e-3


def test_gram_space_respects_the_cap(tol):
    big = catalogue.identity_channel(4)
    with pytest.raises(TooLarge):
        gram_tensor_space(big, big, tol=tol)


@pytest.mark.parametrize("family", [catalogue.bit_flip(0.5), catalogue.phase_flip(0.25), catalogue.identity_channel(2)])
def test_intertwiner_space_reproduces_the_map(family, tol):
    space = intertwiner_space(family, tol)
    assert space.dim == family.n
    assert choi_distance(family, space.t_rep) < 1e-9
    for x in space.basis:
        assert np.allclose(x.conj().T @ x, np.eye(2), atol=1e-9)


def test_intertwiner_space_counts_independent_operators(tol):
    repeated = KrausFamily(d=2, ops=[np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)])
    assert intertwiner_space(repeated, tol).dim == 1


def test_intertwiner_space_of_zero_map_is_empty(tol):
    space = intertwiner_space(catalogue.zero_map(2), tol)
    assert space.dim == 0
    assert space.t_rep.n == 0
