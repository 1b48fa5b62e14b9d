import numpy as np
import pytest

from src.common.exception.dilation_exceptions import InvalidInput
from src.components.dilation_engine.dilation_pipeline import assemble_dilation, minimal_restriction
from src.components.dilation_engine.graded_space import build_graded_space
from src.components.endo_dilation.endomorphisms import (
    CONVENTION_NOTE,
    coinvariance_residual,
    commutation_window_residual as endo_commutation_residual,
    corner_recovery_residual,
    lift_endomorphisms,
    multiplicativity_window_residual,
    verify_endomorphic_dilation,
)
from src.components.cp_maps.kraus_maps import apply_cp
from src.utils import fixture_catalogue as catalogue


@pytest.fixture
def ando_endo(ando, tol):
    """Endomorphisms lifted from the scalar dilation at L = 4."""
    sys, rep = ando
    result = assemble_dilation(rep, build_graded_space(sys, d_H=1, L=4), tol)
    return lift_endomorphisms(result), result, rep


def test_ando_endomorphic_dilation_passes(ando_endo):
    pair, _, _ = ando_endo
    theta, phi = catalogue.ando_scalar_pair()
    report = verify_endomorphic_dilation(pair, theta, phi, samples=10, seed=7)
    assert report.verdict == "pass", report.failed()
    assert report.note == CONVENTION_NOTE
    assert report.depth == 2


def test_pauli_endomorphic_dilation_passes(pauli_rep, tol):
    sys, rep = pauli_rep
    result = assemble_dilation(rep, build_graded_space(sys, d_H=2, L=3), tol)
    pair = lift_endomorphisms(result)
    theta, phi = catalogue.pauli_pair(0.5, 0.5)
    report = verify_endomorphic_dilation(pair, theta, phi, samples=5, seed=3)
    assert report.verdict == "pass", report.failed()
    assert corner_recovery_residual(pair, "alpha", theta) < 1e-10
    assert corner_recovery_residual(pair, "beta", phi) < 1e-10


def test_alpha_compresses_to_theta(ando_endo):
    pair, result, _ = ando_endo
    lifted = np.zeros((result.dim, result.dim), dtype=np.complex128)
    lifted[0, 0] = 1.0
    out = pair.alpha(lifted)
    assert out[0, 0] == pytest.approx(apply_cp(catalogue.scalar_map(0.5), [[1.0]])[0, 0])
    assert pair.beta(lifted)[0, 0] == pytest.approx(1 / 9)


def test_corrupted_isometry_breaks_coinvariance(ando_endo):
    pair, result, _ = ando_endo
    V0 = result.V[0].copy()
    V0[0, 1] += 0.5
    broken = lift_endomorphisms(result.model_copy(update={"V": (V0,)}))
    assert coinvariance_residual(broken, "alpha") > 1e-3
    theta, phi = catalogue.ando_scalar_pair()
    report = verify_endomorphic_dilation(broken, theta, phi, samples=5, seed=1)
    assert report.verdict == "fail"
    assert "coinvariance_alpha" in report.failed()
    assert coinvariance_residual(broken, "beta") < 1e-10


@pytest.mark.parametrize("side", ["alpha", "beta"])
def test_multiplicativity_holds_inside_the_window(ando_endo, side):
    pair, _, _ = ando_endo
    assert multiplicativity_window_residual(pair, side, depth=2, samples=100, seed=11) < 1e-10


def test_pauli_endomorphisms_over_many_samples(pauli_rep, tol):
    sys, rep = pauli_rep
    pair = lift_endomorphisms(assemble_dilation(rep, build_graded_space(sys, d_H=2, L=3), tol))
    assert multiplicativity_window_residual(pair, "alpha", depth=1, samples=100, seed=5) < 1e-9
    assert multiplicativity_window_residual(pair, "beta", depth=1, samples=100, seed=6) < 1e-9
    assert endo_commutation_residual(pair, depth=1, samples=100, seed=7) < 1e-9


def test_minimal_result_cannot_be_lifted(ando_endo, tol):
    _, result, rep = ando_endo
    with pytest.raises(InvalidInput):
        lift_endomorphisms(minimal_restriction(result, rep, tol))


def test_endomorphism_depth_is_bounded(ando_endo):
    pair, _, _ = ando_endo
    theta, phi = catalogue.ando_scalar_pair()
    with pytest.raises(InvalidInput):
        verify_endomorphic_dilation(pair, theta, phi, depth=3)


def test_apply_rejects_wrong_shape(ando_endo):
    pair, _, _ = ando_endo
    with pytest.raises(InvalidInput):
        pair.alpha(np.eye(2))
