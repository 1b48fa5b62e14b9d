import numpy as np
import pytest

from src.common.exception.dilation_exceptions import NotCommuting
from src.components.endo_dilation.roundtrip import roundtrip_metric_spaces
from src.utils import fixture_catalogue as catalogue


def test_pauli_roundtrip_recovers_the_flip(pauli_rep, tol):
    sys, rep = pauli_rep
    report = roundtrip_metric_spaces(sys, rep, tol)
    assert report.status == "ok"
    assert report.verdict == "pass"
    assert report.index_equal
    assert report.intertwiner_dims == (2, 2)
    assert report.flip_distance < 1e-8
    assert report.original_relation_residual < 1e-12
    assert report.w_E_unitarity < 1e-8 and report.w_F_unitarity < 1e-8
    assert report.w_fit_residual < 1e-8


def test_ando_roundtrip(ando, tol):
    sys, rep = ando
    report = roundtrip_metric_spaces(sys, rep, tol)
    assert report.verdict == "pass"
    assert np.allclose(report.rebuilt_u, [[1.0]])


def test_degenerate_rep_reports_an_index_drop(tol):
    sys, rep = catalogue.degenerate_rep()
    report = roundtrip_metric_spaces(sys, rep, tol)
    assert report.status == "index_drop"
    assert report.kraus_counts == (2, 2)
    assert report.reduced_counts == (2, 1)
    assert report.intertwiner_dims == (2, 1)
    assert report.rebuilt_u.shape == (2, 2)
    assert report.verdict == "pass"
    assert report.flip_distance is None


def test_noncommuting_rep_has_no_flip(tol):
    sys, rep = catalogue.noncommuting_rep()
    with pytest.raises(NotCommuting):
        roundtrip_metric_spaces(sys, rep, tol)
