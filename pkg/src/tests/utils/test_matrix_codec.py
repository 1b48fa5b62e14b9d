import json

import numpy as np
import pytest

from src.common.exception.dilation_exceptions import InvalidInput
from src.utils.matrix_codec import (
    decode_matrix,
    decode_pair_document,
    decode_rep_document,
    encode_matrix,
    encode_rep_document,
)
from src.utils import fixture_catalogue as catalogue


def test_matrix_encoding_is_row_major():
    doc = encode_matrix(np.array([[1.0, 2.0j], [3.0, 4.0]]))
    assert doc == {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 2.0], [3.0, 0.0], [4.0, 0.0]]}
    assert np.allclose(decode_matrix(doc), [[1.0, 2.0j], [3.0, 4.0]])


def test_entry_count_must_match_the_shape():
    with pytest.raises(InvalidInput):
        decode_matrix({"rows": 2, "cols": 2, "data": [[1.0, 0.0]]})


def test_schema_errors_name_the_path():
    with pytest.raises(InvalidInput) as err:
        decode_pair_document({"theta": {"d": 2, "ops": [{"rows": 2, "cols": 2}]}, "phi": {"d": 2, "ops": []}})
    assert err.value.identity == "input_schema"
    assert err.value.context["json_path"].startswith("phi") or err.value.context["json_path"].startswith("theta")


def test_operator_shape_must_match_d():
    doc = {"theta": {"d": 2, "ops": [encode_matrix(np.eye(3))]}, "phi": {"d": 2, "ops": [encode_matrix(np.eye(2))]}}
    with pytest.raises(InvalidInput):
        decode_pair_document(doc)


@pytest.mark.parametrize("name", ["identity_pair", "pauli_pair_p050_q050", "pauli_pair_p025_q050", "ando_scalar_pair", "noncommuting_pair"])
def test_shipped_pair_fixtures_decode(fixtures_dir, name):
    doc = json.loads((fixtures_dir / "pairs" / f"{name}.json").read_text())
    theta, phi = decode_pair_document(doc)
    assert theta.d == phi.d


def test_pauli_fixture_matches_the_catalogue(fixtures_dir):
    doc = json.loads((fixtures_dir / "pairs" / "pauli_pair_p050_q050.json").read_text())
    theta, phi = decode_pair_document(doc)
    expected_theta, expected_phi = catalogue.pauli_pair(0.5, 0.5)
    for got, want in zip(theta.ops + phi.ops, expected_theta.ops + expected_phi.ops):
        assert np.allclose(got, want)


def test_rep_document_survives_encoding(pauli_rep):
    sys, rep = pauli_rep
    decoded_sys, decoded_rep = decode_rep_document(encode_rep_document(sys, rep, "pauli"))
    assert np.allclose(decoded_sys.u, sys.u)
    assert all(np.allclose(a, b) for a, b in zip(decoded_rep.S, rep.S))
