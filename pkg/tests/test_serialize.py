import json
from fractions import Fraction as F

import numpy as np
import pytest

from addinfo.exceptions import SchemaError
from addinfo.families import grouped_state
from addinfo.functionals import Renyi, Shannon, Zero
from addinfo.serialize import (
    dumps,
    format_number,
    matrix_from_json,
    matrix_to_json,
    parse_mu,
    parse_partition,
    parse_state,
    parse_sym,
    structure_from_json,
    structure_to_json,
)
from addinfo.structure import uniform_structure


def test_format_number():
    assert format_number(1 / 3) == 0.333333333333
    assert format_number(-0.0) == 0.0
    assert dumps({"b": F(1, 3), "a": np.float64(2.0)}) == '{\n  "a": 2.0,\n  "b": "1/3"\n}\n'


def test_matrix_round_trip():
    m = np.array([[0.5, 0.1 - 0.2j], [0.1 + 0.2j, 0.5]])
    assert np.allclose(matrix_from_json(matrix_to_json(m, exact=True)), m, atol=0)
    assert np.allclose(matrix_from_json([[1, 0], [0, "1/2"]]), np.diag([1, 0.5]))
    with pytest.raises(SchemaError):
        matrix_from_json([[1, 0], [0]])
    with pytest.raises(SchemaError):
        matrix_from_json([[[1, 2, 3]]])


def test_parse_state_forms(tmp_path):
    assert parse_state("diag:1/2,1/2").weights == (F(1, 2), F(1, 2))
    assert parse_state('{"diag": ["1/4", "3/4"]}').weights == (F(1, 4), F(3, 4))
    path = tmp_path / "rho.json"
    path.write_text(json.dumps([[0.5, 0], [0, 0.5]]))
    assert np.allclose(parse_state(str(path)).matrix, np.eye(2) / 2)
    with pytest.raises(SchemaError):
        parse_state("{not json")
    with pytest.raises(SchemaError):
        parse_state('{"weights": [1]}')


def test_parse_mu_and_partition():
    assert parse_mu(None, 2) is None and parse_mu("zero", 2) is None
    assert np.allclose(parse_mu("diag:1/4,-1/4", 2).matrix, np.diag([0.25, -0.25]))
    with pytest.raises(SchemaError):
        parse_mu("diag:1", 2)
    assert len(parse_partition("coords", 3)) == 3
    assert len(parse_partition("identity", 3)) == 1
    assert len(parse_partition('{"coords": [[0, 2], [1]]}', 3)) == 2
    with pytest.raises(SchemaError):
        parse_partition('{"coords": [[0, 5]]}', 3)


def test_parse_sym():
    assert isinstance(parse_sym("shannon"), Shannon)
    assert isinstance(parse_sym("zero"), Zero)
    assert parse_sym("renyi:1/2").alpha == 0.5
    assert parse_sym("renyi", 3).alpha == 3.0
    assert isinstance(parse_sym('{"kind": "renyi", "alpha": 2}'), Renyi)
    with pytest.raises(SchemaError):
        parse_sym("renyi")


def test_structure_round_trip():
    B = uniform_structure(grouped_state(8, 2, seed=1), 2, seed=2)
    data = json.loads(json.dumps(structure_to_json(B)))
    assert structure_from_json(data) == B
    with pytest.raises(SchemaError):
        structure_from_json({"cells": []})
