import pytest

from src.common.exception.dilation_exceptions import InvalidInput, TooLarge
from src.components.dilation_engine.graded_space import build_graded_space


def test_scalar_space_levels(ando):
    sys, _ = ando
    space = build_graded_space(sys, d_H=1, L=2)
    assert space.dim == 9
    assert [space.level_dim(k) for k in range(3)] == [1, 3, 5]
    assert space.grades[4:] == ((0, 2), (1, 2), (2, 0), (2, 1), (2, 2))
    assert space.window_end(0) == 1
    assert space.window_end(1) == 4
    assert space.window_end(7) == 9
    assert space.window_end(-1) == 0


def test_padding_multiplies_every_level_above_zero(ando):
    sys, _ = ando
    space = build_graded_space(sys, d_H=1, L=2, mu=1)
    assert [space.level_dim(k) for k in range(3)] == [1, 6, 10]
    assert space.fibre_dim(0) == 1 and space.fibre_dim(2) == 2


def test_pauli_blocks(pauli_rep):
    sys, rep = pauli_rep
    space = build_graded_space(sys, d_H=rep.h, L=2)
    assert space.block_dim(1, 1) == 8
    assert space.block_dim(2, 1) == 16
    assert space.dim == 98
    labels = space.labels()
    assert len(labels) == space.dim
    first = labels[space.block_slice(1, 2).start]
    assert (first.a, first.b, first.e_word, first.f_word) == (1, 2, (0,), (0, 0))


def test_graded_space_cap(pauli_rep):
    sys, rep = pauli_rep
    with pytest.raises(TooLarge):
        build_graded_space(sys, d_H=rep.h, L=6)


@pytest.mark.parametrize("kwargs", [{"L": -1}, {"L": 2, "mu": -1}])
def test_graded_space_rejects_bad_parameters(ando, kwargs):
    sys, _ = ando
    with pytest.raises(InvalidInput):
        build_graded_space(sys, d_H=1, **kwargs)
