import numpy as np
import pytest

from app.errors import DimMismatch, InvalidDim
from app.known_states import MAX_MAGIC_SEED
from app.states import ExactState, normalize
from app.structure import computational_state
from app.wh_group import displacement, factor_dims_for, shift_op, wh_group, wh_orbit


def test_group_sizes():
    assert len(wh_group((2,))) == 4
    assert len(wh_group((2, 2))) == 16
    assert len(wh_group((4,))) == 16
    assert len(wh_group((3,))) == 9


def test_qubit_displacements_are_paulis():
    y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(displacement(2, 1, 1).matrix, y)
    assert [op.label for op in wh_group((2,))] == ["I", "Z", "X", "Y"]


def test_shift_moves_basis_states():
    assert np.allclose(shift_op(3) @ np.array([1, 0, 0]), [0, 1, 0])


def test_invalid_dimension():
    with pytest.raises(InvalidDim):
        wh_group((1,))


def test_expectations_of_computational_state():
    values = np.abs(wh_group((2,)).expectations(normalize([1, 0])))
    assert np.allclose(values, [1, 1, 0, 0])


def test_expectations_dim_mismatch(group22):
    with pytest.raises(DimMismatch):
        group22.expectations(normalize([1, 0]))


def test_exact_support_only_for_divisors_of_four():
    assert wh_group((2, 2)).supports_exact
    assert wh_group((4,)).supports_exact
    assert not wh_group((3,)).supports_exact


def test_orbit_sizes(group22):
    stabilizer_orbit = wh_orbit(computational_state(2), group22)
    magic_orbit = wh_orbit(MAX_MAGIC_SEED, group22)
    assert stabilizer_orbit.size == 4
    assert magic_orbit.size == 16
    assert all(isinstance(s, ExactState) for s in magic_orbit.states)
    assert magic_orbit.generator_trace[0] == ((0, 0), (0, 0))


def test_float_and_exact_orbits_agree(group22):
    exact = wh_orbit(MAX_MAGIC_SEED, group22)
    floating = wh_orbit(MAX_MAGIC_SEED.to_pure(), group22)
    assert exact.size == floating.size
    assert exact.generator_trace == floating.generator_trace


def test_factor_dims_inference():
    assert factor_dims_for(4) == (2, 2)
    assert factor_dims_for(4, [4]) == (4,)
    assert factor_dims_for(6) == (6,)
    with pytest.raises(DimMismatch):
        factor_dims_for(4, [2, 3])


def test_operators_are_unitary_and_trace_orthogonal(group22):
    stack = group22.stack
    for op in stack:
        assert np.allclose(op.conj().T @ op, np.eye(4))
    gram = np.einsum("aji,bji->ab", stack.conj(), stack)
    assert np.allclose(gram, 4 * np.eye(16))
