import math
from fractions import Fraction

import pytest

from app.entanglement import concurrence, histogram_key, orbit_concurrence_profile
from app.errors import DimMismatch, NonConstantOrbit
from app.known_states import BELL, MAGIC_EXAMPLES, MUB_ORBIT_STATES
from app.states import OrbitFamily, normalize
from app.structure import computational_state


def test_concurrence_extremes():
    assert concurrence(BELL).value == pytest.approx(1.0, abs=1e-15)
    product = concurrence(computational_state(2))
    assert product.value == 0.0
    assert product.value_squared == 0


def test_exact_concurrence_of_magic_examples():
    for state in MAGIC_EXAMPLES:
        value = concurrence(state)
        assert value.value_squared == Fraction(1, 4)
        assert value.value == pytest.approx(0.5, abs=1e-15)


def test_mub_orbit_states_have_concurrence_one_over_root_two():
    assert {concurrence(s).value_squared for s in MUB_ORBIT_STATES} == {Fraction(1, 2)}


def test_concurrence_requires_two_qubits():
    with pytest.raises(DimMismatch):
        concurrence(normalize([1, 0]))


def test_histogram_key():
    assert histogram_key(1 / math.sqrt(2)) == "0.7071067812"
    assert histogram_key(1.0) == "1"
    assert histogram_key(0.0) == "0"


def test_profile_rejects_non_constant_orbit():
    mixed = OrbitFamily((computational_state(2), BELL), orbit_id=0)
    with pytest.raises(NonConstantOrbit):
        orbit_concurrence_profile([mixed])


def test_orbit_profiles(artifacts):
    assert artifacts.stab_profile.histogram == {"0": 9, "1": 6}
    magic = artifacts.magic_profile
    assert magic.histogram == {histogram_key(0.5): 12, histogram_key(1 / math.sqrt(2)): 18}
    assert magic.exact == {histogram_key(0.5): "1/4", histogram_key(1 / math.sqrt(2)): "1/2"}
    assert max(o.spread for o in magic.per_orbit) == 0.0


def test_pairing_rule(artifacts):
    for magic_id, stab_id in artifacts.pairing.pairings:
        entangled = artifacts.stab_profile.value_of(stab_id) > 0.5
        expected = 0.5 if entangled else 1 / math.sqrt(2)
        assert artifacts.magic_profile.value_of(magic_id) == pytest.approx(expected, abs=1e-12)
