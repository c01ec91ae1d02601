import math

import pytest

from app.clifford import clifford_generators, clifford_orbit
from app.errors import NotABasis, NotClosed, WrongCount
from app.known_states import COMPUTATIONAL_BASIS, MAX_MAGIC_SEED, MUB_ORBIT_BASES, MUB_ORBIT_STATES, SIC_FIDUCIAL_1Q
from app.states import normalize
from app.structure import (
    Basis,
    certify_maximal_abelian,
    certify_mub,
    certify_sic,
    certify_wh_mub_fiducial,
    computational_state,
    enumerate_stabilizers_2q,
    group_into_bases,
    partition_by_wh_orbit,
    split_into_sics,
)
from app.wh_group import wh_group, wh_orbit


def test_basis_validation():
    Basis.from_states(COMPUTATIONAL_BASIS)
    with pytest.raises(NotABasis):
        Basis.from_states([normalize([1, 0]), normalize([1, 1])])
    with pytest.raises(NotABasis):
        Basis.from_states(COMPUTATIONAL_BASIS[:3])


def test_known_bases_complete_five_mubs():
    cert = certify_mub(list(MUB_ORBIT_BASES) + [COMPUTATIONAL_BASIS])
    assert cert.passed
    assert cert.worst_deviation < 1e-12


def test_repeated_basis_is_not_unbiased():
    cert = certify_mub([COMPUTATIONAL_BASIS, COMPUTATIONAL_BASIS])
    assert not cert.passed
    assert cert.reason == "not-unbiased"
    assert cert.worst_deviation == pytest.approx(0.75)


def test_group_into_bases():
    bases = group_into_bases(MUB_ORBIT_STATES, 4)
    assert bases is not None and len(bases) == 4
    assert certify_mub(bases).passed
    assert group_into_bases(MUB_ORBIT_STATES[:6], 4) is None


def test_max_magic_seed_is_mub_fiducial(group22):
    cert = certify_wh_mub_fiducial(MAX_MAGIC_SEED, group22)
    assert cert.passed
    assert cert.orbit_size == 16
    assert len(cert.bases) == 4


def test_stabilizer_state_is_not_mub_fiducial(group22):
    cert = certify_wh_mub_fiducial(computational_state(2), group22)
    assert not cert.passed
    assert cert.reason == "orbit-size"
    assert cert.orbit_size == 4


def test_stabilizers_partition_into_fifteen_bases(group22):
    orbits = partition_by_wh_orbit(enumerate_stabilizers_2q().states, group22)
    assert len(orbits) == 15
    assert {o.size for o in orbits} == {4}
    assert [o.orbit_id for o in orbits] == list(range(15))
    for orbit in orbits:
        Basis.from_states(orbit.states)


def test_partition_requires_closed_input(group22):
    orbit = wh_orbit(MAX_MAGIC_SEED, group22)
    with pytest.raises(NotClosed):
        partition_by_wh_orbit(orbit.states[:5], group22)


def test_one_qubit_fiducials_split_into_two_sics():
    orbit = clifford_orbit(SIC_FIDUCIAL_1Q, clifford_generators(1))
    sics = split_into_sics(orbit.states, wh_group((2,)))
    assert len(sics) == 2
    assert all(s.certificate.passed and len(s.states) == 4 for s in sics)


def test_sic_count_and_equiangularity():
    with pytest.raises(WrongCount):
        certify_sic(COMPUTATIONAL_BASIS[:3])
    tetra = wh_orbit(SIC_FIDUCIAL_1Q, wh_group((2,))).states
    assert certify_sic(tetra).passed
    eigen = [normalize([1, 0]), normalize([0, 1]), normalize([1, 1]), normalize([1, 1j])]
    cert = certify_sic(eigen)
    assert not cert.passed
    assert cert.reason == "not-equiangular"
    assert cert.worst_deviation == pytest.approx(1 / 3)


def test_computational_basis_stabilized_by_z_subgroup(group22):
    cert = certify_maximal_abelian(COMPUTATIONAL_BASIS, group22)
    assert cert.passed
    assert set(cert.operators) == {
        ((0, 0), (0, 0)), ((0, 0), (0, 1)), ((0, 1), (0, 0)), ((0, 1), (0, 1)),
    }


def test_pairing_and_stabilizer_families(artifacts):
    pairing = artifacts.pairing
    assert len(pairing.pairings) == 30
    assert set(pairing.multiplicity.values()) == {2}
    assert all(len(f.bases) == 5 and f.certificate.passed for f in pairing.families)

    families = artifacts.stab_families
    assert len(families.families) == 3
    assert families.n_valid_partitions >= 1
    members = sorted(k for f in families.families for k in f.members)
    assert members == list(range(15))


def test_magic_orbits(artifacts):
    assert len(artifacts.magic_orbits) == 30
    assert {o.size for o in artifacts.magic_orbits} == {16}
    assert artifacts.fiducial_worst < 1e-10
    assert math.isfinite(artifacts.fiducial_worst)


def test_every_stabilizer_basis_is_maximal_abelian(artifacts, group22):
    assert len(artifacts.stab_orbits) == 15
    for orbit in artifacts.stab_orbits:
        cert = certify_maximal_abelian(orbit.states, group22)
        assert cert.passed
        assert len(cert.operators) == 4
