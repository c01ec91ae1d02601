from fractions import Fraction

import numpy as np
import pytest

from app.catalog import FILES, MANIFEST_FILE, load_catalog, write_catalog
from app.errors import CatalogMissing
from app.known_states import BELL, CIRCUIT_TARGET, MAGIC_EXAMPLES, MAX_MAGIC_SEED, SIC_FIDUCIAL_1Q
from app.states import ExactState, PureState, as_pure, canonical_key, random_state
from app.structure import computational_state


def test_counts_and_manifest(catalog):
    assert catalog.counts() == {"magic2q": 480, "sic1q": 8, "stabilizer": 60}
    manifest = catalog.manifest
    assert manifest["orbit_counts"] == {"stabilizer": 15, "magic2q": 30, "sic1q": 2, "sic4d": 0}
    assert len(manifest["stab_families"]) == 3
    assert manifest["histograms"]["stabilizer"] == {"0": 9, "1": 6}


def test_every_two_qubit_entry_is_exact(catalog):
    for entry in catalog.by_kind("magic2q"):
        assert isinstance(entry.state, ExactState)
        assert entry.xi2 == Fraction(7, 16)
        assert entry.family_id is not None
    assert {e.xi2 for e in catalog.by_kind("stabilizer")} == {Fraction(1)}


def test_lookup_modulo_phase(catalog):
    rotated = PureState(np.exp(0.3j) * MAX_MAGIC_SEED.to_pure().amplitudes)
    entry = catalog.lookup(rotated)
    assert entry is not None
    assert entry.kind == "magic2q"
    assert entry.state.ray_key == MAX_MAGIC_SEED.ray_key
    assert catalog.lookup(SIC_FIDUCIAL_1Q).kind == "sic1q"


def test_lookup_miss(catalog, rng):
    assert catalog.lookup(random_state(4, rng)) is None
    assert catalog.lookup(random_state(3, rng)) is None


def test_round_trip_through_disk(catalog, catalog_dir):
    for kind in ("stabilizer", "magic2q", "sic1q"):
        assert (catalog_dir / FILES[kind]).exists()
    assert not (catalog_dir / FILES["sic4d"]).exists()

    loaded = load_catalog(catalog_dir)
    assert loaded.counts() == catalog.counts()
    assert loaded.pairings == catalog.pairings
    entry = loaded.lookup(computational_state(2))
    assert entry.kind == "stabilizer"
    assert isinstance(entry.state, ExactState)
    assert entry.concurrence_sq == 0
    assert {e.xi2 for e in loaded.by_kind("magic2q")} == {Fraction(7, 16)}


def test_write_is_idempotent(catalog, tmp_path):
    write_catalog(catalog, tmp_path)
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    write_catalog(catalog, tmp_path)
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == first
    assert MANIFEST_FILE in first


def test_missing_catalog(tmp_path):
    with pytest.raises(CatalogMissing):
        load_catalog(tmp_path / "nada")


def test_lookup_examples(catalog):
    assert catalog.lookup(CIRCUIT_TARGET).kind == "magic2q"
    assert catalog.lookup(BELL).kind == "stabilizer"
    for state in MAGIC_EXAMPLES:
        assert catalog.lookup(state).kind == "magic2q"


def test_canonical_keys_survive_round_trip(catalog, catalog_dir):
    loaded = load_catalog(catalog_dir)
    original = sorted(canonical_key(as_pure(e.state)).quantized for e in catalog.entries)
    reloaded = sorted(canonical_key(as_pure(e.state)).quantized for e in loaded.entries)
    assert original == reloaded


def test_exact_states_keep_inner_products_as_floats(catalog):
    exact = [e.state for e in catalog.entries if isinstance(e.state, ExactState)]
    assert len(exact) == 540
    pairs = np.array([s.gaussian_pairs for s in exact], dtype=np.int64)
    re, im = pairs[..., 0], pairs[..., 1]
    gram_re = re @ re.T + im @ im.T
    gram_im = re @ im.T - im @ re.T
    denominators = np.array([s.denominator for s in exact], dtype=float)
    overlaps = (gram_re.astype(float) ** 2 + gram_im.astype(float) ** 2) / np.outer(denominators, denominators) ** 2

    floats = np.stack([s.to_pure().amplitudes for s in exact])
    assert np.allclose(np.abs(floats.conj() @ floats.T) ** 2, overlaps, atol=1e-12)
