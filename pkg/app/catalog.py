"""
Propósito: Generación, persistencia (JSON-lines) y consulta del catálogo de estados:
60 estabilizadores, 480 estados de magia máxima de dos qubits, 8 fiduciales SIC de
un qubit y, opcionalmente, los minimizadores del qudit d = 4.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import orjson

from app.clifford import clifford_generators, clifford_orbit
from app.config import CATALOG_DIR, CATALOG_VERSION, DEFAULT_SEED
from app.entanglement import ConcurrenceProfile, concurrence, orbit_concurrence_profile
from app.errors import CatalogMissing, CertificationFailure
from app.known_states import MAX_MAGIC_SEED, SIC_FIDUCIAL_1Q
from app.magic import exact_xi, xi
from app.optimize import collect_minimizers, multistart_minimize
from app.schemas import CatalogRecord, PairingRecord, StateFile, dumps, fraction_text, parse_fraction
from app.states import EQUALITY_TOL, ExactState, OrbitFamily, StateIndex, as_pure
from app.structure import (
    PairingTable,
    SicSet,
    StabilizerFamilies,
    assemble_five_mub_families,
    certify_wh_mub_fiducial,
    enumerate_stabilizers_2q,
    group_stabilizer_bases_into_families,
    partition_by_wh_orbit,
    split_into_sics,
)
from app.wh_group import wh_group

logger = logging.getLogger(__name__)

FILES = {
    "stabilizer": "stabilizers.jsonl",
    "magic2q": "magic2q.jsonl",
    "sic1q": "sic1q.jsonl",
    "sic4d": "sic4d.jsonl",
}
PAIRINGS_FILE = "pairings.json"
MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    kind: str
    orbit_id: int
    state: object
    xi2: Union[Fraction, float]
    family_id: Optional[int] = None
    concurrence: Optional[float] = None
    concurrence_sq: Optional[Fraction] = None

    def to_record(self) -> CatalogRecord:
        return CatalogRecord(
            kind=self.kind,
            orbit_id=self.orbit_id,
            family_id=self.family_id,
            state=StateFile.from_state(self.state),
            concurrence=self.concurrence,
            concurrence_sq=fraction_text(self.concurrence_sq),
            xi2=fraction_text(self.xi2) if isinstance(self.xi2, Fraction) else repr(float(self.xi2)),
        )

    @classmethod
    def from_record(cls, record: CatalogRecord) -> "CatalogEntry":
        state = record.state.to_state()
        xi2 = parse_fraction(record.xi2) if isinstance(state, ExactState) else float(record.xi2)
        return cls(
            kind=record.kind,
            orbit_id=record.orbit_id,
            state=state,
            xi2=xi2,
            family_id=record.family_id,
            concurrence=record.concurrence,
            concurrence_sq=parse_fraction(record.concurrence_sq),
        )


@dataclass
class Catalog:
    entries: List[CatalogEntry]
    pairings: List[Tuple[int, int]] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)
    _indexes: Dict[int, Tuple[StateIndex, List[int]]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for position, entry in enumerate(self.entries):
            dim = entry.state.dim
            if dim not in self._indexes:
                self._indexes[dim] = (StateIndex(), [])
            index, slots = self._indexes[dim]
            _, is_new = index.add(entry.state)
            if is_new:
                slots.append(position)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, state, tol: float = EQUALITY_TOL) -> Optional[CatalogEntry]:
        """Búsqueda por clave canónica y, si falla, por vecino más cercano dentro de tol."""
        psi = as_pure(state)
        if psi.dim not in self._indexes:
            return None
        index, slots = self._indexes[psi.dim]
        found = index.find(psi, tol)
        return None if found is None else self.entries[slots[found]]

    def by_kind(self, kind: str) -> List[CatalogEntry]:
        return [e for e in self.entries if e.kind == kind]

    def counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = defaultdict(int)
        for e in self.entries:
            counts[e.kind] += 1
        return dict(sorted(counts.items()))

    def orbits(self, kind: str) -> List[OrbitFamily]:
        grouped: Dict[int, list] = defaultdict(list)
        for e in self.by_kind(kind):
            grouped[e.orbit_id].append(e.state)
        return [
            OrbitFamily(tuple(states), seed=states[0], generators=("WH",), orbit_id=orbit_id)
            for orbit_id, states in sorted(grouped.items())
        ]


@dataclass(frozen=True, eq=False)
class CatalogArtifacts:
    """Resultados intermedios de la construcción (los reutiliza el arnés de verificación)."""

    seed: int
    stabilizers: OrbitFamily
    stab_orbits: List[OrbitFamily]
    magic: OrbitFamily
    magic_orbits: List[OrbitFamily]
    fiducial_worst: float
    pairing: PairingTable
    stab_families: StabilizerFamilies
    stab_profile: ConcurrenceProfile
    magic_profile: ConcurrenceProfile
    sic1q: List[SicSet]
    sic4d: List[SicSet] = field(default_factory=list)


def build_artifacts(seed: int = DEFAULT_SEED, include_qudit: bool = False, qudit_starts: int = 20000, workers: int = 1) -> CatalogArtifacts:
    group = wh_group((2, 2))

    stabilizers = enumerate_stabilizers_2q()
    logger.info("Estabilizadores: %d estados", stabilizers.size)
    for s in stabilizers.states:
        if exact_xi(2, s, group) != 1:
            raise CertificationFailure("Un estado estabilizador tiene magia no nula.")
    stab_orbits = partition_by_wh_orbit(stabilizers.states, group)

    magic = clifford_orbit(MAX_MAGIC_SEED, clifford_generators(2))
    logger.info("Órbita de Clifford de magia máxima: %d estados", magic.size)
    magic_orbits = partition_by_wh_orbit(magic.states, group)
    worst = 0.0
    for s in magic.states:
        cert = certify_wh_mub_fiducial(s, group)
        if not cert.passed:
            raise CertificationFailure(f"Fiducial WH-MUB rechazado ({cert.reason}).")
        worst = max(worst, cert.worst_deviation)

    pairing = assemble_five_mub_families(stab_orbits, magic_orbits)
    stab_families = group_stabilizer_bases_into_families(stab_orbits)
    stab_profile = orbit_concurrence_profile(stab_orbits)
    magic_profile = orbit_concurrence_profile(magic_orbits)

    sic_orbit = clifford_orbit(SIC_FIDUCIAL_1Q, clifford_generators(1))
    sic1q = split_into_sics(sic_orbit.states, wh_group((2,)))
    if not all(s.certificate.passed for s in sic1q):
        raise CertificationFailure("Los fiduciales de un qubit no forman SICs.")

    sic4d: List[SicSet] = []
    if include_qudit:
        records = multistart_minimize("qudit", qudit_starts, seed, workers=workers)
        found = collect_minimizers(records, 2 / 5)
        sic4d = split_into_sics(found.states, wh_group((4,)), match_tol=1e-7)
        if not all(s.certificate.passed for s in sic4d):
            raise CertificationFailure("Los minimizadores del qudit no forman SICs.")

    return CatalogArtifacts(
        seed, stabilizers, stab_orbits, magic, magic_orbits, worst, pairing,
        stab_families, stab_profile, magic_profile, sic1q, sic4d,
    )


def _two_qubit_entries(kind: str, orbits: List[OrbitFamily], family_of: Dict[int, int]) -> List[CatalogEntry]:
    group = wh_group((2, 2))
    entries = []
    for orbit in orbits:
        for s in orbit.states:
            c = concurrence(s)
            entries.append(CatalogEntry(
                kind=kind,
                orbit_id=orbit.orbit_id,
                state=s,
                xi2=exact_xi(2, s, group),
                family_id=family_of.get(orbit.orbit_id),
                concurrence=c.value,
                concurrence_sq=c.value_squared,
            ))
    return entries


def _sic_entries(kind: str, sets: List[SicSet], factor_dims: Tuple[int, ...]) -> List[CatalogEntry]:
    group = wh_group(factor_dims)
    return [
        CatalogEntry(kind=kind, orbit_id=k, state=s, xi2=xi(2, s, group))
        for k, sic in enumerate(sets)
        for s in sic.states
    ]


def catalog_from_artifacts(art: CatalogArtifacts) -> Catalog:
    family_of_stab = {
        stab_id: k for k, family in enumerate(art.stab_families.families) for stab_id in family.members
    }
    entries = (
        _two_qubit_entries("stabilizer", art.stab_orbits, family_of_stab)
        + _two_qubit_entries("magic2q", art.magic_orbits, dict(art.pairing.pairings))
        + _sic_entries("sic1q", art.sic1q, (2,))
        + _sic_entries("sic4d", art.sic4d, (4,))
    )
    manifest = {
        "version": CATALOG_VERSION,
        "seed": art.seed,
        "orbit_counts": {
            "stabilizer": len(art.stab_orbits),
            "magic2q": len(art.magic_orbits),
            "sic1q": len(art.sic1q),
            "sic4d": len(art.sic4d),
        },
        "stab_families": [list(f.members) for f in art.stab_families.families],
        "n_valid_partitions": art.stab_families.n_valid_partitions,
        "histograms": {
            "stabilizer": art.stab_profile.histogram,
            "magic2q": art.magic_profile.histogram,
        },
    }
    catalog = Catalog(entries, list(art.pairing.pairings), manifest)
    catalog.manifest["counts"] = catalog.counts()
    return catalog


def write_catalog(catalog: Catalog, out_dir: Union[str, Path]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind, filename in FILES.items():
        entries = catalog.by_kind(kind)
        path = out / filename
        if not entries:
            path.unlink(missing_ok=True)
            continue
        lines = [dumps(e.to_record().model_dump(exclude_none=True), indent=False) for e in entries]
        path.write_bytes(b"\n".join(lines) + b"\n")
    pairings = [PairingRecord(magic_orbit=m, stab_orbit=s).model_dump() for m, s in catalog.pairings]
    (out / PAIRINGS_FILE).write_bytes(dumps({"pairings": pairings}))
    (out / MANIFEST_FILE).write_bytes(dumps(catalog.manifest))
    logger.info("Catálogo escrito en %s (%s)", out, catalog.manifest.get("counts"))
    return out


def build_catalog(
    seed: int = DEFAULT_SEED,
    out_dir: Optional[Union[str, Path]] = None,
    include_qudit: bool = False,
    qudit_starts: int = 20000,
    workers: int = 1,
) -> Catalog:
    """Regenera el catálogo; si out_dir no es None también lo escribe (idempotente)."""
    catalog = catalog_from_artifacts(build_artifacts(seed, include_qudit, qudit_starts, workers))
    if out_dir is not None:
        write_catalog(catalog, out_dir)
    return catalog


def load_catalog(directory: Union[str, Path] = CATALOG_DIR) -> Catalog:
    base = Path(directory)
    manifest_path = base / MANIFEST_FILE
    if not manifest_path.exists():
        raise CatalogMissing(f"No hay catálogo en '{base}'. Ejecuta 'magiclab catalog build'.")
    manifest = orjson.loads(manifest_path.read_bytes())
    entries: List[CatalogEntry] = []
    for filename in FILES.values():
        path = base / filename
        if not path.exists():
            continue
        for line in path.read_bytes().splitlines():
            if line.strip():
                entries.append(CatalogEntry.from_record(CatalogRecord.model_validate(orjson.loads(line))))
    pairings: List[Tuple[int, int]] = []
    if (base / PAIRINGS_FILE).exists():
        raw = orjson.loads((base / PAIRINGS_FILE).read_bytes())
        pairings = [(p["magic_orbit"], p["stab_orbit"]) for p in raw.get("pairings", [])]
    return Catalog(entries, pairings, manifest)
