"""
Propósito: Estados estabilizadores, certificación de SICs y MUBs, fiduciales
WH-MUB, partición en órbitas de WH y armado de familias de 5 MUBs.

Las certificaciones no levantan excepciones ante un veredicto negativo:
devuelven un Certificate con la peor desviación y un código de motivo.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.clifford import clifford_generators, clifford_orbit
from app.errors import (
    AssociationFailure,
    DimMismatch,
    NoValidPartition,
    NotABasis,
    NotClosed,
    WrongCount,
)
from app.states import ExactState, OrbitFamily, StateIndex, as_pure, canonical_key
from app.wh_group import WHGroup, wh_orbit

logger = logging.getLogger(__name__)

BASIS_TOL = 1e-10
MUB_TOL = 1e-10
SIC_TOL = 1e-9
ORTHOGONAL_TOL = 1e-8


@dataclass(frozen=True)
class Certificate:
    passed: bool
    worst_deviation: float
    reason: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Basis:
    states: Tuple
    deviation: float = 0.0

    @property
    def dim(self) -> int:
        return as_pure(self.states[0]).dim

    def matrix(self) -> np.ndarray:
        """Estados como columnas."""
        return np.column_stack([as_pure(s).amplitudes for s in self.states])

    @classmethod
    def from_states(cls, states: Sequence, tol: float = BASIS_TOL) -> "Basis":
        states = tuple(states)
        if not states:
            raise NotABasis("Base vacía.")
        dim = as_pure(states[0]).dim
        if len(states) != dim:
            raise NotABasis(f"Se esperaban {dim} estados, hay {len(states)}.")
        cols = np.column_stack([as_pure(s).amplitudes for s in states])
        deviation = float(np.max(np.abs(np.abs(cols.conj().T @ cols) - np.eye(dim))))
        if deviation > tol:
            raise NotABasis(f"No es ortonormal (desviación {deviation:.3e}).")
        return cls(states, deviation)


@dataclass(frozen=True, eq=False)
class MubFamily:
    bases: Tuple[Basis, ...]
    kind: str
    certificate: Certificate
    members: Tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class SicSet:
    states: Tuple
    certificate: Certificate


@dataclass(frozen=True, eq=False)
class FiducialCertificate(Certificate):
    bases: Tuple[Basis, ...] = ()
    orbit_size: int = 0


@dataclass(frozen=True)
class PairingTable:
    pairings: Tuple[Tuple[int, int], ...]
    multiplicity: Dict[int, int]
    families: Tuple[MubFamily, ...] = field(default=(), compare=False)

    def stab_for(self, magic_orbit: int) -> int:
        return dict(self.pairings)[magic_orbit]


@dataclass(frozen=True)
class StabilizerFamilies:
    families: Tuple[MubFamily, ...]
    n_valid_partitions: int


# -----------------------------------------------------------------------------
# Estados estabilizadores
# -----------------------------------------------------------------------------
def computational_state(n_qubits: int, index: int = 0) -> ExactState:
    dim = 2 ** n_qubits
    pairs = [(1, 0) if k == index else (0, 0) for k in range(dim)]
    return ExactState.from_pairs(pairs, 1)


def enumerate_stabilizers(n_qubits: int) -> OrbitFamily:
    """Órbita de Clifford exacta de |0...0>."""
    return clifford_orbit(computational_state(n_qubits), clifford_generators(n_qubits))


def enumerate_stabilizers_2q() -> OrbitFamily:
    return enumerate_stabilizers(2)


# -----------------------------------------------------------------------------
# Partición en órbitas de WH
# -----------------------------------------------------------------------------
def _sort_key(state) -> Tuple:
    return canonical_key(as_pure(state)).quantized


def partition_by_wh_orbit(states: Sequence, group: WHGroup, tol: Optional[float] = None) -> List[OrbitFamily]:
    """
    Órbitas disjuntas de WH que cubren la entrada, ordenadas por la menor clave
    canónica de sus miembros; orbit_id es la posición en ese orden.
    """
    states = list(states)
    exact = group.supports_exact and all(isinstance(s, ExactState) for s in states)
    if exact:
        by_ray = {s.ray_key: i for i, s in enumerate(states)}
        locate = lambda image: by_ray.get(image.ray_key)  # noqa: E731
    else:
        index = StateIndex() if tol is None else StateIndex(tol=tol)
        for s in states:
            index.add(s)
        locate = index.find

    assigned = [False] * len(states)
    groups: List[List[int]] = []
    for i, state in enumerate(states):
        if assigned[i]:
            continue
        members: List[int] = []
        for image in wh_orbit(state if exact else as_pure(state), group).states:
            j = locate(image)
            if j is None:
                raise NotClosed(f"La órbita del estado {i} sale del conjunto de entrada.")
            if not assigned[j]:
                assigned[j] = True
                members.append(j)
        groups.append(members)

    groups.sort(key=lambda members: min(_sort_key(states[j]) for j in members))
    return [
        OrbitFamily(tuple(states[j] for j in members), seed=states[members[0]], generators=("WH",), orbit_id=k)
        for k, members in enumerate(groups)
    ]


# -----------------------------------------------------------------------------
# MUBs y SICs
# -----------------------------------------------------------------------------
def _as_basis(item) -> Basis:
    if isinstance(item, Basis):
        return item
    if isinstance(item, OrbitFamily):
        return Basis.from_states(item.states)
    return Basis.from_states(item)


def certify_mub(bases: Sequence, tol: float = MUB_TOL) -> Certificate:
    """max |<psi|chi>|^2 - 1/D| sobre pares de estados de bases distintas."""
    bases = [_as_basis(b) for b in bases]
    if not bases:
        return Certificate(True, 0.0)
    dim = bases[0].dim
    if any(b.dim != dim for b in bases):
        raise DimMismatch("Las bases tienen dimensiones distintas.")
    mats = [b.matrix() for b in bases]
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            overlaps = np.abs(mats[i].conj().T @ mats[j]) ** 2
            worst = max(worst, float(np.max(np.abs(overlaps - 1.0 / dim))))
    passed = worst <= tol
    return Certificate(passed, worst, None if passed else "not-unbiased")


def group_into_bases(states: Sequence, dim: int, tol: float = ORTHOGONAL_TOL) -> Optional[List[Basis]]:
    """
    Agrupa estados en bases ortonormales: las componentes conexas del grafo de
    ortogonalidad deben ser cliques de tamaño dim. None si no se puede.
    """
    pure = [as_pure(s) for s in states]
    if len(pure) % dim:
        return None
    cols = np.column_stack([p.amplitudes for p in pure])
    overlaps = np.abs(cols.conj().T @ cols)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(pure)))
    rows, cols_idx = np.nonzero(np.triu(overlaps <= tol, k=1))
    graph.add_edges_from(zip(rows.tolist(), cols_idx.tolist()))

    bases = []
    for component in sorted(nx.connected_components(graph), key=min):
        nodes = sorted(component)
        if len(nodes) != dim or graph.subgraph(nodes).number_of_edges() != dim * (dim - 1) // 2:
            return None
        try:
            bases.append(Basis.from_states([states[k] for k in nodes]))
        except NotABasis:
            return None
    return bases


def certify_wh_mub_fiducial(psi, group: WHGroup, tol: float = MUB_TOL) -> FiducialCertificate:
    """La órbita de WH tiene D^2 estados que se parten en D MUBs."""
    dim = group.dim
    orbit = wh_orbit(psi, group)
    if orbit.size != dim * dim:
        return FiducialCertificate(False, float("inf"), "orbit-size", orbit_size=orbit.size)
    bases = group_into_bases(orbit.states, dim)
    if bases is None:
        return FiducialCertificate(False, float("inf"), "grouping", orbit_size=orbit.size)
    cert = certify_mub(bases, tol)
    return FiducialCertificate(cert.passed, cert.worst_deviation, cert.reason, tuple(bases), orbit.size)


def certify_sic(states: Sequence, tol: float = SIC_TOL) -> Certificate:
    """|<psi_i|psi_j>|^2 = 1/(D+1) para i != j."""
    pure = [as_pure(s) for s in states]
    if not pure:
        raise WrongCount("No hay estados.")
    dim = pure[0].dim
    if len(pure) != dim * dim:
        raise WrongCount(f"Un SIC en dimensión {dim} tiene {dim * dim} estados, hay {len(pure)}.")
    if any(p.dim != dim for p in pure):
        raise DimMismatch("Estados de dimensiones distintas.")
    cols = np.column_stack([p.amplitudes for p in pure])
    overlaps = np.abs(cols.conj().T @ cols) ** 2
    off = ~np.eye(len(pure), dtype=bool)
    worst = float(np.max(np.abs(overlaps[off] - 1.0 / (dim + 1))))
    passed = worst <= tol
    return Certificate(passed, worst, None if passed else "not-equiangular")


def split_into_sics(
    states: Sequence, group: WHGroup, tol: float = SIC_TOL, match_tol: Optional[float] = None
) -> List[SicSet]:
    """Parte un conjunto en órbitas de WH y certifica cada una como SIC."""
    orbits = partition_by_wh_orbit(states, group, match_tol)
    return [SicSet(orbit.states, certify_sic(orbit.states, tol)) for orbit in orbits]


# -----------------------------------------------------------------------------
# Familias de 5 MUBs
# -----------------------------------------------------------------------------
def _orbit_id(orbit: OrbitFamily, position: int) -> int:
    return position if orbit.orbit_id is None else orbit.orbit_id


def assemble_five_mub_families(
    stab_orbits: Sequence[OrbitFamily],
    magic_orbits: Sequence[OrbitFamily],
    expected_multiplicity: int = 2,
    tol: float = MUB_TOL,
) -> PairingTable:
    """
    Cada órbita mágica (D MUBs) se completa con exactamente una base
    estabilizadora; cada base estabilizadora debe usarse expected_multiplicity veces.
    """
    stab_bases = [(_orbit_id(o, k), _as_basis(o)) for k, o in enumerate(stab_orbits)]
    pairings, families = [], []
    for k, orbit in enumerate(magic_orbits):
        magic_id = _orbit_id(orbit, k)
        dim = as_pure(orbit.states[0]).dim
        bases = group_into_bases(orbit.states, dim)
        if bases is None:
            raise AssociationFailure(f"La órbita mágica {magic_id} no se agrupa en bases.")
        compatible = []
        for stab_id, basis in stab_bases:
            cert = certify_mub(bases + [basis], tol)
            if cert.passed:
                compatible.append((stab_id, basis, cert))
        if len(compatible) != 1:
            raise AssociationFailure(
                f"La órbita mágica {magic_id} es compatible con {len(compatible)} bases estabilizadoras."
            )
        stab_id, basis, cert = compatible[0]
        pairings.append((magic_id, stab_id))
        families.append(MubFamily(tuple(bases) + (basis,), "mixed-five", cert, (magic_id, stab_id)))

    multiplicity = Counter(stab_id for _, stab_id in pairings)
    wrong = {sid: multiplicity.get(sid, 0) for sid, _ in stab_bases if multiplicity.get(sid, 0) != expected_multiplicity}
    if wrong:
        raise AssociationFailure(f"Multiplicidades inesperadas: {wrong}.")
    logger.info("Emparejamiento: %d familias de 5 MUBs", len(families))
    return PairingTable(tuple(pairings), dict(sorted(multiplicity.items())), tuple(families))


def _exact_covers(n: int, cliques: List[Tuple[int, ...]]) -> List[List[Tuple[int, ...]]]:
    by_node: Dict[int, List[Tuple[int, ...]]] = {k: [] for k in range(n)}
    for clique in cliques:
        for node in clique:
            by_node[node].append(clique)

    solutions: List[List[Tuple[int, ...]]] = []

    def search(covered: frozenset, chosen: List[Tuple[int, ...]]) -> None:
        if len(covered) == n:
            solutions.append(list(chosen))
            return
        first = min(k for k in range(n) if k not in covered)
        for clique in by_node[first]:
            if covered.isdisjoint(clique):
                chosen.append(clique)
                search(covered | frozenset(clique), chosen)
                chosen.pop()

    search(frozenset(), [])
    return solutions


def group_stabilizer_bases_into_families(stab_orbits: Sequence[OrbitFamily], tol: float = MUB_TOL) -> StabilizerFamilies:
    """
    Búsqueda exhaustiva de particiones de las bases estabilizadoras en
    conjuntos completos de D+1 MUBs. Devuelve la primera partición y la cantidad total.
    """
    bases = [_as_basis(o) for o in stab_orbits]
    if not bases:
        raise NoValidPartition("No hay bases.")
    size = bases[0].dim + 1
    if len(bases) % size:
        raise NoValidPartition(f"{len(bases)} bases no se dividen en grupos de {size}.")

    graph = nx.Graph()
    graph.add_nodes_from(range(len(bases)))
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            if certify_mub([bases[i], bases[j]], tol).passed:
                graph.add_edge(i, j)
    cliques = sorted(tuple(sorted(c)) for c in nx.enumerate_all_cliques(graph) if len(c) == size)
    solutions = _exact_covers(len(bases), cliques)
    if not solutions:
        raise NoValidPartition("Ninguna partición en conjuntos completos de MUBs.")

    families = []
    for members in solutions[0]:
        chosen = [bases[k] for k in members]
        families.append(MubFamily(tuple(chosen), "stabilizer", certify_mub(chosen, tol), members))
    logger.info("Bases estabilizadoras: %d cliques de %d, %d particiones válidas", len(cliques), size, len(solutions))
    return StabilizerFamilies(tuple(families), len(solutions))


# -----------------------------------------------------------------------------
# Subgrupos abelianos maximales
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class AbelianCertificate:
    passed: bool
    operators: Tuple[Tuple[Tuple[int, int], ...], ...]


def certify_maximal_abelian(basis_states: Sequence, group: WHGroup, tol: float = BASIS_TOL) -> AbelianCertificate:
    """
    Busca los representantes de WH que dejan invariante (módulo fase) a cada
    estado de la base; deben ser D y conmutar entre sí.
    """
    pure = [as_pure(s) for s in basis_states]
    expectations = np.abs(np.stack([group.expectations(p) for p in pure]))
    stabilizing = [op for k, op in enumerate(group) if np.all(np.abs(expectations[:, k] - 1.0) <= tol)]
    commuting = all(
        np.allclose(a.matrix @ b.matrix, b.matrix @ a.matrix, atol=tol)
        for i, a in enumerate(stabilizing)
        for b in stabilizing[i + 1:]
    )
    passed = len(stabilizing) == group.dim and commuting
    return AbelianCertificate(passed, tuple(op.index_tuple for op in stabilizing))