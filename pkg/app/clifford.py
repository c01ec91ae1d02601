"""
Propósito: Compuertas Clifford (+T) sobre 1 o 2 qubits, aplicación de circuitos y
cierre por BFS de órbitas de Clifford módulo fase global.

Convención de qubits: el factor tensorial más a la izquierda es el qubit 0.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import orjson
from pydantic import TypeAdapter, ValidationError
from sympy.polys.domains import ZZ_I

from app.config import ORBIT_CAP
from app.errors import DimMismatch, IndexOutOfRange, InvalidCircuit, OrbitOverflow, UnsupportedArity
from app.schemas import CircuitStep
from app.states import ExactState, OrbitFamily, PureState, StateIndex, normalize
from app.wh_group import WHGroup, wh_group

logger = logging.getLogger(__name__)

CLIFFORD_TOL = 1e-10
UNITARY_TOL = 1e-12

_SQRT2 = np.sqrt(2.0)
_SINGLE_QUBIT = {
    "H": (np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2, _SQRT2),
    "S": (np.diag([1, 1j]).astype(np.complex128), 1.0),
    "T": (np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128), None),
}


@dataclass(frozen=True, eq=False)
class Gate:
    """
    Compuerta embebida en n qubits. `exact` es la matriz escalada a enteros
    gaussianos (H se guarda como [[1,1],[1,-1]]); sólo sirve módulo escala,
    lo que basta para órbitas de rayos.
    """

    name: str
    matrix: np.ndarray
    qubits: Tuple[int, ...]
    n_qubits: int
    exact: Optional[Tuple[Tuple, ...]] = None
    clifford: bool = False

    def __post_init__(self):
        m = self.matrix
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=UNITARY_TOL):
            raise InvalidCircuit(f"La compuerta {self.name} no es unitaria.")

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, psi: PureState) -> PureState:
        if psi.dim != self.dim:
            raise DimMismatch(f"{self.name} actúa en dimensión {self.dim}, el estado tiene {psi.dim}.")
        return normalize(self.matrix @ psi.amplitudes)

    def apply_exact(self, state: ExactState) -> ExactState:
        if self.exact is None:
            raise InvalidCircuit(f"{self.name} no tiene forma exacta sobre Q(i).")
        if state.dim != self.dim:
            raise DimMismatch(f"{self.name} actúa en dimensión {self.dim}, el estado tiene {state.dim}.")
        nums = state.numerators
        out = []
        for row in self.exact:
            acc = ZZ_I(0)
            for entry, z in zip(row, nums):
                if entry:
                    acc += entry * z
            out.append(acc)
        return ExactState.from_ray(out)


def _to_gaussian_matrix(matrix: np.ndarray) -> Tuple[Tuple, ...]:
    re = np.rint(matrix.real).astype(np.int64)
    im = np.rint(matrix.imag).astype(np.int64)
    if not np.allclose(matrix, re + 1j * im, atol=1e-12):
        raise ValueError("La matriz no es entera gaussiana.")
    return tuple(
        tuple(ZZ_I(int(a), int(b)) for a, b in zip(row_re, row_im)) for row_re, row_im in zip(re, im)
    )


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise IndexOutOfRange(f"Qubit {q} fuera de 0..{n - 1}.")


def single_qubit_gate(name: str, qubit: int, n_qubits: int) -> Gate:
    if name not in _SINGLE_QUBIT:
        raise InvalidCircuit(f"Compuerta desconocida: {name}.")
    _check_qubit(qubit, n_qubits)
    base, scale = _SINGLE_QUBIT[name]
    factors = [np.eye(2, dtype=np.complex128)] * n_qubits
    factors[qubit] = base
    matrix = reduce(np.kron, factors)
    exact = _to_gaussian_matrix(matrix * scale) if scale is not None else None
    label = name if n_qubits == 1 else f"{name}{qubit}"
    return _finish(Gate(label, matrix, (qubit,), n_qubits, exact))


def cnot(control: int, target: int, n_qubits: int) -> Gate:
    _check_qubit(control, n_qubits)
    _check_qubit(target, n_qubits)
    if control == target:
        raise InvalidCircuit("CNOT necesita control y target distintos.")
    dim = 2 ** n_qubits
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        if (k >> (n_qubits - 1 - control)) & 1:
            matrix[k ^ (1 << (n_qubits - 1 - target)), k] = 1
        else:
            matrix[k, k] = 1
    return _finish(Gate(f"CNOT{control}{target}", matrix, (control, target), n_qubits, _to_gaussian_matrix(matrix)))


def _finish(gate: Gate) -> Gate:
    flag = is_clifford(gate, wh_group((2,) * gate.n_qubits))
    return Gate(gate.name, gate.matrix, gate.qubits, gate.n_qubits, gate.exact, flag)


def standard_gates(n: int) -> List[Gate]:
    """{H_i, S_i, CNOT_01, CNOT_10, T_i} para n en {1, 2}."""
    if n not in (1, 2):
        raise UnsupportedArity(f"Sólo se soportan 1 o 2 qubits (recibido {n}).")
    gates = [single_qubit_gate(name, q, n) for name in ("H", "S") for q in range(n)]
    if n == 2:
        gates += [cnot(0, 1, 2), cnot(1, 0, 2)]
    gates += [single_qubit_gate("T", q, n) for q in range(n)]
    return gates


def clifford_generators(n: int) -> List[Gate]:
    return [g for g in standard_gates(n) if g.clifford]


def is_clifford(gate: Gate, group: WHGroup) -> bool:
    """g O g^dagger es proporcional a algún representante de WH, para todo O."""
    if gate.dim != group.dim:
        raise DimMismatch(f"Compuerta de dimensión {gate.dim} con grupo de dimensión {group.dim}.")
    g = gate.matrix
    stack_conj = group.stack.conj()
    for op in group:
        conjugated = g @ op.matrix @ g.conj().T
        overlaps = np.abs(np.einsum("kij,ij->k", stack_conj, conjugated)) / group.dim
        if abs(overlaps.max() - 1.0) > CLIFFORD_TOL:
            return False
    return True


def apply_circuit(psi, gates: Sequence[Gate]):
    """Aplica las compuertas en orden (la primera de la lista actúa primero)."""
    if isinstance(psi, ExactState) and all(g.exact is not None for g in gates):
        for g in gates:
            psi = g.apply_exact(psi)
        return psi
    if isinstance(psi, ExactState):
        psi = psi.to_pure()
    for g in gates:
        psi = g.apply(psi)
    return psi


def clifford_orbit(seed, generators: Sequence[Gate], cap: int = ORBIT_CAP) -> OrbitFamily:
    """
    Cierre BFS de la semilla bajo los generadores, deduplicando módulo fase.
    El orden de los estados es el de descubrimiento; generator_trace guarda
    (padre, compuerta) por estado.
    """
    for g in generators:
        if g.dim != seed.dim:
            raise DimMismatch(f"{g.name} actúa en dimensión {g.dim}, la semilla tiene {seed.dim}.")
        if not g.clifford:
            raise OrbitOverflow(f"{g.name} no es Clifford: la órbita no es finita.")

    exact = isinstance(seed, ExactState) and all(g.exact is not None for g in generators)
    if not exact and isinstance(seed, ExactState):
        seed = seed.to_pure()

    states: List = [seed]
    trace: List[Tuple[Optional[int], Optional[str]]] = [(None, None)]
    if exact:
        seen = {seed.ray_key}
    else:
        index = StateIndex()
        index.add(seed)

    queue = deque([0])
    while queue:
        parent = queue.popleft()
        for g in generators:
            if exact:
                image = g.apply_exact(states[parent])
                is_new = image.ray_key not in seen
                if is_new:
                    seen.add(image.ray_key)
            else:
                image = g.apply(states[parent])
                _, is_new = index.add(image)
            if is_new:
                states.append(image)
                trace.append((parent, g.name))
                queue.append(len(states) - 1)
                if len(states) > cap:
                    raise OrbitOverflow(f"La órbita supera el límite de {cap} estados.")

    logger.debug("Órbita de Clifford: %d estados (%s)", len(states), "exacta" if exact else "flotante")
    return OrbitFamily(
        tuple(states),
        seed=seed,
        generators=tuple(g.name for g in generators),
        generator_trace=tuple(trace),
    )


# -----------------------------------------------------------------------------
# Archivos de circuito
# -----------------------------------------------------------------------------
_STEPS = TypeAdapter(List[CircuitStep])


def gate_from_step(step: CircuitStep, n_qubits: int) -> Gate:
    if step.gate == "CNOT":
        if step.control is None or step.target is None:
            raise InvalidCircuit("CNOT requiere 'control' y 'target'.")
        return cnot(step.control, step.target, n_qubits)
    if step.qubit is None:
        raise InvalidCircuit(f"{step.gate} requiere 'qubit'.")
    return single_qubit_gate(step.gate, step.qubit, n_qubits)


def load_circuit(source: Union[str, Path, Iterable[dict]], n_qubits: int) -> List[Gate]:
    """Lee un circuito [{"gate":"T","qubit":1}, {"gate":"CNOT","control":0,"target":1}, ...]."""
    if isinstance(source, (str, Path)):
        raw = orjson.loads(Path(source).read_bytes())
    else:
        raw = list(source)
    try:
        steps = _STEPS.validate_python(raw)
    except ValidationError as e:
        raise InvalidCircuit(f"Circuito inválido: {e.error_count()} error(es) de formato.") from e
    return [gate_from_step(step, n_qubits) for step in steps]
