"""
Propósito: Operadores de desplazamiento (shift/clock) y el grupo de Weyl-Heisenberg
cociente (sin fases globales) para un qudit y para productos tensoriales.

Convención: D_{a1 a2} = w^{a1 a2 / 2} X^{a1} Z^{a2}, con w^{1/2} = exp(i pi / d).
Para d = 2, D_{11} = iXZ = Y, así que W(2) = {1, X, Y, Z}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import ZZ_I

from app.errors import DimMismatch, IndexOutOfRange, InvalidDim
from app.states import (
    ExactState,
    OrbitFamily,
    PureState,
    StateIndex,
    gaussian_conj,
)

_I_POWERS = (ZZ_I(1, 0), ZZ_I(0, 1), ZZ_I(-1, 0), ZZ_I(0, -1))
_PAULI_LABELS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise InvalidDim(f"Dimensión inválida: {d} (se requiere d >= 2).")


def shift_op(d: int) -> np.ndarray:
    """X|k> = |k+1 mod d>."""
    _check_dim(d)
    return np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)


def clock_op(d: int) -> np.ndarray:
    """Z|k> = w^k |k>, w = exp(2 pi i / d)."""
    _check_dim(d)
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


@dataclass(frozen=True, eq=False)
class WHOperator:
    """Representante del cociente: producto tensorial de D_{a1 a2} por factor."""

    factor_dims: Tuple[int, ...]
    index_tuple: Tuple[Tuple[int, int], ...]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @property
    def label(self) -> str:
        if all(d == 2 for d in self.factor_dims):
            return "".join(_PAULI_LABELS[pair] for pair in self.index_tuple)
        return "⊗".join(f"D{a1}{a2}" for a1, a2 in self.index_tuple)

    @cached_property
    def monomial(self) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """
        Forma exacta de X^{a1} Z^{a2} (sin el prefactor w^{a1 a2/2}): la columna k
        va a la fila targets[k] con fase i^{powers[k]}. Sólo existe si w es
        gaussiano, es decir, si cada d divide a 4.
        """
        if any(4 % d for d in self.factor_dims):
            return None
        targets, powers = [], []
        for ks in itertools.product(*(range(d) for d in self.factor_dims)):
            row, power = 0, 0
            for d, k, (a1, a2) in zip(self.factor_dims, ks, self.index_tuple):
                row = row * d + (k + a1) % d
                power += (4 // d) * a2 * k
            targets.append(row)
            powers.append(power % 4)
        return tuple(targets), tuple(powers)

    def apply(self, psi: PureState) -> PureState:
        if psi.dim != self.dim:
            raise DimMismatch(f"Operador de dimensión {self.dim} sobre estado de dimensión {psi.dim}.")
        return PureState(self.matrix @ psi.amplitudes)

    def apply_exact(self, state: ExactState) -> ExactState:
        """Aplicación exacta módulo fase global."""
        if state.dim != self.dim:
            raise DimMismatch(f"Operador de dimensión {self.dim} sobre estado de dimensión {state.dim}.")
        targets, powers = self.monomial
        out = [ZZ_I(0)] * self.dim
        for k, z in enumerate(state.numerators):
            out[targets[k]] = z * _I_POWERS[powers[k]]
        return ExactState.from_ray(out)

    def exact_expectation(self, state: ExactState):
        """Entero gaussiano g con <psi|X^a Z^b|psi> = g / m^2 (módulo fase)."""
        targets, powers = self.monomial
        nums = state.numerators
        total = ZZ_I(0)
        for k, z in enumerate(nums):
            total += gaussian_conj(nums[targets[k]]) * _I_POWERS[powers[k]] * z
        return total


def displacement(d: int, a1: int, a2: int) -> WHOperator:
    _check_dim(d)
    if not (0 <= a1 < d and 0 <= a2 < d):
        raise IndexOutOfRange(f"Índices ({a1}, {a2}) fuera de 0..{d - 1}.")
    prefactor = np.exp(1j * np.pi * a1 * a2 / d)
    matrix = prefactor * np.linalg.matrix_power(shift_op(d), a1) @ np.linalg.matrix_power(clock_op(d), a2)
    return WHOperator((d,), ((a1, a2),), matrix)


def tensor_displacement(factor_dims: Sequence[int], index_tuple: Sequence[Tuple[int, int]]) -> WHOperator:
    factors = [displacement(d, a1, a2) for d, (a1, a2) in zip(factor_dims, index_tuple)]
    matrix = reduce(np.kron, (f.matrix for f in factors))
    return WHOperator(tuple(factor_dims), tuple(tuple(p) for p in index_tuple), matrix)


@dataclass(frozen=True, eq=False)
class WHGroup:
    """Grupo W(d1) ⊗ ... ⊗ W(dn) con un representante por clase de fase."""

    factor_dims: Tuple[int, ...]
    operators: Tuple[WHOperator, ...]

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self) -> Iterator[WHOperator]:
        return iter(self.operators)

    @cached_property
    def stack(self) -> np.ndarray:
        return np.stack([op.matrix for op in self.operators])

    @property
    def supports_exact(self) -> bool:
        return all(4 % d == 0 for d in self.factor_dims)

    def expectations(self, psi: PureState) -> np.ndarray:
        """Vector con <psi|O|psi> para todos los O del grupo."""
        if psi.dim != self.dim:
            raise DimMismatch(f"Grupo de dimensión {self.dim} sobre estado de dimensión {psi.dim}.")
        amps = psi.amplitudes
        return np.einsum("i,kij,j->k", amps.conj(), self.stack, amps)

    def find(self, index_tuple: Sequence[Tuple[int, int]]) -> WHOperator:
        wanted = tuple(tuple(p) for p in index_tuple)
        for op in self.operators:
            if op.index_tuple == wanted:
                return op
        raise IndexOutOfRange(f"No existe el operador {wanted}.")


@lru_cache(maxsize=16)
def _build_group(factor_dims: Tuple[int, ...]) -> WHGroup:
    for d in factor_dims:
        _check_dim(d)
    per_factor = [[(a1, a2) for a1 in range(d) for a2 in range(d)] for d in factor_dims]
    operators = tuple(tensor_displacement(factor_dims, combo) for combo in itertools.product(*per_factor))
    return WHGroup(factor_dims, operators)


def wh_group(factor_dims: Sequence[int]) -> WHGroup:
    """Grupo de WH para los factores dados, en orden lexicográfico de índices."""
    factor_dims = tuple(int(d) for d in factor_dims)
    if not factor_dims:
        raise InvalidDim("Se requiere al menos un factor.")
    return _build_group(factor_dims)


def expectation(op: WHOperator, psi: PureState) -> complex:
    if psi.dim != op.dim:
        raise DimMismatch(f"Operador de dimensión {op.dim} sobre estado de dimensión {psi.dim}.")
    return complex(np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes))


def wh_orbit(psi, group: WHGroup) -> OrbitFamily:
    """
    Aplica cada elemento del grupo a psi y deduplica módulo fase. Con un estado
    exacto (y w gaussiano) la órbita se calcula en aritmética exacta.
    """
    if psi.dim != group.dim:
        raise DimMismatch(f"Grupo de dimensión {group.dim} sobre estado de dimensión {psi.dim}.")
    states: List = []
    trace: List[Tuple[Tuple[int, int], ...]] = []
    if isinstance(psi, ExactState) and group.supports_exact:
        seen = set()
        for op in group:
            image = op.apply_exact(psi)
            if image.ray_key not in seen:
                seen.add(image.ray_key)
                states.append(image)
                trace.append(op.index_tuple)
    else:
        base = psi.to_pure() if isinstance(psi, ExactState) else psi
        index = StateIndex()
        for op in group:
            image = op.apply(base)
            _, is_new = index.add(image)
            if is_new:
                states.append(image)
                trace.append(op.index_tuple)
    return OrbitFamily(tuple(states), seed=psi, generators=("WH",), generator_trace=tuple(trace))


def factor_dims_for(dim: int, factors: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """Factores tensoriales de un espacio de dimensión dim; sin factores se asumen qubits si dim = 2^n."""
    if factors:
        dims = tuple(int(f) for f in factors)
        if int(np.prod(dims)) != dim:
            raise DimMismatch(f"Los factores {dims} no multiplican {dim}.")
        return dims
    n = dim.bit_length() - 1
    return (2,) * n if n >= 1 and 2 ** n == dim else (dim,)
