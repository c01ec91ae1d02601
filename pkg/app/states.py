"""
Propósito: Representación de estados puros (flotantes y exactos), normalización,
comparación módulo fase global y claves canónicas para deduplicar órbitas.

Los estados exactos viven sobre los racionales gaussianos: numeradores en Z[i]
(aritmética de sympy, ZZ_I) y un denominador entero positivo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.polys.domains import ZZ_I

from app.errors import DimMismatch, InvalidDim, NotGaussianRational, NotNormalized, ZeroVector

NORM_TOL = 1e-12
ZERO_TOL = 1e-14
PIVOT_TOL = 1e-8
KEY_RESOLUTION = 1e-8
EQUALITY_TOL = 1e-9

# Unidades de Z[i]: 1, i, -1, -i
_UNITS = (ZZ_I(1, 0), ZZ_I(0, 1), ZZ_I(-1, 0), ZZ_I(0, -1))
_ONE_PLUS_I = ZZ_I(1, 1)


# -----------------------------------------------------------------------------
# Utilidades de enteros gaussianos
# -----------------------------------------------------------------------------
def gaussian(a: int, b: int = 0):
    """Crea el entero gaussiano a + bi."""
    return ZZ_I(int(a), int(b))


def gaussian_parts(z) -> Tuple[int, int]:
    return int(z.x), int(z.y)


def gaussian_abs2(z) -> int:
    x, y = gaussian_parts(z)
    return x * x + y * y


def gaussian_conj(z):
    return ZZ_I(z.x, -z.y)


def gaussian_is_zero(z) -> bool:
    return z.x == 0 and z.y == 0


def _exact_quotient(z, g):
    """z / g cuando la división es exacta en Z[i]."""
    n = z * gaussian_conj(g)
    norm = gaussian_abs2(g)
    x, y = gaussian_parts(n)
    if x % norm or y % norm:
        raise ArithmeticError(f"{z} no es divisible por {g}")
    return ZZ_I(x // norm, y // norm)


def primitive_ray(vector: Sequence) -> Tuple:
    """
    Representante canónico de un rayo de Z[i]^D: divide por el mcd gaussiano y
    multiplica por la unidad que deja la primera entrada no nula en el primer
    cuadrante (parte real > 0, imaginaria >= 0).
    """
    g = ZZ_I(0)
    for z in vector:
        if not gaussian_is_zero(z):
            g = ZZ_I.gcd(g, z)
    if gaussian_is_zero(g):
        raise ZeroVector("Vector gaussiano nulo.")
    if gaussian_abs2(g) != 1:
        vector = [_exact_quotient(z, g) for z in vector]
    pivot = next(z for z in vector if not gaussian_is_zero(z))
    unit = _UNITS[0]
    for candidate in _UNITS:
        w = pivot * candidate
        if w.x > 0 and w.y >= 0:
            unit = candidate
            break
    return tuple(z * unit for z in vector)


# -----------------------------------------------------------------------------
# Tipos de estado
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class PureState:
    """Vector de amplitudes complejas de norma 1 (inmutable)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 1:
            raise InvalidDim("Un estado necesita al menos una amplitud.")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"Norma {norm!r} fuera de tolerancia; usa normalize().")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def __repr__(self) -> str:
        body = ", ".join(f"{c.real:+.6f}{c.imag:+.6f}j" for c in self.amplitudes)
        return f"PureState([{body}])"


@dataclass(frozen=True)
class CanonicalKey:
    """Amplitudes cuantizadas tras fijar la fase global."""

    quantized: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class ExactState:
    """Estado con amplitudes numeradores[k] / denominador, numeradores en Z[i]."""

    numerators: Tuple
    denominator: int

    def __post_init__(self):
        object.__setattr__(self, "numerators", tuple(self.numerators))
        if self.denominator <= 0:
            raise NotNormalized("El denominador debe ser positivo.")
        if self.norm_squared_numerator != self.denominator ** 2:
            raise NotNormalized(
                f"Suma |num|^2 = {self.norm_squared_numerator} != {self.denominator}^2."
            )

    @property
    def dim(self) -> int:
        return len(self.numerators)

    @property
    def norm_squared_numerator(self) -> int:
        return sum(gaussian_abs2(z) for z in self.numerators)

    @property
    def gaussian_pairs(self) -> List[List[int]]:
        return [list(gaussian_parts(z)) for z in self.numerators]

    @cached_property
    def ray_key(self) -> Tuple[Tuple[int, int], ...]:
        """Clave exacta del rayo (invariante ante fase global)."""
        return tuple(gaussian_parts(z) for z in primitive_ray(self.numerators))

    def to_pure(self) -> PureState:
        m = float(self.denominator)
        amps = np.array([complex(x, y) for x, y in map(gaussian_parts, self.numerators)]) / m
        return PureState(amps)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], denominator: int) -> "ExactState":
        return cls(tuple(gaussian(a, b) for a, b in pairs), int(denominator))

    @classmethod
    def from_ray(cls, vector: Sequence) -> "ExactState":
        """
        Normaliza exactamente un vector de Z[i]^D (definido módulo escala).
        Sólo es posible si la norma al cuadrado del representante primitivo es
        m^2 o 2 m^2; en el segundo caso se multiplica por (1+i).
        """
        prim = primitive_ray(vector)
        norm2 = sum(gaussian_abs2(z) for z in prim)
        root = math.isqrt(norm2)
        if root * root == norm2:
            return cls(prim, root)
        if norm2 % 2 == 0:
            half_root = math.isqrt(norm2 // 2)
            if half_root * half_root * 2 == norm2:
                return cls(tuple(z * _ONE_PLUS_I for z in prim), 2 * half_root)
        raise NotGaussianRational(f"El rayo con norma^2 {norm2} no admite amplitudes en Q(i).")

    @classmethod
    def from_pure(cls, psi: PureState, max_denominator: int = 64, tol: float = EQUALITY_TOL) -> "ExactState":
        """Reconstrucción racional de un estado flotante cuyo rayo es gaussiano."""
        amps = psi.amplitudes
        ratios = amps / amps[_pivot_index(amps)]
        parts = [
            (Fraction(float(r.real)).limit_denominator(max_denominator),
             Fraction(float(r.imag)).limit_denominator(max_denominator))
            for r in ratios
        ]
        common = math.lcm(*(f.denominator for pair in parts for f in pair))
        vector = [gaussian(a * common, b * common) for a, b in parts]
        exact = cls.from_ray(vector)
        if not equal_up_to_phase(exact.to_pure(), psi, tol):
            raise NotGaussianRational("El estado no coincide con ninguna reconstrucción gaussiana.")
        return exact


State = Union[PureState, ExactState]


@dataclass(frozen=True, eq=False)
class OrbitFamily:
    """Conjunto deduplicado de estados cerrado bajo una acción de grupo."""

    states: Tuple
    seed: Optional[object] = None
    generators: Tuple[str, ...] = ()
    generator_trace: Tuple = ()
    orbit_id: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.states)

    def pure_states(self) -> List[PureState]:
        return [as_pure(s) for s in self.states]

    def with_id(self, orbit_id: int) -> "OrbitFamily":
        return replace(self, orbit_id=orbit_id)


# -----------------------------------------------------------------------------
# Operaciones
# -----------------------------------------------------------------------------
def _pivot_index(amps: np.ndarray) -> int:
    big = np.flatnonzero(np.abs(amps) > PIVOT_TOL)
    if big.size == 0:
        raise ZeroVector("No hay amplitud pivote.")
    return int(big[0])


def normalize(raw: Sequence[complex]) -> PureState:
    """Devuelve el estado unitario en la dirección de raw."""
    arr = np.asarray(raw, dtype=np.complex128).reshape(-1)
    if arr.size == 0 or np.all(np.abs(arr) < ZERO_TOL):
        raise ZeroVector("Todas las entradas son (numéricamente) cero.")
    return PureState(arr / np.linalg.norm(arr))


def as_pure(state) -> PureState:
    if isinstance(state, PureState):
        return state
    if isinstance(state, ExactState):
        return state.to_pure()
    return normalize(state)


def _check_dims(a: PureState, b: PureState) -> None:
    if a.dim != b.dim:
        raise DimMismatch(f"Dimensiones distintas: {a.dim} vs {b.dim}.")


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugando el primer argumento."""
    _check_dims(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def equal_up_to_phase(a: PureState, b: PureState, tol: float = EQUALITY_TOL) -> bool:
    """min_phi ||a - e^{i phi} b|| <= tol, evaluado con la fase óptima."""
    _check_dims(a, b)
    overlap = np.vdot(b.amplitudes, a.amplitudes)
    size = abs(overlap)
    phase = overlap / size if size > 0 else 1.0
    return bool(np.linalg.norm(a.amplitudes - phase * b.amplitudes) <= tol)


def canonical_key(a: PureState) -> CanonicalKey:
    amps = a.amplitudes
    pivot = amps[_pivot_index(amps)]
    rotated = amps * (np.conj(pivot) / abs(pivot))
    re = np.rint(rotated.real / KEY_RESOLUTION).astype(np.int64)
    im = np.rint(rotated.imag / KEY_RESOLUTION).astype(np.int64)
    return CanonicalKey(tuple((int(x), int(y)) for x, y in zip(re, im)))


def random_state(dim: int, rng: np.random.Generator) -> PureState:
    """Estado aleatorio con medida de Haar."""
    return normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


# -----------------------------------------------------------------------------
# Índice de estados para deduplicación y búsqueda
# -----------------------------------------------------------------------------
@dataclass
class StateIndex:
    """
    Índice por clave canónica; si la clave no coincide y tol > 0 se busca el
    vecino más cercano por solapamiento y se confirma con equal_up_to_phase.
    """

    tol: float = EQUALITY_TOL
    _by_key: dict = field(default_factory=dict)
    _rows: List[np.ndarray] = field(default_factory=list)
    _matrix: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self._rows)

    def find(self, state, tol: Optional[float] = None) -> Optional[int]:
        psi = as_pure(state)
        hit = self._by_key.get(canonical_key(psi))
        if hit is not None:
            return hit
        tol = self.tol if tol is None else tol
        if tol <= 0 or not self._rows:
            return None
        if self._matrix is None:
            self._matrix = np.vstack(self._rows)
        if self._matrix.shape[1] != psi.dim:
            raise DimMismatch("Dimensión distinta a la del índice.")
        best = int(np.argmax(np.abs(self._matrix.conj() @ psi.amplitudes)))
        if equal_up_to_phase(PureState(self._rows[best]), psi, tol):
            return best
        return None

    def add(self, state) -> Tuple[int, bool]:
        """Inserta si no existe; devuelve (posición, es_nuevo)."""
        found = self.find(state)
        if found is not None:
            return found, False
        psi = as_pure(state)
        position = len(self._rows)
        self._by_key.setdefault(canonical_key(psi), position)
        self._rows.append(psi.amplitudes)
        self._matrix = None
        return position, True

    def __contains__(self, state) -> bool:
        return self.find(state) is not None
