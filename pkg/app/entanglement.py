"""
Propósito: Concurrencia de estados puros de dos qubits y su perfil sobre órbitas.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from app.errors import DimMismatch, NonConstantOrbit
from app.states import ExactState, OrbitFamily, as_pure, gaussian_abs2

PROFILE_TOL = 1e-10


@dataclass(frozen=True)
class ConcurrenceValue:
    value: float
    value_squared: Optional[Fraction] = None


def concurrence(psi) -> ConcurrenceValue:
    """Delta = 2 |c1 c4 - c2 c3|; con un ExactState también devuelve Delta^2 racional."""
    if psi.dim != 4:
        raise DimMismatch(f"La concurrencia requiere dimensión 4 (recibido {psi.dim}).")
    if isinstance(psi, ExactState):
        n1, n2, n3, n4 = psi.numerators
        squared = Fraction(4 * gaussian_abs2(n1 * n4 - n2 * n3), psi.denominator ** 4)
        return ConcurrenceValue(math.sqrt(squared), squared)
    c1, c2, c3, c4 = as_pure(psi).amplitudes
    return ConcurrenceValue(float(2 * abs(c1 * c4 - c2 * c3)))


def histogram_key(value: float) -> str:
    return f"{round(value, 10):.10g}"


@dataclass(frozen=True)
class OrbitConcurrence:
    orbit_id: int
    value: float
    value_squared: Optional[Fraction]
    spread: float


@dataclass(frozen=True)
class ConcurrenceProfile:
    per_orbit: Tuple[OrbitConcurrence, ...]
    histogram: Dict[str, int]
    exact: Dict[str, Optional[str]]

    def value_of(self, orbit_id: int) -> float:
        return next(o.value for o in self.per_orbit if o.orbit_id == orbit_id)

    def as_dict(self) -> dict:
        return {
            "histogram": self.histogram,
            "exact_squared": self.exact,
            "orbits": [
                {
                    "orbit_id": o.orbit_id,
                    "concurrence": o.value,
                    "concurrence_sq": None if o.value_squared is None else str(o.value_squared),
                }
                for o in self.per_orbit
            ],
        }


def orbit_concurrence_profile(orbits: Sequence[OrbitFamily], tol: float = PROFILE_TOL) -> ConcurrenceProfile:
    """Un valor por órbita (verificando que sea constante) y el histograma global."""
    per_orbit: List[OrbitConcurrence] = []
    for k, orbit in enumerate(orbits):
        values = [concurrence(s) for s in orbit.states]
        floats = [v.value for v in values]
        spread = max(floats) - min(floats)
        if spread > tol:
            raise NonConstantOrbit(f"Órbita {k}: concurrencia varía en {spread:.3e}.")
        orbit_id = k if orbit.orbit_id is None else orbit.orbit_id
        per_orbit.append(OrbitConcurrence(orbit_id, floats[0], values[0].value_squared, spread))

    histogram = Counter(histogram_key(o.value) for o in per_orbit)
    exact = {histogram_key(o.value): (None if o.value_squared is None else str(o.value_squared)) for o in per_orbit}
    return ConcurrenceProfile(tuple(per_orbit), dict(sorted(histogram.items())), dict(sorted(exact.items())))
