"""
Propósito: Estados de referencia ingresados a mano (semillas y contrastes).
Todo lo demás del catálogo se genera a partir de estos.
"""

import math

import numpy as np

from app.states import ExactState, PureState, normalize


def _exact(pairs, denominator: int) -> ExactState:
    return ExactState.from_pairs(pairs, denominator)


# (i, i, i, 1) / 2: semilla de la órbita de Clifford de magia máxima
MAX_MAGIC_SEED = _exact([(0, 1), (0, 1), (0, 1), (1, 0)], 2)

# (1, 1, 1, 1) / 2 y su imagen (1, i, i, i) / 2 bajo (1 ⊗ T) CNOT_01 (T ⊗ T)
PLUS_PLUS = _exact([(1, 0), (1, 0), (1, 0), (1, 0)], 2)
CIRCUIT_TARGET = _exact([(1, 0), (0, 1), (0, 1), (0, 1)], 2)

# Ejemplos de estados de magia máxima con concurrencia 1/2
MAGIC_EXAMPLES = (
    _exact([(0, 0), (0, 1), (0, -1), (1, 1)], 2),
    _exact([(1, 1), (1, 1), (1, -1), (3, 1)], 4),
)

# Cuatro bases mutuamente no sesgadas de una órbita de WH (magia máxima, Delta = 1/sqrt 2)
_MUB_LINES = (
    ((1, 0), (-1, 0), (-1, 0), (0, 1)),
    ((1, 0), (-1, 0), (1, 0), (0, -1)),
    ((1, 0), (1, 0), (-1, 0), (0, -1)),
    ((1, 0), (1, 0), (1, 0), (0, 1)),
    ((-1, 0), (0, 1), (1, 0), (-1, 0)),
    ((0, 1), (1, 0), (0, 1), (0, -1)),
    ((-1, 0), (0, -1), (1, 0), (1, 0)),
    ((0, 1), (-1, 0), (0, 1), (0, 1)),
    ((-1, 0), (1, 0), (0, 1), (-1, 0)),
    ((-1, 0), (1, 0), (0, -1), (1, 0)),
    ((0, 1), (0, 1), (1, 0), (0, -1)),
    ((0, 1), (0, 1), (-1, 0), (0, 1)),
    ((0, 1), (-1, 0), (-1, 0), (1, 0)),
    ((1, 0), (0, 1), (0, -1), (0, 1)),
    ((1, 0), (0, -1), (0, 1), (0, 1)),
    ((0, 1), (1, 0), (1, 0), (1, 0)),
)
MUB_ORBIT_STATES = tuple(_exact(line, 2) for line in _MUB_LINES)
MUB_ORBIT_BASES = tuple(MUB_ORBIT_STATES[k:k + 4] for k in range(0, 16, 4))

# Base computacional, la base estabilizadora que completa las cuatro anteriores
COMPUTATIONAL_BASIS = tuple(
    _exact([(1, 0) if j == k else (0, 0) for j in range(4)], 1) for k in range(4)
)

BELL = normalize([1, 0, 0, 1])

# Estado que supera en M_alpha a los de magia máxima para alpha pequeño
FOOTNOTE_STATE = PureState(
    np.array([0, -1 + 1j * math.sqrt(3), math.sqrt(3) - 1j, 2]) / (2 * math.sqrt(3))
)

# Fiducial SIC de un qubit y el punto (theta, phi) de Bloch que lo produce
SIC_FIDUCIAL_1Q = PureState(
    np.array([math.sqrt(6) + math.sqrt(2), (1 - 1j) * math.sqrt(2)]) / (2 * math.sqrt(3 + math.sqrt(3)))
)
SIC_BLOCH_POINT = (-2 * math.atan(1 / math.sqrt(2 + math.sqrt(3))), 3 * math.pi / 4)

# Punto de la parametrización de dos qubits que da (i, i, i, 1) / 2
MAX_MAGIC_PARAMS = ((math.pi / 4,) * 3, (math.pi / 2,) * 3)
