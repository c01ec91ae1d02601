"""
Propósito: Entropía de Rényi estabilizadora (SRE) M_alpha y la suma Xi_alpha sobre
el grupo de Weyl-Heisenberg; formas cerradas de Xi_2 para uno y dos qubits;
cotas analíticas (SIC y MUB) y certificados de gradiente / hessiano.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from app.errors import DimMismatch, InvalidAlpha, InvalidDim, NotAStationaryPoint
from app.states import ExactState, PureState, as_pure, gaussian_abs2
from app.wh_group import WHGroup

logger = logging.getLogger(__name__)

GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-4
STATIONARY_TOL = 1e-7
POSITIVITY_THRESHOLD = 1e-6

# Coeficientes de diferencias centrales para la primera derivada, por orden
_CENTRAL_COEFFS = {
    2: (1 / 2,),
    4: (2 / 3, -1 / 12),
    6: (3 / 4, -3 / 20, 1 / 60),
    8: (4 / 5, -1 / 5, 4 / 105, -1 / 280),
}


@dataclass(frozen=True)
class SreValue:
    alpha: float
    xi: float
    m: float
    exact_xi: Optional[Fraction] = None

    @property
    def xi_text(self) -> str:
        return str(self.exact_xi) if self.exact_xi is not None else repr(self.xi)


def _check_alpha(alpha: float, allow_one: bool = True) -> None:
    if not alpha > 0:
        raise InvalidAlpha(f"alpha debe ser positivo (recibido {alpha}).")
    if not allow_one and alpha == 1:
        raise InvalidAlpha("El límite alpha -> 1 no está soportado.")


def xi(alpha: float, psi, group: WHGroup) -> float:
    """(1/D) sum_O |<psi|O|psi>|^{2 alpha}, con suma compensada."""
    _check_alpha(alpha)
    psi = as_pure(psi)
    if psi.dim != group.dim:
        raise DimMismatch(f"Estado de dimensión {psi.dim} con grupo de dimensión {group.dim}.")
    magnitudes = np.abs(group.expectations(psi))
    return math.fsum(magnitudes ** (2 * alpha)) / group.dim


def exact_xi(alpha: int, state: ExactState, group: WHGroup) -> Fraction:
    """Xi_alpha racional para estados gaussianos y alpha entero."""
    if int(alpha) != alpha or alpha < 1:
        raise InvalidAlpha("La ruta exacta requiere alpha entero positivo.")
    if state.dim != group.dim:
        raise DimMismatch(f"Estado de dimensión {state.dim} con grupo de dimensión {group.dim}.")
    if not group.supports_exact:
        raise InvalidDim(f"w no es gaussiano para los factores {group.factor_dims}.")
    alpha = int(alpha)
    total = sum(gaussian_abs2(op.exact_expectation(state)) ** alpha for op in group)
    return Fraction(total, group.dim * state.denominator ** (4 * alpha))


def _m_from_xi(alpha: float, value: float) -> float:
    if alpha == 2:
        return -math.log(value)
    return math.log(value) / (1 - alpha)


def sre(alpha: float, psi, group: WHGroup, exact: bool = False) -> SreValue:
    """M_alpha = ln(Xi_alpha) / (1 - alpha); alpha = 1 queda excluido."""
    _check_alpha(alpha, allow_one=False)
    if exact:
        if not isinstance(psi, ExactState):
            psi = ExactState.from_pure(as_pure(psi))
        value = exact_xi(alpha, psi, group)
        return SreValue(alpha, float(value), _m_from_xi(alpha, float(value)), value)
    value = xi(alpha, psi, group)
    return SreValue(alpha, value, _m_from_xi(alpha, value))


def stabilizer_norm(psi, group: WHGroup) -> SreValue:
    """
    M_{1/2} ("stabilizer norm"). Se calcula igual que cualquier M_alpha, pero no
    se trata como monótono certificado de magia.
    """
    return sre(0.5, psi, group)


# -----------------------------------------------------------------------------
# Formas cerradas
# -----------------------------------------------------------------------------
def bloch_state(theta: float, phi: float) -> PureState:
    """c1 = cos(theta/2), c2 = sin(theta/2) e^{i phi}."""
    return PureState([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])


def xi2_closed_1q(theta: float, phi: float) -> float:
    return (
        8 * math.sin(theta) ** 4 * math.cos(4 * phi)
        + 4 * math.cos(2 * theta)
        + 7 * math.cos(4 * theta)
        + 53
    ) / 64


def xi2_closed_2q(theta1: float, theta2: float, theta3: float, phi1: float, phi2: float, phi3: float) -> float:
    s1, c1 = math.sin(theta1), math.cos(theta1)
    s2, c2 = math.sin(theta2), math.cos(theta2)
    s3, c3 = math.sin(theta3), math.cos(theta3)
    sin, cos = math.sin, math.cos

    phase_sin = (
        2 * sin(phi3) ** 2 * sin(phi2 - phi1) ** 2
        + 2 * sin(phi2) ** 2 * sin(phi3 - phi1) ** 2
        + 2 * sin(phi1) ** 2 * sin(phi2 - phi3) ** 2
        + 1
    )
    t1 = 3 / 32 * sin(2 * theta1) ** 4 * sin(2 * theta2) ** 2 * sin(2 * theta3) ** 2 * phase_sin

    phase_cos = (
        cos(phi3) ** 2 * cos(phi2 - phi1) ** 2
        + cos(phi2) ** 2 * cos(phi3 - phi1) ** 2
        + cos(phi1) ** 2 * cos(phi2 - phi3) ** 2
    )
    inner = (
        24 * s2 ** 2 * c2 ** 2 * s3 ** 2 * c3 ** 2 * phase_cos
        + c2 ** 4 * (s3 ** 4 * (cos(4 * phi2 - 4 * phi3) + 6) + c3 ** 4 * (cos(4 * phi2) + 6))
        + s2 ** 4 * (s3 ** 4 * (cos(4 * phi3 - 4 * phi1) + 6) + c3 ** 4 * (cos(4 * phi1) + 6))
    )
    t2 = 2 * s1 ** 4 * c1 ** 4 * inner

    t3 = (
        2 * s1 ** 8 * s2 ** 4 * c2 ** 4 * (cos(4 * phi2 - 4 * phi1) + 6)
        + s1 ** 8 * s2 ** 8
        + s1 ** 8 * c2 ** 8
    )
    t4 = c1 ** 8 * (2 * s3 ** 4 * c3 ** 4 * (cos(4 * phi3) + 6) + s3 ** 8 + c3 ** 8)
    return t1 + t2 + t3 + t4


def xi2_closed_2q_params(params: Sequence[float]) -> float:
    """Versión vectorial (theta1, theta2, theta3, phi1, phi2, phi3)."""
    return xi2_closed_2q(*params)


# -----------------------------------------------------------------------------
# Derivadas numéricas y certificados
# -----------------------------------------------------------------------------
def central_gradient(f: Callable[[np.ndarray], float], x: Sequence[float], h: float = GRADIENT_STEP, order: int = 2) -> np.ndarray:
    coeffs = _CENTRAL_COEFFS[order]
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = sum(c * (f(x + k * step) - f(x - k * step)) for k, c in enumerate(coeffs, start=1)) / h
    return grad


def finite_difference_hessian(f: Callable[[np.ndarray], float], x: Sequence[float], h: float = HESSIAN_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = f(x)
    hess = np.zeros((n, n))
    basis = np.eye(n) * h
    for i in range(n):
        hess[i, i] = (f(x + basis[i]) - 2 * f0 + f(x - basis[i])) / h ** 2
        for j in range(i + 1, n):
            value = (
                f(x + basis[i] + basis[j])
                - f(x + basis[i] - basis[j])
                - f(x - basis[i] + basis[j])
                + f(x - basis[i] - basis[j])
            ) / (4 * h ** 2)
            hess[i, j] = hess[j, i] = value
    return hess


def gradient_xi2(params: Sequence[float]) -> np.ndarray:
    """Gradiente por diferencias centrales (h = 1e-5) de la forma cerrada de dos qubits."""
    return central_gradient(xi2_closed_2q_params, params)


@dataclass(frozen=True)
class HessianVerdict:
    positive_definite: bool
    eigenvalues: Tuple[float, ...]
    gradient_norm: float

    @property
    def min_eigenvalue(self) -> float:
        return min(self.eigenvalues)


def hessian_positive_definite(
    params: Sequence[float],
    objective: Callable[[np.ndarray], float] = xi2_closed_2q_params,
    threshold: float = POSITIVITY_THRESHOLD,
) -> HessianVerdict:
    gradient_norm = float(np.linalg.norm(central_gradient(objective, params)))
    if gradient_norm >= STATIONARY_TOL:
        raise NotAStationaryPoint(f"|grad| = {gradient_norm:.3e} no es estacionario.")
    eigenvalues = np.linalg.eigvalsh(finite_difference_hessian(objective, params))
    verdict = bool(np.all(eigenvalues > threshold))
    logger.debug("Hessiano: autovalores %s -> definido positivo=%s", np.round(eigenvalues, 8), verdict)
    return HessianVerdict(verdict, tuple(float(v) for v in eigenvalues), gradient_norm)


# -----------------------------------------------------------------------------
# Cotas analíticas
# -----------------------------------------------------------------------------
def _check_bound_args(alpha: float, d: int) -> None:
    _check_alpha(alpha, allow_one=False)
    if d < 2:
        raise InvalidDim(f"d = {d} no es válido.")


def sic_bound(alpha: float, d: int) -> float:
    """Cota saturada por fiduciales SIC covariantes bajo WH."""
    _check_bound_args(alpha, d)
    return math.log((1 + (d - 1) * (d + 1) ** (1 - alpha)) / d) / (1 - alpha)


def mub_bound(alpha: float, d: int) -> float:
    """Magia de un fiducial de MUBs de WH."""
    _check_bound_args(alpha, d)
    return math.log((1 + (d - 1) * d ** (1 - alpha)) / d) / (1 - alpha)


# -----------------------------------------------------------------------------
# Cruce en alpha entre dos estados
# -----------------------------------------------------------------------------
def magic_difference(alpha: float, psi_a, psi_b, group: WHGroup) -> float:
    """M_alpha(a) - M_alpha(b)."""
    return sre(alpha, psi_a, group).m - sre(alpha, psi_b, group).m


def crossover_alpha(psi_a, psi_b, group: WHGroup, bracket: Tuple[float, float] = (1.4, 1.9)) -> float:
    """alpha en el que M_alpha(a) = M_alpha(b), buscado con brentq dentro de bracket."""
    lo, hi = bracket
    if lo <= 1 <= hi:
        raise InvalidAlpha("El intervalo no puede contener alpha = 1.")
    return float(brentq(magic_difference, lo, hi, args=(psi_a, psi_b, group), xtol=1e-12))
