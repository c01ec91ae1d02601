"""
Propósito: Parametrización hiperesférica de estados puros, minimización multistart
de Xi_2, recolección deduplicada de minimizadores y certificación de mínimos aislados.

Paisajes disponibles:
    one-qubit  -> (theta, phi) de Bloch, forma cerrada de Xi_2.
    two-qubit  -> 3 ángulos theta y 3 fases, forma cerrada de Xi_2 sobre W(2)⊗W(2).
    qudit      -> misma parametrización en D = 4, Xi_2 sobre W(4).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from tqdm import tqdm

from app.errors import NotAMinimum, OutOfRange
from app.magic import (
    central_gradient,
    finite_difference_hessian,
    xi,
    xi2_closed_1q,
    xi2_closed_2q_params,
)
from app.states import CanonicalKey, OrbitFamily, PureState, StateIndex, canonical_key, normalize, random_state
from app.wh_group import WHGroup, wh_group

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
RANGE_SLACK = 1e-12
GRADIENT_ACCEPT = 1e-8
HESSIAN_ACCEPT = 1e-6
DEDUP_TOL = 1e-7
SNAP_TOL = 1e-6
AMPLITUDE_ZERO = 1e-12

NM_OPTIONS = {"xatol": 1e-9, "fatol": 1e-13, "adaptive": True, "maxiter": 20000, "maxfev": 40000}


@dataclass(frozen=True)
class ParamPoint:
    """thetas en [0, pi/2] (en [0, pi] para un qubit) y phis en [0, 2 pi)."""

    thetas: Tuple[float, ...]
    phis: Tuple[float, ...]

    @property
    def theta_max(self) -> float:
        return math.pi if len(self.thetas) == 1 else math.pi / 2

    def as_array(self) -> np.ndarray:
        return np.array(self.thetas + self.phis, dtype=float)

    @classmethod
    def from_array(cls, x: Sequence[float]) -> "ParamPoint":
        x = [float(v) for v in x]
        half = len(x) // 2
        return cls(tuple(x[:half]), tuple(x[half:]))

    def check_range(self) -> None:
        for t in self.thetas:
            if not -RANGE_SLACK <= t <= self.theta_max + RANGE_SLACK:
                raise OutOfRange(f"theta = {t} fuera de [0, {self.theta_max}].")
        for p in self.phis:
            if not -RANGE_SLACK <= p < TWO_PI + RANGE_SLACK:
                raise OutOfRange(f"phi = {p} fuera de [0, 2 pi).")


@dataclass(frozen=True)
class MinimizerRecord:
    point: ParamPoint
    state: PureState
    xi_value: float
    gradient_norm: float
    hessian_min_eigen: float
    basin: CanonicalKey
    converged: bool = True
    start_index: int = -1


# -----------------------------------------------------------------------------
# Parametrización
# -----------------------------------------------------------------------------
def _amplitudes(x: Sequence[float]) -> np.ndarray:
    """Amplitudes sin chequeo de rango (el optimizador se mueve libremente)."""
    if len(x) == 2:
        theta, phi = x
        return np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])
    t1, t2, t3, p1, p2, p3 = x
    return np.array([
        math.sin(t1) * math.sin(t2) * np.exp(1j * p1),
        math.sin(t1) * math.cos(t2) * np.exp(1j * p2),
        math.cos(t1) * math.sin(t3) * np.exp(1j * p3),
        math.cos(t1) * math.cos(t3),
    ])


def param_to_state(p: ParamPoint) -> PureState:
    """c1 = s1 s2 e^{i phi1}, c2 = s1 c2 e^{i phi2}, c3 = c1 s3 e^{i phi3}, c4 = c1 c3 (fase de c4 fija en 0)."""
    p.check_range()
    return normalize(_amplitudes(p.as_array()))


def state_to_param(psi: PureState) -> ParamPoint:
    """Inversa de param_to_state módulo fase global; deja el punto dentro de la caja."""
    amps = psi.amplitudes
    mags = np.abs(amps)
    if psi.dim == 2:
        ref = np.angle(amps[0]) if mags[0] > AMPLITUDE_ZERO else np.angle(amps[1])
        theta = 2 * math.atan2(mags[1], mags[0])
        phi = (np.angle(amps[1]) - ref) % TWO_PI if mags[1] > AMPLITUDE_ZERO else 0.0
        return ParamPoint((theta,), (_wrap_phase(phi),))
    if psi.dim != 4:
        raise OutOfRange(f"No hay parametrización para dimensión {psi.dim}.")
    nonzero = [k for k in range(4) if mags[k] > AMPLITUDE_ZERO]
    ref = np.angle(amps[nonzero[-1]])
    t1 = math.atan2(math.hypot(mags[0], mags[1]), math.hypot(mags[2], mags[3]))
    t2 = math.atan2(mags[0], mags[1])
    t3 = math.atan2(mags[2], mags[3])
    phis = tuple(
        _wrap_phase((np.angle(amps[k]) - ref) % TWO_PI) if mags[k] > AMPLITUDE_ZERO else 0.0 for k in range(3)
    )
    return ParamPoint((t1, t2, t3), phis)


def _wrap_phase(phi: float) -> float:
    phi = float(phi) % TWO_PI
    return 0.0 if phi >= TWO_PI - 1e-15 else phi


# -----------------------------------------------------------------------------
# Paisajes
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Landscape:
    name: str
    n_params: int
    theta_max: float
    group: WHGroup
    objective: Callable[[np.ndarray], float]
    known_min: float

    @property
    def dim(self) -> int:
        return self.group.dim

    def to_state(self, x: Sequence[float]) -> PureState:
        return normalize(_amplitudes(x))

    def random_start(self, rng: np.random.Generator, haar: bool = False) -> np.ndarray:
        if haar:
            return state_to_param(random_state(self.dim, rng)).as_array()
        n_theta = self.n_params // 2
        thetas = rng.uniform(0.0, self.theta_max, size=n_theta)
        phis = rng.uniform(0.0, TWO_PI, size=n_theta)
        return np.concatenate([thetas, phis])


def _one_qubit_objective(x: np.ndarray) -> float:
    return xi2_closed_1q(x[0], x[1])


def _qudit_objective(x: np.ndarray) -> float:
    return xi(2, PureState(_amplitudes(x)), wh_group((4,)))


@lru_cache(maxsize=None)
def landscape(name: str) -> Landscape:
    if name == "one-qubit":
        return Landscape(name, 2, math.pi, wh_group((2,)), _one_qubit_objective, 2 / 3)
    if name == "two-qubit":
        return Landscape(name, 6, math.pi / 2, wh_group((2, 2)), xi2_closed_2q_params, 7 / 16)
    if name == "qudit":
        return Landscape(name, 6, math.pi / 2, wh_group((4,)), _qudit_objective, 2 / 5)
    raise OutOfRange(f"Paisaje desconocido: {name}.")


# -----------------------------------------------------------------------------
# Multistart
# -----------------------------------------------------------------------------
def _newton_polish(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    grad = central_gradient(f, x)
    hess = finite_difference_hessian(f, x)
    step = np.linalg.lstsq(hess, -grad, rcond=1e-8)[0]
    candidate = x + step
    # Cerca del mínimo f ya no distingue: se compara también el gradiente
    improves = np.linalg.norm(central_gradient(f, candidate)) < np.linalg.norm(grad)
    return candidate if improves and f(candidate) <= f(x) + 1e-14 else x


def _record(land: Landscape, x: np.ndarray, start_index: int) -> MinimizerRecord:
    state = land.to_state(x)
    point = state_to_param(state)
    wrapped = point.as_array()
    gradient_norm = float(np.linalg.norm(central_gradient(land.objective, wrapped)))
    hess_min = float(np.linalg.eigvalsh(finite_difference_hessian(land.objective, wrapped)).min())
    return MinimizerRecord(
        point=point,
        state=state,
        xi_value=xi(2, state, land.group),
        gradient_norm=gradient_norm,
        hessian_min_eigen=hess_min,
        basin=canonical_key(state),
        converged=gradient_norm < GRADIENT_ACCEPT,
        start_index=start_index,
    )


def _run_start(args: Tuple[str, int, int, bool]) -> MinimizerRecord:
    name, seed, start_index, haar = args
    land = landscape(name)
    rng = np.random.default_rng([seed, start_index])
    x0 = land.random_start(rng, haar)
    result = minimize(land.objective, x0, method="Nelder-Mead", options=NM_OPTIONS)
    if not result.success:
        logger.debug("[%s] arranque %d: %s", name, start_index, result.message)
    x = _newton_polish(land.objective, result.x)
    return _record(land, x, start_index)


def multistart_minimize(
    land: Union[str, Landscape],
    n_starts: int,
    seed: int,
    workers: int = 1,
    haar: bool = False,
    progress: bool = False,
) -> List[MinimizerRecord]:
    """
    Un descenso Nelder-Mead por arranque, pulido con un paso de Newton.
    Cada arranque usa su propio generador derivado de (seed, índice).
    """
    name = land if isinstance(land, str) else land.name
    if n_starts < 1:
        raise OutOfRange("Se necesita al menos un arranque.")
    jobs = [(name, seed, k, haar) for k in range(n_starts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(tqdm(pool.map(_run_start, jobs, chunksize=16), total=n_starts, disable=not progress, desc=name))
    else:
        records = [_run_start(job) for job in tqdm(jobs, disable=not progress, desc=name)]

    failed = sum(1 for r in records if not r.converged)
    if failed:
        logger.info("[%s] %d de %d arranques sin convergencia", name, failed, n_starts)
    best = min(r.xi_value for r in records)
    logger.info("[%s] %d arranques, mínimo Xi_2 = %.15f", name, n_starts, best)
    return sorted(records, key=lambda r: r.start_index)


def collect_minimizers(
    records: Sequence[MinimizerRecord],
    target_xi: float,
    tol: float = 1e-9,
    catalog=None,
    dedup_tol: float = DEDUP_TOL,
    snap_tol: float = SNAP_TOL,
) -> OrbitFamily:
    """
    Filtra |xi - target| <= tol, deduplica módulo fase y, si hay catálogo,
    reemplaza cada estado por su entrada exacta cuando está a menos de snap_tol.
    generator_trace marca cada estado como ("snapped" | "raw", arranque).
    """
    index = StateIndex(tol=dedup_tol)
    states, trace = [], []
    for record in records:
        if not record.converged or abs(record.xi_value - target_xi) > tol:
            continue
        _, is_new = index.add(record.state)
        if not is_new:
            continue
        entry = catalog.lookup(record.state, snap_tol) if catalog is not None else None
        if entry is not None:
            states.append(entry.state)
            trace.append(("snapped", record.start_index))
        else:
            states.append(record.state)
            trace.append(("raw", record.start_index))
    raw = sum(1 for tag, _ in trace if tag == "raw")
    if catalog is not None and raw:
        logger.warning("%d minimizadores sin correspondencia en el catálogo", raw)
    return OrbitFamily(tuple(states), generators=("multistart",), generator_trace=tuple(trace))


def certify_isolated_minimum(p: ParamPoint, land: Union[str, Landscape] = "two-qubit") -> MinimizerRecord:
    """Acepta si |grad| < 1e-8 y el menor autovalor del hessiano es > 1e-6."""
    land = landscape(land) if isinstance(land, str) else land
    state = param_to_state(p)
    x = p.as_array()
    gradient_norm = float(np.linalg.norm(central_gradient(land.objective, x)))
    eigenvalues = np.linalg.eigvalsh(finite_difference_hessian(land.objective, x))
    record = MinimizerRecord(
        point=p,
        state=state,
        xi_value=xi(2, state, land.group),
        gradient_norm=gradient_norm,
        hessian_min_eigen=float(eigenvalues.min()),
        basin=canonical_key(state),
        converged=gradient_norm < GRADIENT_ACCEPT,
    )
    if gradient_norm >= GRADIENT_ACCEPT:
        raise NotAMinimum(f"|grad| = {gradient_norm:.3e} >= {GRADIENT_ACCEPT}", record)
    if record.hessian_min_eigen <= HESSIAN_ACCEPT:
        raise NotAMinimum(f"Autovalor mínimo del hessiano {record.hessian_min_eigen:.3e} <= {HESSIAN_ACCEPT}", record)
    return record
