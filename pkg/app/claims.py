"""
Propósito: Arnés `verify-claims`. Cada afirmación es una función registrada con
@claim que calcula un valor y lo compara con su objetivo; las fallas se reportan,
no se levantan.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from app.catalog import Catalog, CatalogArtifacts, build_artifacts, catalog_from_artifacts
from app.clifford import apply_circuit, cnot, clifford_generators, single_qubit_gate
from app.entanglement import concurrence, histogram_key
from app.known_states import (
    CIRCUIT_TARGET,
    FOOTNOTE_STATE,
    MAX_MAGIC_PARAMS,
    MAX_MAGIC_SEED,
    PLUS_PLUS,
    SIC_BLOCH_POINT,
    SIC_FIDUCIAL_1Q,
)
from app.magic import (
    bloch_state,
    crossover_alpha,
    exact_xi,
    magic_difference,
    mub_bound,
    sic_bound,
    xi,
    xi2_closed_1q,
    xi2_closed_2q_params,
)
from app.optimize import ParamPoint, certify_isolated_minimum, collect_minimizers, multistart_minimize, param_to_state
from app.schemas import ClaimConfig, ClaimReport, fraction_text
from app.states import ExactState, PureState, canonical_key, equal_up_to_phase, random_state
from app.structure import split_into_sics
from app.wh_group import wh_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClaimSpec:
    claim_id: str
    description: str
    provenance: str
    extended: bool
    func: Callable[["ClaimContext"], "Outcome"]


@dataclass
class Outcome:
    """Lo que devuelve cada afirmación; el arnés decide `passed`."""

    target: Any
    computed: Any
    tolerance: float = 0.0
    comparison: str = "abs"
    exact: Optional[str] = None
    note: Optional[str] = None
    extra_ok: bool = True


_REGISTRY: Dict[str, ClaimSpec] = {}


def claim(claim_id: str, description: str, provenance: str = "PAPER", extended: bool = False):
    def decorator(func: Callable[["ClaimContext"], Outcome]):
        _REGISTRY[claim_id] = ClaimSpec(claim_id, description, provenance, extended, func)
        return func

    return decorator


def registered_claims() -> List[ClaimSpec]:
    return [_REGISTRY[k] for k in sorted(_REGISTRY)]


@dataclass
class ClaimContext:
    """Cache de artefactos compartidos entre afirmaciones."""

    config: ClaimConfig
    _records: Dict[str, list] = field(default_factory=dict)

    @cached_property
    def artifacts(self) -> CatalogArtifacts:
        return build_artifacts(self.config.seed)

    @cached_property
    def catalog(self) -> Catalog:
        return catalog_from_artifacts(self.artifacts)

    @cached_property
    def group22(self):
        return wh_group((2, 2))

    @cached_property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.config.seed)

    def records(self, name: str, n_starts: int) -> list:
        key = f"{name}:{n_starts}"
        if key not in self._records:
            self._records[key] = multistart_minimize(name, n_starts, self.config.seed, workers=self.config.workers)
        return self._records[key]


def _passes(outcome: Outcome) -> bool:
    if outcome.computed is None:
        return False
    if outcome.comparison == "exact":
        ok = outcome.computed == outcome.target
    elif outcome.comparison == "gt":
        ok = outcome.computed > outcome.target
    elif outcome.comparison == "lt":
        ok = outcome.computed < outcome.target
    else:
        ok = abs(float(outcome.computed) - float(outcome.target)) <= outcome.tolerance
    return bool(ok and outcome.extra_ok)


def _json_value(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def run_claim(spec: ClaimSpec, ctx: ClaimContext) -> ClaimReport:
    started = time.perf_counter()
    try:
        outcome = spec.func(ctx)
        passed = _passes(outcome)
        report = ClaimReport(
            claim_id=spec.claim_id,
            description=spec.description,
            target=_json_value(outcome.target),
            provenance=spec.provenance,
            computed=_json_value(outcome.computed),
            tolerance=outcome.tolerance,
            comparison=outcome.comparison,
            passed=passed,
            exact=outcome.exact,
            note=outcome.note,
        )
    except Exception as e:  # una afirmación que explota cuenta como fallida
        logger.exception("[%s] error: %s", spec.claim_id, e)
        report = ClaimReport(
            claim_id=spec.claim_id,
            description=spec.description,
            target=None,
            provenance=spec.provenance,
            passed=False,
            note=f"{type(e).__name__}: {e}",
        )
    report.runtime_ms = int((time.perf_counter() - started) * 1000)
    logger.info("[%s] %s (%d ms)", spec.claim_id, "OK" if report.passed else "FALLA", report.runtime_ms)
    return report


def verify_claims(config: Optional[ClaimConfig] = None, only: Optional[List[str]] = None) -> List[ClaimReport]:
    """Ejecuta todas las afirmaciones (las extendidas sólo si config.extended)."""
    config = config or ClaimConfig()
    ctx = ClaimContext(config)
    reports = []
    for spec in registered_claims():
        if spec.extended and not config.extended:
            continue
        if only is not None and spec.claim_id not in only:
            continue
        reports.append(run_claim(spec, ctx))
    return sorted(reports, key=lambda r: r.claim_id)


# =============================================================================
# Afirmaciones
# =============================================================================
@claim("min-xi2-two-qubit", "Mínimo global de Xi_2 para dos qubits = 7/16 (multistart + valor exacto)")
def _min_xi2_two_qubit(ctx: ClaimContext) -> Outcome:
    records = ctx.records("two-qubit", ctx.config.starts)
    best = min(records, key=lambda r: r.xi_value)
    entry = ctx.catalog.lookup(best.state, 1e-6)
    exact_value = exact_xi(2, entry.state, ctx.group22) if entry is not None and isinstance(entry.state, ExactState) else None
    return Outcome(
        target=7 / 16,
        computed=best.xi_value,
        tolerance=1e-9,
        exact=fraction_text(exact_value),
        extra_ok=exact_value == Fraction(7, 16),
    )


@claim("max-M2-two-qubit", "max M_2 = ln(16/7) = mub_bound(2, 4)")
def _max_m2(ctx: ClaimContext) -> Outcome:
    records = ctx.records("two-qubit", ctx.config.starts)
    best = min(r.xi_value for r in records)
    computed = -math.log(best)
    return Outcome(
        target=math.log(16 / 7),
        computed=computed,
        tolerance=1e-9,
        extra_ok=abs(mub_bound(2, 4) - math.log(16 / 7)) <= 4 * np.finfo(float).eps,
    )


@claim("clifford-orbit-480", "La órbita de Clifford de (i,i,i,1)/2 tiene 480 estados")
def _orbit_480(ctx: ClaimContext) -> Outcome:
    return Outcome(target=480, computed=ctx.artifacts.magic.size, comparison="exact")


@claim("stabilizer-count-60", "Hay 60 estados estabilizadores de dos qubits")
def _stab_60(ctx: ClaimContext) -> Outcome:
    return Outcome(target=60, computed=ctx.artifacts.stabilizers.size, comparison="exact")


@claim("stabilizer-zero-magic", "Todo estado estabilizador tiene Xi_2 = 1 exacto (M_2 = 0)")
def _stab_zero(ctx: ClaimContext) -> Outcome:
    count = sum(1 for s in ctx.artifacts.stabilizers.states if exact_xi(2, s, ctx.group22) == 1)
    return Outcome(target=60, computed=count, comparison="exact")


@claim("stabilizer-wh-orbits-15", "Los estabilizadores forman 15 órbitas de WH (bases)")
def _stab_15(ctx: ClaimContext) -> Outcome:
    sizes = {o.size for o in ctx.artifacts.stab_orbits}
    return Outcome(target=15, computed=len(ctx.artifacts.stab_orbits), comparison="exact", extra_ok=sizes == {4})


@claim("stabilizer-families-3", "Las 15 bases se agrupan en 3 familias de 5 MUBs")
def _stab_families(ctx: ClaimContext) -> Outcome:
    fam = ctx.artifacts.stab_families
    sizes = [len(f.bases) for f in fam.families]
    return Outcome(
        target=3,
        computed=len(fam.families),
        comparison="exact",
        extra_ok=sizes == [5, 5, 5] and all(f.certificate.passed for f in fam.families),
        note=f"particiones válidas encontradas: {fam.n_valid_partitions}",
    )


@claim("magic-wh-orbits-30", "Los 480 estados forman 30 órbitas de WH de 16")
def _magic_30(ctx: ClaimContext) -> Outcome:
    sizes = {o.size for o in ctx.artifacts.magic_orbits}
    return Outcome(target=30, computed=len(ctx.artifacts.magic_orbits), comparison="exact", extra_ok=sizes == {16})


@claim("magic-mub-fiducials", "Cada uno de los 480 estados es fiducial WH-MUB (desviación < 1e-10)")
def _magic_fiducials(ctx: ClaimContext) -> Outcome:
    return Outcome(target=1e-10, computed=ctx.artifacts.fiducial_worst, comparison="lt")


@claim("five-mub-pairing", "Cada órbita mágica se completa con una única base estabilizadora; cada base se usa 2 veces")
def _pairing(ctx: ClaimContext) -> Outcome:
    pairing = ctx.artifacts.pairing
    return Outcome(
        target=30,
        computed=len(pairing.families),
        comparison="exact",
        extra_ok=set(pairing.multiplicity.values()) == {2} and len(pairing.multiplicity) == 15,
    )


@claim("concurrence-stabilizer", "Órbitas estabilizadoras: 9 con Delta = 0 y 6 con Delta = 1")
def _conc_stab(ctx: ClaimContext) -> Outcome:
    return Outcome(target={"0": 9, "1": 6}, computed=ctx.artifacts.stab_profile.histogram, comparison="exact")


@claim("concurrence-magic", "Órbitas mágicas: Delta en {1/2, 1/sqrt 2} con 12 / 18 órbitas", provenance="DERIVED")
def _conc_magic(ctx: ClaimContext) -> Outcome:
    target = {histogram_key(0.5): 12, histogram_key(1 / math.sqrt(2)): 18}
    return Outcome(target=target, computed=ctx.artifacts.magic_profile.histogram, comparison="exact")


@claim("concurrence-pairing-rule", "Emparejada con base producto -> 1/sqrt 2; con base entrelazada -> 1/2")
def _conc_rule(ctx: ClaimContext) -> Outcome:
    art = ctx.artifacts
    mismatches = 0
    for magic_id, stab_id in art.pairing.pairings:
        stab_value = art.stab_profile.value_of(stab_id)
        expected = 1 / math.sqrt(2) if stab_value < 0.5 else 0.5
        if abs(art.magic_profile.value_of(magic_id) - expected) > 1e-10:
            mismatches += 1
    return Outcome(target=0, computed=mismatches, comparison="exact")


@claim("max-concurrence-magic", "Ningún estado de magia máxima está maximalmente entrelazado (max Delta = 1/sqrt 2)")
def _max_conc(ctx: ClaimContext) -> Outcome:
    top = max(concurrence(s).value for s in ctx.artifacts.magic.states)
    return Outcome(target=1 / math.sqrt(2), computed=top, tolerance=1e-12)


@claim("gradient-max-magic-point", "Gradiente de Xi_2 nulo en theta = pi/4, phi = pi/2")
def _gradient(ctx: ClaimContext) -> Outcome:
    record = certify_isolated_minimum(ParamPoint(*MAX_MAGIC_PARAMS))
    return Outcome(target=1e-9, computed=record.gradient_norm, comparison="lt")


@claim("hessian-max-magic-point", "Hessiano definido positivo en theta = pi/4, phi = pi/2")
def _hessian(ctx: ClaimContext) -> Outcome:
    record = certify_isolated_minimum(ParamPoint(*MAX_MAGIC_PARAMS))
    return Outcome(target=1e-6, computed=record.hessian_min_eigen, comparison="gt")


@claim("circuit-fig1", "(1 ⊗ T) CNOT_01 (T ⊗ T) lleva (1,1,1,1)/2 a (1,i,i,i)/2")
def _circuit(ctx: ClaimContext) -> Outcome:
    gates = [single_qubit_gate("T", 0, 2), single_qubit_gate("T", 1, 2), cnot(0, 1, 2), single_qubit_gate("T", 1, 2)]
    out = apply_circuit(PLUS_PLUS.to_pure(), gates)
    target = CIRCUIT_TARGET.to_pure()
    overlap = abs(np.vdot(target.amplitudes, out.amplitudes))
    return Outcome(target=1.0, computed=float(overlap), tolerance=1e-12, extra_ok=equal_up_to_phase(out, target, 1e-12))


@claim("min-xi2-one-qubit", "Mínimo de Xi_2 de un qubit = 2/3 con 8 minimizadores")
def _one_qubit(ctx: ClaimContext) -> Outcome:
    records = ctx.records("one-qubit", ctx.config.one_qubit_starts)
    best = min(r.xi_value for r in records)
    found = collect_minimizers(records, 2 / 3)
    return Outcome(
        target=2 / 3,
        computed=best,
        tolerance=1e-9,
        extra_ok=found.size == 8,
        note=f"minimizadores distintos: {found.size}",
    )


@claim("sic-one-qubit", "Los 8 minimizadores de un qubit forman 2 SICs de 4")
def _sic_one_qubit(ctx: ClaimContext) -> Outcome:
    found = collect_minimizers(ctx.records("one-qubit", ctx.config.one_qubit_starts), 2 / 3)
    sics = split_into_sics(found.states, wh_group((2,)), match_tol=1e-7)
    worst = max((s.certificate.worst_deviation for s in sics), default=math.inf)
    return Outcome(target=2, computed=len(sics), comparison="exact", extra_ok=worst <= 1e-9 and all(s.certificate.passed for s in sics))


@claim("bloch-point-sic-fiducial", "El punto de Bloch que minimiza Xi_2 da el fiducial SIC", provenance="PAPER")
def _bloch_point(ctx: ClaimContext) -> Outcome:
    psi = bloch_state(*SIC_BLOCH_POINT)
    overlap = abs(np.vdot(SIC_FIDUCIAL_1Q.amplitudes, psi.amplitudes))
    return Outcome(target=1.0, computed=float(overlap), tolerance=1e-12, extra_ok=abs(xi(2, psi, wh_group((2,))) - 2 / 3) <= 1e-12)


@claim("min-xi2-qudit", "Mínimo de Xi_2 para un qudit d = 4 = 2/5")
def _qudit(ctx: ClaimContext) -> Outcome:
    records = ctx.records("qudit", ctx.config.qudit_starts)
    return Outcome(target=2 / 5, computed=min(r.xi_value for r in records), tolerance=1e-9)


@claim("qudit-256-sics", "El barrido del qudit d = 4 encuentra 256 fiduciales en 16 SICs de 16", extended=True)
def _qudit_256(ctx: ClaimContext) -> Outcome:
    found = collect_minimizers(ctx.records("qudit", ctx.config.extended_starts), 2 / 5)
    sics = split_into_sics(found.states, wh_group((4,)), match_tol=1e-7)
    return Outcome(
        target=256,
        computed=found.size,
        comparison="exact",
        extra_ok=len(sics) == 16 and all(s.certificate.passed and len(s.states) == 16 for s in sics),
        note=f"SICs certificados: {sum(s.certificate.passed for s in sics)} de {len(sics)}",
    )


@claim("bound-ordering", "mub_bound(alpha, 4) < sic_bound(alpha, 4) para alpha en {1.5, 2, 3, 5}")
def _bounds(ctx: ClaimContext) -> Outcome:
    gaps = [sic_bound(a, 4) - mub_bound(a, 4) for a in (1.5, 2, 3, 5)]
    return Outcome(target=0.0, computed=min(gaps), comparison="gt")


@claim("sic-bound-2-4", "sic_bound(2, 4) = ln(5/2)")
def _sic_bound(ctx: ClaimContext) -> Outcome:
    return Outcome(target=math.log(5 / 2), computed=sic_bound(2, 4), tolerance=4 * np.finfo(float).eps)


@claim("footnote-crossover", "M_alpha(nota) - M_alpha(magia máxima): > 0 en 1/2, < 0 en 2, un cruce en [1.4, 1.9]")
def _crossover(ctx: ClaimContext) -> Outcome:
    group = ctx.group22
    reference = MAX_MAGIC_SEED.to_pure()
    at_half = magic_difference(0.5, FOOTNOTE_STATE, reference, group)
    at_two = magic_difference(2.0, FOOTNOTE_STATE, reference, group)
    grid = np.linspace(1.4, 1.9, 51)
    signs = np.sign([magic_difference(a, FOOTNOTE_STATE, reference, group) for a in grid])
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    estimate = crossover_alpha(FOOTNOTE_STATE, reference, group) if changes == 1 else None
    return Outcome(
        target=1,
        computed=changes,
        comparison="exact",
        extra_ok=at_half > 0 and at_two < 0,
        note=None if estimate is None else f"cruce estimado en alpha = {estimate:.6f}",
    )


# -------- Propiedades --------
@claim("purity-sum-rule", "(1/D) sum |<O>|^2 = 1 para estados aleatorios", provenance="TRIVIAL")
def _purity(ctx: ClaimContext) -> Outcome:
    worst = max(abs(xi(1, random_state(4, ctx.rng), ctx.group22) - 1.0) for _ in range(100))
    return Outcome(target=0.0, computed=worst, tolerance=1e-12)


@claim("clifford-invariance-xi2", "Xi_2 es invariante bajo los generadores de Clifford", provenance="TRIVIAL")
def _clifford_invariance(ctx: ClaimContext) -> Outcome:
    gens = clifford_generators(2)
    worst = 0.0
    for _ in range(100):
        psi = random_state(4, ctx.rng)
        base = xi(2, psi, ctx.group22)
        worst = max(worst, max(abs(xi(2, g.apply(psi), ctx.group22) - base) for g in gens))
    return Outcome(target=0.0, computed=worst, tolerance=1e-12)


@claim("wh-invariance-concurrence", "La concurrencia es invariante bajo W(2)⊗W(2)", provenance="PAPER")
def _wh_concurrence(ctx: ClaimContext) -> Outcome:
    worst = 0.0
    for _ in range(100):
        psi = random_state(4, ctx.rng)
        base = concurrence(psi).value
        worst = max(worst, max(abs(concurrence(op.apply(psi)).value - base) for op in ctx.group22))
    return Outcome(target=0.0, computed=worst, tolerance=1e-12)


@claim("closed-form-equivalence", "Las formas cerradas de Xi_2 (1 y 2 qubits) coinciden con la suma directa en 1000 puntos", provenance="TRIVIAL")
def _closed_form(ctx: ClaimContext) -> Outcome:
    one_qubit = wh_group((2,))
    worst = 0.0
    for _ in range(1000):
        theta, phi = ctx.rng.uniform(0, math.pi), ctx.rng.uniform(0, 2 * math.pi)
        worst = max(worst, abs(xi2_closed_1q(theta, phi) - xi(2, bloch_state(theta, phi), one_qubit)))
        x = np.concatenate([ctx.rng.uniform(0, math.pi / 2, 3), ctx.rng.uniform(0, 2 * math.pi, 3)])
        point = ParamPoint.from_array(x)
        worst = max(worst, abs(xi2_closed_2q_params(x) - xi(2, param_to_state(point), ctx.group22)))
    return Outcome(target=0.0, computed=worst, tolerance=1e-11)


@claim("canonical-key-phase-invariance", "La clave canónica no depende de la fase global", provenance="TRIVIAL")
def _phase_invariance(ctx: ClaimContext) -> Outcome:
    mismatches = 0
    for _ in range(1000):
        psi = random_state(4, ctx.rng)
        phase = np.exp(1j * ctx.rng.uniform(0, 2 * math.pi))
        if canonical_key(psi) != canonical_key(PureState(phase * psi.amplitudes)):
            mismatches += 1
    return Outcome(target=0, computed=mismatches, comparison="exact")


def summarize(reports: List[ClaimReport]) -> Tuple[int, int]:
    passed = sum(1 for r in reports if r.passed)
    return passed, len(reports) - passed
