"""
Propósito: Línea de comandos `magiclab` (typer). Los resultados van a stdout
(tablas rich o JSON con --json); los logs van a stderr.

Códigos de salida: 0 éxito, 1 error de dominio o afirmación fallida, 2 uso incorrecto.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
import orjson
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app.catalog import build_artifacts, build_catalog, load_catalog
from app.clifford import apply_circuit, clifford_generators, clifford_orbit, load_circuit
from app.config import (
    CATALOG_DIR,
    DEFAULT_SEED,
    DEFAULT_TOL,
    LOG_LEVEL,
    TWO_QUBIT_STARTS,
    WORKERS,
    configure_logging,
)
from app.entanglement import concurrence, orbit_concurrence_profile
from app.errors import MagicLabError, UnsupportedArity
from app.magic import sre
from app.optimize import collect_minimizers, multistart_minimize
from app.schemas import (
    ClaimConfig,
    StateFile,
    dumps,
    fraction_text,
    load_state,
    orbit_payload,
    states_payload,
    wh_orbit_payload,
)
from app.structure import assemble_five_mub_families, group_stabilizer_bases_into_families
from app.wh_group import factor_dims_for, wh_group, wh_orbit

logger = logging.getLogger(__name__)
console = Console()

app = typer.Typer(
    name="magiclab",
    help="Magia (SRE), órbitas de Clifford, MUBs y SICs para qubits y qudits.",
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)
catalog_app = typer.Typer(help="Construcción y consulta del catálogo de estados.", no_args_is_help=True)
app.add_typer(catalog_app, name="catalog")


class SearchMode(str, Enum):
    one_qubit = "one-qubit"
    two_qubit = "two-qubit"
    qudit = "qudit"


class GateSet(str, Enum):
    clifford = "clifford"


_MODE_DIMS = {SearchMode.one_qubit: 2, SearchMode.two_qubit: 4, SearchMode.qudit: 4}


@dataclass
class CliState:
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    json: bool = False
    out: Optional[Path] = None
    progress: bool = False


@dataclass(frozen=True)
class ParsedCommand:
    command: str
    params: Dict[str, Any]


# -------- Utilidades --------
def _num(x: float) -> str:
    return f"{x:.17g}"


def _state(ctx: typer.Context) -> CliState:
    return ctx.find_object(CliState) or CliState()


def _emit(ctx: typer.Context, payload: Any, render: Optional[Callable[[], None]] = None, out: Optional[Path] = None) -> None:
    state = _state(ctx)
    target = out or state.out
    if target is not None:
        Path(target).write_bytes(dumps(payload))
        logger.info("Resultado escrito en %s", target)
    if state.json or render is None:
        typer.echo(dumps(payload).decode())
    else:
        render()


def _factors(dim: int, factors: Optional[str]) -> Tuple[int, ...]:
    """'2,2' -> (2, 2)."""
    return factor_dims_for(dim, [int(f) for f in factors.split(",")] if factors else None)


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if 2 ** n != dim or n not in (1, 2):
        raise UnsupportedArity(f"Dimensión {dim}: sólo 1 o 2 qubits.")
    return n


def _key_value_table(title: str, rows: Sequence[Tuple[str, Any]]) -> Callable[[], None]:
    def render() -> None:
        table = Table(title=title)
        table.add_column("Campo", style="bold")
        table.add_column("Valor")
        for key, value in rows:
            table.add_row(key, _num(value) if isinstance(value, float) else str(value))
        console.print(table)

    return render


_existing_file = dict(exists=True, dir_okay=False, readable=True)


# -------- Opciones globales --------
@app.callback()
def main_callback(
    ctx: typer.Context,
    seed: int = typer.Option(DEFAULT_SEED, "--seed", help="Semilla de los generadores aleatorios."),
    tol: float = typer.Option(DEFAULT_TOL, "--tol", help="Tolerancia de comparación."),
    json_output: bool = typer.Option(False, "--json", help="Salida JSON en stdout."),
    out: Optional[Path] = typer.Option(None, "--out", help="Escribe el resultado JSON en este archivo."),
    progress: bool = typer.Option(False, "--progress", help="Barras de progreso en los barridos."),
    log_level: str = typer.Option(LOG_LEVEL, "--log-level", help="Nivel de log (DEBUG, INFO, ...)."),
):
    configure_logging(log_level.upper())
    ctx.obj = CliState(seed=seed, tol=tol, json=json_output, out=out, progress=progress)


# -------- Comandos --------
@app.command("sre")
def sre_command(
    ctx: typer.Context,
    state_file: Path = typer.Option(..., "--state", help="Archivo JSON del estado.", **_existing_file),
    alpha: float = typer.Option(2.0, "--alpha", help="Orden de Rényi (alpha > 0, alpha != 1)."),
    exact: bool = typer.Option(False, "--exact", help="Aritmética exacta (alpha entero, estado gaussiano)."),
    factors: Optional[str] = typer.Option(None, "--factors", help="Factores tensoriales, p. ej. '2,2' o '4'."),
):
    """M_alpha y Xi_alpha de un estado."""
    psi = load_state(state_file)
    value = sre(alpha, psi, wh_group(_factors(psi.dim, factors)), exact=exact)
    payload = {"alpha": alpha, "xi": value.xi, "m": value.m, "xi_exact": fraction_text(value.exact_xi)}
    _emit(ctx, payload, _key_value_table("SRE", [("alpha", alpha), ("Xi", value.xi_text), ("M", value.m)]))


@app.command("search")
def search_command(
    ctx: typer.Context,
    mode: SearchMode = typer.Option(SearchMode.two_qubit, "--mode", help="Paisaje a minimizar."),
    dim: int = typer.Option(4, "--dim", help="Dimensión total del estado."),
    starts: int = typer.Option(TWO_QUBIT_STARTS, "--starts", min=1, help="Número de arranques."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semilla (por defecto la global)."),
    out: Optional[Path] = typer.Option(None, "--out", help="Archivo de salida JSON."),
    workers: int = typer.Option(WORKERS, "--workers", min=1, help="Procesos en paralelo."),
    haar: bool = typer.Option(False, "--haar", help="Arranques Haar en lugar de uniformes en la caja."),
    catalog_dir: Optional[Path] = typer.Option(None, "--catalog", help="Catálogo para ajustar a estados exactos."),
):
    """Minimización multistart de Xi_2."""
    if _MODE_DIMS[mode] != dim:
        raise typer.BadParameter(f"El modo {mode.value} requiere --dim {_MODE_DIMS[mode]}.", param_hint="--dim")
    state = _state(ctx)
    seed = state.seed if seed is None else seed
    records = multistart_minimize(mode.value, starts, seed, workers=workers, haar=haar, progress=state.progress)
    global_min = min(r.xi_value for r in records)
    catalog = load_catalog(catalog_dir) if catalog_dir is not None else None
    found = collect_minimizers(records, global_min, tol=state.tol, catalog=catalog)
    payload = {
        "global_min": global_min,
        "n_distinct_minimizers": found.size,
        "non_converged": sum(1 for r in records if not r.converged),
        "snapped": sum(1 for tag, _ in found.generator_trace if tag == "snapped"),
        "states": states_payload(found.states),
    }
    rows = [("modo", mode.value), ("arranques", starts), ("semilla", seed), ("mínimo Xi_2", global_min),
            ("minimizadores distintos", found.size), ("sin convergencia", payload["non_converged"])]
    _emit(ctx, payload, _key_value_table("Búsqueda multistart", rows), out)


@app.command("orbit")
def orbit_command(
    ctx: typer.Context,
    seed_file: Path = typer.Option(..., "--seed", help="Estado semilla (JSON).", **_existing_file),
    gates: GateSet = typer.Option(GateSet.clifford, "--gates", help="Conjunto de generadores."),
    out: Optional[Path] = typer.Option(None, "--out", help="Archivo de salida JSON."),
):
    """Órbita de Clifford (BFS) de un estado de 1 o 2 qubits."""
    psi = load_state(seed_file)
    orbit = clifford_orbit(psi, clifford_generators(_n_qubits(psi.dim)))
    _emit(ctx, orbit_payload(orbit), _key_value_table("Órbita de Clifford", [("estados", orbit.size), ("generadores", ", ".join(orbit.generators))]), out)


@app.command("wh-orbit")
def wh_orbit_command(
    ctx: typer.Context,
    state_file: Path = typer.Option(..., "--state", help="Archivo JSON del estado.", **_existing_file),
    factors: Optional[str] = typer.Option(None, "--factors", help="Factores tensoriales, p. ej. '2,2' o '4'."),
    out: Optional[Path] = typer.Option(None, "--out", help="Archivo de salida JSON."),
):
    """Órbita de un estado bajo el grupo de Weyl-Heisenberg."""
    psi = load_state(state_file)
    orbit = wh_orbit(psi, wh_group(_factors(psi.dim, factors)))
    _emit(ctx, wh_orbit_payload(orbit), _key_value_table("Órbita de WH", [("estados", orbit.size)]), out)


@app.command("circuit")
def circuit_command(
    ctx: typer.Context,
    state_file: Path = typer.Option(..., "--state", help="Estado de entrada (JSON).", **_existing_file),
    circuit_file: Path = typer.Option(..., "--circuit", help="Circuito (lista JSON de compuertas).", **_existing_file),
    out: Optional[Path] = typer.Option(None, "--out", help="Archivo de salida JSON."),
):
    """Aplica un circuito Clifford+T a un estado."""
    psi = load_state(state_file)
    gates = load_circuit(circuit_file, _n_qubits(psi.dim))
    result = apply_circuit(psi, gates)
    value = sre(2, result, wh_group(_factors(result.dim, None)))
    payload = {"gates": [g.name for g in gates], "state": StateFile.from_state(result).model_dump(exclude_none=True, exclude={"renormalize"}), "m2": value.m}
    _emit(ctx, payload, _key_value_table("Circuito", [("compuertas", " ".join(payload["gates"])), ("M_2 final", value.m)]), out)


@app.command("structure")
def structure_command(
    ctx: typer.Context,
    catalog_dir: Optional[Path] = typer.Option(None, "--catalog", help="Directorio del catálogo (si no, se genera en memoria)."),
    report: Optional[Path] = typer.Option(None, "--report", help="Archivo JSON con la tabla de asociaciones."),
):
    """Órbitas, emparejamientos 5-MUB y familias estabilizadoras."""
    if catalog_dir is not None:
        catalog = load_catalog(catalog_dir)
        stab_orbits, magic_orbits = catalog.orbits("stabilizer"), catalog.orbits("magic2q")
        pairing = assemble_five_mub_families(stab_orbits, magic_orbits)
        families = group_stabilizer_bases_into_families(stab_orbits)
    else:
        art = build_artifacts(_state(ctx).seed)
        stab_orbits, magic_orbits, pairing, families = art.stab_orbits, art.magic_orbits, art.pairing, art.stab_families
    payload = {
        "stab_orbits": len(stab_orbits),
        "magic_orbits": len(magic_orbits),
        "pairings": [{"magic_orbit": m, "stab_orbit": s} for m, s in pairing.pairings],
        "families_of_5": len(pairing.families),
        "stab_families_of_5": len(families.families),
        "stab_families": [list(f.members) for f in families.families],
        "n_valid_partitions": families.n_valid_partitions,
    }
    rows = [(k, payload[k]) for k in ("stab_orbits", "magic_orbits", "families_of_5", "stab_families_of_5", "n_valid_partitions")]
    _emit(ctx, payload, _key_value_table("Estructura MUB", rows), report)


@app.command("concurrence")
def concurrence_command(
    ctx: typer.Context,
    state_file: Optional[Path] = typer.Option(None, "--state", help="Estado de dos qubits (JSON).", **_existing_file),
    catalog_dir: Optional[Path] = typer.Option(None, "--catalog", help="Perfil por órbitas del catálogo."),
):
    """Concurrencia de un estado o perfil de concurrencia por órbitas."""
    if (state_file is None) == (catalog_dir is None):
        raise typer.BadParameter("Usa exactamente una de --state o --catalog.")
    if state_file is not None:
        value = concurrence(load_state(state_file))
        payload = {"value": value.value, "value_squared": value.value_squared}
        sq = "-" if value.value_squared is None else str(value.value_squared)
        _emit(ctx, payload, _key_value_table("Concurrencia", [("Delta", value.value), ("Delta^2", sq)]))
        return
    catalog = load_catalog(catalog_dir)
    profiles = {kind: orbit_concurrence_profile(catalog.orbits(kind)) for kind in ("stabilizer", "magic2q")}
    payload = {kind: p.as_dict() for kind, p in profiles.items()}

    def render() -> None:
        table = Table(title="Perfil de concurrencia")
        for column in ("Tipo", "Delta", "Órbitas", "Delta^2"):
            table.add_column(column)
        for kind, profile in profiles.items():
            for key, count in profile.histogram.items():
                table.add_row(kind, key, str(count), str(profile.exact.get(key) or "-"))
        console.print(table)

    _emit(ctx, payload, render)


@catalog_app.command("build")
def catalog_build_command(
    ctx: typer.Context,
    out_dir: Path = typer.Option(Path(CATALOG_DIR), "--out-dir", help="Directorio de salida."),
    qudit: bool = typer.Option(False, "--qudit", help="Incluye el barrido de fiduciales SIC d = 4."),
    qudit_starts: int = typer.Option(20000, "--qudit-starts", min=1),
    workers: int = typer.Option(WORKERS, "--workers", min=1),
):
    """Regenera el catálogo y lo escribe como JSON-lines."""
    catalog = build_catalog(_state(ctx).seed, out_dir, include_qudit=qudit, qudit_starts=qudit_starts, workers=workers)
    counts = catalog.manifest["counts"]
    _emit(ctx, catalog.manifest, _key_value_table(f"Catálogo en {out_dir}", sorted(counts.items())))


@catalog_app.command("lookup")
def catalog_lookup_command(
    ctx: typer.Context,
    state_file: Path = typer.Option(..., "--state", help="Estado a buscar (JSON).", **_existing_file),
    catalog_dir: Path = typer.Option(Path(CATALOG_DIR), "--catalog", help="Directorio del catálogo."),
    tol: Optional[float] = typer.Option(None, "--tol", help="Tolerancia del vecino más cercano."),
):
    """Busca un estado en el catálogo."""
    catalog = load_catalog(catalog_dir)
    entry = catalog.lookup(load_state(state_file), _state(ctx).tol if tol is None else tol)
    if entry is None:
        _emit(ctx, {"found": False})
        raise typer.Exit(code=1)
    record = entry.to_record().model_dump(exclude_none=True)
    record["found"] = True
    rows = [("tipo", entry.kind), ("órbita", entry.orbit_id), ("familia", entry.family_id), ("Xi_2", str(entry.xi2))]
    _emit(ctx, record, _key_value_table("Entrada del catálogo", rows))


@app.command("verify-claims")
def verify_claims_command(
    ctx: typer.Context,
    extended: bool = typer.Option(False, "--extended", help="Incluye el barrido de 256 fiduciales d = 4."),
    starts: int = typer.Option(TWO_QUBIT_STARTS, "--starts", min=1, help="Arranques de la búsqueda de dos qubits."),
    qudit_starts: int = typer.Option(300, "--qudit-starts", min=1),
    workers: int = typer.Option(WORKERS, "--workers", min=1),
    only: Optional[List[str]] = typer.Option(None, "--only", help="Ejecuta sólo estas afirmaciones."),
):
    """Reejecuta todas las afirmaciones y emite la tabla de ClaimReports."""
    from app.claims import summarize, verify_claims

    state = _state(ctx)
    config = ClaimConfig(seed=state.seed, starts=starts, qudit_starts=qudit_starts, extended=extended, workers=workers)
    reports = verify_claims(config, only=only or None)
    passed, failed = summarize(reports)

    def render() -> None:
        table = Table(title=f"Afirmaciones: {passed} OK, {failed} fallidas")
        for column in ("Id", "Objetivo", "Calculado", "Tol.", "Estado", "ms"):
            table.add_column(column)
        for r in reports:
            computed = _num(r.computed) if isinstance(r.computed, float) else str(r.computed)
            target = _num(r.target) if isinstance(r.target, float) else str(r.target)
            status = "[green]OK[/green]" if r.passed else "[red]FALLA[/red]"
            table.add_row(r.claim_id, target, computed, f"{r.tolerance:g}", status, str(r.runtime_ms))
        console.print(table)

    _emit(ctx, [r.model_dump() for r in reports], render)
    if failed:
        raise typer.Exit(code=1)


# -------- Puntos de entrada --------
def parse_args(argv: Sequence[str]) -> ParsedCommand:
    """Resuelve subcomando y parámetros sin ejecutar nada; uso incorrecto -> click.UsageError."""
    group = typer.main.get_command(app)
    ctx = group.make_context("magiclab", list(argv))
    params = dict(ctx.params)
    names: List[str] = []
    command, rest = group, ctx.protected_args + ctx.args
    while isinstance(command, click.Group):
        if not rest:
            raise click.UsageError("Falta el subcomando.", ctx=ctx)
        name, command, rest = command.resolve_command(ctx, rest)
        names.append(name)
        ctx = command.make_context(name, rest, parent=ctx)
        # un --seed del subcomando sin valor no pisa al global
        params.update({k: v for k, v in ctx.params.items() if v is not None or k not in params})
        rest = ctx.protected_args + ctx.args if isinstance(command, click.Group) else []
    return ParsedCommand(" ".join(names), params)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = app(args=args, prog_name="magiclab", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    except MagicLabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 1
    except (ValidationError, orjson.JSONDecodeError) as e:
        logger.error("Entrada inválida: %s", e)
        return 1
    return result if isinstance(result, int) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
