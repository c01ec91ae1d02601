"""
Propósito: Genera el catálogo de estados (estabilizadores, órbita de magia máxima,
SICs) en CATALOG_DIR. Si ya existe, pide confirmación antes de sobrescribirlo.

Uso: python scripts/build_catalog.py [--yes] [--qudit] [--out-dir DIR]
"""

import logging
import os
import sys
import time

import inquirer
import typer

# Permite importar módulos desde la raíz del proyecto
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from app.catalog import MANIFEST_FILE, build_catalog
from app.config import CATALOG_DIR, DEFAULT_SEED, WORKERS, configure_logging
from app.errors import MagicLabError

logger = logging.getLogger("build_catalog")


def confirm_overwrite(out_dir: str) -> bool:
    """Pregunta si se sobrescribe un catálogo existente."""
    questions = [
        inquirer.Confirm(
            'overwrite',
            message=f"Ya existe un catálogo en '{out_dir}'. ¿Deseas regenerarlo? (se sobrescribirán los archivos)",
            default=False
        )
    ]
    answers = inquirer.prompt(questions)
    return bool(answers and answers['overwrite'])


def main(
    out_dir: str = typer.Option(CATALOG_DIR, "--out-dir", help="Directorio de salida."),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    qudit: bool = typer.Option(False, "--qudit", help="Incluye los fiduciales SIC d = 4 (lento)."),
    qudit_starts: int = typer.Option(20000, "--qudit-starts", min=1),
    workers: int = typer.Option(WORKERS, "--workers", min=1),
    yes: bool = typer.Option(False, "--yes", help="No pedir confirmación."),
):
    """Genera el catálogo de estados de magiclab."""

    configure_logging()
    if os.path.exists(os.path.join(out_dir, MANIFEST_FILE)) and not yes:
        if not confirm_overwrite(out_dir):
            logger.info("Operación cancelada; el catálogo existente no se modificó.")
            raise typer.Exit(code=0)

    start_time = time.time()
    try:
        catalog = build_catalog(seed, out_dir, qudit, qudit_starts, workers)
    except MagicLabError as e:
        logger.error("No se pudo construir el catálogo: %s", e)
        raise typer.Exit(code=1)

    # --- Resumen Final ---
    manifest = catalog.manifest
    logger.info("--- Resumen del catálogo ---")
    for kind, count in manifest["counts"].items():
        logger.info("  %s: %d estados en %d órbitas", kind, count, manifest["orbit_counts"].get(kind, 0))
    logger.info("Familias estabilizadoras: %s (particiones válidas: %d)",
                manifest["stab_families"], manifest["n_valid_partitions"])
    logger.info("Tiempo total: %.2f segundos", time.time() - start_time)


if __name__ == "__main__":
    typer.run(main)
