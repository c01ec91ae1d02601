"""
Propósito: Configuración global leída desde variables de entorno (y un .env opcional).
"""

import os
import logging
from dotenv import load_dotenv

# Cargar configuración del entorno
load_dotenv()

DEFAULT_SEED = int(os.getenv("MAGICLAB_SEED", 42))
DEFAULT_TOL = float(os.getenv("MAGICLAB_TOL", 1e-9))
CATALOG_DIR = os.getenv("MAGICLAB_CATALOG_DIR", "catalog")
ORBIT_CAP = int(os.getenv("MAGICLAB_ORBIT_CAP", 1_000_000))
WORKERS = int(os.getenv("MAGICLAB_WORKERS", 1))
TWO_QUBIT_STARTS = int(os.getenv("MAGICLAB_TWO_QUBIT_STARTS", 2000))
LOG_LEVEL = os.getenv("MAGICLAB_LOG_LEVEL", "INFO").upper()

CATALOG_VERSION = "1"


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Instala un RichHandler en stderr; stdout queda libre para el JSON de salida."""
    from rich.console import Console
    from rich.logging import RichHandler

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )
