"""
Propósito: API HTTP sobre la librería: SRE y concurrencia de estados enviados en el
cuerpo, y consulta del catálogo precalculado (cargado al iniciar).
"""

import logging
from typing import List, Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from app.catalog import Catalog, load_catalog
from app.config import CATALOG_DIR, DEFAULT_TOL
from app.entanglement import concurrence
from app.errors import CatalogMissing, MagicLabError
from app.magic import sre
from app.schemas import CatalogRecord, StateFile, fraction_text
from app.wh_group import factor_dims_for, wh_group

logger = logging.getLogger(__name__)

catalog_main: Optional[Catalog] = None


# -------- Modelos de Entrada/Salida --------
class SreRequest(BaseModel):
    state: StateFile
    alpha: float = Field(2.0, gt=0)
    exact: bool = False
    factors: Optional[List[int]] = None


class SreResponse(BaseModel):
    alpha: float
    xi: float
    m: float
    xi_exact: Optional[str] = None


class StateRequest(BaseModel):
    state: StateFile


class ConcurrenceResponse(BaseModel):
    value: float
    value_squared: Optional[str] = None


class LookupRequest(BaseModel):
    state: StateFile
    tol: float = Field(DEFAULT_TOL, gt=0)


# -------- Inicialización de la API --------
app = FastAPI(
    title="API magiclab",
    description="Magia de estabilizadores (SRE), concurrencia y catálogo de estados de magia máxima.",
    version="0.1.0",
)


@app.on_event("startup")
async def startup_event():
    """Carga el catálogo desde CATALOG_DIR si existe."""
    global catalog_main
    try:
        catalog_main = load_catalog(CATALOG_DIR)
        logger.info("Catálogo cargado desde '%s': %s", CATALOG_DIR, catalog_main.counts())
    except CatalogMissing as e:
        logger.warning("%s", e)
        catalog_main = None


@app.exception_handler(MagicLabError)
async def domain_error_handler(request: Request, exc: MagicLabError):
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})


# -------- Endpoints --------
@app.post("/sre", response_model=SreResponse, tags=["Magia"])
async def compute_sre(request: SreRequest):
    """M_alpha y Xi_alpha del estado enviado."""
    psi = request.state.to_state()
    group = wh_group(factor_dims_for(psi.dim, request.factors))
    value = sre(request.alpha, psi, group, exact=request.exact)
    return SreResponse(
        alpha=value.alpha,
        xi=value.xi,
        m=value.m,
        xi_exact=fraction_text(value.exact_xi),
    )


@app.post("/concurrence", response_model=ConcurrenceResponse, tags=["Entrelazamiento"])
async def compute_concurrence(request: StateRequest):
    """Concurrencia de un estado de dos qubits."""
    value = concurrence(request.state.to_state())
    squared = None if value.value_squared is None else str(value.value_squared)
    return ConcurrenceResponse(value=value.value, value_squared=squared)


@app.post("/catalog/lookup", response_model=CatalogRecord, response_model_exclude_none=True, tags=["Catálogo"])
async def catalog_lookup(request: LookupRequest):
    """Busca el estado en el catálogo (clave canónica o vecino más cercano)."""
    if catalog_main is None:
        raise HTTPException(status_code=503, detail="Catálogo no disponible.")
    entry = catalog_main.lookup(request.state.to_state(), request.tol)
    if entry is None:
        raise HTTPException(status_code=404, detail="El estado no está en el catálogo.")
    return entry.to_record()


@app.get("/status", tags=["Utilidad"])
async def get_status():
    """Estado general del servicio y del catálogo."""
    return {
        "status": "ok",
        "catalog_dir": CATALOG_DIR,
        "catalog_status": "cargado" if catalog_main is not None else "no disponible",
        "catalog_counts": catalog_main.counts() if catalog_main is not None else {},
    }


# --- Para ejecutar manualmente con uvicorn ---
# uvicorn app.main:app --reload
