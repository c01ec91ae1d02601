"""
Propósito: Modelos pydantic de entrada/salida (archivos de estado, circuitos,
registros del catálogo y reportes de afirmaciones) y su (de)serialización con orjson.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Any, List, Literal, Optional, Sequence, Union

import numpy as np
import orjson
from pydantic import BaseModel, Field, model_validator

from app.states import ExactState, OrbitFamily, PureState, normalize

JSON_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SORT_KEYS


# -------- Estados --------
class StateFile(BaseModel):
    """
    Estado en disco. `amplitudes` son pares [re, im]; si vienen
    `gaussian_numerators` y `denominator` el estado es exacto.
    """

    dim: int = Field(..., ge=1)
    amplitudes: Optional[List[List[float]]] = None
    gaussian_numerators: Optional[List[List[int]]] = None
    denominator: Optional[int] = Field(None, ge=1)
    renormalize: bool = False

    @model_validator(mode="after")
    def _check_payload(self):
        if self.gaussian_numerators is not None:
            if self.denominator is None:
                raise ValueError("'gaussian_numerators' requiere 'denominator'.")
            if len(self.gaussian_numerators) != self.dim:
                raise ValueError("Cantidad de numeradores distinta de 'dim'.")
        elif self.amplitudes is None:
            raise ValueError("Se requiere 'amplitudes' o 'gaussian_numerators'.")
        elif len(self.amplitudes) != self.dim:
            raise ValueError("Cantidad de amplitudes distinta de 'dim'.")
        return self

    def to_state(self) -> Union[PureState, ExactState]:
        if self.gaussian_numerators is not None:
            return ExactState.from_pairs(self.gaussian_numerators, self.denominator)
        amps = np.array([complex(re, im) for re, im in self.amplitudes])
        return normalize(amps) if self.renormalize else PureState(amps)

    @classmethod
    def from_state(cls, state) -> "StateFile":
        if isinstance(state, ExactState):
            return cls(
                dim=state.dim,
                gaussian_numerators=state.gaussian_pairs,
                denominator=state.denominator,
                amplitudes=_pairs(state.to_pure()),
            )
        return cls(dim=state.dim, amplitudes=_pairs(state))


def _pairs(psi: PureState) -> List[List[float]]:
    return [[float(c.real), float(c.imag)] for c in psi.amplitudes]


def load_state(path: Union[str, Path]) -> Union[PureState, ExactState]:
    return StateFile.model_validate(orjson.loads(Path(path).read_bytes())).to_state()


def save_state(path: Union[str, Path], state) -> None:
    payload = StateFile.from_state(state).model_dump(exclude_none=True, exclude={"renormalize"})
    Path(path).write_bytes(orjson.dumps(payload, option=JSON_OPTIONS | orjson.OPT_INDENT_2))


def orbit_payload(orbit: OrbitFamily) -> dict:
    """{"orbit_size", "states", "generators", "trace"} listo para orjson."""
    return {
        "orbit_size": orbit.size,
        "generators": list(orbit.generators),
        "states": states_payload(orbit.states),
        "trace": [list(step) if isinstance(step, tuple) else step for step in orbit.generator_trace],
    }


def wh_orbit_payload(orbit: OrbitFamily) -> dict:
    """{"orbit_size", "states", "index_tuples"}: cada estado con el operador que lo produjo."""
    return {
        "orbit_size": orbit.size,
        "states": states_payload(orbit.states),
        "index_tuples": [list(map(list, t)) for t in orbit.generator_trace],
    }


def fraction_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def parse_fraction(text: Optional[str]) -> Optional[Fraction]:
    return None if text is None else Fraction(text)


# -------- Circuitos --------
class CircuitStep(BaseModel):
    gate: Literal["H", "S", "T", "CNOT"]
    qubit: Optional[int] = Field(None, ge=0)
    control: Optional[int] = Field(None, ge=0)
    target: Optional[int] = Field(None, ge=0)


# -------- Catálogo --------
class CatalogRecord(BaseModel):
    """Una línea de los archivos JSON-lines del catálogo."""

    kind: Literal["stabilizer", "magic2q", "sic1q", "sic4d"]
    orbit_id: int
    family_id: Optional[int] = None
    state: StateFile
    concurrence: Optional[float] = None
    concurrence_sq: Optional[str] = None
    xi2: str


class PairingRecord(BaseModel):
    magic_orbit: int
    stab_orbit: int


# -------- Afirmaciones --------
class ClaimConfig(BaseModel):
    seed: int = 42
    starts: int = Field(2000, ge=1)
    one_qubit_starts: int = Field(200, ge=1)
    qudit_starts: int = Field(300, ge=1)
    extended_starts: int = Field(20000, ge=1)
    extended: bool = False
    workers: int = Field(1, ge=1)


class ClaimReport(BaseModel):
    claim_id: str
    description: str
    target: Any
    provenance: Literal["PAPER", "DERIVED", "TRIVIAL"]
    computed: Any = None
    tolerance: float = 0.0
    comparison: Literal["abs", "exact", "gt", "lt"] = "abs"
    passed: bool = False
    exact: Optional[str] = None
    note: Optional[str] = None
    runtime_ms: int = 0


def dumps(payload: Any, indent: bool = True) -> bytes:
    option = JSON_OPTIONS | (orjson.OPT_INDENT_2 if indent else 0)
    return orjson.dumps(payload, option=option, default=_default)


def _default(obj: Any):
    if isinstance(obj, Fraction):
        return fraction_text(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, BaseModel):
        return obj.model_dump()
    raise TypeError(f"Tipo no serializable: {type(obj).__name__}")


def states_payload(states: Sequence) -> List[dict]:
    return [StateFile.from_state(s).model_dump(exclude_none=True, exclude={"renormalize"}) for s in states]
