"""
Propósito: Jerarquía de errores del dominio.
Todas las operaciones levantan subclases de MagicLabError; la CLI y la API las
traducen a códigos de salida / códigos HTTP.
"""

from typing import Any, Optional


class MagicLabError(ValueError):
    """Error base de la librería."""


class ZeroVector(MagicLabError):
    pass


class DimMismatch(MagicLabError):
    pass


class NotNormalized(MagicLabError):
    pass


class InvalidDim(MagicLabError):
    pass


class IndexOutOfRange(MagicLabError):
    pass


class InvalidAlpha(MagicLabError):
    pass


class NotAStationaryPoint(MagicLabError):
    pass


class UnsupportedArity(MagicLabError):
    pass


class OrbitOverflow(MagicLabError):
    pass


class NotClosed(MagicLabError):
    pass


class NotABasis(MagicLabError):
    pass


class WrongCount(MagicLabError):
    pass


class AssociationFailure(MagicLabError):
    pass


class NoValidPartition(MagicLabError):
    pass


class OutOfRange(MagicLabError):
    pass


class NonConstantOrbit(MagicLabError):
    pass


class NotGaussianRational(MagicLabError):
    pass


class CatalogMissing(MagicLabError):
    pass


class NotAMinimum(MagicLabError):
    """Falla de certificación; adjunta el registro con el certificado fallido."""

    def __init__(self, message: str, record: Optional[Any] = None):
        super().__init__(message)
        self.record = record


class InvalidCircuit(MagicLabError):
    pass


class CertificationFailure(MagicLabError):
    """Una verificación necesaria para construir el catálogo no pasó."""
