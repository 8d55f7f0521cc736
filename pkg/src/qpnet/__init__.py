"""Qualitative probabilistic network inference with situational signs."""

__version__ = "0.1.0"

from .signs import Sign, add, add_all, product  # noqa: F401
from .model import (  # noqa: F401
    AdditiveSynergy,
    QpnNetwork,
    RegularInfluence,
    SituationalInfluence,
    validate,
)
