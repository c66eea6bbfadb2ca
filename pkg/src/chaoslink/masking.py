"""Chaotic masking: invertible composition of information with drive states.

A registered operator pairs a forward scramble f(x, i) -> z with an
exact inverse recover(z, y) -> i_hat.  At perfect synchronization
(y = x) recovery is exact; before that, i_hat carries transient fringes.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_OPERATOR = "additive"
DEFAULT_HOLD = 8
DEFAULT_SETTLE = 25

_MULTIPLICATIVE_GUARD = 1e-12


@dataclass(frozen=True)
class InvertibleOperator:
    """Forward scramble and its exact inverse, registered by name."""

    name: str
    forward: Callable[[float, float], float]
    recover: Callable[[float, float], float]


@dataclass(frozen=True)
class InfoSymbol:
    """One information sample (for binary sources, bit * amplitude)."""

    value: float


def _mul_recover(z: float, y: float) -> float:
    if abs(y) < _MULTIPLICATIVE_GUARD:
        raise ZeroDivisionError(
            "multiplicative recovery undefined: receiver state too close to 0"
        )
    return z / y - 1.0


_REGISTRY: dict[str, InvertibleOperator] = {}


def register_operator(op: InvertibleOperator) -> None:
    if op.name in _REGISTRY:
        raise ValueError(f"operator {op.name!r} already registered")
    _REGISTRY[op.name] = op


def get_operator(name: str) -> InvertibleOperator:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown operator {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


register_operator(
    InvertibleOperator(
        name="additive",
        forward=lambda x, i: x + i,
        recover=lambda z, y: z - y,
    )
)
register_operator(
    InvertibleOperator(
        name="multiplicative",
        forward=lambda x, i: x * (1.0 + i),
        recover=_mul_recover,
    )
)


def scramble(x: float, i: float, op: InvertibleOperator) -> float:
    """Masked line sample z = op.forward(x, i)."""
    return op.forward(x, i)


def epsilon(y: float, z: float) -> float:
    """Receiver-side innovation: y - z.

    Equals the synchronization error when the source is off; carries
    signatures of the information signal during transmission.
    """
    return y - z


def recover_symbol(z: float, y: float, op: InvertibleOperator) -> float:
    """Raw symbol estimate op.recover(z, y); exact at y = x."""
    return op.recover(z, y)


def threshold_detect(symbols, hold: int, threshold: float):
    """Hard bit decisions from raw symbol estimates.

    Averages each consecutive block of `hold` estimates and emits 1 when
    the block mean strictly exceeds the threshold (a tie decides 0).
    """
    if hold < 1:
        raise ValueError("hold must be >= 1")
    data = np.asarray(symbols, dtype=float)
    if data.size % hold != 0:
        raise ValueError(
            f"symbol count {data.size} is not divisible by hold {hold}"
        )
    means = data.reshape(-1, hold).mean(axis=1)
    return (means > threshold).astype(np.uint8)
