"""Containers shared by the exact, asymptotic and empirical CDF code."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class EdgeKind(str, enum.Enum):
    """Which extreme is studied.

    OUTER: the largest modulus, CDF is P(|z_max| <= y).
    INNER: the smallest modulus, reported as P(|z_min| >= y).
    """

    OUTER = "outer"
    INNER = "inner"

    @classmethod
    def parse(cls, value) -> "EdgeKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass
class CdfCurve:
    """CDF values on an ordered grid.

    ``abscissa`` is either the rescaled variable Y or the raw modulus y;
    when it is Y, ``y`` holds the mapped raw values.  ``flags`` marks grid
    points whose mapped y was negative and were clamped to y = 0.
    """

    abscissa: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    y: Optional[np.ndarray] = None
    flags: Optional[np.ndarray] = None

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.abscissa.shape != self.values.shape:
            raise ValueError("abscissa and values must have the same shape")

    def __len__(self):
        return len(self.abscissa)

    def is_monotone(self, increasing: bool = True, atol: float = 0.0) -> bool:
        d = np.diff(self.values)
        return bool(np.all(d >= -atol) if increasing else np.all(d <= atol))
