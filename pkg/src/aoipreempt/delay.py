"""Discrete channel delay laws expressed through their hazard sequence.

A delay ``Y`` (in slots, ``Y >= 1``) is stored as the conditional success
probabilities ``y_n = P(Y = n + 1 | Y > n)`` for ``n = 0 .. M-1``.  Packets
older than ``M`` are discarded, so hazards past ``M - 1`` are never needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidParameter, InvalidTail

TOL = 1e-12

CONSTANT = "constant"
NONINCREASING = "nonincreasing"
INCREASING_SOMEWHERE = "increasing-somewhere"


@dataclass(frozen=True)
class DelayModel:
    """Hazard sequence ``y_0 .. y_{M-1}`` plus the staleness bound ``M``."""

    M: int
    hazards: tuple

    def __post_init__(self):
        if not isinstance(self.M, int) or isinstance(self.M, bool) or self.M < 1:
            raise InvalidParameter(f"M must be a positive integer, got {self.M!r}")
        hz = tuple(float(h) for h in self.hazards)
        if len(hz) != self.M:
            raise InvalidParameter(f"expected {self.M} hazards, got {len(hz)}")
        for n, h in enumerate(hz):
            if not (0.0 <= h <= 1.0):
                raise InvalidParameter(f"hazard y_{n}={h} outside [0, 1]")
        object.__setattr__(self, "hazards", hz)

    @property
    def y0(self) -> float:
        return self.hazards[0]

    def tail(self) -> tuple:
        """Survival values ``P(Y > n)`` for ``n = 0 .. M`` implied by the hazards."""
        out = [1.0]
        for h in self.hazards:
            out.append(out[-1] * (1.0 - h))
        return tuple(out)


def build_weibull(alpha: float, beta: float, M: int) -> DelayModel:
    """Discrete Weibull delay with ``P(Y > k) = alpha ** (k ** beta)``.

    The hazard at age ``n`` is ``1 - alpha ** ((n+1)**beta - n**beta)``.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha}")
    if not (beta > 0.0) or math.isinf(beta):
        raise InvalidParameter(f"beta must be positive and finite, got {beta}")
    if not isinstance(M, int) or M < 1:
        raise InvalidParameter(f"M must be a positive integer, got {M!r}")
    hz = [1.0 - alpha ** ((n + 1) ** beta - n ** beta) for n in range(M)]
    return DelayModel(M=M, hazards=tuple(hz))


def build_geometric(y: float, M: int) -> DelayModel:
    if not (0.0 <= y <= 1.0):
        raise InvalidParameter(f"geometric success probability {y} outside [0, 1]")
    return DelayModel(M=M, hazards=(float(y),) * M)


def build_from_tail(tail: Sequence[float], M: int) -> DelayModel:
    """Build a model from survival values ``T(n) = P(Y > n)``, ``n = 0 .. M``.

    Raises
    ------
    InvalidTail
        If ``T(0) != 1``, ``T`` increases anywhere, or ``T(n) = 0`` for some
        ``n < M`` (the hazard at that age would be undefined).
    """
    if not isinstance(M, int) or M < 1:
        raise InvalidParameter(f"M must be a positive integer, got {M!r}")
    T = [float(t) for t in tail]
    if len(T) < M + 1:
        raise InvalidTail(f"need at least M+1={M + 1} tail values, got {len(T)}")
    if abs(T[0] - 1.0) > TOL:
        raise InvalidTail(f"T(0) must equal 1, got {T[0]}")
    for n in range(1, len(T)):
        if T[n] > T[n - 1] + TOL:
            raise InvalidTail(f"tail increases at n={n}: {T[n - 1]} -> {T[n]}")
        if T[n] < -TOL:
            raise InvalidTail(f"negative tail value at n={n}")
    hz = []
    for n in range(M):
        if T[n] <= 0.0:
            raise InvalidTail(f"T({n}) = 0 leaves hazard y_{n} undefined")
        h = 1.0 - T[n + 1] / T[n]
        hz.append(min(1.0, max(0.0, h)))
    return DelayModel(M=M, hazards=tuple(hz))


def hazard_profile(model: DelayModel) -> str:
    """Classify the hazard sequence.

    ``"nonincreasing"`` means ``y_n <= y_0`` for all ``0 < n < M`` (ties count);
    ``"constant"`` takes precedence when every hazard equals ``y_0``.
    """
    y0 = model.hazards[0]
    rest = model.hazards[1:]
    if all(abs(h - y0) <= TOL for h in rest):
        return CONSTANT
    if all(h <= y0 + TOL for h in rest):
        return NONINCREASING
    return INCREASING_SOMEWHERE
