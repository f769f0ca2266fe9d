"""Multi-threshold preemption policies.

A policy splits the system age (AoI) axis into regions
``[thresholds[i-1], thresholds[i])`` and, per region, holds a row
``p_0 .. p_M``: ``p_0`` is the probability of admitting an arrival into an
idle channel and ``p_k`` the probability that an arrival preempts a packet
of age ``k``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

from .delay import DelayModel
from .errors import (
    InvalidParameter,
    NonmonotoneThresholds,
    ProbabilityOutOfRange,
    RowLengthMismatch,
)

#: Marker for the unbounded last threshold.
UNBOUNDED = math.inf

FAMILIES = ("AP", "PP", "PAP", "PSP")


@dataclass(frozen=True)
class PreemptionPolicy:
    thresholds: tuple
    prob_table: tuple
    M: int
    family: str | None = field(default=None, compare=False)
    params: tuple = field(default=(), compare=False)

    @property
    def N(self) -> int:
        return len(self.prob_table)

    def row(self, region: int) -> tuple:
        """Probability row of a 1-based region."""
        return self.prob_table[region - 1]


@dataclass(frozen=True)
class EvaluationScenario:
    model: DelayModel
    policy: PreemptionPolicy
    q: float

    def __post_init__(self):
        if self.policy.M != self.model.M:
            raise InvalidParameter(
                f"policy M={self.policy.M} does not match delay model M={self.model.M}"
            )
        if not (0.0 <= self.q <= 1.0):
            raise ProbabilityOutOfRange(f"arrival probability q={self.q} outside [0, 1]")

    @property
    def M(self) -> int:
        return self.model.M


def _is_unbounded(t) -> bool:
    return t is None or (isinstance(t, float) and math.isinf(t) and t > 0)


def make_policy(thresholds: Sequence, prob_table: Sequence[Sequence[float]], M: int,
                family=None, params=()) -> PreemptionPolicy:
    """Validate raw parts and build a :class:`PreemptionPolicy`.

    ``thresholds`` must start at 0, be strictly increasing and end with an
    unbounded marker (``math.inf`` or ``None``); there is one probability
    row per region, each of length ``M + 1``.
    """
    if not isinstance(M, int) or M < 1:
        raise InvalidParameter(f"M must be a positive integer, got {M!r}")
    th = list(thresholds)
    if len(th) < 2:
        raise NonmonotoneThresholds("need at least the thresholds 0 and unbounded")
    if not _is_unbounded(th[-1]):
        raise NonmonotoneThresholds("last threshold must be unbounded")
    finite = th[:-1]
    for t in finite:
        if _is_unbounded(t) or float(t) != int(t):
            raise NonmonotoneThresholds(f"inner threshold {t!r} is not a finite integer")
    finite = [int(t) for t in finite]
    if finite[0] != 0:
        raise NonmonotoneThresholds(f"first threshold must be 0, got {finite[0]}")
    for a, b in zip(finite, finite[1:]):
        if not a < b:
            raise NonmonotoneThresholds(f"thresholds not strictly increasing at {a}, {b}")
    rows = [tuple(float(p) for p in row) for row in prob_table]
    if len(rows) != len(finite):
        raise RowLengthMismatch(
            f"{len(finite)} regions need {len(finite)} probability rows, got {len(rows)}"
        )
    for i, row in enumerate(rows, start=1):
        if len(row) != M + 1:
            raise RowLengthMismatch(f"region {i} row has {len(row)} entries, expected {M + 1}")
        for k, p in enumerate(row):
            if not (0.0 <= p <= 1.0):
                raise ProbabilityOutOfRange(f"p_{k}^({i}) = {p} outside [0, 1]")
    return PreemptionPolicy(
        thresholds=tuple(finite) + (UNBOUNDED,),
        prob_table=tuple(rows),
        M=M,
        family=family,
        params=tuple(params),
    )


def _prob(name, value):
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise InvalidParameter(f"{name}={value} outside [0, 1]")
    return value


def _age(name, value, M):
    if int(value) != value or not (1 <= value <= M):
        raise InvalidParameter(f"{name}={value} must be an integer in 1..{M}")
    return int(value)


def _split_row(below, above, split, M):
    # idle admission is always 1 for the named families
    return [1.0] + [below if k < split else above for k in range(1, M + 1)]


def make_named_policy(kind: str, params=None, M: int = 1) -> PreemptionPolicy:
    """Expand one of the named families into a full policy.

    ``params`` is a mapping keyed by

    * ``AP``: nothing;
    * ``PP``: ``p``;
    * ``PAP``: ``p1``, ``p2``, ``split`` (ages below ``split`` use ``p1``);
    * ``PSP``: ``p1 .. p4`` in {0, 1}, ``split1``, ``split2`` and the system-age
      ``threshold`` in ``1 .. 3M-1``.
    """
    params = dict(params or {})
    kind = kind.upper()
    if not isinstance(M, int) or M < 1:
        raise InvalidParameter(f"M must be a positive integer, got {M!r}")

    def take(*names):
        missing = [n for n in names if n not in params]
        extra = set(params) - set(names)
        if missing or extra:
            raise InvalidParameter(
                f"{kind} expects parameters {names}; missing {missing}, unexpected {sorted(extra)}"
            )
        return [params[n] for n in names]

    if kind == "AP":
        take()
        return make_policy((0, UNBOUNDED), [[1.0] * (M + 1)], M, family="AP")
    if kind == "PP":
        (p,) = take("p")
        p = _prob("p", p)
        return make_policy((0, UNBOUNDED), [[1.0] + [p] * M], M,
                           family="PP", params=(("p", p),))
    if kind == "PAP":
        p1, p2, split = take("p1", "p2", "split")
        p1, p2 = _prob("p1", p1), _prob("p2", p2)
        split = _age("split", split, M)
        return make_policy((0, UNBOUNDED), [_split_row(p1, p2, split, M)], M, family="PAP",
                           params=(("p1", p1), ("p2", p2), ("split", split)))
    if kind == "PSP":
        p1, p2, p3, p4, s1, s2, gamma = take("p1", "p2", "p3", "p4", "split1", "split2",
                                             "threshold")
        ps = []
        for name, v in zip(("p1", "p2", "p3", "p4"), (p1, p2, p3, p4)):
            if v not in (0, 1):
                raise InvalidParameter(f"PSP probability {name}={v} must be 0 or 1")
            ps.append(float(v))
        s1, s2 = _age("split1", s1, M), _age("split2", s2, M)
        if int(gamma) != gamma or not (1 <= gamma <= 3 * M - 1):
            raise InvalidParameter(f"threshold={gamma} must be an integer in 1..{3 * M - 1}")
        gamma = int(gamma)
        rows = [_split_row(ps[0], ps[1], s1, M), _split_row(ps[2], ps[3], s2, M)]
        named = (("p1", ps[0]), ("p2", ps[1]), ("p3", ps[2]), ("p4", ps[3]),
                 ("split1", s1), ("split2", s2), ("threshold", gamma))
        return make_policy((0, gamma, UNBOUNDED), rows, M, family="PSP", params=named)
    raise InvalidParameter(f"unknown policy family {kind!r}; expected one of {FAMILIES}")


def region_index(policy: PreemptionPolicy, delta: int) -> int:
    """1-based region ``i`` with ``thresholds[i-1] <= delta < thresholds[i]``."""
    return bisect.bisect_right(policy.thresholds, delta, hi=len(policy.thresholds) - 1)
