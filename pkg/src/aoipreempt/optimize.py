"""Exhaustive search over the named policy families, plus desk-scale checks of
the structural results (deterministic optima; optimality of always-preempt).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .analysis import average_aoi, evaluate_tables
from .delay import CONSTANT, NONINCREASING, hazard_profile
from .errors import (
    AllPointsNonAbsorbing,
    DegenerateModel,
    InvalidGrid,
    InvalidParameter,
    SearchSpaceTooLarge,
)
from .policy import FAMILIES, UNBOUNDED, EvaluationScenario, make_named_policy

# candidates within this relative distance of the minimum count as ties
TIE_RTOL = 1e-12
DOMINANCE_TOL = 1e-9
_CHUNK = 1 << 16

PARAM_NAMES = {
    "AP": (),
    "PP": ("p",),
    "PAP": ("p1", "p2", "split"),
    "PSP": ("p1", "p2", "p3", "p4", "split1", "split2", "threshold"),
}


@dataclass(frozen=True)
class OptResult:
    kind: str
    params: tuple
    delta_bar: float
    evaluated: int
    skipped: int = 0
    skipped_points: tuple = field(default=(), repr=False)

    def params_dict(self) -> dict:
        return dict(zip(PARAM_NAMES[self.kind], self.params))

    def policy(self, M: int):
        return make_named_policy(self.kind, self.params_dict(), M)


def probability_grid(step: float) -> list:
    """``[0, step, 2 step, ..., 1]``; ``step`` must divide 1."""
    if not (0.0 < step <= 1.0):
        raise InvalidGrid(f"grid step {step} outside (0, 1]")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise InvalidGrid(f"grid step {step} does not divide 1")
    return [round(i / n, 12) for i in range(n + 1)]


def _split_rows(below, above, split, M):
    return [1.0] + [below if k < split else above for k in range(1, M + 1)]


def _family_groups(kind, M, grid):
    """Yield ``(thresholds, [(params, table), ...])`` groups for a family."""
    one = (0, UNBOUNDED)
    if kind == "AP":
        yield one, [((), [[1.0] * (M + 1)])]
    elif kind == "PP":
        yield one, [((p,), [[1.0] + [p] * M]) for p in grid]
    elif kind == "PAP":
        yield one, [((p1, p2, s), [_split_rows(p1, p2, s, M)])
                    for p1, p2, s in itertools.product(grid, grid, range(1, M + 1))]
    elif kind == "PSP":
        binary = (0.0, 1.0)
        for gamma in range(1, 3 * M):
            pts = []
            for p1, p2, p3, p4, s1, s2 in itertools.product(
                    binary, binary, binary, binary, range(1, M + 1), range(1, M + 1)):
                rows = [_split_rows(p1, p2, s1, M), _split_rows(p3, p4, s2, M)]
                pts.append(((p1, p2, p3, p4, s1, s2, gamma), rows))
            yield (0, gamma, UNBOUNDED), pts
    else:
        raise InvalidParameter(f"unknown policy family {kind!r}; expected one of {FAMILIES}")


def _evaluate_points(model, q, thresholds, tables):
    tables = np.asarray(tables, dtype=float)
    out = np.empty(len(tables))
    for lo in range(0, len(tables), _CHUNK):
        out[lo:lo + _CHUNK] = evaluate_tables(model, q, thresholds, tables[lo:lo + _CHUNK])
    return out


def _pick(params, values):
    """Minimiser with ties (relative 1e-12) broken by the smallest parameter tuple."""
    values = np.asarray(values)
    finite = np.isfinite(values)
    best = values[finite].min()
    cutoff = best + TIE_RTOL * max(1.0, abs(best))
    tied = [params[i] for i in np.flatnonzero(finite & (values <= cutoff))]
    return min(tied)


def grid_optimize(kind: str, model, q: float, grid_step: float = 0.05) -> OptResult:
    """Exhaustively search one named family for the smallest average AoI.

    Continuous probabilities (PP, PAP) range over ``{0, step, ..., 1}``;
    split ages over ``1..M``; PSP uses probabilities in {0, 1} and system-age
    thresholds ``1 .. 3M-1``.  Points whose last region cannot absorb are
    skipped and listed in ``skipped_points``.
    """
    kind = kind.upper()
    if not (0.0 < q <= 1.0):
        raise InvalidParameter(f"arrival probability q={q} must lie in (0, 1]")
    grid = probability_grid(grid_step)
    M = model.M
    params, values = [], []
    for thresholds, pts in _family_groups(kind, M, grid):
        vals = _evaluate_points(model, q, thresholds, [t for _, t in pts])
        params.extend(p for p, _ in pts)
        values.extend(vals.tolist())
    values = np.asarray(values)
    skipped = tuple(p for p, v in zip(params, values) if not np.isfinite(v))
    if len(skipped) == len(params):
        raise AllPointsNonAbsorbing(f"no {kind} grid point yields an absorbing chain")
    best = _pick(params, values)
    policy = make_named_policy(kind, dict(zip(PARAM_NAMES[kind], best)), M)
    report = average_aoi(EvaluationScenario(model, policy, q))
    return OptResult(kind=kind, params=best, delta_bar=report.delta_bar,
                     evaluated=len(params), skipped=len(skipped), skipped_points=skipped)


@dataclass(frozen=True)
class DominanceReport:
    holds: bool
    deterministic_best: float
    randomized_best: float
    thresholds: tuple
    deterministic_table: np.ndarray
    witness: np.ndarray
    evaluated: int


def per_state_thresholds(delta_cap: int) -> tuple:
    """Thresholds giving each system age below ``delta_cap`` its own region.

    Region 1 covers ages 0 and 1 (age 0 never occurs); the last region
    covers every age from ``delta_cap`` on.
    """
    if delta_cap < 2:
        raise InvalidParameter(f"delta_cap must be at least 2, got {delta_cap}")
    return (0,) + tuple(range(2, delta_cap + 1)) + (UNBOUNDED,)


def live_entries(thresholds, M: int) -> list:
    """``(region, k)`` table entries that can influence the chain.

    A packet in service was generated after the last delivered one, so its
    age is below the system age; entries ``p_k`` with ``k`` at least the
    largest system age of the region are never consulted.
    """
    live = []
    for i in range(1, len(thresholds)):
        top = thresholds[i] - 1
        for k in range(M + 1):
            if k == 0 or k < top:
                live.append((i, k))
    return live


def _tables_for(values_iter, live, N, M, count):
    tables = np.ones((count, N, M + 1))
    arr = np.asarray(values_iter, dtype=float).reshape(count, len(live))
    for j, (i, k) in enumerate(live):
        tables[:, i - 1, k] = arr[:, j]
    return tables


def _scan(model, q, thresholds, live, levels, M):
    N = len(thresholds) - 1
    L = len(live)
    total = len(levels) ** L
    best_val, best_tab = np.inf, None
    combos = itertools.product(levels, repeat=L)
    done = 0
    while done < total:
        n = min(_CHUNK, total - done)
        chunk = list(itertools.islice(combos, n))
        tables = _tables_for(chunk, live, N, M, n)
        vals = evaluate_tables(model, q, thresholds, tables)
        if np.isfinite(vals).any():
            j = int(np.nanargmin(vals))
            if vals[j] < best_val:
                best_val, best_tab = float(vals[j]), tables[j]
        done += n
    return best_val, best_tab, total


def check_deterministic_dominance(model, q: float, prob_grid_step: float = 0.25,
                                  delta_cap: int = 4, max_points: int = 5_000_000
                                  ) -> DominanceReport:
    """Compare deterministic and randomized per-(AoI, AoP) policies.

    Every system age below ``delta_cap`` gets its own region.  All 0/1
    assignments of the live table entries are enumerated, as is the full
    probability grid; dead entries are pinned to 1.  The check holds when
    the best deterministic policy is within 1e-9 of the best grid policy.
    """
    thresholds = per_state_thresholds(delta_cap)
    M = model.M
    live = live_entries(thresholds, M)
    grid = probability_grid(prob_grid_step)
    size = len(grid) ** len(live)
    if size > max_points:
        raise SearchSpaceTooLarge(
            f"{size} randomized policies exceed the limit {max_points}; shrink M or delta_cap"
        )
    det_val, det_tab, n_det = _scan(model, q, thresholds, live, (0.0, 1.0), M)
    rnd_val, rnd_tab, n_rnd = _scan(model, q, thresholds, live, grid, M)
    if not (np.isfinite(det_val) and np.isfinite(rnd_val)):
        raise AllPointsNonAbsorbing("no per-state policy yields an absorbing chain")
    return DominanceReport(
        holds=bool(det_val <= rnd_val + DOMINANCE_TOL),
        deterministic_best=det_val,
        randomized_best=rnd_val,
        thresholds=thresholds,
        deterministic_table=det_tab,
        witness=rnd_tab,
        evaluated=n_det + n_rnd,
    )


@dataclass(frozen=True)
class AlwaysPreemptReport:
    applicable: bool
    ap_delta: float
    optimal: bool
    family_best: dict


def check_always_preempt(model, q: float, grid_step: float = 0.25) -> AlwaysPreemptReport:
    """Evaluate always-preempt and test it against the PP/PAP/PSP grids.

    ``applicable`` flags the regime ``q = 1`` with ``y_n <= y_0``, where the
    average AoI of always-preempt equals ``1/y_0`` and nothing should beat it.
    """
    profile = hazard_profile(model)
    nonincreasing = profile in (CONSTANT, NONINCREASING)
    if q == 1.0 and nonincreasing and model.y0 == 0.0:
        raise DegenerateModel("all hazards are zero: no packet is ever delivered")
    applicable = q == 1.0 and nonincreasing
    ap = average_aoi(EvaluationScenario(model, make_named_policy("AP", M=model.M), q))
    best = {kind: grid_optimize(kind, model, q, grid_step).delta_bar
            for kind in ("PP", "PAP", "PSP")}
    optimal = all(v >= ap.delta_bar - DOMINANCE_TOL for v in best.values())
    return AlwaysPreemptReport(applicable=applicable, ap_delta=ap.delta_bar,
                               optimal=optimal, family_best=best)
