"""Slot-accurate Monte Carlo simulation of the bufferless status-update link.

Per slot, with system age ``Delta`` and either an idle channel or a packet
of age ``d`` at the start of the slot:

1. record ``Delta`` (the time average of these samples is the average AoI);
2. with probability ``q`` a packet arrives;
3. an arrival enters an idle channel with probability ``p_0`` of the region
   of ``Delta``, or replaces the packet in service with probability ``p_d``;
4. at the end of the slot a packet of age ``j < M`` is delivered with
   probability ``y_j`` (``Delta`` becomes ``j + 1``); a packet of age ``M``
   that was not replaced is discarded;
5. all ages advance by one.

Each slot consumes exactly three uniforms from a PCG64 stream, in the order
(arrival, admission/preemption, delivery), whether or not they are used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import InsufficientBatches, InvalidConfiguration

DEFAULT_WARMUP = 10_000
DEFAULT_BATCHES = 50
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimStats:
    slots: int
    warmup: int
    mean_aoi: float
    batch_means: np.ndarray
    batch_size: int
    delivered: int
    reset_hist: np.ndarray
    batch_reset_hist: np.ndarray

    @property
    def batches(self) -> int:
        return len(self.batch_means)


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _region_table(policy, horizon):
    """Probability row for every system age up to ``horizon``; beyond it the
    last entry applies (it lies in the unbounded last region)."""
    th = policy.thresholds
    rows = []
    region = 0
    for delta in range(horizon + 1):
        while delta >= th[region + 1]:
            region += 1
        rows.append(policy.prob_table[region])
    return rows


def simulate(scenario, slots: int, warmup: int = DEFAULT_WARMUP, seed=0,
             batches: int = DEFAULT_BATCHES) -> SimStats:
    """Run the link for ``slots`` slots and collect AoI statistics.

    The first ``warmup`` slots are discarded.  The remaining ones are split
    into ``batches`` equal batches (a remainder of fewer than ``batches``
    slots is left out of the batch means but kept in ``mean_aoi``).
    """
    if slots <= warmup or warmup < 0:
        raise InvalidConfiguration(f"need slots > warmup >= 0, got slots={slots}, warmup={warmup}")
    counted = slots - warmup
    if batches < 1 or counted < batches:
        raise InvalidConfiguration(f"cannot split {counted} slots into {batches} batches")
    policy, model, q = scenario.policy, scenario.model, scenario.q
    M = model.M
    hz = model.hazards
    last_finite = policy.thresholds[-2]
    rows = _region_table(policy, last_finite)
    last_row = rows[-1]
    batch_size = counted // batches
    batch_sums = [0] * batches
    batch_hist = np.zeros((batches, M), dtype=np.int64)
    hist = [0] * (M + 1)

    rng = make_rng(seed)
    delta = 1
    age = -1                    # -1 marks an idle channel
    total = 0
    slot = 0
    while slot < slots:
        n = min(_CHUNK, slots - slot)
        u = rng.random((n, 3)).tolist()
        for ua, up, ud in u:
            if slot >= warmup:
                total += delta
                b = (slot - warmup) // batch_size
                if b < batches:
                    batch_sums[b] += delta
            row = rows[delta] if delta <= last_finite else last_row
            if ua < q:
                if age < 0:
                    if up < row[0]:
                        age = 0
                elif up < row[age]:
                    age = 0
            if age >= 0:
                if age == M:
                    age = -1
                    delta += 1
                elif ud < hz[age]:
                    delta = age + 1
                    age = -1
                    if slot >= warmup:
                        hist[delta] += 1
                        b = (slot - warmup) // batch_size
                        if b < batches:
                            batch_hist[b, delta - 1] += 1
                else:
                    age += 1
                    delta += 1
            else:
                delta += 1
            slot += 1

    return SimStats(
        slots=counted,
        warmup=warmup,
        mean_aoi=total / counted,
        batch_means=np.asarray(batch_sums, dtype=float) / batch_size,
        batch_size=batch_size,
        delivered=int(sum(hist)),
        reset_hist=np.asarray(hist[1:], dtype=np.int64),
        batch_reset_hist=batch_hist,
    )


def confidence_interval(stats: SimStats, level: float = 0.99):
    """Normal-quantile batch-means interval around the grand batch mean."""
    if not (0.0 < level < 1.0):
        raise InvalidConfiguration(f"confidence level {level} outside (0, 1)")
    b = stats.batches
    if b < 20:
        raise InsufficientBatches(f"need at least 20 batches, got {b}")
    means = stats.batch_means
    centre = float(means.mean())
    se = float(means.std(ddof=1)) / math.sqrt(b)
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    return centre - z * se, centre + z * se
