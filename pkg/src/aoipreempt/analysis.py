"""Exact average AoI of a multi-threshold preemption policy.

One AoI cycle starts right after a delivery that leaves the receiver at age
``gamma`` and ends at the next delivery.  During the cycle the chain over
{packet ages, idle} moves with the block ``S`` of whichever threshold region
the current system age ``gamma + t`` falls in.  The absorption time
``tau_gamma`` has tail

    P(tau > n) = a0 S_1^{z_1} ... S_{i-1}^{z_{i-1}} S_i^{n - G_{i-1}} 1,

where ``G_i = max(threshold_i - gamma, 0)`` and ``z_i = G_i - G_{i-1}``.
Its first two moments and the distribution of the next reset age follow
from partial geometric sums in the finite regions and ``(I - S_N)^{-1}``
in the unbounded last region.  The reset ages form a Markov chain whose
stationary law weights the per-cycle moments in the renewal-reward ratio

    avg AoI = sum_g pi_g (2 g E[tau_g] + E[tau_g^2]) / (2 sum_g pi_g E[tau_g]) - 1/2.

Everything is evaluated by streaming the idle row vector ``a0`` from the
left.  The internal kernels carry a leading batch axis over policies that
share a threshold vector, which is what the optimizer uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amc import absorbing_mask, build_blocks, start_vector
from .errors import (
    GammaOutOfRange,
    NoConvergence,
    NonAbsorbing,
    NumericalError,
)
from .numerics import fundamental_apply, power_apply, stationary_solve, stationary_solve_batch
from .policy import EvaluationScenario, region_index

STOCHASTIC_TOL = 1e-10


@dataclass(frozen=True)
class CycleOffsets:
    gamma: int
    shifted_thresholds: tuple
    gaps: tuple


@dataclass(frozen=True)
class ResetDistribution:
    B: np.ndarray
    pi: np.ndarray


@dataclass(frozen=True)
class AoiReport:
    delta_bar: float
    pi: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    B: np.ndarray


def _offsets(thresholds, gamma):
    shifted = [max(t - gamma, 0) for t in thresholds[:-1]] + [math.inf]
    gaps = [0] + [b - a for a, b in zip(shifted, shifted[1:])]
    return shifted, gaps


def cycle_offsets(policy, gamma: int) -> CycleOffsets:
    """Thresholds shifted to cycle time for a cycle that starts at AoI ``gamma``."""
    if int(gamma) != gamma or not (1 <= gamma <= policy.M):
        raise GammaOutOfRange(f"gamma={gamma} outside 1..{policy.M}")
    shifted, gaps = _offsets(policy.thresholds, int(gamma))
    return CycleOffsets(gamma=int(gamma), shifted_thresholds=tuple(shifted), gaps=tuple(gaps))


def _stack(scenario: EvaluationScenario):
    tables = np.asarray(scenario.policy.prob_table, dtype=float)[None]
    return build_blocks(scenario.model.hazards, scenario.q, tables)


def _require_absorbing(S, A):
    ok, _ = absorbing_mask(S[:, -1], A[:, -1])
    if not ok.all():
        raise NonAbsorbing("the last threshold region never delivers from some state")


def _cycle_kernel(S, A, thresholds, gammas):
    """First two moments of ``tau_gamma`` and reset-age rows for a batch.

    ``S`` is ``(K, N, m, m)`` and ``A`` is ``(K, N, m, M)``; returns arrays
    ``m1, m2`` of shape ``(K, len(gammas))`` and ``B`` of shape
    ``(K, len(gammas), M)``.
    """
    K, N, m, _ = S.shape
    M = m - 1
    SN, AN = S[:, N - 1], A[:, N - 1]
    ones = np.ones((K, m))
    u = fundamental_apply(SN, ones)          # (I - S_N)^{-1} 1
    w = fundamental_apply(SN, u)             # (I - S_N)^{-2} 1
    m1 = np.empty((K, len(gammas)))
    m2 = np.empty((K, len(gammas)))
    B = np.empty((K, len(gammas), M))
    a0 = start_vector(M)
    for g, gamma in enumerate(gammas):
        shifted, gaps = _offsets(thresholds, gamma)
        r = np.broadcast_to(a0, (K, m)).copy()
        first = np.ones(K)
        weighted = np.zeros(K)               # sum_n n P(tau > n)
        brow = np.zeros((K, M))
        for region in range(1, N):
            zeta, base = gaps[region], shifted[region - 1]
            if zeta == 0:
                continue
            Sl = S[:, region - 1]
            visits = np.zeros((K, m))
            for k in range(1, zeta + 1):
                visits += r
                r = power_apply(Sl, 1, r, side="left")
                tail = r.sum(axis=1)
                first += tail
                weighted += (k + base) * tail
            brow += (visits[:, None, :] @ A[:, region - 1])[:, 0, :]
        x = power_apply(SN, 1, r, side="left")
        xu = np.einsum("ki,ki->k", x, u)
        first += xu
        weighted += np.einsum("ki,ki->k", x, w) + shifted[N - 1] * xu
        brow += (fundamental_apply(SN, r, side="left")[:, None, :] @ AN)[:, 0, :]
        m1[:, g] = first
        m2[:, g] = first + 2.0 * weighted
        B[:, g] = brow
    return m1, m2, B


def _average(pi, m1, m2):
    ages = np.arange(1, m1.shape[-1] + 1)
    num = (pi * (2.0 * ages * m1 + m2)).sum(axis=-1)
    den = 2.0 * (pi * m1).sum(axis=-1)
    return num / den - 0.5


def tail_tau(scenario: EvaluationScenario, gamma: int, n: int, regions=None) -> float:
    """``P(tau_gamma > n)`` by streaming the idle row through the region blocks."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    off = cycle_offsets(scenario.policy, gamma)
    S, A = _stack(scenario) if regions is None else regions
    _require_absorbing(S, A)
    if n == 0:
        return 1.0
    r = start_vector(scenario.M)
    shifted = off.shifted_thresholds
    for i in range(1, scenario.policy.N + 1):
        if n <= shifted[i]:
            r = power_apply(S[0, i - 1], n - shifted[i - 1], r, side="left")
            return float(r.sum())
        r = power_apply(S[0, i - 1], off.gaps[i], r, side="left")
    raise AssertionError("unreachable: last region is unbounded")


def moments_tau(scenario: EvaluationScenario, gamma: int):
    """``(E[tau_gamma], E[tau_gamma^2])`` from the closed-form partial sums."""
    off = cycle_offsets(scenario.policy, gamma)
    S, A = _stack(scenario)
    _require_absorbing(S, A)
    m1, m2, _ = _cycle_kernel(S, A, scenario.policy.thresholds, [off.gamma])
    return float(m1[0, 0]), float(m2[0, 0])


def moments_tau_truncated(scenario: EvaluationScenario, gamma: int, tol: float = 1e-12,
                          max_terms: int = 10**6):
    """Moments from the tail sums ``sum P(tau > k)`` and ``sum k P(tau > k)``.

    Summation stops once the chain is in the last region and
    ``k P(tau > k) < tol``.  Used as an oracle for :func:`moments_tau`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    off = cycle_offsets(scenario.policy, gamma)
    S, A = _stack(scenario)
    _require_absorbing(S, A)
    policy = scenario.policy
    last_start = off.shifted_thresholds[policy.N - 1]
    r = start_vector(scenario.M)
    total, weighted = 1.0, 0.0
    for k in range(1, max_terms + 1):
        region = region_index(policy, off.gamma + k - 1)
        r = r @ S[0, region - 1]
        tail = float(r.sum())
        total += tail
        weighted += k * tail
        if k >= last_start and k * tail < tol:
            return total, total + 2.0 * weighted
    raise NoConvergence(f"tail sums did not reach tol={tol} within {max_terms} terms")


def reset_matrix(scenario: EvaluationScenario) -> ResetDistribution:
    """Transition matrix of successive reset ages and its stationary law."""
    S, A = _stack(scenario)
    _require_absorbing(S, A)
    M = scenario.M
    _, _, B = _cycle_kernel(S, A, scenario.policy.thresholds, range(1, M + 1))
    B = B[0]
    if np.abs(B.sum(axis=1) - 1.0).max() > STOCHASTIC_TOL:
        raise NumericalError("reset-age matrix is not stochastic")
    return ResetDistribution(B=B, pi=stationary_solve(B))


def average_aoi(scenario: EvaluationScenario) -> AoiReport:
    S, A = _stack(scenario)
    _require_absorbing(S, A)
    M = scenario.M
    m1, m2, B = _cycle_kernel(S, A, scenario.policy.thresholds, range(1, M + 1))
    m1, m2, B = m1[0], m2[0], B[0]
    if np.abs(B.sum(axis=1) - 1.0).max() > STOCHASTIC_TOL:
        raise NumericalError("reset-age matrix is not stochastic")
    pi = stationary_solve(B)
    return AoiReport(delta_bar=float(_average(pi, m1, m2)), pi=pi, m1=m1, m2=m2, B=B)


def evaluate_tables(model, q: float, thresholds, tables) -> np.ndarray:
    """Average AoI for many probability tables sharing one threshold vector.

    ``tables`` has shape ``(K, N, M+1)``.  Entries whose last region is not
    absorbing, or whose reset chain has several recurrent classes, are NaN.
    """
    tables = np.asarray(tables, dtype=float)
    S, A = build_blocks(model.hazards, q, tables)
    ok, _ = absorbing_mask(S[:, -1], A[:, -1])
    out = np.full(tables.shape[0], np.nan)
    if not ok.any():
        return out
    m1, m2, B = _cycle_kernel(S[ok], A[ok], tuple(thresholds), range(1, model.M + 1))
    pi = stationary_solve_batch(B)
    out[ok] = _average(pi, m1, m2)
    return out
