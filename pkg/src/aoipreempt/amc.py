"""Per-region blocks of the absorbing chain that models one AoI cycle.

State ordering (fixed, used everywhere): transient index ``k - 1`` holds a
packet of age ``k`` for ``k = 1 .. M``, transient index ``M`` is the idle
channel; absorbing column ``j - 1`` is a delivery that resets the AoI to ``j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonAbsorbing, RegionOutOfRange, SingularSystem
from .numerics import fundamental_apply


def idle_index(M: int) -> int:
    return M


def age_index(k: int) -> int:
    return k - 1


def start_vector(M: int) -> np.ndarray:
    """Row vector selecting the idle state, where every cycle begins."""
    a = np.zeros(M + 1)
    a[idle_index(M)] = 1.0
    return a


@dataclass(frozen=True)
class RegionMatrices:
    S: np.ndarray
    A: np.ndarray
    region: int


def build_blocks(hazards, q: float, rows):
    """Transient block ``S`` and absorbing block ``A`` for probability rows.

    ``rows`` has shape ``(..., M+1)``; the result has shapes
    ``(..., M+1, M+1)`` and ``(..., M+1, M)``.
    """
    y = np.asarray(hazards, dtype=float)
    M = y.shape[0]
    qk = np.asarray(rows, dtype=float) * q
    batch = qk.shape[:-1]
    S = np.zeros(batch + (M + 1, M + 1))
    A = np.zeros(batch + (M + 1, M))
    y0 = y[0]
    idle = idle_index(M)
    # table index 0 is the idle state, which sits last in the state ordering
    by_state = np.concatenate([qk[..., 1:], qk[..., :1]], axis=-1)
    # an admitted arrival starts afresh: delivered at age 1 or moves to age 1
    S[..., :, 0] = by_state * (1.0 - y0)
    A[..., :, 0] = by_state * y0
    for k in range(1, M):
        keep = 1.0 - qk[..., k]
        S[..., k - 1, k] = keep * (1.0 - y[k])
        A[..., k - 1, k] = keep * y[k]
    # age M cannot be delivered; without preemption the packet is discarded
    S[..., M - 1, idle] = 1.0 - qk[..., M]
    S[..., idle, idle] = 1.0 - qk[..., 0]
    return S, A


def build_region_matrices(scenario, region: int) -> RegionMatrices:
    policy = scenario.policy
    if not (1 <= region <= policy.N):
        raise RegionOutOfRange(f"region {region} outside 1..{policy.N}")
    S, A = build_blocks(scenario.model.hazards, scenario.q, policy.row(region))
    S.flags.writeable = False
    A.flags.writeable = False
    return RegionMatrices(S=S, A=A, region=region)


def build_all_regions(scenario) -> list:
    return [build_region_matrices(scenario, i) for i in range(1, scenario.policy.N + 1)]


def can_absorb(S, A):
    """Per-state flag: absorption is reachable on the support graph.

    Works on stacks; returns shape ``(..., M+1)``.
    """
    S = np.asarray(S)
    reach = np.asarray(A).sum(axis=-1) > 0
    edges = S > 0
    for _ in range(S.shape[-1]):
        nxt = reach | (edges & reach[..., None, :]).any(axis=-1)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return reach


def absorbing_mask(S, A, tol: float = 1e-9):
    """Batched absorbing check: structural reachability plus the solve test.

    Returns a boolean array over the leading batch dimensions together with
    the expected times to absorption ``(I - S)^{-1} 1`` (NaN where rejected).
    """
    S = np.asarray(S, dtype=float)
    ok = can_absorb(S, A).all(axis=-1)
    x = np.full(S.shape[:-1], np.nan)
    if ok.any():
        Sg = S[ok]
        ones = np.ones(Sg.shape[:-1])
        try:
            xs = fundamental_apply(Sg, ones)
        except SingularSystem:
            xs = np.full(Sg.shape[:-1], np.nan)
        resid = np.abs(xs - (Sg @ xs[..., None])[..., 0] - 1.0).max(axis=-1)
        good = (np.isfinite(xs).all(axis=-1)
                & (resid <= tol * np.maximum(1.0, np.abs(xs).max(axis=-1)))
                & (xs >= 1.0 - tol).all(axis=-1))
        idx = np.flatnonzero(ok.ravel())
        flat = ok.ravel().copy()
        flat[idx[~good]] = False
        ok = flat.reshape(ok.shape)
        xflat = x.reshape(-1, x.shape[-1])
        xflat[idx[good]] = xs[good]
    return ok, x


def validate_absorbing(last_region: RegionMatrices) -> None:
    """Raise :class:`NonAbsorbing` unless ``I - S`` of the region is invertible
    with a positive expected absorption time from every transient state."""
    ok, _ = absorbing_mask(last_region.S, last_region.A)
    if not bool(ok):
        raise NonAbsorbing(
            f"region {last_region.region} has transient states that never deliver"
        )
