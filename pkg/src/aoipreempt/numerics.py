"""Small dense linear-algebra kernels.

All kernels broadcast over leading batch dimensions, so a stack of
matrices ``(..., m, m)`` can be applied to a stack of vectors ``(..., m)``.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, MultipleRecurrentClasses, SingularSystem

STOCHASTIC_TOL = 1e-10
# entries at or below this are treated as structural zeros of a stochastic matrix
SUPPORT_TOL = 1e-14


def _check(S, v):
    S = np.asarray(S, dtype=float)
    v = np.asarray(v, dtype=float)
    if S.ndim < 2 or S.shape[-1] != S.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {S.shape}")
    if v.ndim < 1 or v.shape[-1] != S.shape[-1]:
        raise DimensionMismatch(f"vector of shape {v.shape} does not conform to {S.shape}")
    return S, v


def _step(S, v, side):
    if side == "left":
        return (v[..., None, :] @ S)[..., 0, :]
    return (S @ v[..., :, None])[..., 0]


def power_apply(S, n: int, v, side: str = "right"):
    """Return ``S^n v`` (``side="right"``) or ``v S^n`` (``side="left"``).

    Computed by ``n`` successive matrix-vector products; ``n = 0`` returns
    a copy of ``v``.
    """
    S, v = _check(S, v)
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    out = np.array(np.broadcast_to(v, np.broadcast_shapes(v.shape, S.shape[:-1])))
    for _ in range(int(n)):
        out = _step(S, out, side)
    return out


def fundamental_apply(S, v, side: str = "right"):
    """Solve ``(I - S) x = v`` (or ``x (I - S) = v`` for ``side="left"``).

    Raises
    ------
    SingularSystem
        If ``I - S`` is singular or the solution is not finite.
    """
    S, v = _check(S, v)
    m = S.shape[-1]
    lhs = np.eye(m) - S
    if side == "left":
        lhs = np.swapaxes(lhs, -1, -2)
    shape = np.broadcast_shapes(v.shape, S.shape[:-1])
    rhs = np.broadcast_to(v, shape)[..., None]
    lhs = np.broadcast_to(lhs, shape[:-1] + (m, m))
    try:
        x = np.linalg.solve(lhs, rhs)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"I - S is singular: {exc}") from None
    if not np.all(np.isfinite(x)):
        raise SingularSystem("I - S solve produced non-finite values")
    return x


def closed_classes(B) -> list:
    """Closed communicating classes of the support graph of ``B``.

    Each class is returned as a sorted array of state indices.
    """
    B = np.asarray(B, dtype=float)
    support = B > SUPPORT_TOL
    n, labels = connected_components(support, directed=True, connection="strong")
    closed = []
    for c in range(n):
        members = np.flatnonzero(labels == c)
        outside = np.flatnonzero(labels != c)
        if not support[np.ix_(members, outside)].any():
            closed.append(members)
    return closed


def stationary_solve(B):
    """Unique stationary row vector of a row-stochastic matrix.

    The recurrent class is located on the support graph; states outside it
    get probability exactly 0.  On the class, ``(B^T - I) pi = 0`` is solved
    with its last equation replaced by the normalisation ``sum(pi) = 1``.

    Raises
    ------
    MultipleRecurrentClasses
        If the support graph has more than one closed class.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {B.shape}")
    classes = closed_classes(B)
    if len(classes) != 1:
        raise MultipleRecurrentClasses(f"found {len(classes)} closed classes")
    cls = classes[0]
    sub = B[np.ix_(cls, cls)]
    k = len(cls)
    lhs = sub.T - np.eye(k)
    lhs[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    try:
        x = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"stationary system is singular: {exc}") from None
    x = np.clip(x, 0.0, None)
    x /= x.sum()
    pi = np.zeros(B.shape[0])
    pi[cls] = x
    return pi


def stationary_solve_batch(B):
    """Stationary vectors for a stack ``(K, m, m)`` of stochastic matrices.

    Fast path for the optimizer: one batched solve, falling back to
    :func:`stationary_solve` for members whose batched solution is singular
    or fails the stationarity check.  Members with several closed classes
    come back as rows of NaN.
    """
    B = np.asarray(B, dtype=float)
    K, m, _ = B.shape
    lhs = np.swapaxes(B, -1, -2) - np.eye(m)
    lhs[:, -1, :] = 1.0
    rhs = np.zeros((K, m, 1))
    rhs[:, -1, 0] = 1.0
    pi = np.full((K, m), np.nan)
    bad = ~(np.abs(np.linalg.det(lhs)) > 1e-13)
    ok = ~bad
    if ok.any():
        pi[ok] = np.linalg.solve(lhs[ok], rhs[ok])[..., 0]
    bad |= ~np.all(np.isfinite(pi), axis=1)
    ok = ~bad
    pi[ok] = np.clip(pi[ok], 0.0, None)
    pi[ok] /= pi[ok].sum(axis=1, keepdims=True)
    resid = np.abs((pi[:, None, :] @ B)[:, 0, :] - pi).max(axis=1)
    bad |= ~(resid <= STOCHASTIC_TOL)
    for k in np.flatnonzero(bad):
        try:
            pi[k] = stationary_solve(B[k])
        except (MultipleRecurrentClasses, SingularSystem):
            pi[k] = np.nan
    return pi
