"""Classical entropies of joint distributions given as numpy arrays.

A joint distribution of random variables X_1 ... X_k is an array with one
axis per variable.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import InputError

NORM_TOL = 1e-9


def check_distribution(p, tol: float = NORM_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol):
        raise InputError("distribution has negative entries")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise InputError(f"distribution sums to {total:.12g}, expected 1")
    return np.clip(p, 0.0, None)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def marginal(p: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    keep = set(keep)
    drop = tuple(i for i in range(p.ndim) if i not in keep)
    return p.sum(axis=drop) if drop else p


def conditional_entropy(p: np.ndarray, part: Iterable[int], given: Iterable[int]) -> float:
    """H(X_part | X_given) = H(X_part X_given) - H(X_given)."""
    part, given = set(part), set(given)
    if part & given:
        raise InputError("conditioning and conditioned variables overlap")
    return shannon_entropy(marginal(p, part | given)) - shannon_entropy(marginal(p, given))


def mutual_information(joint) -> float:
    """I(X;Y) for a two-axis joint distribution."""
    joint = np.asarray(joint, dtype=float)
    return (
        shannon_entropy(joint.sum(axis=1))
        + shannon_entropy(joint.sum(axis=0))
        - shannon_entropy(joint)
    )


def classical_min_entropy(p_ze) -> float:
    """H_min(Z|E) = -log2 sum_e max_z p(z, e).

    ``p_ze`` has Z on axis 0 and the side information on the remaining
    axes (none for trivial side information).
    """
    p = check_distribution(p_ze)
    if p.ndim == 1:
        return float(-np.log2(p.max()))
    guess = p.reshape(p.shape[0], -1).max(axis=0).sum()
    return float(-np.log2(guess))


def smooth_min_entropy(p_ze, eps: float) -> float:
    """epsilon-smooth min-entropy under removal of at most ``eps`` probability mass.

    Maximizes H_min(Z|E)_q over sub-normalized q <= p with
    sum(p - q) <= eps. For each e the optimum caps p(., e) at a level t_e;
    the levels are lowered greedily, cheapest mass-per-height first, which
    is optimal because the cost of lowering a cap only grows as it drops.
    """
    if not 0 <= eps < 1:
        raise InputError(f"smoothing parameter must lie in [0, 1), got {eps}")
    p = check_distribution(p_ze)
    cols = p.reshape(p.shape[0], -1) if p.ndim > 1 else p.reshape(-1, 1)
    total = 0.0
    segments = []  # (count, length) for each flat stretch of the staircase
    for e in range(cols.shape[1]):
        v = np.sort(cols[:, e])[::-1]
        v = v[v > 0]
        if v.size == 0:
            continue
        total += v[0]
        lengths = v - np.append(v[1:], 0.0)
        counts = np.arange(1, v.size + 1)
        nz = lengths > 0
        segments.append(np.stack([counts[nz], lengths[nz]], axis=1))
    seg = np.concatenate(segments)
    seg = seg[np.argsort(seg[:, 0], kind="stable")]
    budget = eps
    for count, length in seg:
        cost = count * length
        if cost <= budget:
            total -= length
            budget -= cost
        else:
            total -= budget / count
            break
    if total <= 0:
        return float("inf")
    return float(-np.log2(total))


def iid_power(p: np.ndarray, n: int) -> np.ndarray:
    """n-fold i.i.d. extension of a two-axis p(z, e) as p(z^n, e^n)."""
    p = np.asarray(p, dtype=float)
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.einsum("ab,cd->acbd", out, p).reshape(out.shape[0] * p.shape[0], out.shape[1] * p.shape[1])
    return out
