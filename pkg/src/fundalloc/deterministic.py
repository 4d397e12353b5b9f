"""Deterministic explore/exploit budget allocation.

A budget ``B`` is split into an exploration part ``alpha * B`` and an
exploitation part ``(1 - alpha) * B``. The exploration part blends a
uniform share with a share proportional to the scores, steered by
``lam``; the exploitation part concentrates on high scores through a
power rule with exponent ``gamma``:

    b_i = alpha*B * (lam/N + (1-lam) * s_i / sum(s))
        + (1-alpha)*B * s_i**gamma / sum(s**gamma)

Scores enter only through ratios, so allocations are invariant under
rescaling of the score vector. Optional per-researcher lower/upper bounds
are enforced afterwards by proportional redistribution.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

BUDGET_RTOL = 1e-9


class InfeasibleBoundsError(ValueError):
    """Bounds cannot be satisfied by any allocation of the budget."""


@dataclass(frozen=True)
class DetParams:
    """Hyperparameters of the deterministic rule.

    alpha: exploration fraction in [0, 1]
    lam:   exploration uniformity in [0, 1] (1 = uniform, 0 = proportional)
    gamma: concentration exponent > 0
    lower_bound / upper_bound: optional per-researcher share bounds
    """

    alpha: float
    lam: float
    gamma: float
    lower_bound: Optional[float] = None
    upper_bound: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        has_lower = self.lower_bound is not None
        has_upper = self.upper_bound is not None
        if has_lower != has_upper:
            raise ValueError("lower_bound and upper_bound must be given together")
        if has_lower:
            if not (0.0 <= self.lower_bound < self.upper_bound <= 1.0):
                raise ValueError(
                    f"bounds must satisfy 0 <= lower < upper <= 1, got "
                    f"[{self.lower_bound}, {self.upper_bound}]"
                )


@dataclass(frozen=True)
class Allocation:
    """Budget shares over a cohort, together with what produced them."""

    shares: np.ndarray
    budget: float
    params: object = None

    def __post_init__(self):
        shares = np.asarray(self.shares, dtype=float)
        object.__setattr__(self, "shares", shares)
        if np.any(shares < 0.0):
            raise ValueError("negative share")
        total = float(shares.sum())
        if abs(total - self.budget) > BUDGET_RTOL * abs(self.budget):
            raise ValueError(f"shares sum to {total}, expected budget {self.budget}")

    def __len__(self) -> int:
        return len(self.shares)


def _validate_scores(scores) -> np.ndarray:
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("scores must be a non-empty 1-d vector")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    if np.any(s < 0.0):
        raise ValueError("negative score")
    return s


def allocate(scores, budget: float, params: DetParams) -> Allocation:
    """Allocate ``budget`` over ``scores`` with the explore/exploit rule.

    An all-zero score vector falls back to a uniform split (the budget
    still has to go somewhere). 0**gamma is treated as 0, so zero-score
    researchers get nothing from the exploitation part.
    """
    s = _validate_scores(scores)
    if not budget > 0.0:
        raise ValueError(f"budget must be positive, got {budget}")
    n = s.size
    total = s.sum()
    if total == 0.0:
        b = np.full(n, budget / n)
    else:
        # Normalizing by the max keeps powers in [0, 1]: no overflow for
        # large gamma, and exact invariance under score rescaling.
        t = s / s.max()
        powered = t**params.gamma
        exploit = powered / powered.sum()
        proportional = s / total
        explore = params.lam / n + (1.0 - params.lam) * proportional
        b = params.alpha * budget * explore + (1.0 - params.alpha) * budget * exploit
        b *= budget / b.sum()
    alloc = Allocation(b, budget, params)
    if params.lower_bound is not None:
        alloc = apply_bounds(alloc, params.lower_bound, params.upper_bound)
    return alloc


def apply_bounds(alloc: Allocation, lower: float, upper: float) -> Allocation:
    """Project an allocation onto the per-researcher box [lower, upper].

    Violators are clamped to their bound and the residual budget is
    redistributed over the remaining researchers in proportion to their
    shares, repeating until no bound is violated. Equivalent closed form:
    the result is clip(c * b_i, lower, upper) with the scaling factor c
    chosen so the total equals the budget, which preserves the relative
    order of all unclamped shares. Solved exactly by breakpoint search.

    Zero-score researchers cannot be scaled; they sit at the lower bound
    unless every positive share saturates at the upper bound, in which
    case they split the leftover evenly.
    """
    b = np.asarray(alloc.shares, dtype=float)
    n = b.size
    budget = alloc.budget
    if not 0.0 <= lower <= upper:
        raise ValueError(f"need 0 <= lower <= upper, got [{lower}, {upper}]")
    if n * lower > budget or n * upper < budget:
        raise InfeasibleBoundsError(
            f"bounds [{lower}, {upper}] infeasible for N={n}, budget={budget}"
        )
    if lower == upper:
        # Feasibility pinned the budget to n * lower: forced uniform.
        return Allocation(np.full(n, budget / n), budget, alloc.params)

    def clipped_total(c: float) -> float:
        return float(np.clip(c * b, lower, upper).sum())

    # Breakpoints where some share enters/leaves its bound; between two
    # consecutive breakpoints the clipped total is linear in c.
    pos = b > 0.0
    cands = [0.0]
    if np.any(pos):
        cands.extend((lower / b[pos]).tolist())
        cands.extend((upper / b[pos]).tolist())
    cands = sorted(set(cands))

    if clipped_total(cands[-1]) < budget:
        # All positive shares capped and budget remains: only researchers
        # with zero shares can absorb it (evenly, there is no proportion).
        shares = np.clip(cands[-1] * b, lower, upper)
        zero = ~pos
        shares[zero] += (budget - float(shares.sum())) / int(zero.sum())
        return Allocation(shares, budget, alloc.params)

    c_star = cands[-1]
    for left, right in zip(cands, cands[1:]):
        if clipped_total(right) >= budget:
            # Clip pattern is constant on the open segment; probing the
            # midpoint avoids ulp ambiguity at the breakpoints themselves.
            mid = 0.5 * (left + right)
            interior = pos & (mid * b > lower) & (mid * b < upper)
            slope = float(b[interior].sum())
            if slope == 0.0:
                c_star = left
            else:
                c_star = (budget - clipped_total(left) + slope * left) / slope
            break
    shares = np.clip(c_star * b, lower, upper)

    # Absorb float residue into the strictly interior shares.
    interior = (shares > lower) & (shares < upper)
    interior_total = float(shares[interior].sum())
    if np.any(interior) and interior_total > 0.0:
        residual = budget - float(shares[~interior].sum())
        shares[interior] *= residual / interior_total
    return Allocation(shares, budget, alloc.params)


def allocation_curve(
    params: DetParams, grid_points: int, budget: float = 1.0
) -> np.ndarray:
    """Shares for a synthetic cohort with evenly spaced scores on [0, 1].

    Returns an array of (score, share) rows, suitable for plotting the
    share a researcher receives as a function of their score.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    scores = np.linspace(0.0, 1.0, grid_points)
    alloc = allocate(scores, budget, params)
    return np.column_stack([scores, alloc.shares])


def gini(shares) -> float:
    """Gini coefficient of a non-negative share vector (0 = uniform)."""
    x = np.sort(np.asarray(shares, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("negative share")
    n = x.size
    total = x.sum()
    if n == 0 or total == 0.0:
        return 0.0
    i = np.arange(1, n + 1)
    return float(2.0 * np.dot(i, x) / (n * total) - (n + 1.0) / n)


def top_decile_share(shares) -> float:
    """Fraction of the budget held by the top 10% (ceil) of researchers."""
    x = np.sort(np.asarray(shares, dtype=float))[::-1]
    total = x.sum()
    if x.size == 0 or total == 0.0:
        return 0.0
    k = max(1, int(np.ceil(x.size / 10.0)))
    return float(x[:k].sum() / total)


def with_bounds(params: DetParams, lower: float, upper: float) -> DetParams:
    """Copy of ``params`` with bounds attached."""
    return replace(params, lower_bound=lower, upper_bound=upper)
