"""Biased lottery: softmax selection probabilities and K-winner draws.

The selection probabilities maximize a regularized objective that trades
expected score against concentration,

    (1 - alpha) * sum(p_i * s_i) - alpha * tau * KL(p || uniform),

whose unique optimizer is the softmax (Gibbs) distribution

    p_i = exp(beta * s_i) / sum_j exp(beta * s_j),   beta = (1 - alpha) / (alpha * tau).

``alpha -> 1`` or ``tau -> inf`` flatten the lottery toward uniform;
small ``alpha * tau`` concentrates it on the top scores. The degenerate
``alpha = 0`` has no finite beta and is realized as a limit policy that
deterministically selects the K highest scores.

A funding round selects exactly K winners by successive sampling without
replacement (draw one index from p, remove it, renormalize, repeat) and
then funds the winners in two stages: a fixed seed grant each, plus the
residual budget split in proportion to score**gamma_cond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deterministic import Allocation, _validate_scores
from .rng import generator

SIMPLEX_ATOL = 1e-9


class PureExploitLimitError(ValueError):
    """alpha = 0 leaves the softmax undefined; use the top-K limit policy."""


@dataclass(frozen=True)
class StochParams:
    """Hyperparameters of the lottery mechanism.

    alpha: exploration weight in [0, 1] (0 = deterministic top-K limit)
    tau: softmax temperature > 0
    k: number of winners per round
    seed_grant: fixed amount per winner (k * seed_grant <= budget)
    gamma_cond: concentration exponent for the residual split
    """

    alpha: float
    tau: float
    k: int
    seed_grant: float = 0.0
    gamma_cond: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.seed_grant < 0.0:
            raise ValueError(f"seed_grant must be >= 0, got {self.seed_grant}")
        if not self.gamma_cond > 0.0:
            raise ValueError(f"gamma_cond must be positive, got {self.gamma_cond}")


@dataclass(frozen=True)
class LotteryPolicy:
    """Selection probabilities over a cohort."""

    probabilities: np.ndarray
    params: object = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", p)
        if np.any(p < 0.0):
            raise ValueError("negative probability")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(p.sum())}, expected 1")

    def __len__(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class DrawResult:
    """Outcome of one seeded funding round."""

    selected: tuple[int, ...]
    rng_seed: int
    allocation: Allocation

    def __post_init__(self):
        object.__setattr__(self, "selected", tuple(int(i) for i in self.selected))
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected indices must be distinct")

    def full_shares(self, n: int) -> np.ndarray:
        """Length-n share vector with zeros for non-selected researchers."""
        out = np.zeros(n)
        out[list(self.selected)] = self.allocation.shares
        return out


def selection_probabilities(scores, alpha: float, tau: float) -> LotteryPolicy:
    """Softmax selection probabilities with inverse scale (1 - alpha) / (alpha * tau).

    Computed with max-subtraction so large beta cannot overflow. alpha = 1
    (or huge tau) gives the uniform lottery; alpha = 0 is rejected because
    beta diverges, use ``exploit_topk`` for that limit.
    """
    s = _validate_scores(scores)
    if alpha == 0.0:
        raise PureExploitLimitError("pure-exploit limit; use limit policy")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    beta = (1.0 - alpha) / (alpha * tau)
    z = beta * s
    z -= z.max()
    e = np.exp(z)
    p = e / e.sum()
    return LotteryPolicy(p / p.sum())


def objective_value(p, scores, alpha: float, tau: float) -> float:
    """Regularized objective (1-alpha)*<p, s> - alpha*tau*KL(p || uniform).

    KL is measured against the uniform distribution, with 0*log(0) = 0.
    ``p`` must lie on the probability simplex.
    """
    pv = np.asarray(p, dtype=float)
    s = _validate_scores(scores)
    if pv.shape != s.shape:
        raise ValueError("p and scores must have the same length")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if np.any(pv < -SIMPLEX_ATOL) or abs(float(pv.sum()) - 1.0) > SIMPLEX_ATOL:
        raise ValueError("p is not on the probability simplex")
    n = pv.size
    pos = pv > 0.0
    kl = float(np.sum(pv[pos] * np.log(pv[pos] * n)))
    return float((1.0 - alpha) * np.dot(pv, s) - alpha * tau * kl)


def draw_lottery(policy, k: int, rng_seed: int) -> list[int]:
    """Draw K distinct winners by successive sampling without replacement.

    Each step draws one index from the current probabilities, removes it
    and renormalizes the rest. Deterministic given ``rng_seed``. Requires
    at least K indices with positive probability.
    """
    p = policy.probabilities if isinstance(policy, LotteryPolicy) else np.asarray(policy, dtype=float)
    n = p.size
    if int(np.count_nonzero(p > 0.0)) < k:
        raise ValueError(f"k={k} exceeds the {int(np.count_nonzero(p > 0.0))} positive-probability indices")
    # One vectorized call consumes the same PCG64 stream as k scalar draws.
    uniforms = generator(rng_seed).random(k)
    weights = p.astype(float).copy()
    selected: list[int] = []
    for u in uniforms:
        cum = np.cumsum(weights)
        idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
        idx = min(idx, n - 1)
        # Guard against landing on an exhausted index through float edges.
        while weights[idx] == 0.0:
            idx = (idx + 1) % n
        selected.append(idx)
        weights[idx] = 0.0
    return selected


def exploit_topk(scores, k: int) -> list[int]:
    """alpha = 0 limit policy: the K highest scores, ties by lowest index.

    Implemented as a stable sort on descending score, so equal scores are
    taken in index order and the outcome is reproducible without any RNG.
    """
    s = _validate_scores(scores)
    if not 1 <= k <= s.size:
        raise ValueError(f"k={k} outside [1, {s.size}]")
    order = np.argsort(-s, kind="stable")
    return [int(i) for i in order[:k]]


def allocate_selected(
    selected, scores, budget: float, seed_grant: float = 0.0, gamma_cond: float = 1.0
) -> Allocation:
    """Two-stage funding of the selected set.

    Every winner receives ``seed_grant``; the residual budget is split
    over the winners in proportion to score**gamma_cond (evenly when all
    selected scores are zero).
    """
    s = _validate_scores(scores)
    idx = [int(i) for i in selected]
    k = len(idx)
    if k == 0:
        raise ValueError("selected set is empty")
    if k * seed_grant > budget:
        raise ValueError(f"k * seed_grant = {k * seed_grant} exceeds budget {budget}")
    if not gamma_cond > 0.0:
        raise ValueError(f"gamma_cond must be positive, got {gamma_cond}")
    residual = budget - k * seed_grant
    sel = s[idx]
    if sel.max() == 0.0:
        weights = np.full(k, 1.0 / k)
    else:
        powered = (sel / sel.max()) ** gamma_cond
        weights = powered / powered.sum()
    # Renormalize the residual part only, so every winner keeps at least
    # the full seed grant while the total still lands on the budget.
    resid_shares = residual * weights
    total = float(resid_shares.sum())
    if total > 0.0:
        resid_shares *= residual / total
    shares = seed_grant + resid_shares
    return Allocation(shares, budget)


def run_lottery(scores, budget: float, params: StochParams, rng_seed: int) -> DrawResult:
    """One seeded funding round: select K winners, then fund them.

    With alpha > 0 the winners come from a softmax lottery; alpha = 0
    falls back to the deterministic top-K limit policy (the seed is still
    recorded for a uniform audit trail).
    """
    s = _validate_scores(scores)
    if params.k > s.size:
        raise ValueError(f"k={params.k} exceeds cohort size {s.size}")
    if params.alpha == 0.0:
        selected = exploit_topk(s, params.k)
    else:
        policy = selection_probabilities(s, params.alpha, params.tau)
        selected = draw_lottery(policy, params.k, rng_seed)
    alloc = allocate_selected(selected, s, budget, params.seed_grant, params.gamma_cond)
    alloc = Allocation(alloc.shares, budget, params)
    return DrawResult(tuple(selected), int(rng_seed), alloc)
