"""Backtesting and parameter optimization against realized outcomes.

Realized utility of an allocation is the outcome-weighted budget,
``U = sum(b_i * o_i)``; with a unit budget it is a convex combination of
the outcomes. Grid searches evaluate this utility over a cartesian
parameter grid; the stochastic mechanism is scored by Monte-Carlo
averaging over seeded lottery rounds. All stochastic evaluation is
reproducible from a single root seed via the derivation rule in
``fundalloc.rng``.

Ties in a grid search break toward the lexicographically smallest
parameter tuple, i.e. toward the least concentrated configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from . import deterministic
from .cohort import Cohort, CohortMember, percentile_normalize
from .lottery import StochParams, allocate_selected, draw_lottery, run_lottery, selection_probabilities
from .rng import STREAM_DRAWS, STREAM_GRID, derive_seed, generator

DEFAULT_N_DRAWS = 1000

DET_PARAM_NAMES = ("alpha", "lam", "gamma")
STOCH_PARAM_NAMES = ("alpha", "tau", "k", "seed_grant", "gamma_cond")


@dataclass(frozen=True)
class GridSpec:
    """Candidate values per hyperparameter.

    The deterministic search reads (alpha, lam, gamma); the stochastic
    search reads (alpha, tau, k, seed_grant, gamma_cond). Lists are
    deduplicated and sorted ascending so grid iteration order, and with
    it tie-breaking, is well defined.
    """

    alpha: tuple[float, ...] = ()
    lam: tuple[float, ...] = ()
    gamma: tuple[float, ...] = ()
    tau: tuple[float, ...] = ()
    k: tuple[int, ...] = ()
    seed_grant: tuple[float, ...] = ()
    gamma_cond: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("alpha", "lam", "gamma", "tau", "seed_grant", "gamma_cond"):
            vals = tuple(sorted(set(float(v) for v in getattr(self, name))))
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "k", tuple(sorted(set(int(v) for v in self.k))))

    @staticmethod
    def default_det() -> "GridSpec":
        return GridSpec(
            alpha=tuple(round(0.1 * i, 1) for i in range(11)),
            lam=tuple(round(0.1 * i, 1) for i in range(11)),
            gamma=(0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0),
        )

    @staticmethod
    def default_stoch(budget: float = 1.0) -> "GridSpec":
        ks = (1, 5, 10, 50, 100)
        # Per-winner minimal seed grants: a tenth of the budget split over
        # the K winners; combinations that overrun the budget are skipped
        # by the search.
        seeds = (0.0,) + tuple(budget / (10.0 * k) for k in ks)
        return GridSpec(
            alpha=tuple(round(0.1 * i, 1) for i in range(11)),
            tau=(0.01, 0.05, 0.1, 0.5, 1.0),
            k=ks,
            seed_grant=seeds,
            gamma_cond=(0.5, 1.0, 2.0),
        )


@dataclass(frozen=True)
class GridRow:
    """One evaluated grid point."""

    params: dict
    utility: float
    stderr: Optional[float] = None


@dataclass(frozen=True)
class BacktestResult:
    """Full grid table plus the winning row."""

    table: tuple[GridRow, ...]
    best: GridRow
    n_draws: Optional[int] = None
    root_seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))


def realized_utility(shares, outcomes) -> float:
    """Outcome-weighted sum of budget shares, sum(b_i * o_i)."""
    b = np.asarray(shares, dtype=float)
    o = np.asarray(outcomes, dtype=float)
    if b.shape != o.shape:
        raise ValueError("shares and outcomes must have the same length")
    return float(np.dot(b, o))


def _best_row(rows: list[GridRow]) -> GridRow:
    # Rows arrive in lexicographic parameter order, so the first strict
    # maximum is the lexicographically smallest optimum.
    best = rows[0]
    for row in rows[1:]:
        if row.utility > best.utility:
            best = row
    return best


def grid_search_det(cohort: Cohort, budget: float, grid: GridSpec) -> BacktestResult:
    """Exhaustive search of the deterministic rule over (alpha, lam, gamma)."""
    if not (grid.alpha and grid.lam and grid.gamma):
        raise ValueError("deterministic grid needs alpha, lam and gamma values")
    s = cohort.scores
    o = cohort.outcomes
    rows = []
    for alpha, lam, gamma in product(grid.alpha, grid.lam, grid.gamma):
        params = deterministic.DetParams(alpha=alpha, lam=lam, gamma=gamma)
        alloc = deterministic.allocate(s, budget, params)
        u = realized_utility(alloc.shares, o)
        rows.append(GridRow({"alpha": alpha, "lam": lam, "gamma": gamma}, u))
    return BacktestResult(tuple(rows), _best_row(rows))


def mc_expected_utility(
    cohort: Cohort,
    budget: float,
    params: StochParams,
    n_draws: int = DEFAULT_N_DRAWS,
    root_seed: int = 0,
) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the lottery's realized utility.

    Runs ``n_draws`` independent seeded rounds; round ``i`` uses the seed
    ``derive_seed(root_seed, STREAM_DRAWS, i)``. With alpha = 0 the round
    is deterministic, so a single evaluation stands in for all draws and
    the standard error is exactly 0.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    s = cohort.scores
    o = cohort.outcomes
    if params.alpha == 0.0:
        result = run_lottery(s, budget, params, rng_seed=derive_seed(root_seed, STREAM_DRAWS, 0))
        return realized_utility(result.full_shares(len(s)), o), 0.0
    # Inlined run_lottery body with the (draw-invariant) policy hoisted out
    # of the loop; outputs are bit-identical to calling run_lottery per draw.
    policy = selection_probabilities(s, params.alpha, params.tau)
    utilities = np.empty(n_draws)
    for i in range(n_draws):
        selected = draw_lottery(policy, params.k, derive_seed(root_seed, STREAM_DRAWS, i))
        alloc = allocate_selected(selected, s, budget, params.seed_grant, params.gamma_cond)
        utilities[i] = float(np.dot(alloc.shares, o[selected]))
    mean = float(utilities.mean())
    stderr = 0.0 if n_draws < 2 else float(utilities.std(ddof=1) / math.sqrt(n_draws))
    return mean, stderr


def optimize_stoch(
    cohort: Cohort,
    budget: float,
    grid: GridSpec,
    n_draws: int = DEFAULT_N_DRAWS,
    root_seed: int = 0,
) -> BacktestResult:
    """Monte-Carlo grid search of the lottery mechanism.

    Grid point ``j`` gets its own Monte-Carlo root seed
    ``derive_seed(root_seed, STREAM_GRID, j)``, so the table does not
    depend on evaluation order. Points violating k <= N or
    k * seed_grant <= budget are skipped.
    """
    if not (grid.alpha and grid.tau and grid.k and grid.seed_grant and grid.gamma_cond):
        raise ValueError("stochastic grid needs alpha, tau, k, seed_grant and gamma_cond values")
    n = len(cohort)
    rows = []
    for j, (alpha, tau, k, seed_grant, gamma_cond) in enumerate(
        product(grid.alpha, grid.tau, grid.k, grid.seed_grant, grid.gamma_cond)
    ):
        if k > n or k * seed_grant > budget:
            continue
        params = StochParams(alpha=alpha, tau=tau, k=k, seed_grant=seed_grant, gamma_cond=gamma_cond)
        mean, stderr = mc_expected_utility(
            cohort, budget, params, n_draws=n_draws, root_seed=derive_seed(root_seed, STREAM_GRID, j)
        )
        rows.append(
            GridRow(
                {"alpha": alpha, "tau": tau, "k": k, "seed_grant": seed_grant, "gamma_cond": gamma_cond},
                mean,
                stderr,
            )
        )
    if not rows:
        raise ValueError("no feasible grid point")
    return BacktestResult(tuple(rows), _best_row(rows), n_draws=n_draws, root_seed=root_seed)


@dataclass(frozen=True)
class SynthSpec:
    """Synthetic cohort description.

    ``rho`` is the target rank correlation between the reference signal
    and the future outcome; ``tail_exponent`` shapes the latent Pareto
    performance draw.
    """

    n: int
    rho: float
    tail_exponent: float = 1.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if not self.tail_exponent > 0.0:
            raise ValueError(f"tail_exponent must be positive, got {self.tail_exponent}")


def synth_cohort(spec: SynthSpec) -> Cohort:
    """Generate a heavy-tailed cohort with tunable persistence.

    Latent reference performance is Pareto distributed. The future value
    blends the normal scores of the reference ranks with fresh noise,
    using the weight 2*sin(pi*rho/6) that makes the population rank
    correlation equal rho (the classical Pearson-to-Spearman map for a
    bivariate Gaussian). Both columns are then percentile-normalized, so
    member scores are exactly their within-cohort ranks on [0, 1].
    """
    rng = generator(spec.rng_seed)
    n = spec.n
    raw_ref = (1.0 - rng.random(n)) ** (-1.0 / spec.tail_exponent)
    ranks = rankdata(raw_ref, method="average")
    normal_scores = ndtri((ranks - 0.5) / n)
    if spec.rho >= 1.0:
        latent_future = normal_scores
    else:
        r = 2.0 * math.sin(math.pi * spec.rho / 6.0)
        noise = rng.standard_normal(n)
        latent_future = r * normal_scores + math.sqrt(max(0.0, 1.0 - r * r)) * noise
    s = percentile_normalize(raw_ref)
    o = percentile_normalize(latent_future)
    width = len(str(n - 1))
    members = tuple(
        CohortMember(f"synth-{i:0{width}d}", float(s[i]), float(o[i])) for i in range(n)
    )
    return Cohort(f"synth(n={n}, rho={spec.rho}, seed={spec.rng_seed})", members)
