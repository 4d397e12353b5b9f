"""Research-funding allocation under heavy-tailed uncertainty.

Subpackages cover the full pipeline: bibliometric cohort construction
(`cohort`, `openalex`), the deterministic explore/exploit allocation rule
(`deterministic`), the softmax biased lottery (`lottery`), backtesting and
parameter optimization (`backtest`), file formats (`formats`), and the
HTTP service / CLI front ends (`service`, `cli`).
"""

from .backtest import (
    BacktestResult,
    GridSpec,
    SynthSpec,
    grid_search_det,
    mc_expected_utility,
    optimize_stoch,
    realized_utility,
    synth_cohort,
)
from .cohort import (
    Cohort,
    CohortMember,
    IndicatorSet,
    Publication,
    ResearcherRecord,
    Window,
    aggregate_signal,
    build_cohort,
    filter_eligible,
    indicator_sets,
    joint_histogram,
    percentile_normalize,
    spearman,
    window_indicators,
)
from .deterministic import (
    Allocation,
    DetParams,
    InfeasibleBoundsError,
    allocate,
    allocation_curve,
    apply_bounds,
    gini,
    top_decile_share,
)
from .lottery import (
    DrawResult,
    LotteryPolicy,
    PureExploitLimitError,
    StochParams,
    allocate_selected,
    draw_lottery,
    exploit_topk,
    objective_value,
    run_lottery,
    selection_probabilities,
)
from .rng import derive_seed, fresh_seed, generator

__version__ = "0.1.0"
