"""Bibliometric cohort pipeline.

Turns publication records into windowed performance indicators, normalizes
them to within-group percentile ranks, and builds cohorts that pair each
researcher's reference-period signal ``s`` with a future-period outcome
``o``. Also provides the cross-period diagnostics used to judge how
predictive ``s`` is of ``o`` (rank correlation, joint histograms).

Conventions used throughout:

* windows are inclusive of both endpoint years,
* citations to a publication only count when the citing year falls inside
  the same window as the publication,
* percentile ranks use average ranks for ties, rescaled so the lowest
  value maps to 0 and the highest to 1,
* a researcher with no in-window publications has all-zero raw indicators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.stats import rankdata

YEAR_MIN = 1900
YEAR_MAX = 2100

# 3x3 binomial kernel used for optional histogram smoothing.
SMOOTHING_KERNEL = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]]) / 16.0


@dataclass(frozen=True)
class Publication:
    """One publication with per-year citation counts.

    Per-year counts are required: windowed citation totals cannot be
    recovered from a lifetime count.
    """

    id: str
    year: int
    citations_by_year: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(f"publication year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        for y, c in self.citations_by_year.items():
            if c < 0:
                raise ValueError(f"negative citation count {c} in year {y}")

    def citations_in(self, window: "Window") -> int:
        """Citations received within ``window`` (inclusive)."""
        return sum(c for y, c in self.citations_by_year.items() if window.start_year <= y <= window.end_year)


@dataclass(frozen=True)
class ResearcherRecord:
    """All publications of one researcher at one institute."""

    researcher_id: str
    institute_id: str
    publications: tuple[Publication, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "publications", tuple(self.publications))


@dataclass(frozen=True)
class Window:
    """Inclusive year range [start_year, end_year]."""

    start_year: int
    end_year: int

    def __post_init__(self):
        if self.end_year < self.start_year:
            raise ValueError(f"window end {self.end_year} before start {self.start_year}")

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    def overlaps(self, other: "Window") -> bool:
        return self.start_year <= other.end_year and other.start_year <= self.end_year

    @staticmethod
    def reference_for(year: int) -> "Window":
        """Five-year window ending just before ``year``."""
        return Window(year - 5, year - 1)

    @staticmethod
    def future_for(year: int) -> "Window":
        """Five-year window starting at ``year``."""
        return Window(year, year + 4)


@dataclass(frozen=True)
class IndicatorSet:
    """Raw and percentile-normalized indicators for one researcher/window.

    ``agg_perc`` is the unweighted mean of the three percentile fields and
    serves as the aggregated performance signal.
    """

    productivity: int
    avg_citations: float
    max_citations: int
    productivity_perc: float = float("nan")
    avg_cit_perc: float = float("nan")
    max_cit_perc: float = float("nan")
    agg_perc: float = float("nan")


@dataclass(frozen=True)
class CohortMember:
    researcher_id: str
    s: float
    o: float


@dataclass(frozen=True)
class Cohort:
    """Eligible researchers with reference signal ``s`` and future outcome ``o``."""

    label: str
    members: tuple[CohortMember, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) < 2:
            raise ValueError("cohort needs at least 2 members")
        ids = [m.researcher_id for m in self.members]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate researcher ids in cohort")
        for m in self.members:
            if not (0.0 <= m.s <= 1.0 and 0.0 <= m.o <= 1.0):
                raise ValueError(f"member {m.researcher_id} has s/o outside [0, 1]")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def ids(self) -> list[str]:
        return [m.researcher_id for m in self.members]

    @property
    def scores(self) -> np.ndarray:
        return np.array([m.s for m in self.members], dtype=float)

    @property
    def outcomes(self) -> np.ndarray:
        return np.array([m.o for m in self.members], dtype=float)


def window_indicators(record: ResearcherRecord, window: Window) -> IndicatorSet:
    """Raw productivity / average citation / maximum citation indicators.

    Productivity counts publications whose year lies in the window; each
    such publication contributes only the citations it received within the
    same window. A researcher with nothing in the window gets (0, 0, 0).
    """
    windowed = [p.citations_in(window) for p in record.publications if window.contains(p.year)]
    n = len(windowed)
    if n == 0:
        return IndicatorSet(0, 0.0, 0)
    total = sum(windowed)
    return IndicatorSet(n, total / n, max(windowed))


def filter_eligible(
    records: list[ResearcherRecord], reference: Window, min_pubs: int = 2
) -> list[ResearcherRecord]:
    """Keep researchers with at least ``min_pubs`` publications in the reference window."""
    return [
        r for r in records if sum(1 for p in r.publications if reference.contains(p.year)) >= min_pubs
    ]


def percentile_normalize(values) -> np.ndarray:
    """Replace values by average-rank percentiles rescaled to [0, 1].

    Rank 1 maps to 0 and rank n to 1; tied values share the mean of their
    rank positions, so an all-tied column maps to a constant 0.5. The mean
    of the output is 0.5 by the average-rank identity.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d array of values")
    n = v.size
    if n < 2:
        raise ValueError("cohort too small to rank")
    ranks = rankdata(v, method="average")
    return (ranks - 1.0) / (n - 1.0)


def aggregate_signal(prod_perc, avg_cit_perc, max_cit_perc):
    """Unweighted mean of the three percentile indicators.

    Accepts scalars or equally shaped arrays; inputs must lie in [0, 1].
    """
    a = np.asarray(prod_perc, dtype=float)
    b = np.asarray(avg_cit_perc, dtype=float)
    c = np.asarray(max_cit_perc, dtype=float)
    for name, arr in (("prod_perc", a), ("avg_cit_perc", b), ("max_cit_perc", c)):
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError(f"{name} outside [0, 1]")
    out = (a + b + c) / 3.0
    return float(out) if out.ndim == 0 else out


def indicator_sets(records: list[ResearcherRecord], window: Window) -> list[IndicatorSet]:
    """Raw indicators for every record, percentile-normalized within the group.

    Each indicator column is ranked separately; the aggregated signal is
    the mean of the three percentile columns.
    """
    raw = [window_indicators(r, window) for r in records]
    if len(raw) < 2:
        raise ValueError("cohort too small to rank")
    prod = percentile_normalize([i.productivity for i in raw])
    avg = percentile_normalize([i.avg_citations for i in raw])
    mx = percentile_normalize([i.max_citations for i in raw])
    agg = aggregate_signal(prod, avg, mx)
    return [
        IndicatorSet(i.productivity, i.avg_citations, i.max_citations, p, a, m, g)
        for i, p, a, m, g in zip(raw, prod, avg, mx, agg)
    ]


def build_cohort(
    records: list[ResearcherRecord],
    reference: Window,
    future: Window,
    label: str = "",
) -> Cohort:
    """Build a cohort of reference-eligible researchers from one institute.

    Eligibility (>= 2 reference-window publications) is decided on the
    reference window only; a researcher with zero future-window output is
    kept and ranked at the bottom of the future columns. Normalization is
    within this group of records, so mixing institutes is rejected.
    """
    if reference.overlaps(future):
        raise ValueError("reference and future windows overlap")
    institutes = {r.institute_id for r in records}
    if len(institutes) > 1:
        raise ValueError(f"records span multiple institutes: {sorted(institutes)}")
    eligible = filter_eligible(records, reference)
    if len(eligible) < 2:
        raise ValueError("fewer than 2 eligible researchers")
    ids = [r.researcher_id for r in eligible]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate researcher ids")
    ref_sets = indicator_sets(eligible, reference)
    fut_sets = indicator_sets(eligible, future)
    members = tuple(
        CohortMember(rid, ref.agg_perc, fut.agg_perc)
        for rid, ref, fut in zip(ids, ref_sets, fut_sets)
    )
    if not label:
        label = f"{institutes.pop()}:{reference.start_year}-{future.end_year}"
    return Cohort(label, members)


def spearman(x, y) -> float:
    """Spearman rank correlation with average-rank tie handling.

    Computed as the Pearson correlation of the two rank vectors. Identical
    rank vectors short-circuit to exactly 1.0.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise ValueError("length mismatch")
    if xa.size < 3:
        raise ValueError("need at least 3 observations")
    rx = rankdata(xa, method="average")
    ry = rankdata(ya, method="average")
    if np.array_equal(rx, ry):
        return 1.0
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("zero rank variance")
    r = float(np.dot(dx, dy) / math.sqrt(sx * sy))
    return max(-1.0, min(1.0, r))


def joint_histogram(cohort: Cohort, bins: int, smooth: bool = False) -> np.ndarray:
    """bins x bins grid of member counts over (s, o) on [0, 1]^2.

    Rows index the ``s`` axis, columns the ``o`` axis. Values equal to 1.0
    fall in the last bin (right-closed final bin). Optional smoothing
    convolves with a 3x3 binomial kernel renormalized at the grid edges so
    the total count is preserved.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    grid = np.zeros((bins, bins), dtype=float)
    for m in cohort.members:
        i = min(int(m.s * bins), bins - 1)
        j = min(int(m.o * bins), bins - 1)
        grid[i, j] += 1.0
    if smooth:
        # Per-source renormalization: mass that a plain zero-padded
        # convolution would push off the grid stays with its source cell.
        inside = ndimage.convolve(np.ones_like(grid), SMOOTHING_KERNEL, mode="constant", cval=0.0)
        grid = ndimage.convolve(grid / inside, SMOOTHING_KERNEL, mode="constant", cval=0.0)
    return grid
