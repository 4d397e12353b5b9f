"""File formats: dataset JSON, cohort/allocation/probability CSV, sidecars.

Floats are written with Python's shortest round-trip representation, so
re-reading a file recovers bit-identical values and re-running a seeded
command reproduces its outputs byte for byte.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .backtest import BacktestResult
from .cohort import Cohort, CohortMember, Publication, ResearcherRecord, Window
from .lottery import DrawResult


def _fmt(x) -> str:
    return repr(float(x))


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".meta.json")


# -- researcher dataset (JSON) ------------------------------------------------


def load_dataset(path) -> list[ResearcherRecord]:
    """Read a researcher dataset from a JSON array.

    Each researcher object needs researcher_id, institute_id and
    publications with per-year citation counts; lifetime-only citation
    data is rejected because windowed counts cannot be derived from it.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("dataset must be a JSON array of researcher objects")
    return [record_from_dict(obj) for obj in data]


def record_from_dict(obj: dict) -> ResearcherRecord:
    for key in ("researcher_id", "institute_id", "publications"):
        if key not in obj:
            raise ValueError(f"researcher object missing field '{key}'")
    pubs = []
    for p in obj["publications"]:
        for key in ("id", "year", "citations_by_year"):
            if key not in p:
                raise ValueError(f"publication missing field '{key}'")
        if not isinstance(p["citations_by_year"], dict):
            raise ValueError("citations_by_year must map year to count")
        cby = {int(y): int(c) for y, c in p["citations_by_year"].items()}
        pubs.append(Publication(str(p["id"]), int(p["year"]), cby))
    return ResearcherRecord(str(obj["researcher_id"]), str(obj["institute_id"]), tuple(pubs))


def save_dataset(records: list[ResearcherRecord], path) -> None:
    data = [
        {
            "researcher_id": r.researcher_id,
            "institute_id": r.institute_id,
            "publications": [
                {
                    "id": p.id,
                    "year": p.year,
                    "citations_by_year": {str(y): c for y, c in sorted(p.citations_by_year.items())},
                }
                for p in r.publications
            ],
        }
        for r in records
    ]
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


# -- cohort CSV ---------------------------------------------------------------


def write_cohort_csv(cohort: Cohort, path, meta: dict | None = None) -> None:
    """Cohort CSV (researcher_id,s,o) plus a metadata sidecar JSON."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["researcher_id", "s", "o"])
        for m in cohort.members:
            writer.writerow([m.researcher_id, _fmt(m.s), _fmt(m.o)])
    sidecar = {"label": cohort.label, "size": len(cohort)}
    sidecar.update(meta or {})
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def read_cohort_csv(path) -> Cohort:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["researcher_id", "s", "o"]:
            raise ValueError(f"{path}: expected header researcher_id,s,o")
        members = tuple(CohortMember(row[0], float(row[1]), float(row[2])) for row in reader if row)
    label = path.stem
    meta_file = sidecar_path(path)
    if meta_file.exists():
        label = json.loads(meta_file.read_text(encoding="utf-8")).get("label", label)
    return Cohort(label, members)


def window_meta(reference: Window, future: Window) -> dict:
    return {
        "reference_window": [reference.start_year, reference.end_year],
        "future_window": [future.start_year, future.end_year],
        "normalization": "within-cohort average-rank percentiles, (rank-1)/(n-1)",
        "signal": "mean of productivity/avg-citation/max-citation percentiles",
    }


# -- allocation and probability CSV -------------------------------------------


def write_allocation_csv(ids, shares, path, params: dict | None = None, budget: float | None = None) -> None:
    """Allocation CSV (researcher_id,share) plus params/budget sidecar."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["researcher_id", "share"])
        for rid, share in zip(ids, shares):
            writer.writerow([rid, _fmt(share)])
    sidecar = {"params": params or {}, "budget": budget}
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def write_probabilities_csv(ids, probabilities, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["researcher_id", "p"])
        for rid, p in zip(ids, probabilities):
            writer.writerow([rid, _fmt(p)])


# -- histogram CSV ------------------------------------------------------------


def write_histogram_csv(grid: np.ndarray, path) -> None:
    """Row-major grid dump; the first line records the bin count."""
    grid = np.asarray(grid)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"bins={grid.shape[0]}\n")
        for row in grid:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_histogram_csv(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or not lines[0].startswith("bins="):
        raise ValueError(f"{path}: first line must be bins=<n>")
    bins = int(lines[0].split("=", 1)[1])
    grid = np.array([[float(v) for v in line.split(",")] for line in lines[1 : bins + 1]])
    if grid.shape != (bins, bins):
        raise ValueError(f"{path}: expected a {bins}x{bins} grid, got {grid.shape}")
    return grid


# -- lottery draw JSON ---------------------------------------------------------


def draw_to_dict(result: DrawResult, ids: list[str] | None = None) -> dict:
    """DrawResult as a JSON-ready dict; amounts as decimal strings."""
    n = len(result.selected)
    names = ids if ids is not None else [str(i) for i in range(max(result.selected) + 1 if result.selected else 0)]
    params = result.allocation.params
    return {
        "rng_seed": result.rng_seed,
        "params": asdict(params) if params is not None and not isinstance(params, dict) else (params or {}),
        "selected": list(result.selected),
        "allocation": [
            {"researcher_id": names[idx], "amount": _fmt(result.allocation.shares[j])}
            for j, idx in enumerate(result.selected)
        ],
    }


def write_draw_json(result: DrawResult, path, ids: list[str] | None = None) -> None:
    Path(path).write_text(json.dumps(draw_to_dict(result, ids), indent=2) + "\n", encoding="utf-8")


# -- backtest exports ----------------------------------------------------------


def write_backtest_csv(result: BacktestResult, path) -> None:
    """One row per grid point; stderr column only when Monte-Carlo based."""
    rows = result.table
    param_names = list(rows[0].params.keys())
    has_stderr = any(r.stderr is not None for r in rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(param_names + ["utility"] + (["stderr"] if has_stderr else []))
        for r in rows:
            row = [_fmt(r.params[name]) if name != "k" else str(r.params[name]) for name in param_names]
            row.append(_fmt(r.utility))
            if has_stderr:
                row.append(_fmt(r.stderr) if r.stderr is not None else "")
            writer.writerow(row)


def backtest_summary(result: BacktestResult) -> dict:
    return {
        "best_params": result.best.params,
        "best_utility": result.best.utility,
        "n_draws": result.n_draws,
        "root_seed": result.root_seed,
    }


def write_backtest_summary(result: BacktestResult, path) -> None:
    Path(path).write_text(json.dumps(backtest_summary(result), indent=2) + "\n", encoding="utf-8")
