"""Deterministic explore/exploit rule: allocation curves and concentration.

Sweeps the concentration exponent to show how the budget share assigned
to each score level steepens, then demonstrates the exploration blend and
per-researcher bounds.
"""

import numpy as np

from fundalloc import DetParams, allocate, allocation_curve, gini, top_decile_share

# --- allocation curves over an even score grid ------------------------------
print("share of budget by score (21-point grid, alpha=0):")
print("gamma   s=0.5    s=0.75   s=1.0    gini")
for gamma in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
    curve = allocation_curve(DetParams(alpha=0.0, lam=0.0, gamma=gamma), 21)
    shares = dict(zip(np.round(curve[:, 0], 3), curve[:, 1]))
    g = gini(curve[:, 1])
    print(f"{gamma:5.1f}  {shares[0.5]:.5f}  {shares[0.75]:.5f}  {shares[1.0]:.5f}  {g:.3f}")

# --- exploration blends -----------------------------------------------------
scores = np.array([0.1, 0.4, 0.7, 1.0])
print("\nmixing exploration in (scores 0.1/0.4/0.7/1.0, gamma=8):")
for alpha, lam in ((0.0, 0.0), (0.3, 0.5), (0.3, 1.0), (1.0, 1.0)):
    b = allocate(scores, 1.0, DetParams(alpha, lam, 8.0)).shares
    print(f"alpha={alpha} lambda={lam}: " + " ".join(f"{x:.3f}" for x in b)
          + f"  top-decile={top_decile_share(b):.3f}")

# --- bounds -----------------------------------------------------------------
print("\nper-researcher bounds [0.05, 0.40] on a concentrated allocation:")
unbounded = allocate(scores, 1.0, DetParams(0.0, 0.0, 8.0))
bounded = allocate(scores, 1.0, DetParams(0.0, 0.0, 8.0, lower_bound=0.05, upper_bound=0.40))
for s, u, b in zip(scores, unbounded.shares, bounded.shares):
    print(f"  score {s:.1f}: {u:.3f} -> {b:.3f}")
print(f"totals: {unbounded.shares.sum():.6f} -> {bounded.shares.sum():.6f}")
