"""Adaptive synthetic minority oversampling with exact count accounting.

Follows the classic adaptive scheme: each minority seed point is weighted
by the fraction of majority points among its K nearest neighbors, the
total synthetic budget G = round(beta * (majority - minority)) is split
across seeds by largest remainder so the counts are exact, and each
synthetic sample is a uniform interpolation between a seed and one of its
K nearest minority neighbors.  Generated rows are tagged SYNTHETIC so
downstream contamination checks can find them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tabular import BINARY, Dataset, SYNTHETIC


@dataclass(frozen=True)
class AdasynConfig:
    k_neighbors: int = 5
    beta: float = 1.0  # 1.0 = fully balanced output
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be at least 1")
        if not 0 <= self.beta <= 1:
            raise ValueError("beta must be in [0, 1]")


def allocate_counts(weights, total: int) -> np.ndarray:
    """Split ``total`` units over normalized ``weights`` by largest remainder.

    Counts are floor(weight*total) plus one unit to the largest remainders,
    ties going to the lower index, so the result always sums to ``total``.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.size and (~np.isfinite(w)).any():
        raise ValueError("weights must be finite")
    if w.size and (w < 0).any():
        raise ValueError("weights must be non-negative")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1 (got {float(w.sum())!r})")
    raw = w * total
    counts = np.floor(raw).astype(np.int64)
    short = int(total - counts.sum())
    if short > 0:
        remainders = raw - counts
        # stable sort on negated remainders: ties resolve to the lower index
        for i in np.argsort(-remainders, kind="stable")[:short]:
            counts[i] += 1
    return counts


def _nearest(dists: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest entries, ties to the lower index."""
    order = np.argsort(dists, kind="stable")
    return order[:k]


def _synthesize(x, y, columns, minority_label, k_cfg, g_counts, rng):
    """Generate sum(g_counts) samples; returns (rows, parent index pairs).

    ``g_counts[i]`` samples are interpolated from minority seed i toward a
    uniformly drawn member of its K nearest minority neighbors (K clamped
    to the available neighbor count).  Binary cells are thresholded at 0.5.
    """
    minority_idx = np.flatnonzero(y == minority_label)
    x_min = x[minority_idx]
    m_s = len(minority_idx)
    k_min = min(k_cfg, m_s - 1)
    binary_cols = np.array([c.kind == BINARY for c in columns])

    samples, parents = [], []
    for i, g in enumerate(g_counts):
        if g == 0:
            continue
        if k_min >= 1:
            d = np.linalg.norm(x_min - x_min[i], axis=1)
            d[i] = np.inf  # never pick the seed itself
            neighbors = _nearest(d, k_min)
        else:
            neighbors = np.array([i])  # lone minority point: duplicate it
        for _ in range(g):
            z = neighbors[rng.integers(len(neighbors))]
            lam = rng.random()
            s = x_min[i] + lam * (x_min[z] - x_min[i])
            if binary_cols.any():
                s[binary_cols] = np.where(s[binary_cols] >= 0.5, 1.0, 0.0)
            samples.append(s)
            parents.append((int(minority_idx[i]), int(minority_idx[z])))
    return samples, parents


def adasyn(ds: Dataset, rows, cfg: AdasynConfig) -> Dataset:
    """Oversample the minority class among ``rows``.

    Returns a new dataset holding the selected rows unchanged (in order)
    followed by G synthetic minority rows.  Requires both classes present
    and no missing cells among the selected rows; impute first.
    """
    rows = np.asarray(rows, dtype=np.intp)
    x = ds.x[rows]
    y = ds.y[rows]
    if np.isnan(x).any():
        raise ValueError("selected rows contain missing cells; impute before oversampling")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("oversampling requires both classes among the selected rows")

    minority_label = 1 if n_pos <= n_neg else 0
    m_s = min(n_pos, n_neg)
    m_l = max(n_pos, n_neg)
    g_total = int(math.floor(cfg.beta * (m_l - m_s) + 0.5))

    prov = ds.provenance[rows]
    if g_total == 0:
        return Dataset(columns=ds.columns, x=x.copy(), y=y.copy(),
                       provenance=prov.copy(), meta=dict(ds.meta))

    minority_idx = np.flatnonzero(y == minority_label)
    majority_mask = y != minority_label

    # seed weights: majority density among each seed's K nearest neighbors
    k = cfg.k_neighbors
    delta = np.empty(len(minority_idx))
    for i, mi in enumerate(minority_idx):
        d = np.linalg.norm(x - x[mi], axis=1)
        d[mi] = np.inf
        neighbors = _nearest(d, min(k, len(y) - 1))
        delta[i] = majority_mask[neighbors].sum()
    r = delta / k
    if r.sum() > 0:
        weights = r / r.sum()
    else:
        # no seed has majority neighbors; fall back to uniform weights
        weights = np.full(len(minority_idx), 1.0 / len(minority_idx))
    g_counts = allocate_counts(weights, g_total)

    rng = np.random.default_rng(cfg.seed)
    samples, _ = _synthesize(x, y, ds.columns, minority_label, k, g_counts, rng)

    new_x = np.vstack([x, np.array(samples)])
    new_y = np.concatenate([y, np.full(g_total, minority_label, dtype=y.dtype)])
    new_prov = np.concatenate([prov, np.full(g_total, SYNTHETIC, dtype=object)])
    return Dataset(columns=ds.columns, x=new_x, y=new_y, provenance=new_prov,
                   meta=dict(ds.meta))
