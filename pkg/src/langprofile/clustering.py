"""K-means over component scores plus the validation toolkit around it:
silhouette model selection, Ward / DBSCAN cross-checks, boundary-case and
outlier detection, chance-corrected agreement metrics, and per-cluster
effect statistics.

Determinism contract: every stochastic routine takes an explicit seed;
k-means restarts draw child seeds from ``SeedSequence(seed).spawn``, so
serial and parallel execution produce identical results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import stdtr

from .errors import (
    DegenerateInput,
    LengthMismatch,
    SingleCluster,
    TinyCluster,
)


def _as_points(points) -> np.ndarray:
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _pairwise_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


# -- k-means ----------------------------------------------------------------

@dataclass(frozen=True)
class ClusterResult:
    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    seed: int
    n_init: int


def _plus_plus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    d2 = np.sum((X - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0.0:
            probs = d2 / total
        else:
            probs = np.full(n, 1.0 / n)
        centroids[j] = X[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((X - centroids[j]) ** 2, axis=1))
    return centroids


def _assign(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = np.sum((X[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1), d2


def _lloyd(X: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 300,
           history: list | None = None) -> tuple[np.ndarray, np.ndarray, float]:
    centroids = _plus_plus_init(X, k, rng)
    assign, d2 = _assign(X, centroids)
    for _ in range(max_iter):
        # recompute centroids; repair empties by reseeding to farthest points
        own = d2[np.arange(len(X)), assign]
        used: set[int] = set()
        for j in range(k):
            members = assign == j
            if members.any():
                centroids[j] = X[members].mean(axis=0)
            else:
                order = np.argsort(-own, kind="stable")
                pick = next(int(i) for i in order if int(i) not in used)
                used.add(pick)
                centroids[j] = X[pick]
        new_assign, d2 = _assign(X, centroids)
        if history is not None:
            history.append(float(d2[np.arange(len(X)), new_assign].sum()))
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    inertia = float(d2[np.arange(len(X)), assign].sum())
    return assign, centroids, inertia


def kmeans(points, k: int, seed: int, n_init: int = 32,
           max_iter: int = 300) -> ClusterResult:
    """Best-of-``n_init`` k-means++ / Lloyd runs, selected by inertia."""
    X = _as_points(points)
    n = X.shape[0]
    if k < 1 or n < k:
        raise DegenerateInput(f"need n >= k >= 1, got n={n} k={k}")
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for child in np.random.SeedSequence(seed).spawn(n_init):
        rng = np.random.default_rng(child)
        run = _lloyd(X, k, rng, max_iter)
        if best is None or run[2] < best[2]:
            best = run
    assign, centroids, inertia = best
    return ClusterResult(k, assign, centroids, inertia, seed, n_init)


# -- silhouette ---------------------------------------------------------------

def _silhouette_from_distances(D: np.ndarray, assignments: np.ndarray) -> float:
    labels = np.unique(assignments)
    if labels.size < 2:
        raise SingleCluster("silhouette needs at least 2 clusters")
    n = D.shape[0]
    sums = np.stack([D[:, assignments == lab].sum(axis=1) for lab in labels], axis=1)
    sizes = np.array([(assignments == lab).sum() for lab in labels])
    total = 0.0
    for i in range(n):
        own = int(np.flatnonzero(labels == assignments[i])[0])
        if sizes[own] == 1:
            continue  # singleton convention: s = 0
        a = sums[i, own] / (sizes[own] - 1)
        b = min(sums[i, lab] / sizes[lab] for lab in range(len(labels)) if lab != own)
        denom = max(a, b)
        if denom > 0.0:
            total += (b - a) / denom
    return total / n


def silhouette(points, assignments) -> float:
    """Mean per-point silhouette ((b - a) / max(a, b))."""
    X = _as_points(points)
    assignments = np.asarray(assignments)
    if len(assignments) != len(X):
        raise LengthMismatch("assignments length does not match points")
    return _silhouette_from_distances(_pairwise_distances(X), assignments)


def silhouette_sweep(points, k_range, seed: int, n_init: int = 32
                     ) -> list[tuple[int, float]]:
    """Mean silhouette of a fresh k-means fit for each k (fixed seed)."""
    X = _as_points(points)
    D = _pairwise_distances(X)
    out = []
    for k in k_range:
        res = kmeans(X, k, seed, n_init)
        out.append((k, _silhouette_from_distances(D, res.assignments)))
    return out


# -- hierarchical (Ward) and DBSCAN cross-checks ------------------------------

def ward_linkage(points, k: int) -> np.ndarray:
    """Agglomerative Ward clustering cut at k clusters.

    Lance-Williams recurrence on squared Euclidean distances; merge
    choice and final labels are deterministic (first minimum wins,
    clusters numbered by first member index).
    """
    X = _as_points(points)
    n = X.shape[0]
    if k < 1 or n < k:
        raise DegenerateInput(f"need n >= k >= 1, got n={n} k={k}")
    D = _pairwise_distances(X) ** 2
    np.fill_diagonal(D, np.inf)
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    members: list[list[int] | None] = [[i] for i in range(n)]
    for _ in range(n - k):
        # inactive rows/cols hold inf, so a plain argmin finds the merge pair
        i, j = divmod(int(np.argmin(D)), n)
        if i > j:
            i, j = j, i
        ni, nj, dij = sizes[i], sizes[j], D[i, j]
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        if others.size:
            nl = sizes[others]
            upd = ((ni + nl) * D[i, others] + (nj + nl) * D[j, others]
                   - nl * dij) / (ni + nj + nl)
            D[i, others] = upd
            D[others, i] = upd
        active[j] = False
        D[j, :] = np.inf
        D[:, j] = np.inf
        sizes[i] = ni + nj
        members[i] = members[i] + members[j]
        members[j] = None
    labels = np.empty(n, dtype=int)
    next_label = 0
    for i in range(n):
        if active[i]:
            labels[np.array(members[i])] = next_label
            next_label += 1
    return labels


def dbscan(points, eps: float, min_pts: int) -> np.ndarray:
    """Core/border/noise labeling; noise rows get label -1."""
    if eps <= 0 or min_pts < 1:
        raise DegenerateInput("need eps > 0 and min_pts >= 1")
    X = _as_points(points)
    n = X.shape[0]
    D = _pairwise_distances(X)
    neighbors = [np.flatnonzero(D[i] <= eps) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighbors])
    labels = np.full(n, -1, dtype=int)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        frontier = list(neighbors[i])
        pos = 0
        while pos < len(frontier):
            j = int(frontier[pos])
            pos += 1
            if labels[j] == -1:
                labels[j] = cluster
                if core[j]:
                    frontier.extend(neighbors[j])
        cluster += 1
    return labels


# -- boundary cases and outliers ----------------------------------------------

@dataclass(frozen=True)
class BoundaryReport:
    indices: tuple[int, ...]
    threshold: float
    percentile: float
    pc1_mean: float
    pc1_sd: float
    outcome_ratio: float
    deltas: np.ndarray


def boundary_cases(points, centroids, outcomes=None,
                   percentile: float = 5.0) -> BoundaryReport:
    """Rows whose two nearest centroids are nearly equidistant.

    delta = |d(nearest) - d(second nearest)|; the flagging threshold is
    the linear-interpolation percentile of the deltas, ties included.
    """
    X = _as_points(points)
    C = _as_points(centroids)
    if C.shape[0] < 2:
        raise DegenerateInput("boundary analysis needs >= 2 centroids")
    d = np.sqrt(np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2))
    d.sort(axis=1)
    deltas = np.abs(d[:, 1] - d[:, 0])
    threshold = float(np.percentile(deltas, percentile))
    flagged = np.flatnonzero(deltas <= threshold)
    pc1 = X[flagged, 0]
    pc1_mean = float(pc1.mean()) if flagged.size else 0.0
    pc1_sd = float(pc1.std(ddof=1)) if flagged.size > 1 else 0.0
    if outcomes is not None and flagged.size:
        ratio = float(np.asarray(outcomes, dtype=float)[flagged].mean())
    else:
        ratio = 0.0
    return BoundaryReport(tuple(int(i) for i in flagged), threshold,
                          float(percentile), pc1_mean, pc1_sd, ratio, deltas)


def detect_outliers(points, centroids) -> np.ndarray:
    """Rows farther than mean + 3 sd from their assigned centroid."""
    X = _as_points(points)
    C = _as_points(centroids)
    assign, d2 = _assign(X, C)
    dist = np.sqrt(d2[np.arange(len(X)), assign])
    flagged = np.zeros(len(X), dtype=bool)
    for j in range(C.shape[0]):
        members = assign == j
        if not members.any():
            continue
        d = dist[members]
        cut = d.mean() + 3.0 * d.std(ddof=0)
        flagged[members] = d > cut
    return np.flatnonzero(flagged)


# -- agreement metrics ----------------------------------------------------------

def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"label vectors differ: {a.shape} vs {b.shape}")
    return a, b


def _contingency(a, b) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    C = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(C, (ia, ib), 1)
    return C, C.sum(axis=1), C.sum(axis=0)


def ari(a, b) -> float:
    """Adjusted Rand index via the pair-counting contingency formula."""
    a, b = _check_pair(a, b)
    C, rows, cols = _contingency(a, b)

    def comb2(x):
        return x * (x - 1) // 2

    index = int(comb2(C).sum())
    sum_a = int(comb2(rows).sum())
    sum_b = int(comb2(cols).sum())
    total = comb2(len(a))
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    denom = max_index - expected
    if denom == 0.0:
        return 1.0
    return (index - expected) / denom


def _entropy(sizes: np.ndarray, n: int) -> float:
    # written as p * log(n / count) to share rounding with the MI terms
    return float(sum((c / n) * math.log(n / c) for c in sizes if c > 0))


def _mutual_information(C: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                        n: int) -> float:
    mi = 0.0
    for i in range(C.shape[0]):
        for j in range(C.shape[1]):
            nij = int(C[i, j])
            if nij:
                mi += (nij / n) * math.log((n * nij) / (int(rows[i]) * int(cols[j])))
    return mi


def _expected_mi(rows: np.ndarray, cols: np.ndarray, n: int) -> float:
    """Hypergeometric expectation of MI under fixed marginals."""
    lg = math.lgamma
    emi = 0.0
    for ai in (int(x) for x in rows):
        for bj in (int(x) for x in cols):
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            for nij in range(lo, hi + 1):
                term = (nij / n) * math.log((n * nij) / (ai * bj))
                log_p = (lg(ai + 1) + lg(bj + 1) + lg(n - ai + 1) + lg(n - bj + 1)
                         - lg(n + 1) - lg(nij + 1) - lg(ai - nij + 1)
                         - lg(bj - nij + 1) - lg(n - ai - bj + nij + 1))
                emi += term * math.exp(log_p)
    return emi


def ami(a, b) -> float:
    """Adjusted mutual information, max normalization."""
    a, b = _check_pair(a, b)
    C, rows, cols = _contingency(a, b)
    n = len(a)
    ha = _entropy(rows, n)
    hb = _entropy(cols, n)
    if ha == 0.0 and hb == 0.0:
        return 1.0  # both partitions trivial and identical
    mi = _mutual_information(C, rows, cols, n)
    emi = _expected_mi(rows, cols, n)
    denom = max(ha, hb) - emi
    if abs(denom) < 1e-15:
        return 1.0 if abs(mi - emi) < 1e-15 else 0.0
    return (mi - emi) / denom


def best_mapping_accuracy(a, b) -> float:
    """Classification accuracy maximized over label permutations."""
    a, b = _check_pair(a, b)
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    k = max(ia.max(), ib.max()) + 1
    if k > 6:
        raise ValueError("exhaustive mapping supports at most 6 labels")
    best = 0.0
    for perm in itertools.permutations(range(k)):
        table = np.array(perm)
        best = max(best, float(np.mean(ia == table[ib])))
    return best


# -- cluster profiles and effect statistics -------------------------------------

@dataclass(frozen=True)
class ClusterProfile:
    cluster: int
    size: int
    pc_means: tuple[float, ...]
    outcome_ratio: float


def cluster_profiles(assignments, scores, outcomes) -> list[ClusterProfile]:
    """Size, leading-component means, and outcome share per cluster."""
    assignments = np.asarray(assignments)
    scores = _as_points(scores)
    outcomes = np.asarray(outcomes, dtype=float)
    n_pcs = min(3, scores.shape[1])
    profiles = []
    for lab in np.unique(assignments):
        members = assignments == lab
        pc_means = tuple(float(scores[members, j].mean()) for j in range(n_pcs))
        profiles.append(ClusterProfile(int(lab), int(members.sum()), pc_means,
                                       float(outcomes[members].mean())))
    return profiles


@dataclass(frozen=True)
class EffectStats:
    feature: str
    mean0: float
    mean1: float
    p_value: float
    cohens_d: float


def welch_cohen(x0, x1) -> tuple[float, float]:
    """Two-sided Welch t-test p-value and pooled-sd Cohen's d."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    n0, n1 = len(x0), len(x1)
    if n0 < 2 or n1 < 2:
        raise TinyCluster("effect statistics need >= 2 samples per group")
    m0, m1 = x0.mean(), x1.mean()
    v0 = x0.var(ddof=1)
    v1 = x1.var(ddof=1)
    se2 = v0 / n0 + v1 / n1
    diff = m0 - m1
    pooled = math.sqrt(((n0 - 1) * v0 + (n1 - 1) * v1) / (n0 + n1 - 2))
    if se2 == 0.0:
        if diff == 0.0:
            return 1.0, 0.0
        return 0.0, math.copysign(math.inf, diff)
    t = diff / math.sqrt(se2)
    df = se2 ** 2 / ((v0 / n0) ** 2 / (n0 - 1) + (v1 / n1) ** 2 / (n1 - 1))
    p = 2.0 * float(stdtr(df, -abs(t)))
    d = diff / pooled if pooled > 0.0 else math.copysign(math.inf, diff)
    if diff == 0.0:
        d = 0.0
    return p, d


def compare_features(matrix_values, col_names, assignments,
                     features) -> list[EffectStats]:
    """Welch p and Cohen's d between clusters 0 and 1 for named features."""
    assignments = np.asarray(assignments)
    V = np.asarray(matrix_values, dtype=float)
    name_to_col = {name: j for j, name in enumerate(col_names)}
    g0 = assignments == 0
    g1 = assignments == 1
    out = []
    for feat in features:
        j = name_to_col[feat]
        x0, x1 = V[g0, j], V[g1, j]
        p, d = welch_cohen(x0, x1)
        out.append(EffectStats(feat, float(x0.mean()), float(x1.mean()), p, d))
    return out
