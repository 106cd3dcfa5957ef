"""Seeded synthetic datasets for demos and verification.

Nothing here touches real corpora: blobs exercise the clustering and
boundary machinery, and ``feature_table`` fabricates a schema-complete
feature matrix whose latent two-group structure the pipeline should
recover.
"""

from __future__ import annotations

import numpy as np

from .features.schema import FEATURE_NAMES
from .numerics import FeatureMatrix


def two_blobs(n: int, seed: int, separation: float = 8.0, dims: int = 3,
              spread: float = 1.0, frac: float = 0.5
              ) -> tuple[np.ndarray, np.ndarray]:
    """Two spherical Gaussian blobs along the first axis.

    Returns (points, labels) with labels 0/1; blob 0 sits at
    +separation/2 on axis 0, blob 1 at -separation/2.
    """
    rng = np.random.default_rng(seed)
    n0 = int(round(n * frac))
    labels = np.array([0] * n0 + [1] * (n - n0))
    points = rng.normal(0.0, spread, size=(n, dims))
    points[:n0, 0] += separation / 2.0
    points[n0:, 0] -= separation / 2.0
    return points, labels


def feature_table(n: int, seed: int, sli_rate: tuple[float, float] = (0.35, 0.12)
                  ) -> tuple[FeatureMatrix, list[str]]:
    """Schema-complete feature matrix with a latent two-profile structure.

    Rows split into a low-production and a high-production profile; each
    feature is an affine response to the profile plus Gaussian noise.
    ``sli_rate`` gives the SLI labeling probability per profile.
    Returns the matrix and the group labels ("SLI"/"TD").
    """
    rng = np.random.default_rng(seed)
    profile = rng.integers(0, 2, size=n)  # 1 = high production
    p = len(FEATURE_NAMES)
    base = rng.uniform(1.0, 20.0, size=p)
    lift = rng.uniform(2.0, 12.0, size=p) * rng.choice([-1.0, 1.0], size=p)
    noise = rng.uniform(0.5, 2.0, size=p)
    values = base[None, :] + np.outer(profile.astype(float), lift) \
        + rng.normal(0.0, 1.0, size=(n, p)) * noise[None, :]
    groups = ["SLI" if rng.random() < sli_rate[pr] else "TD" for pr in profile]
    ids = tuple(f"child_{i:04d}" for i in range(n))
    return FeatureMatrix(values, FEATURE_NAMES, ids), groups
