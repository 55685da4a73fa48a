"""Fingerprint-based localization on stacks of coverage maps.

A fingerprint is the vector of map values at one pixel; the database keys
fingerprints to pixel-center positions in meters.  Position estimates are
the unweighted mean of the k nearest database positions in fingerprint
space (Euclidean, ties broken toward lower database index).
"""

import math

import numpy as np


class FingerprintDB:
    def __init__(self, positions, vectors, h_x=1.0, h_y=1.0):
        positions = np.asarray(positions, dtype=np.float64)
        vectors = np.asarray(vectors, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValueError("positions must be (N, 2)")
        if vectors.ndim != 2 or vectors.shape[0] != positions.shape[0]:
            raise ValueError("vectors must be (N, M) aligned with positions")
        self.positions = positions
        self.vectors = vectors
        self.h_x = float(h_x)
        self.h_y = float(h_y)

    @property
    def m(self):
        """Number of maps each fingerprint spans."""
        return self.vectors.shape[1]


def build_db(maps, stride):
    """Sample every map on a stride-spaced pixel grid, row-major.

    All maps must share their shape; positions use the pixel-center
    convention of the first map.
    """
    if not maps:
        raise ValueError("need at least one map")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    first = maps[0]
    h, w = first.height, first.width
    for f in maps[1:]:
        if (f.height, f.width) != (h, w):
            raise ValueError("all maps must share one shape")
    rows = range(0, h, stride)
    cols = range(0, w, stride)
    n = len(rows) * len(cols)
    positions = np.empty((n, 2), dtype=np.float64)
    vectors = np.empty((n, len(maps)), dtype=np.float64)
    idx = 0
    for j in rows:
        for i in cols:
            positions[idx] = ((i + 0.5) * first.h_x, (j + 0.5) * first.h_y)
            for m, f in enumerate(maps):
                vectors[idx, m] = f.data[j, i]
            idx += 1
    return FingerprintDB(positions=positions, vectors=vectors,
                         h_x=first.h_x, h_y=first.h_y)


def knn_locate(db, query, k):
    """Mean position of the k nearest fingerprints to ``query``."""
    n = db.vectors.shape[0]
    if not 1 <= k <= n:
        raise ValueError("k must lie in [1, %d], got %r" % (n, k))
    q = np.asarray(query, dtype=np.float64)
    d = np.sqrt(((db.vectors - q) ** 2).sum(axis=1))
    idx = np.argsort(d, kind="stable")[:k]
    p = db.positions[idx].mean(axis=0)
    return (float(p[0]), float(p[1]))


def evaluate_localization(db_pred, db_truth, n_queries, k, rng, noise_sigma=0.0):
    """Mean position error when true fingerprints are looked up in db_pred.

    Queries are db_truth fingerprints at uniformly drawn indices, optionally
    perturbed with iid Gaussian noise; errors are Euclidean in meters.
    """
    n = db_truth.positions.shape[0]
    idx = rng.integers(0, n, size=n_queries)
    total = 0.0
    for i in idx:
        q = db_truth.vectors[i]
        if noise_sigma > 0.0:
            q = q + rng.normal(0.0, noise_sigma, size=q.shape)
        est = knn_locate(db_pred, q, k)
        px, py = db_truth.positions[i]
        total += math.hypot(est[0] - px, est[1] - py)
    return total / n_queries
