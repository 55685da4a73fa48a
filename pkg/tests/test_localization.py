"""Fingerprint database construction and KNN position estimation."""

import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from rmkit.grids import ScalarField, UnitTag
from rmkit.localization import FingerprintDB, build_db, evaluate_localization, knn_locate


def maps_from(arrays, h=1.0):
    return [ScalarField(a, h_x=h, h_y=h, unit=UnitTag.NORMALIZED_GRAY) for a in arrays]


def brute_force_knn(vectors, positions, query, k):
    d = np.sqrt(((vectors - query) ** 2).sum(axis=1))
    idx = sorted(range(len(d)), key=lambda i: (d[i], i))[:k]
    return positions[idx].mean(axis=0)


def test_build_db_single_fingerprint(rng):
    m = maps_from([rng.uniform(0, 1, (8, 8))])
    db = build_db(m, stride=8)
    assert db.vectors.shape == (1, 1)
    assert db.positions.shape == (1, 2)
    assert tuple(db.positions[0]) == (0.5, 0.5)  # center of pixel (0, 0)


def test_build_db_exhaustive_stride():
    vals = np.arange(16, dtype=np.float64).reshape(4, 4)
    db = build_db(maps_from([vals]), stride=1)
    assert db.vectors.shape == (16, 1)
    # row-major ordering of fingerprints
    assert np.array_equal(db.vectors[:, 0], vals.ravel())
    assert tuple(db.positions[5]) == (1.5, 1.5)  # pixel (1, 1)


def test_build_db_vector_entries_per_map(rng):
    arrays = [rng.uniform(0, 1, (6, 6)) for _ in range(3)]
    db = build_db(maps_from(arrays), stride=2)
    assert db.m == 3
    assert db.vectors.shape == (9, 3)
    # fingerprint at pixel (2, 4): stride-2 grid, row-major index 1*3+2
    fp = db.vectors[5]
    for m in range(3):
        assert fp[m] == arrays[m][2, 4]


def test_build_db_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        build_db([], stride=1)
    a = maps_from([np.zeros((4, 4)), np.zeros((4, 5))])
    with pytest.raises(ValueError):
        build_db(a, stride=1)


def test_knn_exact_fingerprint_k1(rng):
    arrays = [rng.uniform(0, 1, (8, 8)) for _ in range(4)]
    db = build_db(maps_from(arrays), stride=1)
    target = 29  # arbitrary fingerprint index
    est = knn_locate(db, db.vectors[target], k=1)
    assert est == tuple(db.positions[target])


def test_knn_symmetric_five_neighbors():
    # five fingerprints nearly equidistant from the query, positions symmetric
    # about (5, 5); the rest are far away in fingerprint space
    positions = np.array([
        [5.0, 3.0], [5.0, 7.0], [3.0, 5.0], [7.0, 5.0], [5.0, 5.0],
        [50.0, 50.0], [60.0, 60.0],
    ])
    vectors = np.array([
        [1.0], [1.01], [0.99], [1.02], [0.98],
        [9.0], [11.0],
    ])
    db = FingerprintDB(positions=positions, vectors=vectors, h_x=1.0, h_y=1.0)
    est = knn_locate(db, np.array([1.0]), k=5)
    assert est == (5.0, 5.0)


def test_knn_tie_breaks_by_lower_index():
    positions = np.array([[1.0, 1.0], [3.0, 3.0], [9.0, 9.0]])
    vectors = np.array([[2.0], [2.0], [5.0]])  # first two identical
    db = FingerprintDB(positions=positions, vectors=vectors, h_x=1.0, h_y=1.0)
    assert knn_locate(db, np.array([2.0]), k=1) == (1.0, 1.0)


def test_knn_matches_brute_force(rng):
    for _ in range(50):
        arrays = [rng.uniform(0, 1, (8, 8)) for _ in range(3)]
        db = build_db(maps_from(arrays), stride=1)
        q = rng.uniform(0, 1, 3)
        k = int(rng.integers(1, 8))
        est = np.array(knn_locate(db, q, k))
        oracle = brute_force_knn(db.vectors, db.positions, q, k)
        assert np.allclose(est, oracle, atol=1e-12)


def test_knn_rejects_bad_k(rng):
    db = build_db(maps_from([rng.uniform(0, 1, (3, 3))]), stride=1)
    with pytest.raises(ValueError):
        knn_locate(db, np.zeros(1), k=0)
    with pytest.raises(ValueError):
        knn_locate(db, np.zeros(1), k=10)


def test_evaluate_identical_dbs_zero_error(rng):
    arrays = [rng.uniform(0, 1, (10, 10)) for _ in range(5)]
    db = build_db(maps_from(arrays), stride=1)
    err = evaluate_localization(db, db, n_queries=200, k=1, rng=np.random.default_rng(2))
    assert err == 0.0


def test_evaluate_common_vector_offset_keeps_k1_exact(rng):
    arrays = [rng.uniform(0, 1, (8, 8)) for _ in range(4)]
    truth = build_db(maps_from(arrays), stride=1)
    offset = 0.001  # far smaller than typical fingerprint separation
    sep = np.sqrt(((truth.vectors[None] - truth.vectors[:, None]) ** 2).sum(-1))
    np.fill_diagonal(sep, np.inf)
    assert sep.min() > 2 * offset * math.sqrt(truth.m)  # ranking provably intact
    pred = FingerprintDB(positions=truth.positions, vectors=truth.vectors + offset,
                         h_x=truth.h_x, h_y=truth.h_y)
    err = evaluate_localization(pred, truth, n_queries=100, k=1,
                                rng=np.random.default_rng(3))
    assert err == 0.0


def test_evaluate_matches_brute_force_reimplementation(rng):
    arrays = [rng.uniform(0, 1, (6, 6)) for _ in range(5)]
    truth = build_db(maps_from(arrays), stride=1)
    pred_vecs = truth.vectors + rng.normal(0, 0.05, truth.vectors.shape)
    pred = FingerprintDB(positions=truth.positions, vectors=pred_vecs,
                         h_x=1.0, h_y=1.0)
    seed = 77
    err = evaluate_localization(pred, truth, n_queries=60, k=3,
                                rng=np.random.default_rng(seed))
    # independent loop: same query draw protocol, brute-force knn
    r2 = np.random.default_rng(seed)
    idx = r2.integers(0, len(truth.positions), size=60)
    total = 0.0
    for q in idx:
        est = brute_force_knn(pred.vectors, pred.positions, truth.vectors[q], 3)
        total += math.hypot(est[0] - truth.positions[q][0], est[1] - truth.positions[q][1])
    assert err == pytest.approx(total / 60, rel=1e-12)


def test_evaluate_noise_flag_perturbs_queries(rng):
    arrays = [rng.uniform(0, 1, (8, 8)) for _ in range(3)]
    db = build_db(maps_from(arrays), stride=1)
    err = evaluate_localization(db, db, n_queries=150, k=1,
                                rng=np.random.default_rng(4), noise_sigma=0.5)
    assert err > 0.0


def test_error_decreases_as_pred_approaches_truth(rng):
    arrays = [rng.uniform(0, 1, (10, 10)) for _ in range(4)]
    truth = build_db(maps_from(arrays), stride=1)
    corrupt = truth.vectors + rng.normal(0, 0.6, truth.vectors.shape)
    alphas = np.linspace(0.0, 1.0, 12)
    errs = []
    for a in alphas:
        vecs = a * truth.vectors + (1 - a) * corrupt
        pred = FingerprintDB(positions=truth.positions, vectors=vecs, h_x=1.0, h_y=1.0)
        errs.append(evaluate_localization(pred, truth, n_queries=150, k=3,
                                          rng=np.random.default_rng(8)))
    rho = spearmanr(alphas, errs).statistic
    assert rho <= -0.9  # error falls as predictions approach truth
