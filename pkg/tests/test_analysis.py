import numpy as np
import pytest
from itertools import combinations

from protolearn import InputError, class_geometry, pc_id


def orthogonal_cluster_data(num_classes=10, per_class=30, d=64, noise=1e-3, seed=0):
    rng = np.random.default_rng(seed)
    X, y = [], []
    for k in range(num_classes):
        center = np.zeros(d)
        center[k] = 1.0
        X.append(center + noise * rng.standard_normal((per_class, d)))
        y.extend([k] * per_class)
    return np.vstack(X), np.array(y)


class TestPcId:
    def test_equal_eigenvalue_subspace(self):
        # +-e_i for i < 10: mean zero, 10 exactly equal eigenvalues,
        # P(9) = 0.9 -> pc_id = 9
        k, d = 10, 16
        X = np.vstack([np.eye(k, d), -np.eye(k, d)])
        report = pc_id(X)
        assert report.pc_id == 9
        np.testing.assert_allclose(report.cumulative[k - 1], 1.0, atol=1e-9)

    def test_line_in_2d(self):
        t = np.linspace(-1, 1, 50)[:, None]
        X = t * np.array([[1.0, 2.0]])
        assert pc_id(X).pc_id == 1

    def test_orthogonal_clusters_k_minus_1(self):
        X, _ = orthogonal_cluster_data()
        assert pc_id(X).pc_id == 9

    def test_cross_check_eigh_oracle(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((40, 12)) @ np.diag(rng.uniform(0.1, 3.0, 12))
        report = pc_id(X)
        # independent decomposition: explicit covariance + eigh
        Xc = X - X.mean(axis=0)
        Xn = Xc / np.linalg.norm(Xc, axis=1, keepdims=True)
        cov = Xn.T @ Xn / (Xn.shape[0] - 1)
        eig = np.sort(np.linalg.eigh(cov)[0])[::-1]
        np.testing.assert_allclose(report.eigenvalues[: len(eig)], eig, atol=1e-9)
        cum = np.cumsum(eig) / eig.sum()
        assert report.pc_id == int(np.argmax(cum >= 0.9 - 1e-12)) + 1

    def test_monotone_cumulative_and_bounds(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((25, 9))
        report = pc_id(X)
        assert np.all(np.diff(report.cumulative) >= -1e-12)
        assert abs(report.cumulative[-1] - 1.0) < 1e-9
        assert report.pc_id <= min(X.shape[0] - 1, X.shape[1])

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((30, 7))
        a, b = pc_id(X), pc_id(3.7 * X)
        assert a.pc_id == b.pc_id
        np.testing.assert_allclose(a.cumulative, b.cumulative, atol=1e-9)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((30, 7))
        Q, _ = np.linalg.qr(rng.standard_normal((7, 7)))
        a, b = pc_id(X), pc_id(X @ Q)
        assert a.pc_id == b.pc_id
        np.testing.assert_allclose(a.cumulative, b.cumulative, atol=1e-9)

    def test_identical_rows_degenerate(self):
        with pytest.raises(InputError):
            pc_id(np.ones((10, 4)))


class TestClassGeometry:
    def test_orthogonal_means_zero_intra(self):
        X = np.vstack([np.tile(np.eye(3)[k], (4, 1)) for k in range(3)])
        y = np.repeat([0, 1, 2], 4)
        report = class_geometry(X, y)
        assert report.pi_intra == pytest.approx(0.0, abs=1e-12)
        assert report.pi_inter == pytest.approx(1.0)
        assert report.fsu_ratio == pytest.approx(0.0, abs=1e-12)

    def test_identical_means_degenerate(self):
        X = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
        X = X + np.array([[0, 1e-9], [0, -1e-9], [0, 1e-9], [0, -1e-9]])
        y = np.array([0, 0, 1, 1])
        report = class_geometry(X, y)
        assert report.degenerate
        assert report.fsu_ratio is None

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((24, 6)) + 2.0
        y = rng.integers(0, 3, 24)
        while len(np.unique(y)) < 3 or min(np.bincount(y)) < 2:
            y = rng.integers(0, 3, 24)
        report = class_geometry(X, y)

        def cosd(a, b):
            return 1 - (a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))

        classes = np.unique(y)
        means = {c: X[y == c].mean(0) for c in classes}
        inter = [cosd(means[a], means[b]) for a, b in combinations(classes, 2)]
        intra, pairs = 0.0, 0
        for c in classes:
            grp = X[y == c]
            for i, j in combinations(range(len(grp)), 2):
                intra += cosd(grp[i], grp[j])
                pairs += 1
        assert report.pi_inter == pytest.approx(np.mean(inter), rel=1e-12)
        assert report.pi_intra == pytest.approx(intra / pairs, rel=1e-12)
        assert report.fsu_ratio == pytest.approx((intra / pairs) / np.mean(inter), rel=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((20, 5)) + 1.0
        y = np.repeat([0, 1], 10)
        a, b = class_geometry(X, y), class_geometry(5.0 * X, y)
        assert a.pi_inter == pytest.approx(b.pi_inter, abs=1e-9)
        assert a.pi_intra == pytest.approx(b.pi_intra, abs=1e-9)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((20, 5)) + 1.0
        y = np.repeat([0, 1], 10)
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        a, b = class_geometry(X, y), class_geometry(X @ Q, y)
        assert a.pi_inter == pytest.approx(b.pi_inter, abs=1e-9)
        assert a.pi_intra == pytest.approx(b.pi_intra, abs=1e-9)

    def test_single_class_rejected(self):
        with pytest.raises(InputError):
            class_geometry(np.ones((4, 3)), np.zeros(4, dtype=int))

    def test_zero_norm_rejected(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        y = np.array([0, 0, 1, 1])
        with pytest.raises(InputError):
            class_geometry(X, y)
