from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steato.cohort import Dataset, build_dataset
from steato.errors import DegenerateData, EmptyConfusion, LengthMismatch, MissingMask, TooFewPerClass
from steato.evaluation import (
    ConfusionCounts,
    compare_mask_sources,
    confusion,
    cross_validate,
    dilate_mask,
    evaluate_config,
    grid_search,
    metrics,
    pca_project,
    rank,
    score,
    stratified_kfold,
)
from steato.learners import ClassifierSpec, fit_classifier, fit_scaler
from steato.patches import ExtractionConfig

from oracles import kappa_by_hand

ALL = [ClassifierSpec(k) for k in ("kmeans", "knn", "logreg", "svm-linear", "svm-rbf")]


def _blobs(n=20, d=4, gap=6.0, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, (n, d)), rng.normal(gap, 1, (n, d))])
    y = np.r_[np.zeros(n, int), np.ones(n, int)]
    raw = np.r_[np.full(n, 3.0), np.full(n, 1.0)]
    return Dataset(X, y, [f"p{i}" for i in range(2 * n)], raw)


class TestConfusion:
    def test_perfect(self):
        assert confusion([1, 0, 1], [1, 0, 1]) == ConfusionCounts(2, 0, 0, 1)

    def test_all_negative(self):
        assert confusion([1, 1, 0], [0, 0, 0]) == ConfusionCounts(0, 0, 2, 1)

    def test_length(self):
        with pytest.raises(LengthMismatch):
            confusion([1, 0], [1])

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=50, max_size=50))
    def test_counting_oracle(self, pairs):
        t, p = zip(*pairs)
        c = confusion(t, p)
        assert c.tp == sum(a == 1 and b == 1 for a, b in pairs)
        assert c.fp == sum(a == 0 and b == 1 for a, b in pairs)
        assert c.fn == sum(a == 1 and b == 0 for a, b in pairs)
        assert c.total == 50


class TestMetrics:
    def test_perfect(self):
        m = metrics(ConfusionCounts(3, 0, 0, 4))
        assert (m.accuracy, m.precision, m.recall, m.f1, m.kappa) == (1, 1, 1, 1, 1)

    def test_one_class_prediction(self):
        m = score([1, 1, 0, 0], [1, 1, 1, 1])
        assert m.kappa == 0.0

    def test_reference_counts(self):
        m = metrics(ConfusionCounts(45, 5, 6, 51))
        assert m.accuracy == pytest.approx(96 / 107, abs=1e-12)
        exact = kappa_by_hand(45, 5, 6, 51)
        assert exact == Fraction(4530, 5707)
        assert m.kappa == pytest.approx(float(exact), abs=1e-12)

    def test_degenerate_chance(self):
        assert metrics(ConfusionCounts(4, 0, 0, 0)).kappa == 1.0
        assert metrics(ConfusionCounts(0, 0, 0, 4)).kappa == 1.0
        assert metrics(ConfusionCounts(0, 0, 0, 4)).precision == 0.0

    def test_empty(self):
        with pytest.raises(EmptyConfusion):
            metrics(ConfusionCounts(0, 0, 0, 0))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
    def test_properties(self, tp, fp, fn, tn):
        if tp + fp + fn + tn == 0:
            return
        m = metrics(ConfusionCounts(tp, fp, fn, tn))
        assert m.accuracy == (tp + tn) / (tp + fp + fn + tn)
        if m.precision and m.recall:
            assert m.f1 == pytest.approx(2 / (1 / m.precision + 1 / m.recall))
        both = (tp + fn) > 0 and (fp + tn) > 0
        if both:
            assert (m.kappa == pytest.approx(1.0)) == (fp == 0 and fn == 0)
            assert m.kappa == pytest.approx(float(kappa_by_hand(tp, fp, fn, tn)), abs=1e-12)


class TestFolds:
    def test_53_54(self):
        y = np.r_[np.ones(53, int), np.zeros(54, int)]
        folds = stratified_kfold(y, 5, seed=0)
        assert all(y[f].sum() in (10, 11) for f in folds)
        assert all((1 - y[f]).sum() in (10, 11) for f in folds)

    def test_k1(self):
        y = np.array([0, 1, 0, 1])
        assert stratified_kfold(y, 1)[0].tolist() == [0, 1, 2, 3]

    def test_deterministic(self):
        y = np.random.default_rng(0).integers(0, 2, 40)
        a, b = stratified_kfold(y, 5, 3), stratified_kfold(y, 5, 3)
        assert all(np.array_equal(p, q) for p, q in zip(a, b))

    def test_too_few(self):
        with pytest.raises(TooFewPerClass):
            stratified_kfold([0, 0, 0, 1], 2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.integers(2, 7), st.integers(0, 40), st.integers(0, 40))
    def test_partition(self, seed, k, extra0, extra1):
        y = np.r_[np.zeros(k + extra0, int), np.ones(k + extra1, int)]
        folds = stratified_kfold(y, k, seed)
        joined = np.concatenate(folds)
        assert sorted(joined.tolist()) == list(range(len(y)))
        for cls in (0, 1):
            share = (y == cls).sum() / k
            for f in folds:
                assert abs((y[f] == cls).sum() - share) < 1


class TestCrossValidate:
    @pytest.mark.parametrize("spec", ALL, ids=lambda s: s.kind)
    def test_separable(self, spec):
        res = cross_validate(_blobs(), spec, 5, 0)
        assert res.mean.accuracy == 1.0
        assert len(res.folds) == 5

    def test_manual_replay(self):
        ds = _blobs(gap=1.5, seed=3)
        spec = ClassifierSpec("logreg")
        res = cross_validate(ds, spec, 5, 7)
        for fold, m in zip(stratified_kfold(ds.y, 5, 7), res.folds):
            train = np.setdiff1d(np.arange(len(ds)), fold)
            sc = fit_scaler(ds.X[train])
            model = fit_classifier(spec, sc.transform(ds.X[train]), ds.y[train])
            assert score(ds.y[fold], model.predict(sc.transform(ds.X[fold]))) == m

    @pytest.mark.parametrize("kind", ["logreg", "svm-rbf", "knn"])
    def test_test_rows_do_not_leak(self, kind):
        ds = _blobs(gap=2.0, seed=1)
        spec = ClassifierSpec(kind)
        base = cross_validate(ds, spec, 5, 0, keep_models=True)
        test0 = stratified_kfold(ds.y, 5, 0)[0]
        X2 = ds.X.copy()
        X2[test0] += 1000.0
        moved = cross_validate(Dataset(X2, ds.y, ds.ids, ds.raw_mean_distance), spec, 5, 0, keep_models=True)
        (sa, ma), (sb, mb) = base.models[0], moved.models[0]
        assert np.array_equal(sa.mean, sb.mean) and np.array_equal(sa.scale, sb.scale)
        assert ma.to_dict() == mb.to_dict()

    def test_unlabelled_rows_ignored(self):
        ds = _blobs()
        y = ds.y.copy()
        y[:3] = -1
        res = cross_validate(Dataset(ds.X, y, ds.ids, ds.raw_mean_distance), ClassifierSpec("knn"), 5, 0)
        assert len(res.predictions) == len(ds) - 3

    @pytest.mark.slow
    def test_shuffled_labels_near_chance(self, default_dataset):
        accs = []
        for seed in range(20):
            y = np.random.default_rng(seed).permutation(default_dataset.y)
            ds = Dataset(default_dataset.X, y, default_dataset.ids, default_dataset.raw_mean_distance)
            accs.append(cross_validate(ds, ClassifierSpec("logreg"), 5, seed).mean.accuracy)
        assert 0.35 <= np.mean(accs) <= 0.65


class TestGrid:
    def test_cardinality_and_direct_cell(self, small_cases):
        specs = [ClassifierSpec("kmeans"), ClassifierSpec("knn")]
        res = grid_search(small_cases, [3, 5], [20], [8, 16], specs, seed=0, cv_k=3)
        assert len(res) == 4
        assert [r.config.to_dict() for r in res] == [
            {"s": 3, "delta": 20, "bins": 8}, {"s": 3, "delta": 20, "bins": 16},
            {"s": 5, "delta": 20, "bins": 8}, {"s": 5, "delta": 20, "bins": 16}]
        direct = evaluate_config(small_cases, ExtractionConfig(5, 20, 16), specs, seed=0, cv_k=3)
        assert res[3].metrics == direct.metrics
        for r in res:
            assert r.patients_evaluated + len(r.patients_skipped) == 16

    def test_failing_cell_recorded(self, small_cases):
        res = grid_search(small_cases, [15], [10], [8], [ClassifierSpec("knn")], cv_k=3)
        assert len(res) == 1
        assert res[0].patients_evaluated == 0
        assert "knn" in res[0].errors

    def test_invalid_axis_rejected_up_front(self, small_cases):
        with pytest.raises(ValueError):
            grid_search(small_cases, [3], [20], [7], ALL)

    def test_rank(self, small_cases):
        res = grid_search(small_cases, [3, 15], [10], [8], [ClassifierSpec("knn")], cv_k=3)
        assert rank(res, "knn")[0].config.patch_size == 3


class TestCompare:
    def test_identical_sources(self, small_cases):
        masks = {c.patient_id: (c.pancreas, c.vein) for c in small_cases}
        cmp = compare_mask_sources(small_cases, masks, dict(masks), ExtractionConfig(), ALL[:3], cv_k=3)
        assert all(r["delta_accuracy"] == 0 and r["delta_f1"] == 0 for r in cmp.rows)

    def test_missing(self, small_cases):
        masks = {c.patient_id: (c.pancreas, c.vein) for c in small_cases}
        partial = dict(masks)
        gone = small_cases[2].patient_id
        del partial[gone]
        with pytest.raises(MissingMask) as err:
            compare_mask_sources(small_cases, masks, partial, ExtractionConfig(), ALL[:1])
        assert err.value.patient_id == gone
        assert gone in str(err.value)

    def test_dilate_grows_by_one(self):
        m = np.zeros((7, 7), bool)
        m[3, 3] = True
        assert dilate_mask(m, 1).sum() == 9


class TestPCA:
    def test_line(self):
        t = np.linspace(-3, 3, 25)
        X = np.outer(t, [1.0, 2.0, -2.0]) + 4.0
        r = pca_project(X, 2)
        assert r.variance_explained[0] == pytest.approx(1.0, abs=1e-8)
        assert r.components[0][0] > 0

    def test_isotropic(self):
        X = np.random.default_rng(0).normal(size=(4000, 2))
        r = pca_project(X, 2)
        assert r.variance_explained.sum() == pytest.approx(1.0, abs=1e-9)
        assert abs(r.variance_explained[0] - r.variance_explained[1]) < 0.1

    def test_matches_eigh(self):
        X = np.random.default_rng(1).normal(size=(20, 6)) * [5, 3, 2, 1, 1, 0.5]
        r = pca_project(X, 2)
        Xc = X - X.mean(0)
        vals, vecs = np.linalg.eigh(Xc.T @ Xc / len(X))
        order = np.argsort(vals)[::-1][:2]
        assert r.eigenvalues == pytest.approx(vals[order], abs=1e-6)
        for i, j in enumerate(order):
            v = vecs[:, j] * np.sign(vecs[np.flatnonzero(np.abs(vecs[:, j]) > 1e-12)[0], j])
            assert np.allclose(r.components[i], v, atol=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6), st.integers(3, 30), st.integers(2, 6))
    def test_ratios(self, seed, n, d):
        X = np.random.default_rng(seed).normal(size=(n, d))
        r = pca_project(X, min(2, d))
        ve = r.variance_explained
        assert all(b <= a + 1e-9 for a, b in zip(ve, ve[1:]))
        assert ve.sum() <= 1 + 1e-9

    def test_degenerate(self):
        with pytest.raises(DegenerateData):
            pca_project(np.ones((5, 3)))


def test_build_dataset_skips_patientless_cases(small_cases):
    ds, skipped, _ = build_dataset(small_cases, ExtractionConfig(15, 10, 8))
    assert len(ds) == 0 and len(skipped) == len(small_cases)
