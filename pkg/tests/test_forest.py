import numpy as np
import pytest

from lexiscreen import ModelError, UsageError, forest

# ------------------------------------------------------------- params


def test_params_validation():
    with pytest.raises(UsageError, match="n_trees"):
        forest.ForestParams(n_trees=0)
    with pytest.raises(UsageError, match="max_depth"):
        forest.ForestParams(max_depth=0)
    with pytest.raises(UsageError, match="min_samples_split"):
        forest.ForestParams(min_samples_split=1)
    with pytest.raises(UsageError, match="not exceed"):
        forest.ForestParams(min_samples_split=2, min_samples_leaf=3)
    with pytest.raises(UsageError, match="features_per_split"):
        forest.ForestParams(features_per_split=0)


def test_params_published_defaults():
    c = forest.ForestParams.default_classify()
    assert (c.n_trees, c.max_depth, c.features_per_split) == (50, 16, 10)
    r = forest.ForestParams.default_regress()
    assert (r.n_trees, r.max_depth, r.features_per_split) == (100, 10, 33)


def test_resolve_features_per_split_defaults():
    p = forest.ForestParams()
    assert p.resolve_features_per_split(100, "classify") == 10  # floor(sqrt(100))
    assert p.resolve_features_per_split(100, "regress") == 33   # floor(100/3)
    assert p.resolve_features_per_split(2, "classify") == 1
    fixed = forest.ForestParams(features_per_split=40)
    assert fixed.resolve_features_per_split(10, "classify") == 10  # capped


def test_params_dict_roundtrip():
    p = forest.ForestParams(n_trees=7, max_depth=3, features_per_split=None)
    assert forest.ForestParams.from_dict(p.to_dict()) == p


def test_clamp_mmse():
    out = forest.clamp_mmse(np.array([-5.0, 12.3, 35.0]))
    assert out.tolist() == [0.0, 12.3, 30.0]


# -------------------------------------------------------------- fitting


def _toy(task, n=120, d=6, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random((n, d)) * 10
    if task == "classify":
        y = ((x[:, 0] + x[:, 1]) > 10).astype(np.float64)
    else:
        y = 2.0 * x[:, 0] - x[:, 2] + rng.normal(0, 0.5, n)
    return x, y


def test_fit_deterministic_same_seed():
    x, y = _toy("classify")
    params = forest.ForestParams(n_trees=6, max_depth=5, features_per_split=3)
    m1 = forest.fit_forest(x, y, params, seed=4)
    m2 = forest.fit_forest(x, y, params, seed=4)
    for t1, t2 in zip(m1.trees, m2.trees):
        assert np.array_equal(t1.feature, t2.feature)
        assert np.array_equal(t1.threshold, t2.threshold)
        assert np.array_equal(t1.value, t2.value)
        assert np.array_equal(t1.coverage, t2.coverage)
    m3 = forest.fit_forest(x, y, params, seed=5)
    assert any(not np.array_equal(a.feature, b.feature)
               for a, b in zip(m1.trees, m3.trees))


def test_fit_thread_count_invariant():
    x, y = _toy("regress")
    params = forest.ForestParams(n_trees=8, max_depth=6, min_samples_leaf=2,
                                 features_per_split=2)
    m1 = forest.fit_forest(x, y, params, task="regress", seed=1, n_jobs=1)
    m4 = forest.fit_forest(x, y, params, task="regress", seed=1, n_jobs=4)
    assert np.array_equal(forest.predict(m1, x), forest.predict(m4, x))
    for t1, t4 in zip(m1.trees, m4.trees):
        assert np.array_equal(t1.feature, t4.feature)
        assert np.array_equal(t1.threshold, t4.threshold)


def test_trees_respect_depth_and_leaf_bounds():
    x, y = _toy("classify", n=200)
    params = forest.ForestParams(n_trees=10, max_depth=3, min_samples_split=8,
                                 min_samples_leaf=4, features_per_split=6)
    model = forest.fit_forest(x, y, params, seed=2)
    for tree in model.trees:
        assert tree.depth <= 3
        leaf_cov = tree.coverage[tree.feature < 0]
        assert leaf_cov.min() >= 4
        # parent coverage equals the sum of its children
        for i in range(tree.n_nodes):
            if tree.feature[i] >= 0:
                assert tree.coverage[i] == tree.coverage[tree.left[i]] + \
                    tree.coverage[tree.right[i]]


def test_threshold_routes_training_rows_consistently():
    # the split threshold must separate the sorted neighbours it came from:
    # lo <= thr < hi so a strict <= test sends lo left and hi right
    x, y = _toy("regress", n=80)
    params = forest.ForestParams(n_trees=10, max_depth=8, min_samples_leaf=1)
    model = forest.fit_forest(x, y, params, task="regress", seed=6)
    cols = sorted(np.unique(x))
    for tree in model.trees:
        for i in range(tree.n_nodes):
            if tree.feature[i] >= 0:
                col = x[:, tree.feature[i]]
                thr = tree.threshold[i]
                assert (col <= thr).any() and (col > thr).any()


def test_leaf_values_are_class_fractions():
    x, y = _toy("classify")
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=4, max_depth=4),
                              seed=0)
    for tree in model.trees:
        leaves = tree.feature < 0
        assert (tree.value[leaves] >= 0).all() and (tree.value[leaves] <= 1).all()


def test_pure_node_stops_splitting():
    x = np.arange(16, dtype=np.float64).reshape(-1, 1)
    y = np.array([1.0] * 8 + [0.0] * 8)
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=1, max_depth=10,
                                                        features_per_split=1),
                              seed=0)
    tree = model.trees[0]
    # one split separates the resampled classes; pure children stay leaves
    assert tree.n_nodes == 3
    assert tree.depth == 1
    assert tree.value[tree.left[0]] == 1.0
    assert tree.value[tree.right[0]] == 0.0


def test_constant_features_give_single_leaf():
    x = np.ones((10, 3))
    y = np.array([0.0, 1.0] * 5)
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=2, max_depth=5),
                              seed=0)
    for tree in model.trees:
        assert tree.n_nodes == 1
        assert tree.feature[0] == -1


# ------------------------------------------------------------ validation


def test_fit_rejects_bad_inputs():
    x, y = _toy("classify")
    with pytest.raises(UsageError, match="task"):
        forest.fit_forest(x, y, task="cluster")
    bad = x.copy()
    bad[3, 2] = np.nan
    with pytest.raises(ModelError, match="non-finite feature value at row 3, column 2"):
        forest.fit_forest(bad, y)
    with pytest.raises(ModelError, match="single class"):
        forest.fit_forest(x, np.ones(len(y)))
    with pytest.raises(ModelError, match="0 or 1"):
        forest.fit_forest(x, y + 1)
    with pytest.raises(ModelError, match="target length"):
        forest.fit_forest(x, y[:-1])


def test_predict_task_guards():
    x, y = _toy("classify")
    clf = forest.fit_forest(x, y, forest.ForestParams(n_trees=2, max_depth=3), seed=0)
    with pytest.raises(ModelError, match="regression model"):
        forest.predict(clf, x)
    xr, yr = _toy("regress")
    reg = forest.fit_forest(xr, yr, forest.ForestParams(n_trees=2, max_depth=3),
                            task="regress", seed=0)
    with pytest.raises(ModelError, match="classification model"):
        forest.predict_proba(reg, xr)


def test_predict_feature_count_checked():
    x, y = _toy("classify")
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=2, max_depth=3), seed=0)
    with pytest.raises(ModelError, match="features, model expects"):
        forest.predict_proba(model, x[:, :4])


def test_predict_labels_strictly_greater():
    tree = forest.Tree.from_nested(("split", 0, 0.5,
                                    ("leaf", 0.5, 10), ("leaf", 1.0, 10)))
    model = forest.ForestModel(task="classify", trees=[tree],
                               params=forest.ForestParams(n_trees=1),
                               seed=0, n_features=1)
    # score exactly at the threshold is negative; strictly above is positive
    assert forest.predict_labels(model, np.array([0.0])) == 0
    assert forest.predict_labels(model, np.array([1.0])) == 1
    out = forest.predict_labels(model, np.array([[0.0], [1.0]]))
    assert out.tolist() == [0, 1]


def test_single_row_predictions_are_scalars():
    x, y = _toy("classify")
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=2, max_depth=3), seed=0)
    assert isinstance(forest.predict_proba(model, x[0]), float)
    assert forest.predict_proba(model, x).shape == (len(x),)


def test_probability_predictions_in_unit_interval():
    x, y = _toy("classify")
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=5, max_depth=6), seed=3)
    p = forest.predict_proba(model, x)
    assert (p >= 0).all() and (p <= 1).all()
    # forest learns the additive boundary reasonably well in-sample
    assert ((p > 0.5) == (y == 1)).mean() > 0.9


def test_regression_tracks_target():
    x, y = _toy("regress")
    model = forest.fit_forest(x, y, forest.ForestParams(n_trees=30, max_depth=8),
                              task="regress", seed=3)
    pred = forest.predict(model, x)
    assert np.mean(np.abs(pred - y)) < 2.0
