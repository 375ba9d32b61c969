import numpy as np
import pytest

from lexiscreen import corpus, features, forest, lexicon


@pytest.fixture(scope="session")
def default_lexicon():
    return lexicon.load_default_lexicon()


@pytest.fixture(scope="session")
def default_pos():
    return features.load_default_pos_lexicon()


@pytest.fixture(scope="session")
def default_schema():
    return features.load_default_schema()


@pytest.fixture(scope="session")
def small_corpus():
    """Deterministic 40+40 synthetic corpus shared by slow fixtures."""
    spec = corpus.SyntheticSpec.default(40, 40)
    return corpus.generate_synthetic(spec, seed=11)


@pytest.fixture(scope="session")
def small_features(small_corpus, default_lexicon, default_pos, default_schema):
    ids, matrix, skipped = features.extract_dataset(
        small_corpus, default_lexicon, default_pos, default_schema)
    assert not skipped
    labels = np.array([r.diagnosis for r in small_corpus], dtype=np.float64)
    return list(ids), matrix, labels


@pytest.fixture(scope="session")
def tiny_classify_model(small_features):
    _ids, x, y = small_features
    params = forest.ForestParams(n_trees=8, max_depth=6, features_per_split=10)
    return forest.fit_forest(x, y, params, task="classify", seed=3)


def random_forest_model(rng, task="classify", n=60, d=5, n_trees=4, depth=3):
    """Small random fitted forest for oracle comparisons."""
    x = rng.random((n, d)) * 10.0
    if task == "classify":
        y = (x[:, 0] + rng.normal(0.0, 2.0, n) > 5.0).astype(np.float64)
        if y.min() == y.max():
            y[0] = 1.0 - y[0]
    else:
        y = x[:, 0] * 0.8 + rng.normal(0.0, 1.0, n)
    params = forest.ForestParams(n_trees=n_trees, max_depth=depth,
                                 features_per_split=max(1, d - 1))
    return forest.fit_forest(x, y, params, task=task,
                             seed=int(rng.integers(0, 2**31))), x
