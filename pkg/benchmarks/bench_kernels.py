"""Compare the numba kernel backend against the pure-numpy fallback.

Times forest fitting, batch prediction, and SHAP attribution on a synthetic
feature matrix, once per backend, and checks the outputs are bit-identical
before reporting. Run from the repository root:

    python3 benchmarks/bench_kernels.py --rows 400 --trees 50 --depth 12
"""

import argparse
import time

import numpy as np

from lexiscreen import explain, forest, kernels


def run_backend(name, x, y, params, x_query, seed):
    resolved = kernels.use_backend(name)
    timings = {}

    t0 = time.perf_counter()
    model = forest.fit_forest(x, y, params, task="classify", seed=seed)
    timings["fit"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scores = forest.predict_proba(model, x_query)
    timings["predict"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    phi, base, preds = explain.explain_dataset(model, x_query)
    timings["shap"] = time.perf_counter() - t0

    return resolved, timings, scores, phi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=400)
    ap.add_argument("--features", type=int, default=100)
    ap.add_argument("--trees", type=int, default=50)
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--queries", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    x = rng.random((args.rows, args.features)) * 100.0
    logit = 0.08 * x[:, 0] - 0.05 * x[:, 1] + rng.normal(0.0, 1.0, args.rows)
    y = (logit > np.median(logit)).astype(np.float64)
    x_query = rng.random((args.queries, args.features)) * 100.0
    params = forest.ForestParams(n_trees=args.trees, max_depth=args.depth)

    # warm the JIT cache so compile time is not billed to the numba column
    try:
        kernels.use_backend("numba")
    except ImportError:
        print("numba unavailable; nothing to compare")
        return
    warm = forest.fit_forest(x[:60], y[:60],
                             forest.ForestParams(n_trees=2, max_depth=3),
                             task="classify", seed=0)
    explain.explain_dataset(warm, x_query[:2])

    results = {}
    outputs = {}
    for name in ("numpy", "numba"):
        resolved, timings, scores, phi = run_backend(
            name, x, y, params, x_query, args.seed)
        assert resolved == name
        results[name] = timings
        outputs[name] = (scores, phi)

    same_scores = np.array_equal(outputs["numpy"][0], outputs["numba"][0])
    same_phi = np.array_equal(outputs["numpy"][1], outputs["numba"][1])
    assert same_scores and same_phi, "backends disagree; kernel bug"

    print(f"rows={args.rows} features={args.features} trees={args.trees} "
          f"depth={args.depth} queries={args.queries}")
    print(f"{'stage':<10} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for stage in ("fit", "predict", "shap"):
        a = results["numpy"][stage]
        b = results["numba"][stage]
        print(f"{stage:<10} {a:>9.3f}s {b:>9.3f}s {a / b:>8.1f}x")
    print("outputs bit-identical across backends")


if __name__ == "__main__":
    main()
