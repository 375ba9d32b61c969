"""Forest model persistence.

Single JSON document: format_version, task, params, seed, schema
fingerprint, and the trees as preorder node lists with explicit tags.
Internal nodes serialize as {"t": "i", "f": feature, "x": threshold}; leaves
as {"t": "l", "v": value, "c": coverage}. Floats use Python's shortest
round-trippable repr, so reloaded predictions are bit-identical. Internal
coverages and values are derived from the leaves on load.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ModelError
from .forest import ForestModel, ForestParams, Tree

FORMAT_VERSION = 1


def _tree_to_nodes(tree: Tree) -> list[dict]:
    nodes = []
    for i in range(tree.n_nodes):
        if tree.feature[i] < 0:
            nodes.append({"t": "l", "v": float(tree.value[i]), "c": float(tree.coverage[i])})
        else:
            nodes.append({"t": "i", "f": int(tree.feature[i]), "x": float(tree.threshold[i])})
    return nodes


def _nodes_to_tree(nodes: list, tree_idx: int) -> Tree:
    n = len(nodes)
    if n == 0:
        raise ModelError(f"corrupt model file: tree {tree_idx} has no nodes")
    feature = np.full(n, -1, dtype=np.int64)
    threshold = np.zeros(n, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, -1, dtype=np.int64)
    value = np.zeros(n, dtype=np.float64)
    coverage = np.zeros(n, dtype=np.float64)
    depth_of = np.zeros(n, dtype=np.int64)

    # preorder decode: fill pending child slots as nodes arrive
    pending: list[tuple[int, bool, int]] = []  # (parent, is_right, depth)
    max_depth = 0
    for i, raw in enumerate(nodes):
        if not isinstance(raw, dict) or "t" not in raw:
            raise ModelError(f"corrupt model file: tree {tree_idx} node {i} is malformed")
        if i == 0:
            depth = 0
        else:
            if not pending:
                raise ModelError(f"corrupt model file: tree {tree_idx} has extra nodes")
            parent, is_right, depth = pending.pop()
            if is_right:
                right[parent] = i
            else:
                left[parent] = i
        max_depth = max(max_depth, depth)
        try:
            if raw["t"] == "l":
                value[i] = float(raw["v"])
                coverage[i] = float(raw["c"])
            elif raw["t"] == "i":
                feature[i] = int(raw["f"])
                threshold[i] = float(raw["x"])
                if feature[i] < 0:
                    raise ModelError(
                        f"corrupt model file: tree {tree_idx} node {i} has negative feature"
                    )
                # right slot pushed first so the left child is decoded next
                pending.append((i, True, depth + 1))
                pending.append((i, False, depth + 1))
            else:
                raise ModelError(
                    f"corrupt model file: tree {tree_idx} node {i} has unknown tag {raw['t']!r}"
                )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f"corrupt model file: tree {tree_idx} node {i}: {e}") from None
    if pending:
        raise ModelError(f"corrupt model file: tree {tree_idx} is truncated")

    # derive internal coverage/value bottom-up (children precede parents in
    # reverse preorder)
    for i in range(n - 1, -1, -1):
        if feature[i] >= 0:
            li, ri = left[i], right[i]
            coverage[i] = coverage[li] + coverage[ri]
            if coverage[i] <= 0:
                raise ModelError(f"corrupt model file: tree {tree_idx} has non-positive coverage")
            value[i] = (value[li] * coverage[li] + value[ri] * coverage[ri]) / coverage[i]
    return Tree(feature=feature, threshold=threshold, left=left, right=right,
                value=value, coverage=coverage, depth=int(max_depth))


def save_model(model: ForestModel, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "params": model.params.to_dict(),
        "seed": model.seed,
        "schema_fingerprint": model.schema_fingerprint,
        "n_features": model.n_features,
        "trees": [_tree_to_nodes(t) for t in model.trees],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> ForestModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError(f"corrupt model file: {e.msg} at byte {e.pos}") from None
    if not isinstance(doc, dict):
        raise ModelError("corrupt model file: top level is not an object")
    version = doc.get("format_version")
    if not isinstance(version, int):
        raise ModelError("corrupt model file: missing format_version")
    if version > FORMAT_VERSION:
        raise ModelError(
            f"model format version {version} is newer than supported version {FORMAT_VERSION}"
        )
    try:
        task = doc["task"]
        params = ForestParams.from_dict(doc["params"])
        seed = int(doc["seed"])
        fingerprint = doc.get("schema_fingerprint")
        n_features = int(doc["n_features"])
        raw_trees = doc["trees"]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"corrupt model file: {e}") from None
    if task not in ("classify", "regress"):
        raise ModelError(f"corrupt model file: unknown task {task!r}")
    if not isinstance(raw_trees, list) or not raw_trees:
        raise ModelError("corrupt model file: no trees")
    trees = [_nodes_to_tree(nodes, t) for t, nodes in enumerate(raw_trees)]
    return ForestModel(task=task, trees=trees, params=params, seed=seed,
                       n_features=n_features, schema_fingerprint=fingerprint)
