"""Naive Bayes, unpruned random trees, random forests, and evaluation metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EmptyClass, EmptyDataset, LengthMismatch, UnknownLabel

_EPS_GAIN = 1e-12


@dataclass
class LabeledDataset:
    schema_len: int
    rows: list[tuple[tuple, str]]
    class_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        for vec, _ in self.rows:
            if len(vec) != self.schema_len:
                raise LengthMismatch(f"vector length {len(vec)} != schema length {self.schema_len}")
        if not self.class_labels:
            self.class_labels = sorted({label for _, label in self.rows})

    def __len__(self):
        return len(self.rows)

    def X(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.schema_len), dtype=np.int64)
        return np.asarray([v for v, _ in self.rows], dtype=np.int64)

    def y(self) -> np.ndarray:
        lookup = {c: i for i, c in enumerate(self.class_labels)}
        return np.asarray([lookup[label] for _, label in self.rows], dtype=np.int64)


# -- naive Bayes ------------------------------------------------------------


@dataclass
class NBModel:
    class_labels: list[str]
    class_priors: dict[str, float]
    word_likelihoods: dict[str, list[float]]
    smoothing_alpha: float

    @property
    def schema_len(self):
        return len(next(iter(self.word_likelihoods.values())))


def train_nb(data: LabeledDataset, alpha: float = 1.0, labels=None) -> NBModel:
    """Multinomial naive Bayes with additive smoothing over attribute counts."""
    if not data.rows:
        raise EmptyDataset("cannot train on an empty dataset")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    labels = list(labels) if labels is not None else list(data.class_labels)
    X = data.X().astype(float)
    names = np.asarray([label for _, label in data.rows])
    priors, likelihoods = {}, {}
    for c in labels:
        mask = names == c
        n_c = int(mask.sum())
        if n_c == 0:
            raise EmptyClass(c)
        totals = X[mask].sum(axis=0)
        denom = alpha * data.schema_len + totals.sum()
        priors[c] = n_c / len(data.rows)
        likelihoods[c] = ((alpha + totals) / denom).tolist()
    return NBModel(labels, priors, likelihoods, alpha)


def predict_nb(m: NBModel, v) -> tuple[str, dict[str, float]]:
    if len(v) != m.schema_len:
        raise LengthMismatch(f"vector length {len(v)} != model length {m.schema_len}")
    v = np.asarray(v, dtype=float)
    scores = np.array(
        [math.log(m.class_priors[c]) + float(v @ np.log(m.word_likelihoods[c])) for c in m.class_labels]
    )
    best = int(np.argmax(scores))  # first maximum, i.e. class_labels order on ties
    shifted = np.exp(scores - scores.max())
    post = shifted / shifted.sum()
    return m.class_labels[best], dict(zip(m.class_labels, post.tolist()))


# -- random tree ------------------------------------------------------------


@dataclass
class RandomTree:
    class_labels: list[str]
    schema_len: int
    k_features: int
    # preorder; internal: (attr, threshold, left, right), leaf: attr == -1
    feature: list[int]
    threshold: list[int]
    left: list[int]
    right: list[int]
    # class counts for every node
    counts: list[list[int]]

    @property
    def n_nodes(self):
        return len(self.feature)

    def leaf_for(self, v) -> int:
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if v[self.feature[node]] <= self.threshold[node] else self.right[node]
        return node

    def predict(self, v) -> str:
        counts = self.counts[self.leaf_for(v)]
        return self.class_labels[int(np.argmax(counts))]


def default_k(schema_len: int) -> int:
    return int(math.floor(math.log2(schema_len))) + 1 if schema_len > 0 else 1


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Entropy (bits) of each row of a class-count matrix."""
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / np.where(totals == 0, 1, totals), 0.0)
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=-1)


def _best_split(x: np.ndarray, y_onehot: np.ndarray, parent_h: float):
    """Best binary split ``x <= t`` for one attribute: (gain, threshold) or None."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    boundaries = np.nonzero(xs[1:] != xs[:-1])[0]
    if boundaries.size == 0:
        return None
    cum = np.cumsum(y_onehot[order], axis=0)
    left = cum[boundaries]
    right = cum[-1] - left
    n = len(x)
    nl = left.sum(axis=1)
    child = (nl * _entropy_rows(left) + (n - nl) * _entropy_rows(right)) / n
    gains = parent_h - child
    b = int(np.argmax(gains))
    pos = boundaries[b]
    lo, hi = int(xs[pos]), int(xs[pos + 1])
    return float(gains[b]), (lo + hi) // 2


def _grow(X, y, n_classes, k, rng, labels) -> RandomTree:
    n_attr = X.shape[1]
    onehot = np.eye(n_classes, dtype=np.int64)[y]
    feature, threshold, left, right, counts = [], [], [], [], []
    # entries: (row indices, parent node id, is_left)
    stack = [(np.arange(len(y)), -1, False)]
    while stack:
        rows, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        node_counts = onehot[rows].sum(axis=0)
        feature.append(-1)
        threshold.append(0)
        left.append(-1)
        right.append(-1)
        counts.append(node_counts.tolist())
        if np.count_nonzero(node_counts) <= 1:
            continue
        split = _choose_split(X[rows], onehot[rows], node_counts, k, n_attr, rng)
        if split is None:
            continue
        attr, t = split
        feature[node] = attr
        threshold[node] = t
        mask = X[rows, attr] <= t
        # right pushed first so the left subtree is numbered next (preorder)
        stack.append((rows[~mask], node, False))
        stack.append((rows[mask], node, True))
    return RandomTree(labels, n_attr, k, feature, threshold, left, right, counts)


def _choose_split(Xn, onehot, node_counts, k, n_attr, rng):
    """Best of ``k`` random attributes; keep drawing past ``k`` while no gain is found.

    If no attribute has positive gain, the first attribute (in draw order)
    that separates the rows at all is used, so impure nodes keep splitting
    until every leaf is pure or holds identical vectors.
    """
    parent_h = float(_entropy_rows(node_counts[None, :])[0])
    order = rng.permutation(n_attr)
    best = None
    fallback = None
    for drawn, attr in enumerate(order, start=1):
        res = _best_split(Xn[:, attr], onehot, parent_h)
        if res is not None:
            gain, t = res
            if fallback is None:
                fallback = (int(attr), t)
            if gain > _EPS_GAIN and (best is None or gain > best[0]):
                best = (gain, int(attr), t)
        if drawn >= k and best is not None:
            break
    if best is not None:
        return best[1], best[2]
    return fallback


def train_random_tree(data: LabeledDataset, k: int | None = None, seed: int = 0) -> RandomTree:
    if not data.rows:
        raise EmptyDataset("cannot train on an empty dataset")
    k = default_k(data.schema_len) if k is None else k
    if not 1 <= k <= max(1, data.schema_len):
        raise ValueError("k must be in [1, schema_len]")
    rng = np.random.default_rng(seed)
    return _grow(data.X(), data.y(), len(data.class_labels), k, rng, list(data.class_labels))


# -- random forest ----------------------------------------------------------


def tree_seeds(seed: int, n_trees: int) -> list[int]:
    """Per-tree seeds: tree ``i`` uses ``SeedSequence(seed).spawn(n)[i]``'s first word."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_trees)]


@dataclass
class RandomForest:
    trees: list[RandomTree]
    n_trees: int
    k_features: int
    rng_seed: int
    class_labels: list[str]
    bag_fraction: float = 1.0

    def votes(self, v) -> list[int]:
        tally = [0] * len(self.class_labels)
        for t in self.trees:
            tally[self.class_labels.index(t.predict(v))] += 1
        return tally

    def predict(self, v) -> str:
        return majority_vote([t.predict(v) for t in self.trees], self.class_labels)


def majority_vote(predictions, class_labels) -> str:
    tally = {c: 0 for c in class_labels}
    for p in predictions:
        tally[p] += 1
    best = max(tally.values())
    return next(c for c in class_labels if tally[c] == best)


def train_random_forest(
    data: LabeledDataset,
    n_trees: int = 10,
    k: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
) -> RandomForest:
    """Bagged random trees; each tree sees a with-replacement sample of size N."""
    if not data.rows:
        raise EmptyDataset("cannot train on an empty dataset")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    k = default_k(data.schema_len) if k is None else k
    X, y = data.X(), data.y()
    n = len(y)
    labels = list(data.class_labels)
    trees = []
    for ts in tree_seeds(seed, n_trees):
        rng = np.random.default_rng(ts)
        if bootstrap:
            idx = np.random.default_rng([ts, 1]).integers(0, n, n)
            Xb, yb = X[idx], y[idx]
        else:
            Xb, yb = X, y
        trees.append(_grow(Xb, yb, len(labels), k, rng, labels))
    return RandomForest(trees, n_trees, k, seed, labels)


# -- evaluation -------------------------------------------------------------


@dataclass
class EvaluationReport:
    class_labels: list[str]
    confusion: list[list[int]]

    @property
    def total(self) -> int:
        return sum(map(sum, self.confusion))

    @property
    def correct(self) -> int:
        return sum(self.confusion[i][i] for i in range(len(self.confusion)))

    @property
    def accuracy(self) -> float:
        return self.correct / self.total

    @property
    def kappa_exact(self) -> Fraction:
        n = self.total
        rows = [sum(r) for r in self.confusion]
        cols = [sum(c) for c in zip(*self.confusion)]
        p_o = Fraction(self.correct, n)
        p_e = Fraction(sum(r * c for r, c in zip(rows, cols)), n * n)
        if p_e == 1:
            return Fraction(1)
        return (p_o - p_e) / (1 - p_e)

    @property
    def kappa(self) -> float:
        return float(self.kappa_exact)

    def format(self) -> str:
        """Confusion table in the ``<-- classified as`` layout, then summary lines."""
        k = len(self.class_labels)
        letters = [_column_letter(i) for i in range(k)]
        width = max([len(str(x)) for r in self.confusion for x in r] + [len(s) for s in letters]) + 1
        lines = ["".join(s.rjust(width) for s in letters) + "   <-- classified as"]
        for i, row in enumerate(self.confusion):
            cells = "".join(str(x).rjust(width) for x in row)
            lines.append(f"{cells} |{letters[i].rjust(width)} = {self.class_labels[i]}")
        lines.append("")
        lines.append(f"Correctly classified: {self.correct}/{self.total} ({100 * self.accuracy:.2f}%)")
        lines.append(f"Kappa statistic: {self.kappa:.4f}")
        return "\n".join(lines)


def _column_letter(i: int) -> str:
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(ord("a") + r) + s
    return s


def confusion_report(matrix, class_labels) -> EvaluationReport:
    return EvaluationReport(list(class_labels), [list(map(int, r)) for r in matrix])


def evaluate(predict, test: LabeledDataset, labels=None) -> EvaluationReport:
    """Confusion matrix indexed ``[actual][predicted]`` over ``labels``."""
    if not test.rows:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    labels = list(labels) if labels is not None else list(test.class_labels)
    pos = {c: i for i, c in enumerate(labels)}
    matrix = [[0] * len(labels) for _ in labels]
    for vec, actual in test.rows:
        predicted = predict(vec)
        if actual not in pos:
            raise UnknownLabel(actual)
        if predicted not in pos:
            raise UnknownLabel(predicted)
        matrix[pos[actual]][pos[predicted]] += 1
    return EvaluationReport(labels, matrix)


# -- serialization ----------------------------------------------------------

NB_HEADER = "tweetprep-nb v1"
TREE_HEADER = "tweetprep-tree v1"
FOREST_HEADER = "tweetprep-forest v1"


def _tree_lines(t: RandomTree) -> list[str]:
    lines = []
    for i in range(t.n_nodes):
        counts = " ".join(map(str, t.counts[i]))
        if t.feature[i] < 0:
            lines.append(f"L {counts}")
        else:
            lines.append(f"S {t.feature[i]} {t.threshold[i]} {counts}")
    return lines


def dump_model(model) -> str:
    if isinstance(model, NBModel):
        lines = [NB_HEADER, "labels\t" + "\t".join(model.class_labels), f"alpha\t{model.smoothing_alpha!r}"]
        for c in model.class_labels:
            lines.append(f"prior\t{c}\t{model.class_priors[c]!r}")
        for c in model.class_labels:
            lines.append(f"likelihood\t{c}\t" + " ".join(repr(p) for p in model.word_likelihoods[c]))
    elif isinstance(model, RandomTree):
        lines = [TREE_HEADER, "labels\t" + "\t".join(model.class_labels),
                 f"schema_len\t{model.schema_len}", f"k\t{model.k_features}",
                 f"nodes\t{model.n_nodes}"]
        lines += _tree_lines(model)
    elif isinstance(model, RandomForest):
        lines = [FOREST_HEADER, "labels\t" + "\t".join(model.class_labels),
                 f"schema_len\t{model.trees[0].schema_len}", f"n_trees\t{model.n_trees}",
                 f"k\t{model.k_features}", f"seed\t{model.rng_seed}",
                 f"bag_fraction\t{model.bag_fraction!r}"]
        for i, t in enumerate(model.trees):
            lines.append(f"tree\t{i}\t{t.n_nodes}")
            lines += _tree_lines(t)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return "\n".join(lines) + "\n"


def _read_tree(lines, labels, schema_len, k) -> RandomTree:
    feature, threshold, counts = [], [], []
    for line in lines:
        parts = line.split()
        if parts[0] == "S":
            feature.append(int(parts[1]))
            threshold.append(int(parts[2]))
            counts.append([int(x) for x in parts[3:]])
        else:
            feature.append(-1)
            threshold.append(0)
            counts.append([int(x) for x in parts[1:]])
    n = len(feature)
    left, right = [-1] * n, [-1] * n
    # rebuild child links from preorder: left child follows its parent directly
    pending = []
    for i in range(n):
        if pending:
            parent = pending[-1]
            if left[parent] == -1:
                left[parent] = i
            else:
                right[parent] = i
                pending.pop()
        if feature[i] >= 0:
            pending.append(i)
    return RandomTree(labels, schema_len, k, feature, threshold, left, right, counts)


def load_model(text: str):
    lines = text.splitlines()
    header = lines[0]
    kv = {}
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        key, _, rest = line.partition("\t")
        if key in ("prior", "likelihood", "tree", "nodes") or line[:2] in ("S ", "L "):
            body_start = i
            break
        kv[key] = rest
        body_start = i + 1
    labels = kv["labels"].split("\t") if kv.get("labels") else []
    if header == NB_HEADER:
        priors, lik = {}, {}
        for line in lines[body_start:]:
            key, c, rest = line.split("\t", 2)
            if key == "prior":
                priors[c] = float(rest)
            else:
                lik[c] = [float(p) for p in rest.split()]
        return NBModel(labels, priors, lik, float(kv["alpha"]))
    if header == TREE_HEADER:
        return _read_tree(lines[body_start + 1 :], labels, int(kv["schema_len"]), int(kv["k"]))
    if header == FOREST_HEADER:
        trees = []
        i = body_start
        while i < len(lines):
            _, _, n = lines[i].split("\t")
            n = int(n)
            trees.append(_read_tree(lines[i + 1 : i + 1 + n], labels, int(kv["schema_len"]), int(kv["k"])))
            i += 1 + n
        return RandomForest(trees, int(kv["n_trees"]), int(kv["k"]), int(kv["seed"]), labels,
                            float(kv["bag_fraction"]))
    raise ValueError(f"unknown model header {header!r}")


def predictor(model):
    """A ``vector -> label`` function for any trained model."""
    if isinstance(model, NBModel):
        return lambda v: predict_nb(model, v)[0]
    return model.predict
