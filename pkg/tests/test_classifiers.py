from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tweetprep.classifiers import (
    LabeledDataset,
    confusion_report,
    default_k,
    dump_model,
    evaluate,
    load_model,
    majority_vote,
    predict_nb,
    predictor,
    train_nb,
    train_random_forest,
    train_random_tree,
    tree_seeds,
)
from tweetprep.errors import EmptyClass, EmptyDataset, LengthMismatch, UnknownLabel

# actual rows / predicted columns, labels a..e
REFERENCE_CONFUSION = [
    [14, 3, 2, 0, 2],
    [2, 10, 1, 1, 1],
    [4, 2, 8, 3, 2],
    [2, 3, 3, 12, 8],
    [4, 1, 0, 0, 12],
]
REFERENCE_LABELS = ["business", "politics", "technology", "lifestyle", "art"]
# p_o = 56/100, p_e = sum(row_c * col_c) / 100^2 = 1970/10000, kappa = (p_o - p_e) / (1 - p_e)
REFERENCE_KAPPA = Fraction(33, 73)


def blobs(seed, n_classes=3, n_per=60, dims=6, spread=1.5):
    """Integer clusters with conflicting duplicates removed, so the data is consistent."""
    rng = np.random.default_rng(seed)
    rows, owner = [], {}
    for c in range(n_classes):
        centre = rng.integers(0, 6, dims)
        for _ in range(n_per):
            v = tuple(int(x) for x in np.clip(np.rint(centre + rng.normal(0, spread, dims)), 0, None))
            owner.setdefault(v, set()).add(f"c{c}")
            rows.append((v, f"c{c}"))
    rows = [(v, label) for v, label in rows if len(owner[v]) == 1]
    return LabeledDataset(dims, rows)


def test_dataset_validates_lengths():
    with pytest.raises(LengthMismatch):
        LabeledDataset(2, [((1, 0, 0), "A")])
    assert LabeledDataset(1, [((0,), "b"), ((1,), "a")]).class_labels == ["a", "b"]


def test_nb_hand_computed():
    m = train_nb(LabeledDataset(2, [((2, 0), "A"), ((0, 2), "B")]), 1.0)
    assert m.word_likelihoods["A"][0] == pytest.approx(3 / 4, abs=1e-12)
    assert m.word_likelihoods["B"][0] == pytest.approx(1 / 4, abs=1e-12)
    assert m.class_priors == {"A": 0.5, "B": 0.5}
    label, post = predict_nb(m, (1, 0))
    assert label == "A"
    assert post["A"] == pytest.approx(0.75, abs=1e-12)


def test_nb_zero_vector_picks_prior():
    m = train_nb(LabeledDataset(2, [((2, 0), "A"), ((0, 2), "B"), ((0, 1), "B")]), 1.0)
    assert predict_nb(m, (0, 0))[0] == "B"


def test_nb_single_class():
    m = train_nb(LabeledDataset(3, [((1, 2, 0), "only")]), 1.0)
    assert m.class_priors == {"only": 1.0}
    assert predict_nb(m, (9, 0, 9))[0] == "only"
    assert all(p > 0 for p in m.word_likelihoods["only"])


def test_nb_errors():
    with pytest.raises(EmptyDataset):
        train_nb(LabeledDataset(2, []))
    with pytest.raises(EmptyClass):
        train_nb(LabeledDataset(1, [((1,), "A")]), labels=["A", "B"])
    m = train_nb(LabeledDataset(2, [((1, 0), "A")]))
    with pytest.raises(LengthMismatch):
        predict_nb(m, (1, 0, 0))


def test_nb_tie_follows_label_order():
    m = train_nb(LabeledDataset(2, [((1, 0), "A"), ((0, 1), "B")]))
    assert predict_nb(m, (1, 1))[0] == "A"


@settings(deadline=None)
@given(st.integers(0, 10_000))
def test_nb_normalization(seed):
    data = blobs(seed, n_per=10)
    m = train_nb(data)
    assert sum(m.class_priors.values()) == pytest.approx(1, abs=1e-9)
    for lik in m.word_likelihoods.values():
        assert sum(lik) == pytest.approx(1, abs=1e-9)
        assert min(lik) > 0
    v = tuple(np.random.default_rng(seed).integers(0, 20, data.schema_len).tolist())
    assert sum(predict_nb(m, v)[1].values()) == pytest.approx(1, abs=1e-9)


@settings(deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 7))
def test_nb_scaling_with_uniform_priors(seed, factor):
    rng = np.random.default_rng(seed)
    rows = [(tuple(rng.integers(0, 4, 5).tolist()), c) for c in ("A", "B", "C") for _ in range(4)]
    m = train_nb(LabeledDataset(5, rows))
    v = rng.integers(0, 4, 5)
    scaled = tuple((v * factor).tolist())
    assert predict_nb(m, tuple(v.tolist()))[0] == predict_nb(m, scaled)[0]


def test_tree_pure_data_is_single_leaf():
    t = train_random_tree(LabeledDataset(2, [((1, 0), "A"), ((3, 4), "A")]), 2, 0)
    assert t.n_nodes == 1 and t.predict((9, 9)) == "A"


@pytest.mark.parametrize("seed", range(5))
def test_tree_separable_full_k(seed):
    data = blobs(seed)
    t = train_random_tree(data, data.schema_len, seed)
    assert evaluate(t.predict, data).accuracy == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_tree_consistent_data_any_k(seed):
    data = blobs(seed, n_classes=4)
    t = train_random_tree(data, 1, seed)
    assert evaluate(t.predict, data).accuracy == 1.0


def test_tree_splits_xor():
    # no single split has positive gain at the root
    rows = [((0, 0), "A"), ((1, 1), "A"), ((0, 1), "B"), ((1, 0), "B")]
    t = train_random_tree(LabeledDataset(2, rows), 2, 0)
    assert all(t.predict(v) == y for v, y in rows)


def test_tree_integer_threshold():
    t = train_random_tree(LabeledDataset(1, [((2,), "A"), ((7,), "B")]), 1, 0)
    assert t.threshold[0] == 4
    assert t.predict((4,)) == "A" and t.predict((5,)) == "B"


def test_tree_deterministic():
    data = blobs(11)
    a = dump_model(train_random_tree(data, 2, 5))
    assert a == dump_model(train_random_tree(data, 2, 5))
    assert a != dump_model(train_random_tree(data, 2, 6))


def test_tree_bad_k():
    with pytest.raises(ValueError):
        train_random_tree(blobs(0), 99, 0)
    with pytest.raises(EmptyDataset):
        train_random_tree(LabeledDataset(3, []))


def test_default_k():
    assert [default_k(n) for n in (1, 2, 7, 8, 262)] == [1, 2, 3, 4, 9]


def test_degenerate_forest_equals_tree():
    data = blobs(3)
    k = data.schema_len
    forest = train_random_forest(data, n_trees=1, k=k, seed=42, bootstrap=False)
    tree = train_random_tree(data, k, tree_seeds(42, 1)[0])
    assert dump_model(forest.trees[0]) == dump_model(tree)
    probe = np.random.default_rng(0).integers(0, 8, (200, k))
    for v in map(tuple, probe.tolist()):
        assert forest.predict(v) == tree.predict(v)


def test_majority_vote():
    assert majority_vote(["A", "A", "B"], ["A", "B"]) == "A"
    assert majority_vote(["B", "A"], ["A", "B"]) == "A"
    assert majority_vote(["B", "A"], ["B", "A"]) == "B"


def test_forest_bootstrap_size_and_seed():
    data = blobs(1)
    f = train_random_forest(data, n_trees=4, seed=9)
    assert len(f.trees) == 4 and f.bag_fraction == 1.0
    assert all(sum(t.counts[0]) == len(data) for t in f.trees)
    assert dump_model(f) == dump_model(train_random_forest(data, n_trees=4, seed=9))


def test_forest_not_worse_than_single_bagged_tree():
    wins = 0
    for seed in range(10):
        data = blobs(100 + seed, n_classes=4, spread=2.0)
        forest = train_random_forest(data, 10, None, seed)
        single = train_random_forest(data, 1, None, seed)
        wins += evaluate(forest.predict, data).accuracy >= evaluate(single.predict, data).accuracy
    assert wins >= 9


def test_reference_confusion_accuracy_and_kappa():
    rep = confusion_report(REFERENCE_CONFUSION, REFERENCE_LABELS)
    assert rep.total == 100 and rep.correct == 56
    assert rep.accuracy == 0.56
    assert rep.kappa_exact == REFERENCE_KAPPA
    assert abs(rep.kappa - 0.4520547945205479) < 1e-9


def test_reference_confusion_kappa_against_sklearn():
    metrics = pytest.importorskip("sklearn.metrics")
    actual, predicted = [], []
    for i, row in enumerate(REFERENCE_CONFUSION):
        for j, n in enumerate(row):
            actual += [i] * n
            predicted += [j] * n
    assert metrics.cohen_kappa_score(actual, predicted) == pytest.approx(float(REFERENCE_KAPPA), abs=1e-12)


def test_perfect_and_degenerate_kappa():
    rep = confusion_report([[3, 0], [0, 5]], ["a", "b"])
    assert rep.accuracy == 1.0 and rep.kappa == 1.0
    # chance agreement is 1 when everything sits in one cell
    assert confusion_report([[4, 0], [0, 0]], ["a", "b"]).kappa == 1.0


def test_evaluate_counts():
    data = LabeledDataset(1, [((0,), "a"), ((1,), "a"), ((1,), "b")])
    rep = evaluate(lambda v: "a" if v[0] == 0 else "b", data)
    assert rep.confusion == [[1, 1], [0, 1]]
    assert [sum(r) for r in rep.confusion] == [2, 1]
    assert rep.accuracy == 2 / 3
    with pytest.raises(UnknownLabel):
        evaluate(lambda v: "zzz", data)
    with pytest.raises(EmptyDataset):
        evaluate(lambda v: "a", LabeledDataset(1, []))


def test_report_layout():
    text = confusion_report(REFERENCE_CONFUSION, REFERENCE_LABELS).format()
    assert "<-- classified as" in text
    assert "a = business" in text
    assert "56/100" in text and "0.4521" in text


@pytest.mark.parametrize("kind", ["nb", "tree", "forest"])
def test_model_round_trip(kind):
    data = blobs(8)
    model = {
        "nb": lambda: train_nb(data),
        "tree": lambda: train_random_tree(data, 3, 1),
        "forest": lambda: train_random_forest(data, 5, 3, 1),
    }[kind]()
    text = dump_model(model)
    again = load_model(text)
    assert dump_model(again) == text
    pa, pb = predictor(model), predictor(again)
    for v, _ in data.rows:
        assert pa(v) == pb(v)
