import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from structblock import metrics as MT
from structblock.synthetic import directed_labels


def test_two_class_hand_example():
    cm = np.array([[2, 1], [0, 3]])
    p, r, f = MT.per_class_prf(cm)
    np.testing.assert_allclose(p, [1.0, 0.75], atol=1e-12)
    np.testing.assert_allclose(r, [2 / 3, 1.0], atol=1e-12)
    np.testing.assert_allclose(f, [0.8, 6 / 7], atol=1e-12)
    assert abs(MT.macro_f1(cm) - (0.8 + 6 / 7) / 2) < 1e-12


def test_empty_class_scores_zero():
    cm = np.array([[3, 0, 0], [1, 2, 0], [0, 0, 0]])
    p, r, f = MT.per_class_prf(cm)
    assert p[2] == r[2] == f[2] == 0.0


def test_all_predictions_one_class():
    gold = [0, 1, 2, 0, 1, 2]
    cm = MT.confusion_matrix(gold, [0] * 6, 3)
    # class 0: P = 1/3, R = 1, F = 0.5 ; others 0
    assert abs(MT.macro_f1(cm) - 0.5 / 3) < 1e-12


def test_perfect_predictions():
    gold = np.arange(5).repeat(3)
    assert MT.macro_f1(MT.confusion_matrix(gold, gold, 5)) == 1.0


@settings(max_examples=50, deadline=None)
@given(arrays(np.int64, (4, 4), elements=st.integers(0, 30)), st.permutations(range(4)))
def test_permutation_invariance(cm, perm):
    perm = list(perm)
    permuted = cm[np.ix_(perm, perm)]
    assert abs(MT.macro_f1(cm) - MT.macro_f1(permuted)) < 1e-12


def naive_official(gold_names, pred_names):
    """Direction-aware per-undirected-class counting on label strings."""
    def cls(n):
        return n.split("(")[0]
    classes = sorted({cls(n) for n in gold_names + pred_names} - {"Other"})
    fs = []
    for c in classes:
        correct = sum(1 for g, p in zip(gold_names, pred_names) if g == p and cls(g) == c)
        predicted = sum(1 for p in pred_names if cls(p) == c)
        actual = sum(1 for g in gold_names if cls(g) == c)
        P = correct / predicted if predicted else 0.0
        R = correct / actual if actual else 0.0
        fs.append(2 * P * R / (P + R) if P + R else 0.0)
    return sum(fs) / len(fs)


@pytest.mark.parametrize("seed", range(10))
def test_official_mode_matches_naive(seed):
    names = directed_labels("semeval")
    rng = np.random.default_rng(seed)
    gold = rng.integers(0, len(names), 300)
    pred = np.where(rng.random(300) < 0.6, gold, rng.integers(0, len(names), 300))
    m = MT.compute_metrics(gold, pred, names, "official")
    ref = naive_official([names[i] for i in gold], [names[i] for i in pred])
    assert abs(m.macro_f1 - ref) < 1e-12


def test_wrong_direction_is_an_error_in_official_mode():
    names = ["A(e1,e2)", "A(e2,e1)", "Other"]
    m = MT.compute_metrics([0, 0], [1, 1], names, "official")
    assert m.macro_f1 == 0.0


def test_score_modes_differ_on_negative_class():
    names = ["A(e1,e2)", "A(e2,e1)", "Other"]
    gold = [0, 1, 2, 2]
    pred = [0, 1, 2, 2]
    m = MT.compute_metrics(gold, pred, names, "all")
    assert m.scores == {"official": 1.0, "directed": 1.0, "all": 1.0}
    m = MT.compute_metrics([0, 2], [2, 2], names, "directed")
    assert m.scores["directed"] == 0.0 and m.scores["all"] > 0.0
    with pytest.raises(ValueError):
        MT.compute_metrics(gold, pred, names, "micro")


def test_kbp_order_and_emit(tmp_path):
    names = ["per:title(e1,e2)", "no_relation", "org:founded(e2,e1)", "org:founded(e1,e2)"]
    order = MT.kbp37_label_order(names)
    assert order == ["no_relation", "org:founded(e1,e2)", "org:founded(e2,e1)", "per:title(e1,e2)"]
    cm = MT.confusion_matrix([0, 1, 2, 3], [0, 1, 3, 3], 4)
    m = MT.compute_metrics([0, 1, 2, 3], [0, 1, 3, 3], names, "official")
    path = tmp_path / "c.csv"
    MT.emit_confusion(m, path, dialect="kbp37")
    rows = list(csv.reader(open(path)))
    assert rows[0][1:] == order
    assert rows[2][0] == "org:founded(e1,e2)" and rows[2][2] == "1"
    MT.emit_confusion(m, path, dialect="kbp37", collapse=True)
    rows = list(csv.reader(open(path)))
    assert rows[0][1] == "no_relation" and "org:founded" in rows[0]
    assert int(rows[rows[0].index("org:founded")][rows[0].index("org:founded")]) == 2
    assert cm.sum() == 4


def test_metrics_json(tmp_path):
    m = MT.compute_metrics([0, 1], [0, 1], ["A(e1,e2)", "Other"])
    MT.write_metrics(m, tmp_path / "m.json")
    import json
    d = json.load(open(tmp_path / "m.json"))
    assert d["macro_f1"] == 1.0 and d["per_class"]["Other"]["support"] == 1
