"""Precision, recall, macro-F1 and confusion matrices.

Three scoring modes are supported:

``official``
    SemEval-2010 Task 8 convention: F1 per undirected relation class, a
    prediction only counts as correct when its direction matches as well,
    and the negative class (Other / no_relation) is left out of the average.
``directed``
    Every directed type is its own class; negative class left out.
``all``
    Every directed type including the negative class.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import KBP37_CLASS_ORDER, is_negative_label, relation_class, relation_direction

SCORE_MODES = ("official", "directed", "all")


def confusion_matrix(gold, pred, num_classes):
    """Rows are gold classes, columns predictions."""
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(gold, dtype=np.int64), np.asarray(pred, dtype=np.int64)), 1)
    return cm


def _safe_div(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def prf_from_counts(correct, predicted, actual):
    """P, R, F1 arrays; any 0/0 ratio is defined as 0."""
    p = _safe_div(correct, predicted)
    r = _safe_div(correct, actual)
    f = _safe_div(2 * p * r, p + r)
    return p, r, f


def per_class_prf(confusion):
    cm = np.asarray(confusion)
    return prf_from_counts(np.diag(cm), cm.sum(axis=0), cm.sum(axis=1))


def macro_f1(confusion, scored_class_mask=None):
    _, _, f = per_class_prf(confusion)
    if scored_class_mask is None:
        scored_class_mask = np.ones(len(f), dtype=bool)
    mask = np.asarray(scored_class_mask, dtype=bool)
    if not mask.any():
        return 0.0
    return float(f[mask].mean())


def scored_mask(label_names, include_negative=False):
    return np.array([include_negative or not is_negative_label(n) for n in label_names])


def official_prf(confusion, label_names):
    """Per undirected class (negative excluded) P/R/F1 with direction-aware
    correctness. Returns ``(class_names, P, R, F1)``."""
    cm = np.asarray(confusion)
    classes = []
    groups: dict[str, list[int]] = {}
    for i, name in enumerate(label_names):
        if is_negative_label(name):
            continue
        c = relation_class(name)
        if c not in groups:
            groups[c] = []
            classes.append(c)
        groups[c].append(i)
    correct = np.array([sum(cm[i, i] for i in groups[c]) for c in classes])
    predicted = np.array([cm[:, groups[c]].sum() for c in classes])
    actual = np.array([cm[groups[c], :].sum() for c in classes])
    p, r, f = prf_from_counts(correct, predicted, actual)
    return classes, p, r, f


@dataclass
class Metrics:
    labels: list
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_f1: float
    accuracy: float
    mode: str = "official"
    scores: dict = field(default_factory=dict)
    epoch_seconds: float | None = None

    def to_json(self):
        return {
            "mode": self.mode,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "macro_f1_by_mode": self.scores,
            "per_class": {
                name: {"precision": float(p), "recall": float(r), "f1": float(f),
                       "support": int(self.confusion[i].sum())}
                for i, (name, p, r, f) in enumerate(zip(self.labels, self.precision, self.recall, self.f1))
            },
            "confusion": self.confusion.tolist(),
            "epoch_seconds": self.epoch_seconds,
        }


def compute_metrics(gold, pred, label_names, mode="official") -> Metrics:
    if mode not in SCORE_MODES:
        raise ValueError(f"unknown scoring mode {mode!r}")
    label_names = list(label_names)
    cm = confusion_matrix(gold, pred, len(label_names))
    p, r, f = per_class_prf(cm)
    scores = {
        "directed": macro_f1(cm, scored_mask(label_names)),
        "all": macro_f1(cm),
    }
    _, _, _, fo = official_prf(cm, label_names)
    scores["official"] = float(fo.mean()) if len(fo) else 0.0
    total = cm.sum()
    acc = float(np.trace(cm) / total) if total else 0.0
    return Metrics(label_names, cm, p, r, f, scores[mode], acc, mode, scores)


def kbp37_label_order(label_names):
    """Directed labels sorted by the fixed KBP37 class order, (e1,e2) first."""
    rank = {c: i for i, c in enumerate(KBP37_CLASS_ORDER)}

    def key(name):
        c = relation_class(name)
        return (rank.get(c, len(rank)), c, relation_direction(name) != "e1,e2")

    return sorted(label_names, key=key)


def collapse_confusion(confusion, label_names, class_order=None):
    """Merge directions: returns ``(class_names, matrix)``."""
    classes = list(class_order) if class_order else []
    for name in label_names:
        c = relation_class(name)
        if c not in classes:
            classes.append(c)
    idx = {c: i for i, c in enumerate(classes)}
    out = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for i, gi in enumerate(label_names):
        for j, pj in enumerate(label_names):
            out[idx[relation_class(gi)], idx[relation_class(pj)]] += confusion[i, j]
    return classes, out


def emit_confusion(metrics: Metrics, path, dialect=None, collapse=False):
    """Write the confusion matrix as CSV (rows gold, columns predicted)."""
    names = list(metrics.labels)
    cm = np.asarray(metrics.confusion)
    if collapse:
        order = KBP37_CLASS_ORDER if dialect == "kbp37" else None
        names, cm = collapse_confusion(cm, names, order)
    elif dialect == "kbp37":
        ordered = kbp37_label_order(names)
        perm = [names.index(n) for n in ordered]
        cm = cm[np.ix_(perm, perm)]
        names = ordered
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["gold\\predicted"] + names)
        for name, row in zip(names, cm):
            w.writerow([name] + [int(x) for x in row])


def write_metrics(metrics: Metrics, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics.to_json(), fh, indent=2, sort_keys=True)
