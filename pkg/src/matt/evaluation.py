"""Evaluation: accuracy, micro-averaged Top@K on long-tail subsets, and
micro-averaged one-vs-rest precision-recall curves.

Bag mode scores one prediction per test bag; segment mode scores every test
segment individually (no album/artist metadata consumed). Tail subsets keep
the units whose genre has fewer than the threshold training segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import BagSet
from .errors import EmptyEval, InvalidConfig, InvalidK, MissingFeature
from .training import bag_feature_matrix


@dataclass(frozen=True)
class EvalReport:
    mode: str
    overall_accuracy: float
    top_k: dict  # (subset_max_train_count, K) -> accuracy; empty subsets omitted
    pr_points: list  # (threshold, precision, recall), decreasing threshold
    average_precision: float
    n_units: int
    subset_sizes: dict  # subset_max_train_count -> unit count

    def write_topk_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("subset,K,accuracy\n")
            for (subset, k), acc in sorted(self.top_k.items()):
                fh.write(f"{subset},{k},{acc:.9g}\n")

    def write_pr_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("threshold,precision,recall\n")
            for threshold, precision, recall in self.pr_points:
                fh.write(f"{threshold:.9g},{precision:.9g},{recall:.9g}\n")

    def write_text(self, path):
        lines = [
            f"mode: {self.mode}",
            f"units: {self.n_units}",
            f"overall_accuracy: {self.overall_accuracy:.9g}",
            f"average_precision: {self.average_precision:.9g}",
        ]
        for (subset, k), acc in sorted(self.top_k.items()):
            lines.append(f"top@{k} (<{subset} train segments): {acc:.9g}")
        for subset, size in sorted(self.subset_sizes.items()):
            lines.append(f"subset <{subset}: {size} units")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _argmax_lowest(probabilities: np.ndarray) -> int:
    # np.argmax already returns the first (lowest) index among exact ties
    return int(np.argmax(probabilities))


def accuracy(predictions, golds) -> float:
    """Fraction of units whose argmax probability matches the gold genre."""
    if len(predictions) != len(golds):
        raise EmptyEval(f"{len(predictions)} predictions vs {len(golds)} golds")
    if not len(golds):
        raise EmptyEval("nothing to evaluate")
    hits = sum(1 for p, g in zip(predictions, golds) if _argmax_lowest(p) == g)
    return hits / len(golds)


def top_k_hit(probabilities: np.ndarray, gold: int, k: int) -> bool:
    """Is gold among the K highest-probability genres (lowest id on ties)?"""
    order = np.lexsort((np.arange(len(probabilities)), -probabilities))
    return gold in set(order[:k].tolist())


def top_k_accuracy(predictions, golds, k: int) -> float:
    if not len(golds):
        raise EmptyEval("nothing to evaluate")
    n_genres = len(predictions[0])
    if not 1 <= k <= n_genres:
        raise InvalidK(f"K={k} outside [1, {n_genres}]")
    hits = sum(1 for p, g in zip(predictions, golds) if top_k_hit(p, g, k))
    return hits / len(golds)


def pr_curve(predictions, golds):
    """Micro-averaged one-vs-rest PR curve over all (unit, genre) pairs.

    Each pair contributes its predicted probability as score and
    (genre == gold) as label; thresholds sweep every distinct score from high
    to low. Returns (points, average_precision) with points as
    (threshold, precision, recall) and AP = sum (R_i - R_{i-1}) * P_i.
    """
    if not len(golds):
        raise EmptyEval("nothing to evaluate")
    scores = []
    labels = []
    for p, g in zip(predictions, golds):
        for genre, prob in enumerate(p):
            scores.append(float(prob))
            labels.append(1 if genre == g else 0)
    scores = np.array(scores)
    labels = np.array(labels)
    order = np.argsort(-scores, kind="stable")
    scores = scores[order]
    labels = labels[order]
    total_positive = int(labels.sum())
    if total_positive == 0:
        raise EmptyEval("no positive pairs")

    tp_cum = np.cumsum(labels)
    ranks = np.arange(1, len(labels) + 1)
    # one point per distinct score: the last index of each tie group
    distinct_last = np.flatnonzero(np.diff(scores, append=-np.inf))
    points = []
    average_precision = 0.0
    prev_recall = 0.0
    for i in distinct_last:
        precision = tp_cum[i] / ranks[i]
        recall = tp_cum[i] / total_positive
        points.append((float(scores[i]), float(precision), float(recall)))
        average_precision += (recall - prev_recall) * precision
        prev_recall = recall
    return points, float(average_precision)


def _tail_genres(bags: BagSet, max_train_count: int):
    counts = bags.vocabulary.train_counts
    return {g for g in range(len(counts)) if counts[g] < max_train_count}


def collect_predictions(model, bags: BagSet, features, mode: str, split: str = "test"):
    """Score the evaluation units of one split; returns (probabilities, golds)."""
    if mode not in ("bag", "segment"):
        raise InvalidConfig(f"unknown evaluation mode {mode!r}")
    units = []
    for bag in bags.split_bags(split):
        if mode == "bag":
            matrix = bag_feature_matrix(bag, features)
            units.append((model.forward_bag(matrix).probabilities, bag.genre_id))
        else:
            for track_id in bag.segment_ids:
                if track_id not in features:
                    raise MissingFeature(f"no features for segment {track_id!r}")
                pred = model.predict_segment(features[track_id])
                units.append((pred.probabilities, bag.genre_id))
    predictions = [u[0] for u in units]
    golds = [u[1] for u in units]
    return predictions, golds


def evaluate(
    model,
    bags: BagSet,
    features,
    mode: str = "bag",
    subsets=(100, 200),
    ks=(2, 3, 5),
    split: str = "test",
) -> EvalReport:
    """Full report: overall accuracy, PR curve, and Top@K per tail subset."""
    predictions, golds = collect_predictions(model, bags, features, mode, split)
    if not golds:
        raise EmptyEval(f"no {split} units to evaluate")
    overall = accuracy(predictions, golds)
    points, average_precision = pr_curve(predictions, golds)

    top_k = {}
    subset_sizes = {}
    for subset in subsets:
        tail = _tail_genres(bags, subset)
        pairs = [(p, g) for p, g in zip(predictions, golds) if g in tail]
        subset_sizes[subset] = len(pairs)
        if not pairs:
            continue
        tail_preds = [p for p, _ in pairs]
        tail_golds = [g for _, g in pairs]
        for k in ks:
            top_k[(subset, k)] = top_k_accuracy(tail_preds, tail_golds, k)
    return EvalReport(
        mode=mode,
        overall_accuracy=overall,
        top_k=top_k,
        pr_points=points,
        average_precision=average_precision,
        n_units=len(golds),
        subset_sizes=subset_sizes,
    )
