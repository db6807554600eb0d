"""From-scratch classifier suite: majority baselines, genealogical majority
propagation, Gaussian/categorical naive Bayes, L2-regularized multinomial
logistic regression, and k-nearest neighbors.

All training is deterministic: zero initialization, full-batch gradient
descent with backtracking line search, and a single global tie-break (the
smallest class code) wherever votes or scores tie.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .features import Dataset
from .wals import WalsDatabase

GRAD_TOL = 1e-6
MAX_ITER = 5000
VAR_FLOOR = 1e-9
LAPLACE_ALPHA = 1.0

PAPER_LAMBDAS = (1.0, 0.5, 0.1, 0.01, 1e-8)


@dataclass(frozen=True)
class ClassifierSpec:
    """One cell of the experiment grid. kind is one of majority,
    genus_majority, family_majority, naive_bayes, logistic, knn."""

    kind: str
    lam: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        kinds = ("majority", "genus_majority", "family_majority",
                 "naive_bayes", "logistic", "knn")
        if self.kind not in kinds:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.kind == "logistic" and (self.lam is None or self.lam <= 0):
            raise ValueError("logistic needs a positive regularization strength")
        if self.kind == "knn" and (self.k is None or self.k < 1):
            raise ValueError("knn needs k >= 1")

    def label(self) -> str:
        if self.kind == "logistic":
            if self.lam == 1e-8:
                return "LR-8"
            text = f"{self.lam:g}"
            return "LR" + (text[1:] if text.startswith("0.") else text)
        if self.kind == "knn":
            return f"kNN{self.k}"
        return {"majority": "Majority", "genus_majority": "Same Genus",
                "family_majority": "Same Family", "naive_bayes": "NB"}[self.kind]


def _tie_min(counter: Counter) -> int:
    """Most frequent key; ties go to the smallest."""
    best = max(counter.values())
    return min(key for key, count in counter.items() if count == best)


def majority_train(labels: Sequence[int]) -> int:
    """The most frequent class code, smallest code on ties."""
    if not labels:
        raise ValueError("cannot take the majority of an empty label list")
    return _tie_min(Counter(labels))


def genealogy_predict(db: WalsDatabase, rule: str, language: str, level: str,
                      training_codes: Sequence[str]) -> int:
    """Majority label of training languages sharing the genus (or family),
    falling back genus -> family -> global training majority when a peer set
    is empty. Languages absent from the database skip straight to the global
    fallback."""
    if level not in ("genus", "family"):
        raise ValueError(f"level must be genus or family, not {level!r}")
    genus = family = None
    if language in db:
        record = db.record(language)
        genus, family = record.genus, record.family
    votes = []
    for code in training_codes:
        if code == language or code not in db:
            continue
        rec = db.record(code)
        value = rec.rule_values.get(rule)
        if value is not None:
            votes.append((rec.genus, rec.family, value))
    if not votes:
        raise ValueError("no labeled training languages to vote with")
    chain = [lambda g, f: g == genus, lambda g, f: f == family] if level == "genus" \
        else [lambda g, f: f == family]
    for matches in chain:
        peers = [value for g, f, value in votes if matches(g, f)]
        if peers:
            return _tie_min(Counter(peers))
    return _tie_min(Counter(value for _, _, value in votes))


# --- logistic regression -------------------------------------------------

@dataclass(frozen=True)
class LogisticModel:
    """weights has one row per class over (features + intercept); the
    intercept is the last column and is never penalized."""

    weights: np.ndarray
    lam: float
    n_classes: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("model weights must be finite")

    def to_json(self) -> str:
        return json.dumps({"format": "walspred-logistic", "version": 1,
                           "lambda": self.lam, "n_classes": self.n_classes,
                           "weights": self.weights.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "LogisticModel":
        blob = json.loads(text)
        if blob.get("format") != "walspred-logistic":
            raise ValueError("not a serialized logistic model")
        return cls(weights=np.array(blob["weights"], dtype=float),
                   lam=blob["lambda"], n_classes=blob["n_classes"])


def _design(rows) -> np.ndarray:
    X = np.array([row.values for row in rows], dtype=float)
    if X.ndim == 1:
        X = X.reshape(len(rows), 0)
    return np.hstack([X, np.ones((len(rows), 1))])


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def logistic_loss(weights: np.ndarray, X: np.ndarray, y: np.ndarray,
                  lam: float) -> float:
    """Multinomial negative log-likelihood plus (lam/2) * ||W||^2 with the
    intercept column excluded from the penalty."""
    log_probs = _log_softmax(X @ weights.T)
    nll = -log_probs[np.arange(len(y)), y].sum()
    return float(nll + 0.5 * lam * (weights[:, :-1] ** 2).sum())


def logistic_gradient(weights: np.ndarray, X: np.ndarray, y: np.ndarray,
                      lam: float) -> np.ndarray:
    probs = np.exp(_log_softmax(X @ weights.T))
    probs[np.arange(len(y)), y] -= 1.0
    grad = probs.T @ X
    grad[:, :-1] += lam * weights[:, :-1]
    return grad


_ABSENT_INTERCEPT = -1e6  # classes unseen in training can never win the argmax


def train_logistic(dataset: Dataset, lam: float) -> LogisticModel:
    """Full-batch gradient descent from zero weights with backtracking line
    search (Armijo). Stops when the gradient max-norm drops to 1e-6 or after
    5000 iterations.

    The optimizer runs over the classes observed in training; classes of the
    rule domain that never occur keep zero feature weights and a strongly
    negative intercept (their unpenalized intercept otherwise drifts forever
    and the tolerance becomes unreachable). A single-class dataset
    short-circuits to a degenerate model that always predicts that class.
    """
    if lam <= 0:
        raise ValueError("regularization strength must be positive")
    if not dataset.rows:
        raise ValueError("cannot train on an empty dataset")
    n_classes = dataset.n_classes
    present = sorted({row.label for row in dataset.rows})
    X = _design(dataset.rows)
    if len(present) == 1:
        weights = np.zeros((n_classes, X.shape[1]))
        weights[present[0] - 1, -1] = 1.0
        return LogisticModel(weights=weights, lam=lam, n_classes=n_classes)
    compact = {label: i for i, label in enumerate(present)}
    y = np.array([compact[row.label] for row in dataset.rows])
    weights = np.zeros((len(present), X.shape[1]))
    loss = logistic_loss(weights, X, y, lam)
    for _ in range(MAX_ITER):
        grad = logistic_gradient(weights, X, y, lam)
        grad_norm = np.abs(grad).max()
        if grad_norm <= GRAD_TOL:
            break
        step = 1.0
        sq = (grad ** 2).sum()
        accepted = None
        while step >= 1e-16:
            candidate = weights - step * grad
            new_loss = logistic_loss(candidate, X, y, lam)
            if new_loss <= loss - 1e-4 * step * sq:
                accepted = (candidate, new_loss)
                break
            step *= 0.5
        if accepted is None:
            break  # no admissible step at float precision
        weights, loss = accepted
    full = np.zeros((n_classes, X.shape[1]))
    full[:, -1] = _ABSENT_INTERCEPT
    for label, i in compact.items():
        full[label - 1] = weights[i]
    return LogisticModel(weights=full, lam=lam, n_classes=n_classes)


def predict_logistic(model: LogisticModel, values: Sequence[float]) -> int:
    """Class code with the highest softmax score; ties go to the smallest
    code."""
    if len(values) != model.weights.shape[1] - 1:
        raise ValueError(
            f"row has {len(values)} features, model expects {model.weights.shape[1] - 1}")
    scores = model.weights @ np.append(np.asarray(values, dtype=float), 1.0)
    return int(np.argmax(scores)) + 1  # argmax returns the first (smallest) index


# --- naive Bayes ----------------------------------------------------------

@dataclass(frozen=True)
class NaiveBayesModel:
    """Gaussian likelihoods for continuous columns, Laplace-smoothed
    categorical tables for one-hot groups (category 0 stands for an all-zero
    group)."""

    classes: tuple[int, ...]
    priors: tuple[float, ...]
    means: np.ndarray       # class x continuous column
    variances: np.ndarray   # same shape, floored
    group_spans: tuple[tuple[int, int], ...]
    group_tables: tuple[np.ndarray, ...]  # per group: class x (width + 1) probabilities
    continuous_cols: tuple[int, ...]

    def to_json(self) -> str:
        return json.dumps({
            "format": "walspred-naive-bayes", "version": 1,
            "classes": list(self.classes), "priors": list(self.priors),
            "means": self.means.tolist(), "variances": self.variances.tolist(),
            "group_spans": [list(span) for span in self.group_spans],
            "group_tables": [table.tolist() for table in self.group_tables],
            "continuous_cols": list(self.continuous_cols),
        })

    @classmethod
    def from_json(cls, text: str) -> "NaiveBayesModel":
        blob = json.loads(text)
        if blob.get("format") != "walspred-naive-bayes":
            raise ValueError("not a serialized naive Bayes model")
        return cls(classes=tuple(blob["classes"]), priors=tuple(blob["priors"]),
                   means=np.array(blob["means"], dtype=float),
                   variances=np.array(blob["variances"], dtype=float),
                   group_spans=tuple(tuple(span) for span in blob["group_spans"]),
                   group_tables=tuple(np.array(t, dtype=float) for t in blob["group_tables"]),
                   continuous_cols=tuple(blob["continuous_cols"]))


def _group_value(values, start: int, stop: int) -> int:
    """Categorical value of a one-hot group: 1-based position of the 1, or 0
    when the group is all zeros."""
    for offset in range(start, stop):
        if values[offset] != 0.0:
            return offset - start + 1
    return 0


def train_nb(dataset: Dataset) -> NaiveBayesModel:
    """Per-class Gaussian fit (mean and ML variance, floored at 1e-9) on
    continuous columns; Laplace alpha=1 frequency tables on one-hot groups."""
    if not dataset.rows:
        raise ValueError("cannot train on an empty dataset")
    spans = tuple((start, stop) for _, start, stop in dataset.layout.groups)
    grouped = set()
    for start, stop in spans:
        grouped.update(range(start, stop))
    continuous = tuple(i for i in range(dataset.width) if i not in grouped)
    classes = tuple(sorted({row.label for row in dataset.rows}))
    by_class = {c: [row for row in dataset.rows if row.label == c] for c in classes}
    priors = tuple(len(by_class[c]) / len(dataset.rows) for c in classes)

    means = np.zeros((len(classes), len(continuous)))
    variances = np.zeros((len(classes), len(continuous)))
    for ci, c in enumerate(classes):
        block = np.array([[row.values[col] for col in continuous] for row in by_class[c]],
                         dtype=float)
        if block.size:
            means[ci] = block.mean(axis=0)
            variances[ci] = np.maximum(block.var(axis=0), VAR_FLOOR)

    tables = []
    for start, stop in spans:
        width = stop - start
        table = np.zeros((len(classes), width + 1))
        for ci, c in enumerate(classes):
            counts = np.full(width + 1, LAPLACE_ALPHA)
            for row in by_class[c]:
                counts[_group_value(row.values, start, stop)] += 1.0
            table[ci] = counts / counts.sum()
        tables.append(table)
    return NaiveBayesModel(classes=classes, priors=priors, means=means,
                           variances=variances, group_spans=spans,
                           group_tables=tuple(tables), continuous_cols=continuous)


def nb_log_posterior(model: NaiveBayesModel, values: Sequence[float]) -> list[float]:
    """Unnormalized log posterior per model class."""
    out = []
    for ci in range(len(model.classes)):
        score = math.log(model.priors[ci])
        for j, col in enumerate(model.continuous_cols):
            var = model.variances[ci, j]
            diff = values[col] - model.means[ci, j]
            score += -0.5 * math.log(2.0 * math.pi * var) - diff * diff / (2.0 * var)
        for span, table in zip(model.group_spans, model.group_tables):
            score += math.log(table[ci, _group_value(values, *span)])
        out.append(score)
    return out


def predict_nb(model: NaiveBayesModel, values: Sequence[float]) -> int:
    scores = nb_log_posterior(model, values)
    best = max(scores)
    return min(c for c, s in zip(model.classes, scores) if s == best)


# --- k nearest neighbors --------------------------------------------------

def knn_predict(dataset: Dataset, values: Sequence[float], k: int) -> int:
    """Majority vote among the k nearest rows by Euclidean distance. Distance
    ties keep row order; vote ties go to the smallest class code."""
    if not dataset.rows:
        raise ValueError("cannot classify against an empty dataset")
    if k > len(dataset.rows):
        raise ValueError(f"k={k} exceeds the {len(dataset.rows)} available rows")
    point = np.asarray(values, dtype=float)
    X = np.array([row.values for row in dataset.rows], dtype=float)
    distances = np.sqrt(((X - point) ** 2).sum(axis=1))
    order = np.argsort(distances, kind="stable")
    votes = Counter(dataset.rows[i].label for i in order[:k])
    return _tie_min(votes)
