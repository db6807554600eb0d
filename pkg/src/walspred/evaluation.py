"""Leave-one-out cross-validation harness and report emitters.

Each rule gets a 3x7 accuracy grid (feature sets Text, Rules, Text+Rules
against Majority, NB, and five logistic regularization strengths) plus one
row of the genealogical-neighbor table (Best Other, Same Genus, Same Family).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import classifiers
from .classifiers import PAPER_LAMBDAS, ClassifierSpec
from .errors import DataError
from .features import Dataset, FeatureBlockSpec, assemble
from .wals import RULE_ORDER, WalsDatabase

FEATURE_SET_LABELS = ("Text", "Rules", "Text+Rules")
FEATURE_SET_BLOCKS = (("text",), ("rules",), ("text", "rules"))


def grid_specs(lambdas: Sequence[float] = PAPER_LAMBDAS) -> tuple[ClassifierSpec, ...]:
    return (ClassifierSpec("majority"), ClassifierSpec("naive_bayes"),
            *(ClassifierSpec("logistic", lam=lam) for lam in lambdas))


@dataclass(frozen=True)
class LoocvResult:
    rule: str
    spec: ClassifierSpec
    blocks: Optional[FeatureBlockSpec]
    accuracy: float
    per_language: Mapping[str, tuple[int, int]]  # language -> (gold, predicted)


@dataclass(frozen=True)
class RuleGrid:
    rule: str
    cohort_size: int
    columns: tuple[str, ...]
    feature_sets: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]  # feature set x classifier


@dataclass(frozen=True)
class GenealogyRow:
    rule: str
    best_other: float
    same_genus: float
    same_family: float


@dataclass(frozen=True)
class ExperimentReport:
    grids: tuple[RuleGrid, ...]
    genealogy: tuple[GenealogyRow, ...]


def _fold_predict(spec: ClassifierSpec, train: Dataset, row,
                  db: Optional[WalsDatabase]) -> int:
    if spec.kind == "majority":
        return classifiers.majority_train([r.label for r in train.rows])
    if spec.kind in ("genus_majority", "family_majority"):
        if db is None:
            raise ValueError("genealogy classifiers need the WALS database")
        level = "genus" if spec.kind == "genus_majority" else "family"
        return classifiers.genealogy_predict(
            db, train.target_rule, row.language, level,
            [r.language for r in train.rows])
    if spec.kind == "naive_bayes":
        return classifiers.predict_nb(classifiers.train_nb(train), row.values)
    if spec.kind == "logistic":
        return classifiers.predict_logistic(
            classifiers.train_logistic(train, spec.lam), row.values)
    if spec.kind == "knn":
        return classifiers.knn_predict(train, row.values, spec.k)
    raise ValueError(f"unknown classifier kind {spec.kind!r}")


def loocv(dataset: Dataset, spec: ClassifierSpec,
          db: Optional[WalsDatabase] = None,
          blocks: Optional[FeatureBlockSpec] = None) -> LoocvResult:
    """Hold out each row in turn, train on the rest, and score exact
    accuracy. Genealogy specs vote over the training languages instead of
    training on feature rows."""
    if len(dataset.rows) < 2:
        raise DataError(
            f"leave-one-out needs a cohort of at least 2, got {len(dataset.rows)}")
    per_language = {}
    correct = 0
    for i, row in enumerate(dataset.rows):
        predicted = _fold_predict(spec, dataset.without(i), row, db)
        per_language[row.language] = (row.label, predicted)
        if predicted == row.label:
            correct += 1
    return LoocvResult(rule=dataset.target_rule, spec=spec, blocks=blocks,
                       accuracy=correct / len(dataset.rows),
                       per_language=per_language)


def run_grid(db: WalsDatabase, corpus_vectors: Mapping[str, Sequence[float]],
             rule: str, lambdas: Sequence[float] = PAPER_LAMBDAS,
             job_map=map) -> RuleGrid:
    """The 3x7 grid for one rule. corpus_vectors holds the rule's text
    feature vector per language; job_map may distribute the cells."""
    specs = grid_specs(lambdas)
    datasets = [assemble(db, corpus_vectors, FeatureBlockSpec(frozenset(fs), rule))
                for fs in FEATURE_SET_BLOCKS]
    cohort = len(datasets[0].rows)
    tasks = [(ds, spec) for ds in datasets for spec in specs]
    accuracies = list(job_map(lambda t: loocv(t[0], t[1], db=db).accuracy, tasks))
    cells = tuple(
        tuple(accuracies[r * len(specs):(r + 1) * len(specs)])
        for r in range(len(datasets)))
    return RuleGrid(rule=rule, cohort_size=cohort,
                    columns=tuple(spec.label() for spec in specs),
                    feature_sets=FEATURE_SET_LABELS, cells=cells)


def run_genealogy(db: WalsDatabase, corpus_vectors: Mapping[str, Sequence[float]],
                  rule: str, best_other: float) -> GenealogyRow:
    """Same Genus and Same Family LOOCV accuracy for a rule, next to the best
    cell of that rule's main grid."""
    dataset = assemble(db, corpus_vectors, FeatureBlockSpec(frozenset(("rules",)), rule))
    genus = loocv(dataset, ClassifierSpec("genus_majority"), db=db).accuracy
    family = loocv(dataset, ClassifierSpec("family_majority"), db=db).accuracy
    return GenealogyRow(rule=rule, best_other=best_other,
                        same_genus=genus, same_family=family)


def run_knn_grid(db: WalsDatabase, corpus_vectors: Mapping[str, Sequence[float]],
                 rule: str, ks: Sequence[int], job_map=map):
    """k-NN control experiment over the Text and Rules feature sets. Values
    of k larger than cohort - 1 are skipped (they cannot vote in a fold)."""
    rows = []
    for label, fs in (("Text", ("text",)), ("Rules", ("rules",))):
        dataset = assemble(db, corpus_vectors, FeatureBlockSpec(frozenset(fs), rule))
        usable = [k for k in ks if k <= len(dataset.rows) - 1]
        accs = list(job_map(
            lambda k, ds=dataset: loocv(ds, ClassifierSpec("knn", k=k), db=db).accuracy,
            usable))
        rows.append((label, tuple(zip(usable, accs))))
    return rows


def _pct(value: float) -> str:
    return f"{100.0 * value:.1f}%"


def emit_grid(grid: RuleGrid, fmt: str = "tsv") -> str:
    header = ("Features", *grid.columns)
    rows = [(label, *map(_pct, cells))
            for label, cells in zip(grid.feature_sets, grid.cells)]
    return _table(header, rows, fmt)


def emit_genealogy(rows: Sequence[GenealogyRow], fmt: str = "tsv") -> str:
    header = ("Rule", "Best Other", "Same Genus", "Same Family")
    body = [(row.rule, _pct(row.best_other), _pct(row.same_genus), _pct(row.same_family))
            for row in rows]
    return _table(header, body, fmt)


def emit_knn(rows, fmt: str = "tsv") -> str:
    ks = sorted({k for _, pairs in rows for k, _ in pairs})
    header = ("Features", *(f"k={k}" for k in ks))
    body = []
    for label, pairs in rows:
        lookup = dict(pairs)
        body.append((label, *(_pct(lookup[k]) if k in lookup else "-" for k in ks)))
    return _table(header, body, fmt)


def emit_report(report: ExperimentReport, fmt: str = "tsv") -> str:
    """All grids plus the genealogy table as one deterministic text blob."""
    chunks = []
    for grid in sorted(report.grids, key=lambda g: _rule_key(g.rule)):
        chunks.append(f"Rule {grid.rule} (N={grid.cohort_size})")
        chunks.append(emit_grid(grid, fmt))
    chunks.append("Genealogical Neighbors")
    chunks.append(emit_genealogy(
        sorted(report.genealogy, key=lambda r: _rule_key(r.rule)), fmt))
    return "\n".join(chunks)


def _rule_key(rule: str):
    return (0, RULE_ORDER.index(rule)) if rule in RULE_ORDER else (1, rule)


def _table(header, rows, fmt: str) -> str:
    if fmt == "tsv":
        lines = ["\t".join(header)]
        lines.extend("\t".join(str(cell) for cell in row) for row in rows)
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join(" --- " for _ in header) + "|"]
        lines.extend("| " + " | ".join(str(cell) for cell in row) + " |" for row in rows)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
