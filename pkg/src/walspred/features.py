"""Assemble per-language classifier inputs for a chosen target rule from
three blocks: Text (continuous order features), Rules (one-hot values of the
five other rules), and Genealogy (one-hot genus and family).

Rule blocks use the gold values of the non-target rules; genealogy
vocabularies are frozen over the full cohort before cross-validation, so only
the held-out language's label is ever hidden.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DataError
from .wals import RULE_ORDER, WalsDatabase

BLOCK_ORDER = ("text", "rules", "genealogy")


@dataclass(frozen=True)
class FeatureBlockSpec:
    blocks: frozenset[str]
    target_rule: str

    def __post_init__(self):
        object.__setattr__(self, "blocks", frozenset(self.blocks))
        if not self.blocks:
            raise ValueError("at least one feature block is required")
        unknown = self.blocks - set(BLOCK_ORDER)
        if unknown:
            raise ValueError(f"unknown feature block(s): {sorted(unknown)}")


@dataclass(frozen=True)
class DatasetRow:
    language: str
    values: tuple[float, ...]
    label: int


@dataclass(frozen=True)
class BlockLayout:
    """Column spans: which columns belong to which block, and which column
    ranges form one-hot groups (at most a single 1 per row)."""

    blocks: tuple[tuple[str, int, int], ...]
    groups: tuple[tuple[str, int, int], ...]

    def to_json(self) -> str:
        return json.dumps({
            "blocks": [{"name": n, "start": a, "stop": b} for n, a, b in self.blocks],
            "groups": [{"name": n, "start": a, "stop": b} for n, a, b in self.groups],
        }, indent=2)


@dataclass(frozen=True)
class Dataset:
    target_rule: str
    n_classes: int
    rows: tuple[DatasetRow, ...]
    layout: BlockLayout

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        widths = {len(row.values) for row in self.rows}
        if len(widths) > 1:
            raise ValueError(f"rows have mixed widths {sorted(widths)}")
        for row in self.rows:
            if not 1 <= row.label <= self.n_classes:
                raise ValueError(
                    f"label {row.label} of {row.language} outside 1..{self.n_classes}")

    @property
    def width(self) -> int:
        return len(self.rows[0].values) if self.rows else 0

    def without(self, index: int) -> "Dataset":
        """The dataset minus one row (leave-one-out fold)."""
        rows = self.rows[:index] + self.rows[index + 1:]
        return Dataset(target_rule=self.target_rule, n_classes=self.n_classes,
                       rows=rows, layout=self.layout)


def rules_block(db: WalsDatabase, language: str, target_rule: str) -> list[float]:
    """Concatenated one-hot encodings of the language's values for the five
    non-target rules, in fixed rule order. Missing values give all-zero
    groups."""
    record = db.record(language)
    out: list[float] = []
    for rule_id in RULE_ORDER:
        if rule_id == target_rule:
            continue
        size = db.rule(rule_id).domain_size
        cell = [0.0] * size
        value = record.rule_values.get(rule_id)
        if value is not None:
            cell[value - 1] = 1.0
        out.extend(cell)
    return out


def genealogy_vocab(db: WalsDatabase, cohort_codes: Sequence[str]):
    """Sorted genus and family vocabularies over a cohort."""
    records = [db.record(code) for code in cohort_codes]
    genera = tuple(sorted({rec.genus for rec in records}))
    families = tuple(sorted({rec.family for rec in records}))
    return genera, families


def genealogy_block(db: WalsDatabase, language: str,
                    cohort_codes: Sequence[str]) -> list[float]:
    """One-hot genus followed by one-hot family, vocabularies fixed from the
    cohort."""
    record = db.record(language)
    genera, families = genealogy_vocab(db, cohort_codes)
    if record.genus not in genera or record.family not in families:
        raise DataError(
            f"language {language} has genus/family outside the cohort vocabulary")
    row = [0.0] * (len(genera) + len(families))
    row[genera.index(record.genus)] = 1.0
    row[len(genera) + families.index(record.family)] = 1.0
    return row


def assemble(db: WalsDatabase, corpus_vectors: Mapping[str, Sequence[float]],
             spec: FeatureBlockSpec, corpus_set=None) -> Dataset:
    """Build the classifier dataset for spec.target_rule.

    corpus_vectors maps language code to that language's text feature vector
    for the target rule; its keys double as the corpus set unless one is
    passed explicitly. Rows cover languages_with(target_rule, corpus set) in
    wals_code order.
    """
    if corpus_set is None:
        corpus_set = set(corpus_vectors)
    cohort = db.languages_with(spec.target_rule, corpus_set)
    cohort_codes = [rec.wals_code for rec in cohort]

    blocks: list[tuple[str, int, int]] = []
    groups: list[tuple[str, int, int]] = []
    builders = []
    offset = 0

    if "text" in spec.blocks:
        width = None
        for code in cohort_codes:
            vec = corpus_vectors.get(code)
            if vec is None:
                raise DataError(f"no text feature vector for cohort language {code}")
            if width is None:
                width = len(vec)
            elif len(vec) != width:
                raise DataError(f"text vector for {code} has width {len(vec)}, expected {width}")
        width = width or 0
        blocks.append(("text", offset, offset + width))
        builders.append(lambda code: [float(x) for x in corpus_vectors[code]])
        offset += width

    if "rules" in spec.blocks:
        start = offset
        for rule_id in RULE_ORDER:
            if rule_id == spec.target_rule:
                continue
            size = db.rule(rule_id).domain_size
            groups.append((f"rules:{rule_id}", offset, offset + size))
            offset += size
        blocks.append(("rules", start, offset))
        builders.append(lambda code: rules_block(db, code, spec.target_rule))

    if "genealogy" in spec.blocks:
        genera, families = genealogy_vocab(db, cohort_codes)
        start = offset
        groups.append(("genealogy:genus", offset, offset + len(genera)))
        groups.append(("genealogy:family", offset + len(genera),
                       offset + len(genera) + len(families)))
        offset += len(genera) + len(families)
        blocks.append(("genealogy", start, offset))
        builders.append(lambda code: genealogy_block(db, code, cohort_codes))

    layout = BlockLayout(blocks=tuple(blocks), groups=tuple(groups))
    rows = []
    for rec in cohort:
        values: list[float] = []
        for build in builders:
            values.extend(build(rec.wals_code))
        rows.append(DatasetRow(language=rec.wals_code, values=tuple(values),
                               label=rec.rule_values[spec.target_rule]))
    n_classes = db.rule(spec.target_rule).domain_size
    return Dataset(target_rule=spec.target_rule, n_classes=n_classes,
                   rows=tuple(rows), layout=layout)


def write_dataset_csv(dataset: Dataset, path, layout_path=None) -> None:
    """Dump rows as ``language,label,<columns...>`` plus a JSON layout
    sidecar."""
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out)
        writer.writerow(["language", "label"]
                        + [f"c{i}" for i in range(dataset.width)])
        for row in dataset.rows:
            writer.writerow([row.language, row.label, *[repr(v) for v in row.values]])
    if layout_path is not None:
        with open(layout_path, "w", encoding="utf-8") as out:
            out.write(dataset.layout.to_json())
            out.write("\n")
