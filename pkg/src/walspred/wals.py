"""Sparse WALS-style database: languages with genus/family metadata and
integer-coded rule values, loaded from plain CSV.

Two files define a database:

* ``rules.csv`` with columns ``rule_id,code,label`` listing each rule's
  code-to-label table (codes 1..K, consecutive).
* ``wals.csv`` with header ``wals_code,name,genus,family,<ruleId>,...`` where
  rule cells hold an integer code or are empty for missing values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DataError, IngestionError

RULE_ORDER = ("83A", "85A", "86A", "88A", "92A", "107A")

RULE_NAMES = {
    "83A": "Order of Object and Verb",
    "85A": "Order of Adposition and Noun Phrase",
    "86A": "Order of Genitive and Noun",
    "88A": "Order of Demonstrative and Noun",
    "92A": "Position of Polar Question Particles",
    "107A": "Passive Constructions",
}

# Code tables for the six rules this toolkit extracts features for, matching
# the published WALS value numbering.
_STANDARD_VALUES = {
    "83A": ("Object-Verb", "Verb-Object", "No dominant order"),
    "85A": ("Postpositions", "Prepositions", "Inpositions",
            "No dominant order", "No adpositions"),
    "86A": ("Genitive-Noun", "Noun-Genitive", "No dominant order"),
    "88A": ("Demonstrative-Noun", "Noun-Demonstrative", "Prefix on noun",
            "Suffix on noun", "Demonstrative-Noun-Demonstrative", "Mixed"),
    "92A": ("Initial", "Final", "Second position", "Other position",
            "Either of two positions", "No question particle"),
    "107A": ("Present", "Absent"),
}


@dataclass(frozen=True)
class RuleDef:
    """A typological rule with its closed set of value codes."""

    id: str
    name: str
    values: tuple[tuple[int, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        codes = [code for code, _ in self.values]
        if codes != list(range(1, len(codes) + 1)):
            raise ValueError(f"rule {self.id}: codes must be 1..K consecutive, got {codes}")
        labels = [label for _, label in self.values]
        if len(set(labels)) != len(labels):
            raise ValueError(f"rule {self.id}: duplicate value labels")

    @property
    def domain_size(self) -> int:
        return len(self.values)

    def label(self, code: int) -> str:
        for c, label in self.values:
            if c == code:
                return label
        raise DataError(f"rule {self.id} has no value code {code}")


@dataclass(frozen=True)
class LanguageRecord:
    wals_code: str
    name: str
    genus: str
    family: str
    rule_values: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "rule_values", dict(self.rule_values))
        if not self.genus or not self.family:
            raise ValueError(f"language {self.wals_code}: genus and family are required")


@dataclass(frozen=True)
class WalsDatabase:
    rules: Mapping[str, RuleDef]
    languages: tuple[LanguageRecord, ...]
    _by_code: dict = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "rules", dict(self.rules))
        object.__setattr__(self, "languages", tuple(self.languages))
        by_code = {}
        for record in self.languages:
            if record.wals_code in by_code:
                raise ValueError(f"duplicate wals_code {record.wals_code!r}")
            by_code[record.wals_code] = record
            for rule_id, code in record.rule_values.items():
                rule = self.rules.get(rule_id)
                if rule is None:
                    raise ValueError(
                        f"language {record.wals_code} has a value for unknown rule {rule_id}")
                if not any(c == code for c, _ in rule.values):
                    raise ValueError(
                        f"language {record.wals_code}: code {code} outside domain of rule {rule_id}")
        object.__setattr__(self, "_by_code", by_code)

    def record(self, wals_code: str) -> LanguageRecord:
        try:
            return self._by_code[wals_code]
        except KeyError:
            raise DataError(f"unknown language code {wals_code!r}") from None

    def __contains__(self, wals_code: str) -> bool:
        return wals_code in self._by_code

    def rule(self, rule_id: str) -> RuleDef:
        try:
            return self.rules[rule_id]
        except KeyError:
            raise DataError(f"unknown rule id {rule_id!r}") from None

    def languages_with(self, rule_id: str, corpus_set: Iterable[str]) -> list[LanguageRecord]:
        """Languages that both carry a value for ``rule_id`` and appear in
        ``corpus_set``, ordered by wals_code."""
        self.rule(rule_id)
        wanted = set(corpus_set)
        hits = [rec for rec in self.languages
                if rec.wals_code in wanted and rule_id in rec.rule_values]
        return sorted(hits, key=lambda rec: rec.wals_code)


def standard_rules() -> dict[str, RuleDef]:
    """The six rule definitions this toolkit ships with."""
    return {
        rule_id: RuleDef(
            id=rule_id,
            name=RULE_NAMES[rule_id],
            values=tuple((i + 1, label) for i, label in enumerate(labels)))
        for rule_id, labels in _STANDARD_VALUES.items()
    }


def load_rules_csv(path) -> dict[str, RuleDef]:
    """Load rule definitions from a ``rule_id,code,label`` CSV."""
    grouped: dict[str, list[tuple[int, str]]] = {}
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(str(exc), path=path) from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError("empty rules file", path=path) from None
        if header[:3] != ["rule_id", "code", "label"]:
            raise IngestionError(f"unexpected header {header!r}", path=path, line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 3:
                raise IngestionError(f"expected 3 columns, got {len(row)}", path=path, line=lineno)
            rule_id, code_text, label = row[0], row[1], row[2]
            try:
                code = int(code_text)
            except ValueError:
                raise IngestionError(f"non-integer code {code_text!r}", path=path, line=lineno) from None
            grouped.setdefault(rule_id, []).append((code, label))
    rules = {}
    for rule_id, values in grouped.items():
        try:
            rules[rule_id] = RuleDef(
                id=rule_id, name=RULE_NAMES.get(rule_id, rule_id),
                values=tuple(sorted(values)))
        except ValueError as exc:
            raise IngestionError(str(exc), path=path) from exc
    return rules


def load_wals_csv(path, rules: Mapping[str, RuleDef]) -> WalsDatabase:
    """Load the language table against an already-loaded rule inventory."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(str(exc), path=path) from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError("empty WALS file", path=path) from None
        required = ["wals_code", "name", "genus", "family"]
        if header[: len(required)] != required:
            missing = [col for col in required if col not in header[: len(required)]]
            raise IngestionError(
                f"missing required column(s) {missing or required}", path=path, line=1)
        rule_columns = header[len(required):]
        for rule_id in rule_columns:
            if rule_id not in rules:
                raise IngestionError(f"column {rule_id!r} is not a known rule", path=path, line=1)
        records = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise IngestionError(
                    f"expected {len(header)} columns, got {len(row)}", path=path, line=lineno)
            code = row[0]
            if code in seen:
                raise IngestionError(f"duplicate wals_code {code!r}", path=path, line=lineno)
            seen.add(code)
            values = {}
            for rule_id, cell in zip(rule_columns, row[len(required):]):
                if cell == "":
                    continue
                try:
                    value = int(cell)
                except ValueError:
                    raise IngestionError(
                        f"non-integer value {cell!r} in column {rule_id}",
                        path=path, line=lineno) from None
                if not any(c == value for c, _ in rules[rule_id].values):
                    raise IngestionError(
                        f"value {value} outside domain of rule {rule_id}",
                        path=path, line=lineno)
                values[rule_id] = value
            try:
                records.append(LanguageRecord(
                    wals_code=code, name=row[1], genus=row[2], family=row[3],
                    rule_values=values))
            except ValueError as exc:
                raise IngestionError(str(exc), path=path, line=lineno) from exc
    try:
        return WalsDatabase(rules=dict(rules), languages=tuple(records))
    except ValueError as exc:
        raise IngestionError(str(exc), path=path) from exc


def write_rules_csv(rules: Mapping[str, RuleDef], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out)
        writer.writerow(["rule_id", "code", "label"])
        for rule_id in sorted(rules, key=_rule_sort_key):
            for code, label in rules[rule_id].values:
                writer.writerow([rule_id, code, label])


def write_wals_csv(db: WalsDatabase, path, rule_columns: Sequence[str] | None = None) -> None:
    if rule_columns is None:
        rule_columns = sorted(db.rules, key=_rule_sort_key)
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out)
        writer.writerow(["wals_code", "name", "genus", "family", *rule_columns])
        for rec in db.languages:
            cells = [str(rec.rule_values[r]) if r in rec.rule_values else "" for r in rule_columns]
            writer.writerow([rec.wals_code, rec.name, rec.genus, rec.family, *cells])


def _rule_sort_key(rule_id: str):
    if rule_id in RULE_ORDER:
        return (0, RULE_ORDER.index(rule_id))
    return (1, rule_id)
