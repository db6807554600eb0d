"""Project source dependencies onto target sentences through word alignments
and turn them into the six-column order features for rules 83A, 85A, 86A,
88A, and 107A.

Every kept instance requires mutual one-to-one alignment of both words: the
source word aligns to exactly one target word, and that target word aligns
back only to the source word. Each instance contributes one same/different
count to the all-sentences pair and, when the sentence is a question or the
construction sits inside a dependent clause, to that context's pair as well.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import DependencyTree, ParallelCorpus, SentencePair
from .errors import IngestionError

TEXT_RULES = ("83A", "85A", "86A", "88A", "107A")

# Labels that mark a clause as dependent; a construction whose head sits under
# any of these (walking head-to-root) counts toward the dependent-clause pair.
DEFAULT_CLAUSE_LABELS = frozenset(
    {"advcl", "ccomp", "xcomp", "rcmod", "acl", "csubj", "csubjpass"})

DEMONSTRATIVES = frozenset({"this", "that", "these", "those"})


class Context(enum.Enum):
    PLAIN = "plain"
    QUESTION = "question"
    DEPENDENT_CLAUSE = "dependent_clause"


@dataclass(frozen=True)
class ProjectedInstance:
    """One source dependency successfully projected onto the target sentence."""

    src_head: int
    src_dep: int
    tgt_head: int
    tgt_dep: int
    context: Context

    def __post_init__(self):
        if self.src_head == self.src_dep:
            raise ValueError("source head and dependent coincide")
        if self.tgt_head == self.tgt_dep:
            raise ValueError("target head and dependent coincide")


@dataclass(frozen=True)
class ContextCounts:
    same_all: int = 0
    diff_all: int = 0
    same_q: int = 0
    diff_q: int = 0
    same_dep: int = 0
    diff_dep: int = 0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative")
        # questions and dependent clauses are subsets of all sentences
        if self.same_q + self.diff_q > self.same_all + self.diff_all:
            raise ValueError("question counts exceed all-sentence counts")
        if self.same_dep + self.diff_dep > self.same_all + self.diff_all:
            raise ValueError("dependent-clause counts exceed all-sentence counts")

    def as_tuple(self):
        return (self.same_all, self.diff_all, self.same_q, self.diff_q,
                self.same_dep, self.diff_dep)


@dataclass(frozen=True)
class TextFeatureVector:
    rule: str
    language: str
    raw: ContextCounts
    normalized: tuple[float, ...]
    n_instances: int


def exclusive_alignment(pair: SentencePair, s: int) -> Optional[int]:
    """Target index t such that s aligns only to t and t aligns only back to
    s, or None when no such mutual one-to-one link exists."""
    target = None
    for link in pair.links:
        if link.src == s:
            if target is not None:
                return None  # source fans out
            target = link.tgt
    if target is None:
        return None
    for link in pair.links:
        if link.tgt == target and link.src != s:
            return None  # target shared with another source word
    return target


def classify_context(tree: DependencyTree, head_idx: int,
                     clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS) -> Context:
    """Question if the sentence contains a "?" form; otherwise dependent
    clause if the path from the token at head_idx up to the root crosses an
    edge with a clause label; otherwise plain."""
    if any(tok.form == "?" for tok in tree):
        return Context.QUESTION
    current = head_idx
    while current != 0:
        tok = tree.token(current)
        if tok.deprel in clause_labels:
            return Context.DEPENDENT_CLAUSE
        current = tok.head
    return Context.PLAIN


def order_match(e_dep: int, e_head: int, f_dep: int, f_head: int) -> bool:
    """True when the dependent falls on the same side of its head in both
    sentences."""
    return (e_dep > e_head) == (f_dep > f_head)


def _project(pair: SentencePair, head: int, dep: int,
             clause_labels: frozenset[str]) -> Optional[ProjectedInstance]:
    tgt_head = exclusive_alignment(pair, head)
    if tgt_head is None:
        return None
    tgt_dep = exclusive_alignment(pair, dep)
    if tgt_dep is None or tgt_dep == tgt_head:
        return None
    return ProjectedInstance(
        src_head=head, src_dep=dep, tgt_head=tgt_head, tgt_dep=tgt_dep,
        context=classify_context(pair.source, head, clause_labels))


def select_instances_83A(pair: SentencePair,
                         clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                         ) -> list[ProjectedInstance]:
    """dobj edges (verb as head, object as dependent), both words mutually
    exclusively aligned."""
    out = []
    for tok in pair.source:
        if tok.deprel == "dobj" and tok.head != 0:
            inst = _project(pair, tok.head, tok.index, clause_labels)
            if inst is not None:
                out.append(inst)
    return out


def _adposition_noun(tree: DependencyTree, adp_idx: int, parent_idx: int) -> Optional[int]:
    """The noun an adposition orders against: its adpobj child, or in flat
    parses the adpobj sibling under the adposition's parent. Nearest wins."""
    own = [t.index for t in tree if t.head == adp_idx and t.deprel == "adpobj"]
    pool = own or [t.index for t in tree
                   if t.head == parent_idx and t.deprel == "adpobj" and t.index != adp_idx]
    if not pool:
        return None
    return min(pool, key=lambda i: (abs(i - adp_idx), i))


def select_instances_85A(pair: SentencePair,
                         clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                         ) -> list[ProjectedInstance]:
    """adpmod edges with a parent word; the instance pairs the adposition with
    the noun it governs (head of the instance is the noun)."""
    out = []
    for tok in pair.source:
        if tok.deprel != "adpmod" or tok.head == 0:
            continue
        noun = _adposition_noun(pair.source, tok.index, tok.head)
        if noun is None:
            continue
        inst = _project(pair, noun, tok.index, clause_labels)
        if inst is not None:
            out.append(inst)
    return out


def select_instances_86A(pair: SentencePair,
                         clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                         ) -> list[ProjectedInstance]:
    """poss edges: governing noun as head, genitive as dependent."""
    out = []
    for tok in pair.source:
        if tok.deprel == "poss" and tok.head != 0:
            inst = _project(pair, tok.head, tok.index, clause_labels)
            if inst is not None:
                out.append(inst)
    return out


def select_instances_88A(pair: SentencePair,
                         clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                         ) -> list[ProjectedInstance]:
    """det/pron edges whose form is this/that/these/those (case-insensitive)
    and whose parent tags as a noun (POS starting with N)."""
    out = []
    for tok in pair.source:
        if tok.deprel not in ("det", "pron") or tok.head == 0:
            continue
        if tok.form.lower() not in DEMONSTRATIVES:
            continue
        if not pair.source.token(tok.head).upos.startswith("N"):
            continue
        inst = _project(pair, tok.head, tok.index, clause_labels)
        if inst is not None:
            out.append(inst)
    return out


def select_instances_107A(pair: SentencePair,
                          clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                          ) -> list[ProjectedInstance]:
    """nsubjpass edges (passive subjects): verb as head, subject as dependent.
    Only these feed the 107A feature vector; active nsubj edges are available
    through select_instances_107A_active."""
    out = []
    for tok in pair.source:
        if tok.deprel == "nsubjpass" and tok.head != 0:
            inst = _project(pair, tok.head, tok.index, clause_labels)
            if inst is not None:
                out.append(inst)
    return out


def select_instances_107A_active(pair: SentencePair,
                                 clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                                 ) -> list[ProjectedInstance]:
    """nsubj edges (active subjects), projected the same way."""
    out = []
    for tok in pair.source:
        if tok.deprel == "nsubj" and tok.head != 0:
            inst = _project(pair, tok.head, tok.index, clause_labels)
            if inst is not None:
                out.append(inst)
    return out


_SELECTORS = {
    "83A": select_instances_83A,
    "85A": select_instances_85A,
    "86A": select_instances_86A,
    "88A": select_instances_88A,
    "107A": select_instances_107A,
}


def _normalize_pair(same: int, diff: int) -> tuple[float, float]:
    total = same + diff
    if total == 0:
        return (0.0, 0.0)
    same_n = same / total
    return (same_n, 1.0 - same_n)  # the pair sums to exactly 1.0


def build_text_vector(rule: str, corpus: ParallelCorpus,
                      clause_labels: frozenset[str] = DEFAULT_CLAUSE_LABELS
                      ) -> TextFeatureVector:
    """Accumulate order-match counts for a rule over a whole corpus and
    normalize each context pair to sum to one (or stay zero)."""
    try:
        selector = _SELECTORS[rule]
    except KeyError:
        raise ValueError(f"no text extractor for rule {rule!r}") from None
    same_all = diff_all = same_q = diff_q = same_dep = diff_dep = 0
    n = 0
    for pair in corpus:
        for inst in selector(pair, clause_labels):
            n += 1
            same = order_match(inst.src_dep, inst.src_head, inst.tgt_dep, inst.tgt_head)
            if same:
                same_all += 1
            else:
                diff_all += 1
            if inst.context is Context.QUESTION:
                same_q, diff_q = same_q + same, diff_q + (not same)
            elif inst.context is Context.DEPENDENT_CLAUSE:
                same_dep, diff_dep = same_dep + same, diff_dep + (not same)
    raw = ContextCounts(same_all, diff_all, same_q, diff_q, same_dep, diff_dep)
    normalized = (_normalize_pair(same_all, diff_all)
                  + _normalize_pair(same_q, diff_q)
                  + _normalize_pair(same_dep, diff_dep))
    return TextFeatureVector(rule=rule, language=corpus.language_code,
                             raw=raw, normalized=normalized, n_instances=n)


FEATURE_CSV_HEADER = ("language", "rule", "f1", "f2", "f3", "f4", "f5", "f6",
                      "n_instances", "particle")


def write_features_csv(rows, path, metadata: str | None = None) -> None:
    """Dump per-language feature rows. Each row is
    (language, rule, features, n_instances, particle_or_empty); vectors
    shorter than six columns are zero-padded on the right."""
    with open(path, "w", newline="", encoding="utf-8") as out:
        if metadata:
            out.write(f"# {metadata}\n")
        writer = csv.writer(out)
        writer.writerow(FEATURE_CSV_HEADER)
        for language, rule, features, n_instances, particle in rows:
            padded = list(features) + [0.0] * (6 - len(features))
            writer.writerow([language, rule, *[repr(float(x)) for x in padded],
                             n_instances, particle or ""])


def read_features_csv(path):
    """Inverse of write_features_csv. Returns the same row tuples with
    six-column float vectors."""
    rows = []
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(str(exc), path=path) from exc
    with handle:
        content = [line for line in handle if not line.startswith("#")]
    reader = csv.reader(content)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestionError("empty feature file", path=path) from None
    if tuple(header) != FEATURE_CSV_HEADER:
        raise IngestionError(f"unexpected header {header!r}", path=path, line=1)
    for row in reader:
        if not row:
            continue
        language, rule = row[0], row[1]
        features = tuple(float(cell) for cell in row[2:8])
        rows.append((language, rule, features, int(row[8]), row[9] or None))
    return rows
