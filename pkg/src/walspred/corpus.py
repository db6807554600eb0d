"""Data model and file ingestion for parsed source sentences, target sentences,
and word alignments.

All types are immutable after construction and safe to share across threads.
File formats:

* CoNLL-X style trees: tab-separated ID, FORM, LEMMA, CPOS, POS, FEATS, HEAD,
  DEPREL (extra columns ignored), blank line between sentences.
* Target sentences: one sentence per line, tokens space-separated.
* Pharaoh alignments: one line per sentence pair of "i-j" pairs, 0-based in
  the file. Internally everything is 1-based to match CoNLL; the shift
  happens exactly once, here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import IngestionError, StructureError

_PHARAOH_PAIR = re.compile(r"^(\d+)-(\d+)$")


@dataclass(frozen=True)
class Token:
    """One word of a parsed sentence. index and head are 1-based; head 0 is
    the artificial root."""

    index: int
    form: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise ValueError(f"token head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise ValueError(f"token {self.index} is its own head")
        if not self.deprel:
            raise ValueError(f"token {self.index} has an empty deprel")


@dataclass(frozen=True)
class DependencyTree:
    """A parsed sentence: exactly one root, heads in range, no cycles."""

    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        n = len(self.tokens)
        if n == 0:
            raise ValueError("a tree needs at least one token")
        roots = []
        children: list[list[int]] = [[] for _ in range(n + 1)]
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise ValueError(f"token at position {pos} carries index {tok.index}")
            if tok.head > n:
                raise ValueError(f"token {pos} has head {tok.head} beyond sentence length {n}")
            if tok.head == 0:
                roots.append(pos)
            children[tok.head].append(pos)
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {len(roots)}")
        # single parent per node, so reaching every node from the root rules out cycles
        seen = 0
        stack = [roots[0]]
        while stack:
            node = stack.pop()
            seen += 1
            stack.extend(children[node])
        if seen != n:
            raise ValueError("head relation contains a cycle")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def token(self, index: int) -> Token:
        """Return the token with the given 1-based index."""
        return self.tokens[index - 1]


class AlignmentLink(NamedTuple):
    src: int
    tgt: int


@dataclass(frozen=True)
class SentencePair:
    """A source tree, its target sentence, and the word alignment between
    them. Links are 1-based on both sides."""

    source: DependencyTree
    target_forms: tuple[str, ...]
    links: frozenset[AlignmentLink]

    def __post_init__(self):
        object.__setattr__(self, "target_forms", tuple(self.target_forms))
        object.__setattr__(self, "links", frozenset(self.links))
        for link in self.links:
            if not 1 <= link.src <= len(self.source):
                raise ValueError(f"link source index {link.src} out of bounds")
            if not 1 <= link.tgt <= len(self.target_forms):
                raise ValueError(f"link target index {link.tgt} out of bounds")


@dataclass(frozen=True)
class ParallelCorpus:
    language_code: str
    pairs: tuple[SentencePair, ...]

    def __post_init__(self):
        if not self.language_code:
            raise ValueError("language_code must be nonempty")
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)


def _open_utf8(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except UnicodeDecodeError as exc:
        raise IngestionError(f"not valid UTF-8 ({exc.reason})", path=path) from exc


def read_conll(path) -> list[DependencyTree]:
    """Read a CoNLL-X style file into dependency trees.

    Rows with fewer than 8 columns or non-integer ID/HEAD raise IngestionError
    with the line number; trees violating the single-root or acyclicity
    invariants raise StructureError with the sentence ordinal.
    """
    trees: list[DependencyTree] = []
    block: list[Token] = []

    def flush():
        if block:
            try:
                trees.append(DependencyTree(tuple(block)))
            except ValueError as exc:
                raise StructureError(str(exc), sentence=len(trees) + 1) from exc
            block.clear()

    for lineno, raw in enumerate(_open_utf8(path).split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.startswith("#"):
            continue
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) < 8:
            raise IngestionError(
                f"expected at least 8 tab-separated columns, got {len(cols)}",
                path=path, line=lineno)
        try:
            index = int(cols[0])
            head = int(cols[6])
        except ValueError as exc:
            raise IngestionError(f"non-integer ID or HEAD: {exc}", path=path, line=lineno) from exc
        if head == index:
            # a self-loop is a one-token cycle, so it is a tree-level defect
            raise StructureError(f"token {index} is its own head", sentence=len(trees) + 1)
        try:
            block.append(Token(index=index, form=cols[1], upos=cols[4], head=head, deprel=cols[7]))
        except ValueError as exc:
            raise IngestionError(str(exc), path=path, line=lineno) from exc
    flush()
    return trees


def write_conll(trees: Sequence[DependencyTree], path) -> None:
    """Write trees in the CoNLL-X column layout read_conll accepts."""
    with open(path, "w", encoding="utf-8") as out:
        for tree in trees:
            for tok in tree:
                out.write(f"{tok.index}\t{tok.form}\t_\t{tok.upos}\t{tok.upos}\t_\t{tok.head}\t{tok.deprel}\n")
            out.write("\n")


def read_alignments(path) -> list[frozenset[AlignmentLink]]:
    """Read a Pharaoh alignment file; one set of links per line, shifted to
    1-based indices. Duplicate pairs collapse; an empty line is an empty set."""
    lines = _open_utf8(path).split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline, not an empty alignment
    result = []
    for lineno, line in enumerate(lines, start=1):
        links = set()
        for token in line.split():
            match = _PHARAOH_PAIR.match(token)
            if not match:
                raise IngestionError(f"bad alignment token {token!r}", path=path, line=lineno)
            links.add(AlignmentLink(int(match.group(1)) + 1, int(match.group(2)) + 1))
        result.append(frozenset(links))
    return result


def write_alignments(alignments: Sequence[frozenset[AlignmentLink]], path) -> None:
    """Write alignment sets in Pharaoh format (0-based, sorted for stability)."""
    with open(path, "w", encoding="utf-8") as out:
        for links in alignments:
            pairs = sorted(links)
            out.write(" ".join(f"{l.src - 1}-{l.tgt - 1}" for l in pairs))
            out.write("\n")


def read_sentences(path) -> list[tuple[str, ...]]:
    """Read a one-sentence-per-line token file."""
    text = _open_utf8(path)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    return [tuple(line.split()) for line in lines]


def write_sentences(sentences: Sequence[Sequence[str]], path) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for sent in sentences:
            out.write(" ".join(sent))
            out.write("\n")


def zip_corpus(trees, target_sentences, alignments, language_code) -> ParallelCorpus:
    """Bundle parallel ingestion results into a corpus, checking that the
    three sequences agree in length and that every link is in bounds."""
    if not (len(trees) == len(target_sentences) == len(alignments)):
        raise StructureError(
            "length mismatch: "
            f"{len(trees)} trees, {len(target_sentences)} target sentences, "
            f"{len(alignments)} alignment lines")
    pairs = []
    for ordinal, (tree, forms, links) in enumerate(
            zip(trees, target_sentences, alignments), start=1):
        try:
            pairs.append(SentencePair(source=tree, target_forms=tuple(forms), links=frozenset(links)))
        except ValueError as exc:
            raise StructureError(str(exc), sentence=ordinal) from exc
    return ParallelCorpus(language_code=language_code, pairs=tuple(pairs))
