import pathlib

import pytest

from walspred.corpus import (AlignmentLink, DependencyTree, ParallelCorpus,
                             SentencePair, Token, read_alignments, read_conll,
                             read_sentences, zip_corpus)

DATA = pathlib.Path(__file__).parent / "data"


def tok(index, form, upos, head, deprel):
    return Token(index=index, form=form, upos=upos, head=head, deprel=deprel)


def tree(*specs):
    """Build a tree from (form, upos, head, deprel) tuples."""
    return DependencyTree(tuple(
        tok(i, form, upos, head, deprel)
        for i, (form, upos, head, deprel) in enumerate(specs, start=1)))


def pair(source, target, links):
    """SentencePair from a tree, space-separated target text, and 1-based
    (src, tgt) link tuples."""
    return SentencePair(
        source=source,
        target_forms=tuple(target.split()),
        links=frozenset(AlignmentLink(s, t) for s, t in links))


def corpus(language, *pairs):
    return ParallelCorpus(language_code=language, pairs=tuple(pairs))


@pytest.fixture(scope="session")
def hand_corpus():
    """The hand-authored 8-sentence bilingual fixture, read through the
    ingestion path."""
    trees = read_conll(DATA / "fixture_src.conll")
    targets = read_sentences(DATA / "fixture_tgt.txt")
    alignments = read_alignments(DATA / "fixture.align")
    return zip_corpus(trees, targets, alignments, "ger")
