"""Deterministic generator of synthetic languages for end-to-end checks.

Each language is built from a typological profile: source sentences come from
a small cycle of English-like templates with hand-authored parses, and the
target sentence is a deterministic reordering of the source tokens per the
profile (plus a planted question particle for polar questions). Alignments
are the induced permutations, so every source token is exclusively aligned
and extraction keeps every instance at noise zero.

Randomness enters only through the noise knob: each profile-governed order
decision flips with probability ``noise``, drawn from a per-language
``random.Random`` stream (Mersenne Twister via ``Random.random()``) seeded
with ``"{seed}/{language_code}"``.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from . import __version__
from .corpus import (AlignmentLink, DependencyTree, ParallelCorpus, SentencePair,
                     Token, write_alignments, write_conll, write_sentences)
from .wals import LanguageRecord, WalsDatabase, standard_rules, write_rules_csv, write_wals_csv

PARTICLE = "ka"
GENERATOR_ID = "python-random-mt19937/random()"

_V83A = ("OV", "VO")
_V85A = ("pre", "post")
_V86A = ("gen-noun", "noun-gen")
_V88A = ("dem-noun", "noun-dem")
_V92A = ("initial", "second", "final", "none")
_V107A = ("passive", "no-passive")


@dataclass(frozen=True)
class TypologicalProfile:
    v83A: str
    v85A: str
    v86A: str
    v88A: str
    v92A: str
    v107A: str
    noise: float = 0.0

    def __post_init__(self):
        for name, allowed in (("v83A", _V83A), ("v85A", _V85A), ("v86A", _V86A),
                              ("v88A", _V88A), ("v92A", _V92A), ("v107A", _V107A)):
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}")
        if not 0.0 <= self.noise < 0.5:
            raise ValueError("noise must lie in [0, 0.5)")

    def rule_codes(self) -> dict[str, int]:
        return {
            "83A": 1 if self.v83A == "OV" else 2,
            "85A": 1 if self.v85A == "post" else 2,
            "86A": 1 if self.v86A == "gen-noun" else 2,
            "88A": 1 if self.v88A == "dem-noun" else 2,
            "92A": {"initial": 1, "final": 2, "second": 3, "none": 6}[self.v92A],
            "107A": 1 if self.v107A == "passive" else 2,
        }


@dataclass(frozen=True)
class SyntheticSpec:
    languages: tuple[tuple[str, str, str, TypologicalProfile], ...]
    sentences_per_language: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        codes = [code for code, _, _, _ in self.languages]
        if len(set(codes)) != len(codes):
            raise ValueError("language codes must be unique")
        if self.sentences_per_language < 1:
            raise ValueError("sentences_per_language must be >= 1")


@dataclass(frozen=True)
class Template:
    """A source sentence with decision keys (prefix names the governing rule)
    and a target-order builder mapping resolved decisions to a permutation of
    1-based token indices."""

    tokens: tuple[tuple[str, str, int, str], ...]
    kind: str  # decl | polar | wh
    decisions: tuple[str, ...]
    order: Callable[[Mapping[str, bool]], tuple[int, ...]]

    def tree(self) -> DependencyTree:
        return DependencyTree(tuple(
            Token(index=i, form=form, upos=upos, head=head, deprel=deprel)
            for i, (form, upos, head, deprel) in enumerate(self.tokens, start=1)))


def _np(pair, flipped):
    return (pair[1], pair[0]) if flipped else pair


TEMPLATES: tuple[Template, ...] = (
    Template(  # plain transitive clause
        tokens=(("the", "DT", 2, "det"), ("farmer", "NN", 3, "nsubj"),
                ("found", "VBD", 0, "root"), ("a", "DT", 5, "det"),
                ("sheep", "NN", 3, "dobj"), (".", ".", 3, "p")),
        kind="decl", decisions=("ov",),
        order=lambda c: (1, 2) + ((4, 5, 3) if c["ov"] else (3, 4, 5)) + (6,)),
    Template(  # adpositional phrase, noun attached to the verb
        tokens=(("the", "DT", 2, "det"), ("dog", "NN", 3, "nsubj"),
                ("walked", "VBD", 0, "root"), ("to", "IN", 3, "adpmod"),
                ("the", "DT", 6, "det"), ("river", "NN", 3, "adpobj"),
                (".", ".", 3, "p")),
        kind="decl", decisions=("post",),
        order=lambda c: (1, 2, 3) + ((5, 6, 4) if c["post"] else (4, 5, 6)) + (7,)),
    Template(  # two possessives around a transitive verb
        tokens=(("his", "PRP$", 2, "poss"), ("brother", "NN", 3, "nsubj"),
                ("saw", "VBD", 0, "root"), ("my", "PRP$", 5, "poss"),
                ("house", "NN", 3, "dobj"), (".", ".", 3, "p")),
        kind="decl", decisions=("gen.subj", "ov", "gen.obj"),
        order=lambda c: (_np((1, 2), c["gen.subj"])
                         + ((*_np((4, 5), c["gen.obj"]), 3) if c["ov"]
                            else (3, *_np((4, 5), c["gen.obj"])))
                         + (6,))),
    Template(  # two demonstratives around a transitive verb
        tokens=(("that", "DT", 2, "det"), ("shepherd", "NN", 3, "nsubj"),
                ("lost", "VBD", 0, "root"), ("this", "DT", 5, "det"),
                ("lamb", "NN", 3, "dobj"), (".", ".", 3, "p")),
        kind="decl", decisions=("dem.subj", "ov", "dem.obj"),
        order=lambda c: (_np((1, 2), c["dem.subj"])
                         + ((*_np((4, 5), c["dem.obj"]), 3) if c["ov"]
                            else (3, *_np((4, 5), c["dem.obj"])))
                         + (6,))),
    Template(  # passive with a by-phrase, noun attached to the adposition
        tokens=(("the", "DT", 2, "det"), ("lamb", "NN", 4, "nsubjpass"),
                ("was", "VBD", 4, "auxpass"), ("taken", "VBN", 0, "root"),
                ("by", "IN", 4, "adpmod"), ("a", "DT", 7, "det"),
                ("wolf", "NN", 5, "adpobj"), (".", ".", 4, "p")),
        kind="decl", decisions=("pass", "post"),
        order=lambda c: (((3, 4, 1, 2) if c["pass"] else (1, 2, 3, 4))
                         + ((6, 7, 5) if c["post"] else (5, 6, 7)) + (8,))),
    Template(  # object inside a complement clause
        tokens=(("she", "PRP", 2, "nsubj"), ("said", "VBD", 0, "root"),
                ("that", "IN", 6, "mark"), ("the", "DT", 5, "det"),
                ("farmer", "NN", 6, "nsubj"), ("found", "VBD", 2, "ccomp"),
                ("the", "DT", 8, "det"), ("sheep", "NN", 6, "dobj"),
                (".", ".", 2, "p")),
        kind="decl", decisions=("ov",),
        order=lambda c: (1, 2, 3, 4, 5) + ((7, 8, 6) if c["ov"] else (6, 7, 8)) + (9,)),
    Template(  # adpositional phrase inside an adverbial clause
        tokens=(("the", "DT", 2, "det"), ("boy", "NN", 3, "nsubj"),
                ("slept", "VBD", 0, "root"), ("while", "IN", 7, "mark"),
                ("the", "DT", 6, "det"), ("girl", "NN", 7, "nsubj"),
                ("walked", "VBD", 3, "advcl"), ("to", "IN", 7, "adpmod"),
                ("a", "DT", 10, "det"), ("village", "NN", 7, "adpobj"),
                (".", ".", 3, "p")),
        kind="decl", decisions=("post",),
        order=lambda c: (1, 2, 3, 4, 5, 6, 7) + ((9, 10, 8) if c["post"] else (8, 9, 10)) + (11,)),
    Template(  # polar question with a direct object
        tokens=(("did", "VBD", 4, "aux"), ("the", "DT", 3, "det"),
                ("hunter", "NN", 4, "nsubj"), ("see", "VB", 0, "root"),
                ("a", "DT", 6, "det"), ("fox", "NN", 4, "dobj"),
                ("?", ".", 4, "p")),
        kind="polar", decisions=("ov",),
        order=lambda c: (1, 2, 3) + ((5, 6, 4) if c["ov"] else (4, 5, 6)) + (7,)),
    Template(  # wh question sharing the polar template's vocabulary
        tokens=(("why", "WRB", 5, "advmod"), ("did", "VBD", 5, "aux"),
                ("the", "DT", 4, "det"), ("hunter", "NN", 5, "nsubj"),
                ("see", "VB", 0, "root"), ("a", "DT", 7, "det"),
                ("fox", "NN", 5, "dobj"), ("?", ".", 5, "p")),
        kind="wh", decisions=("ov",),
        order=lambda c: (1, 2, 3, 4) + ((6, 7, 5) if c["ov"] else (5, 6, 7)) + (8,)),
    Template(  # polar question with an adpositional phrase
        tokens=(("did", "VBD", 4, "aux"), ("the", "DT", 3, "det"),
                ("woman", "NN", 4, "nsubj"), ("go", "VB", 0, "root"),
                ("to", "IN", 4, "adpmod"), ("the", "DT", 7, "det"),
                ("market", "NN", 4, "adpobj"), ("?", ".", 4, "p")),
        kind="polar", decisions=("post",),
        order=lambda c: (1, 2, 3, 4) + ((6, 7, 5) if c["post"] else (5, 6, 7)) + (8,)),
    Template(  # matching wh question
        tokens=(("when", "WRB", 5, "advmod"), ("did", "VBD", 5, "aux"),
                ("the", "DT", 4, "det"), ("woman", "NN", 5, "nsubj"),
                ("go", "VB", 0, "root"), ("to", "IN", 5, "adpmod"),
                ("the", "DT", 8, "det"), ("market", "NN", 5, "adpobj"),
                ("?", ".", 5, "p")),
        kind="wh", decisions=("post",),
        order=lambda c: (1, 2, 3, 4, 5) + ((7, 8, 6) if c["post"] else (6, 7, 8)) + (9,)),
    Template(  # possessive subject and demonstrative object
        tokens=(("my", "PRP$", 2, "poss"), ("cousin", "NN", 3, "nsubj"),
                ("kept", "VBD", 0, "root"), ("that", "DT", 5, "det"),
                ("goat", "NN", 3, "dobj"), (".", ".", 3, "p")),
        kind="decl", decisions=("gen.subj", "ov", "dem.obj"),
        order=lambda c: (_np((1, 2), c["gen.subj"])
                         + ((*_np((4, 5), c["dem.obj"]), 3) if c["ov"]
                            else (3, *_np((4, 5), c["dem.obj"])))
                         + (6,))),
)


def _base_flip(profile: TypologicalProfile, decision: str) -> bool:
    """Whether the target order for this decision flips relative to the
    English source when the profile is followed exactly."""
    prefix = decision.split(".", 1)[0]
    return {
        "ov": profile.v83A == "OV",
        "post": profile.v85A == "post",
        "gen": profile.v86A == "noun-gen",
        "dem": profile.v88A == "noun-dem",
        "pass": profile.v107A == "no-passive",
    }[prefix]


def _build_pair(template: Template, profile: TypologicalProfile,
                ordinal: int, rng: random.Random) -> SentencePair:
    decisions = {}
    for key in template.decisions:
        flip_noise = rng.random() < profile.noise
        decisions[key] = _base_flip(profile, key) != flip_noise
    entries: list[int | None] = list(template.order(decisions))

    if template.kind == "polar":
        if profile.v92A == "none":
            shift = ordinal % len(entries)
            entries = entries[shift:] + entries[:shift]
        else:
            misplaced = rng.random() < profile.noise
            position = "elsewhere" if misplaced else profile.v92A
            at = {"initial": 0, "second": 1, "elsewhere": 3,
                  "final": len(entries) - 1}[position]
            entries.insert(at, None)  # None marks the planted particle

    tree = template.tree()
    forms = tuple(PARTICLE if e is None else tree.token(e).form for e in entries)
    links = frozenset(AlignmentLink(src=e, tgt=pos)
                      for pos, e in enumerate(entries, start=1) if e is not None)
    return SentencePair(source=tree, target_forms=forms, links=links)


def generate(spec: SyntheticSpec) -> tuple[WalsDatabase, dict[str, ParallelCorpus]]:
    """Build the WALS database and per-language corpora for a synthetic spec."""
    records = []
    corpora = {}
    for code, genus, family, profile in spec.languages:
        rng = random.Random(f"{spec.seed}/{code}")
        pairs = []
        for i in range(spec.sentences_per_language):
            template = TEMPLATES[i % len(TEMPLATES)]
            pairs.append(_build_pair(template, profile, i, rng))
        corpora[code] = ParallelCorpus(language_code=code, pairs=tuple(pairs))
        records.append(LanguageRecord(
            wals_code=code, name=code.upper(), genus=genus, family=family,
            rule_values=profile.rule_codes()))
    db = WalsDatabase(rules=standard_rules(), languages=tuple(records))
    return db, corpora


_BENCHMARK_PROFILES = (
    ("Alpha", "North", dict(v83A="OV", v85A="post", v86A="gen-noun",
                            v88A="dem-noun", v92A="final", v107A="passive")),
    ("Beta", "North", dict(v83A="VO", v85A="pre", v86A="noun-gen",
                           v88A="noun-dem", v92A="initial", v107A="no-passive")),
    ("Gamma", "South", dict(v83A="OV", v85A="pre", v86A="gen-noun",
                            v88A="noun-dem", v92A="second", v107A="passive")),
    ("Delta", "South", dict(v83A="VO", v85A="post", v86A="noun-gen",
                            v88A="dem-noun", v92A="none", v107A="no-passive")),
)


def default_benchmark(noise: float = 0.0, sentences: int = 200,
                      seed: int = 42) -> SyntheticSpec:
    """20 languages in 4 genus-pure genera (5 each) across 2 families,
    200 sentences per language, seed 42. Profiles cover both values of every
    binary rule and all particle positions including none."""
    languages = []
    for g, (genus, family, fields) in enumerate(_BENCHMARK_PROFILES):
        profile = TypologicalProfile(noise=noise, **fields)
        for m in range(5):
            code = chr(ord("a") + g) * 2 + chr(ord("a") + m)
            languages.append((code, genus, family, profile))
    return SyntheticSpec(languages=tuple(languages),
                         sentences_per_language=sentences, seed=seed)


def write_benchmark(db: WalsDatabase, corpora: Mapping[str, ParallelCorpus],
                    out_dir, spec: SyntheticSpec, config_hash: str = "") -> None:
    """Write one subdirectory per language (source.conll, target.txt,
    alignments.txt) plus wals.csv, rules.csv, and a sha256 manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for code in sorted(corpora):
        lang_dir = out / code
        lang_dir.mkdir(exist_ok=True)
        corpus = corpora[code]
        write_conll([pair.source for pair in corpus], lang_dir / "source.conll")
        write_sentences([pair.target_forms for pair in corpus], lang_dir / "target.txt")
        write_alignments([pair.links for pair in corpus], lang_dir / "alignments.txt")
    write_wals_csv(db, out / "wals.csv")
    write_rules_csv(db.rules, out / "rules.csv")

    manifest = {
        "tool": f"walspred {__version__}",
        "config_sha256": config_hash,
        "seed": spec.seed,
        "sentences_per_language": spec.sentences_per_language,
        "generator": GENERATOR_ID,
        "files": {},
    }
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            manifest["files"][str(path.relative_to(out))] = digest
    with open(out / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def verify_manifest(directory) -> list[str]:
    """Paths listed in the manifest whose checksum no longer matches (or that
    are missing). An empty list means the tree is intact."""
    root = Path(directory)
    with open(root / "manifest.json", encoding="utf-8") as handle:
        manifest = json.load(handle)
    bad = []
    for rel, expected in manifest["files"].items():
        path = root / rel
        if not path.is_file() or hashlib.sha256(path.read_bytes()).hexdigest() != expected:
            bad.append(rel)
    return bad
