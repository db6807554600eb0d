"""Rule 92A pipeline: split questions into polar and information questions on
the source side, infer the target language's polar question particle by a
smoothed ratio of relative frequencies, and count the positions at which the
particle appears."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .corpus import ParallelCorpus, SentencePair

WH_WORDS = frozenset(
    {"who", "whom", "whose", "what", "which", "when", "where", "why", "how"})

DEFAULT_ALPHA = 0.5
DEFAULT_MIN_FREQ = 3


@dataclass(frozen=True)
class QuestionSplit:
    polar: tuple[SentencePair, ...]
    information: tuple[SentencePair, ...]


@dataclass(frozen=True)
class ParticleVector:
    """Counts of the inferred particle at each sentence position, with their
    L1 normalization. Order: initial, second, final, elsewhere."""

    particle: Optional[str]
    counts: tuple[int, int, int, int]
    normalized: tuple[float, float, float, float]


def is_punctuation(form: str) -> bool:
    """A form with no letter and no digit counts as punctuation."""
    return not any(ch.isalpha() or ch.isdigit() for ch in form)


def split_questions(corpus: ParallelCorpus) -> QuestionSplit:
    """Partition the corpus pairs whose source contains a "?" form: those with
    a source wh-word are information questions, the rest are polar."""
    polar, information = [], []
    for pair in corpus:
        forms = [tok.form for tok in pair.source]
        if "?" not in forms:
            continue
        if any(form.lower() in WH_WORDS for form in forms):
            information.append(pair)
        else:
            polar.append(pair)
    return QuestionSplit(polar=tuple(polar), information=tuple(information))


def infer_particle(split: QuestionSplit, alpha: float = DEFAULT_ALPHA,
                   min_freq: int = DEFAULT_MIN_FREQ) -> Optional[str]:
    """The target word type whose smoothed relative frequency in polar
    questions most exceeds its frequency in information questions.

    Candidates need at least min_freq polar occurrences and must not be pure
    punctuation. Ties break toward the higher polar count, then the
    lexicographically smaller word. None when nothing qualifies.
    """
    polar_counts: Counter[str] = Counter()
    info_counts: Counter[str] = Counter()
    for pair in split.polar:
        polar_counts.update(pair.target_forms)
    for pair in split.information:
        info_counts.update(pair.target_forms)
    n_pol = sum(polar_counts.values())
    n_inf = sum(info_counts.values())
    vocab = len(set(polar_counts) | set(info_counts))
    best = None
    best_key = None
    for word, c_pol in polar_counts.items():
        if c_pol < min_freq or is_punctuation(word):
            continue
        score = (((c_pol + alpha) / (n_pol + alpha * vocab))
                 / ((info_counts[word] + alpha) / (n_inf + alpha * vocab)))
        key = (score, c_pol)
        if best is None or key > best_key or (key == best_key and word < best):
            best, best_key = word, key
    return best


def particle_position(target_forms, particle: str) -> Optional[str]:
    """Position bucket of the particle's first occurrence after dropping
    punctuation tokens: initial, final, second, or elsewhere. Final wins over
    second; a single-token sentence counts as initial."""
    content = [form for form in target_forms if not is_punctuation(form)]
    try:
        pos = content.index(particle) + 1
    except ValueError:
        return None
    if pos == 1:
        return "initial"
    if pos == len(content):
        return "final"
    if pos == 2:
        return "second"
    return "elsewhere"


def build_92A_vector(corpus: ParallelCorpus, alpha: float = DEFAULT_ALPHA,
                     min_freq: int = DEFAULT_MIN_FREQ) -> ParticleVector:
    """Infer the corpus language's polar question particle and count where it
    lands in each polar question's target sentence."""
    split = split_questions(corpus)
    particle = infer_particle(split, alpha=alpha, min_freq=min_freq)
    counts = {"initial": 0, "second": 0, "final": 0, "elsewhere": 0}
    if particle is not None:
        for pair in split.polar:
            bucket = particle_position(pair.target_forms, particle)
            if bucket is not None:
                counts[bucket] += 1
    raw = (counts["initial"], counts["second"], counts["final"], counts["elsewhere"])
    total = sum(raw)
    normalized = tuple(c / total for c in raw) if total else (0.0, 0.0, 0.0, 0.0)
    return ParticleVector(particle=particle, counts=raw, normalized=normalized)
