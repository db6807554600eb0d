"""Independent reference implementations used to cross-check the pipeline.

Everything here is written straight from the rule definitions with plain
loops and no reuse of the library's selector/counting code paths.
"""

import random

from walspred.corpus import AlignmentLink, DependencyTree, ParallelCorpus, SentencePair, Token

CLAUSE_LABELS = {"advcl", "ccomp", "xcomp", "rcmod", "acl", "csubj", "csubjpass"}
DEMONSTRATIVES = {"this", "that", "these", "those"}


def brute_exclusive(links, s):
    targets = sorted({t for (src, t) in links if src == s})
    if len(targets) != 1:
        return None
    t = targets[0]
    sources = sorted({src for (src, tgt) in links if tgt == t})
    return t if sources == [s] else None


def brute_context(tokens, idx):
    if any(t.form == "?" for t in tokens):
        return "question"
    seen = set()
    while idx != 0 and idx not in seen:
        seen.add(idx)
        tok = tokens[idx - 1]
        if tok.deprel in CLAUSE_LABELS:
            return "dependent_clause"
        idx = tok.head
    return "plain"


def brute_candidates(rule, tree):
    """(head, dep) source index pairs a rule's selector should consider,
    before any alignment filtering."""
    toks = list(tree)
    out = []
    for t in toks:
        if rule == "83A" and t.deprel == "dobj" and t.head != 0:
            out.append((t.head, t.index))
        elif rule == "85A" and t.deprel == "adpmod" and t.head != 0:
            own = [u.index for u in toks if u.head == t.index and u.deprel == "adpobj"]
            sib = [u.index for u in toks
                   if u.head == t.head and u.deprel == "adpobj" and u.index != t.index]
            pool = own if own else sib
            if pool:
                noun = sorted(pool, key=lambda i: (abs(i - t.index), i))[0]
                out.append((noun, t.index))
        elif rule == "86A" and t.deprel == "poss" and t.head != 0:
            out.append((t.head, t.index))
        elif rule == "88A" and t.deprel in ("det", "pron") and t.head != 0 \
                and t.form.lower() in DEMONSTRATIVES \
                and toks[t.head - 1].upos.startswith("N"):
            out.append((t.head, t.index))
        elif rule == "107A" and t.deprel == "nsubjpass" and t.head != 0:
            out.append((t.head, t.index))
    return out


def brute_counts(rule, corpus):
    """Reference ContextCounts tuple and instance count for a rule."""
    same_all = diff_all = same_q = diff_q = same_dep = diff_dep = n = 0
    for pair in corpus:
        links = [(l.src, l.tgt) for l in pair.links]
        for head, dep in brute_candidates(rule, pair.source):
            t_head = brute_exclusive(links, head)
            t_dep = brute_exclusive(links, dep)
            if t_head is None or t_dep is None:
                continue
            n += 1
            same = ((dep - head > 0) and (t_dep - t_head > 0)) or \
                   ((dep - head < 0) and (t_dep - t_head < 0))
            context = brute_context(list(pair.source), head)
            if same:
                same_all += 1
            else:
                diff_all += 1
            if context == "question":
                same_q += same
                diff_q += not same
            elif context == "dependent_clause":
                same_dep += same
                diff_dep += not same
    return (same_all, diff_all, same_q, diff_q, same_dep, diff_dep), n


_FORMS = ["alpha", "beta", "gamma", "delta", "this", "that", "these", "?", "zu", "omega"]
_UPOS = ["NN", "VB", "DT", "IN", "PRP", "."]
_DEPRELS = ["dobj", "adpmod", "poss", "det", "pron", "nsubj", "nsubjpass",
            "adpobj", "advcl", "ccomp", "mark", "dep", "p"]


def random_pair(rng: random.Random, max_len: int = 8) -> SentencePair:
    """A random valid sentence pair with arbitrary (possibly messy)
    alignments, for exercising the exclusivity filter."""
    n_src = rng.randint(1, max_len)
    tokens = []
    for i in range(1, n_src + 1):
        head = 0 if i == 1 else rng.randint(1, i - 1)
        tokens.append(Token(
            index=i, form=rng.choice(_FORMS), upos=rng.choice(_UPOS), head=head,
            deprel="root" if head == 0 else rng.choice(_DEPRELS)))
    n_tgt = rng.randint(1, max_len)
    target = tuple(rng.choice(_FORMS) for _ in range(n_tgt))
    n_links = rng.randint(0, n_src + n_tgt)
    links = frozenset(AlignmentLink(rng.randint(1, n_src), rng.randint(1, n_tgt))
                      for _ in range(n_links))
    return SentencePair(source=DependencyTree(tuple(tokens)), target_forms=target,
                        links=links)


def random_corpus(rng: random.Random, n_pairs: int, language: str = "rnd") -> ParallelCorpus:
    return ParallelCorpus(language_code=language,
                          pairs=tuple(random_pair(rng) for _ in range(n_pairs)))
