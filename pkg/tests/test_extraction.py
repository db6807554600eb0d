import random

import pytest

from walspred.corpus import ParallelCorpus
from walspred.extraction import (Context, ContextCounts, build_text_vector,
                                 classify_context, exclusive_alignment,
                                 order_match, select_instances_83A,
                                 select_instances_85A, select_instances_86A,
                                 select_instances_88A, select_instances_107A,
                                 select_instances_107A_active,
                                 read_features_csv, write_features_csv)

import oracles
from conftest import corpus, pair, tree


def simple_pair(links, n_src=3, n_tgt=3):
    t = tree(*[("w%d" % i, "NN", 0 if i == 1 else 1, "root" if i == 1 else "dep")
               for i in range(1, n_src + 1)])
    return pair(t, " ".join("x%d" % i for i in range(1, n_tgt + 1)), links)


class TestExclusiveAlignment:
    def test_unique_mutual_link(self):
        assert exclusive_alignment(simple_pair([(1, 1)]), 1) == 1

    def test_source_fans_out(self):
        assert exclusive_alignment(simple_pair([(1, 1), (1, 2)]), 1) is None

    def test_target_shared(self):
        assert exclusive_alignment(simple_pair([(1, 1), (2, 1)]), 1) is None

    def test_unaligned(self):
        assert exclusive_alignment(simple_pair([(2, 2)]), 1) is None


class TestClassifyContext:
    def test_plain_declarative(self):
        t = tree(("The", "DT", 2, "det"), ("dog", "NN", 3, "nsubj"),
                 ("barks", "VB", 0, "root"), (".", ".", 3, "p"))
        assert classify_context(t, 3) is Context.PLAIN

    def test_question_mark_anywhere_wins(self):
        t = tree(("barks", "VB", 0, "root"), ("?", ".", 1, "p"))
        assert classify_context(t, 1) is Context.QUESTION

    def test_conj_is_not_a_dependent_clause(self, hand_corpus):
        # head "found" attaches via conj in the figure sentence
        figure = hand_corpus.pairs[0]
        assert figure.source.token(8).deprel == "conj"
        assert classify_context(figure.source, 8) is Context.PLAIN

    def test_ccomp_marks_dependent_clause(self):
        t = tree(("she", "PRP", 2, "nsubj"), ("said", "VB", 0, "root"),
                 ("left", "VB", 2, "ccomp"))
        assert classify_context(t, 3) is Context.DEPENDENT_CLAUSE

    def test_label_set_is_configurable(self):
        t = tree(("she", "PRP", 2, "nsubj"), ("said", "VB", 0, "root"),
                 ("left", "VB", 2, "ccomp"))
        assert classify_context(t, 3, frozenset({"advcl"})) is Context.PLAIN


class TestOrderMatch:
    def test_them_found(self):
        # dep after head on both sides
        assert order_match(9, 8, 9, 8) is True

    def test_dothan_found(self):
        assert order_match(11, 8, 11, 8) is True

    def test_after_brothers_flips(self):
        # English adposition before the noun, German after it
        assert order_match(4, 6, 6, 5) is False


class TestSelectors:
    def test_no_dobj_edges(self):
        p = simple_pair([(1, 1)])
        assert select_instances_83A(p) == []

    def test_figure_pair_dobj(self, hand_corpus):
        instances = select_instances_83A(hand_corpus.pairs[0])
        assert len(instances) == 1
        inst = instances[0]
        assert (inst.src_head, inst.src_dep) == (8, 9)
        assert (inst.tgt_head, inst.tgt_dep) == (8, 9)
        assert inst.context is Context.PLAIN

    def test_fanout_object_excluded(self):
        t = tree(("saw", "VB", 0, "root"), ("it", "PRP", 1, "dobj"))
        p = pair(t, "sah es auch", [(1, 1), (2, 2), (2, 3)])
        assert select_instances_83A(p) == []

    def test_figure_pair_adpositions(self, hand_corpus):
        instances = select_instances_85A(hand_corpus.pairs[0])
        assert {(i.src_dep, i.src_head) for i in instances} == {(4, 6), (10, 11)}

    def test_unaligned_adposition_excluded(self):
        t = tree(("went", "VB", 0, "root"), ("to", "IN", 1, "adpmod"),
                 ("town", "NN", 1, "adpobj"))
        p = pair(t, "ging stadt", [(1, 1), (3, 2)])
        assert select_instances_85A(p) == []

    def test_poss_hand_fixture(self, hand_corpus):
        instances = select_instances_86A(hand_corpus.pairs[0])
        assert len(instances) == 1
        assert (instances[0].src_head, instances[0].src_dep) == (6, 5)

    def test_demonstrative_selected(self):
        t = tree(("this", "DT", 2, "det"), ("dog", "NN", 3, "nsubj"),
                 ("barked", "VB", 0, "root"))
        p = pair(t, "dieser Hund bellte", [(1, 1), (2, 2), (3, 3)])
        assert len(select_instances_88A(p)) == 1

    def test_uppercase_demonstrative_included(self):
        t = tree(("This", "DT", 2, "det"), ("dog", "NN", 3, "nsubj"),
                 ("barked", "VB", 0, "root"))
        p = pair(t, "dieser Hund bellte", [(1, 1), (2, 2), (3, 3)])
        assert len(select_instances_88A(p)) == 1

    def test_that_heading_to_verb_excluded(self):
        t = tree(("that", "IN", 3, "mark"), ("he", "PRP", 3, "nsubj"),
                 ("left", "VB", 0, "root"))
        p = pair(t, "dass er ging", [(1, 1), (2, 2), (3, 3)])
        assert select_instances_88A(p) == []

    def test_non_noun_parent_excluded(self):
        t = tree(("this", "DT", 2, "det"), ("works", "VB", 0, "root"))
        p = pair(t, "dies geht", [(1, 1), (2, 2)])
        assert select_instances_88A(p) == []

    def test_passive_instance(self, hand_corpus):
        instances = select_instances_107A(hand_corpus.pairs[3])
        assert len(instances) == 1
        assert (instances[0].src_head, instances[0].src_dep) == (4, 2)

    def test_no_passive_edges_empty(self):
        t = tree(("she", "PRP", 2, "nsubj"), ("runs", "VB", 0, "root"))
        p = pair(t, "sie rennt", [(1, 1), (2, 2)])
        assert select_instances_107A(p) == []
        assert len(select_instances_107A_active(p)) == 1

    def test_fanned_subject_excluded(self):
        t = tree(("dog", "NN", 2, "nsubjpass"), ("seen", "VB", 0, "root"))
        p = pair(t, "Hund ward gesehen", [(1, 1), (1, 2), (2, 3)])
        assert select_instances_107A(p) == []


class TestBuildTextVector:
    def test_empty_corpus_zero_vector(self):
        vec = build_text_vector("83A", corpus("xyz"))
        assert vec.raw.as_tuple() == (0, 0, 0, 0, 0, 0)
        assert vec.normalized == (0.0,) * 6
        assert vec.n_instances == 0

    def test_figure_pair_85A_half_half(self, hand_corpus):
        only_figure = corpus("ger", hand_corpus.pairs[0])
        vec = build_text_vector("85A", only_figure)
        assert vec.raw.as_tuple() == (1, 1, 0, 0, 0, 0)
        assert vec.normalized == (0.5, 0.5, 0.0, 0.0, 0.0, 0.0)

    def test_unknown_rule(self, hand_corpus):
        with pytest.raises(ValueError, match="92A"):
            build_text_vector("92A", hand_corpus)

    @pytest.mark.parametrize("rule,expected,n", [
        ("83A", (2, 2, 1, 1, 0, 1), 4),
        ("85A", (1, 3, 0, 1, 0, 0), 4),
        ("86A", (2, 0, 0, 0, 1, 0), 2),
        ("88A", (2, 1, 1, 0, 0, 0), 3),
        ("107A", (0, 1, 0, 0, 0, 0), 1),
    ])
    def test_hand_computed_fixture_counts(self, hand_corpus, rule, expected, n):
        vec = build_text_vector(rule, hand_corpus)
        assert vec.raw.as_tuple() == expected
        assert vec.n_instances == n

    def test_permutation_invariance(self, hand_corpus):
        shuffled = ParallelCorpus("ger", tuple(reversed(hand_corpus.pairs)))
        for rule in ("83A", "85A", "86A", "88A", "107A"):
            assert build_text_vector(rule, shuffled) == build_text_vector(rule, hand_corpus)

    def test_normalized_pairs_sum_exactly(self):
        rng = random.Random(7)
        for trial in range(25):
            c = oracles.random_corpus(rng, rng.randint(0, 6))
            for rule in ("83A", "85A", "86A", "88A", "107A"):
                vec = build_text_vector(rule, c)
                for k in range(0, 6, 2):
                    s = vec.normalized[k] + vec.normalized[k + 1]
                    assert s == 1.0 or s == 0.0

    def test_matches_brute_force_on_small_corpora(self):
        rng = random.Random(20240803)
        for trial in range(60):
            c = oracles.random_corpus(rng, rng.randint(0, 5))
            for rule in ("83A", "85A", "86A", "88A", "107A"):
                vec = build_text_vector(rule, c)
                expected_counts, expected_n = oracles.brute_counts(rule, c)
                assert vec.raw.as_tuple() == expected_counts, (trial, rule)
                assert vec.n_instances == expected_n


class TestContextCountsInvariants:
    def test_subset_bound_enforced(self):
        with pytest.raises(ValueError, match="question"):
            ContextCounts(same_all=0, diff_all=0, same_q=1, diff_q=0,
                          same_dep=0, diff_dep=0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ContextCounts(same_all=-1, diff_all=0, same_q=0, diff_q=0,
                          same_dep=0, diff_dep=0)

    def test_kept_instances_satisfy_exclusivity(self, hand_corpus):
        for p in hand_corpus:
            links = [(l.src, l.tgt) for l in p.links]
            for select in (select_instances_83A, select_instances_85A,
                           select_instances_86A, select_instances_88A,
                           select_instances_107A):
                for inst in select(p):
                    assert oracles.brute_exclusive(links, inst.src_head) == inst.tgt_head
                    assert oracles.brute_exclusive(links, inst.src_dep) == inst.tgt_dep


def test_feature_csv_round_trip(tmp_path):
    rows = [("aaa", "83A", (0.5, 0.5, 0.0, 0.0, 0.0, 0.0), 4, None),
            ("aaa", "92A", (0.0, 0.0, 1.0, 0.0), 50, "ka")]
    path = tmp_path / "features.csv"
    write_features_csv(rows, path, metadata="test run")
    again = read_features_csv(path)
    assert again[0] == ("aaa", "83A", (0.5, 0.5, 0.0, 0.0, 0.0, 0.0), 4, None)
    assert again[1] == ("aaa", "92A", (0.0, 0.0, 1.0, 0.0, 0.0, 0.0), 50, "ka")
