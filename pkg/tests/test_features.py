import json

import pytest

from walspred.errors import DataError
from walspred.features import (Dataset, DatasetRow, FeatureBlockSpec, assemble,
                               genealogy_block, genealogy_vocab, rules_block,
                               write_dataset_csv)
from walspred.wals import load_rules_csv, load_wals_csv

from conftest import DATA


@pytest.fixture(scope="module")
def db():
    rules = load_rules_csv(DATA / "rules_fixture.csv")
    return load_wals_csv(DATA / "wals_fixture.csv", rules)


TEXT6 = {"ger": (1.0, 0.0, 1.0, 0.0, 0.0, 0.0),
         "fra": (1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
         "eus": (0.0, 1.0, 0.0, 1.0, 0.0, 1.0),
         "tam": (0.0, 1.0, 0.0, 0.0, 0.0, 0.0),
         "mdi": (0.0, 1.0, 0.0, 0.0, 0.0, 0.0)}


class TestFeatureBlockSpec:
    def test_empty_blocks_rejected(self):
        with pytest.raises(ValueError):
            FeatureBlockSpec(frozenset(), "83A")

    def test_unknown_block_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            FeatureBlockSpec(frozenset({"sounds"}), "83A")


class TestRulesBlock:
    def test_width_for_target_83A(self, db):
        # 85A(5) + 86A(3) + 88A(6) + 92A(6) + 107A(2)
        assert len(rules_block(db, "ger", "83A")) == 22

    def test_missing_values_give_zero_groups(self, db):
        row = rules_block(db, "mdi", "85A")  # mdi has only 83A
        assert len(row) == 3 + 3 + 6 + 6 + 2
        assert row[:3] == [1.0, 0.0, 0.0]  # 83A = 1
        assert all(v == 0.0 for v in row[3:])

    def test_single_known_value_position(self, db):
        row = rules_block(db, "ger", "83A")
        # first group is 85A with domain 5; German is prepositions = 2
        assert row[:5] == [0.0, 1.0, 0.0, 0.0, 0.0]

    def test_unknown_language(self, db):
        with pytest.raises(DataError):
            rules_block(db, "zz", "83A")


class TestGenealogyBlock:
    def test_single_language_cohort(self, db):
        assert genealogy_block(db, "ger", ["ger"]) == [1.0, 1.0]

    def test_two_genera(self, db):
        row = genealogy_block(db, "ger", ["fra", "ger"])
        genera, families = genealogy_vocab(db, ["fra", "ger"])
        assert genera == ("Germanic", "Romance")
        assert families == ("Indo-European",)
        assert row == [1.0, 0.0, 1.0]

    def test_language_outside_cohort_vocab(self, db):
        with pytest.raises(DataError, match="vocabulary"):
            genealogy_block(db, "eus", ["ger", "fra"])


class TestAssemble:
    def test_rules_width_22(self, db):
        ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"rules"}), "83A"))
        assert ds.width == 22
        assert len(ds.rows) == 5  # all fixture languages have 83A and a vector

    def test_text_width_4_for_92A(self, db):
        vec4 = {"ger": (0.0, 0.0, 0.0, 0.0), "fra": (0.25, 0.25, 0.5, 0.0)}
        ds = assemble(db, vec4, FeatureBlockSpec(frozenset({"text"}), "92A"))
        assert ds.width == 4
        assert [r.language for r in ds.rows] == ["fra", "ger"]

    def test_text_plus_rules_width_28(self, db):
        ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"text", "rules"}), "83A"))
        assert ds.width == 28
        spans = dict((name, (a, b)) for name, a, b in ds.layout.blocks)
        assert spans["text"] == (0, 6)
        assert spans["rules"] == (6, 28)

    def test_row_order_matches_languages_with(self, db):
        ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"rules"}), "107A"))
        cohort = db.languages_with("107A", set(TEXT6))
        assert [r.language for r in ds.rows] == [rec.wals_code for rec in cohort]

    def test_labels_come_from_target_rule(self, db):
        ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"rules"}), "83A"))
        assert {r.language: r.label for r in ds.rows} == \
            {"ger": 2, "fra": 2, "eus": 1, "tam": 1, "mdi": 1}

    def test_missing_text_vector_names_language(self, db):
        vectors = dict(TEXT6)
        del vectors["eus"]
        with pytest.raises(DataError, match="eus"):
            assemble(db, vectors, FeatureBlockSpec(frozenset({"text"}), "83A"),
                     corpus_set=set(TEXT6))

    def test_block_removal_leaves_complement(self, db):
        spec_all = FeatureBlockSpec(frozenset({"text", "rules", "genealogy"}), "83A")
        full = assemble(db, TEXT6, spec_all)
        text_only = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"text"}), "83A"))
        rules_only = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"rules"}), "83A"))
        gene_only = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"genealogy"}), "83A"))
        for i, row in enumerate(full.rows):
            assert row.values == (text_only.rows[i].values
                                  + rules_only.rows[i].values
                                  + gene_only.rows[i].values)

    def test_one_hot_groups_have_at_most_a_single_one(self, db):
        ds = assemble(db, TEXT6,
                      FeatureBlockSpec(frozenset({"rules", "genealogy"}), "86A"))
        for row in ds.rows:
            for _, start, stop in ds.layout.groups:
                chunk = row.values[start:stop]
                assert all(v in (0.0, 1.0) for v in chunk)
                assert sum(chunk) <= 1.0


class TestDatasetInvariants:
    def test_mixed_widths_rejected(self):
        from walspred.features import BlockLayout
        layout = BlockLayout(blocks=(), groups=())
        with pytest.raises(ValueError, match="width"):
            Dataset(target_rule="83A", n_classes=3, layout=layout, rows=(
                DatasetRow("a", (1.0,), 1), DatasetRow("b", (1.0, 2.0), 1)))

    def test_label_outside_domain_rejected(self):
        from walspred.features import BlockLayout
        layout = BlockLayout(blocks=(), groups=())
        with pytest.raises(ValueError, match="label"):
            Dataset(target_rule="83A", n_classes=3, layout=layout, rows=(
                DatasetRow("a", (1.0,), 4),))

    def test_without_drops_one_row(self, db):
        ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"rules"}), "83A"))
        fold = ds.without(0)
        assert len(fold.rows) == len(ds.rows) - 1
        assert ds.rows[0] not in fold.rows


def test_dataset_dump(tmp_path, db):
    ds = assemble(db, TEXT6, FeatureBlockSpec(frozenset({"text", "rules"}), "83A"))
    csv_path, layout_path = tmp_path / "d.csv", tmp_path / "d.json"
    write_dataset_csv(ds, csv_path, layout_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("language,label,c0")
    assert len(lines) == 1 + len(ds.rows)
    layout = json.loads(layout_path.read_text())
    assert {b["name"] for b in layout["blocks"]} == {"text", "rules"}
    assert any(g["name"] == "rules:92A" for g in layout["groups"])
