import os

import pytest

from scripts.core.exceptions import UnsupportedCombination
from scripts.core.model import parse_terms
from scripts.core.queries import catalogue_instances, parse_query_text
from scripts.core.translate import (
    Dialect, explain, output_names, regex_literal, translate, translator_for, xquery_string,
)


GOLDEN_DIR = os.path.join(os.path.dirname(__file__), 'golden')
CASES = [(q, d) for d in Dialect for q in catalogue_instances()]


def _golden(dialect: Dialect, name: str) -> str:
    with open(os.path.join(GOLDEN_DIR, dialect.value, name), encoding='utf-8', newline='') as fh:
        return fh.read()


@pytest.mark.parametrize("q,dialect", CASES, ids=[f"{d.value}-{q.label}" for q, d in CASES])
def test_matches_golden_file(q, dialect):
    tq = translate(q, dialect)
    names = output_names(q, tq)
    assert tq.main_text == _golden(dialect, names[0])
    for text, name in zip(tq.setup_texts, names[1:]):
        assert text == _golden(dialect, name)


def test_every_golden_file_is_produced():
    expected = set()
    for dialect in Dialect:
        for q in catalogue_instances():
            expected.update(f"{dialect.value}/{n}" for n in output_names(q, translate(q, dialect)))
    on_disk = {
        f"{d}/{name}" for d in os.listdir(GOLDEN_DIR) for name in os.listdir(os.path.join(GOLDEN_DIR, d))
    }
    assert on_disk == expected


def test_deterministic():
    for dialect in Dialect:
        for q in catalogue_instances(case_sensitive=True):
            assert translate(q, dialect) == translate(q, dialect)


class TestAggregationShape:

    @pytest.mark.parametrize("text", ["Q6", "Q7", "Q8(i=1,j=2,k=3)", "Q9(i=1,j=2,k=3)"])
    def test_flattening_construct(self, text):
        q = parse_query_text(text)
        assert "UNNEST d.authors" in translate(q, Dialect.N1QL).main_text
        assert '"$unwind": "$authors"' in translate(q, Dialect.MONGO_PIPELINE).main_text
        assert "group by" in translate(q, Dialect.XQUERY31).main_text
        assert "group by" not in translate(q, Dialect.XQUERY10).main_text
        couch = translate(q, Dialect.COUCH_MANGO_VIEW)
        assert len(couch.setup_texts) == 1 and '"_count"' in couch.setup_texts[0]

    def test_selections_have_no_setup(self):
        for dialect in Dialect:
            for q in catalogue_instances()[:11]:
                assert translate(q, dialect).setup_texts == ()

    def test_design_name_depends_on_content(self):
        couch = translator_for(Dialect.COUCH_MANGO_VIEW)
        q8, q9 = parse_query_text("Q8(i=1,j=2,k=3)"), parse_query_text("Q9(i=1,j=2,k=3)")
        assert couch.design_name(q8) != couch.design_name(q9)
        assert couch.design_name(q8) == couch.design_name(parse_query_text("Q8(i=1,j=2,k=3)"))


class TestFiltersAndEscaping:

    def test_single_folded_expression(self):
        q = parse_query_text("Q5(i=1,j=2,k=3)")
        assert translate(q, Dialect.N1QL).main_text.count("WHERE") == 1
        assert translate(q, Dialect.XQUERY31).main_text.count("where") == 1

    def test_case_sensitive_drops_lowering(self):
        q = parse_query_text("Q1(i=1)", case_sensitive=True)
        assert "lower-case" not in translate(q, Dialect.XQUERY31).main_text
        assert "LOWER" not in translate(q, Dialect.N1QL).main_text
        assert '"$options"' not in translate(q, Dialect.MONGO_PIPELINE).main_text
        assert "(?i)" not in translate(q, Dialect.COUCH_MANGO_VIEW).main_text

    def test_special_characters_in_terms(self):
        terms = parse_terms('c++,a"b,x&y')
        q = parse_query_text("Q3(i=1,j=2)", terms)
        assert r'c\\+\\+' in translate(q, Dialect.MONGO_PIPELINE).main_text
        xq = translate(parse_query_text("Q3(i=2,j=3)", terms), Dialect.XQUERY31).main_text
        assert '"a""b"' in xq and '"x&amp;y"' in xq

    def test_helpers(self):
        assert regex_literal("a.b(c)") == r"a\.b\(c\)"
        assert xquery_string('say "hi"') == '"say ""hi"""'

    def test_collection_name(self):
        q = parse_query_text("Q6")
        assert "db.papers.aggregate" in translate(q, Dialect.MONGO_PIPELINE, collection="papers").main_text
        assert "`papers`" in translate(q, Dialect.N1QL, collection="papers").main_text


class TestExplain:

    def test_mentions_folding(self):
        notes = explain(parse_query_text("Q4(i=1,j=2,k=3)"), Dialect.XQUERY31)
        assert any("constraint folding" in n for n in notes)

    def test_sedna_selection_needs_no_grouping(self):
        notes = explain(parse_query_text("Q1(i=1)"), Dialect.XQUERY10)
        assert any("sin agrupación necesaria" in n for n in notes)

    def test_couch_view_strategy(self):
        notes = " ".join(explain(parse_query_text("Q7"), Dialect.COUCH_MANGO_VIEW))
        assert "map-side filtering" in notes and "reduce-side count" in notes


def test_unknown_dialect():
    with pytest.raises(UnsupportedCombination):
        translator_for("SPARQL")
