import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from report_fault_injector.corpus import BugReport, load_corpus_collection
from report_fault_injector.errors import EmptyQuery
from report_fault_injector.irloc import (
    build_index,
    build_query,
    localize,
    locations_csv,
    rank_files,
    rank_statements,
    stem,
    tokenize,
)


def test_camel_case_is_split_and_kept_whole():
    terms = tokenize("parseHTTPResponse")
    assert stem("parse") in terms
    assert stem("http") in terms
    assert stem("response") in terms
    assert stem("parsehttpresponse") in terms


def test_snake_case_is_split():
    terms = tokenize("total_weight")
    assert stem("total") in terms
    assert stem("weight") in terms
    assert stem("totalweight") in terms


def test_stopwords_keywords_and_short_terms_dropped():
    terms = tokenize("the while x 42 loop")
    assert set(terms) == {stem("loop")}


def test_builtins_dropped_only_in_code():
    assert stem("len") in tokenize("len(values)", "report")
    assert stem("len") not in tokenize("len(values)", "code")


def test_terms_are_counted():
    assert tokenize("sum sum total")[stem("sum")] == 2


def test_query_from_report(add_report):
    query = build_query(add_report)
    assert query.source_report_id == "R1"
    assert stem("add") in query.tokens
    assert "the" not in query.tokens


def test_empty_query():
    report = BugReport(id="R9", title="the", description="a an", status="open")
    with pytest.raises(EmptyQuery):
        build_query(report)


def test_file_ranking_prefers_matching_file(calc_corpus, add_report):
    files = rank_files(build_index(calc_corpus, "file"), build_query(add_report), 20)
    assert [f.path for f in files] == ["src/calc.mj", "src/text.mj"]
    assert files[0].score > 0.0
    assert files[1].score == 0.0


def test_file_ranking_truncates(calc_corpus, add_report):
    assert len(rank_files(build_index(calc_corpus, "file"), build_query(add_report), 1)) == 1


def test_statement_ranking(calc_corpus, add_report):
    locations = localize(calc_corpus, add_report, top_files=20, top_statements=50)
    assert locations[0].statement.key() == ("src/calc.mj", 0)
    assert [loc.rank for loc in locations] == list(range(1, len(locations) + 1))
    scores = [loc.score for loc in locations]
    assert scores == sorted(scores, reverse=True)
    assert all(0.0 <= s <= 1.0 for s in scores)


def test_statement_ranking_limited_to_top_files(calc_corpus, add_report):
    query = build_query(add_report)
    files = rank_files(build_index(calc_corpus, "file"), query, 1)
    locations = rank_statements(build_index(calc_corpus, "statement"), query, files, 50)
    assert {loc.statement.file_path for loc in locations} == {"src/calc.mj"}
    assert len(locations) == 4


def test_statement_documents_exclude_nested_statements(calc_corpus):
    index = build_index(calc_corpus, "statement")
    assert len(index) <= len(calc_corpus.statement_refs())
    document = index.document(0)
    assert all(w > 0 for w in document.term_weights.values())


def test_locations_csv(calc_corpus, add_report):
    text = locations_csv(localize(calc_corpus, add_report, top_statements=2))
    lines = text.splitlines()
    assert lines[0] == "rank,path,statement_index,score,file_score"
    assert lines[1].startswith("1,src/calc.mj,0,")
    assert len(lines) == 3


def test_seeded_fixed_statements_rank_high(seeded_root):
    hits = 0
    for corpus in load_corpus_collection(seeded_root):
        for fault in corpus.faults:
            report = corpus.report(fault.bug_report_id)
            locations = localize(corpus, report, top_files=20, top_statements=50)
            ranked = {loc.statement.key() for loc in locations}
            if all(s.key() in ranked for s in fault.fixed_statements):
                hits += 1
    assert hits >= 8


@pytest.fixture(scope="module")
def seeded_corpora(seeded_root):
    return load_corpus_collection(seeded_root)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_file_ranking_ignores_document_order(seeded_corpora, data):
    corpus = data.draw(st.sampled_from(seeded_corpora))
    report = data.draw(st.sampled_from(corpus.reports))
    order = data.draw(st.permutations(range(len(corpus.sources))))
    shuffled = dataclasses.replace(corpus, sources=tuple(corpus.sources[i] for i in order))
    query = build_query(report)
    k = data.draw(st.integers(1, 20))
    expected = rank_files(build_index(corpus, "file"), query, k)
    ranked = rank_files(build_index(shuffled, "file"), query, k)
    assert [f.path for f in ranked] == [f.path for f in expected]
    assert [f.score for f in ranked] == pytest.approx([f.score for f in expected], abs=1e-12)
