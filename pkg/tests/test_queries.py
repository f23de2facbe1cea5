from collections import Counter
from urllib.parse import parse_qs, urlsplit

import pytest
from hypothesis import given, strategies as st
from scipy import stats

from serpaudit.model import Condition
from serpaudit.queries import (
    EmptyTerm,
    QuerySet,
    build_search_url,
    compose_query_set,
    default_templates,
    parse_template_file,
    randomize_order,
)


class TestCompose:
    def test_diabetes_instantiation(self):
        qs = compose_query_set(Condition.DIABETES)
        assert "diabetes cure" in qs.terms

    def test_generic_term_verbatim(self):
        for condition in Condition:
            assert "stem cells cost" in compose_query_set(condition).terms

    def test_fourteen_terms_six_generic(self):
        qs = compose_query_set(Condition.PARKINSONS)
        assert len(qs.terms) == 14
        token = Condition.PARKINSONS.query_token
        generic = [t for t in qs.terms if token not in t]
        assert len(generic) == 6

    def test_pure(self):
        assert compose_query_set(Condition.MULTIPLE_SCLEROSIS) == compose_query_set(
            Condition.MULTIPLE_SCLEROSIS
        )

    @pytest.mark.parametrize("condition", list(Condition))
    def test_disease_terms_contain_token_exactly_once(self, condition):
        qs = compose_query_set(condition)
        token = condition.query_token
        counts = [t.count(token) for t in qs.terms]
        assert sorted(counts) == [0] * 6 + [1] * 8

    def test_template_file_placeholder_guard(self):
        with pytest.raises(ValueError):
            parse_template_file("version 1\n[disease] and [disease] again\n")

    def test_default_template_file_versioned(self):
        tf = default_templates()
        assert tf.version >= 1
        assert len(tf.templates) == 14


class TestRandomizeOrder:
    QS = compose_query_set(Condition.PARKINSONS)

    def test_deterministic(self):
        assert randomize_order(self.QS, 42) == randomize_order(self.QS, 42)

    def test_permutation(self):
        out = randomize_order(self.QS, 7)
        assert sorted(out) == sorted(self.QS.terms)

    @given(st.integers(min_value=0, max_value=2**63 - 1))
    def test_permutation_property(self, seed):
        out = randomize_order(self.QS, seed)
        assert Counter(out) == Counter(self.QS.terms)

    def test_first_position_uniformity(self):
        # Chi-square uniformity oracle over 10,000 seeds; each term should
        # lead between 4% and 11% of runs (expected 1/14 ~ 7.1%).
        n = 10_000
        firsts = Counter(randomize_order(self.QS, seed)[0] for seed in range(n))
        assert set(firsts) == set(self.QS.terms)
        for term, count in firsts.items():
            assert 0.04 <= count / n <= 0.11, term
        _, p = stats.chisquare(list(firsts.values()))
        assert p > 1e-4


class TestBuildSearchUrl:
    def test_space_as_plus(self):
        assert (
            build_search_url("co.uk", "stem cells")
            == "https://www.google.co.uk/search?q=stem+cells"
        )

    def test_no_encoding_needed(self):
        assert build_search_url("com", "cure") == "https://www.google.com/search?q=cure"

    def test_question_mark_percent_encoded(self):
        url = build_search_url("ca", "can stem cells cure diabetes?")
        query = urlsplit(url).query
        assert "%3F" in query and "?" not in query

    def test_empty_term_rejected(self):
        with pytest.raises(EmptyTerm):
            build_search_url("com", "")
        with pytest.raises(EmptyTerm):
            build_search_url("com", "   ")

    @given(
        st.sampled_from(["com", "ca", "co.uk", "com.au"]),
        st.text(
            alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
            min_size=1,
        ).filter(lambda s: s.strip()),
    )
    def test_round_trip_through_urllib(self, tld, term):
        url = build_search_url(tld, term)
        parts = urlsplit(url)
        assert parts.hostname == f"www.google.{tld}"
        params = parse_qs(parts.query, keep_blank_values=True)
        assert params["q"] == [term]


class TestQuerySetInvariants:
    def test_duplicate_terms_rejected(self):
        terms = tuple(f"t{i}" for i in range(13)) + ("t0",)
        with pytest.raises(ValueError):
            QuerySet(study_id=1, terms=terms)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            QuerySet(study_id=1, terms=("a", "b"))
