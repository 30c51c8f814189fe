import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from _support import corpus_data
from hptk.document import (
    ParseError,
    corpus_names,
    corpus_text,
    format_coef,
    from_presentation,
    parse,
    parse_coef,
    schema,
)
from hptk.models import CORPUS


def errors_for(data):
    with pytest.raises(ParseError) as exc:
        parse(json.dumps(data))
    return exc.value.errors


def test_corpus_is_complete_and_canonical():
    assert corpus_names() == sorted(CORPUS)
    for name in corpus_names():
        text = corpus_text(name)
        doc = parse(text)
        assert doc.serialize() == text
        assert parse(doc.serialize()).serialize() == text
        built = from_presentation(CORPUS[name](), inner_product="monomial-orthonormal")
        assert built.serialize() == text


def test_t2_has_four_basis_elements():
    assert parse(corpus_text("T2")).presentation().dim == 4


def test_unknown_symbol_is_positioned():
    data = corpus_data("H3CE")
    data["product"][2]["result"][0]["basis"] = "q"
    (err,) = errors_for(data)
    assert err.where == "$.product[2].result[0].basis"
    assert "'q'" in err.message


@pytest.mark.parametrize("coef", ["2/4", "1/1", "-0", "0", "+1", "1.5", "01"])
def test_non_canonical_coefficients_rejected(coef):
    data = corpus_data("H3CE")
    data["product"][0]["result"][0]["coef"] = coef
    errs = errors_for(data)
    assert errs[0].where == "$.product[0].result[0].coef"


def test_degree_mismatch_rejected():
    data = corpus_data("H3CE")
    data["differential"][0]["result"][0]["basis"] = "abc"
    (err,) = errors_for(data)
    assert "degree mismatch" in err.message


def test_syntax_error_has_line_and_column():
    with pytest.raises(ParseError) as exc:
        parse('{\n  "name": "x",\n  "basis": [,]\n}')
    assert exc.value.errors[0].where.startswith("line 3")


def test_schema_rejects_unknown_fields():
    data = corpus_data("T2")
    data["colour"] = "blue"
    assert errors_for(data)[0].where == "$"


def test_empty_algebra():
    doc = parse(json.dumps({"name": "E", "scalars": "rational", "basis": []}))
    assert doc.presentation().dim == 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(sorted(CORPUS)), st.integers(0, 10**6))
def test_entry_order_does_not_matter(name, seed):
    rng = random.Random(seed)
    data = corpus_data(name)
    for key in ("product", "differential"):
        if key in data:
            rng.shuffle(data[key])
    text = json.dumps(data, indent=rng.choice([None, 1, 4]))
    assert parse(text).serialize() == corpus_text(name)


@given(st.fractions().filter(lambda x: x != 0))
def test_coefficient_round_trip(x):
    assert parse_coef(format_coef(x)) == x


def test_schema_is_shipped():
    assert schema()["title"] == "Algebra document"
