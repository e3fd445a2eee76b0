from __future__ import annotations

import json

import pytest
from conftest import FIXTURES
from hypothesis import given
from hypothesis import strategies as st

from koszulkit.cdg import CdgRingSlice
from koszulkit.corpus import corpus, random_presentation
from koszulkit.io import (
    DocumentError,
    dumps,
    export_corpus,
    from_document,
    load,
    loads,
    to_document,
)
from koszulkit.linalg import Field
from koszulkit.nonhomog import NonhomogPresentation, same_data
from koszulkit.quadratic import QuadraticPresentation

F5 = Field.parse("fp:5")
ENTRIES = corpus()


def _meta(e):
    return {"expected": e.expected, "oracles": e.oracles, "failing": e.failing}


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_fixture_files_are_current(entry):
    path = FIXTURES / f"{entry.name}.kz"
    assert path.read_text() == dumps(entry.presentation, _meta(entry))


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_round_trip_preserves_presentation(entry):
    obj = load(FIXTURES / f"{entry.name}.kz")
    assert dumps(obj, _meta(entry)) == dumps(entry.presentation, _meta(entry))
    if isinstance(obj, NonhomogPresentation):
        assert same_data(obj, entry.presentation)
    else:
        assert obj.same_as(entry.presentation)


def test_export_corpus_writes_every_entry(tmp_path):
    written = export_corpus(tmp_path)
    assert len(written) == len(ENTRIES)
    for e in ENTRIES:
        assert (tmp_path / f"{e.name}.kz").read_text() == (FIXTURES / f"{e.name}.kz").read_text()


def test_cdg_slice_round_trip(cdg_of):
    C = cdg_of("weyl1", 3)
    back = loads(dumps(C))
    assert isinstance(back, CdgRingSlice)
    assert back.same_as(C)
    assert dumps(back) == dumps(C)


@given(st.integers(0, 10 ** 6))
def test_random_presentations_round_trip(seed):
    import random
    Q = random_presentation(F5, random.Random(seed))
    back = loads(dumps(Q))
    assert isinstance(back, QuadraticPresentation) and back.same_as(Q)


def test_field_override():
    Q = load(FIXTURES / "sym_q2.kz", F5)
    assert Q.field == F5


def _doc(name="lie2"):
    return json.loads((FIXTURES / f"{name}.kz").read_text())


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.update(format_version=2), "format_version"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["presentation"].update(colour="red"), "presentation.colour"),
    (lambda d: d.update(kind="cubic"), "kind"),
    (lambda d: d["field"].update(kind="r"), "field.kind"),
    (lambda d: d["presentation"].update(generators="W"), "presentation.generators"),
    (lambda d: d["presentation"].update(side="up"), "presentation.side"),
    (lambda d: d["presentation"]["q"].pop(), "presentation.q"),
    (lambda d: d.pop("presentation"), ""),
])
def test_schema_errors_are_located(mutate, where):
    doc = _doc()
    mutate(doc)
    with pytest.raises(DocumentError) as info:
        from_document(doc)
    assert info.value.where == where


def test_unknown_field_message():
    doc = _doc()
    doc["surprise"] = True
    with pytest.raises(DocumentError, match="unknown field for format version 1"):
        from_document(doc)


def test_bad_scalar():
    doc = _doc()
    doc["presentation"]["relations"] = [[0, "1/0", -1, 0]]
    with pytest.raises(DocumentError):
        from_document(doc)


def test_json_syntax_error_reports_position():
    with pytest.raises(DocumentError, match="line 2, column"):
        loads('{\n  "format_version": 1,,\n}')


def test_inconsistent_document_is_rejected():
    doc = _doc()
    # e_0 acting by zero on the left breaks the unit law
    doc["bimodules"]["V"]["left"] = [[[0, 0], [0, 0]]]
    with pytest.raises(DocumentError):
        from_document(doc)


def test_to_document_kinds(cdg_of):
    assert to_document(ENTRIES[0].presentation)["kind"] == "quadratic"
    assert to_document(cdg_of("lie2", 3))["kind"] == "cdg_slice"
