from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telokit.concepts import RelationKind
from telokit.errors import BadHeader, BadRow, StageMismatch
from telokit.sheets import (
    HEADER,
    AnnotationRow,
    AnnotationSheet,
    Stage,
    parse_decisions,
    parse_sheet,
    serialize_decisions,
    serialize_sheet,
)

from conftest import FIXTURES

HEADER_LINE = ",".join(HEADER)


def row_csv(*cells) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    _csv.writer(buf, lineterminator="\n").writerow(cells)
    return buf.getvalue()


def test_parse_datascientia_full_fixture():
    sheet = parse_sheet((FIXTURES / "datascientia_full.csv").read_bytes(), Stage.FULL)
    assert sheet.stage is Stage.FULL
    assert sheet.prefix == "ds"
    course = next(r for r in sheet.rows if r.cased_word_lemma == "ds:Course")
    assert course.concept_id == 302873
    assert course.gloss.startswith("This concept represents a course")
    assert course.pos == "n"
    assert (course.parent_lemma, course.parent_gid) == ("owl:Thing", 1)
    assert course.word_sense_rank == 1
    assert course.relation is RelationKind.IS_A
    assert course.version == "USER: [DS-1-13012024]"


def test_parse_jidep_row_verbatim():
    data = (FIXTURES / "jidep_full.csv").read_bytes()
    sheet = parse_sheet(data, Stage.FULL)
    benefit = sheet.rows[0]
    assert benefit.cased_word_lemma == "cmo:Benefit"
    assert benefit.concept_id == 200001
    assert benefit.version == "USER: [CMO-1-12012024]"
    assert serialize_sheet(sheet) == data


def test_empty_file_is_bad_header():
    with pytest.raises(BadHeader):
        parse_sheet(b"")


def test_wrong_header_is_bad_header():
    with pytest.raises(BadHeader):
        parse_sheet(b"a,b,c\n1,2,3\n")


def test_wrong_column_count_is_bad_row():
    data = HEADER_LINE + "\n" + "only,three,cells\n"
    with pytest.raises(BadRow) as exc:
        parse_sheet(data.encode())
    assert exc.value.line == 2


def test_partial_with_broken_negative_sequence_is_rejected():
    data = (
        HEADER_LINE + "\n"
        + row_csv("a:X", "gloss of x here", -1, "n", "owl:Thing 1", "", "IS_A", "u", "v1")
        + row_csv("a:Y", "gloss of y here", -3, "n", "a:X -1", "", "IS_A", "u", "v1")
    )
    with pytest.raises(BadRow) as exc:
        parse_sheet(data.encode(), Stage.PARTIAL)
    assert exc.value.line == 3
    assert "-2" in exc.value.reason


def test_negative_requires_gloss_and_no_rank():
    base = HEADER_LINE + "\n"
    with pytest.raises(BadRow):
        parse_sheet((base + row_csv("a:X", "", -1, "n", "owl:Thing 1", "", "IS_A", "u", "v")).encode())
    with pytest.raises(BadRow):
        parse_sheet((base + row_csv("a:X", "g", -1, "n", "owl:Thing 1", 2, "IS_A", "u", "v")).encode())


def test_positive_requires_rank():
    data = HEADER_LINE + "\n" + row_csv("a:X", "g", 5, "n", "owl:Thing 1", "", "IS_A", "u", "v")
    with pytest.raises(BadRow):
        parse_sheet(data.encode())


def test_stage_mismatch():
    with pytest.raises(StageMismatch):
        parse_sheet((FIXTURES / "datascientia_full.csv").read_bytes(), Stage.INTERMEDIATE)


def test_duplicate_lemma_rejected():
    data = (
        HEADER_LINE + "\n"
        + row_csv("a:X", "", "", "n", "owl:Thing 1", "", "IS_A", "u", "v")
        + row_csv("a:X", "", "", "n", "owl:Thing 1", "", "IS_A", "u", "v")
    )
    with pytest.raises(BadRow) as exc:
        parse_sheet(data.encode())
    assert "duplicate lemma" in exc.value.reason


def test_lenient_parse_tolerates_defects():
    data = HEADER_LINE + "\n" + row_csv("a:X", "", "", "", "", "", "", "", "")
    sheet = parse_sheet(data.encode(), strict=False)
    assert len(sheet.rows) == 1
    assert sheet.rows[0].relation is None


def test_intermediate_keeps_row_order_and_blank_optionals():
    sheet = parse_sheet((FIXTURES / "schema_org_intermediate.csv").read_bytes(),
                        Stage.INTERMEDIATE)
    assert [r.cased_word_lemma for r in sheet.rows] == ["schema:Trip", "schema:BusTrip"]
    assert all(r.concept_id is None for r in sheet.rows)
    assert sheet.rows[1].parent_lemma == "schema:Trip"
    assert sheet.rows[1].parent_gid is None


_lemma = st.from_regex(r"[a-z]{1,4}:[A-Za-z][A-Za-z0-9]{0,8}", fullmatch=True)
# Includes CSV-hostile characters: comma, quote, pipe, embedded newline, unicode.
_text = (
    st.text("abcd ,\"'|éα\n", min_size=1, max_size=30)
    .map(str.strip)
    .filter(bool)
)


@st.composite
def full_sheets(draw):
    n = draw(st.integers(1, 6))
    rows = []
    lemmas = draw(st.lists(_lemma, min_size=n, max_size=n, unique=True))
    for i in range(n):
        rows.append(AnnotationRow(
            cased_word_lemma=lemmas[i],
            gloss=draw(_text),
            concept_id=draw(st.integers(2, 10**6)),
            pos=draw(st.sampled_from("nvar")),
            parent_lemma="owl:Thing",
            parent_gid=1,
            word_sense_rank=draw(st.integers(1, 9)),
            relation=draw(st.sampled_from([RelationKind.IS_A, RelationKind.PART_OF])),
            user_reference=draw(_text),
            version=draw(_text),
        ))
    return AnnotationSheet(rows=rows, stage=Stage.FULL,
                           prefix=lemmas[0].split(":")[0])


@settings(max_examples=80, deadline=None)
@given(full_sheets())
def test_serialize_parse_round_trip_property(sheet):
    data = serialize_sheet(sheet)
    again = parse_sheet(data, Stage.FULL)
    assert again == sheet
    assert serialize_sheet(again) == data


def test_decisions_file_round_trip():
    data = (FIXTURES / "schema_org_decisions.csv").read_bytes()
    decisions = parse_decisions(data)
    assert [d.kind for d in decisions] == ["S2", "S2"]
    assert decisions[0].gloss == "A journey from one location to another location."
    assert serialize_decisions(decisions) == data


def test_decisions_s1_fields():
    text = "row_index,kind,gid_or_gloss,rank\n0,S1,78965,1\n"
    (d,) = parse_decisions(text)
    assert (d.kind, d.gid, d.rank) == ("S1", 78965, 1)


def test_decisions_bad_kind():
    with pytest.raises(BadRow):
        parse_decisions("row_index,kind,gid_or_gloss,rank\n0,S9,x,\n")
