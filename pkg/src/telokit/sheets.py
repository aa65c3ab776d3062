"""The 9-column annotation spreadsheet: parsing, validation, serialization.

A sheet moves through three stages: INTERMEDIATE (no concept ids), PARTIAL
(every row carries a positive GID or a provisional negative id forming the
exact sequence -1, -2, ... in first-occurrence order) and FULL (all ids
positive). Serialization is byte-deterministic and round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

from .concepts import RelationKind
from .errors import BadHeader, BadRow, StageMismatch

HEADER = [
    "Cased Word Lemma",
    "Concept Description",
    "Concept UK ID",
    "PoS",
    "Parent Concept",
    "Word Sense Rank",
    "Relation",
    "User Reference",
    "Version",
]

POS_TAGS = ("n", "v", "a", "r")


class Stage(Enum):
    INTERMEDIATE = "INTERMEDIATE"
    PARTIAL = "PARTIAL"
    FULL = "FULL"


@dataclass
class AnnotationRow:
    cased_word_lemma: str
    gloss: str | None = None
    concept_id: int | None = None
    pos: str = "n"
    parent_lemma: str = ""
    parent_gid: int | None = None
    word_sense_rank: int | None = None
    relation: RelationKind | None = RelationKind.IS_A
    user_reference: str = ""
    version: str = ""

    @property
    def prefix(self) -> str:
        name, sep, _ = self.cased_word_lemma.partition(":")
        return name if sep else ""


@dataclass
class AnnotationSheet:
    rows: list[AnnotationRow] = field(default_factory=list)
    stage: Stage = Stage.INTERMEDIATE
    prefix: str = ""
    ukc_instance: str = ""

    def row_index_by_lemma(self) -> dict[str, int]:
        return {row.cased_word_lemma: i for i, row in enumerate(self.rows)}


def _parse_parent(cell: str) -> tuple[str, int | None]:
    """Split a "lemma gid" parent cell; the gid token is optional."""
    cell = cell.strip()
    if not cell:
        return "", None
    head, _, tail = cell.rpartition(" ")
    if head:
        try:
            return head, int(tail)
        except ValueError:
            pass
    return cell, None


def _format_parent(lemma: str, gid: int | None) -> str:
    if not lemma:
        return ""
    return f"{lemma} {gid}" if gid is not None else lemma


def _parse_int(cell: str, line: int, what: str) -> int | None:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return int(cell)
    except ValueError:
        raise BadRow(line, f"{what} is not an integer: {cell!r}") from None


def parse_rows(data: bytes | str) -> list[tuple[int, AnnotationRow]]:
    """Lenient structural parse: header + well-formed cells, no stage rules.

    Returns (line number, row) pairs; used both by the strict parser and by
    the quality gate, which must accept semantically defective sheets.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise BadHeader("empty file") from None
    if header != HEADER:
        raise BadHeader(f"expected header {','.join(HEADER)!r}")
    out: list[tuple[int, AnnotationRow]] = []
    for line, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != 9:
            raise BadRow(line, f"expected 9 columns, found {len(cells)}")
        lemma, gloss, concept_id, pos, parent, rank, relation, user_ref, version = cells
        parent_lemma, parent_gid = _parse_parent(parent)
        try:
            rel = RelationKind(relation.strip()) if relation.strip() else None
        except ValueError:
            raise BadRow(line, f"unknown relation {relation!r}") from None
        row = AnnotationRow(
            cased_word_lemma=lemma.strip(),
            gloss=gloss if gloss.strip() else None,
            concept_id=_parse_int(concept_id, line, "Concept UK ID"),
            pos=pos.strip(),
            parent_lemma=parent_lemma,
            parent_gid=parent_gid,
            word_sense_rank=_parse_int(rank, line, "Word Sense Rank"),
            relation=rel,
            user_reference=user_ref.strip(),
            version=version.strip(),
        )
        out.append((line, row))
    return out


def check_row_invariants(row: AnnotationRow, line: int) -> None:
    if not row.cased_word_lemma:
        raise BadRow(line, "Cased Word Lemma is empty")
    if row.pos not in POS_TAGS:
        raise BadRow(line, f"PoS must be one of {'/'.join(POS_TAGS)}, got {row.pos!r}")
    if row.relation is None:
        raise BadRow(line, "Relation is empty")
    if row.concept_id is not None:
        if row.concept_id == 0:
            raise BadRow(line, "Concept UK ID must not be zero")
        if row.concept_id < 0:
            if not row.gloss:
                raise BadRow(line, "provisional (negative) id requires a gloss")
            if row.word_sense_rank is not None:
                raise BadRow(line, "provisional (negative) id must not carry a word sense rank")
        else:
            if row.word_sense_rank is None:
                raise BadRow(line, "positive Concept UK ID requires a word sense rank")
    if row.word_sense_rank is not None and row.word_sense_rank < 1:
        raise BadRow(line, "Word Sense Rank must be >= 1")


def infer_stage(rows: list[AnnotationRow]) -> Stage:
    ids = [row.concept_id for row in rows]
    if all(i is None for i in ids):
        return Stage.INTERMEDIATE
    if all(i is not None and i > 0 for i in ids):
        return Stage.FULL
    return Stage.PARTIAL


def _check_stage(rows: list[tuple[int, AnnotationRow]], stage: Stage) -> None:
    if stage is Stage.INTERMEDIATE:
        for line, row in rows:
            if row.concept_id is not None:
                raise BadRow(line, "intermediate sheet must not carry concept ids")
        return
    negatives_seen = 0
    for line, row in rows:
        if row.concept_id is None:
            raise BadRow(line, f"{stage.value.lower()} sheet requires a concept id on every row")
        if row.concept_id < 0:
            if stage is Stage.FULL:
                raise BadRow(line, "full sheet must not carry provisional ids")
            negatives_seen += 1
            if row.concept_id != -negatives_seen:
                raise BadRow(
                    line,
                    f"provisional ids must run -1, -2, ... in row order; "
                    f"expected {-negatives_seen}, found {row.concept_id}",
                )


def parse_sheet(data: bytes | str, expected_stage: Stage | None = None,
                strict: bool = True) -> AnnotationSheet:
    """Parse a 9-column CSV sheet.

    With ``strict`` the per-row invariants and the (expected or inferred)
    stage invariants are enforced with row-numbered diagnostics; the quality
    gate parses with ``strict=False`` to inspect defective sheets.
    """
    numbered = parse_rows(data)
    rows = [row for _, row in numbered]
    if strict:
        seen: dict[str, int] = {}
        for line, row in numbered:
            check_row_invariants(row, line)
            if row.cased_word_lemma in seen:
                raise BadRow(
                    line,
                    f"duplicate lemma {row.cased_word_lemma!r} "
                    f"(first at row {seen[row.cased_word_lemma]})",
                )
            seen[row.cased_word_lemma] = line
        stage = infer_stage(rows)
        if expected_stage is not None and stage is not expected_stage:
            raise StageMismatch(
                f"sheet is {stage.value}, expected {expected_stage.value}"
            )
        _check_stage(numbered, stage)
    else:
        stage = expected_stage or infer_stage(rows)
    prefix = next((r.prefix for r in rows if r.prefix), "")
    return AnnotationSheet(rows=rows, stage=stage, prefix=prefix)


def serialize_sheet(sheet: AnnotationSheet) -> bytes:
    """Byte-exact CSV serialization; parse(serialize(s)) == s field-for-field."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in sheet.rows:
        writer.writerow([
            row.cased_word_lemma,
            row.gloss or "",
            "" if row.concept_id is None else str(row.concept_id),
            row.pos,
            _format_parent(row.parent_lemma, row.parent_gid),
            "" if row.word_sense_rank is None else str(row.word_sense_rank),
            row.relation.value if row.relation is not None else "",
            row.user_reference,
            row.version,
        ])
    return buf.getvalue().encode("utf-8")


# --- decisions files --------------------------------------------------------

DECISIONS_HEADER = ["row_index", "kind", "gid_or_gloss", "rank"]


@dataclass(frozen=True)
class Decision:
    row_index: int
    kind: str  # "S1" | "S2"
    gid: int | None = None
    rank: int | None = None
    gloss: str | None = None


def parse_decisions(data: bytes | str) -> list[Decision]:
    """Batch decisions file: row_index,kind,gid_or_gloss,rank."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise BadHeader("empty decisions file") from None
    if header != DECISIONS_HEADER:
        raise BadHeader(f"expected header {','.join(DECISIONS_HEADER)!r}")
    decisions = []
    for line, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != 4:
            raise BadRow(line, f"expected 4 columns, found {len(cells)}")
        idx, kind, payload, rank = cells
        kind = kind.strip().upper()
        if kind == "S1":
            decisions.append(Decision(
                row_index=int(idx), kind="S1", gid=int(payload), rank=int(rank),
            ))
        elif kind == "S2":
            decisions.append(Decision(row_index=int(idx), kind="S2", gloss=payload))
        else:
            raise BadRow(line, f"decision kind must be S1 or S2, got {kind!r}")
    return decisions


def serialize_decisions(decisions: list[Decision]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DECISIONS_HEADER)
    for d in decisions:
        if d.kind == "S1":
            writer.writerow([d.row_index, "S1", d.gid, d.rank])
        else:
            writer.writerow([d.row_index, "S2", d.gloss or "", ""])
    return buf.getvalue().encode("utf-8")
