"""Human-in-the-loop annotation workflow over intermediate sheets.

Rows are decided strictly top-down, one at a time: S1 records an existing
GID plus the annotator's word sense rank, S2 records the next provisional
negative id (-1, -2, ...) together with a mandatory gloss. Enrichment then
mints real GIDs for all provisionals, wires the term hierarchy into the
concept store and upserts domain-language synsets, atomically.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

from .concepts import ConceptCore
from .errors import (
    BadSheet,
    EmptyGloss,
    OutOfOrder,
    StageMismatch,
    TransactionAborted,
    UndecidedRows,
    UnknownGid,
    UnresolvedParent,
)
from .lexicon import LanguageId, Lexicon, LookupHit
from .sheets import (
    AnnotationRow,
    AnnotationSheet,
    Decision,
    Stage,
    serialize_sheet,
)


@dataclass
class Session:
    session_id: str
    sheet: AnnotationSheet
    annotator: str
    cursor: int = 0
    decisions: dict[int, Decision] = field(default_factory=dict)
    _negatives_issued: int = 0

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.sheet.rows)

    def current_row(self) -> AnnotationRow:
        if self.done:
            raise OutOfOrder("all rows are already decided")
        return self.sheet.rows[self.cursor]


def open_session(sheet: AnnotationSheet, annotator: str) -> Session:
    if sheet.stage is not Stage.INTERMEDIATE:
        raise BadSheet(f"annotation sessions start from INTERMEDIATE sheets, got {sheet.stage.value}")
    if not sheet.rows:
        raise BadSheet("sheet has no rows")
    return Session(session_id=secrets.token_urlsafe(16), sheet=sheet, annotator=annotator)


def search_candidates(session: Session, lexicon: Lexicon, language: LanguageId,
                      lemma: str, fuzzy: bool = True) -> list[LookupHit]:
    row = session.current_row()
    if lemma != row.cased_word_lemma:
        raise OutOfOrder(
            f"cursor is at row {session.cursor} ({row.cased_word_lemma!r}), not {lemma!r}"
        )
    return lexicon.lookup(language, lemma, fuzzy=fuzzy)


def record_decision(session: Session, decision: Decision, core: ConceptCore) -> AnnotationRow:
    row = session.current_row()
    if decision.row_index != session.cursor:
        raise OutOfOrder(
            f"decision targets row {decision.row_index}, cursor is at {session.cursor}"
        )
    if decision.kind == "S1":
        if decision.gid is None or decision.gid not in core:
            raise UnknownGid(decision.gid if decision.gid is not None else -1)
        if decision.rank is None or decision.rank < 1:
            raise OutOfOrder("S1 decision requires a word sense rank >= 1")
        row.concept_id = decision.gid
        row.word_sense_rank = decision.rank
        if decision.gloss:
            row.gloss = decision.gloss
    elif decision.kind == "S2":
        if not decision.gloss or not decision.gloss.strip():
            raise EmptyGloss("S2 decision requires a gloss")
        session._negatives_issued += 1
        row.concept_id = -session._negatives_issued
        row.gloss = decision.gloss
        row.word_sense_rank = None
    else:
        raise ValueError(f"unknown decision kind {decision.kind!r}")
    session.decisions[session.cursor] = decision
    # The decided row may be the parent of later rows; record its id there.
    for later in session.sheet.rows[session.cursor + 1:]:
        if later.parent_gid is None and later.parent_lemma == row.cased_word_lemma:
            later.parent_gid = row.concept_id
    session.cursor += 1
    if session.done:
        session.sheet.stage = Stage.PARTIAL
    return row


def replay_decisions(session: Session, decisions: list[Decision], core: ConceptCore) -> AnnotationSheet:
    """Batch mode: apply a decisions file in row order without a UI."""
    for decision in decisions:
        record_decision(session, decision, core)
    if not session.done:
        raise UndecidedRows(f"{len(session.sheet.rows) - session.cursor} rows undecided")
    return session.sheet


def _resolve_parent(row: AnnotationRow, index: int, sheet: AnnotationSheet,
                    minted: dict[int, int], core: ConceptCore) -> int:
    line = index + 2  # 1-based plus header row, matching parse diagnostics
    gid = row.parent_gid
    if gid is not None:
        if gid < 0:
            if gid not in minted:
                raise UnresolvedParent(line, f"{row.parent_lemma} {gid}")
            return minted[gid]
        if gid not in core:
            raise UnresolvedParent(line, f"{row.parent_lemma} {gid}")
        return gid
    if row.parent_lemma:
        for other in sheet.rows:
            if other.cased_word_lemma == row.parent_lemma and other.concept_id is not None:
                other_gid = other.concept_id
                if other_gid < 0:
                    if other_gid not in minted:
                        raise UnresolvedParent(line, row.parent_lemma)
                    return minted[other_gid]
                return other_gid
    raise UnresolvedParent(line, row.parent_lemma or "<missing>")


def enrich(sheet: AnnotationSheet, core: ConceptCore, lexicon: Lexicon,
           base_language: LanguageId | None = None) -> tuple[AnnotationSheet, dict[int, int]]:
    """Import a PARTIAL sheet: mint GIDs for provisionals, upsert synsets, go FULL.

    Runs as one transaction over both stores: on any failure neither the
    stores nor the sheet are mutated. Concepts matched by S1 never change
    the concept store; only freshly minted concepts add (exactly one)
    parent edge each.
    """
    if sheet.stage is not Stage.PARTIAL:
        raise StageMismatch(f"enrich requires a PARTIAL sheet, got {sheet.stage.value}")
    core_snap = core.snapshot()
    lex_snap = lexicon.snapshot()
    try:
        minted, updates = _enrich_stores(sheet, core, lexicon, base_language)
    except Exception:
        core.restore(core_snap)
        lexicon.restore(lex_snap)
        raise
    for index, concept_id, parent_gid, rank in updates:
        row = sheet.rows[index]
        row.concept_id = concept_id
        row.parent_gid = parent_gid
        if rank is not None:
            row.word_sense_rank = rank
    sheet.stage = Stage.FULL
    return sheet, minted


def _enrich_stores(sheet: AnnotationSheet, core: ConceptCore, lexicon: Lexicon,
                   base_language: LanguageId | None):
    base = base_language or LanguageId.natural("eng")
    language = (
        LanguageId.domain(base.iso3, sheet.prefix) if sheet.prefix else base
    )
    lexicon.add_language(language)
    provenance = sheet.ukc_instance or "annotation-pipeline"

    for index, row in enumerate(sheet.rows):
        if row.concept_id is None:
            raise TransactionAborted(f"row {index + 2} is undecided")

    # Mint in ascending |negative| order so same-sheet parents exist first.
    minted: dict[int, int] = {}
    negatives = sorted(
        ((row.concept_id, i) for i, row in enumerate(sheet.rows) if row.concept_id < 0),
        key=lambda t: -t[0],
    )
    for neg, index in negatives:
        row = sheet.rows[index]
        parent = _resolve_parent(row, index, sheet, minted, core)
        minted[neg] = core.mint_concept(parent, row.relation, provenance)

    updates: list[tuple[int, int, int, int | None]] = []
    for index, row in enumerate(sheet.rows):
        was_provisional = row.concept_id < 0
        concept_id = minted[row.concept_id] if was_provisional else row.concept_id
        if concept_id not in core:
            raise UnknownGid(concept_id)
        parent_gid = _resolve_parent(row, index, sheet, minted, core)
        existing = lexicon.entry_for(language, concept_id)
        words = list(existing.words) if hasattr(existing, "words") else []
        if not any(w.casefold() == row.cased_word_lemma.casefold() for w in words):
            words.append(row.cased_word_lemma)
        gloss = row.gloss or (existing.gloss if existing else "")
        synset = lexicon.upsert_synset(language, concept_id, words, gloss=gloss, examples=[])
        rank = synset.sense_rank(row.cased_word_lemma) if was_provisional else None
        updates.append((index, concept_id, parent_gid, rank))
    return minted, updates


def export_namespace(sheet: AnnotationSheet) -> bytes:
    """Serialize a FULL sheet; parse(export(s)) reproduces s field-for-field."""
    if sheet.stage is not Stage.FULL:
        raise StageMismatch(f"export requires a FULL sheet, got {sheet.stage.value}")
    return serialize_sheet(sheet)
