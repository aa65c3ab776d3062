"""Machine-checkable resource quality rules with stable rule ids.

Severity follows the checklists' modal verbs: "should" items are ERRORs,
"should not, preferably" / "can be" items are WARNINGs. Every validator is
a pure function of its input; reports are deterministic and ordered by
(rule id, locator). The rule-id coverage table lives in the README.
"""

from __future__ import annotations

from collections import defaultdict
from enum import Enum

from .catalog import metadata_missing
from .errors import BadHeader, BadRow
from .report import Severity, ValidationReport
from .sheets import AnnotationSheet, parse_sheet
from .teleontology import (
    DATA_PROPERTIES,
    ETYPES,
    OBJECT_PROPERTIES,
    KnowledgeTeleontology,
    Teleontology,
)


class RuleSet(Enum):
    NAMESPACE = "namespace"
    LANGUAGE_TELEONTOLOGY = "language-teleontology"
    KNOWLEDGE_TELEONTOLOGY = "knowledge-teleontology"
    EXTERNAL_SCHEMA = "external-schema"


SHEET_EXTRAS = ("validator", "timestamp", "notes")


def _meaningful(definition: str | None, label: str) -> bool:
    """Non-empty, at least three tokens, and not just the label itself."""
    if not definition or not definition.strip():
        return False
    if len(definition.split()) < 3:
        return False
    return definition.strip().casefold() != label.strip().casefold()


def _metadata_rule(report: ValidationReport, rule_id: str, metadata: dict | None) -> None:
    if metadata is None:
        report.add(rule_id, Severity.ERROR, "resource",
                   "no catalog metadata associated with the resource")
        return
    missing = metadata_missing(metadata)
    if missing:
        report.add(rule_id, Severity.ERROR, "resource",
                   "catalog metadata incomplete, missing: " + ", ".join(missing))


# --- UKC namespace sheets -----------------------------------------------------

def validate_namespace_sheet(sheet: AnnotationSheet, extras: dict | None = None,
                             metadata: dict | None = None) -> ValidationReport:
    report = ValidationReport("namespace")
    for i, row in enumerate(sheet.rows):
        loc = f"row {i + 2}"
        if not row.cased_word_lemma:
            report.add("NS002", Severity.ERROR, loc, "missing Cased Word Lemma")
        if not row.gloss or not row.gloss.strip():
            report.add("NS003", Severity.ERROR, loc, "missing natural language definition")
        if row.concept_id is None or row.concept_id < 1:
            report.add("NS004", Severity.ERROR, loc, "missing UKC GID assignment")
        if not row.pos:
            report.add("NS005", Severity.ERROR, loc, "missing PoS assignment")
        if not row.parent_lemma or row.parent_gid is None:
            report.add("NS006", Severity.ERROR, loc,
                       "missing parent assignment (concept + UKC GID)")
        if row.word_sense_rank is None:
            report.add("NS007", Severity.ERROR, loc, "missing word sense rank")
        if row.relation is None:
            report.add("NS008", Severity.ERROR, loc, "missing relation to parent")
        if not row.user_reference:
            report.add("NS009", Severity.ERROR, loc, "missing user reference")
    extras = extras or {}
    for key, rule in zip(SHEET_EXTRAS, ("NS010", "NS011", "NS012")):
        if not extras.get(key):
            report.add(rule, Severity.WARNING, "sheet", f"no {key} recorded")
    _metadata_rule(report, "NS013", metadata)
    return report.finish()


def validate_namespace_file(data: bytes, extras: dict | None = None,
                            metadata: dict | None = None) -> ValidationReport:
    """File-level entry point; a non-parsing file fails the format rule."""
    import csv

    try:
        sheet = parse_sheet(data, strict=False)
    except (BadHeader, BadRow, UnicodeDecodeError, csv.Error) as e:
        report = ValidationReport("namespace")
        report.add("NS001", Severity.ERROR, "file",
                   f"not a 9-column annotation spreadsheet: {e}")
        return report.finish()
    return validate_namespace_sheet(sheet, extras=extras, metadata=metadata)


# --- teleontologies -------------------------------------------------------------

_SECTION_TITLES = {
    ETYPES: "entity type",
    OBJECT_PROPERTIES: "object property",
    DATA_PROPERTIES: "data property",
}


def _definition_of(t: Teleontology, label: str) -> str | None:
    for key, text in t.annotations.get(label, ()):
        if key == "comment":
            return text
    return None


def _structural_rules(report: ValidationReport, t: Teleontology, prefix: str) -> None:
    """Rules shared by language and knowledge teleontologies (x01..x09)."""
    hierarchies = t.hierarchies()
    if all(not h.nodes for h in hierarchies.values()):
        report.add(f"{prefix}001", Severity.ERROR, "teleontology",
                   "no name hierarchy present")
    gid_lemmas: dict[str, set[int]] = defaultdict(set)
    for section, h in hierarchies.items():
        title = _SECTION_TITLES[section]
        cycle = h.find_cycle()
        if cycle:
            report.add(f"{prefix}004", Severity.ERROR, f"{section}",
                       f"cycle in the {title} hierarchy: " + " -> ".join(cycle))
        gid_labels: dict[int, list[str]] = defaultdict(list)
        counts = h.children_count()
        for label in sorted(h.nodes):
            name = h.nodes[label]
            if not _meaningful(_definition_of(t, label), label):
                report.add(f"{prefix}002", Severity.ERROR, f"{section}:{label}",
                           "missing or not meaningful natural language definition")
            if name.gid is None:
                report.add(f"{prefix}009", Severity.ERROR, f"{section}:{label}",
                           "entry is not annotated with a UKC GID")
            else:
                gid_labels[name.gid].append(label)
                gid_lemmas[name.lemma.casefold()].add(name.gid)
            if counts[label] == 1:
                report.add(f"{prefix}007", Severity.WARNING, f"{section}:{label}",
                           "entry has only a single child")
            if len(h.nodes) >= 2 and counts[label] == 0 and not any(
                p in h.nodes for p in h.parents.get(label, ())
            ):
                report.add(f"{prefix}008", Severity.ERROR, f"{section}:{label}",
                           "isolated entry (no parent and no children)")
        for gid in sorted(gid_labels):
            labels = gid_labels[gid]
            if len(labels) > 1:
                report.add(f"{prefix}006", Severity.ERROR, f"{section}:GID-{gid}",
                           f"multiple {title} entries share GID {gid}: " + ", ".join(sorted(labels)))
    for lemma in sorted(gid_lemmas):
        gids = gid_lemmas[lemma]
        if len(gids) > 1:
            report.add(f"{prefix}005", Severity.ERROR, f"lemma:{lemma}",
                       f"polysemous terminology: {lemma!r} maps to GIDs "
                       + ", ".join(map(str, sorted(gids))))


def validate_language_teleontology(t: Teleontology,
                                   metadata: dict | None = None) -> ValidationReport:
    report = ValidationReport("language-teleontology")
    _structural_rules(report, t, "LT")
    for axiom in getattr(t, "axioms", ()):
        report.add("LT003", Severity.ERROR, axiom.subject,
                   f"axiom or constraint assertion present ({axiom.kind.value})")
    _metadata_rule(report, "LT010", metadata)
    return report.finish()


def _property_definition_rules(report: ValidationReport, kt: KnowledgeTeleontology,
                               prefix: str) -> None:
    for section in (OBJECT_PROPERTIES, DATA_PROPERTIES):
        h = kt.hierarchies()[section]
        for label in sorted(h.nodes):
            axioms = kt.axioms_for(label)
            has_domain = any(a.kind.value == "DOMAIN" for a in axioms)
            has_range = any(a.kind.value in ("RANGE_OBJECT", "RANGE_DATA") for a in axioms)
            if not (has_domain and has_range):
                missing = [w for w, ok in (("domain", has_domain), ("range", has_range)) if not ok]
                report.add(f"{prefix}003", Severity.ERROR, f"{section}:{label}",
                           f"{_SECTION_TITLES[section]} lacks " + " and ".join(missing))


def validate_knowledge_teleontology(kt: Teleontology,
                                    metadata: dict | None = None) -> ValidationReport:
    report = ValidationReport("knowledge-teleontology")
    _structural_rules(report, kt, "KT")
    if isinstance(kt, KnowledgeTeleontology):
        _property_definition_rules(report, kt, "KT")
    else:
        for section in (OBJECT_PROPERTIES, DATA_PROPERTIES):
            for label in sorted(kt.hierarchies()[section].nodes):
                report.add("KT003", Severity.ERROR, f"{section}:{label}",
                           f"{_SECTION_TITLES[section]} lacks domain and range")
    _metadata_rule(report, "KT010", metadata)
    return report.finish()


# --- external schemas -----------------------------------------------------------

def validate_external_schema(t: Teleontology,
                             metadata: dict | None = None) -> ValidationReport:
    """Checklist for schemas outside the store: no GID requirements apply."""
    report = ValidationReport("external-schema")
    hierarchies = t.hierarchies()
    lemma_sections: dict[str, set[str]] = defaultdict(set)
    for section, h in hierarchies.items():
        title = _SECTION_TITLES[section]
        seen: dict[str, list[str]] = defaultdict(list)
        counts = h.children_count()
        for label in sorted(h.nodes):
            name = h.nodes[label]
            if not _meaningful(_definition_of(t, label), label):
                report.add("XS001", Severity.ERROR, f"{section}:{label}",
                           "missing or not meaningful natural language definition")
            if len(h.nodes) >= 2 and counts[label] == 0 and not any(
                p in h.nodes for p in h.parents.get(label, ())
            ):
                report.add("XS005", Severity.ERROR, f"{section}:{label}",
                           "isolated entry (no parent and no children)")
            seen[label.casefold()].append(label)
            lemma_sections[name.lemma.casefold()].add(section)
        for folded in sorted(seen):
            labels = seen[folded]
            if len(labels) > 1:
                report.add("XS004", Severity.ERROR, f"{section}:{folded}",
                           f"duplicate {title} entries: " + ", ".join(sorted(labels)))
    if isinstance(t, KnowledgeTeleontology):
        for section in (OBJECT_PROPERTIES, DATA_PROPERTIES):
            h = hierarchies[section]
            for label in sorted(h.nodes):
                axioms = t.axioms_for(label)
                has_domain = any(a.kind.value == "DOMAIN" for a in axioms)
                has_range = any(a.kind.value in ("RANGE_OBJECT", "RANGE_DATA") for a in axioms)
                if not (has_domain and has_range):
                    missing = [w for w, ok in (("domain", has_domain), ("range", has_range)) if not ok]
                    report.add("XS002", Severity.ERROR, f"{section}:{label}",
                               f"{_SECTION_TITLES[section]} lacks " + " and ".join(missing))
    else:
        for section in (OBJECT_PROPERTIES, DATA_PROPERTIES):
            for label in sorted(hierarchies[section].nodes):
                report.add("XS002", Severity.ERROR, f"{section}:{label}",
                           f"{_SECTION_TITLES[section]} lacks domain and range")
    for lemma in sorted(lemma_sections):
        sections = lemma_sections[lemma]
        if len(sections) > 1:
            report.add("XS003", Severity.ERROR, f"lemma:{lemma}",
                       f"polysemous terminology: {lemma!r} declared as "
                       + " and ".join(_SECTION_TITLES[s] for s in sorted(sections)))
    _metadata_rule(report, "XS006", metadata)
    return report.finish()
