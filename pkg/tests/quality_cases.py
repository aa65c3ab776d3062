"""Defect-injection case table for the quality gate.

For every checklist rule of every resource kind there is one injector that
builds an input violating exactly that rule; validating it must yield
exactly one finding, carrying the rule's mandated severity.
"""

from __future__ import annotations

from telokit.report import Severity, ValidationReport
from telokit.sheets import Stage, parse_sheet
from telokit.teleontology import (
    Axiom,
    AxiomKind,
    KnowledgeTeleontology,
    LanguageTeleontology,
    QualifiedName,
)
from telokit.quality import (
    validate_external_schema,
    validate_knowledge_teleontology,
    validate_language_teleontology,
    validate_namespace_file,
    validate_namespace_sheet,
)

from conftest import FIXTURES, make_metadata

FULL_EXTRAS = {
    "validator": "reviewer@example.org",
    "timestamp": "2024-02-01T00:00:00Z",
    "notes": "checked against the source vocabulary",
}


def clean_sheet():
    return parse_sheet((FIXTURES / "datascientia_full.csv").read_bytes(), Stage.FULL)


def _comment(label: str) -> tuple[tuple[str, str], ...]:
    local = label.split(":")[-1].split("_GID-")[0]
    return (("comment", f"This concept represents the notion of {local}."),)


def _add(hierarchy, annotations, label: str, gid: int | None,
         parents: tuple[str, ...] = (), comment: bool = True) -> str:
    name = QualifiedName.parse(label)
    if gid is not None:
        name = QualifiedName(name.prefix, name.local, gid)
    hierarchy.add(name, parents)
    if comment:
        annotations[name.label] = _comment(name.label)
    return name.label


def clean_lt() -> LanguageTeleontology:
    """Passes every language-teleontology rule with zero findings."""
    lt = LanguageTeleontology()
    a = lt.annotations
    place = _add(lt.etype_names, a, "osm:place", 300871)
    building = _add(lt.etype_names, a, "osm:building", 300872, (place,))
    _add(lt.etype_names, a, "osm:road", 300873, (place,))
    _add(lt.etype_names, a, "osm:allotment", 300874, (building,))
    _add(lt.etype_names, a, "osm:garden", 300880, (building,))
    spatial = _add(lt.object_property_names, a, "osm:spatialPartOf", 301678)
    _add(lt.object_property_names, a, "osm:adjacentTo", 301679, (spatial,))
    _add(lt.object_property_names, a, "osm:connectsTo", 301680, (spatial,))
    name = _add(lt.data_property_names, a, "osm:name", 301670)
    _add(lt.data_property_names, a, "osm:fclass", 301664, (name,))
    _add(lt.data_property_names, a, "osm:height", 301665, (name,))
    return lt


def _as_kt(lt: LanguageTeleontology, axioms: list[Axiom]) -> KnowledgeTeleontology:
    kt = KnowledgeTeleontology()
    kt.etypes.nodes.update(lt.etype_names.nodes)
    kt.etypes.parents.update(lt.etype_names.parents)
    kt.object_properties.nodes.update(lt.object_property_names.nodes)
    kt.object_properties.parents.update(lt.object_property_names.parents)
    kt.data_properties.nodes.update(lt.data_property_names.nodes)
    kt.data_properties.parents.update(lt.data_property_names.parents)
    kt.annotations = dict(lt.annotations)
    kt.axioms = tuple(axioms)
    return kt


def _property_axioms(kt_like) -> list[Axiom]:
    axioms = []
    for label in kt_like.object_property_names.nodes:
        axioms.append(Axiom(label, AxiomKind.DOMAIN, ("osm:place_GID-300871",)))
        axioms.append(Axiom(label, AxiomKind.RANGE_OBJECT, ("osm:place_GID-300871",)))
    for label in kt_like.data_property_names.nodes:
        axioms.append(Axiom(label, AxiomKind.DOMAIN, ("osm:place_GID-300871",)))
        axioms.append(Axiom(label, AxiomKind.RANGE_DATA, ("xsd:string",)))
    return axioms


def clean_kt() -> KnowledgeTeleontology:
    lt = clean_lt()
    return _as_kt(lt, _property_axioms(lt))


def clean_xs() -> KnowledgeTeleontology:
    """External schema: same shape, no GIDs anywhere."""
    lt = LanguageTeleontology()
    a = lt.annotations
    place = _add(lt.etype_names, a, "vso:Place", None)
    building = _add(lt.etype_names, a, "vso:Building", None, (place,))
    _add(lt.etype_names, a, "vso:Road", None, (place,))
    _add(lt.etype_names, a, "vso:Allotment", None, (building,))
    spatial = _add(lt.object_property_names, a, "vso:spatialPartOf", None)
    _add(lt.object_property_names, a, "vso:adjacentTo", None, (spatial,))
    name = _add(lt.data_property_names, a, "vso:name", None)
    _add(lt.data_property_names, a, "vso:height", None, (name,))
    axioms = []
    for label in lt.object_property_names.nodes:
        axioms.append(Axiom(label, AxiomKind.DOMAIN, ("vso:Place",)))
        axioms.append(Axiom(label, AxiomKind.RANGE_OBJECT, ("vso:Place",)))
    for label in lt.data_property_names.nodes:
        axioms.append(Axiom(label, AxiomKind.DOMAIN, ("vso:Place",)))
        axioms.append(Axiom(label, AxiomKind.RANGE_DATA, ("xsd:string",)))
    return _as_kt(lt, axioms)


def _cycle_hierarchy(t) -> None:
    """Two-node cycle whose members both have two children (no 1-child noise)."""
    h = t.hierarchies()["etypes"]
    a = t.annotations
    ring_a = _add(h, a, "osm:ringA", 400001)
    ring_b = _add(h, a, "osm:ringB", 400002, (ring_a,))
    h.parents[ring_a] = (ring_b,)
    _add(h, a, "osm:leafA", 400003, (ring_a,))
    _add(h, a, "osm:leafB", 400004, (ring_b,))


# --- namespace cases --------------------------------------------------------

def _sheet_case(mutate):
    def run():
        sheet = clean_sheet()
        mutate(sheet)
        return validate_namespace_sheet(sheet, extras=dict(FULL_EXTRAS),
                                        metadata=make_metadata())
    return run


def _ns001():
    return validate_namespace_file(b"\x00\x01 definitely not a sheet",
                                   extras=dict(FULL_EXTRAS), metadata=make_metadata())


def _extras_case(drop: str):
    def run():
        extras = {k: v for k, v in FULL_EXTRAS.items() if k != drop}
        return validate_namespace_sheet(clean_sheet(), extras=extras,
                                        metadata=make_metadata())
    return run


NAMESPACE_CASES: dict[str, tuple[Severity, object]] = {
    "NS001": (Severity.ERROR, _ns001),
    "NS002": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "cased_word_lemma", ""))),
    "NS003": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "gloss", None))),
    "NS004": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "concept_id", None))),
    "NS005": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "pos", ""))),
    "NS006": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "parent_gid", None))),
    "NS007": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "word_sense_rank", None))),
    "NS008": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "relation", None))),
    "NS009": (Severity.ERROR, _sheet_case(lambda s: setattr(s.rows[0], "user_reference", ""))),
    "NS010": (Severity.WARNING, _extras_case("validator")),
    "NS011": (Severity.WARNING, _extras_case("timestamp")),
    "NS012": (Severity.WARNING, _extras_case("notes")),
    "NS013": (Severity.ERROR, lambda: validate_namespace_sheet(
        clean_sheet(), extras=dict(FULL_EXTRAS), metadata=None)),
}


# --- language teleontology cases ----------------------------------------------

def _lt_case(mutate):
    def run():
        lt = clean_lt()
        mutate(lt)
        return validate_language_teleontology(lt, metadata=make_metadata())
    return run


def _lt003():
    lt = clean_lt()
    kt = _as_kt(lt, [Axiom("osm:spatialPartOf_GID-301678", AxiomKind.DOMAIN,
                           ("osm:place_GID-300871",))])
    return validate_language_teleontology(kt, metadata=make_metadata())


def _drop_comment(t):
    del t.annotations["osm:garden_GID-300880"]


def _polysemy(t):
    # same lemma, two GIDs, in two hierarchies; both nodes stay connected
    t.annotations["osm:name_GID-300875"] = _comment("osm:name")
    t.hierarchies()["etypes"].add(QualifiedName("osm", "name", 300875),
                                  ("osm:building_GID-300872",))


def _duplicate_semantics(t):
    # second etype label carrying an existing etype GID
    t.annotations["osm:shed_GID-300874"] = _comment("osm:shed")
    t.hierarchies()["etypes"].add(QualifiedName("osm", "shed", 300874),
                                  ("osm:building_GID-300872",))


def _single_child(t):
    t.annotations["osm:plot_GID-400010"] = _comment("osm:plot")
    t.hierarchies()["etypes"].add(QualifiedName("osm", "plot", 400010),
                                  ("osm:garden_GID-300880",))


def _isolated(t):
    t.annotations["osm:lonely_GID-400011"] = _comment("osm:lonely")
    t.hierarchies()["etypes"].add(QualifiedName("osm", "lonely", 400011), ())


def _missing_gid(t):
    h = t.hierarchies()["etypes"]
    h.nodes.pop("osm:garden_GID-300880")
    parents = h.parents.pop("osm:garden_GID-300880")
    bare = QualifiedName("osm", "garden", None)
    h.add(bare, parents)
    t.annotations[bare.label] = _comment(bare.label)
    del t.annotations["osm:garden_GID-300880"]


LT_CASES: dict[str, tuple[Severity, object]] = {
    "LT001": (Severity.ERROR, lambda: validate_language_teleontology(
        LanguageTeleontology(), metadata=make_metadata())),
    "LT002": (Severity.ERROR, _lt_case(_drop_comment)),
    "LT003": (Severity.ERROR, _lt003),
    "LT004": (Severity.ERROR, _lt_case(_cycle_hierarchy)),
    "LT005": (Severity.ERROR, _lt_case(_polysemy)),
    "LT006": (Severity.ERROR, _lt_case(_duplicate_semantics)),
    "LT007": (Severity.WARNING, _lt_case(_single_child)),
    "LT008": (Severity.ERROR, _lt_case(_isolated)),
    "LT009": (Severity.ERROR, _lt_case(_missing_gid)),
    "LT010": (Severity.ERROR, lambda: validate_language_teleontology(
        clean_lt(), metadata=None)),
}


# --- knowledge teleontology cases ------------------------------------------------

def _kt_case(mutate):
    def run():
        kt = clean_kt()
        mutate(kt)
        return validate_knowledge_teleontology(kt, metadata=make_metadata())
    return run


def _drop_range(kt):
    kt.axioms = tuple(
        a for a in kt.axioms
        if not (a.subject == "osm:name_GID-301670" and a.kind is AxiomKind.RANGE_DATA)
    )


KT_CASES: dict[str, tuple[Severity, object]] = {
    "KT001": (Severity.ERROR, lambda: validate_knowledge_teleontology(
        KnowledgeTeleontology(), metadata=make_metadata())),
    "KT002": (Severity.ERROR, _kt_case(_drop_comment)),
    "KT003": (Severity.ERROR, _kt_case(_drop_range)),
    "KT004": (Severity.ERROR, _kt_case(_cycle_hierarchy)),
    "KT005": (Severity.ERROR, _kt_case(_polysemy)),
    "KT006": (Severity.ERROR, _kt_case(_duplicate_semantics)),
    "KT007": (Severity.WARNING, _kt_case(_single_child)),
    "KT008": (Severity.ERROR, _kt_case(_isolated)),
    "KT009": (Severity.ERROR, _kt_case(_missing_gid)),
    "KT010": (Severity.ERROR, lambda: validate_knowledge_teleontology(
        clean_kt(), metadata=None)),
}


# --- external schema cases ---------------------------------------------------------

def _xs_case(mutate):
    def run():
        xs = clean_xs()
        mutate(xs)
        return validate_external_schema(xs, metadata=make_metadata())
    return run


def _xs_drop_comment(xs):
    del xs.annotations["vso:Allotment"]


def _xs_drop_range(xs):
    xs.axioms = tuple(
        a for a in xs.axioms
        if not (a.subject == "vso:name" and a.kind is AxiomKind.RANGE_DATA)
    )


def _xs_polysemy(xs):
    # "vso:name" already exists as a data property; declare it as a class too
    xs.annotations["vso:name"] = _comment("vso:name")
    xs.etypes.add(QualifiedName("vso", "name", None), ("vso:Building",))


def _xs_duplicate(xs):
    # case-variant duplicate inside one category
    xs.annotations["vso:ROAD"] = _comment("vso:ROAD")
    xs.etypes.add(QualifiedName("vso", "ROAD", None), ("vso:Place",))


def _xs_isolated(xs):
    xs.annotations["vso:Lonely"] = _comment("vso:Lonely")
    xs.etypes.add(QualifiedName("vso", "Lonely", None), ())


XS_CASES: dict[str, tuple[Severity, object]] = {
    "XS001": (Severity.ERROR, _xs_case(_xs_drop_comment)),
    "XS002": (Severity.ERROR, _xs_case(_xs_drop_range)),
    "XS003": (Severity.ERROR, _xs_case(_xs_polysemy)),
    "XS004": (Severity.ERROR, _xs_case(_xs_duplicate)),
    "XS005": (Severity.ERROR, _xs_case(_xs_isolated)),
    "XS006": (Severity.ERROR, lambda: validate_external_schema(
        clean_xs(), metadata=None)),
}

ALL_CASES: dict[str, dict[str, tuple[Severity, object]]] = {
    "namespace": NAMESPACE_CASES,
    "language-teleontology": LT_CASES,
    "knowledge-teleontology": KT_CASES,
    "external-schema": XS_CASES,
}


def run_case(rule_id: str, severity: Severity, build) -> tuple[bool, str]:
    """True + empty message when the case yields exactly one expected finding."""
    report: ValidationReport = build()
    if len(report.findings) != 1:
        return False, f"{rule_id}: expected 1 finding, got {[ (f.rule_id, f.locator) for f in report.findings ]}"
    f = report.findings[0]
    if f.rule_id != rule_id:
        return False, f"{rule_id}: finding carries rule {f.rule_id}"
    if f.severity is not severity:
        return False, f"{rule_id}: severity {f.severity.value}, expected {severity.value}"
    return True, ""
