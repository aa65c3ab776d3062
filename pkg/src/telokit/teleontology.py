"""Name hierarchies for entity types and properties, with optional axioms.

A language teleontology holds bare concept names (three hierarchies: entity
type names, object property names, data property names), each disambiguated
by a GID; it carries no axioms. A knowledge teleontology reuses a subset of
those names and defines them: existential restrictions, domain/range
assertions and disjointness. Every hierarchy edge must stay coherent with
the concept store's IS_A subsumption.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .concepts import ConceptCore
from .errors import CycleError, IllTypedAxiom, UnknownName, UnresolvedName
from .lexicon import LanguageId, Lexicon
from .report import Severity, ValidationReport

DEFAULT_BASE_IRI = "http://knowdive.disi.unitn.it/etype#"

XSD_DATATYPES = frozenset({
    "xsd:string", "xsd:integer", "xsd:decimal", "xsd:float", "xsd:double",
    "xsd:boolean", "xsd:dateTime", "xsd:date", "xsd:time", "xsd:anyURI",
    "xsd:long", "xsd:int", "xsd:short", "xsd:byte", "xsd:nonNegativeInteger",
})

_LABEL = re.compile(r"^(?P<prefix>[^:\s]*):(?P<local>.+?)(?:_GID-(?P<gid>\d+))?$")


@dataclass(frozen=True, order=True)
class QualifiedName:
    prefix: str
    local: str
    gid: int | None = None

    @property
    def label(self) -> str:
        base = f"{self.prefix}:{self.local}" if self.prefix else self.local
        return f"{base}_GID-{self.gid}" if self.gid is not None else base

    @property
    def lemma(self) -> str:
        return f"{self.prefix}:{self.local}" if self.prefix else self.local

    def _with_gid(self, gid: int) -> "QualifiedName":
        return QualifiedName(self.prefix, self.local, gid)

    @classmethod
    def parse(cls, label: str) -> "QualifiedName":
        m = _LABEL.match(label)
        if not m:
            # No prefix separator: plain local name, maybe with GID suffix.
            plain = re.match(r"^(?P<local>.+?)(?:_GID-(?P<gid>\d+))?$", label)
            if not plain:
                return cls(prefix="", local=label)
            gid = plain.group("gid")
            return cls(prefix="", local=plain.group("local"),
                       gid=int(gid) if gid else None)
        gid = m.group("gid")
        return cls(prefix=m.group("prefix"), local=m.group("local"),
                   gid=int(gid) if gid else None)


class AxiomKind(Enum):
    SOME_VALUES_OBJECT = "SOME_VALUES_OBJECT"
    SOME_VALUES_DATA = "SOME_VALUES_DATA"
    DOMAIN = "DOMAIN"
    RANGE_OBJECT = "RANGE_OBJECT"
    RANGE_DATA = "RANGE_DATA"
    DISJOINT = "DISJOINT"


@dataclass(frozen=True)
class Axiom:
    subject: str                       # label in one of the hierarchies
    kind: AxiomKind
    filler: tuple[str, ...]            # labels or one datatype; union only for RANGE_OBJECT
    prop: str | None = None            # property label for SOME_VALUES_* on etypes

    def __post_init__(self):
        if len(self.filler) == 0:
            raise IllTypedAxiom(f"axiom on {self.subject} has no filler")
        if len(self.filler) > 1 and self.kind is not AxiomKind.RANGE_OBJECT:
            raise IllTypedAxiom(
                f"{self.kind.value} on {self.subject}: unions are only supported in object ranges"
            )


@dataclass
class Hierarchy:
    """One forest of named entries with child -> parents edges."""

    nodes: dict[str, QualifiedName] = field(default_factory=dict)
    parents: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def add(self, name: QualifiedName, parents: tuple[str, ...] = ()) -> None:
        self.nodes[name.label] = name
        self.parents[name.label] = parents

    def edges(self) -> list[tuple[str, str]]:
        out = []
        for child in sorted(self.parents):
            for parent in self.parents[child]:
                out.append((child, parent))
        return out

    def children_count(self) -> dict[str, int]:
        counts = {label: 0 for label in self.nodes}
        for _, parent in self.edges():
            if parent in counts:
                counts[parent] += 1
        return counts

    def find_cycle(self) -> list[str] | None:
        WHITE, GREY, BLACK = 0, 1, 2
        colour = {label: WHITE for label in self.nodes}
        for root in sorted(self.nodes):
            if colour[root] != WHITE:
                continue
            stack = [(root, 0)]
            path: list[str] = []
            while stack:
                node, idx = stack.pop()
                if idx == 0:
                    colour[node] = GREY
                    path.append(node)
                ps = [p for p in self.parents.get(node, ()) if p in self.nodes]
                if idx < len(ps):
                    stack.append((node, idx + 1))
                    nxt = ps[idx]
                    if colour[nxt] == GREY:
                        return path[path.index(nxt):] + [nxt]
                    if colour[nxt] == WHITE:
                        stack.append((nxt, 0))
                else:
                    colour[node] = BLACK
                    path.pop()
        return None

    def __eq__(self, other):
        return (
            isinstance(other, Hierarchy)
            and self.nodes == other.nodes
            and {k: tuple(sorted(v)) for k, v in self.parents.items()}
            == {k: tuple(sorted(v)) for k, v in other.parents.items()}
        )


ETYPES = "etypes"
OBJECT_PROPERTIES = "object_properties"
DATA_PROPERTIES = "data_properties"
SECTIONS = (ETYPES, OBJECT_PROPERTIES, DATA_PROPERTIES)


@dataclass
class LanguageTeleontology:
    etype_names: Hierarchy = field(default_factory=Hierarchy)
    object_property_names: Hierarchy = field(default_factory=Hierarchy)
    data_property_names: Hierarchy = field(default_factory=Hierarchy)
    annotations: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)
    base_iri: str = DEFAULT_BASE_IRI

    def hierarchies(self) -> dict[str, Hierarchy]:
        return {
            ETYPES: self.etype_names,
            OBJECT_PROPERTIES: self.object_property_names,
            DATA_PROPERTIES: self.data_property_names,
        }

    def labels(self) -> set[str]:
        out: set[str] = set()
        for h in self.hierarchies().values():
            out.update(h.nodes)
        return out


@dataclass
class KnowledgeTeleontology:
    etypes: Hierarchy = field(default_factory=Hierarchy)
    object_properties: Hierarchy = field(default_factory=Hierarchy)
    data_properties: Hierarchy = field(default_factory=Hierarchy)
    axioms: tuple[Axiom, ...] = ()
    datatypes: frozenset[str] = XSD_DATATYPES
    annotations: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)
    base_iri: str = DEFAULT_BASE_IRI

    def hierarchies(self) -> dict[str, Hierarchy]:
        return {
            ETYPES: self.etypes,
            OBJECT_PROPERTIES: self.object_properties,
            DATA_PROPERTIES: self.data_properties,
        }

    def labels(self) -> set[str]:
        out: set[str] = set()
        for h in self.hierarchies().values():
            out.update(h.nodes)
        return out

    def axioms_for(self, label: str) -> list[Axiom]:
        return [a for a in self.axioms if a.subject == label]


Teleontology = LanguageTeleontology | KnowledgeTeleontology


# --- builders ----------------------------------------------------------------

@dataclass(frozen=True)
class NameSelection:
    """Caller's classification of selected names into the three hierarchies."""

    etype_names: tuple[str, ...] = ()
    object_property_names: tuple[str, ...] = ()
    data_property_names: tuple[str, ...] = ()

    def sections(self) -> dict[str, tuple[str, ...]]:
        return {
            ETYPES: self.etype_names,
            OBJECT_PROPERTIES: self.object_property_names,
            DATA_PROPERTIES: self.data_property_names,
        }


def _resolve_selection(lexicon: Lexicon, languages: list[LanguageId],
                       lemma: str) -> int:
    for language in languages:
        gids = lexicon.find_word(language, lemma)
        if gids:
            return gids[0]
    raise UnresolvedName(f"{lemma!r} is not a word of any loaded domain language")


def transitive_reduction_edges(core: ConceptCore, gids: list[int]) -> list[tuple[int, int]]:
    """IS_A edges of the concept DAG restricted to ``gids``, transitively reduced."""
    selected = sorted(set(gids))
    reach = {
        a: {b for b in selected if a != b and core.is_subsumed_by(a, b)}
        for a in selected
    }
    edges = []
    for a in selected:
        for b in sorted(reach[a]):
            if not any(b in reach[c] for c in reach[a] if c != b):
                edges.append((a, b))
    return edges


def build_language_teleontology(lexicon: Lexicon, core: ConceptCore,
                                domain_languages: list[LanguageId],
                                selection: NameSelection,
                                annotations: dict[str, list[tuple[str, str]]] | None = None,
                                base_iri: str = DEFAULT_BASE_IRI) -> LanguageTeleontology:
    """Assemble name hierarchies from domain-language words.

    Every selected name must resolve to a GID through one of the loaded
    domain languages; hierarchy edges are the transitive reduction of the
    concept store's IS_A relation restricted to the selected GIDs.
    """
    lt = LanguageTeleontology(base_iri=base_iri)
    hierarchies = lt.hierarchies()
    for section, lemmas in selection.sections().items():
        gid_by_lemma: dict[str, int] = {}
        name_by_lemma: dict[str, QualifiedName] = {}
        label_by_gid: dict[int, str] = {}
        for lemma in lemmas:
            gid = _resolve_selection(lexicon, domain_languages, lemma)
            gid_by_lemma[lemma] = gid
            name_by_lemma[lemma] = QualifiedName.parse(lemma)._with_gid(gid)
            label_by_gid.setdefault(gid, name_by_lemma[lemma].label)
        edges = transitive_reduction_edges(core, list(gid_by_lemma.values()))
        parent_map: dict[int, list[int]] = {}
        for child, parent in edges:
            parent_map.setdefault(child, []).append(parent)
        for lemma in lemmas:
            gid = gid_by_lemma[lemma]
            parents = tuple(label_by_gid[p] for p in sorted(parent_map.get(gid, [])))
            hierarchies[section].add(name_by_lemma[lemma], parents)
    for label, notes in (annotations or {}).items():
        if label not in lt.labels():
            raise UnknownName(f"annotation target {label!r} is not a selected name")
        lt.annotations[label] = tuple(notes)
    for hierarchy in lt.hierarchies().values():
        cycle = hierarchy.find_cycle()
        if cycle:  # unreachable from a DAG restriction; defense in depth
            raise CycleError(0, 0, [])
    return lt


def _check_axiom(axiom: Axiom, labels: set[str], etype_labels: set[str],
                 object_labels: set[str], data_labels: set[str],
                 datatypes: frozenset[str]) -> None:
    if axiom.subject not in labels:
        raise UnknownName(f"axiom subject {axiom.subject!r} is not in the teleontology")
    kind = axiom.kind
    if kind is AxiomKind.SOME_VALUES_OBJECT:
        if axiom.subject not in etype_labels or axiom.prop not in object_labels:
            raise IllTypedAxiom(f"object restriction on {axiom.subject} needs an etype subject and object property")
        if axiom.filler[0] not in etype_labels:
            raise IllTypedAxiom(f"object restriction filler {axiom.filler[0]!r} is not an etype")
    elif kind is AxiomKind.SOME_VALUES_DATA:
        if axiom.subject not in etype_labels or axiom.prop not in data_labels:
            raise IllTypedAxiom(f"data restriction on {axiom.subject} needs an etype subject and data property")
        if axiom.filler[0] not in datatypes:
            raise IllTypedAxiom(f"data restriction filler {axiom.filler[0]!r} is not a datatype")
    elif kind is AxiomKind.DOMAIN:
        if axiom.subject not in object_labels | data_labels:
            raise IllTypedAxiom(f"domain assertion subject {axiom.subject!r} is not a property")
        if axiom.filler[0] not in etype_labels:
            raise IllTypedAxiom(f"domain filler {axiom.filler[0]!r} is not an etype")
    elif kind is AxiomKind.RANGE_OBJECT:
        if axiom.subject not in object_labels:
            raise IllTypedAxiom(f"object range subject {axiom.subject!r} is not an object property")
        for f in axiom.filler:
            if f not in etype_labels:
                raise IllTypedAxiom(f"object range filler {f!r} is not an etype")
    elif kind is AxiomKind.RANGE_DATA:
        if axiom.subject not in data_labels:
            raise IllTypedAxiom(f"data range subject {axiom.subject!r} is not a data property")
        if axiom.filler[0] not in datatypes:
            raise IllTypedAxiom(f"data range filler {axiom.filler[0]!r} is not a datatype")
    elif kind is AxiomKind.DISJOINT:
        if axiom.subject not in etype_labels or axiom.filler[0] not in etype_labels:
            raise IllTypedAxiom("disjointness holds between etypes")


def canonical_axioms(axioms) -> tuple[Axiom, ...]:
    """Stable axiom ordering shared by the builder and the exchange parser."""
    return tuple(sorted(axioms, key=lambda a: (a.subject, a.kind.value, a.prop or "", a.filler)))


def build_knowledge_teleontology(lt: LanguageTeleontology, axioms: list[Axiom],
                                 datatypes: frozenset[str] = XSD_DATATYPES,
                                 names: set[str] | None = None) -> KnowledgeTeleontology:
    """Define a knowledge teleontology over (a subset of) lt's names.

    ``names`` restricts the reused name set; hierarchy edges are inherited
    from lt, dropping edges whose endpoints fall outside the subset.
    """
    keep = names if names is not None else lt.labels()
    unknown = keep - lt.labels()
    if unknown:
        raise UnknownName(f"names not in the language teleontology: {sorted(unknown)}")
    kt = KnowledgeTeleontology(base_iri=lt.base_iri, datatypes=frozenset(datatypes))
    for section, source in lt.hierarchies().items():
        target = kt.hierarchies()[section]
        for label in source.nodes:
            if label not in keep:
                continue
            parents = tuple(p for p in source.parents[label] if p in keep)
            target.add(source.nodes[label], parents)
    etype_labels = set(kt.etypes.nodes)
    object_labels = set(kt.object_properties.nodes)
    data_labels = set(kt.data_properties.nodes)
    for axiom in axioms:
        _check_axiom(axiom, kt.labels(), etype_labels, object_labels, data_labels,
                     kt.datatypes)
    kt.axioms = canonical_axioms(axioms)
    kt.annotations = {
        label: notes for label, notes in lt.annotations.items() if label in keep
    }
    return kt


# --- coherence ----------------------------------------------------------------

def check_concept_coherence(t: Teleontology, core: ConceptCore) -> ValidationReport:
    """Every hierarchy edge must map to an IS_A subsumption in the concept store."""
    report = ValidationReport("teleontology-coherence")
    for section, hierarchy in t.hierarchies().items():
        for child, parent in hierarchy.edges():
            child_gid = hierarchy.nodes[child].gid
            parent_gid = hierarchy.nodes[parent].gid if parent in hierarchy.nodes else None
            ok = (
                child_gid is not None
                and parent_gid is not None
                and child_gid in core
                and parent_gid in core
                and core.is_subsumed_by(child_gid, parent_gid)
            )
            if not ok:
                report.add(
                    "COH001", Severity.ERROR, f"{section}:{child}",
                    f"edge {child} -> {parent} is not backed by concept subsumption "
                    f"({child_gid} IS_A {parent_gid})",
                )
    return report.finish()
