"""Closed OWL RDF/XML subset for teleontology exchange.

Supported constructs: class declarations, subclass-of, object/data property
declarations, sub-property-of, domain, range (union only in object-property
range position), existential ("some") restrictions, disjointness, and
comment/label annotations. Entity IRIs are ``<base>#<label>``. Anything
outside the subset fails loudly with its location; serialization is
canonical (elements ordered by GID, then label) and byte-deterministic.
"""

from __future__ import annotations

import urllib.parse
import xml.etree.ElementTree as ET

from .errors import MalformedDocument, UnsupportedConstruct
from .teleontology import (
    Axiom,
    AxiomKind,
    Hierarchy,
    KnowledgeTeleontology,
    LanguageTeleontology,
    QualifiedName,
    Teleontology,
    XSD_DATATYPES,
    canonical_axioms,
)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

KIND_LANGUAGE = "language teleontology"
KIND_KNOWLEDGE = "knowledge teleontology"

_IRI_SAFE = ":_-.~"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _label_iri(base: str, label: str) -> str:
    return base + urllib.parse.quote(label, safe=_IRI_SAFE)


def _iri_label(base: str, iri: str, location: str) -> str:
    if not iri.startswith(base):
        raise UnsupportedConstruct(location, f"IRI {iri!r} outside base {base!r}")
    return urllib.parse.unquote(iri[len(base):])


def _filler_iri(base: str, filler: str) -> str:
    if filler.startswith("xsd:"):
        return XSD_NS + filler[4:]
    return _label_iri(base, filler)


def _sort_key(name: QualifiedName) -> tuple:
    return (name.gid is None, name.gid or 0, name.label)


def _node_order(h: Hierarchy) -> list[str]:
    return [n.label for n in sorted(h.nodes.values(), key=_sort_key)]


def serialize_exchange(t: Teleontology) -> bytes:
    base = t.base_iri
    kind = KIND_LANGUAGE if isinstance(t, LanguageTeleontology) else KIND_KNOWLEDGE
    hs = t.hierarchies()
    out: list[str] = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<rdf:RDF xmlns:rdf="{RDF_NS}" xmlns:rdfs="{RDFS_NS}" '
        f'xmlns:owl="{OWL_NS}" xmlns:xsd="{XSD_NS}">'
    )
    out.append(f'  <owl:Ontology rdf:about="{_esc(base.rstrip("#"))}">')
    out.append(f"    <rdfs:comment>{_esc(kind)}</rdfs:comment>")
    out.append("  </owl:Ontology>")

    axioms = list(getattr(t, "axioms", ()))

    def annotation_lines(label: str) -> list[str]:
        lines = []
        for key, text in t.annotations.get(label, ()):
            lines.append(f"    <rdfs:{key}>{_esc(text)}</rdfs:{key}>")
        return lines

    def resource_line(tag: str, iri: str) -> str:
        return f'    <{tag} rdf:resource="{_esc(iri)}"/>'

    from .teleontology import DATA_PROPERTIES, ETYPES, OBJECT_PROPERTIES

    for label in _node_order(hs[ETYPES]):
        h = hs[ETYPES]
        out.append(f'  <owl:Class rdf:about="{_esc(_label_iri(base, label))}">')
        out.extend(annotation_lines(label))
        for parent in sorted(h.parents[label]):
            out.append(resource_line("rdfs:subClassOf", _label_iri(base, parent)))
        for axiom in sorted(
            (a for a in axioms if a.subject == label
             and a.kind in (AxiomKind.SOME_VALUES_OBJECT, AxiomKind.SOME_VALUES_DATA)),
            key=lambda a: (a.prop or "", a.filler),
        ):
            out.append("    <rdfs:subClassOf>")
            out.append("      <owl:Restriction>")
            out.append(f'        <owl:onProperty rdf:resource="{_esc(_label_iri(base, axiom.prop))}"/>')
            out.append(f'        <owl:someValuesFrom rdf:resource="{_esc(_filler_iri(base, axiom.filler[0]))}"/>')
            out.append("      </owl:Restriction>")
            out.append("    </rdfs:subClassOf>")
        for axiom in sorted(
            (a for a in axioms if a.subject == label and a.kind is AxiomKind.DISJOINT),
            key=lambda a: a.filler,
        ):
            out.append(resource_line("owl:disjointWith", _label_iri(base, axiom.filler[0])))
        out.append("  </owl:Class>")

    for section, tag in ((OBJECT_PROPERTIES, "owl:ObjectProperty"),
                         (DATA_PROPERTIES, "owl:DatatypeProperty")):
        h = hs[section]
        for label in _node_order(h):
            out.append(f'  <{tag} rdf:about="{_esc(_label_iri(base, label))}">')
            out.extend(annotation_lines(label))
            for parent in sorted(h.parents[label]):
                out.append(resource_line("rdfs:subPropertyOf", _label_iri(base, parent)))
            for axiom in sorted(
                (a for a in axioms if a.subject == label and a.kind is AxiomKind.DOMAIN),
                key=lambda a: a.filler,
            ):
                out.append(resource_line("rdfs:domain", _label_iri(base, axiom.filler[0])))
            range_kind = (
                AxiomKind.RANGE_OBJECT if section == OBJECT_PROPERTIES else AxiomKind.RANGE_DATA
            )
            for axiom in sorted(
                (a for a in axioms if a.subject == label and a.kind is range_kind),
                key=lambda a: a.filler,
            ):
                if len(axiom.filler) == 1:
                    out.append(resource_line("rdfs:range", _filler_iri(base, axiom.filler[0])))
                else:
                    out.append("    <rdfs:range>")
                    out.append("      <owl:Class>")
                    out.append('        <owl:unionOf rdf:parseType="Collection">')
                    for f in axiom.filler:
                        out.append(f'          <rdf:Description rdf:about="{_esc(_label_iri(base, f))}"/>')
                    out.append("        </owl:unionOf>")
                    out.append("      </owl:Class>")
                    out.append("    </rdfs:range>")
            out.append(f"  </{tag}>")

    out.append("</rdf:RDF>")
    return ("\n".join(out) + "\n").encode("utf-8")


# --- parsing -------------------------------------------------------------------

_TAGS = {
    f"{{{OWL_NS}}}Ontology": "owl:Ontology",
    f"{{{OWL_NS}}}Class": "owl:Class",
    f"{{{OWL_NS}}}ObjectProperty": "owl:ObjectProperty",
    f"{{{OWL_NS}}}DatatypeProperty": "owl:DatatypeProperty",
    f"{{{OWL_NS}}}Restriction": "owl:Restriction",
    f"{{{OWL_NS}}}onProperty": "owl:onProperty",
    f"{{{OWL_NS}}}someValuesFrom": "owl:someValuesFrom",
    f"{{{OWL_NS}}}disjointWith": "owl:disjointWith",
    f"{{{OWL_NS}}}unionOf": "owl:unionOf",
    f"{{{RDFS_NS}}}subClassOf": "rdfs:subClassOf",
    f"{{{RDFS_NS}}}subPropertyOf": "rdfs:subPropertyOf",
    f"{{{RDFS_NS}}}domain": "rdfs:domain",
    f"{{{RDFS_NS}}}range": "rdfs:range",
    f"{{{RDFS_NS}}}comment": "rdfs:comment",
    f"{{{RDFS_NS}}}label": "rdfs:label",
    f"{{{RDF_NS}}}RDF": "rdf:RDF",
    f"{{{RDF_NS}}}Description": "rdf:Description",
}

_RDF_ABOUT = f"{{{RDF_NS}}}about"
_RDF_RESOURCE = f"{{{RDF_NS}}}resource"
_RDF_PARSETYPE = f"{{{RDF_NS}}}parseType"


def _short(tag) -> str:
    if not isinstance(tag, str):
        return "<non-element>"
    return _TAGS.get(tag, tag)


def _resource(el, location: str) -> str:
    iri = el.get(_RDF_RESOURCE)
    if iri is None:
        raise UnsupportedConstruct(location, "missing rdf:resource")
    return iri


def _xsd_or_label(base: str, iri: str, location: str) -> str:
    if iri.startswith(XSD_NS):
        return "xsd:" + iri[len(XSD_NS):]
    return _iri_label(base, iri, location)


def parse_exchange(data: bytes | str, base_iri: str | None = None) -> Teleontology:
    """Parse a subset document back into a teleontology value."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise MalformedDocument(str(e)) from None
    if _short(root.tag) != "rdf:RDF":
        raise UnsupportedConstruct("/", f"root element {_short(root.tag)}")

    kind_marker: str | None = None
    base = base_iri
    entities: list[tuple[str, str, ET.Element]] = []
    for i, el in enumerate(root):
        loc = f"rdf:RDF/{_short(el.tag)}[{i}]"
        tag = _short(el.tag)
        if tag == "owl:Ontology":
            about = el.get(_RDF_ABOUT, "")
            if base is None and about:
                base = about + "#"
            for child in el:
                if _short(child.tag) == "rdfs:comment":
                    kind_marker = (child.text or "").strip()
                else:
                    raise UnsupportedConstruct(f"{loc}/{_short(child.tag)}")
        elif tag in ("owl:Class", "owl:ObjectProperty", "owl:DatatypeProperty"):
            entities.append((tag, loc, el))
        else:
            raise UnsupportedConstruct(loc)
    if base is None:
        raise MalformedDocument("document carries no owl:Ontology base IRI")

    classes: dict[str, tuple[str, ...]] = {}
    object_props: dict[str, tuple[str, ...]] = {}
    data_props: dict[str, tuple[str, ...]] = {}
    annotations: dict[str, list[tuple[str, str]]] = {}
    axioms: list[Axiom] = []

    def parse_restriction(subject: str, el, loc: str) -> None:
        prop = None
        filler_iri = None
        for child in el:
            tag = _short(child.tag)
            if tag == "owl:onProperty":
                prop = child.get(_RDF_RESOURCE)
            elif tag == "owl:someValuesFrom":
                filler_iri = child.get(_RDF_RESOURCE)
            else:
                raise UnsupportedConstruct(f"{loc}/{tag}")
        if prop is None or filler_iri is None:
            raise UnsupportedConstruct(loc, "restriction needs onProperty and someValuesFrom")
        prop_label = _iri_label(base, prop, loc)
        filler = _xsd_or_label(base, filler_iri, loc)
        kind = AxiomKind.SOME_VALUES_DATA if filler.startswith("xsd:") else AxiomKind.SOME_VALUES_OBJECT
        axioms.append(Axiom(subject=subject, kind=kind, filler=(filler,), prop=prop_label))

    def parse_union(el, loc: str) -> tuple[str, ...]:
        fillers = []
        for child in el:
            if _short(child.tag) != "rdf:Description":
                raise UnsupportedConstruct(f"{loc}/{_short(child.tag)}")
            fillers.append(_iri_label(base, child.get(_RDF_ABOUT, ""), loc))
        if not fillers:
            raise UnsupportedConstruct(loc, "empty union")
        return tuple(fillers)

    for tag, loc, el in entities:
        about = el.get(_RDF_ABOUT)
        if about is None:
            raise UnsupportedConstruct(loc, "missing rdf:about")
        label = _iri_label(base, about, loc)
        parents: list[str] = []
        notes: list[tuple[str, str]] = []
        for child in el:
            ctag = _short(child.tag)
            cloc = f"{loc}/{ctag}"
            if ctag in ("rdfs:comment", "rdfs:label"):
                notes.append((ctag.split(":")[1], child.text or ""))
            elif ctag == "rdfs:subClassOf" and tag == "owl:Class":
                if child.get(_RDF_RESOURCE) is not None:
                    parents.append(_iri_label(base, child.get(_RDF_RESOURCE), cloc))
                else:
                    inner = list(child)
                    if len(inner) != 1 or _short(inner[0].tag) != "owl:Restriction":
                        raise UnsupportedConstruct(cloc, "only plain parents or some-restrictions")
                    parse_restriction(label, inner[0], f"{cloc}/owl:Restriction")
            elif ctag == "owl:disjointWith" and tag == "owl:Class":
                other = _iri_label(base, _resource(child, cloc), cloc)
                axioms.append(Axiom(subject=label, kind=AxiomKind.DISJOINT, filler=(other,)))
            elif ctag == "rdfs:subPropertyOf" and tag in ("owl:ObjectProperty", "owl:DatatypeProperty"):
                parents.append(_iri_label(base, _resource(child, cloc), cloc))
            elif ctag == "rdfs:domain" and tag in ("owl:ObjectProperty", "owl:DatatypeProperty"):
                filler = _iri_label(base, _resource(child, cloc), cloc)
                axioms.append(Axiom(subject=label, kind=AxiomKind.DOMAIN, filler=(filler,)))
            elif ctag == "rdfs:range" and tag == "owl:ObjectProperty":
                if child.get(_RDF_RESOURCE) is not None:
                    filler = (_iri_label(base, child.get(_RDF_RESOURCE), cloc),)
                else:
                    inner = list(child)
                    if (len(inner) != 1 or _short(inner[0].tag) != "owl:Class"
                            or len(list(inner[0])) != 1
                            or _short(list(inner[0])[0].tag) != "owl:unionOf"):
                        raise UnsupportedConstruct(cloc, "only plain or union object ranges")
                    union_el = list(inner[0])[0]
                    if union_el.get(_RDF_PARSETYPE) != "Collection":
                        raise UnsupportedConstruct(cloc, "union must be an rdf Collection")
                    filler = parse_union(union_el, f"{cloc}/owl:unionOf")
                axioms.append(Axiom(subject=label, kind=AxiomKind.RANGE_OBJECT, filler=filler))
            elif ctag == "rdfs:range" and tag == "owl:DatatypeProperty":
                filler = _xsd_or_label(base, _resource(child, cloc), cloc)
                if not filler.startswith("xsd:"):
                    raise UnsupportedConstruct(cloc, "data ranges must be xsd datatypes")
                axioms.append(Axiom(subject=label, kind=AxiomKind.RANGE_DATA, filler=(filler,)))
            else:
                raise UnsupportedConstruct(cloc)
        target = {"owl:Class": classes, "owl:ObjectProperty": object_props,
                  "owl:DatatypeProperty": data_props}[tag]
        target[label] = tuple(parents)
        if notes:
            annotations[label] = notes

    def build_hierarchy(decls: dict[str, tuple[str, ...]]) -> Hierarchy:
        h = Hierarchy()
        for label, parents in decls.items():
            h.add(QualifiedName.parse(label), parents)
        return h

    is_language = kind_marker == KIND_LANGUAGE and not axioms
    anns = {label: tuple(notes) for label, notes in annotations.items()}
    if is_language:
        return LanguageTeleontology(
            etype_names=build_hierarchy(classes),
            object_property_names=build_hierarchy(object_props),
            data_property_names=build_hierarchy(data_props),
            annotations=anns,
            base_iri=base,
        )
    used_datatypes = {
        f for a in axioms for f in a.filler if f.startswith("xsd:")
    }
    return KnowledgeTeleontology(
        etypes=build_hierarchy(classes),
        object_properties=build_hierarchy(object_props),
        data_properties=build_hierarchy(data_props),
        axioms=canonical_axioms(axioms),
        datatypes=frozenset(XSD_DATATYPES | used_datatypes),
        annotations=anns,
        base_iri=base,
    )
