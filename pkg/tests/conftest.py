from __future__ import annotations

import random
from pathlib import Path

import pytest

from telokit.catalog import METADATA_ATTRIBUTES
from telokit.concepts import ConceptCore, RelationKind
from telokit.lexicon import LanguageId, Lexicon
from telokit.teleontology import (
    Axiom,
    AxiomKind,
    NameSelection,
    build_knowledge_teleontology,
    build_language_teleontology,
)

FIXTURES = Path(__file__).parent / "fixtures"


def make_metadata(**overrides) -> dict:
    meta = {
        "ds:DatLicense": "CC-BY",
        "ds:DatURL": "https://example.org/resource",
        "ds:DatKeyword": ["geosocial", "vocabulary"],
        "ds:DatPublisher": "Example Publisher",
        "ds:DatCreator": "Example Creator",
        "ds:DatOwner": "owner@example.org",
        "ds:DatLanguage": ["eng"],
        "ds:DatLevel": "language",
        "ds:DatSize": 1234,
        "ds:DatName": "Example resource",
        "ds:DatPublicationTimestamp": "2024-02-01T00:00:00Z",
        "ds:DatDescription": "An example resource used by the tests.",
        "ds:DatVersion": "1.0",
        "ds:DatFileFormat": "CSV",
    }
    meta.update(overrides)
    return meta


# OSM-flavoured fixture store: place > building > allotment plus garden,
# and the property concepts used by the teleontology tests.
OSM_CONCEPTS = {
    300871: ("osm:place", 1),
    300872: ("osm:building", 300871),
    300874: ("osm:allotment", 300872),
    300880: ("osm:garden", 300872),
    301678: ("osm:spatialPartOf", 1),
    301679: ("osm:adjacentTo", 301678),
    301670: ("osm:name", 1),
    301664: ("osm:fclass", 301670),
}


def build_osm_store() -> tuple[ConceptCore, Lexicon, LanguageId]:
    core = ConceptCore()
    lex = Lexicon(core)
    osm = lex.add_language(LanguageId.domain("eng", "osm"))
    pending = dict(OSM_CONCEPTS)
    while pending:
        for gid in sorted(pending):
            word, parent = pending[gid]
            if parent not in core:
                continue
            core.preload(gid, [(parent, RelationKind.IS_A)])
            lex.upsert_synset(osm, gid, [word],
                              gloss=f"This concept represents the geosocial notion of {word.split(':')[1]}.")
            del pending[gid]
    return core, lex, osm


OSM_ANNOTATIONS = {
    f"{word}_GID-{gid}": [
        ("comment", f"This concept represents the geosocial notion of {word.split(':')[1]}.")
    ]
    for gid, (word, _) in OSM_CONCEPTS.items()
}

OSM_SELECTION = NameSelection(
    etype_names=("osm:place", "osm:building", "osm:allotment", "osm:garden"),
    object_property_names=("osm:spatialPartOf", "osm:adjacentTo"),
    data_property_names=("osm:name", "osm:fclass"),
)

OSM_AXIOMS = [
    Axiom("osm:allotment_GID-300874", AxiomKind.SOME_VALUES_DATA,
          ("xsd:string",), prop="osm:fclass_GID-301664"),
    Axiom("osm:allotment_GID-300874", AxiomKind.SOME_VALUES_OBJECT,
          ("osm:building_GID-300872",), prop="osm:spatialPartOf_GID-301678"),
    Axiom("osm:spatialPartOf_GID-301678", AxiomKind.DOMAIN, ("osm:place_GID-300871",)),
    Axiom("osm:spatialPartOf_GID-301678", AxiomKind.RANGE_OBJECT, ("osm:place_GID-300871",)),
    Axiom("osm:adjacentTo_GID-301679", AxiomKind.DOMAIN, ("osm:place_GID-300871",)),
    Axiom("osm:adjacentTo_GID-301679", AxiomKind.RANGE_OBJECT, ("osm:place_GID-300871",)),
    Axiom("osm:name_GID-301670", AxiomKind.DOMAIN, ("osm:place_GID-300871",)),
    Axiom("osm:name_GID-301670", AxiomKind.RANGE_DATA, ("xsd:string",)),
    Axiom("osm:fclass_GID-301664", AxiomKind.DOMAIN, ("osm:place_GID-300871",)),
    Axiom("osm:fclass_GID-301664", AxiomKind.RANGE_DATA, ("xsd:string",)),
]


@pytest.fixture
def osm_store():
    return build_osm_store()


@pytest.fixture
def osm_lt(osm_store):
    core, lex, osm = osm_store
    return build_language_teleontology(lex, core, [osm], OSM_SELECTION,
                                       annotations=OSM_ANNOTATIONS)


@pytest.fixture
def osm_kt(osm_lt):
    return build_knowledge_teleontology(osm_lt, OSM_AXIOMS)


def random_dag_edges(rng: random.Random, n: int, density: float = 0.15):
    """Random DAG over nodes 0..n-1; edges only from lower to higher index."""
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                edges.append((a, b))
    return edges
