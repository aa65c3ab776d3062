"""Toolkit for stratified concept/language/knowledge stores.

Ships a concept DAG store, per-language lexicons with gaps, the spreadsheet
annotation pipeline, teleontology builders with coherence checking, quality
gates, a three-tier catalog with license propagation, plus an HTTP service
and a CLI.
"""

from .concepts import Concept, ConceptCore, RelationKind, ROOT_GID, ROOT_LABEL
from .lexicon import LanguageId, LexicalGap, Lexicon, LookupHit, Synset
from .licenses import License, compose_licenses, derive_crep_license
from .report import Finding, Severity, ValidationReport
from .sheets import (
    AnnotationRow,
    AnnotationSheet,
    Decision,
    Stage,
    parse_decisions,
    parse_sheet,
    serialize_sheet,
)
from .annotation import (
    Session,
    enrich,
    export_namespace,
    open_session,
    record_decision,
    replay_decisions,
    search_candidates,
)
from .teleontology import (
    Axiom,
    AxiomKind,
    Hierarchy,
    KnowledgeTeleontology,
    LanguageTeleontology,
    NameSelection,
    QualifiedName,
    build_knowledge_teleontology,
    build_language_teleontology,
    check_concept_coherence,
)
from .owlxml import parse_exchange, serialize_exchange
from .quality import (
    RuleSet,
    validate_external_schema,
    validate_knowledge_teleontology,
    validate_language_teleontology,
    validate_namespace_file,
    validate_namespace_sheet,
)
from .catalog import (
    Catalog,
    CatalogResource,
    IntakeCase,
    Provenance,
    ResourceKind,
    Status,
    Tier,
    Topic,
)
from .store import StoreHub

__version__ = "0.1.0"
