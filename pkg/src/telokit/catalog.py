"""Three-tier resource repository: source, content and distribution.

Resources enter the source tier (as project output, a web copy, or a
URL-only virtual copy), pass admin review against a validation report to be
promoted into the content tier with a derived license, and are published to
the distribution tier singly or as license-composed bundles. The store is
append-only: payload bytes are never rewritten or deleted.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import (
    ApproveWithFailingReport,
    BadFilter,
    DuplicateId,
    EmptyRejectionMessage,
    MissingProvenance,
    NotPending,
    UnknownResource,
)
from .licenses import License, compose_licenses, derive_crep_license, parse_license
from .report import ValidationReport

METADATA_ATTRIBUTES = (
    "ds:DatLicense",
    "ds:DatURL",
    "ds:DatKeyword",
    "ds:DatPublisher",
    "ds:DatCreator",
    "ds:DatOwner",
    "ds:DatLanguage",
    "ds:DatLevel",
    "ds:DatSize",
    "ds:DatName",
    "ds:DatPublicationTimestamp",
    "ds:DatDescription",
    "ds:DatVersion",
    "ds:DatFileFormat",
)
OPTIONAL_METADATA_ATTRIBUTES = ("ds:LKDatType",)
MULTI_VALUED = ("ds:DatKeyword", "ds:DatLanguage")


def metadata_missing(metadata: dict) -> list[str]:
    return [a for a in METADATA_ATTRIBUTES
            if a not in metadata or metadata[a] in ("", None, [])]


class Tier(Enum):
    SREP = "srep"
    CREP = "crep"
    DREP = "drep"


class ResourceKind(Enum):
    UKC_NAMESPACE = "UKC_NAMESPACE"
    LANGUAGE_TELEONTOLOGY = "LANGUAGE_TELEONTOLOGY"
    KNOWLEDGE_TELEONTOLOGY = "KNOWLEDGE_TELEONTOLOGY"
    LIGHTWEIGHT_ONTOLOGY = "LIGHTWEIGHT_ONTOLOGY"
    TELEOLOGY = "TELEOLOGY"
    SCHEMA = "SCHEMA"
    EXTERNAL_NAMESPACE = "EXTERNAL_NAMESPACE"


class IntakeCase(Enum):
    PROJECT = "PROJECT"
    WWW_COPY = "WWW_COPY"
    WWW_VIRTUAL = "WWW_VIRTUAL"


class Status(Enum):
    PENDING = "PENDING"
    APPROVED = "APPROVED"
    REJECTED = "REJECTED"


class TopicMemberKind(Enum):
    W3C_NAMESPACE = "W3C_NAMESPACE"
    CLASSIFICATION = "CLASSIFICATION"
    STANDARD = "STANDARD"


@dataclass(frozen=True)
class Topic:
    """Informal label aggregating vocabularies of cognate universes of discourse."""

    label: str
    members: tuple[tuple[str, TopicMemberKind], ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError(f"topic {self.label!r} needs at least one member")


@dataclass(frozen=True)
class Provenance:
    source: str  # project name or URL
    owner: str
    timestamp: str
    license: License

    def complete(self) -> bool:
        return bool(self.source and self.owner and self.timestamp and self.license)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "owner": self.owner,
            "timestamp": self.timestamp,
            "license": self.license.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(d["source"], d["owner"], d["timestamp"], parse_license(d["license"]))


@dataclass
class CatalogResource:
    resource_id: str
    tier: Tier
    kind: ResourceKind
    intake_case: IntakeCase
    provenance: Provenance
    payload: bytes | None
    status: Status
    metadata: dict = field(default_factory=dict)
    message: str = ""
    report: ValidationReport | None = None
    sources: tuple[str, ...] = ()
    distributable: bool = True


def _now_iso() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


_PAYLOAD_EXT = {
    "OWL RDF/XML": "owl",
    "CSV": "csv",
    "JSON": "json",
    "Excel": "xlsx",
}


class Catalog:
    """Directory-backed catalog with a single-writer mutation lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.RLock()
        for tier in Tier:
            (self.root / tier.value).mkdir(parents=True, exist_ok=True)
        self._notification_path = self.root / "notifications.log"

    # -- storage helpers ------------------------------------------------------

    def _dir(self, tier: Tier, resource_id: str) -> Path:
        return self.root / tier.value / resource_id

    def _find(self, resource_id: str) -> list[Tier]:
        return [t for t in Tier if self._dir(t, resource_id).exists()]

    def _write(self, resource: CatalogResource) -> None:
        d = self._dir(resource.tier, resource.resource_id)
        d.mkdir(parents=True, exist_ok=True)
        if resource.payload is not None:
            ext = _PAYLOAD_EXT.get(str(resource.metadata.get("ds:DatFileFormat", "")), "bin")
            (d / f"payload.{ext}").write_bytes(resource.payload)
        (d / "metadata.json").write_text(
            json.dumps(resource.metadata, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        prov = resource.provenance.to_dict()
        if resource.sources:
            prov["sources"] = list(resource.sources)
        (d / "provenance.json").write_text(
            json.dumps(prov, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        if resource.report is not None:
            (d / "report.txt").write_text(resource.report.to_text(), encoding="utf-8")
        self._write_state(resource)

    def _write_state(self, resource: CatalogResource) -> None:
        d = self._dir(resource.tier, resource.resource_id)
        state = {
            "status": resource.status.value,
            "kind": resource.kind.value,
            "intake_case": resource.intake_case.value,
            "message": resource.message,
            "sources": list(resource.sources),
            "distributable": resource.distributable,
        }
        (d / "state.json").write_text(
            json.dumps(state, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    def _read(self, tier: Tier, resource_id: str) -> CatalogResource:
        d = self._dir(tier, resource_id)
        if not d.exists():
            raise UnknownResource(resource_id)
        state = json.loads((d / "state.json").read_text(encoding="utf-8"))
        metadata = json.loads((d / "metadata.json").read_text(encoding="utf-8"))
        prov_doc = json.loads((d / "provenance.json").read_text(encoding="utf-8"))
        payload = None
        for p in sorted(d.glob("payload.*")):
            payload = p.read_bytes()
            break
        report = None
        report_path = d / "report.txt"
        if report_path.exists():
            report = report_path.read_text(encoding="utf-8")
        resource = CatalogResource(
            resource_id=resource_id,
            tier=tier,
            kind=ResourceKind(state["kind"]),
            intake_case=IntakeCase(state["intake_case"]),
            provenance=Provenance.from_dict(prov_doc),
            payload=payload,
            status=Status(state["status"]),
            metadata=metadata,
            message=state.get("message", ""),
            sources=tuple(state.get("sources", ())),
            distributable=state.get("distributable", True),
        )
        resource._report_text = report  # raw text; structured report not persisted
        return resource

    def _notify(self, event: str, resource_id: str, message: str = "") -> None:
        line = f"{_now_iso()}\t{event}\t{resource_id}\t{message}\n"
        with open(self._notification_path, "a", encoding="utf-8") as fh:
            fh.write(line)

    def notifications(self) -> list[str]:
        if not self._notification_path.exists():
            return []
        return self._notification_path.read_text(encoding="utf-8").splitlines()

    # -- operations -----------------------------------------------------------

    def intake(self, resource_id: str, kind: ResourceKind, case: IntakeCase,
               provenance: Provenance, payload: bytes | None = None,
               metadata: dict | None = None) -> CatalogResource:
        with self._lock:
            if not provenance.complete():
                raise MissingProvenance(
                    "intake requires source, owner, timestamp and license"
                )
            if self._find(resource_id):
                raise DuplicateId(resource_id)
            if case is IntakeCase.WWW_VIRTUAL:
                if payload is not None:
                    raise ValueError("virtual intake stores a URL only, no payload")
            elif payload is None:
                raise ValueError(f"{case.value} intake requires payload bytes")
            metadata = dict(metadata or {})
            metadata.setdefault("ds:DatLicense", provenance.license.value)
            metadata.setdefault("ds:DatOwner", provenance.owner)
            if payload is not None:
                metadata["ds:DatSize"] = len(payload)
            resource = CatalogResource(
                resource_id=resource_id,
                tier=Tier.SREP,
                kind=kind,
                intake_case=case,
                provenance=provenance,
                payload=payload,
                status=Status.PENDING,
                metadata=metadata,
            )
            self._write(resource)
            self._notify("INTAKE", resource_id, f"pending review ({case.value})")
            return resource

    def pending(self) -> list[CatalogResource]:
        out = []
        srep = self.root / Tier.SREP.value
        for d in sorted(srep.iterdir()):
            if not d.is_dir():
                continue
            resource = self._read(Tier.SREP, d.name)
            if resource.status is Status.PENDING:
                out.append(resource)
        return out

    def review(self, resource_id: str, approve: bool, message: str,
               report: ValidationReport,
               requested_license: License | None = None) -> CatalogResource:
        with self._lock:
            resource = self._read(Tier.SREP, resource_id)
            if resource.status is not Status.PENDING:
                raise NotPending(f"resource {resource_id!r} is {resource.status.value}")
            if approve:
                if not report.passed:
                    raise ApproveWithFailingReport(
                        f"cannot approve {resource_id!r}: report has ERROR findings"
                    )
                requested = requested_license or resource.provenance.license
                derived = derive_crep_license(resource.provenance.license, requested)
                metadata = dict(resource.metadata)
                metadata["ds:DatLicense"] = derived.value
                metadata.setdefault("ds:DatPublicationTimestamp", _now_iso())
                promoted = replace(
                    resource,
                    tier=Tier.CREP,
                    status=Status.APPROVED,
                    provenance=replace(resource.provenance, license=derived),
                    metadata=metadata,
                    report=report,
                    message=message,
                )
                self._write(promoted)
                resource.status = Status.APPROVED
                self._write_state(resource)
                self._notify("APPROVED", resource_id, message or "quality check passed")
                return promoted
            if not message.strip():
                raise EmptyRejectionMessage(
                    "a rejection must explain its motivation"
                )
            resource.status = Status.REJECTED
            resource.message = message
            resource.report = report
            self._write_state(resource)
            (self._dir(Tier.SREP, resource_id) / "report.txt").write_text(
                report.to_text(), encoding="utf-8"
            )
            self._notify("REJECTED", resource_id, message)
            return resource

    def publish_distribution(self, crep_ids: list[str], compose: bool = False,
                             resource_id: str | None = None) -> CatalogResource:
        with self._lock:
            sources = []
            for cid in crep_ids:
                res = self._read(Tier.CREP, cid)
                if res.status is not Status.APPROVED:
                    raise NotPending(f"resource {cid!r} is not an approved content resource")
                sources.append(res)
            if not sources:
                raise UnknownResource("<empty id list>")
            if len(sources) > 1 and not compose:
                raise ValueError("publishing several resources requires compose=True")
            if compose and len(sources) > 1:
                license_ = compose_licenses([s.provenance.license for s in sources])
            else:
                license_ = sources[0].provenance.license
            rid = resource_id or f"dist-{len(list((self.root / Tier.DREP.value).iterdir())) + 1:04d}"
            if self._find(rid):
                raise DuplicateId(rid)
            head = sources[0]
            payload = head.payload if len(sources) == 1 else b"".join(
                (s.payload or b"") for s in sources
            )
            metadata = dict(head.metadata)
            metadata["ds:DatLicense"] = license_.value
            metadata.setdefault("ds:DatPublicationTimestamp", _now_iso())
            if payload is not None:
                metadata["ds:DatSize"] = len(payload)
            resource = CatalogResource(
                resource_id=rid,
                tier=Tier.DREP,
                kind=head.kind,
                intake_case=head.intake_case,
                provenance=replace(head.provenance, license=license_),
                payload=payload,
                status=Status.APPROVED,
                metadata=metadata,
                report=head.report,
                sources=tuple(s.resource_id for s in sources),
            )
            self._write(resource)
            self._notify("PUBLISHED", rid, "sources: " + ",".join(crep_ids))
            return resource

    def query(self, filters: dict | None = None) -> list[tuple[str, dict]]:
        """Approved content/distribution entries matching every predicate.

        Source-tier entries are never exposed. Deterministic order:
        publication timestamp, then resource id.
        """
        filters = filters or {}
        allowed = set(METADATA_ATTRIBUTES) | set(OPTIONAL_METADATA_ATTRIBUTES)
        for attr in filters:
            if attr not in allowed:
                raise BadFilter(f"unknown metadata attribute {attr!r}")
        rows = []
        for tier in (Tier.CREP, Tier.DREP):
            tier_dir = self.root / tier.value
            for d in sorted(tier_dir.iterdir()):
                if not d.is_dir():
                    continue
                resource = self._read(tier, d.name)
                if resource.status is not Status.APPROVED:
                    continue
                if self._matches(resource.metadata, filters):
                    rows.append((resource.resource_id, resource.metadata))
        rows.sort(key=lambda r: (str(r[1].get("ds:DatPublicationTimestamp", "")), r[0]))
        return rows

    @staticmethod
    def _matches(metadata: dict, filters: dict) -> bool:
        for attr, wanted in filters.items():
            value = metadata.get(attr)
            if isinstance(value, list):
                if wanted not in value:
                    return False
            elif value != wanted:
                return False
        return True

    def download(self, resource_id: str) -> bytes:
        for tier in (Tier.DREP, Tier.CREP, Tier.SREP):
            d = self._dir(tier, resource_id)
            if d.exists():
                for p in sorted(d.glob("payload.*")):
                    return p.read_bytes()
                raise UnknownResource(resource_id)  # virtual: URL only
        raise UnknownResource(resource_id)

    def get(self, resource_id: str, tier: Tier | None = None) -> CatalogResource:
        tiers = [tier] if tier else [Tier.DREP, Tier.CREP, Tier.SREP]
        for t in tiers:
            if self._dir(t, resource_id).exists():
                return self._read(t, resource_id)
        raise UnknownResource(resource_id)
