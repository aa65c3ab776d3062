"""HTTP facade over the stores, annotation sessions, validators and catalog.

Every response carries the store snapshot version in X-Snapshot-Version so
clients (the workbench in particular) can detect stale views. All store
writes funnel through the hub's single-writer transaction; admin-only
endpoints require the configured token.
"""

from __future__ import annotations

import base64
import binascii
import os
import secrets
import time
from pathlib import Path

from fastapi import Body, FastAPI, Header, HTTPException, Query, Request, Response
from fastapi.responses import FileResponse, JSONResponse

from . import errors as E
from .annotation import (
    enrich,
    export_namespace,
    open_session,
    record_decision,
    search_candidates,
)
from .catalog import Catalog, IntakeCase, Provenance, ResourceKind, Status, Tier
from .concepts import RelationKind, ROOT_GID, ROOT_LABEL
from .lexicon import LanguageId, LookupHit
from .licenses import parse_license
from .owlxml import parse_exchange
from .quality import (
    RuleSet,
    validate_external_schema,
    validate_knowledge_teleontology,
    validate_language_teleontology,
    validate_namespace_file,
)
from .report import Severity, ValidationReport
from .sheets import Decision, Stage, parse_sheet
from .store import StoreHub

DEFAULT_SESSION_TTL = 24 * 3600.0

_KIND_RULESET = {
    ResourceKind.UKC_NAMESPACE: RuleSet.NAMESPACE,
    ResourceKind.LANGUAGE_TELEONTOLOGY: RuleSet.LANGUAGE_TELEONTOLOGY,
    ResourceKind.KNOWLEDGE_TELEONTOLOGY: RuleSet.KNOWLEDGE_TELEONTOLOGY,
    ResourceKind.LIGHTWEIGHT_ONTOLOGY: RuleSet.EXTERNAL_SCHEMA,
    ResourceKind.TELEOLOGY: RuleSet.EXTERNAL_SCHEMA,
    ResourceKind.SCHEMA: RuleSet.EXTERNAL_SCHEMA,
    ResourceKind.EXTERNAL_NAMESPACE: RuleSet.EXTERNAL_SCHEMA,
}

_ERROR_STATUS = {
    E.BadSheet: 400,
    E.BadHeader: 400,
    E.BadRow: 400,
    E.StageMismatch: 400,
    E.EmptyGloss: 400,
    E.EmptyWordList: 400,
    E.MalformedDocument: 400,
    E.UnsupportedConstruct: 400,
    E.BadFilter: 400,
    E.MissingProvenance: 400,
    E.EmptyRejectionMessage: 400,
    E.UnknownLanguage: 404,
    E.UnknownConcept: 404,
    E.UnknownResource: 404,
    E.OutOfOrder: 409,
    E.NotPending: 409,
    E.DuplicateId: 409,
    E.ApproveWithFailingReport: 409,
    E.UndecidedRows: 409,
    E.SynsetExists: 409,
    E.LicenseDowngrade: 409,
    E.IncompatibleComposition: 409,
    E.CycleError: 409,
    E.UnresolvedParent: 422,
    E.TransactionAborted: 500,
}


def _http_error(exc: E.TelokitError) -> HTTPException:
    for cls in type(exc).__mro__:
        if cls in _ERROR_STATUS:
            return HTTPException(_ERROR_STATUS[cls], detail=str(exc))
    return HTTPException(500, detail=str(exc))


class SessionRegistry:
    def __init__(self, ttl: float = DEFAULT_SESSION_TTL):
        self.ttl = ttl
        self._sessions: dict[str, tuple[object, float]] = {}

    def put(self, session) -> None:
        self._sessions[session.session_id] = (session, time.time() + self.ttl)

    def get(self, session_id: str):
        entry = self._sessions.get(session_id)
        if entry is None:
            raise HTTPException(404, detail=f"unknown session {session_id!r}")
        session, expiry = entry
        if time.time() > expiry:
            del self._sessions[session_id]
            raise HTTPException(410, detail="session expired")
        return session

    def drop(self, session_id: str) -> None:
        self._sessions.pop(session_id, None)


def _hit_json(hub: StoreHub, hit: LookupHit) -> dict:
    entry = hit.entry
    is_gap = hit.is_gap
    breadcrumb = []
    node = hit.gid
    seen = {node}
    while True:
        parents = hub.core.parents_of(node, RelationKind.IS_A)
        if not parents:
            break
        node = min(parents)
        if node in seen:
            break
        seen.add(node)
        if node == ROOT_GID:
            breadcrumb.append(ROOT_LABEL)
            break
        words = None
        for language in hub.lexicon.languages():
            found = hub.lexicon.entry_for(language, node)
            if found is not None and hasattr(found, "words"):
                words = found.words[0]
                break
        breadcrumb.append(words or str(node))
    return {
        "gid": hit.gid,
        "score": hit.score,
        "is_gap": is_gap,
        "words": [] if is_gap else list(entry.words),
        "gloss": entry.gloss,
        "language": entry.language.key,
        "breadcrumb": breadcrumb,
    }


def validate_payload(ruleset: RuleSet, content: bytes, extras: dict | None,
                     metadata: dict | None) -> ValidationReport:
    if ruleset is RuleSet.NAMESPACE:
        return validate_namespace_file(content, extras=extras, metadata=metadata)
    t = parse_exchange(content)
    if ruleset is RuleSet.LANGUAGE_TELEONTOLOGY:
        return validate_language_teleontology(t, metadata=metadata)
    if ruleset is RuleSet.KNOWLEDGE_TELEONTOLOGY:
        return validate_knowledge_teleontology(t, metadata=metadata)
    return validate_external_schema(t, metadata=metadata)


def report_for_resource(resource) -> ValidationReport:
    """Server-side quality report for a pending resource."""
    if resource.payload is None:  # virtual copy: only metadata can be checked
        report = ValidationReport(resource.resource_id)
        from .catalog import metadata_missing

        missing = metadata_missing(resource.metadata)
        if missing:
            report.add("NS013", Severity.ERROR, "resource",
                       "catalog metadata incomplete, missing: " + ", ".join(missing))
        return report.finish()
    try:
        report = validate_payload(
            _KIND_RULESET[resource.kind], resource.payload, None, resource.metadata
        )
    except E.TelokitError as exc:
        report = ValidationReport(resource.resource_id)
        report.add("XS000", Severity.ERROR, "file", f"payload does not parse: {exc}")
        return report.finish()
    report.resource_id = resource.resource_id
    return report


def create_app(hub: StoreHub, catalog: Catalog | None = None,
               admin_token: str | None = None, ui_dir: str | Path | None = None,
               session_ttl: float = DEFAULT_SESSION_TTL) -> FastAPI:
    app = FastAPI(title="telokit", version="0.1.0")
    catalog = catalog or Catalog(hub.catalog_dir)
    sessions = SessionRegistry(ttl=session_ttl)
    admin_token = admin_token or os.environ.get("TELOKIT_ADMIN_TOKEN") or secrets.token_urlsafe(16)
    ui_path = Path(ui_dir) if ui_dir else None

    @app.middleware("http")
    async def snapshot_version(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Snapshot-Version"] = str(hub.version)
        return response

    @app.exception_handler(E.TelokitError)
    async def telokit_error(request: Request, exc: E.TelokitError):
        http = _http_error(exc)
        return JSONResponse(
            status_code=http.status_code,
            content={"detail": http.detail, "error": type(exc).__name__},
            headers={"X-Snapshot-Version": str(hub.version)},
        )

    def require_admin(token: str | None) -> None:
        if token != admin_token:
            raise HTTPException(401, detail="admin token required")

    # -- lookup and sessions -------------------------------------------------

    @app.get("/lookup")
    def lookup(lang: str = Query(default=None), lemma: str = Query(...),
               fuzzy: bool = Query(default=True)):
        language = LanguageId.from_key(lang) if lang else hub.default_language
        hits = hub.lexicon.lookup(language, lemma, fuzzy=fuzzy)
        return {"lemma": lemma, "language": language.key,
                "candidates": [_hit_json(hub, h) for h in hits]}

    @app.post("/sessions")
    def open_annotation_session(body: dict = Body(...)):
        sheet_csv = body.get("sheet_csv", "")
        annotator = body.get("annotator", "")
        if not annotator:
            raise HTTPException(400, detail="annotator reference required")
        try:
            sheet = parse_sheet(sheet_csv, Stage.INTERMEDIATE)
        except (E.BadHeader, E.BadRow, E.StageMismatch) as exc:
            raise E.BadSheet(str(exc)) from None
        session = open_session(sheet, annotator)
        sessions.put(session)
        return {"session_id": session.session_id, "cursor": 0,
                "rows": len(sheet.rows), "prefix": sheet.prefix}

    def _cursor_payload(session) -> dict:
        payload = {
            "session_id": session.session_id,
            "cursor": session.cursor,
            "rows": len(session.sheet.rows),
            "stage": session.sheet.stage.value,
            "done": session.done,
        }
        if not session.done:
            row = session.sheet.rows[session.cursor]
            payload["row"] = {
                "cased_word_lemma": row.cased_word_lemma,
                "gloss_hint": row.gloss,
                "pos": row.pos,
                "parent_lemma": row.parent_lemma,
                "parent_gid": row.parent_gid,
                "relation": row.relation.value if row.relation else None,
            }
        return payload

    @app.get("/sessions/{session_id}/cursor")
    def session_cursor(session_id: str):
        return _cursor_payload(sessions.get(session_id))

    @app.get("/sessions/{session_id}/candidates")
    def session_candidates(session_id: str, fuzzy: bool = Query(default=True)):
        session = sessions.get(session_id)
        row = session.current_row()
        hits = search_candidates(session, hub.lexicon, hub.default_language,
                                 row.cased_word_lemma, fuzzy=fuzzy)
        return {"cursor": session.cursor, "lemma": row.cased_word_lemma,
                "candidates": [_hit_json(hub, h) for h in hits]}

    @app.post("/sessions/{session_id}/decisions")
    def post_decision(session_id: str, body: dict = Body(...)):
        session = sessions.get(session_id)
        decision = Decision(
            row_index=int(body.get("row_index", session.cursor)),
            kind=str(body.get("kind", "")).upper(),
            gid=body.get("gid"),
            rank=body.get("rank"),
            gloss=body.get("gloss"),
        )
        row = record_decision(session, decision, hub.core)
        return {"row": {
            "cased_word_lemma": row.cased_word_lemma,
            "concept_id": row.concept_id,
            "gloss": row.gloss,
            "word_sense_rank": row.word_sense_rank,
        }, **_cursor_payload(session)}

    @app.post("/sessions/{session_id}/commit")
    def commit_session(session_id: str):
        session = sessions.get(session_id)
        if not session.done:
            raise E.UndecidedRows(
                f"{len(session.sheet.rows) - session.cursor} rows undecided"
            )
        with hub.write():
            full, minted = enrich(session.sheet, hub.core, hub.lexicon,
                                  base_language=hub.default_language)
        sessions.drop(session_id)
        return {
            "sheet_csv": export_namespace(full).decode("utf-8"),
            "minted": {str(k): v for k, v in sorted(minted.items(), reverse=True)},
            "stage": full.stage.value,
        }

    # -- validation ------------------------------------------------------------

    @app.post("/validate/{ruleset}")
    def validate(ruleset: str, body: dict = Body(...)):
        try:
            rs = RuleSet(ruleset)
        except ValueError:
            raise HTTPException(404, detail=f"unknown ruleset {ruleset!r}") from None
        content = body.get("content", "").encode("utf-8")
        report = validate_payload(rs, content, body.get("extras"), body.get("metadata"))
        return JSONResponse(content=_report_json(report))

    # -- catalog -----------------------------------------------------------------

    @app.get("/catalog")
    def query_catalog(request: Request,
                      x_admin_token: str | None = Header(default=None)):
        params = dict(request.query_params)
        status = params.pop("status", None)
        if status and status.upper() == "PENDING":
            require_admin(x_admin_token)
            out = []
            for resource in catalog.pending():
                report = report_for_resource(resource)
                out.append({
                    "resource_id": resource.resource_id,
                    "kind": resource.kind.value,
                    "intake_case": resource.intake_case.value,
                    "metadata": resource.metadata,
                    "report": _report_json(report),
                })
            return {"pending": out}
        results = catalog.query(params)
        return {"results": [
            {"resource_id": rid, "metadata": metadata} for rid, metadata in results
        ]}

    @app.post("/catalog/intake")
    def catalog_intake(body: dict = Body(...)):
        prov_doc = body.get("provenance") or {}
        try:
            provenance = Provenance(
                source=prov_doc.get("source", ""),
                owner=prov_doc.get("owner", ""),
                timestamp=prov_doc.get("timestamp", ""),
                license=parse_license(prov_doc.get("license", "")),
            )
        except ValueError as exc:
            raise E.MissingProvenance(str(exc)) from None
        payload = None
        if body.get("payload_b64") is not None:
            try:
                payload = base64.b64decode(body["payload_b64"], validate=True)
            except binascii.Error as exc:
                raise HTTPException(400, detail=f"bad payload_b64: {exc}") from None
        try:
            kind = ResourceKind(body.get("kind", ""))
            case = IntakeCase(body.get("case", ""))
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc)) from None
        try:
            resource = catalog.intake(
                body.get("resource_id", ""), kind, case, provenance,
                payload=payload, metadata=body.get("metadata") or {},
            )
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc)) from None
        return {"resource_id": resource.resource_id, "tier": resource.tier.value,
                "status": resource.status.value}

    @app.post("/catalog/{resource_id}/review")
    def catalog_review(resource_id: str, body: dict = Body(...),
                       x_admin_token: str | None = Header(default=None)):
        require_admin(x_admin_token)
        resource = catalog.get(resource_id, Tier.SREP)
        report = report_for_resource(resource)
        requested = body.get("requested_license")
        reviewed = catalog.review(
            resource_id,
            approve=bool(body.get("approve")),
            message=body.get("message", ""),
            report=report,
            requested_license=parse_license(requested) if requested else None,
        )
        return {"resource_id": reviewed.resource_id, "tier": reviewed.tier.value,
                "status": reviewed.status.value, "message": reviewed.message,
                "license": reviewed.provenance.license.value,
                "report": _report_json(report)}

    @app.post("/catalog/publish")
    def catalog_publish(body: dict = Body(...),
                        x_admin_token: str | None = Header(default=None)):
        require_admin(x_admin_token)
        resource = catalog.publish_distribution(
            list(body.get("crep_ids", ())),
            compose=bool(body.get("compose")),
            resource_id=body.get("resource_id"),
        )
        return {"resource_id": resource.resource_id, "tier": resource.tier.value,
                "license": resource.provenance.license.value,
                "sources": list(resource.sources)}

    @app.get("/catalog/{resource_id}/download")
    def catalog_download(resource_id: str,
                         x_admin_token: str | None = Header(default=None)):
        if x_admin_token == admin_token:
            data = catalog.download(resource_id)
        else:
            resource = catalog.get(resource_id)
            if resource.tier is Tier.SREP or resource.status is not Status.APPROVED:
                raise E.UnknownResource(resource_id)  # source tier is never exposed
            data = resource.payload or b""
        return Response(content=data, media_type="application/octet-stream")

    # -- store introspection -------------------------------------------------------

    @app.get("/stats")
    def stats():
        return hub.stats()

    # -- workbench assets -----------------------------------------------------------

    if ui_path and ui_path.exists():
        @app.get("/ui")
        @app.get("/ui/{asset_path:path}")
        def ui(asset_path: str = ""):
            target = (ui_path / asset_path) if asset_path else (ui_path / "index.html")
            target = target.resolve()
            if not str(target).startswith(str(ui_path.resolve())) or not target.is_file():
                raise HTTPException(404, detail="no such asset")
            return FileResponse(target)

    return app


def _report_json(report: ValidationReport) -> dict:
    return {
        "resource_id": report.resource_id,
        "passed": report.passed,
        "findings": [
            {"rule_id": f.rule_id, "severity": f.severity.value,
             "locator": f.locator, "message": f.message}
            for f in report.findings
        ],
    }


def serve(data_dir: str, bind: str = "127.0.0.1:8765", admin_token: str | None = None,
          ui_dir: str | None = None, default_language: str = "eng") -> None:
    import uvicorn

    hub = StoreHub(data_dir, default_language=default_language)
    app = create_app(hub, admin_token=admin_token, ui_dir=ui_dir)
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765), log_level="warning")
