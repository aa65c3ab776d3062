"""Command line entry point, ordered language -> knowledge -> catalog.

Exit codes: 0 success, 1 validation errors or data errors, 2 usage errors.
All machine-readable output is byte-deterministic for golden-file testing.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import errors as E
from .annotation import enrich, export_namespace, open_session, replay_decisions
from .catalog import Catalog, IntakeCase, Provenance, ResourceKind
from .lexicon import LanguageId
from .licenses import parse_license
from .owlxml import parse_exchange, serialize_exchange
from .quality import RuleSet
from .report import ValidationReport
from .sheets import Stage, parse_decisions, parse_sheet
from .store import StoreHub
from .teleontology import (
    Axiom,
    AxiomKind,
    KnowledgeTeleontology,
    LanguageTeleontology,
    NameSelection,
    build_knowledge_teleontology,
    build_language_teleontology,
    check_concept_coherence,
)

_STAGES = {s.value.lower(): s for s in Stage}


def _jdump(doc) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2)


def _hub(ctx) -> StoreHub:
    if ctx.obj.get("hub") is None:
        ctx.obj["hub"] = StoreHub(ctx.obj["data_dir"], default_language=ctx.obj["lang"])
    return ctx.obj["hub"]


def _report_out(report: ValidationReport, fmt: str) -> None:
    if fmt == "json":
        click.echo(report.to_json())
    else:
        click.echo(report.to_text(), nl=False)


def _exit_for(report: ValidationReport) -> None:
    if not report.passed:
        sys.exit(1)


@click.group()
@click.option("--data-dir", default="./telokit-data", show_default=True,
              help="Store root directory.")
@click.option("--lang", default="eng", show_default=True,
              help="Default natural language (ISO3).")
@click.option("--base-iri", default="http://knowdive.disi.unitn.it/etype#",
              show_default=True, help="Base IRI for exchange files.")
@click.option("--format", "fmt", default="text",
              type=click.Choice(["text", "json", "csv", "owl-xml"]),
              help="Output format where applicable.")
@click.pass_context
def main(ctx, data_dir, lang, base_iri, fmt):
    ctx.ensure_object(dict)
    ctx.obj.update(data_dir=data_dir, lang=lang, base_iri=base_iri, fmt=fmt, hub=None)


# --- sheet ---------------------------------------------------------------------

@main.group()
def sheet():
    """Annotation spreadsheet pipeline."""


@sheet.command("parse")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--stage", type=click.Choice(sorted(_STAGES)), default=None,
              help="Fail unless the sheet is in this stage.")
def sheet_parse(file, stage):
    data = Path(file).read_bytes()
    parsed = parse_sheet(data, _STAGES[stage] if stage else None)
    click.echo(_jdump({
        "stage": parsed.stage.value,
        "rows": len(parsed.rows),
        "prefix": parsed.prefix,
        "lemmas": [r.cased_word_lemma for r in parsed.rows],
    }))


@sheet.command("annotate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--decisions", "decisions_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV replay file: row_index,kind,gid_or_gloss,rank.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def sheet_annotate(ctx, file, decisions_file, output):
    data = Path(file).read_bytes()
    parsed = parse_sheet(data, Stage.INTERMEDIATE)
    decisions = parse_decisions(Path(decisions_file).read_bytes())
    hub = _hub(ctx)
    session = open_session(parsed, annotator="batch")
    partial = replay_decisions(session, decisions, hub.core)
    out = Path(output) if output else Path(file).with_suffix(".partial.csv")
    from .sheets import serialize_sheet

    out.write_bytes(serialize_sheet(partial))
    click.echo(_jdump({"output": str(out), "stage": partial.stage.value}))


@sheet.command("enrich")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def sheet_enrich(ctx, file, output):
    data = Path(file).read_bytes()
    parsed = parse_sheet(data, Stage.PARTIAL)
    hub = _hub(ctx)
    with hub.write():
        full, minted = enrich(parsed, hub.core, hub.lexicon,
                              base_language=hub.default_language)
    out = Path(output) if output else Path(file).with_suffix(".full.csv")
    out.write_bytes(export_namespace(full))
    click.echo(_jdump({
        "output": str(out),
        "stage": full.stage.value,
        "minted": {str(k): v for k, v in sorted(minted.items(), reverse=True)},
    }))


@sheet.command("export")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def sheet_export(file, output):
    """Re-serialize a FULL sheet in canonical bytes."""
    parsed = parse_sheet(Path(file).read_bytes(), Stage.FULL)
    payload = export_namespace(parsed)
    if output:
        Path(output).write_bytes(payload)
        click.echo(_jdump({"output": output, "bytes": len(payload)}))
    else:
        click.echo(payload.decode("utf-8"), nl=False)


# --- ukc -----------------------------------------------------------------------

@main.group()
def ukc():
    """Concept and lexicon store queries."""


@ukc.command("lookup")
@click.argument("lemma")
@click.option("--fuzzy/--no-fuzzy", default=True, show_default=True)
@click.option("--language", "language_key", default=None,
              help="Language key (e.g. eng or eng-osm); defaults to --lang.")
@click.pass_context
def ukc_lookup(ctx, lemma, fuzzy, language_key):
    hub = _hub(ctx)
    language = LanguageId.from_key(language_key) if language_key else hub.default_language
    hits = hub.lexicon.lookup(language, lemma, fuzzy=fuzzy)
    click.echo(_jdump([
        {
            "gid": h.gid,
            "score": round(h.score, 6),
            "is_gap": h.is_gap,
            "words": [] if h.is_gap else list(h.entry.words),
            "gloss": h.entry.gloss,
        }
        for h in hits
    ]))


@ukc.command("stats")
@click.pass_context
def ukc_stats(ctx):
    click.echo(_jdump(_hub(ctx).stats()))


# --- tele ----------------------------------------------------------------------

@main.group()
def tele():
    """Teleontology construction and checking."""


def _teleontology_json(t) -> dict:
    doc = {
        "kind": "language" if isinstance(t, LanguageTeleontology) else "knowledge",
        "base_iri": t.base_iri,
        "annotations": {k: [list(p) for p in v] for k, v in sorted(t.annotations.items())},
    }
    for section, h in t.hierarchies().items():
        doc[section] = {
            label: {"gid": h.nodes[label].gid, "parents": sorted(h.parents[label])}
            for label in sorted(h.nodes)
        }
    if isinstance(t, KnowledgeTeleontology):
        doc["axioms"] = [
            {"subject": a.subject, "kind": a.kind.value,
             "prop": a.prop, "filler": list(a.filler)}
            for a in t.axioms
        ]
    return doc


@tele.command("build-lt")
@click.argument("selection_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def tele_build_lt(ctx, selection_file, output):
    """Build a language teleontology from a JSON selection of names."""
    doc = json.loads(Path(selection_file).read_text(encoding="utf-8"))
    hub = _hub(ctx)
    languages = [LanguageId.from_key(k) for k in doc.get("domain_languages", [])] or \
        hub.lexicon.languages()
    selection = NameSelection(
        etype_names=tuple(doc.get("etype_names", ())),
        object_property_names=tuple(doc.get("object_property_names", ())),
        data_property_names=tuple(doc.get("data_property_names", ())),
    )
    annotations = {
        label: [tuple(pair) for pair in pairs]
        for label, pairs in doc.get("annotations", {}).items()
    }
    lt = build_language_teleontology(
        hub.lexicon, hub.core, languages, selection,
        annotations=annotations, base_iri=ctx.obj["base_iri"],
    )
    Path(output).write_bytes(serialize_exchange(lt))
    click.echo(_jdump({"output": output, "names": sorted(lt.labels())}))


@tele.command("build-kt")
@click.argument("lt_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--axioms", "axioms_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def tele_build_kt(lt_file, axioms_file, output):
    """Define a knowledge teleontology over a language teleontology."""
    lt = parse_exchange(Path(lt_file).read_bytes())
    if not isinstance(lt, LanguageTeleontology):
        raise E.StageMismatch("build-kt starts from a language teleontology file")
    doc = json.loads(Path(axioms_file).read_text(encoding="utf-8"))
    axioms = [
        Axiom(subject=a["subject"], kind=AxiomKind(a["kind"]),
              filler=tuple(a["filler"]), prop=a.get("prop"))
        for a in doc.get("axioms", ())
    ]
    names = set(doc["names"]) if doc.get("names") else None
    kt = build_knowledge_teleontology(lt, axioms, names=names)
    Path(output).write_bytes(serialize_exchange(kt))
    click.echo(_jdump({"output": output, "axioms": len(kt.axioms)}))


@tele.command("check-coherence")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def tele_check_coherence(ctx, file):
    t = parse_exchange(Path(file).read_bytes())
    hub = _hub(ctx)
    report = check_concept_coherence(t, hub.core)
    _report_out(report, ctx.obj["fmt"] if ctx.obj["fmt"] == "json" else "text")
    _exit_for(report)


@tele.command("convert")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def tele_convert(ctx, file, output):
    """Convert between the exchange XML and a JSON dump (set --format)."""
    t = parse_exchange(Path(file).read_bytes())
    fmt = ctx.obj["fmt"]
    if fmt == "json":
        payload = (_jdump(_teleontology_json(t)) + "\n").encode("utf-8")
    else:
        payload = serialize_exchange(t)
    if output:
        Path(output).write_bytes(payload)
        click.echo(_jdump({"output": output, "bytes": len(payload)}))
    else:
        click.echo(payload.decode("utf-8"), nl=False)


# --- validate --------------------------------------------------------------------

@main.command("validate")
@click.argument("ruleset", type=click.Choice([rs.value for rs in RuleSet]))
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--metadata", "metadata_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Catalog metadata JSON to check alongside the file.")
@click.option("--extras", "extras_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sheet extras JSON (validator/timestamp/notes).")
@click.pass_context
def validate_cmd(ctx, ruleset, file, metadata_file, extras_file):
    """Run a quality-gate checklist over a resource file."""
    from .service import validate_payload

    metadata = json.loads(Path(metadata_file).read_text(encoding="utf-8")) if metadata_file else None
    extras = json.loads(Path(extras_file).read_text(encoding="utf-8")) if extras_file else None
    report = validate_payload(RuleSet(ruleset), Path(file).read_bytes(), extras, metadata)
    _report_out(report, "json" if ctx.obj["fmt"] == "json" else "text")
    _exit_for(report)


# --- catalog ---------------------------------------------------------------------

@main.group()
def catalog():
    """Three-tier resource catalog."""


def _catalog(ctx) -> Catalog:
    return Catalog(_hub(ctx).catalog_dir)


@catalog.command("intake")
@click.option("--id", "resource_id", required=True)
@click.option("--kind", required=True, type=click.Choice([k.value for k in ResourceKind]))
@click.option("--case", required=True, type=click.Choice([c.value for c in IntakeCase]))
@click.option("--source", required=True, help="Project name or URL.")
@click.option("--owner", required=True)
@click.option("--timestamp", required=True)
@click.option("--license", "license_name", required=True)
@click.option("--payload", "payload_file", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--metadata", "metadata_file", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.pass_context
def catalog_intake(ctx, resource_id, kind, case, source, owner, timestamp,
                   license_name, payload_file, metadata_file):
    cat = _catalog(ctx)
    provenance = Provenance(source, owner, timestamp, parse_license(license_name))
    payload = Path(payload_file).read_bytes() if payload_file else None
    metadata = json.loads(Path(metadata_file).read_text(encoding="utf-8")) if metadata_file else {}
    resource = cat.intake(resource_id, ResourceKind(kind), IntakeCase(case),
                          provenance, payload=payload, metadata=metadata)
    click.echo(_jdump({"resource_id": resource.resource_id,
                       "tier": resource.tier.value, "status": resource.status.value}))


@catalog.command("review")
@click.option("--id", "resource_id", required=True)
@click.option("--approve/--reject", required=True)
@click.option("--message", default="")
@click.option("--requested-license", default=None)
@click.pass_context
def catalog_review(ctx, resource_id, approve, message, requested_license):
    from .catalog import Tier
    from .service import report_for_resource

    cat = _catalog(ctx)
    resource = cat.get(resource_id, Tier.SREP)
    report = report_for_resource(resource)
    reviewed = cat.review(resource_id, approve, message, report,
                          requested_license=parse_license(requested_license)
                          if requested_license else None)
    click.echo(_jdump({"resource_id": reviewed.resource_id,
                       "tier": reviewed.tier.value, "status": reviewed.status.value,
                       "license": reviewed.provenance.license.value}))


@catalog.command("publish")
@click.option("--ids", required=True, help="Comma-separated content-tier ids.")
@click.option("--compose/--single", default=False)
@click.option("--id", "resource_id", default=None)
@click.pass_context
def catalog_publish(ctx, ids, compose, resource_id):
    cat = _catalog(ctx)
    resource = cat.publish_distribution(
        [i for i in ids.split(",") if i], compose=compose, resource_id=resource_id,
    )
    click.echo(_jdump({"resource_id": resource.resource_id,
                       "license": resource.provenance.license.value,
                       "sources": list(resource.sources)}))


@catalog.command("query")
@click.option("--filter", "filters", multiple=True, metavar="ATTR=VALUE")
@click.pass_context
def catalog_query(ctx, filters):
    cat = _catalog(ctx)
    predicate = {}
    for f in filters:
        attr, _, value = f.partition("=")
        predicate[attr] = value
    rows = cat.query(predicate)
    click.echo(_jdump([
        {"resource_id": rid, "metadata": metadata} for rid, metadata in rows
    ]))


# --- serve -----------------------------------------------------------------------

@main.command("serve")
@click.option("--bind", default="127.0.0.1:8765", show_default=True)
@click.option("--admin-token", default=None, envvar="TELOKIT_ADMIN_TOKEN")
@click.option("--ui-dir", default=None, envvar="TELOKIT_UI_DIR",
              type=click.Path(file_okay=False))
@click.pass_context
def serve_cmd(ctx, bind, admin_token, ui_dir):
    """Run the HTTP service over this data directory."""
    from .service import serve

    serve(ctx.obj["data_dir"], bind=bind, admin_token=admin_token,
          ui_dir=ui_dir, default_language=ctx.obj["lang"])


def run(argv: list[str] | None = None) -> int:
    """Programmatic entry point returning the exit code."""
    try:
        main.main(args=argv, standalone_mode=False, obj={})
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except (E.TelokitError, ValueError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


def cli_main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    cli_main()
