from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from telokit.service import create_app
from telokit.store import StoreHub

from conftest import FIXTURES, make_metadata
from quality_cases import FULL_EXTRAS

TELOKIT = [sys.executable, "-m", "telokit.cli"]


def run_cli(args, cwd, env_extra=None):
    import os

    env = dict(os.environ)
    env["SOURCE_DATE_EPOCH"] = "1706745600"
    env.update(env_extra or {})
    return subprocess.run(TELOKIT + args, cwd=cwd, env=env,
                          capture_output=True, text=True)


@pytest.fixture
def workdir(tmp_path):
    for name in ("schema_org_intermediate.csv", "schema_org_decisions.csv",
                 "datascientia_full.csv"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path


def test_usage_error_exits_2(workdir):
    proc = run_cli(["sheet", "nonsense"], workdir)
    assert proc.returncode == 2


def test_parse_full_fixture(workdir):
    proc = run_cli(["sheet", "parse", "datascientia_full.csv", "--stage", "full"], workdir)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["stage"] == "FULL"
    assert doc["rows"] == 7


def test_parse_bad_data_exits_1(workdir):
    (workdir / "bad.csv").write_text("not,a,header\n")
    proc = run_cli(["sheet", "parse", "bad.csv"], workdir)
    assert proc.returncode == 1
    assert "error:" in proc.stderr


def test_annotate_enrich_export_pipeline(workdir):
    proc = run_cli(["--data-dir", "store", "sheet", "annotate",
                    "schema_org_intermediate.csv", "--decisions",
                    "schema_org_decisions.csv"], workdir)
    assert proc.returncode == 0, proc.stderr
    partial = workdir / "schema_org_intermediate.partial.csv"
    assert partial.exists()
    assert ",-1," in partial.read_text()

    proc = run_cli(["--data-dir", "store", "sheet", "enrich", str(partial)], workdir)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["stage"] == "FULL"
    full = Path(doc["output"])
    text = full.read_text()
    first_row = text.split("\n")[1].split(",")
    assert int(first_row[2]) > 0  # provisional ids are gone

    proc = run_cli(["sheet", "export", str(full)], workdir)
    assert proc.returncode == 0
    assert proc.stdout == text


def test_cli_output_is_byte_identical_across_runs(workdir, tmp_path_factory):
    outputs = []
    for run in range(2):
        d = tmp_path_factory.mktemp(f"run{run}")
        for name in ("schema_org_intermediate.csv", "schema_org_decisions.csv"):
            shutil.copy(FIXTURES / name, d / name)
        run_cli(["--data-dir", "store", "sheet", "annotate",
                 "schema_org_intermediate.csv", "--decisions",
                 "schema_org_decisions.csv"], d)
        proc = run_cli(["--data-dir", "store", "sheet", "enrich",
                        "schema_org_intermediate.partial.csv"], d)
        assert proc.returncode == 0, proc.stderr
        outputs.append((proc.stdout,
                        (d / "schema_org_intermediate.partial.full.csv").read_bytes(),
                        (d / "store" / "concepts.tsv").read_bytes()))
    assert outputs[0] == outputs[1]


def test_enrich_via_cli_equals_service_commit(workdir):
    # CLI route
    run_cli(["--data-dir", "store", "sheet", "annotate",
             "schema_org_intermediate.csv", "--decisions",
             "schema_org_decisions.csv"], workdir)
    proc = run_cli(["--data-dir", "store", "sheet", "enrich",
                    "schema_org_intermediate.partial.csv"], workdir)
    assert proc.returncode == 0
    cli_full = (workdir / "schema_org_intermediate.partial.full.csv").read_bytes()

    # service route over a fresh store with the same initial state
    hub = StoreHub(workdir / "store2")
    client = TestClient(create_app(hub, admin_token="t"))
    resp = client.post("/sessions", json={
        "sheet_csv": (FIXTURES / "schema_org_intermediate.csv").read_text(),
        "annotator": "batch",
    })
    sid = resp.json()["session_id"]
    from telokit.sheets import parse_decisions

    for d in parse_decisions((FIXTURES / "schema_org_decisions.csv").read_bytes()):
        body = {"row_index": d.row_index, "kind": d.kind, "gid": d.gid,
                "rank": d.rank, "gloss": d.gloss}
        assert client.post(f"/sessions/{sid}/decisions", json=body).status_code == 200
    service_full = client.post(f"/sessions/{sid}/commit").json()["sheet_csv"].encode()
    assert service_full == cli_full


def test_validate_exit_codes(workdir):
    meta = workdir / "meta.json"
    meta.write_text(json.dumps(make_metadata()))
    extras = workdir / "extras.json"
    extras.write_text(json.dumps(FULL_EXTRAS))
    proc = run_cli(["validate", "namespace", "datascientia_full.csv",
                    "--metadata", "meta.json", "--extras", "extras.json"], workdir)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout == ""
    # without metadata the sheet fails the metadata rule
    proc = run_cli(["validate", "namespace", "datascientia_full.csv",
                    "--extras", "extras.json"], workdir)
    assert proc.returncode == 1
    assert "NS013\tERROR" in proc.stdout


def test_tele_build_and_coherence_roundtrip(workdir):
    # seed a store with the fixture namespace, then build a teleontology from it
    run_cli(["--data-dir", "store", "sheet", "annotate",
             "schema_org_intermediate.csv", "--decisions",
             "schema_org_decisions.csv"], workdir)
    run_cli(["--data-dir", "store", "sheet", "enrich",
             "schema_org_intermediate.partial.csv"], workdir)
    selection = {
        "domain_languages": ["eng-schema"],
        "etype_names": ["schema:Trip", "schema:BusTrip"],
        "annotations": {},
    }
    (workdir / "selection.json").write_text(json.dumps(selection))
    proc = run_cli(["--data-dir", "store", "tele", "build-lt", "selection.json",
                    "-o", "lt.owl"], workdir)
    assert proc.returncode == 0, proc.stderr
    lt_xml = (workdir / "lt.owl").read_bytes()
    assert b"schema:BusTrip_GID-" in lt_xml

    proc = run_cli(["--data-dir", "store", "tele", "check-coherence", "lt.owl"], workdir)
    assert proc.returncode == 0, proc.stdout

    proc = run_cli(["--format", "json", "tele", "convert", "lt.owl"], workdir)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["kind"] == "language"

    proc = run_cli(["--format", "owl-xml", "tele", "convert", "lt.owl"], workdir)
    assert proc.returncode == 0
    assert proc.stdout.encode() == lt_xml  # canonical re-serialization


def test_check_coherence_flags_bad_edge(workdir):
    # store with car/vehicle/organism; teleontology putting car under organism
    store = workdir / "store"
    run_cli(["--data-dir", str(store), "ukc", "stats"], workdir)  # init store
    concepts = store / "concepts.tsv"
    concepts.write_text(
        "15944\tIS_A\t25142\tfixture\t2024-01-01T00:00:00Z\n"
        "25142\tIS_A\t1\tfixture\t2024-01-01T00:00:00Z\n"
        "30001\tIS_A\t1\tfixture\t2024-01-01T00:00:00Z\n"
    )
    from telokit.owlxml import serialize_exchange
    from telokit.teleontology import KnowledgeTeleontology, QualifiedName

    kt = KnowledgeTeleontology()
    organism = QualifiedName("bio", "organism", 30001)
    car = QualifiedName("auto", "car", 15944)
    kt.etypes.add(organism)
    kt.etypes.add(car, (organism.label,))
    (workdir / "kt.owl").write_bytes(serialize_exchange(kt))
    proc = run_cli(["--data-dir", str(store), "tele", "check-coherence", "kt.owl"], workdir)
    assert proc.returncode == 1
    assert "auto:car" in proc.stdout


def test_catalog_cli_flow(workdir):
    meta = workdir / "meta.json"
    meta.write_text(json.dumps(make_metadata()))
    base = ["--data-dir", "store"]
    proc = run_cli(base + ["catalog", "intake", "--id", "ns-1",
                           "--kind", "UKC_NAMESPACE", "--case", "PROJECT",
                           "--source", "https://example.org/p", "--owner", "o@x",
                           "--timestamp", "2024-01-01T00:00:00Z", "--license", "CC-BY",
                           "--payload", "datascientia_full.csv",
                           "--metadata", "meta.json"], workdir)
    assert proc.returncode == 0, proc.stderr
    proc = run_cli(base + ["catalog", "review", "--id", "ns-1", "--approve",
                           "--message", "ok"], workdir)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["tier"] == "crep"
    proc = run_cli(base + ["catalog", "publish", "--ids", "ns-1"], workdir)
    assert proc.returncode == 0, proc.stderr
    proc = run_cli(base + ["catalog", "query"], workdir)
    assert proc.returncode == 0
    rows = json.loads(proc.stdout)
    assert {r["resource_id"] for r in rows} == {"ns-1", "dist-0001"}


def test_ukc_lookup_cli(workdir):
    run_cli(["--data-dir", "store", "sheet", "annotate",
             "schema_org_intermediate.csv", "--decisions",
             "schema_org_decisions.csv"], workdir)
    run_cli(["--data-dir", "store", "sheet", "enrich",
             "schema_org_intermediate.partial.csv"], workdir)
    proc = run_cli(["--data-dir", "store", "ukc", "lookup", "schema:Trip"], workdir)
    assert proc.returncode == 0
    hits = json.loads(proc.stdout)
    assert hits[0]["words"] == ["schema:Trip"]
    assert hits[0]["score"] == 1.0
