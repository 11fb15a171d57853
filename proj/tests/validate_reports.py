#!/usr/bin/env python3
"""Run orlicz_lab on every sample config, validate all reports against the
published schema, and check that reruns are byte-identical."""

import argparse
import filecmp
import json
import shutil
import subprocess
import sys
from pathlib import Path

import jsonschema

KINDS = ("check-nfunction", "solve", "truncate-sequence", "moser-bound", "verify", "suite")


def run_kind_of(config: Path) -> str:
    for line in config.read_text().splitlines():
        key, _, value = line.partition("=")
        if key.strip() == "kind" and value.strip() in KINDS:
            return value.strip()
    raise ValueError(f"{config}: no run kind")


def run(cli: str, kind: str, config: Path, out: Path) -> int:
    proc = subprocess.run([cli, kind, "--config", str(config), "--out", str(out)],
                          capture_output=True, text=True)
    if proc.returncode not in (0, 3):
        sys.stderr.write(proc.stdout + proc.stderr)
    return proc.returncode


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema", required=True, type=Path)
    ap.add_argument("--configs", required=True, type=Path)
    ap.add_argument("--work", required=True, type=Path)
    args = ap.parse_args()

    schema = json.loads(args.schema.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    if args.work.exists():
        shutil.rmtree(args.work)
    args.work.mkdir(parents=True)
    failures = []

    configs = sorted(args.configs.glob("*.ini"))
    statuses = {}
    for cfg in configs:
        kind = run_kind_of(cfg)
        for rep in ("a", "b"):
            statuses[(cfg.stem, rep)] = run(args.cli, kind, cfg.resolve(), args.work / rep / cfg.stem)
        if statuses[(cfg.stem, "a")] != 0:
            failures.append(f"{cfg.name}: exit {statuses[(cfg.stem, 'a')]}")

    # verify runs pair a stored field with a stored bound
    pairs = {"verify_solve_vs_moser": ("solve_plaplace_square", "moser_square"),
             "verify_moser_self": ("moser_square", "moser_square")}
    for name, (field_run, bound_run) in pairs.items():
        field = (args.work / "a" / field_run / "field.csv").resolve()
        bound = (args.work / "a" / bound_run / "report.json").resolve()
        if not field.exists() or not bound.exists():
            failures.append(f"{name}: missing inputs")
            continue
        cfg = args.work / f"{name}.ini"
        cfg.write_text(f"[run]\nkind = verify\n\n[verify]\nfield = {field}\nbound = {bound}\n")
        for rep in ("a", "b"):
            run(args.cli, "verify", cfg, args.work / rep / name)
        report = json.loads((args.work / "a" / name / "report.json").read_text())
        if report.get("dominates") is not True:
            failures.append(f"{name}: bound not dominating")

    # error envelope: kind mismatch and malformed config
    bad = args.work / "bad_duplicate.ini"
    bad.write_text("[run]\nkind = solve\nkind = solve\n")
    for rep in ("a", "b"):
        code = run(args.cli, "solve", bad, args.work / rep / "bad_duplicate")
        if code != 2:
            failures.append(f"bad_duplicate: expected exit 2, got {code}")
    mismatch = sorted(args.configs.glob("check_*.ini"))[0].resolve()
    for rep in ("a", "b"):
        run(args.cli, "solve", mismatch, args.work / rep / "bad_kind")

    checked = 0
    for doc in sorted((args.work / "a").rglob("*.json")):
        if doc.name not in ("report.json", "error.json"):
            continue
        data = json.loads(doc.read_text())
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        for e in errors:
            failures.append(f"{doc.relative_to(args.work)}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        twin = args.work / "b" / doc.relative_to(args.work / "a")
        if not twin.exists() or not filecmp.cmp(doc, twin, shallow=False):
            failures.append(f"{doc.relative_to(args.work)}: rerun differs")
        checked += 1

    error_docs = list((args.work / "a").rglob("error.json"))
    if len(error_docs) < 2:
        failures.append(f"expected 2 error.json documents, found {len(error_docs)}")

    for f in failures:
        print("FAIL", f)
    print(f"validated {checked} documents, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
