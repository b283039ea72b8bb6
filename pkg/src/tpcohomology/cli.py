"""Command-line front end: ``tpcoh {verify,cohomology,obstructions,layers}``.

Exit status is 0 when every executed check passes, 1 when some check fails and
2 for configuration or catalog errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .catalog import (
    CatalogEntry,
    available_entries,
    closed_form_assembly,
    load_entry,
    tangential_homotopy,
    verify_entry,
)
from .cohomology import TruncationSpec, is_exact, truncated_dimensions
from .errors import CatalogLoadError, ConfigError, HypothesisFailure, QuadratureFailure, TPError
from .grammar import format_tensor
from .obstruction import entry_obstructions, evaluate_obstruction, independence_certificate, matches_expectation
from .sampling import random_poly
from .schouten import sigma
from .stratification import declared_separation, layer_rows

DEFAULT_SEED = 20240601
TRUNCATION_CAVEAT = "dimensions of a finite window; they bound nothing about the full space"


@dataclass
class RunConfig:
    entries: list = field(default_factory=lambda: ["all"])
    max_degree: int = 2
    denom_exp: list = field(default_factory=lambda: [1])
    slack: int = 2
    alphas: list | None = None
    grid: list | None = None
    seed: int = DEFAULT_SEED
    format: str = "text"
    out: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.max_degree < 0 or self.slack < 0 or any(e < 0 for e in self.denom_exp):
            raise ConfigError("truncation parameters must be non-negative")
        if self.grid is not None and any(b >= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("grid must be strictly decreasing")
        if self.format not in ("text", "json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")

    def truncation(self, entry: CatalogEntry) -> TruncationSpec:
        e = self.denom_exp
        n = entry.ring.ndens
        exps = tuple(e) if len(e) == n else (e[0],) * n
        return TruncationSpec(self.max_degree, exps)


def _numbers(text: str, kind=float) -> list:
    return [kind(t) for t in str(text).replace(" ", "").split(",") if t]


def _param_pairs(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"parameter override {item!r} is not name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = Fraction(v.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--entry", action="append", help="catalog entry or alias; repeatable; 'all' for every entry")
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--max-degree", type=int)
    common.add_argument("--denom-exp", help="denominator exponent, or comma list per denominator")
    common.add_argument("--slack", type=int)
    common.add_argument("--alphas", help="comma list of exponents for power families")
    common.add_argument("--grid", help="comma list of decreasing positive parameters")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["text", "json", "csv"])
    common.add_argument("--out", help="directory for per-entry report files")
    common.add_argument("--param", action="append", help="override an entry parameter, e.g. tau=3")

    parser = argparse.ArgumentParser(prog="tpcoh", description="Tangential Poisson cohomology toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="structural checks for catalog entries")
    sub.add_parser("cohomology", parents=[common], help="truncated cohomology reports")
    sub.add_parser("obstructions", parents=[common], help="obstruction integrals and divergence verdicts")
    sub.add_parser("layers", parents=[common], help="jump sets at sample points (CSV)")
    sub.add_parser("list", help="list catalog entries")
    return parser


_CONFIG_KEYS = {"entry", "max_degree", "denom_exp", "slack", "alphas", "grid", "seed", "format", "out", "params"}
_CONFIG_ALIASES = {"entries": "entry", "denom_exponents": "denom_exp"}


def config_from_args(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    data = {_CONFIG_ALIASES.get(k, k): v for k, v in data.items()}
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    cfg = RunConfig()
    if "entry" in data:
        cfg.entries = data["entry"] if isinstance(data["entry"], list) else [data["entry"]]
    for key in ("max_degree", "slack", "seed", "format", "out"):
        if key in data:
            setattr(cfg, key, data[key])
    if "denom_exp" in data:
        d = data["denom_exp"]
        cfg.denom_exp = list(d) if isinstance(d, list) else [d]
    if "alphas" in data:
        cfg.alphas = [float(a) for a in data["alphas"]]
    if "grid" in data:
        cfg.grid = [float(g) for g in data["grid"]]
    if "params" in data:
        cfg.params = {k: Fraction(str(v)) for k, v in data["params"].items()}

    if args.entry:
        cfg.entries = args.entry
    if args.max_degree is not None:
        cfg.max_degree = args.max_degree
    if args.denom_exp is not None:
        cfg.denom_exp = _numbers(args.denom_exp, int)
    if args.slack is not None:
        cfg.slack = args.slack
    if args.alphas is not None:
        cfg.alphas = _numbers(args.alphas)
    if args.grid is not None:
        cfg.grid = _numbers(args.grid)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.format = args.format
    if args.out is not None:
        cfg.out = args.out
    cfg.params.update(_param_pairs(args.param))
    cfg.validate()
    return cfg


def _entries(cfg: RunConfig) -> list:
    names = available_entries() if "all" in cfg.entries else cfg.entries
    return [load_entry(n, cfg.params or None) for n in names]


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["params"] = {k: str(v) for k, v in cfg.params.items()}
    return d


# -- commands ---------------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> tuple:
    reports = []
    ok = True
    for entry in _entries(cfg):
        rep = verify_entry(entry, seed=cfg.seed)
        ok = ok and rep.ok
        reports.append(rep.to_dict())
    return ok, reports


def _homotopy_samples(entry: CatalogEntry, seed: int) -> dict:
    spec = entry.raw["homotopy"]
    var = spec["variable"] - 1
    n = spec.get("samples", 5)
    rng = random.Random(seed)
    rows = []
    for _ in range(n):
        phi = entry.ring(random_poly(rng, entry.dimension, 3))
        B = tangential_homotopy(entry.ps, phi, var)
        target = entry.ps.bivector * phi
        exact = sigma(entry.ps, B) == target and entry.splitting.tangential_part(B) == B
        rows.append({"cocycle": format_tensor(target), "witness": format_tensor(B), "exact": exact})
    return {"claim": entry.claim("tp-h2-zero"), "samples": rows, "all_exact": all(r["exact"] for r in rows)}


def _claim_for_degree(entry: CatalogEntry, q: int) -> str:
    for item in entry.expected:
        if item["id"].startswith(f"tp-h{q}"):
            return item["claim"]
    return ""


def cmd_cohomology(cfg: RunConfig) -> tuple:
    reports = []
    ok = True
    for entry in _entries(cfg):
        s = entry.splitting
        trunc = cfg.truncation(entry)
        rows = []
        for q in range(4):
            r = truncated_dimensions(s, q, trunc, cfg.slack)
            rows.append({**r.to_dict(), "claim": _claim_for_degree(entry, q), "caveat": TRUNCATION_CAVEAT})
        report = {"entry": entry.name, "seed": cfg.seed, "tangential": rows}
        cocycles = []
        for cc in entry.raw.get("cocycles", []):
            Q = entry.multivec(cc["field"])
            verdict = is_exact(s, Q, slack=cfg.slack)
            cocycles.append({"name": cc["name"], "claim": cc.get("claim", ""), **verdict.to_dict()})
        if cocycles:
            report["declared_cocycles"] = cocycles
        if "homotopy" in entry.raw:
            h = _homotopy_samples(entry, cfg.seed)
            ok = ok and h["all_exact"]
            report["homotopy"] = h
        data = entry.raw.get("closed_foliation")
        if data is not None:
            try:
                report["assembly"] = closed_form_assembly(entry, trunc, cfg.slack).to_dict()
            except HypothesisFailure as exc:
                expected = bool(data.get("expect_failure"))
                ok = ok and expected
                report["assembly"] = {"hypothesis_failure": str(exc), "expected": expected,
                                      "note": data.get("note", "")}
        reports.append(report)
    return ok, reports


def cmd_obstructions(cfg: RunConfig) -> tuple:
    reports = []
    ok = True
    for entry in _entries(cfg):
        groups = entry_obstructions(entry, cfg.alphas)
        if not groups:
            reports.append({"entry": entry.name, "info": "no obstruction specs"})
            continue
        out = []
        for name, specs, grid in groups:
            # exp-type integrands overflow doubles at small parameters, so they keep their own grid
            use = cfg.grid if cfg.grid and specs[0].family != "exp" else grid
            verdicts = []
            failed = False
            for spec in specs:
                try:
                    v = evaluate_obstruction(spec, use)
                except QuadratureFailure as exc:
                    failed = True
                    ok = False
                    verdicts.append({"name": spec.name, "alpha": spec.alpha, "classification": "QuadratureFailure",
                                     "exponent": None, "error": str(exc), "samples": [], "expected": spec.expect,
                                     "expected_exponent": spec.expected_exponent, "matches": False,
                                     "claim": spec.claim})
                    continue
                match = matches_expectation(spec, v)
                ok = ok and match
                verdicts.append({**v.to_dict(), "expected": spec.expect,
                                 "expected_exponent": spec.expected_exponent, "matches": match,
                                 "claim": spec.claim})
            block = {"group": name, "kind": specs[0].kind, "grid": list(use), "verdicts": verdicts}
            if len(specs) > 1 and not failed:
                cert = independence_certificate(specs, use)
                ok = ok and cert.independent
                block["independence"] = cert.to_dict()
            out.append(block)
        reports.append({"entry": entry.name, "seed": cfg.seed, "obstructions": out})
    return ok, reports


def cmd_layers(cfg: RunConfig) -> tuple:
    reports = []
    for entry in _entries(cfg):
        report = {"entry": entry.name, "rows": layer_rows(entry)}
        separation = declared_separation(entry)
        if separation is not None:
            report["separation"] = separation
        reports.append(report)
    return True, reports


COMMANDS = {
    "verify": cmd_verify,
    "cohomology": cmd_cohomology,
    "obstructions": cmd_obstructions,
    "layers": cmd_layers,
}


# -- output -----------------------------------------------------------------------------------


def _csv_rows(command: str, report: dict) -> list:
    name = report.get("entry")
    if command == "verify":
        return [{"entry": name, **{k: c[k] for k in ("check", "passed", "detail")}} for c in report["checks"]]
    if command == "cohomology":
        keep = ("degree", "domain_dim", "kernel_dim", "rank", "image_dim", "quotient_dim")
        return [{"entry": name, **{k: r[k] for k in keep}} for r in report["tangential"]]
    if command == "obstructions":
        rows = []
        for block in report.get("obstructions", []):
            for v in block["verdicts"]:
                for smp in v["samples"]:
                    rows.append({"entry": name, "name": v["name"], "classification": v["classification"],
                                 "parameter": smp["parameter"], "integral": smp["integral"]})
        return rows
    return [{"entry": name, **r} for r in report["rows"]]


def _to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _text_lines(command: str, report: dict) -> list:
    name = report.get("entry")
    if command == "verify":
        lines = [f"{name}: {report['passed']}/{len(report['checks'])} checks passed"]
        lines += [f"  [{'ok' if c['passed'] else 'FAIL'}] {c['check']}: {c['detail']}" for c in report["checks"]]
        return lines
    if command == "cohomology":
        lines = [f"{name}:"]
        for r in report["tangential"]:
            lines.append(f"  q={r['degree']}: kernel {r['kernel_dim']}, image {r['image_dim']}, "
                         f"quotient {r['quotient_dim']}  reps {r['representatives'][:3]}")
        for c in report.get("declared_cocycles", []):
            lines.append(f"  cocycle {c['name']}: {c['status']}")
        if "homotopy" in report:
            h = report["homotopy"]
            lines.append(f"  homotopy: {sum(r['exact'] for r in h['samples'])}/{len(h['samples'])} sampled cocycles exact")
        if "assembly" in report:
            a = report["assembly"]
            if "slices" in a:
                for sl in a["slices"]:
                    rep = sl["report"]
                    dim = rep.get("quotient_dim", rep.get("dimension"))
                    lines.append(f"  assembly {sl['summand']}: {dim}")
            else:
                lines.append(f"  assembly: hypotheses fail (expected: {a['expected']})")
        return lines
    if command == "obstructions":
        if "info" in report:
            return [f"{name}: {report['info']}"]
        lines = [f"{name}:"]
        for block in report["obstructions"]:
            for v in block["verdicts"]:
                exp = "" if v["exponent"] is None else f" exponent {v['exponent']:.4f}"
                lines.append(f"  [{'ok' if v['matches'] else 'FAIL'}] {v['name']}: {v['classification']}{exp}")
            if "independence" in block:
                lines.append(f"  {block['group']}: {block['independence']['summary']}")
        return lines
    return [_to_csv(_csv_rows(command, report)).rstrip("\n")]


def emit(command: str, cfg: RunConfig, reports: list, stream=None):
    stream = stream or sys.stdout
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            stem = f"{rep['entry']}.{command}"
            doc = {"command": command, "config": _config_dict(cfg), **rep}
            (out / f"{stem}.json").write_text(json.dumps(doc, indent=2, default=str))
            if cfg.format == "csv" or command == "layers":
                (out / f"{stem}.csv").write_text(_to_csv(_csv_rows(command, rep)))
    fmt = "csv" if command == "layers" and cfg.format == "text" else cfg.format
    if fmt == "json":
        stream.write(json.dumps({"command": command, "config": _config_dict(cfg), "reports": reports},
                                indent=2, default=str) + "\n")
    elif fmt == "csv":
        rows = [row for rep in reports for row in _csv_rows(command, rep)]
        stream.write(_to_csv(rows))
    else:
        for rep in reports:
            stream.write("\n".join(_text_lines(command, rep)) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        for name in available_entries():
            print(name)
        return 0
    try:
        cfg = config_from_args(args)
        ok, reports = COMMANDS[args.command](cfg)
    except (CatalogLoadError, ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except TPError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    emit(args.command, cfg, reports)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
