"""Command-line front end: run a detector, sweep thresholds, convert data.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 a
requested quantity is mathematically undefined.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import figures
from .baselines import avf, fpof, od
from .context import Context, SupportThresholds, join_contexts, load_context
from .errors import (
    ArmadError,
    ConfigError,
    ParseError,
    UndefinedConfidenceError,
    UndefinedMetricError,
    UndefinedWeightError,
)
from .evaluation import band_svg, evaluate, load_labels, report_json
from .mining import MinerParams
from .rules import RuleSet, write_rules
from .scoring import Ranking, explain, vf_arm, vr_arm, write_ranking

DETECTORS = ("vr-arm", "vf-arm", "fpof", "avf", "od")

_RUN_KEYS = (
    "contexts",
    "join",
    "detector",
    "max_supp",
    "max_supp_abs",
    "min_supp",
    "min_supp_abs",
    "min_conf",
    "max_len",
    "aggregation",
    "interest_mode",
    "labels",
    "ranking",
    "rules",
    "report",
    "band",
    "band_png",
    "explain_top",
    "manifest",
)

_SWEEP_KEYS = (
    "contexts",
    "join",
    "detector",
    "grid",
    "max_len",
    "aggregation",
    "interest_mode",
    "labels",
    "out_dir",
    "summary",
    "figure",
)


class _Outputs:
    """Atomic file writes with rollback of everything already written."""

    def __init__(self):
        self.done: list[str] = []

    def write(self, path: str, producer) -> None:
        # keep the extension so format-sniffing writers still work
        root, ext = os.path.splitext(path)
        tmp = f"{root}.tmp{os.getpid()}{ext}"
        try:
            producer(tmp)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.done.append(path)

    def write_text(self, path: str, text: str) -> None:
        def producer(tmp: str) -> None:
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(text)

        self.write(path, producer)

    def discard(self) -> None:
        for path in self.done:
            try:
                os.unlink(path)
            except OSError:
                pass
        self.done.clear()


def _load_json_config(path: str, allowed: tuple[str, ...]) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return data


def _merged(args: argparse.Namespace, keys: tuple[str, ...]) -> dict:
    """Explicit flags win over config-file values, which win over defaults."""
    cfg = {}
    if getattr(args, "config", None):
        cfg = _load_json_config(args.config, keys)
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else cfg.get(key)
    return out


def _parse_context_specs(specs) -> list[tuple[str, str]]:
    if not specs:
        raise ConfigError("at least one --context TAG=PATH is required")
    parts = []
    for spec in specs:
        if not isinstance(spec, str) or "=" not in spec:
            raise ConfigError(f"context spec must be TAG=PATH, got {spec!r}")
        tag, _, path = spec.partition("=")
        if not tag or not path:
            raise ConfigError(f"context spec must be TAG=PATH, got {spec!r}")
        parts.append((tag, path))
    return parts


def _load_data(cfg: dict) -> Context:
    parts = _parse_context_specs(cfg["contexts"])
    loaded = [(tag, load_context(path)) for tag, path in parts]
    if cfg["join"]:
        return join_contexts(loaded)
    if len(loaded) > 1:
        raise ConfigError("multiple contexts require --join")
    return loaded[0][1]


def _choice(cfg: dict, key: str, allowed: tuple[str, ...], default: str) -> str:
    value = cfg[key] if cfg[key] is not None else default
    if value not in allowed:
        raise ConfigError(f"{key} must be one of {allowed}, got {value!r}")
    return value


def _require(cfg: dict, key: str, detector: str):
    if cfg[key] is None:
        flag = key.replace("_", "-")
        raise ConfigError(f"detector {detector} requires --{flag}")
    return cfg[key]


def _resolve_run_params(cfg: dict) -> dict:
    cfg["detector"] = _choice(cfg, "detector", DETECTORS, "vr-arm")
    cfg["aggregation"] = _choice(cfg, "aggregation", ("sum", "mean"), "sum")
    cfg["interest_mode"] = _choice(
        cfg, "interest_mode", ("lift-normalized", "literal"), "lift-normalized"
    )
    cfg["join"] = bool(cfg["join"])
    if cfg["max_len"] is None:
        cfg["max_len"] = 5 if cfg["detector"] == "fpof" else 4
    if cfg.get("explain_top") is None:
        cfg["explain_top"] = 0
    if not isinstance(cfg["explain_top"], int) or cfg["explain_top"] < 0:
        raise ConfigError("explain-top must be a non-negative integer")
    return cfg


def _detect(ctx: Context, cfg: dict) -> tuple[RuleSet | None, Ranking]:
    det = cfg["detector"]
    if det == "vr-arm":
        if cfg["max_supp"] is None and cfg["max_supp_abs"] is None:
            raise ConfigError("detector vr-arm requires --max-supp or --max-supp-abs")
        _require(cfg, "min_conf", det)
        return vr_arm(
            ctx,
            cfg["max_supp"],
            cfg["min_conf"],
            cfg["max_len"],
            cfg["aggregation"],
            max_supp_abs=cfg["max_supp_abs"],
            interest_mode=cfg["interest_mode"],
        )
    if det == "vf-arm":
        if cfg["min_supp"] is None and cfg["min_supp_abs"] is None:
            raise ConfigError("detector vf-arm requires --min-supp or --min-supp-abs")
        _require(cfg, "min_conf", det)
        return vf_arm(
            ctx,
            cfg["min_supp"],
            cfg["min_conf"],
            cfg["max_len"],
            cfg["aggregation"],
            min_supp_abs=cfg["min_supp_abs"],
            interest_mode=cfg["interest_mode"],
        )
    if det == "fpof":
        if cfg["min_supp"] is None and cfg["min_supp_abs"] is None:
            raise ConfigError("detector fpof requires --min-supp or --min-supp-abs")
        return None, fpof(
            ctx, cfg["min_supp"], cfg["max_len"], min_supp_abs=cfg["min_supp_abs"]
        )
    if det == "avf":
        return None, avf(ctx)
    if det == "od":
        if cfg["min_supp"] is None and cfg["min_supp_abs"] is None:
            raise ConfigError("detector od requires --min-supp or --min-supp-abs")
        _require(cfg, "min_conf", det)
        return None, od(
            ctx,
            cfg["min_supp"],
            cfg["min_conf"],
            cfg["max_len"],
            min_supp_abs=cfg["min_supp_abs"],
        )
    raise ConfigError(f"unknown detector {det!r}")


def _cmd_run(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    cfg = _resolve_run_params(_merged(args, _RUN_KEYS))
    for out_key in ("report", "band", "band_png"):
        if cfg[out_key] and not cfg["labels"]:
            raise ConfigError(f"--{out_key.replace('_', '-')} requires --labels")
    if cfg["rules"] and cfg["detector"] in ("fpof", "avf"):
        raise ConfigError(f"detector {cfg['detector']} produces no rules")

    ctx = _load_data(cfg)
    ruleset, ranking = _detect(ctx, cfg)
    full = ranking.complete()

    report = None
    if cfg["labels"]:
        report = evaluate(full, load_labels(cfg["labels"]))

    outputs = _Outputs()
    try:
        if cfg["ranking"]:
            outputs.write(cfg["ranking"], lambda tmp: write_ranking(full, tmp))
        if cfg["rules"]:
            outputs.write(cfg["rules"], lambda tmp: write_rules(ruleset, ctx, tmp))
        if cfg["report"]:
            outputs.write_text(cfg["report"], report_json(report))
        if cfg["band"]:
            outputs.write_text(cfg["band"], band_svg(report))
        if cfg["band_png"]:
            outputs.write(cfg["band_png"], lambda tmp: figures.band_figure(report, tmp))

        manifest = {
            "command": "run",
            "config": {
                key: cfg[key] for key in _RUN_KEYS if key not in ("manifest",)
            },
            "context": {"m": ctx.m, "n": ctx.n},
            "n_rules": len(ruleset.rules) if ruleset is not None else None,
            "metrics": (
                {"ndcg": report.ndcg, "auc": report.auc} if report else None
            ),
            "outputs": list(outputs.done),
            "wall_clock_s": round(time.perf_counter() - t0, 3),
        }
        if cfg["manifest"]:
            outputs.write_text(
                cfg["manifest"], json.dumps(manifest, indent=2) + "\n"
            )
            manifest["outputs"] = list(outputs.done)
        print(json.dumps(manifest, indent=2))

        for entry in full.entries[: cfg["explain_top"]]:
            rules = ruleset
            if rules is None:
                rules = RuleSet((), MinerParams(SupportThresholds(), 4))
            print(explain(entry, rules, ctx), end="")
    except BaseException:
        outputs.discard()
        raise
    return 0


def _parse_grid(grid) -> list[tuple[float, float]]:
    if not grid:
        raise ConfigError("sweep needs a non-empty --grid")
    cells = []
    for token in grid:
        if isinstance(token, (list, tuple)) and len(token) == 2:
            supp, conf = token
        elif isinstance(token, str) and token.count("x") == 1:
            left, _, right = token.partition("x")
            try:
                supp, conf = float(left), float(right)
            except ValueError:
                raise ConfigError(f"bad grid cell {token!r}, expected SUPPxCONF") from None
        else:
            raise ConfigError(f"bad grid cell {token!r}, expected SUPPxCONF")
        cells.append((float(supp), float(conf)))
    return cells


def _cmd_sweep(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    cfg = _merged(args, _SWEEP_KEYS)
    cfg["detector"] = _choice(cfg, "detector", DETECTORS, "vr-arm")
    if cfg["detector"] == "avf":
        raise ConfigError("avf has no thresholds to sweep")
    cfg["aggregation"] = _choice(cfg, "aggregation", ("sum", "mean"), "sum")
    cfg["interest_mode"] = _choice(
        cfg, "interest_mode", ("lift-normalized", "literal"), "lift-normalized"
    )
    cfg["join"] = bool(cfg["join"])
    if cfg["labels"] is None:
        raise ConfigError("sweep requires --labels")
    grid = _parse_grid(cfg["grid"])
    out_dir = cfg["out_dir"] or "."

    ctx = _load_data(cfg)
    attacks = load_labels(cfg["labels"])
    os.makedirs(out_dir, exist_ok=True)

    outputs = _Outputs()
    cells = []
    try:
        for supp, conf in grid:
            cell_cfg = {
                "detector": cfg["detector"],
                "max_supp": supp if cfg["detector"] == "vr-arm" else None,
                "max_supp_abs": None,
                "min_supp": supp if cfg["detector"] != "vr-arm" else None,
                "min_supp_abs": None,
                "min_conf": conf,
                "max_len": cfg["max_len"]
                if cfg["max_len"] is not None
                else (5 if cfg["detector"] == "fpof" else 4),
                "aggregation": cfg["aggregation"],
                "interest_mode": cfg["interest_mode"],
            }
            _, ranking = _detect(ctx, cell_cfg)
            report = evaluate(ranking.complete(), attacks)
            name = f"report_{supp:g}x{conf:g}.json"
            path = os.path.join(out_dir, name)
            outputs.write_text(path, report_json(report))
            cells.append(
                {
                    "supp": supp,
                    "conf": conf,
                    "ndcg": report.ndcg,
                    "auc": report.auc,
                    "report": path,
                }
            )
        best = min(cells, key=lambda cell: (-cell["ndcg"], cell["supp"], cell["conf"]))
        summary = {
            "command": "sweep",
            "detector": cfg["detector"],
            "cells": cells,
            "best": {key: best[key] for key in ("supp", "conf", "ndcg", "auc")},
            "wall_clock_s": round(time.perf_counter() - t0, 3),
        }
        if cfg["figure"]:
            triples = [(c["supp"], c["conf"], c["ndcg"]) for c in cells]
            outputs.write(
                cfg["figure"], lambda tmp: figures.sweep_figure(triples, tmp)
            )
        if cfg["summary"]:
            outputs.write_text(cfg["summary"], json.dumps(summary, indent=2) + "\n")
        print(json.dumps(summary, indent=2))
    except BaseException:
        outputs.discard()
        raise
    return 0


def _convert_matrix(src: str, writer) -> None:
    with open(src, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise ParseError("matrix file needs a header with item columns", line=1)
        items = header[1:]
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, got {len(row)}",
                    line=reader.line_num,
                )
            tid = row[0]
            if not tid:
                raise ParseError("empty tid", line=reader.line_num)
            for name, cell in zip(items, row[1:]):
                cell = cell.strip()
                if cell == "1":
                    writer.writerow([tid, name])
                elif cell != "0":
                    raise ParseError(
                        f"matrix cells must be 0 or 1, got {cell!r}",
                        line=reader.line_num,
                    )


def _convert_basket(src: str, writer) -> None:
    with open(src, encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if not tokens:
                continue
            tid, items = tokens[0], tokens[1:]
            for name in items:
                writer.writerow([tid, name])


def _cmd_convert(args: argparse.Namespace) -> int:
    outputs = _Outputs()

    def producer(tmp: str) -> None:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tid", "item"])
            if args.format == "matrix":
                _convert_matrix(args.input, writer)
            else:
                _convert_basket(args.input, writer)

    try:
        outputs.write(args.output, producer)
    except BaseException:
        outputs.discard()
        raise
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="armad",
        description="Rank anomalous objects in categorical transaction data "
        "by mining rare and frequent association rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one detector and write its artifacts")
    run.add_argument(
        "--context",
        dest="contexts",
        action="append",
        metavar="TAG=PATH",
        help="input context as pair CSV; repeat for multi-context joins",
    )
    run.add_argument("--join", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--detector", choices=DETECTORS, default=None)
    run.add_argument("--max-supp", type=float, default=None, metavar="PCT")
    run.add_argument("--max-supp-abs", type=int, default=None, metavar="N")
    run.add_argument("--min-supp", type=float, default=None, metavar="PCT")
    run.add_argument("--min-supp-abs", type=int, default=None, metavar="N")
    run.add_argument("--min-conf", type=float, default=None, metavar="PCT")
    run.add_argument("--max-len", type=int, default=None)
    run.add_argument("--aggregation", choices=("sum", "mean"), default=None)
    run.add_argument(
        "--interest-mode", choices=("lift-normalized", "literal"), default=None
    )
    run.add_argument("--labels", default=None, metavar="PATH")
    run.add_argument("--ranking", default=None, metavar="CSV")
    run.add_argument("--rules", default=None, metavar="CSV")
    run.add_argument("--report", default=None, metavar="JSON")
    run.add_argument("--band", default=None, metavar="SVG")
    run.add_argument("--band-png", default=None, metavar="PNG")
    run.add_argument("--explain-top", type=int, default=None, metavar="K")
    run.add_argument("--manifest", default=None, metavar="JSON")
    run.add_argument("--config", default=None, metavar="JSON")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser(
        "sweep", help="run a (support x confidence) grid and report the best cell"
    )
    sweep.add_argument(
        "--context", dest="contexts", action="append", metavar="TAG=PATH"
    )
    sweep.add_argument("--join", action=argparse.BooleanOptionalAction, default=None)
    sweep.add_argument("--detector", choices=DETECTORS, default=None)
    sweep.add_argument(
        "--grid",
        nargs="+",
        default=None,
        metavar="SUPPxCONF",
        help="grid cells like 0.05x100 5x100 30x100",
    )
    sweep.add_argument("--max-len", type=int, default=None)
    sweep.add_argument("--aggregation", choices=("sum", "mean"), default=None)
    sweep.add_argument(
        "--interest-mode", choices=("lift-normalized", "literal"), default=None
    )
    sweep.add_argument("--labels", default=None, metavar="PATH")
    sweep.add_argument("--out-dir", default=None, metavar="DIR")
    sweep.add_argument("--summary", default=None, metavar="JSON")
    sweep.add_argument("--figure", default=None, metavar="PNG")
    sweep.add_argument("--config", default=None, metavar="JSON")
    sweep.set_defaults(func=_cmd_sweep)

    convert = sub.add_parser(
        "convert", help="convert third-party exports to the pair CSV format"
    )
    convert.add_argument("format", choices=("matrix", "basket"))
    convert.add_argument("input")
    convert.add_argument("output")
    convert.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        UndefinedConfidenceError,
        UndefinedMetricError,
        UndefinedWeightError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ArmadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
