"""Batch front door: parse family specifications, run the metric and
index computations, emit certified reports.

Rationals travel as "p/q" strings end to end; no floating representation
enters the interchange format, and identical inputs produce byte-identical
CSV and Markdown.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cdf import Cdf, InvalidCdfError, Q, SupportBound, as_q, convolve, dirac, mixture, shift, uniform
from .families import FamilySpec, ParametricTail, TemplateError
from .gauges import delta_distance_bracket, levy, phi, uniform_distance
from .indices import (
    IndexBracket,
    escape_index,
    helly_select,
    is_tight,
    lambda_exact,
    limit_operator,
    prokhorov_bracket,
    weak_rsc_flag,
)
from .approach import theorem22_check_cdf


class SpecParseError(ValueError):
    """Input document violates the family schema; names the bad field."""


def _q_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _parse_q(value, where: str) -> Fraction:
    try:
        return as_q(value)
    except (ValueError, InvalidCdfError, TypeError) as exc:
        raise SpecParseError(f"{where}: not a rational: {value!r}") from exc


# -- CDF constructors -------------------------------------------------------


def parse_cdf(node, where: str = "cdf") -> Cdf:
    if not isinstance(node, dict) or len(node) != 1:
        raise SpecParseError(f"{where}: expected a single-constructor object")
    (kind, body), = node.items()
    try:
        if kind == "dirac":
            return dirac(_parse_q(body, f"{where}.dirac"))
        if kind == "uniform":
            return uniform(
                _parse_q(body.get("a"), f"{where}.uniform.a"),
                _parse_q(body.get("b"), f"{where}.uniform.b"),
            )
        if kind == "mixture":
            weights = [
                _parse_q(w, f"{where}.mixture.weights[{i}]")
                for i, w in enumerate(body.get("weights", []))
            ]
            parts = [
                parse_cdf(p, f"{where}.mixture.parts[{i}]")
                for i, p in enumerate(body.get("parts", []))
            ]
            return mixture(weights, parts)
        if kind == "shift":
            return shift(
                parse_cdf(body.get("base"), f"{where}.shift.base"),
                _parse_q(body.get("t"), f"{where}.shift.t"),
            )
        if kind == "convolve":
            return convolve(
                parse_cdf(body.get("f"), f"{where}.convolve.f"),
                parse_cdf(body.get("g"), f"{where}.convolve.g"),
            )
    except InvalidCdfError as exc:
        raise SpecParseError(f"{where}.{kind}: {exc}") from exc
    raise SpecParseError(f"{where}: unknown constructor {kind!r}")


def serialize_cdf(F: Cdf) -> dict:
    """Canonical form: a mixture of diracs and uniforms reproducing F."""
    weights = []
    parts = []
    for loc, mass in F.jumps:
        weights.append(_q_str(mass))
        parts.append({"dirac": _q_str(loc)})
    for l, r, mass in F.segments:
        weights.append(_q_str(mass))
        parts.append({"uniform": {"a": _q_str(l), "b": _q_str(r)}})
    if len(parts) == 1 and weights[0] == "1":
        return parts[0]
    return {"mixture": {"weights": weights, "parts": parts}}


# -- family documents -------------------------------------------------------


def parse_family_spec(doc) -> FamilySpec:
    """Parse a JSON document (text or already-loaded object)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecParseError("top level must be an object")
    unknown = set(doc) - {"explicit", "tails"}
    if unknown:
        raise SpecParseError(f"unknown top-level fields: {sorted(unknown)}")
    explicit = tuple(
        parse_cdf(node, f"explicit[{i}]") for i, node in enumerate(doc.get("explicit", []))
    )
    tails = []
    for i, node in enumerate(doc.get("tails", [])):
        where = f"tails[{i}]"
        if not isinstance(node, dict):
            raise SpecParseError(f"{where}: expected an object")
        template = node.get("template")
        base = parse_cdf(node.get("base"), f"{where}.base")
        t = node.get("t", "n")
        if isinstance(t, list):
            t = tuple(_parse_q(v, f"{where}.t[{j}]") for j, v in enumerate(t))
        a = _parse_q(node.get("a", 0), f"{where}.a")
        horizon = node.get("horizon", 128)
        if not isinstance(horizon, int) or horizon < 1:
            raise SpecParseError(f"{where}.horizon: must be a positive integer")
        try:
            tails.append(
                ParametricTail(template=template, base=base, a=a, t=t, horizon=horizon)
            )
        except TemplateError as exc:
            raise SpecParseError(f"{where}: {exc}") from exc
    try:
        return FamilySpec(explicit=explicit, tails=tuple(tails))
    except TemplateError as exc:
        raise SpecParseError(str(exc)) from exc


def serialize_family_spec(spec: FamilySpec) -> dict:
    doc: dict = {}
    if spec.explicit:
        doc["explicit"] = [serialize_cdf(F) for F in spec.explicit]
    if spec.tails:
        doc["tails"] = [
            {
                "template": tail.template,
                "base": serialize_cdf(tail.base),
                "a": _q_str(tail.a),
                "t": tail.t if isinstance(tail.t, str) else [_q_str(v) for v in tail.t],
                "horizon": tail.horizon,
            }
            for tail in spec.tails
        ]
    return doc


# -- run configuration ------------------------------------------------------

COMMANDS = ("metrics", "indices", "prokhorov-check", "theorem22", "report")
FORMATS = ("csv", "markdown", "svg-plot")


@dataclass
class RunConfig:
    command: str
    input_path: str
    eps: Fraction = Q(1, 100)
    grid_depth: int = 64
    output_format: str = "markdown"
    output_path: str | None = None
    gammas: tuple[Fraction, ...] = (Q(1),)
    alphas: tuple[Fraction, ...] = (Q(1),)
    window: Fraction | None = None
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SpecParseError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise SpecParseError(f"unknown format {self.output_format!r}")
        if self.eps <= 0:
            raise SpecParseError("eps must be positive")
        if self.grid_depth < 1:
            raise SpecParseError("grid-depth must be >= 1")


# -- output helpers ---------------------------------------------------------


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(row) for row in rows)
        return "\n".join(lines) + "\n"
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _labeled_members(spec: FamilySpec) -> list[tuple[str, Cdf]]:
    out = [(f"E{i + 1}", F) for i, F in enumerate(spec.explicit)]
    for k, tail in enumerate(spec.tails):
        for n in (1, 2):
            out.append((f"T{k + 1}[{n}]", tail.member(n)))
    return out


# -- commands ---------------------------------------------------------------


def _cmd_metrics(spec: FamilySpec, config: RunConfig) -> tuple[int, str]:
    members = _labeled_members(spec)
    header = ["pair", "D_u"]
    header.extend(f"L_{_q_str(g)}" for g in config.gammas)
    header.extend(f"phi_{_q_str(a)}" for a in config.alphas)
    rows = []
    for i, (la, F) in enumerate(members):
        for lb, G in members[i + 1 :]:
            row = [f"{la}:{lb}", _q_str(uniform_distance(F, G))]
            row.extend(_q_str(levy(g, F, G)) for g in config.gammas)
            row.extend(_q_str(phi(F, a, G)) for a in config.alphas)
            rows.append(row)
    return 0, _table(header, rows, config.output_format)


def _cmd_indices(spec: FamilySpec, config: RunConfig) -> tuple[int, str]:
    chi = escape_index(spec)
    grid = [Q(1, n) for n in range(1, config.grid_depth + 1)]
    rows = [["chi_e", _q_str(chi)], ["tight", str(is_tight(spec)).lower()]]
    for k, tail in enumerate(spec.tails):
        from .indices import _window_for

        window = _window_for(tail, config.eps)
        res = helly_select(tail, window, Q(1, 4), config.eps)
        bracket = limit_operator(tail, res.limit, grid)
        rows.append(
            [f"lambda(T{k + 1} -> helly limit)", f"[{_q_str(bracket.lower)}, {_q_str(bracket.upper)}]"]
        )
    return 0, _table(["index", "value"], rows, config.output_format)


def _cmd_prokhorov(spec: FamilySpec, config: RunConfig) -> tuple[int, str]:
    bracket = prokhorov_bracket(spec, config.eps)
    chi = escape_index(spec)
    ok = bracket.lower == chi and bracket.lower <= bracket.upper <= bracket.lower + config.eps
    rows = [
        ["lower", _q_str(bracket.lower)],
        ["upper", _q_str(bracket.upper)],
        ["escape index", _q_str(chi)],
        ["tolerance", _q_str(config.eps)],
        ["status", "PASS" if ok else "FAIL"],
    ]
    return (0 if ok else 1), _table(["field", "value"], rows, config.output_format)


def _cmd_theorem22(spec: FamilySpec, config: RunConfig) -> tuple[int, str]:
    report = theorem22_check_cdf(spec, config.eps)
    rows = [
        ["rsc bracket", f"[{_q_str(report.rsc.lower)}, {_q_str(report.rsc.upper)}]"],
        ["rc bracket", f"[{_q_str(report.rc.lower)}, {_q_str(report.rc.upper)}]"],
        ["lindelof level", _q_str(report.lindelof_level)],
        ["status", "PASS" if report.ok else "FAIL"],
    ]
    return (0 if report.ok else 1), _table(["field", "value"], rows, config.output_format)


def _svg_plot(curves: dict[str, list[tuple[int, Fraction]]], title: str) -> str:
    """Hand-rolled SVG: bracket curves against 1/grid-step, no timestamps."""
    width, height, pad = 480, 320, 40
    max_x = max((pt[0] for pts in curves.values() for pt in pts), default=1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{pad}" y="20" font-size="14">{title}</text>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
        f'height="{height - 2 * pad}" fill="none" stroke="black"/>',
    ]
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
    for idx, (label, pts) in enumerate(sorted(curves.items())):
        coords = []
        for depth, value in pts:
            x = pad + (width - 2 * pad) * (depth - 1) / max(1, max_x - 1)
            y = height - pad - (height - 2 * pad) * float(value)
            coords.append(f"{x:.1f},{y:.1f}")
        color = palette[idx % len(palette)]
        parts.append(
            f'<polyline points="{" ".join(coords)}" fill="none" stroke="{color}"/>'
        )
        parts.append(
            f'<text x="{width - pad - 150}" y="{pad + 16 * (idx + 1)}" '
            f'font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_report(spec: FamilySpec, config: RunConfig) -> tuple[int, str]:
    rng = random.Random(config.seed)
    status = 0
    sections = ["# Compactness report", ""]
    code, body = _cmd_indices(spec, RunConfig(**{**config.__dict__, "command": "indices", "output_format": "markdown", "output_path": None}))
    sections += ["## Indices", "", body]
    code, body = _cmd_prokhorov(spec, RunConfig(**{**config.__dict__, "command": "prokhorov-check", "output_format": "markdown", "output_path": None}))
    status = max(status, code)
    sections += ["## Prokhorov bracket", "", body]
    code, body = _cmd_theorem22(spec, RunConfig(**{**config.__dict__, "command": "theorem22", "output_format": "markdown", "output_path": None}))
    status = max(status, code)
    sections += ["## Inequality chain", "", body]

    # seeded spot check: both delta bases stay inside the certified bracket
    members = spec.sample_members(per_tail=2)
    agree = True
    for _ in range(5):
        F = rng.choice(members)
        fam = [rng.choice(members) for _ in range(2)]
        lo_phi, up = delta_distance_bracket(F, fam, "phi", depth=config.grid_depth)
        lo_levy, _ = delta_distance_bracket(F, fam, "levy", depth=config.grid_depth)
        if not (lo_phi <= up and lo_levy <= up):
            agree = False
    status = max(status, 0 if agree else 1)
    sections += ["## Basis brackets", "", f"phi and levy delta brackets spot check (seed {config.seed}): {'PASS' if agree else 'FAIL'}", ""]

    curves: dict[str, list[tuple[int, Fraction]]] = {}
    for k, tail in enumerate(spec.tails):
        from .indices import _window_for

        window = _window_for(tail, config.eps)
        res = helly_select(tail, window, Q(1, 4), config.eps)
        lows = []
        for depth in range(1, min(config.grid_depth, 16) + 1):
            grid = [Q(1, n) for n in range(1, depth + 1)]
            bracket = limit_operator(tail, res.limit, grid)
            lows.append((depth, bracket.lower))
        curves[f"T{k + 1} lower"] = lows
        curves[f"T{k + 1} upper"] = [(d, lambda_exact(tail, res.limit)) for d, _ in lows]
    svg = _svg_plot(curves, "limit-operator bracket vs grid depth") if curves else ""
    if config.output_path and svg:
        Path(config.output_path).with_suffix(".svg").write_text(svg)
    sections += ["## Bracket convergence", "", "(see SVG artifact)" if svg else "no tails to plot", ""]
    return status, "\n".join(sections)


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        doc = Path(config.input_path).read_text()
        spec = parse_family_spec(doc)
        handler = {
            "metrics": _cmd_metrics,
            "indices": _cmd_indices,
            "prokhorov-check": _cmd_prokhorov,
            "theorem22": _cmd_theorem22,
            "report": _cmd_report,
        }[config.command]
        status, text = handler(spec, config)
        _emit(config, text)
        return status
    except (SpecParseError, TemplateError, InvalidCdfError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cdfgauge",
        description="distribution-function gauges and compactness indices",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="JSON family specification")
    parser.add_argument("--eps", default="1/100", help="tolerance as p/q")
    parser.add_argument("--grid-depth", type=int, default=64)
    parser.add_argument("--gamma", action="append", default=None, help="repeatable")
    parser.add_argument("--alpha", action="append", default=None, help="repeatable")
    parser.add_argument("--window", default=None, help="window half-width M")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", default="markdown", choices=FORMATS, dest="fmt")
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input_path=args.input,
            eps=as_q(args.eps),
            grid_depth=args.grid_depth,
            output_format=args.fmt,
            output_path=args.out,
            gammas=tuple(as_q(g) for g in args.gamma) if args.gamma else (Q(1),),
            alphas=tuple(as_q(a) for a in args.alpha) if args.alpha else (Q(1),),
            window=as_q(args.window) if args.window else None,
            seed=args.seed,
        )
    except (SpecParseError, ValueError) as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
