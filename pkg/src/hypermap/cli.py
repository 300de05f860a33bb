"""Command-line front end: CSV tables and SVG figures.

Subcommands: constants | field | leaf | tangency | cones | verify | figures.
Every CSV starts with a comment line echoing the tool version and all
effective parameters, so identical invocations produce byte-identical
output (there are no timestamps).  Exit codes: 0 on success, 1 when a
check command found failures, 2 on argument errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import __version__, svgrender
from .coordinates import critical_constants, phi, phi_tilde, theta_field
from .foliations import LEAF_FIELDS, Leaf, closed_leaves, trace_leaf
from .hyperbolicity import delta_strip, push_vector, verify_cones
from .oracle import svd2
from .stdmap import (
    MapParams,
    TorusPoint,
    angle_dist_mod_pi,
    jacobian,
    map_forward,
    map_inverse,
)
from .tangency import phi_inverse, tangency_curve, tangency_landmarks

_DEFAULTS = {"grid": 1024, "samples": 100_000, "step": 1e-3, "max_arc": 10.0, "seed": 42}


@dataclass
class RunConfig:
    subcommand: str
    k: float
    m: Optional[int]
    grid: int
    samples: int
    step: float
    max_arc: float
    seed: int
    out: Optional[str]
    format: str

    def header(self) -> str:
        parts = [
            f"hypermap {__version__}",
            f"subcommand={self.subcommand}",
            f"k={self.k:.17g}",
            f"m={self.m if self.m is not None else '-'}",
            f"grid={self.grid}",
            f"samples={self.samples}",
            f"step={self.step:.17g}",
            f"max_arc={self.max_arc:.17g}",
            f"seed={self.seed}",
            f"format={self.format}",
        ]
        return "# " + " ".join(parts)


def _g(v: float) -> str:
    return f"{v:.17g}"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _csv(cfg: RunConfig, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = [cfg.header(), ",".join(columns)]
    for row in rows:
        cells = [_g(v) if isinstance(v, float) else str(v) for v in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hypermap", description=__doc__)
    top.add_argument("--version", action="version", version=f"hypermap {__version__}")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, fmt: str = "csv") -> None:
        p.add_argument("--k", type=float, default=1.0, help="family parameter k > 0")
        p.add_argument("--grid", type=int, default=_DEFAULTS["grid"])
        p.add_argument("--samples", type=int, default=_DEFAULTS["samples"])
        p.add_argument("--step", type=float, default=_DEFAULTS["step"])
        p.add_argument("--max-arc", type=float, default=_DEFAULTS["max_arc"])
        p.add_argument("--seed", type=int, default=_DEFAULTS["seed"])
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=["csv", "svg", "txt"], default=fmt)

    p = sub.add_parser("constants", help="strip constants as CSV")
    common(p)
    p.add_argument("--m", type=int, default=None, help="also emit delta^(+-m)")

    p = sub.add_parser("field", help="grid dump of a direction field")
    common(p)
    p.add_argument("--time", choices=["forward", "backward"], default="forward")

    p = sub.add_parser("leaf", help="trace one foliation leaf")
    common(p)
    p.add_argument("--field", choices=list(LEAF_FIELDS), default="E1")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--y", type=float, default=0.6)

    p = sub.add_parser("tangency", help="tangency curve, landmarks and residuals")
    common(p)

    p = sub.add_parser("cones", help="cone invariance sweep; exit 0 iff zero failures")
    common(p, fmt="txt")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--inside-strip", action="store_true", help="negative control")

    p = sub.add_parser("verify", help="invariant battery over a k-list")
    common(p, fmt="txt")
    p.add_argument("--k-list", default="1,2,5,10", help="comma-separated k values")

    p = sub.add_parser("figures", help="regenerate the SVG figure set")
    common(p, fmt="svg")
    p.set_defaults(out="figures")
    return top


def _cfg_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        k=args.k,
        m=getattr(args, "m", None),
        grid=args.grid,
        samples=args.samples,
        step=args.step,
        max_arc=args.max_arc,
        seed=args.seed,
        out=args.out,
        format=args.format,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_constants(cfg: RunConfig, params: MapParams) -> int:
    c = critical_constants(params)
    rows: list[tuple[str, object, str]] = []
    for name, value in c.as_dict().items():
        rows.append((name, "" if value is None else value, str(value is not None).lower()))
    if cfg.m is not None:
        strip = delta_strip(cfg.m, params)
        rows.append((f"delta_({cfg.m})", strip.delta_m, "true"))
        rows.append((f"delta_(-{cfg.m})", strip.delta_neg_m, "true"))
    _emit(cfg, _csv(cfg, ["name", "value", "defined"], rows))
    return 0


def _cmd_field(cfg: RunConfig, params: MapParams, time: str) -> int:
    fn = phi if time == "forward" else phi_tilde
    rows = []
    for j in range(cfg.grid):
        coord = j / cfg.grid
        ang = theta_field(coord, params, time)  # type: ignore[arg-type]
        ex, ey = ang.vector()
        rows.append((coord, fn(coord, params), ang.theta, ex, ey))
    _emit(cfg, _csv(cfg, ["coord", "phi", "theta", "e_x", "e_y"], rows))
    return 0


def _strip_elements(params: MapParams) -> list[str]:
    c = critical_constants(params)
    if c.delta_minus is None or c.delta_plus is None:
        return []
    return [
        svgrender.hband(c.delta_minus, c.delta_plus, "#d0d0f8"),
        svgrender.hband(1.0 - c.delta_plus, 1.0 - c.delta_minus, "#d0d0f8"),
    ]


def _leaf_elements(leaves: Iterable[Leaf], color: str, width: float = 0.002) -> list[str]:
    out = []
    for leaf in leaves:
        for seg in leaf.segments():
            if len(seg) >= 2:
                out.append(svgrender.polyline(seg, color, width))
    return out


def _cmd_leaf(cfg: RunConfig, params: MapParams, field: str, x: float, y: float) -> int:
    leaf = trace_leaf(field, TorusPoint(x, y), params, step=cfg.step, max_arc=cfg.max_arc)
    if cfg.format == "svg":
        elements = _strip_elements(params) + _leaf_elements([leaf], "#c03030")
        _emit(cfg, svgrender.document(elements))
        return 0
    rows = [(seg_id, px, py) for seg_id, px, py in leaf.to_csv_rows()]
    _emit(cfg, _csv(cfg, ["seg_id", "x", "y"], rows))
    return 0


def _cmd_tangency(cfg: RunConfig, params: MapParams) -> int:
    lower, upper = tangency_curve(params, cfg.grid)
    landmarks = tangency_landmarks(params)
    if cfg.format == "svg":
        elements = _strip_elements(params)
        for branch, color in ((lower, "#c03030"), (upper, "#3030c0")):
            pts = [(tp.x, tp.y) for tp in branch]
            # split at torus seams in x
            seg: list[tuple[float, float]] = []
            prev_x = None
            for px, py in pts:
                if prev_x is not None and abs(px - prev_x) > 0.5 and len(seg) >= 2:
                    elements.append(svgrender.polyline(seg, color))
                    seg = []
                seg.append((px, py))
                prev_x = px
            if len(seg) >= 2:
                elements.append(svgrender.polyline(seg, color))
        for tp in landmarks:
            if tp is not None:
                elements.append(svgrender.circle((tp.x, tp.y), 0.006, "#108010"))
        _emit(cfg, svgrender.document(elements))
        return 0
    rows: list[tuple[object, ...]] = []
    for branch in (lower, upper):
        for tp in branch:
            rows.append(("curve", "", tp.ytilde, tp.y, tp.x, tp.branch, tp.residual))
    for i, tp in enumerate(landmarks, start=1):
        if tp is not None:
            rows.append(("landmark", f"P{i}", tp.ytilde, tp.y, tp.x, tp.branch, tp.residual))
    _emit(cfg, _csv(cfg, ["kind", "name", "ytilde", "y", "x", "branch", "residual"], rows))
    return 0


def _cmd_cones(cfg: RunConfig, params: MapParams, inside_strip: bool) -> int:
    m = cfg.m if cfg.m is not None else 2
    report = verify_cones(params, m, cfg.samples, cfg.seed, inside_strip=inside_strip)
    if cfg.format == "csv":
        rows = [
            ("k", report.k),
            ("m", report.m),
            ("samples", report.samples),
            ("seed", report.seed),
            ("region", "inside" if inside_strip else "outside"),
            ("failures", report.failures),
            ("slope_failures", report.slope_failures),
            ("norm_failures", report.norm_failures),
            ("min_norm", report.min_norm),
            ("slope_min", report.slope_range[0]),
            ("slope_max", report.slope_range[1]),
        ]
        _emit(cfg, _csv(cfg, ["metric", "value"], rows))
    else:
        _emit(cfg, cfg.header() + "\n" + report.to_text())
    return 0 if report.failures == 0 else 1


def _verify_battery(params: MapParams) -> list[tuple[str, bool, str]]:
    """Fast invariant battery for one k; returns (name, ok, detail) rows."""
    import random

    k = params.k
    rng = random.Random(1234)
    results: list[tuple[str, bool, str]] = []

    worst = 0.0
    for _ in range(128):
        p = TorusPoint(rng.random(), rng.random())
        q = map_inverse(map_forward(p, params), params)
        d = max(abs(q.x - p.x) % 1.0, abs(q.y - p.y) % 1.0)
        worst = max(worst, min(d, 1.0 - d))
    results.append(("round_trip", worst < 1e-12, f"max {worst:.3g}"))

    worst = 0.0
    for _ in range(128):
        p = TorusPoint(rng.random(), rng.random())
        for time in ("forward", "backward"):
            worst = max(worst, abs(jacobian(p, params, time).det - 1.0))  # type: ignore[arg-type]
    results.append(("unimodular", worst < 1e-12, f"max |det-1| {worst:.3g}"))

    worst = 0.0
    for _ in range(128):
        p = TorusPoint(rng.random(), rng.random())
        s = svd2(jacobian(p, params, "forward"))
        worst = max(worst, abs(s.sigma_max * s.sigma_min - 1.0))
    results.append(("E1_F1_product", worst < 1e-10, f"max |E1*F1-1| {worst:.3g}"))

    worst = 0.0
    for j in range(256):
        coord = j / 256
        for time in ("forward", "backward"):
            # TorusPoint(0, coord) has y = ytilde = coord, serving both times.
            s = svd2(jacobian(TorusPoint(0.0, coord), params, time))  # type: ignore[arg-type]
            if s.dir_min is None:
                continue
            worst = max(worst, theta_field(coord, params, time).dist(s.dir_min))  # type: ignore[arg-type]
    results.append(("theta_vs_svd", worst < 1e-9, f"max angle err {worst:.3g}"))

    worst = 0.0
    for j in range(1, 256):
        y = j / 256
        v = phi(y, params)
        if not math.isfinite(v) or abs(v) > 1e6:
            continue
        t = theta_field(y, params, "forward").theta
        worst = max(worst, abs(math.tan(2.0 * t) - v) / max(1.0, abs(v)))
    results.append(("tan2theta_eq_phi", worst < 1e-9, f"max rel err {worst:.3g}"))

    c = critical_constants(params)
    if c.all_defined:
        vals = [
            c.delta_minus, 0.25, c.delta_star, c.delta_hat_T_minus, c.delta_T_minus,
            c.delta_plus, c.delta_T_plus, c.delta_hat_T_plus,
        ]
        ok = all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))  # type: ignore[operator]
        results.append(("constants_ordering", ok, "strict chain"))
    else:
        results.append(("constants_ordering", True, "skipped: constants undefined at this k"))

    worst = 0.0
    for j in range(64):
        out, _ = push_vector(j / 64, 0.0, params)
        worst = max(worst, angle_dist_mod_pi(out, math.pi / 4.0))
    out, _ = push_vector(0.25, 3.0 * math.pi / 4.0, params)
    worst2 = angle_dist_mod_pi(out, 0.0)
    results.append(("exact_mapping_facts", worst < 1e-12 and worst2 < 1e-12,
                    f"horiz->diag {worst:.3g}, negdiag->horiz {worst2:.3g}"))

    if k > 2:
        rep = verify_cones(params, 2, 5000, seed=7)
        results.append(("cone_slope_invariance", rep.slope_failures == 0 and rep.min_norm > 1.0,
                        f"slope failures {rep.slope_failures}, min_norm {rep.min_norm:.4f}"))

    if c.all_defined:
        worst = 0.0
        lower, upper = tangency_curve(params, 128)
        for tp in lower + upper:
            worst = max(worst, tp.residual)
        results.append(("tangency_residual", worst < 1e-8, f"max {worst:.3g}"))

        worst = 0.0
        for j in range(128):
            y = 0.05 + 0.9 * j / 128
            v = phi(y, params)
            if not math.isfinite(v) or abs(v) > 1e5 or v == 0.0:
                continue
            roots = phi_inverse(v, params)
            if not roots:
                worst = math.inf
                continue
            # contract metric: phi at the recovered root matches z
            r = min(roots, key=lambda r: abs(r - y))
            worst = max(worst, abs(phi(r, params) - v) / max(1.0, abs(v)))
        results.append(("phi_inverse_residual", worst < 1e-10, f"max rel {worst:.3g}"))

    return results


def _cmd_verify(cfg: RunConfig, k_list: str) -> int:
    lines = [cfg.header()]
    all_ok = True
    for ks in k_list.split(","):
        k = float(ks.strip())
        params = MapParams(k)
        for name, ok, detail in _verify_battery(params):
            all_ok &= ok
            lines.append(f"{'ok  ' if ok else 'FAIL'} k={k:g} {name} ({detail})")
    lines.append("result " + ("PASS" if all_ok else "FAIL"))
    _emit(cfg, "\n".join(lines))
    return 0 if all_ok else 1


def _figure_foliation(cfg: RunConfig, params: MapParams, time: str) -> str:
    elements = _strip_elements(params)
    if time == "forward":
        e_field, f_field = "E1", "F1"
        e_starts = [TorusPoint(0.0, y) for y in (0.05, 0.15, 0.35, 0.45, 0.55, 0.65, 0.85, 0.95)]
        f_starts = [TorusPoint(x, 0.5) for x in (0.1, 0.3, 0.5, 0.7, 0.9)]
    else:
        e_field, f_field = "E-1", "F-1"
        e_starts = [TorusPoint(0.0, y) for y in (0.05, 0.35, 0.65, 0.95)]
        f_starts = [TorusPoint(x, 0.0) for x in (0.125, 0.375, 0.625, 0.875)]
    e_leaves = [
        trace_leaf(e_field, p, params, step=cfg.step, max_arc=2.5) for p in e_starts
    ]
    f_leaves = [
        trace_leaf(f_field, p, params, step=cfg.step, max_arc=6.0) for p in f_starts
    ]
    elements += _leaf_elements(e_leaves, "#c03030")
    elements += _leaf_elements(f_leaves, "#3030c0")
    closed_field = "F1" if time == "forward" else "E-1"
    elements += _leaf_elements(closed_leaves(closed_field, params), "#108010", width=0.004)
    return svgrender.document(elements)


def _figure_graph(cfg: RunConfig, params: MapParams, kind: str, time: str) -> str:
    """Unit-square graph of theta/pi or the arctan-compressed phi."""
    pts: list[tuple[float, float]] = []
    segs: list[list[tuple[float, float]]] = []
    prev = None
    for j in range(cfg.grid + 1):
        coord = (j % cfg.grid) / cfg.grid if j < cfg.grid else 1.0
        if kind == "theta":
            v = theta_field(coord, params, time).theta / math.pi  # type: ignore[arg-type]
        else:
            fn = phi if time == "forward" else phi_tilde
            v = 0.5 + math.atan(fn(coord, params)) / math.pi
        if prev is not None and abs(v - prev) > 0.5:
            segs.append(pts)
            pts = []
        pts.append((coord, v))
        prev = v
    segs.append(pts)
    elements = [svgrender.polyline(s, "#202020") for s in segs if len(s) >= 2]
    return svgrender.document(elements)


def _cmd_figures(cfg: RunConfig, params: MapParams) -> int:
    outdir = cfg.out or "figures"
    os.makedirs(outdir, exist_ok=True)
    files = {
        "foliation_forward.svg": _figure_foliation(cfg, params, "forward"),
        "foliation_backward.svg": _figure_foliation(cfg, params, "backward"),
        "theta_forward.svg": _figure_graph(cfg, params, "theta", "forward"),
        "theta_backward.svg": _figure_graph(cfg, params, "theta", "backward"),
        "phi_forward.svg": _figure_graph(cfg, params, "phi", "forward"),
        "phi_backward.svg": _figure_graph(cfg, params, "phi", "backward"),
    }
    if critical_constants(params).all_defined:
        lower, upper = tangency_curve(params, min(cfg.grid, 1024))
        plane = []
        for branch, color in ((lower, "#c03030"), (upper, "#3030c0")):
            plane.append(svgrender.polyline([(tp.ytilde, tp.y) for tp in branch], color))
        for i, tp in enumerate(tangency_landmarks(params), start=1):
            if tp is not None:
                plane.append(svgrender.circle((tp.ytilde, tp.y), 0.006, "#108010"))
        files["tangency_plane.svg"] = svgrender.document(plane)
        torus = _strip_elements(params)
        for branch, color in ((lower, "#c03030"), (upper, "#3030c0")):
            seg: list[tuple[float, float]] = []
            prev_x = None
            for tp in branch:
                if prev_x is not None and abs(tp.x - prev_x) > 0.5 and len(seg) >= 2:
                    torus.append(svgrender.polyline(seg, color))
                    seg = []
                seg.append((tp.x, tp.y))
                prev_x = tp.x
            if len(seg) >= 2:
                torus.append(svgrender.polyline(seg, color))
        files["tangency_torus.svg"] = svgrender.document(torus)
    for name, content in files.items():
        with open(os.path.join(outdir, name), "w", encoding="utf-8") as fh:
            fh.write(content)
        print(os.path.join(outdir, name))
    return 0


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments and execute one subcommand; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = _cfg_from_args(args)
    try:
        params = MapParams(cfg.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.subcommand == "constants":
            return _cmd_constants(cfg, params)
        if cfg.subcommand == "field":
            return _cmd_field(cfg, params, args.time)
        if cfg.subcommand == "leaf":
            return _cmd_leaf(cfg, params, args.field, args.x, args.y)
        if cfg.subcommand == "tangency":
            return _cmd_tangency(cfg, params)
        if cfg.subcommand == "cones":
            return _cmd_cones(cfg, params, args.inside_strip)
        if cfg.subcommand == "verify":
            return _cmd_verify(cfg, args.k_list)
        if cfg.subcommand == "figures":
            return _cmd_figures(cfg, params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.print_usage(sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
