"""Command-line front end.

Subcommands
-----------
edges    support radii, curvatures and topology of a potential
cdf      exact CDF on a Y (or raw y) grid, optionally with Gumbel and phi columns
sample   Monte-Carlo extremes (kostlan, invcdf, metropolis) plus their ECDF
compare  exact vs Gumbel vs phi deviations on a shared Y grid

Exit codes: 0 success, 2 bad input or inadmissible potential, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import asymptotics as asym
from . import io
from .curves import CdfCurve, EdgeKind
from .errors import (
    AmbiguousEdgeError,
    BracketError,
    CoulombExtremesError,
    DegenerateEdgeError,
    DomainError,
    InadmissiblePotentialError,
    SmallNError,
)
from .exact_cdf import cdf_curve
from .potential import RadialPotential, check_admissible, parse_potential, require_admissible, support_edges
from .sampler import (
    RngConfig,
    build_invcdf_tables,
    empirical_cdf,
    extremes_from_snapshots,
    ks_distance,
    metropolis_run,
    radial_histogram,
    sample_gauss_extreme_kostlan,
    sample_general_extreme_invcdf,
)

log = logging.getLogger("coulomb_extremes")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_INPUT_ERRORS = (DomainError, SmallNError, InadmissiblePotentialError, AmbiguousEdgeError,
                 BracketError, DegenerateEdgeError)


@dataclass
class RunConfig:
    command: str
    potential: str
    N: int
    edge_kind: EdgeKind
    ymin: float
    ymax: float
    points: int
    raw_y: bool
    m: int
    rng: RngConfig
    out: Optional[str]
    format: str

    def __post_init__(self):
        if self.points < 2:
            raise DomainError("--points must be >= 2")
        if self.N < 1:
            raise DomainError("--N must be >= 1")
        if self.format not in ("csv", "json"):
            raise DomainError("--format must be csv or json")
        if not self.ymax > self.ymin:
            raise DomainError("--ymax must exceed --ymin")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.ymin, self.ymax, self.points)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            command=args.command,
            potential=args.potential,
            N=int(getattr(args, "N", 1) or 1),
            edge_kind=EdgeKind.parse(getattr(args, "edge", "outer")),
            ymin=getattr(args, "ymin", -4.0),
            ymax=getattr(args, "ymax", 8.0),
            points=getattr(args, "points", 241),
            raw_y=getattr(args, "raw_y", False),
            m=getattr(args, "m", 1000),
            rng=RngConfig(getattr(args, "seed", 0), getattr(args, "stream", 0)),
            out=args.out,
            format=args.format,
        )


# ---------------------------------------------------------------------------
# helpers


@contextlib.contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _emit(table: io.Table, command: str, cfg: RunConfig, path: Optional[str], extra=None):
    with _open_out(path) as fh:
        if cfg.format == "json":
            fh.write(io.to_json(io.table_to_json(command, table, extra)))
        else:
            io.write_csv(table, fh)


def _base_meta(p: RadialPotential, cfg: RunConfig, method: str) -> dict:
    return {
        "potential": p.id,
        "N": cfg.N,
        "edge": cfg.edge_kind.value,
        "method": method,
        "seed": cfg.rng.seed,
        "stream": cfg.rng.stream_id,
        "version": io.provenance(),
    }


def _load(cfg: RunConfig):
    p = parse_potential(cfg.potential)
    require_admissible(p)
    edges = support_edges(p)
    if cfg.edge_kind is EdgeKind.INNER and edges.f_minus is None and not cfg.raw_y:
        raise DomainError(
            f"{p.id} has disk topology (a_- = 0); the inner-edge scaling is undefined. "
            "Use --raw-y to evaluate P(|z_min| >= y) on raw radii."
        )
    return p, edges


def _scaling(p, edges, cfg: RunConfig):
    return asym.ScalingMap.for_edges(edges, cfg.N, cfg.edge_kind, gaussian=(p.id == "gauss"))


def _scaling_or_none(p, edges, cfg):
    try:
        return _scaling(p, edges, cfg)
    except (SmallNError, DomainError):
        return None


def _sub_path(out: Optional[str], tag: str, fmt: str) -> Optional[str]:
    if out is None or out == "-":
        return None
    path = Path(out)
    return str(path.with_name(f"{path.stem}.{tag}.{fmt}"))


# ---------------------------------------------------------------------------
# commands


def cmd_edges(args) -> int:
    p = parse_potential(args.potential)
    report = check_admissible(p)
    if not report.admissible:
        print(str(report), file=sys.stderr)
        return EXIT_INPUT
    edges = support_edges(p)
    if args.format == "json":
        doc = {"command": "edges", "potential": p.id, "topology": edges.topology.value,
               "admissible": True, "report": report.as_dict()}
        doc.update(edges.as_dict())
        with _open_out(args.out) as fh:
            fh.write(io.to_json(doc))
    else:
        f_minus = "none" if edges.f_minus is None else io.format_value(edges.f_minus)
        with _open_out(args.out) as fh:
            fh.write(f"potential={p.id}\n")
            fh.write(f"a_minus={io.format_value(edges.a_minus)}\n")
            fh.write(f"a_plus={io.format_value(edges.a_plus)}\n")
            fh.write(f"F_minus={f_minus}\n")
            fh.write(f"F_plus={io.format_value(edges.f_plus)}\n")
            fh.write(f"topology={edges.topology.value}\n")
    return EXIT_OK


def _curve_columns(p, edges, cfg: RunConfig, asymptotics: bool, tail_only=None):
    scaling = None if cfg.raw_y else _scaling(p, edges, cfg)
    if cfg.raw_y:
        scaling_for_Y = _scaling(p, edges, cfg) if asymptotics else _scaling_or_none(p, edges, cfg)
    else:
        scaling_for_Y = scaling
    curve = cdf_curve(p, cfg.N, cfg.edge_kind, cfg.grid, scaling=scaling, tail_only=tail_only)
    if cfg.raw_y:
        y = cfg.grid
        Y = (np.array([scaling_for_Y.Y_from_y(v) for v in y]) if scaling_for_Y is not None
             else np.full(len(y), np.nan))
    else:
        Y = cfg.grid
        y = curve.y
    cols = {"Y": Y, "y": y, "F_exact": curve.values}
    if np.any(curve.flags):
        cols["clamped"] = curve.flags.astype(float)
    if asymptotics:
        s = scaling_for_Y
        cols["F_gumbel"] = asym.gumbel_cdf(Y)
        cols["F_phi"] = np.exp(asym.phi(s, Y))
    meta = _base_meta(p, cfg, curve.meta["method"])
    if scaling_for_Y is not None:
        meta["alpha"] = scaling_for_Y.alpha
        meta["alpha_folded"] = scaling_for_Y.folded
    if tail_only is not None:
        meta["tail_only"] = int(tail_only)
        meta["approximate"] = True
    return cols, meta, scaling_for_Y


def cmd_cdf(args) -> int:
    cfg = RunConfig.from_args(args)
    p, edges = _load(cfg)
    cols, meta, _ = _curve_columns(p, edges, cfg, args.with_asymptotics, args.tail_only)
    _emit(io.Table.from_columns(cols, meta), "cdf", cfg, cfg.out)
    return EXIT_OK


def _summary(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b))
    return {"sup": float(np.max(d)), "mean": float(np.mean(d))}


def cmd_compare(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.raw_y:
        raise DomainError("compare works on the rescaled Y grid; drop --raw-y")
    p, edges = _load(cfg)
    cols, meta, _ = _curve_columns(p, edges, cfg, True, args.tail_only)
    summary = {
        "exact_vs_gumbel": _summary(cols["F_exact"], cols["F_gumbel"]),
        "exact_vs_phi": _summary(cols["F_exact"], cols["F_phi"]),
        "gumbel_vs_phi": _summary(cols["F_gumbel"], cols["F_phi"]),
    }
    if cfg.format == "json":
        _emit(io.Table.from_columns(cols, meta), "compare", cfg, cfg.out, {"summary": summary})
    else:
        rows = {"pair": np.arange(3, dtype=float),
                "sup": [summary[k]["sup"] for k in summary],
                "mean": [summary[k]["mean"] for k in summary]}
        meta = dict(meta, pairs="0=exact_vs_gumbel;1=exact_vs_phi;2=gumbel_vs_phi")
        _emit(io.Table.from_columns(rows, meta), "compare", cfg, cfg.out)
    for k, v in summary.items():
        print(f"{k}: sup={v['sup']:.6g} mean={v['mean']:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = RunConfig.from_args(args)
    p, edges = _load(cfg)
    method = args.method
    hist = None
    if method == "kostlan":
        if p.id != "gauss":
            raise DomainError("the kostlan sampler applies to the Gaussian potential only; use invcdf")
        samples = sample_gauss_extreme_kostlan(cfg.N, cfg.m, cfg.rng, cfg.edge_kind)
    elif method == "invcdf":
        samples = sample_general_extreme_invcdf(p, cfg.N, cfg.m, cfg.rng, cfg.edge_kind,
                                                tables=build_invcdf_tables(p, cfg.N))
    else:
        run = metropolis_run(p, cfg.N, args.sweeps, eta=args.eta, rng=cfg.rng,
                             burn_in=args.burn_in, thin=args.thin)
        log.info("metropolis acceptance rate %.3f, %d singular rejections",
                 run.acceptance_rate, run.singular_rejections)
        samples = extremes_from_snapshots(run, cfg.rng, cfg.edge_kind)
        hist = radial_histogram(run.snapshots, bins=args.bins)

    meta = _base_meta(p, cfg, samples.method)
    meta.update({k: v for k, v in samples.meta().items() if k not in meta})
    if method == "metropolis":
        meta.update(sweeps=args.sweeps, eta=args.eta, burn_in=samples.burn_in, thin=samples.thinning)

    out = args.out
    _emit(io.Table.from_columns({"value": samples.values}, meta), "sample", cfg, out)

    # ECDF on the same grid as the exact curve
    scaling = None if cfg.raw_y else _scaling_or_none(p, edges, cfg)
    if scaling is None and not cfg.raw_y:
        lo, hi = float(samples.values.min()), float(samples.values.max())
        y_grid = np.linspace(lo, hi, cfg.points)
    elif scaling is None:
        y_grid = cfg.grid
    else:
        y_grid = np.array([scaling.y_from_Y(v) for v in cfg.grid])
    order = np.argsort(y_grid)
    y_grid = y_grid[order]
    ecdf = empirical_cdf(samples, y_grid)
    values = ecdf.values if cfg.edge_kind is EdgeKind.OUTER else 1.0 - _left_ecdf(samples.values, y_grid)
    cols = {"y": y_grid, "F_empirical": values}
    if scaling is not None:
        cols = {"Y": cfg.grid[order], **cols}
    ks = None
    if args.compare:
        exact = cdf_curve(p, cfg.N, cfg.edge_kind, np.clip(y_grid, 0.0, None))
        cols["F_exact"] = exact.values
        ks = ks_distance(CdfCurve(y_grid, values), CdfCurve(y_grid, exact.values))
        meta["ks_distance"] = ks
        print(f"KS distance to exact CDF: {ks:.6g}")
    ecdf_path = _sub_path(out, "ecdf", cfg.format)
    extra = {"ks_distance": ks} if ks is not None else None
    if ecdf_path is not None:
        _emit(io.Table.from_columns(cols, dict(meta, method="empirical")), "sample", cfg, ecdf_path, extra)
    if hist is not None:
        hist_path = _sub_path(out, "hist", cfg.format)
        r_edges, mass = hist
        table = io.Table.from_columns({"r_lo": r_edges[:-1], "r_hi": r_edges[1:], "mass": mass},
                                      dict(meta, method="radial-histogram"))
        if hist_path is not None:
            _emit(table, "sample", cfg, hist_path)
    return EXIT_OK


def _left_ecdf(values, grid):
    # P(X < y) on the grid, so that 1 - it is P(X >= y)
    srt = np.sort(values)
    return np.searchsorted(srt, grid, side="left") / srt.size


# ---------------------------------------------------------------------------
# parser


def _add_common(sp, grid=True):
    sp.add_argument("--potential", required=True,
                    help="gauss | cubic:<c> | quadlin:<s> | halfquadlin:<s> | poly:<c1>,<c2>,...")
    sp.add_argument("--out", default=None, help="output file (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    if grid:
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--edge", choices=("outer", "inner"), default="outer")
        sp.add_argument("--ymin", type=float, default=-4.0)
        sp.add_argument("--ymax", type=float, default=8.0)
        sp.add_argument("--points", type=int, default=241)
        sp.add_argument("--raw-y", action="store_true", help="interpret the grid as raw moduli y")
        sp.add_argument("--tail-only", type=int, default=None, metavar="K",
                        help="keep only the K largest-n factors (approximate)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coulomb-extremes", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("edges", help="support edges and admissibility")
    _add_common(sp, grid=False)
    sp.set_defaults(func=cmd_edges)

    sp = sub.add_parser("cdf", help="exact CDF on a grid")
    _add_common(sp)
    sp.add_argument("--with-asymptotics", action="store_true", help="add Gumbel and phi columns")
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("compare", help="exact vs Gumbel vs phi deviations")
    _add_common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sample", help="Monte-Carlo extremes and their ECDF")
    _add_common(sp)
    sp.set_defaults(out="sample.csv")
    sp.add_argument("--m", type=int, default=1000, help="number of replicas (kostlan, invcdf)")
    sp.add_argument("--method", choices=("kostlan", "invcdf", "metropolis"), default="kostlan")
    sp.add_argument("--sweeps", type=int, default=1000, help="metropolis production sweeps")
    sp.add_argument("--eta", type=float, default=1.0, help="metropolis step scale (step = eta/N)")
    sp.add_argument("--burn-in", type=int, default=None, help="metropolis burn-in sweeps (default 20 N)")
    sp.add_argument("--thin", type=int, default=None, help="sweeps between snapshots (default N)")
    sp.add_argument("--bins", type=int, default=50, help="radial histogram bins")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--compare", action="store_true", help="print the KS distance to the exact CDF")
    sp.set_defaults(func=cmd_sample)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InadmissiblePotentialError as exc:
        print(f"error: {exc.report}", file=sys.stderr)
        return EXIT_INPUT
    except SmallNError as exc:
        print(f"error: {exc} (the rescaled grid needs N >= 3; use --raw-y for small N)", file=sys.stderr)
        return EXIT_INPUT
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CoulombExtremesError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
