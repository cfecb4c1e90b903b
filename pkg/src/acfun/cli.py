"""Command-line entry point: ``acfun gallery list | verify <target> | compute <what>``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from .constructions import (
    build_pathology,
    build_zigzag,
    find_witnesses,
    gallery,
    gallery_catalog,
    parse_seq,
    rademacher,
    schauder,
)
from .errors import ACFunError
from .measure import DerivativeField, distribution, grid_distribution, lp_norm
from .realfn import Fn1, Interval, to_fraction
from .report import Report, Table, to_csv_tables, to_json
from .variation import ac_modulus, lipschitz_estimate, variation_refined
from . import verify as V

VERIFY_TARGETS = ("theorem2", "theorem3", "corollary3", "fichtenholz", "schauder")
COMPUTE_TARGETS = ("variation", "ac-modulus", "lipschitz", "norm", "distribution")


@dataclass
class RunConfig:
    command: str
    target: Optional[str] = None
    f: Optional[str] = None
    u: str = "geometric:0.5"
    depth: int = 10
    levels: int = 6
    grid: int = 4096
    tol: float = 1e-8
    seed: int = 0x5EED
    deltas: list = field(default_factory=lambda: [0.01])
    ps: list = field(default_factory=lambda: [2.0])
    alphas: list = field(default_factory=lambda: [1.0])
    lo: Optional[str] = None
    hi: Optional[str] = None
    method: Optional[str] = None
    format: str = "json"
    out: Optional[str] = None

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in ("out",)}


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _number(text: str):
    """Exact rational when the text is a plain decimal or fraction, float otherwise."""
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acfun", description="Counterexamples to absolute continuity of superpositions.")
    p.add_argument("--version", action="version", version=f"acfun {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None, help="output path (csv: one file per table, suffixed by table name)")
        sp.add_argument("--seed", type=lambda s: int(s, 0), default=0x5EED)
        sp.add_argument("--grid", type=int, default=4096)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--levels", type=int, default=None)

    g = sub.add_parser("gallery", help="list the catalog")
    g.add_argument("action", choices=("list",))
    common(g)

    v = sub.add_parser("verify", help="run a verification bundle")
    v.add_argument("target", choices=VERIFY_TARGETS)
    v.add_argument("--u", default="geometric:0.5", help="sequence, e.g. geometric:0.5 or transformed:harmonic")
    v.add_argument("--f", default=None, help="function for the zigzag pipeline (default xlnx)")
    v.add_argument("--p", default=None, help="comma-separated exponents")
    common(v)

    c = sub.add_parser("compute", help="compute one quantity")
    c.add_argument("what", choices=COMPUTE_TARGETS)
    c.add_argument("--f", required=True, help="gallery name, zigzag:<name>, pathology-diagonal, pathology-grad-x, schauder:<n>, ...")
    c.add_argument("--u", default="geometric:0.5")
    c.add_argument("--from", dest="lo", default=None)
    c.add_argument("--to", dest="hi", default=None)
    c.add_argument("--delta", default="0.01", help="comma-separated budgets")
    c.add_argument("--p", default="2", help="comma-separated exponents")
    c.add_argument("--alpha", default="1", help="comma-separated levels")
    c.add_argument("--method", default=None)
    common(c)
    return p


def _config(args, parser) -> RunConfig:
    depth = args.depth
    if depth is None:
        depth = 16 if getattr(args, "what", None) == "variation" else (12 if getattr(args, "target", None) == "corollary3" else 10)
    if depth < 1:
        parser.error(f"--depth must be >= 1, got {depth}")
    if args.grid < 2:
        parser.error(f"--grid must be >= 2, got {args.grid}")
    if args.tol <= 0:
        parser.error(f"--tol must be positive, got {args.tol}")
    levels = args.levels if args.levels is not None else (8 if getattr(args, "target", None) == "schauder" else 6)
    if levels < 1:
        parser.error(f"--levels must be >= 1, got {levels}")
    cfg = RunConfig(
        command=args.command,
        target=getattr(args, "target", None) or getattr(args, "what", None),
        f=getattr(args, "f", None),
        u=getattr(args, "u", "geometric:0.5"),
        depth=depth,
        levels=levels,
        grid=args.grid,
        tol=args.tol,
        seed=args.seed,
        format=args.format,
        out=args.out,
        lo=getattr(args, "lo", None),
        hi=getattr(args, "hi", None),
        method=getattr(args, "method", None),
    )
    try:
        if getattr(args, "delta", None):
            cfg.deltas = _floats(args.delta)
        if getattr(args, "p", None):
            cfg.ps = _floats(args.p)
        elif args.command == "verify":
            cfg.ps = [1.5, 2.0, 4.0]
        if getattr(args, "alpha", None):
            cfg.alphas = _floats(args.alpha)
    except ValueError as e:
        parser.error(str(e))
    return cfg


# ---------------------------------------------------------------------------


def resolve_function(name: str, cfg: RunConfig):
    """Descriptor for ``--f``."""
    if name.startswith("zigzag:"):
        f = gallery(name.split(":", 1)[1])
        return build_zigzag(find_witnesses(f, count=cfg.levels))
    if name.startswith("pathology-"):
        surface = build_pathology(parse_seq(cfg.u), cfg.depth)
        kind = name[len("pathology-") :]
        if kind == "diagonal":
            return surface.exact_diagonal()
        if kind in ("grad-x", "grad-y"):
            return DerivativeField(surface, kind[-1])
        if kind == "surface":
            return surface
    if name.startswith("schauder:"):
        return schauder(int(name.split(":", 1)[1]))
    if name.startswith("rademacher:"):
        return rademacher(int(name.split(":", 1)[1]))
    return gallery(name)


def _interval(f, cfg: RunConfig) -> Interval:
    lo = _number(cfg.lo) if cfg.lo is not None else f.domain.lo
    hi = _number(cfg.hi) if cfg.hi is not None else f.domain.hi
    return Interval(lo, hi)


def _need_fn1(f, what):
    if not isinstance(f, Fn1):
        raise ACFunError(f"{what} needs a one-variable function, got {getattr(f, 'name', f)}")


def cmd_gallery_list(cfg: RunConfig) -> Report:
    rep = Report(__version__, cfg.echo())
    t = Table("gallery", ["name", "kind", "domain", "anchor"])
    for e in gallery_catalog():
        t.add(e.name, e.kind, e.domain, e.anchor)
    rep.tables.append(t)
    return rep


def cmd_verify(cfg: RunConfig) -> Report:
    rep = Report(__version__, cfg.echo())
    tgt = cfg.target
    if tgt == "theorem3":
        v, t = V.pyramid_bundle(cfg.u, cfg.depth)
    elif tgt == "corollary3":
        v, t = V.lnx_dominance_bundle(cfg.depth, ps=cfg.ps, tol=cfg.tol)
    elif tgt == "theorem2":
        v, t = V.schwarz_zigzag_bundle(cfg.levels, cfg.grid, cfg.seed)
    elif tgt == "fichtenholz":
        v, t = V.primitive_bundle(cfg.f or "xlnx", cfg.levels, cfg.grid, cfg.seed)
    else:
        v, t = V.schauder_bundle(cfg.levels)
    rep.verdicts.extend(v)
    rep.tables.extend(t)
    return rep


def cmd_compute(cfg: RunConfig) -> Report:
    rep = Report(__version__, cfg.echo())
    f = resolve_function(cfg.f, cfg)
    what = cfg.target
    if what == "variation":
        _need_fn1(f, what)
        r = variation_refined(f, _interval(f, cfg), max_depth=cfg.depth, tol=cfg.tol)
        t = Table("variation", ["partition_size", "variation"])
        for size, val in r.per_depth:
            t.add(size, val)
        s = Table("variation-summary", ["from", "to", "estimate", "converged", "exact"])
        s.add(r.interval.lo, r.interval.hi, r.value if r.exact else r.estimate, r.converged, r.exact)
        rep.tables += [t, s]
    elif what == "ac-modulus":
        _need_fn1(f, what)
        iv = _interval(f, cfg)
        t = Table("ac-modulus", ["delta", "grid", "modulus", "total_length", "cells"])
        for d in cfg.deltas:
            r = ac_modulus(f, iv, d, cfg.grid)
            t.add(r.delta, r.grid_size, r.modulus, r.total_length, len(r.chosen_intervals))
        rep.tables.append(t)
    elif what == "lipschitz":
        _need_fn1(f, what)
        iv = _interval(f, cfg)
        if getattr(f, "dim", 1) == 2:
            L = f.slope_range()[1]
        else:
            L = lipschitz_estimate(f, iv, grid=cfg.grid, seed=cfg.seed)
        t = Table("lipschitz", ["from", "to", "estimate"])
        t.add(iv.lo, iv.hi, L)
        rep.tables.append(t)
    elif what == "norm":
        t = Table("norm", ["p", "integral_of_power", "norm"])
        for p in cfg.ps:
            val = lp_norm(f, p, method=cfg.method or "auto")
            t.add(p, val, float(val) ** (1 / p))
        rep.tables.append(t)
    elif what == "distribution":
        method = cfg.method or "exact"
        t = Table("distribution", ["alpha", "measure", "boundary_cells", "cell_measure"])
        for a in cfg.alphas:
            if method == "grid":
                g = grid_distribution(f, a, min(cfg.grid, 2048) if not isinstance(f, Fn1) else cfg.grid)
                t.add(a, g.value, g.boundary_cells, g.cell_measure)
            else:
                t.add(a, distribution(f, to_fraction(a), "exact"), None, None)
        rep.tables.append(t)
    return rep


def _emit(rep: Report, cfg: RunConfig):
    if cfg.format == "json":
        text = to_json(rep)
        if cfg.out:
            with open(cfg.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    tables = to_csv_tables(rep)
    if cfg.out:
        stem = cfg.out[:-4] if cfg.out.endswith(".csv") else cfg.out
        for name, text in tables.items():
            with open(f"{stem}.{name}.csv", "w", newline="") as fh:
                fh.write(text)
    else:
        sys.stdout.write("\r\n".join(tables.values()))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config(args, parser)
    try:
        if cfg.command == "gallery":
            rep = cmd_gallery_list(cfg)
        elif cfg.command == "verify":
            rep = cmd_verify(cfg)
        else:
            rep = cmd_compute(cfg)
    except (ACFunError, ValueError) as e:
        print(f"acfun: error: {e}", file=sys.stderr)
        return 2
    _emit(rep, cfg)
    for v in rep.verdicts:
        if not v.passed:
            print(f"acfun: {v.status}: {v.claim} {v.notes}".rstrip(), file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
