"""Command-line driver.

Subcommands::

    activeflux run [--config FILE] [--problem NAME] [--nx N] ...
    activeflux converge [--resolutions 25 50 100 200]
    activeflux analyze [--nx N --dx DX ...] [--output sweep.csv]
    activeflux stencil-dump [--dx DX --dy DY --cfl NU] --output DIR

A config file holds flat ``key = value`` lines using the same names as the
long options (with underscores); options given on the command line win.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import symbol_sweep, write_sweep_csv
from .errors import ActiveFluxError
from .evolution import TargetClass, build_stencil_set, write_stencil_csv
from .grid import Grid
from .output import write_field, write_manifest, write_radial_scatter
from .problems import PROBLEMS, convergence_study, make_problem
from .solver import DEFAULT_CFL, TimeStepper

log = logging.getLogger("activeflux")


@dataclass
class RunConfig:
    problem: str = "vortex"
    nx: int | None = None
    ny: int | None = None
    xmin: float | None = None
    xmax: float | None = None
    ymin: float | None = None
    ymax: float | None = None
    c: float = 1.0
    cfl: float = DEFAULT_CFL
    t_end: float | None = None
    output_every: int = 0
    output_dir: str = "output"
    format: str = "csv"
    seed: int = 0
    mode_x: int = 1
    mode_y: int = 2
    periodize: bool = True
    p: str = "0"
    u: str = "0"
    v: str = "0"

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}")
        for name in ("nx", "ny", "c", "cfl", "t_end"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive, got {val}")
        if self.output_every < 0:
            raise ValueError("output_every must be non-negative")
        if self.format not in ("csv", "vtk", "both"):
            raise ValueError(f"format must be csv, vtk or both, got {self.format!r}")

    def extent(self):
        bounds = (self.xmin, self.ymin, self.xmax, self.ymax)
        if all(b is None for b in bounds):
            return None, None
        if any(b is None for b in bounds):
            raise ValueError("give all of xmin, xmax, ymin, ymax or none")
        return (self.xmin, self.ymin), (self.xmax, self.ymax)


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if "bool" in kind:
        return text.strip().lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(text)
    if "float" in kind:
        return float(text)
    return text.strip()


def load_config(path) -> dict:
    """Read flat ``key = value`` lines into RunConfig keyword arguments."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + Path(path).read_text())
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, text in parser["run"].items():
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = _coerce(key, text)
    return out


def _snapshot(f, outdir: Path, step: int, fmt: str) -> None:
    stem = outdir / f"field_{step:06d}"
    if fmt in ("csv", "both"):
        write_field(f, stem.with_suffix(".csv"), "csv")
    if fmt in ("vtk", "both"):
        write_field(f, stem.with_suffix(".vtk"), "vtk")


def run(cfg: RunConfig) -> dict:
    """Run one problem and write snapshots and a manifest; returns the manifest."""
    cfg.validate()
    np.random.seed(cfg.seed)
    lower, upper = cfg.extent()
    prob = make_problem(cfg.problem, cfg.nx, cfg.ny, lower, upper, cfg.c, cfg.periodize,
                        (cfg.mode_x, cfg.mode_y), (cfg.p, cfg.u, cfg.v))
    t_end = cfg.t_end if cfg.t_end is not None else prob.t_end
    stepper = TimeStepper(prob.grid, cfg.cfl)
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    f = prob.initial_field()
    _snapshot(f, outdir, 0, cfg.format)

    def every(n, g):
        if cfg.output_every and n % cfg.output_every == 0:
            _snapshot(g, outdir, n, cfg.format)
        if n % 1000 == 0:
            log.info("step %d, t = %.6g", n, g.time)

    start = time.perf_counter()
    steps = []
    f = stepper.advance(f, t_end, lambda n, g: (steps.append(n), every(n, g)))
    wall = time.perf_counter() - start
    nsteps = steps[-1] if steps else 0
    if not cfg.output_every or nsteps % cfg.output_every:
        _snapshot(f, outdir, nsteps, cfg.format)
    if cfg.problem == "radial_shock":
        write_radial_scatter(f, outdir / "radial_scatter.csv")

    g = prob.grid
    manifest = {
        "version": __version__,
        "config": asdict(cfg),
        "grid": {"nx": g.nx, "ny": g.ny, "dx": g.dx, "dy": g.dy, "c": g.c, "origin": list(g.origin)},
        "cfl": cfg.cfl,
        "dt": stepper.dt,
        "steps": nsteps,
        "t_end": f.time,
        "wall_time": wall,
    }
    if prob.oracle is not None:
        x, y = g.coordinates("ev")
        manifest["edge_l1_error"] = float(np.mean(np.abs(f.ev[0] - prob.oracle(f.time, x, y)[0])))
    write_manifest(outdir / "manifest.json", **manifest)
    return manifest


def _run_command(args) -> int:
    values = load_config(args.config) if args.config else {}
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            values[f.name] = val
    manifest = run(RunConfig(**values))
    print(f"{manifest['steps']} steps to t = {manifest['t_end']:.6g} "
          f"in {manifest['wall_time']:.2f} s; output in {values.get('output_dir', 'output')}")
    return 0


def _converge_command(args) -> int:
    rows = convergence_study(args.resolutions, args.cfl, periodize=not args.literal)
    print(f"{'M':>6} {'L1 error':>14} {'order':>8}")
    for r in rows:
        order = "" if r.order is None else f"{r.order:.3f}"
        print(f"{r.cells:>6d} {r.error:>14.6e} {order:>8}")
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["M", "error", "order"])
            for r in rows:
                w.writerow([r.cells, repr(r.error), "" if r.order is None else repr(r.order)])
    return 0


def _analyze_command(args) -> int:
    grid = Grid(args.nx, args.ny, args.dx, args.dy or args.dx, args.c)
    rows = symbol_sweep(TimeStepper(grid, args.cfl), args.n_kx, args.n_ky)
    write_sweep_csv(rows, args.output)
    worst = max(r[5] for r in rows)
    defect = max(r[3] for r in rows)
    print(f"{len(rows)} wave numbers: max spectral radius {worst:.15f}, max scaled det {defect:.3e}")
    return 0


def _stencil_command(args) -> int:
    grid = Grid(3, 3, args.dx, args.dy or args.dx, args.c)
    dt = args.cfl * grid.dt_max
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for label, rho in (("half", 0.5 * grid.c * dt), ("full", grid.c * dt)):
        for st in build_stencil_set(grid, rho):
            write_stencil_csv(st, outdir / f"stencil_{st.target.lattice}_{label}.csv")
    print(f"wrote {2 * len(TargetClass)} stencil files to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="activeflux", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a problem and write snapshots")
    r.add_argument("--config")
    r.add_argument("--problem", choices=PROBLEMS)
    for name in ("nx", "ny", "output_every", "seed", "mode_x", "mode_y"):
        r.add_argument("--" + name.replace("_", "-"), dest=name, type=int)
    for name in ("xmin", "xmax", "ymin", "ymax", "c", "cfl", "t_end"):
        r.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    r.add_argument("--output-dir", dest="output_dir")
    r.add_argument("--format", choices=("csv", "vtk", "both"))
    r.add_argument("--literal", dest="periodize", action="store_const", const=False,
                   help="oblique waves without periodic images")
    for name in ("p", "u", "v"):
        r.add_argument("--" + name, help=f"custom problem: expression for {name}(x, y)")
    r.set_defaults(func=_run_command)

    cv = sub.add_parser("converge", help="oblique-wave convergence study")
    cv.add_argument("--resolutions", type=int, nargs="+", default=[25, 50, 100, 200])
    cv.add_argument("--cfl", type=float, default=DEFAULT_CFL)
    cv.add_argument("--literal", action="store_true")
    cv.add_argument("--output")
    cv.set_defaults(func=_converge_command)

    an = sub.add_parser("analyze", help="Fourier-symbol sweep")
    an.add_argument("--nx", type=int, default=16)
    an.add_argument("--ny", type=int, default=16)
    an.add_argument("--dx", type=float, default=1.0 / 16)
    an.add_argument("--dy", type=float)
    an.add_argument("--c", type=float, default=1.0)
    an.add_argument("--cfl", type=float, default=DEFAULT_CFL)
    an.add_argument("--n-kx", dest="n_kx", type=int, default=32)
    an.add_argument("--n-ky", dest="n_ky", type=int, default=32)
    an.add_argument("--output", default="symbol_sweep.csv")
    an.set_defaults(func=_analyze_command)

    sd = sub.add_parser("stencil-dump", help="write evolution stencil weights")
    sd.add_argument("--dx", type=float, default=1.0)
    sd.add_argument("--dy", type=float)
    sd.add_argument("--c", type=float, default=1.0)
    sd.add_argument("--cfl", type=float, default=DEFAULT_CFL)
    sd.add_argument("--output", default="stencils")
    sd.set_defaults(func=_stencil_command)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ActiveFluxError, ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
