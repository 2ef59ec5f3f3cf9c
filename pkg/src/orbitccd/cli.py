"""Command-line front end.

Subcommands
-----------
check   certified collision check of a scene file
bench   two-squares scaling benchmark, CSV on stdout
probe   oracle cross-validation suites
plot    per-square SVG histograms from ``bench --hist`` output, or orbit meshes

Exit codes: 0 success or certified, 1 suspect intervals, 2 input error,
3 soundness violation found by ``probe``.
"""
from __future__ import annotations

import argparse
import csv
import io
import statistics
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .detector import BALL_STRATEGIES, MASS_STRATEGIES, auto_mass_distribution
from .errors import OrbitCCDError
from .mesh import fat_polygon_mesh, merge, write_mesh
from .orbits import fat_polygon
from .scene_io import load_scene
from .scenes import CASES, load_bundled, load_corpus, two_squares
from .validation import check_scene, envelope_check, orbit_radius_ratios

EXIT_OK, EXIT_SUSPECT, EXIT_INPUT, EXIT_UNSOUND = 0, 1, 2, 3
BENCH_HEADER = ("n", "case", "strategy", "total_s", "avg_pair_s", "intersection_calls",
                "max_depth")
HIST_HEADER = ("n", "case", "strategy", "square", "row", "col", "time_s",
               "intersection_calls")
TIMING_COLUMNS = ("total_s", "avg_pair_s", "time_s")
SUITES = ("orbit", "envelope", "detector")
ORBIT_TOL = 1e-9
ORBIT_LOW = 0.95


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


@dataclass
class BenchRecord:
    n: int
    case: str
    mass_strategy: str
    total_time: float
    per_pair_time: float
    intersection_calls: int
    max_depth_seen: int

    def row(self):
        return [self.n, self.case, self.mass_strategy, f"{self.total_time:.6f}",
                f"{self.per_pair_time:.9f}", self.intersection_calls, self.max_depth_seen]


# ---------------------------------------------------------------------------
# helpers


def _fmt(x):
    return repr(float(x))


def _read_scene(spec):
    """Scene from a path, or from the bundled corpus as ``bundled:NAME``."""
    try:
        if spec.startswith("bundled:"):
            return load_bundled(spec[len("bundled:"):])
        return load_scene(spec)
    except OSError as exc:
        raise InputError(f"cannot read scene {spec!r}: {exc}") from exc
    except OrbitCCDError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _config(base, args):
    """Scene config with command-line overrides applied."""
    kw = {"threads": args.threads}
    if args.epsilon is not None:
        kw["epsilon"] = args.epsilon
    if args.max_depth is not None:
        kw["max_depth"] = args.max_depth
    if args.strategy is not None:
        kw["ball_strategy"] = args.strategy
    if args.mass is not None:
        kw["mass_strategy"] = args.mass
    try:
        return replace(base, **kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _n_values(tokens):
    """``3 4 5`` or ``1-6`` (inclusive) to a sorted list of grid sizes."""
    values = set()
    for tok in tokens:
        try:
            if "-" in tok:
                lo, hi = (int(v) for v in tok.split("-", 1))
                values.update(range(lo, hi + 1))
            else:
                values.add(int(tok))
        except ValueError as exc:
            raise InputError(f"bad grid size {tok!r}") from exc
    if not values or min(values) < 1:
        raise InputError("grid sizes must be at least 1")
    return sorted(values)


def _choices(value, allowed, what):
    if value == "all":
        return list(allowed)
    picked = [v.strip() for v in value.split(",") if v.strip()]
    bad = [v for v in picked if v not in allowed]
    if bad or not picked:
        raise InputError(f"unknown {what} {','.join(bad) or value!r}; "
                         f"choose from {', '.join(allowed)} or all")
    return picked


# ---------------------------------------------------------------------------
# check


def cmd_check(args, out):
    scene = _read_scene(args.scene)
    config = _config(scene.config, args)
    report = scene.run(config)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["moving", "fixed", "certified", "intersection_calls", "oversized_balls",
                    "max_depth", "intervals"])
        for p in report.pairs:
            spans = ";".join(f"{_fmt(lo)}:{_fmt(hi)}" for lo, hi in p.intervals)
            w.writerow([p.moving_index, p.fixed_index, int(p.certified), p.intersection_calls,
                        p.oversized_balls, p.max_depth, spans])
    else:
        out.write(f"scene: {args.scene}\n")
        out.write(f"pairs: {len(report.pairs)}  epsilon: {_fmt(report.epsilon)}  "
                  f"mass: {report.mass_strategy}  balls: {config.ball_strategy}\n")
        if report.certified:
            out.write("CERTIFIED NO COLLISION\n")
        for p in report.pairs:
            if p.certified:
                continue
            spans = " ".join(f"[{_fmt(lo)}, {_fmt(hi)}]" for lo, hi in p.intervals)
            out.write(f"SUSPECT pair ({p.moving_index}, {p.fixed_index}): {spans}\n")
        out.write(f"intersection_calls: {report.intersection_calls}  "
                  f"oversized_balls: {report.oversized_balls}  "
                  f"max_depth: {report.max_depth}\n")
    return EXIT_OK if report.certified else EXIT_SUSPECT


# ---------------------------------------------------------------------------
# bench


def run_bench(n, case, mass_strategy, reps=5, threads=1, ball_strategy=None):
    """One benchmark record plus per-moving-square (time, calls) arrays.

    Times are medians over ``reps`` runs; work counters come from the first
    run and do not depend on the repetition.
    """
    scene = two_squares(n, case, mass_strategy)
    kw = {"threads": threads}
    if ball_strategy is not None:
        kw["ball_strategy"] = ball_strategy
    config = replace(scene.config, **kw)
    totals, square_times, first = [], [], None
    for _ in range(max(1, reps)):
        report = scene.run(config)
        first = first or report
        totals.append(report.seconds)
        t = np.zeros(n * n)
        for p in report.pairs:
            t[p.moving_index] += p.seconds
        square_times.append(t)
    calls = np.zeros(n * n, dtype=int)
    for p in first.pairs:
        calls[p.moving_index] += p.intersection_calls
    total = statistics.median(totals)
    record = BenchRecord(n, case, mass_strategy, total, total / len(first.pairs),
                         first.intersection_calls, first.max_depth)
    return record, np.median(square_times, axis=0), calls


def cmd_bench(args, out):
    ns = _n_values(args.n)
    cases = _choices(args.case, CASES, "case")
    masses = _choices(args.mass or "all", MASS_STRATEGIES, "mass strategy")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    hist_rows = []
    for n in ns:
        for case in cases:
            for mass in masses:
                rec, times, calls = run_bench(n, case, mass, args.reps, args.threads,
                                              args.strategy)
                w.writerow(rec.row())
                out.flush()
                for k in range(n * n):
                    hist_rows.append([n, case, mass, k, k // n, k % n,
                                      f"{times[k]:.9f}", int(calls[k])])
    if args.hist:
        with open(args.hist, "w", newline="", encoding="utf-8") as fh:
            hw = csv.writer(fh, lineterminator="\n")
            hw.writerow(HIST_HEADER)
            hw.writerows(hist_rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# probe


def cmd_probe(args, out):
    suites = _choices(args.suite, SUITES, "suite")
    samples = args.samples
    unsound = 0
    if "orbit" in suites:
        r = orbit_radius_ratios(samples=samples, seed=args.seed)
        bad = int(np.count_nonzero(r > 1.0 + ORBIT_TOL))
        loose = int(np.count_nonzero(r < ORBIT_LOW))
        unsound += bad
        out.write(f"orbit: {len(r)} triples  ratio min {r.min():.6f} max {r.max():.6f}  "
                  f"violations {bad}  loose {loose}\n")
    if "envelope" in suites:
        e = envelope_check(samples=samples, seed=args.seed)
        unsound += e.violations
        out.write(f"envelope: {e.points} points in {e.configurations} configurations  "
                  f"violations {e.violations}\n")
    if "detector" in suites:
        if args.scene:
            scenes = [(s, _read_scene(s)) for s in args.scene]
        else:
            scenes = load_corpus()
        intersect = (lambda *a: False) if args.inject_unsound else None
        for name, scene in scenes:
            c = check_scene(name, scene, samples=max(samples, 2), intersect=intersect,
                            threads=args.threads)
            unsound += c.unsound + c.uncovered + len(c.eps_excess)
            verdict = "certified" if c.certified else "suspect"
            status = "ok" if c.ok else "VIOLATION"
            out.write(f"detector: {name}  {verdict}  oracle_min {c.oracle_min:.6g}  "
                      f"unsound {c.unsound}  uncovered {c.uncovered}  "
                      f"eps_excess {len(c.eps_excess)}  {status}\n")
    out.write("probe: PASS\n" if unsound == 0 else f"probe: FAIL ({unsound} violations)\n")
    return EXIT_OK if unsound == 0 else EXIT_UNSOUND


# ---------------------------------------------------------------------------
# plot


def read_hist(text):
    """Group ``bench --hist`` rows by (n, case, strategy).

    Raises
    ------
    InputError
        For empty input, a wrong header or a malformed row.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError("empty CSV")
    if tuple(rows[0]) != HIST_HEADER:
        raise InputError(f"expected header {','.join(HIST_HEADER)}")
    if len(rows) == 1:
        raise InputError("CSV has no data rows")
    groups = {}
    for line, row in enumerate(rows[1:], start=2):
        try:
            n, case, strategy, square, _, _, t, calls = row
            key = (int(n), case, strategy)
            groups.setdefault(key, {})[int(square)] = (float(t), int(calls))
        except ValueError as exc:
            raise InputError(f"line {line}: malformed row") from exc
    for (n, case, strategy), cells in groups.items():
        if sorted(cells) != list(range(n * n)):
            raise InputError(f"group n={n} {case} {strategy} does not cover {n * n} squares")
    return groups


def _color(u):
    # white to dark red
    u = min(max(u, 0.0), 1.0)
    return "#{:02x}{:02x}{:02x}".format(255 - int(80 * u), int(255 * (1 - u)),
                                        int(255 * (1 - u)))


def hist_svg(groups, value="time", cell=24):
    """Standalone SVG with one n x n panel per group."""
    k = 0 if value == "time" else 1
    pad, title = 10, 18
    panels, x, height = [], pad, 0
    for (n, case, strategy), cells in sorted(groups.items()):
        vals = np.array([cells[i][k] for i in range(n * n)], dtype=float)
        top = vals.max() if vals.max() > 0 else 1.0
        size = max(n * cell, 120)
        step = size / n
        parts = [f'<text x="{x}" y="{pad + 12}" font-size="12">n={n} {case} {strategy}</text>']
        for i, v in enumerate(vals):
            r, c = divmod(i, n)
            # row 0 at the bottom, as in a plan view of the square
            y = pad + title + (n - 1 - r) * step
            parts.append(f'<rect class="cell" x="{x + c * step:.2f}" y="{y:.2f}" '
                         f'width="{step:.2f}" height="{step:.2f}" fill="{_color(v / top)}" '
                         f'stroke="#888" stroke-width="0.5"><title>square {i}: {v:.6g}'
                         f'</title></rect>')
        panels.append("\n".join(parts))
        x += size + 2 * pad
        height = max(height, size)
    width = x - pad
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
            f'height="{height + title + 2 * pad:.0f}">\n' + "\n".join(panels) + "\n</svg>\n")


def cmd_plot(args, out):
    if args.mesh:
        if args.radius is None or not args.radius > 0:
            raise InputError("--mesh needs a positive --radius")
        scene = _read_scene(args.mesh)
        md = scene.mass_distribution()
        parts = []
        for poly in scene.moving:
            m = md if md is not None else auto_mass_distribution(
                scene.moving if (args.mass or scene.config.mass_strategy) == "global"
                else [poly])
            try:
                parts.append(fat_polygon_mesh(fat_polygon(poly, m, args.radius),
                                              args.resolution))
            except OrbitCCDError as exc:
                raise InputError(f"no fat polygon at radius {args.radius}: {exc}") from exc
        verts, faces = merge(parts)
        with _output(args.output, out) as fh:
            write_mesh(fh, verts, faces)
        return EXIT_OK
    if not args.csv:
        raise InputError("give a histogram CSV or --mesh SCENE")
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.csv!r}: {exc}") from exc
    svg = hist_svg(read_hist(text), args.value)
    with _output(args.output, out) as fh:
        fh.write(svg)
    return EXIT_OK


class _output:
    """File for ``path``, or the given stream when path is None or ``-``."""

    def __init__(self, path, stream):
        self.path, self.stream, self.fh = path, stream, None

    def __enter__(self):
        if self.path in (None, "-"):
            return self.stream
        try:
            self.fh = open(self.path, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise InputError(f"cannot write {self.path!r}: {exc}") from exc
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not None:
            self.fh.close()


# ---------------------------------------------------------------------------
# parser


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, help="termination threshold (model units)")
    common.add_argument("--max-depth", type=_positive_int, help="maximal recursion depth")
    common.add_argument("--strategy", choices=[s for s in BALL_STRATEGIES if s != "curvature"],
                        help="bounding-ball strategy for motion segments")
    common.add_argument("--mass", help="mass strategy: global or per_polygon "
                        "(bench also takes a comma list or all)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads for polygon pairs")

    parser = argparse.ArgumentParser(prog="orbitccd", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check a scene file")
    p.add_argument("scene", help="scene file, or bundled:NAME")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", parents=[common], help="two-squares scaling benchmark")
    p.add_argument("--n", nargs="+", default=["1-4"], help="grid sizes, e.g. 3 4 or 1-6")
    p.add_argument("--case", default="all", help="hit, nearhit, miss, comma list or all")
    p.add_argument("--reps", type=_positive_int, default=5, help="timing repetitions")
    p.add_argument("--hist", help="write per-square histogram CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("probe", parents=[common], help="oracle cross-validation")
    p.add_argument("--suite", default="all", help="orbit, envelope, detector, list or all")
    p.add_argument("--samples", type=_positive_int, default=10_000,
                   help="oracle samples per triple / in total / per pair")
    p.add_argument("--scene", action="append", help="scene to check instead of the corpus")
    p.add_argument("--inject-unsound", action="store_true",
                   help="test hook: the intersection predicate always reports a miss")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("plot", parents=[common], help="SVG histograms or orbit meshes")
    p.add_argument("csv", nargs="?", help="histogram CSV written by bench --hist")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.add_argument("--value", choices=("time", "calls"), default="time")
    p.add_argument("--mesh", metavar="SCENE", help="mesh the fat moving polygons of a scene")
    p.add_argument("--radius", type=float, help="displacement-ball radius for --mesh")
    p.add_argument("--resolution", type=_positive_int, default=8)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if args.mass is not None and args.command != "bench" and args.mass not in MASS_STRATEGIES:
        print(f"orbitccd: unknown mass strategy {args.mass!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"orbitccd: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
