"""Command-line front end.

Every subcommand writes data to files only; progress and diagnostics go to
stderr.  Exit codes: 0 success, 1 usage error, 2 validation or property
failure, 3 resource guard tripped.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import __version__
from . import io as pio
from .diffraction import detect_peaks, overlay_powder, radial_intensity
from .exact import point_in_triangle
from .exceptions import CapacityError, PinwheelError
from .kite_domino import kd_stats, pair_tiles
from .lattice import PowderModel, powder_decomposition, powder_rings
from .stats import (
    DEFAULT_MARGIN,
    control_points,
    eta_estimate,
    histogram_from_patch,
    proposition_checks,
)
from .substitution import (
    DEFAULT_MAX_DEPTH,
    control_point,
    default_workers,
    generate_patch,
    iter_subdivisions,
    seed,
    verify_partition,
)
from .validation import check_r_max_sq, make_k_grid

log = logging.getLogger("pinwheel")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_CAPACITY = 0, 1, 2, 3

# flags that never influence output bytes
_NOT_ECHOED = {"workers", "out", "out_prefix", "func", "command", "seed_info", "verbose"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_source(p, default_depth=None, allow_hist=False):
    g = p.add_mutually_exclusive_group(required=default_depth is None and not allow_hist)
    g.add_argument("--depth", type=int, default=default_depth, help="generate a patch of this depth")
    g.add_argument("--patch", help="read a patch file instead of generating one")
    if allow_hist:
        g.add_argument("--hist", help="read a histogram CSV instead of building one")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pinwheel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pinwheel {__version__}")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker count (default: $PINWHEEL_WORKERS or 1); never changes outputs")
    parser.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    parser.add_argument("--seed-info", action="store_true",
                        help="print the seed triangle and control-point convention, then exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("generate", help="write a patch file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", default="patch.pw")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("points", help="write control points")
    _add_source(p)
    p.add_argument("--out", default="points.csv")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("hist", help="write the ordered-pair distance histogram")
    _add_source(p)
    p.add_argument("--r-max-sq", default="5")
    p.add_argument("--window", choices=("full", "eroded"), default="eroded")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--out", default="hist.csv")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("eta", help="shell frequency estimates against the reference table")
    _add_source(p)
    p.add_argument("--r-max-sq", default="5")
    p.add_argument("--window", choices=("full", "eroded"), default="eroded")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--out", default="eta.csv")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("pairs", help="kite/domino pairing of the triangles")
    _add_source(p)
    p.add_argument("--out", default="pairs.csv")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("powder", help="square-lattice powder rings")
    p.add_argument("--n-max", type=int, default=25)
    p.add_argument("--out", default="rings.csv")
    p.set_defaults(func=cmd_powder)

    p = sub.add_parser("powder-sim", help="same-grain/cross-grain split of the powder model")
    p.add_argument("--grains", type=int, default=8)
    p.add_argument("--radius", type=float, default=50.0)
    p.add_argument("--angle", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=math.sqrt(5))
    p.add_argument("--bin-width", type=float, default=0.01)
    p.add_argument("--out", default="powder.csv")
    p.set_defaults(func=cmd_powder_sim)

    for name, helptext in (("diffract", "radial diffraction spectrum"),
                           ("compare", "spectrum against the powder rings")):
        p = sub.add_parser(name, help=helptext)
        _add_source(p, allow_hist=True)
        p.add_argument("--r-max-sq", default="1600")
        p.add_argument("--window", choices=("full", "eroded"), default="full")
        p.add_argument("--margin", type=float, default=0.0)
        p.add_argument("--taper", choices=("none", "bartlett", "gaussian"), default="bartlett")
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--k-min", type=float, default=0.0)
        p.add_argument("--k-max", type=float, default=4.0)
        p.add_argument("--k-step", type=float, default=0.001)
        if name == "diffract":
            p.add_argument("--out", default="spectrum.csv")
            p.set_defaults(func=cmd_diffract)
        else:
            p.add_argument("--n-max", type=int, default=25)
            p.add_argument("--out-prefix", default="compare")
            p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", help="run the exact property suite on a generated patch")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", default=None, help="optional report file")
    p.set_defaults(func=cmd_check)
    return parser


def _validate(args) -> None:
    """Reject bad numeric flags before any computation."""
    def need(cond, msg):
        if not cond:
            raise UsageError(msg)

    need(args.workers >= 1, "--workers must be >= 1")
    need(args.max_depth >= 0, "--max-depth must be >= 0")
    if getattr(args, "depth", None) is not None:
        need(args.depth >= 0, "--depth must be >= 0")
    if hasattr(args, "r_max_sq"):
        try:
            args.r_max_sq = check_r_max_sq(args.r_max_sq).value
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    for name in ("margin", "sigma", "k_min", "k_max", "k_step", "radius", "r_max", "bin_width",
                 "angle"):
        v = getattr(args, name, None)
        if v is not None:
            need(math.isfinite(v), f"--{name.replace('_', '-')} must be finite")
    if hasattr(args, "margin"):
        need(args.margin >= 0, "--margin must be >= 0")
    if hasattr(args, "k_step"):
        need(args.k_step > 0, "--k-step must be > 0")
        need(0 <= args.k_min <= args.k_max <= 16, "need 0 <= k-min <= k-max <= 16")
    if getattr(args, "taper", None) == "gaussian":
        need(args.sigma is not None and args.sigma > 0, "--taper gaussian needs --sigma > 0")
    if hasattr(args, "grains"):
        need(args.grains >= 1, "--grains must be >= 1")
        need(args.radius > 0, "--radius must be > 0")
        need(args.r_max > 0 and args.bin_width > 0, "--r-max and --bin-width must be > 0")
    if hasattr(args, "n_max"):
        need(args.n_max >= 1, "--n-max must be >= 1")


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _NOT_ECHOED or v is None:
            continue
        out[k] = v
    return out


def _header(args, inputs=()) -> list[str]:
    return pio.provenance_header(args.command, _config(args), inputs)


def _patch(args):
    if getattr(args, "patch", None):
        return pio.read_patch(args.patch), [args.patch]
    return generate_patch(args.depth, args.max_depth, workers=args.workers), []


def _histogram(args):
    if getattr(args, "hist", None):
        return pio.read_histogram(args.hist), [args.hist]
    if getattr(args, "depth", None) is None and not getattr(args, "patch", None):
        raise UsageError("one of --depth, --patch or --hist is required")
    patch, inputs = _patch(args)
    h = histogram_from_patch(patch, args.r_max_sq, window=args.window, margin=args.margin,
                             workers=args.workers)
    return h, inputs


def cmd_generate(args) -> int:
    patch = generate_patch(args.depth, args.max_depth, workers=args.workers)
    pio.write_patch(patch, args.out, _header(args))
    log.info("wrote %d tiles to %s", len(patch), args.out)
    return EXIT_OK


def cmd_points(args) -> int:
    patch, inputs = _patch(args)
    pts = control_points(patch)
    pio.write_points(pts, args.out, _header(args, inputs))
    log.info("wrote %d control points to %s", len(pts), args.out)
    return EXIT_OK


def cmd_hist(args) -> int:
    h, inputs = _histogram(args)
    pio.write_histogram(h, args.out, _header(args, inputs))
    log.info("%d keys, %d ordered pairs, window area %.6g", len(h), h.total_pairs, h.window_area)
    return EXIT_OK


def cmd_eta(args) -> int:
    h, inputs = _histogram(args)
    est = eta_estimate(h)
    pio._write(args.out, pio.eta_lines(est, _header(args, inputs)))
    for e in est:
        if e.eta_exact is not None:
            log.info("r^2=%-7s eta_hat=%.5f exact=%-8s%s dev=%+.4f", e.r_sq, e.eta_hat,
                     e.eta_exact, "*" if e.starred else " ", e.relative_deviation)
    return EXIT_OK


def cmd_pairs(args) -> int:
    patch, inputs = _patch(args)
    report = pair_tiles(patch)
    pio._write(args.out, pio.pairs_lines(report, _header(args, inputs)))
    st = kd_stats(report)
    log.info("kites=%d dominoes=%d kite fraction=%.6f boundary unmatched=%d interior unmatched=%d",
             st.kites, st.dominoes, st.kite_fraction, len(report.boundary_unmatched),
             len(report.interior_unmatched))
    return EXIT_OK if report.perfect_interior else EXIT_VALIDATION


def cmd_powder(args) -> int:
    pio._write(args.out, pio.rings_lines(powder_rings(args.n_max), _header(args)))
    return EXIT_OK


def cmd_powder_sim(args) -> int:
    model = PowderModel(args.grains, args.angle, args.radius)
    dec = powder_decomposition(model, args.r_max, args.bin_width)
    pio._write(args.out, pio.powder_sim_lines(dec, _header(args)))
    log.info("same-grain weight %.6g, cross-grain weight %.6g", dec.same_total(), dec.cross_total())
    return EXIT_OK


def _spectrum(args):
    h, inputs = _histogram(args)
    k = make_k_grid(args.k_min, args.k_max, args.k_step)
    return radial_intensity(h, k, args.taper, args.sigma, workers=args.workers), inputs


def cmd_diffract(args) -> int:
    s, inputs = _spectrum(args)
    pio._write(args.out, pio.spectrum_lines(s, _header(args, inputs)))
    return EXIT_OK


def cmd_compare(args) -> int:
    s, inputs = _spectrum(args)
    overlay = overlay_powder(s, powder_rings(args.n_max), detect_peaks(s))
    header = _header(args, inputs)
    curve, bars = pio.comparison_lines(overlay, header)
    prefix = args.out_prefix
    names = (f"{prefix}_spectrum.csv", f"{prefix}_bars.csv", f"{prefix}_plot.py")
    pio._write(names[0], curve)
    pio._write(names[1], bars)
    with open(names[2], "w", newline="\n") as fh:
        fh.write(pio.plot_script(os.path.basename(names[2]), os.path.basename(names[0]),
                                 os.path.basename(names[1])))
    log.info("first peak at k=%.4f, scale %.6g", overlay.first_peak.k, overlay.scale)
    return EXIT_OK


def cmd_check(args) -> int:
    patch = generate_patch(args.depth, args.max_depth, workers=args.workers)
    results = []

    bad = [i for i, (parent, kids) in enumerate(iter_subdivisions(args.depth, args.max_depth))
           if not verify_partition(parent, kids)]
    results.append(("subdivision partitions", not bad, f"{len(bad)} failing subdivisions"))

    ok_tiles = len(patch) == 5**args.depth and all(t.check_sides() for t in patch.tiles)
    results.append(("tile count and side lengths", ok_tiles, f"{len(patch)} tiles"))

    pts = [control_point(t) for t in patch.tiles]
    inside = all(point_in_triangle(p, t.vertices) == "inside" for p, t in zip(pts, patch.tiles))
    results.append(("control points distinct and interior",
                    inside and len(set(pts)) == len(pts), f"{len(set(pts))} distinct"))

    rep = proposition_checks(pts, 5, workers=args.workers)
    results.append(("rotated-lattice membership (i)", not rep.rotation_failures,
                    f"{len(rep.rotation_failures)} failures"))
    results.append(("coordinates in Z[1/5] (ii)", not rep.coordinate_failures,
                    f"{len(rep.coordinate_failures)} failures"))
    results.append(("squared distances (p^2+q^2)/5^l (iii)", not rep.distance_failures,
                    f"{rep.n_keys} keys, {len(rep.distance_failures)} failures"))

    kd = pair_tiles(patch)
    results.append(("kite/domino interior matching", kd.perfect_interior,
                    f"{len(kd.interior_unmatched)} interior unmatched"))

    lines = _header(args)
    for name, ok, detail in results:
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        log.info(line)
        lines.append(line)
    if args.out:
        pio._write(args.out, lines)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VALIDATION


def _seed_info() -> str:
    t = seed()
    return "\n".join([
        f"seed triangle: r={t.r} s={t.s} l={t.l} chirality={t.chirality}",
        "r = right-angle vertex, r-s = unit leg, r-l = leg of length 2",
        "control point: r + (s - r)/2 + (l - r)/4; the seed's is the origin",
        "inflation: (x, y) -> (2x - y, x + 2y); subdivision children c1..c5 with "
        "chirality pattern (-,-,+,+,-)",
    ])


def main(argv=None) -> int:
    parser = build_parser()
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        args = parser.parse_args(argv)
        if args.workers is None:
            args.workers = default_workers()
        if args.seed_info:
            print(_seed_info(), file=sys.stderr)
            return EXIT_OK
        if not args.command:
            raise UsageError("a subcommand is required")
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"pinwheel: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"pinwheel: resource guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (PinwheelError, ValueError, OSError) as exc:
        print(f"pinwheel: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
