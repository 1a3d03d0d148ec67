"""Text file formats: patch files and the CSV tables written by the CLI.

Geometry is written with exact ``n:a:b`` scalar tokens; floats carry 12
significant digits.  Lines starting with ``#`` are provenance comments.
"""
from __future__ import annotations

import hashlib
import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from . import __version__
from .exact import DistanceKey, ExactPoint, ExactScalar
from .stats import DistanceHistogram, FrequencyEstimate
from .substitution import Patch, PlacedTriangle

PATCH_MAGIC = "pinwheel-patch v1"


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def provenance_header(command: str, config: dict, inputs: Iterable[str] = ()) -> list[str]:
    """Comment lines: version, sorted config echo and input checksums."""
    lines = [f"# pinwheel {__version__}", f"# command: {command}"]
    if config:
        lines.append("# config: " + " ".join(f"{k}={config[k]}" for k in sorted(config)))
    for path in inputs:
        lines.append(f"# input: {path} sha256={sha256_file(path)}")
    return lines


def _write(path, lines: Iterable[str]) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _data_lines(fh: TextIO) -> tuple[list[str], list[str]]:
    comments, data = [], []
    for raw in fh:
        line = raw.rstrip("\n")
        if not line:
            continue
        (comments if line.startswith("#") else data).append(line)
    return comments, data


# -- patch -------------------------------------------------------------------------


def patch_lines(patch: Patch, header: Sequence[str] = ()) -> list[str]:
    out = [f"{PATCH_MAGIC} depth={patch.depth}", *header]
    for t in patch.tiles:
        out.append(f"{t.r.token()};{t.s.token()};{t.l.token()};{t.chirality}")
    return out


def write_patch(patch: Patch, path, header: Sequence[str] = ()) -> None:
    _write(path, patch_lines(patch, header))


def read_patch(source) -> Patch:
    """Read a patch file (path or text stream)."""
    fh = open(source) if isinstance(source, (str, Path)) else source
    try:
        first = fh.readline().strip()
        if not first.startswith(PATCH_MAGIC + " depth="):
            raise ValueError(f"not a patch file (header {first!r})")
        depth = int(first.split("depth=", 1)[1])
        _, data = _data_lines(fh)
    finally:
        if fh is not source:
            fh.close()
    tiles = []
    for n, line in enumerate(data, start=2):
        parts = line.split(";")
        if len(parts) != 7:
            raise ValueError(f"line {n}: expected r;s;l;chirality, got {line!r}")
        sc = [ExactScalar.from_token(p) for p in parts[:6]]
        r, s, l = (ExactPoint._raw(sc[i], sc[i + 1]) for i in (0, 2, 4))
        chirality = int(parts[6])
        if chirality not in (-1, 1):
            raise ValueError(f"line {n}: chirality must be +1 or -1")
        tiles.append(PlacedTriangle(r, s, l, chirality, 0))
    if len(tiles) != 5**depth:
        raise ValueError(f"depth {depth} patch must hold {5**depth} tiles, found {len(tiles)}")
    return Patch(depth, tuple(tiles))


# -- points ---------------------------------------------------------------------------


def write_points(points: Sequence[ExactPoint], path, header: Sequence[str] = ()) -> None:
    _write(path, [*header, *(p.token() for p in points)])


def read_points(path) -> list[ExactPoint]:
    with open(path) as fh:
        _, data = _data_lines(fh)
    return [ExactPoint.from_token(line) for line in data]


# -- histogram ------------------------------------------------------------------------


def histogram_lines(h: DistanceHistogram, header: Sequence[str] = ()) -> list[str]:
    out = [*header,
           f"# window_area={fmt(h.window_area)}",
           f"# point_count={h.point_count}",
           f"# depth={'' if h.depth is None else h.depth}",
           f"# r_max_sq={h.r_max_sq.value}",
           f"# window={h.window}",
           f"# margin={fmt(h.margin)}",
           "s,ell,count"]
    for k, c in h.entries.items():
        if k.residual_two_exp:
            raise ValueError(f"key {k} has a power-of-4 denominator; the s,ell format cannot hold it")
        out.append(f"{k.s},{k.ell},{c}")
    return out


def write_histogram(h: DistanceHistogram, path, header: Sequence[str] = ()) -> None:
    _write(path, histogram_lines(h, header))


def read_histogram(path) -> DistanceHistogram:
    with open(path) as fh:
        comments, data = _data_lines(fh)
    meta = {}
    for c in comments:
        body = c[1:].strip()
        if "=" in body and " " not in body.split("=", 1)[0]:
            k, v = body.split("=", 1)
            meta[k] = v
    if not data or data[0] != "s,ell,count":
        raise ValueError("missing s,ell,count header")
    entries = {}
    for line in data[1:]:
        s, ell, c = (int(v) for v in line.split(","))
        entries[DistanceKey(s, ell, 0)] = c
    depth = meta.get("depth", "")
    return DistanceHistogram(entries, float(meta["window_area"]), int(meta["point_count"]),
                             DistanceKey.from_value(Fraction(meta["r_max_sq"])),
                             meta.get("window", "full"), float(meta.get("margin", 0)),
                             int(depth) if depth else None)


# -- tables ----------------------------------------------------------------------------


def eta_lines(estimates: Sequence[FrequencyEstimate], header: Sequence[str] = ()) -> list[str]:
    out = [*header, "r_sq,eta_exact,starred,eta_hat,pair_count,rel_dev"]
    for e in estimates:
        exact = "" if e.eta_exact is None else str(e.eta_exact)
        dev = e.relative_deviation
        out.append(f"{e.r_sq},{exact},{int(e.starred)},{fmt(e.eta_hat)},{e.pair_count},"
                   f"{'' if dev is None else fmt(dev)}")
    return out


def rings_lines(rings, header: Sequence[str] = ()) -> list[str]:
    return [*header, "n,r,intensity", *(f"{g.n},{fmt(g.r)},{g.intensity}" for g in rings)]


def powder_sim_lines(dec, header: Sequence[str] = ()) -> list[str]:
    out = [*header,
           f"# grains={dec.model.grains} angle={fmt(dec.model.angle)} radius={fmt(dec.model.radius)}",
           f"# area={fmt(dec.area)} r_max={fmt(dec.r_max)} "
           f"bin_width={fmt(dec.bin_edges[1] - dec.bin_edges[0]) if len(dec.bin_edges) > 1 else ''}",
           "# same rows: key = squared radius n; cross rows: key = lower bin edge",
           "kind,key_or_bin,weight"]
    out += [f"same,{n},{fmt(w)}" for n, w in dec.same.items()]
    out += [f"cross,{fmt(lo)},{fmt(w)}" for lo, w in zip(dec.bin_edges[:-1], dec.cross)]
    return out


def spectrum_lines(s, header: Sequence[str] = ()) -> list[str]:
    meta = [f"# {k}={v}" for k, v in sorted(s.metadata.items())]
    return [*header, *meta, "k,intensity",
            *(f"{fmt(k)},{fmt(v)}" for k, v in zip(s.k_grid, s.intensity))]


def comparison_lines(overlay, header: Sequence[str] = ()) -> tuple[list[str], list[str]]:
    curve = [*header, f"# scale={fmt(overlay.scale)} first_peak_k={fmt(overlay.first_peak.k)}",
             "k,intensity_scaled",
             *(f"{fmt(k)},{fmt(v)}" for k, v in zip(overlay.k, overlay.intensity_scaled))]
    bars = [*header, "r,bar_height", *(f"{fmt(r)},{h}" for r, h in overlay.bars)]
    return curve, bars


def pairs_lines(report, header: Sequence[str] = ()) -> list[str]:
    return [*header, "first_index,second_index,kind",
            *(f"{p.first},{p.second},{p.kind}" for p in report.pairs)]


PLOT_SCRIPT = '''"""Overlay of the pinwheel radial intensity and the square-lattice powder rings.

Usage: python {name}  (reads {curve} and {bars} from this directory)
"""
import csv
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(here, name)) as fh:
        rows = [r for r in fh if not r.startswith("#")]
    reader = csv.reader(rows)
    next(reader)
    return [tuple(float(v) for v in row) for row in reader]


curve = load("{curve}")
bars = load("{bars}")
fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
top.plot([k for k, _ in curve], [v for _, v in curve], color="black", lw=1)
top.set_ylabel("pinwheel I(k), scaled")
bottom.bar([r for r, _ in bars], [h for _, h in bars], width=0.02, color="grey")
bottom.set_ylabel("Z^2 powder ring intensity")
bottom.set_xlabel("k")
for ax in (top, bottom):
    ax.set_xlim(0.25, max(k for k, _ in curve))
fig.tight_layout()
fig.savefig(os.path.join(here, "{name}".replace(".py", ".png")), dpi=150)
'''


def plot_script(name: str, curve: str, bars: str) -> str:
    return PLOT_SCRIPT.format(name=name, curve=curve, bars=bars)


def lines_to_text(lines: Sequence[str]) -> str:
    buf = io.StringIO()
    for line in lines:
        buf.write(line + "\n")
    return buf.getvalue()
