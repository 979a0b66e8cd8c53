"""CSV formats for measures, embeddings, distance matrices, MDS coordinates and benchmarks.

All files are UTF-8 with LF endings and a header row. Lines starting with
``#`` are comments (used to echo the random seed) and are skipped on read.
Floats are written with ``repr`` so they round-trip exactly.
"""

import csv
import logging

import numpy as np

from .lcot import TangentField
from .measures import MASS_TOL, DiscreteMeasure, GridDensity, InvalidMeasureError

__all__ = [
    "MeasureParseError",
    "read_measure",
    "write_measure",
    "write_density",
    "read_embedding",
    "write_embedding",
    "read_matrix",
    "write_matrix",
    "write_mds",
    "write_bench",
]

log = logging.getLogger(__name__)


class MeasureParseError(ValueError):
    pass


def _fmt(x):
    return repr(float(x))


def _rows(path):
    """(line_number, fields) for every non-comment, non-blank line."""
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            yield lineno, next(csv.reader([s]))


def _floats(fields, lineno, n, path):
    if len(fields) != n:
        raise MeasureParseError(f"{path}:{lineno}: expected {n} columns, got {len(fields)}")
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise MeasureParseError(f"{path}:{lineno}: not a number: {','.join(fields)!r}") from None


def _header(rows, path):
    try:
        lineno, head = next(rows)
    except StopIteration:
        raise MeasureParseError(f"{path}: empty file") from None
    return lineno, [h.strip() for h in head]


def read_measure(path):
    """Read a ``position,mass`` (discrete) or ``density`` (grid) file.

    Masses are normalized; a warning is logged when the correction exceeds
    the package mass tolerance. Non-positive masses, negative densities and
    positions outside [0, 1) raise :class:`InvalidMeasureError` naming the line.
    """
    rows = _rows(path)
    lineno, head = _header(rows, path)
    if head == ["density"]:
        vals = []
        for ln, f in rows:
            (v,) = _floats(f, ln, 1, path)
            if not np.isfinite(v) or v < 0:
                raise InvalidMeasureError(f"{path}:{ln}: density must be finite and non-negative, got {v!r}")
            vals.append(v)
        if not vals:
            raise MeasureParseError(f"{path}: no data rows")
        mean = float(np.mean(vals))
        if abs(mean - 1.0) > MASS_TOL:
            log.warning("%s: density mean %.12g renormalized to 1", path, mean)
        return GridDensity.from_values(vals)
    if head != ["position", "mass"]:
        raise MeasureParseError(f"{path}:{lineno}: header must be 'position,mass' or 'density'")
    pos, mass = [], []
    for ln, f in rows:
        x, m = _floats(f, ln, 2, path)
        if not (np.isfinite(x) and 0.0 <= x < 1.0):
            raise InvalidMeasureError(f"{path}:{ln}: position must lie in [0, 1), got {x!r}")
        if not (np.isfinite(m) and m > 0):
            raise InvalidMeasureError(f"{path}:{ln}: mass must be positive, got {m!r}")
        pos.append(x)
        mass.append(m)
    if not pos:
        raise MeasureParseError(f"{path}: no data rows")
    total = float(np.sum(mass))
    if abs(total - 1.0) > MASS_TOL:
        log.warning("%s: masses summed to %.12g and were renormalized", path, total)
        return DiscreteMeasure.from_weights(pos, mass)
    return DiscreteMeasure(pos, mass)


def _open_out(path, comments):
    fh = open(path, "w", newline="", encoding="utf-8")
    for c in comments or ():
        fh.write(f"# {c}\n")
    return fh, csv.writer(fh, lineterminator="\n")


def write_measure(path, m, comments=None):
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(["position", "mass"])
        for x, mass in zip(m.positions, m.masses):
            w.writerow([_fmt(x), _fmt(mass)])


def write_density(path, g, comments=None):
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(["density"])
        for v in g.values:
            w.writerow([_fmt(v)])


def write_embedding(path, f, comments=None):
    """One row per interval: reference-coordinate ends, lifted quantile value and the shift."""
    bp = f.breakpoints
    alpha = 0.0 if f.alpha is None else f.alpha
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(["t_start", "t_end", "quantile_value", "alpha"])
        for a, b, q in zip(bp[:-1], bp[1:], f.quantile_values):
            if b > a:
                w.writerow([_fmt(a), _fmt(b), _fmt(q), _fmt(alpha)])


def read_embedding(path):
    """Read an embedding written against the uniform reference."""
    rows = _rows(path)
    lineno, head = _header(rows, path)
    if head != ["t_start", "t_end", "quantile_value", "alpha"]:
        raise MeasureParseError(f"{path}:{lineno}: header must be 't_start,t_end,quantile_value,alpha'")
    data = [_floats(f, ln, 4, path) for ln, f in rows]
    if not data:
        raise MeasureParseError(f"{path}: no data rows")
    a = np.array(data)
    if a[0, 0] != 0.0 or a[-1, 1] != 1.0 or np.any(a[1:, 0] != a[:-1, 1]):
        raise InvalidMeasureError(f"{path}: intervals must tile [0, 1] without gaps")
    return TangentField(0.0, a[:, 1] - a[:, 0], a[:, 2], alpha=float(a[0, 3]))


def write_matrix(path, D, labels, comments=None):
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(list(labels))
        for row in np.asarray(D):
            w.writerow([_fmt(v) for v in row])


def read_matrix(path):
    rows = list(_rows(path))
    labels = [h.strip() for h in rows[0][1]]
    D = np.array([_floats(f, ln, len(labels), path) for ln, f in rows[1:]])
    return D, labels


def write_mds(path, labels, coords, comments=None):
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(["label", "x", "y"])
        for lab, c in zip(labels, np.asarray(coords)):
            w.writerow([lab, _fmt(c[0]), _fmt(c[1] if c.size > 1 else 0.0)])


def write_bench(path, records, comments=None):
    fh, w = _open_out(path, comments)
    with fh:
        w.writerow(["K", "N", "method", "seconds"])
        for r in records:
            w.writerow([r.K, r.N, r.method, _fmt(r.wall_time)])
