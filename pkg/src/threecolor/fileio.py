"""Point CSV, body/digraph JSON, input jitter and SVG output."""

import csv
import io
import json
from xml.sax.saxutils import escape

import numpy as np

from ._validation import check_points, make_rng
from .body import body_from_json
from .cones import QuasiOrderMultiDigraph

SVG_FILL = {1: "#d62728", 2: "#2ca02c", 3: "#1f77b4"}


def _fmt(x):
    return np.format_float_positional(float(x), unique=True, trim="-")


def read_points_csv(path_or_text):
    """Rows ``x,y``; a non-numeric first row is taken as a header."""
    text = path_or_text
    if "\n" not in str(path_or_text) and "," not in str(path_or_text):
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    pts = []
    for k, row in enumerate(rows):
        if len(row) < 2:
            raise ValueError(f"row {k + 1}: expected two columns")
        try:
            pts.append((float(row[0]), float(row[1])))
        except ValueError:
            if k == 0:
                continue
            raise ValueError(f"row {k + 1}: not a number pair: {row!r}") from None
    return check_points(pts)


def points_to_csv(points, header=True):
    P = check_points(points)
    lines = ["x,y"] if header else []
    lines += [f"{_fmt(x)},{_fmt(y)}" for x, y in P]
    return "\n".join(lines) + "\n"


def write_points_csv(points, path, header=True):
    with open(path, "w", newline="") as fh:
        fh.write(points_to_csv(points, header))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def read_body(path):
    return body_from_json(read_json(path))


def read_digraph(path):
    return QuasiOrderMultiDigraph.from_json(read_json(path))


def read_colors(path):
    """Colors from JSON (a list, or an object with ``colors``) or one integer per line."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        obj = json.loads(text)
        colors = obj["colors"] if isinstance(obj, dict) else obj
    else:
        colors = [int(tok) for tok in text.replace(",", " ").split()]
    return np.asarray(colors, dtype=int)


def perturb_points(points, magnitude=None, seed=0):
    """Seeded jitter of at most ``magnitude`` per coordinate.

    Exact duplicates are spread over a lattice of spacing ``magnitude / 2``
    so they end up at least that far apart.  Returns ``(points, meta)``.
    """
    P = check_points(points)
    if magnitude is None:
        diag = float(np.hypot(*np.ptp(P, axis=0))) if len(P) > 1 else 1.0
        magnitude = 1e-9 * (diag or 1.0)
    if not magnitude > 0:
        raise ValueError("magnitude must be positive")
    rng = make_rng(seed, 0x6A17)
    out = P + rng.uniform(-magnitude, magnitude, size=P.shape)
    if len(P):
        _, inverse, counts = np.unique(P, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
        lattice = np.array([(a, b) for a in (-1, -0.5, 0, 0.5, 1) for b in (-1, -0.5, 0, 0.5, 1)])
        for g in np.nonzero(counts > 1)[0]:
            members = np.nonzero(inverse == g)[0]
            if len(members) > len(lattice):
                raise ValueError(f"{len(members)} copies of one point cannot be separated")
            slots = rng.permutation(len(lattice))[: len(members)]
            out[members] = P[members] + magnitude * lattice[slots]
    meta = {"perturbation": float(magnitude), "seed": int(seed) if seed is not None else 0}
    return out, meta


def emit_svg(points, colors=None, out_path=None, grid=None, body=None, translate=None, size=600, margin=20):
    """SVG 1.1 plot of colored points; optional grid of side ``grid`` and a body outline.

    Returns the document as a string and writes it when ``out_path`` is given.
    """
    P = check_points(points)
    colors = np.ones(len(P), dtype=int) if colors is None else np.asarray(getattr(colors, "colors", colors), dtype=int)
    pieces = [P]
    outline = None
    if body is not None:
        outline = np.asarray(body.vertices) + (np.zeros(2) if translate is None else np.asarray(translate, dtype=float))
        pieces.append(outline)
    allpts = np.vstack(pieces) if sum(len(p) for p in pieces) else np.zeros((1, 2))
    lo = allpts.min(axis=0)
    span = float(np.ptp(allpts, axis=0).max()) or 1.0
    scale = (size - 2 * margin) / span

    def sx(x):
        return margin + (x - lo[0]) * scale

    def sy(y):
        return size - margin - (y - lo[1]) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>',
    ]
    if grid is not None and grid > 0 and len(P):
        g = float(grid)
        x0, x1 = np.floor(lo[0] / g) * g, lo[0] + span
        y0, y1 = np.floor(lo[1] / g) * g, lo[1] + span
        out.append('<g stroke="#bbbbbb" stroke-width="0.5">')
        for x in np.arange(x0, x1 + g, g):
            if margin <= sx(x) <= size - margin:
                out.append(f'<line x1="{sx(x):.3f}" y1="{margin}" x2="{sx(x):.3f}" y2="{size - margin}"/>')
        for y in np.arange(y0, y1 + g, g):
            if margin <= sy(y) <= size - margin:
                out.append(f'<line x1="{margin}" y1="{sy(y):.3f}" x2="{size - margin}" y2="{sy(y):.3f}"/>')
        out.append("</g>")
    if outline is not None:
        pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in outline)
        out.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    for (x, y), c in zip(P, colors):
        fill = escape(SVG_FILL.get(int(c), "#7f7f7f"))
        out.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="3" fill="{fill}"/>')
    out.append("</svg>")
    doc = "\n".join(out) + "\n"
    if out_path is not None:
        with open(out_path, "w") as fh:
            fh.write(doc)
    return doc
