"""Deterministic SVG figures of lattices, cones, scaffolds and canonical forms.

Every bond is drawn as its own ``Line2D`` with a ``gid`` such as
``cone:3,1,E`` so that tests (and curious readers) can recover the drawn
census from the SVG text.  The SVG hash salt and date metadata are pinned,
which makes the output byte-identical across runs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402

from .lattice import Bond, Cone, Window, cone_contains_bond, plaquette_bonds, star_bonds  # noqa: E402

RC = {"svg.hashsalt": "toriclab", "svg.fonttype": "none", "font.size": 8}
BASE = {"color": "#c8c8c8", "linewidth": 0.8}
KINDS = ("lattice", "cones", "scaffold", "canonical-form")

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _tag(prefix: str, b: Bond) -> str:
    return f"{prefix}:{b.x},{b.y},{b.o.name}"


def _segment(ax, b: Bond, gid: str, **style) -> None:
    (x0, y0), (x1, y1) = b.endpoints()
    line = Line2D([x0, x1], [y0, y1], solid_capstyle="round", **style)
    line.set_gid(gid)
    ax.add_line(line)


def _new_axes(w: Window, title: str):
    with matplotlib.rc_context(RC):
        width = 0.45 * (w.xmax - w.xmin + 2)
        height = 0.45 * (w.ymax - w.ymin + 2)
        fig = Figure(figsize=(max(width, 3.0), max(height, 3.0)))
        ax = fig.add_subplot()
    ax.set_xlim(w.xmin - 0.5, w.xmax + 0.5)
    ax.set_ylim(w.ymin - 0.5, w.ymax + 0.5)
    ax.set_aspect("equal")
    ax.set_xticks(range(w.xmin, w.xmax + 1))
    ax.set_yticks(range(w.ymin, w.ymax + 1))
    ax.tick_params(labelsize=6, length=2)
    ax.set_title(title)
    return fig, ax


def _grid(ax, w: Window, skip=frozenset()) -> None:
    for b in w.bond_list:
        if b not in skip:
            _segment(ax, b, _tag("bond", b), **BASE)


def _save(fig: Figure, path: str) -> str:
    with matplotlib.rc_context(RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _cone_rays(ax, c: Cone, w: Window, color: str, label: str) -> None:
    span = 2 * max(w.xmax - w.xmin, w.ymax - w.ymin)
    for k, d in enumerate(c.directions):
        line = Line2D([c.apex[0], c.apex[0] + span * d[0]], [c.apex[1], c.apex[1] + span * d[1]],
                      color=color, linewidth=0.6, linestyle=":")
        line.set_gid(f"ray:{label}:{k + 1}")
        ax.add_line(line)


def lattice_figure(w: Window) -> Figure:
    """One dashed star and one thick plaquette on a plain lattice."""
    cx = (w.xmin + w.xmax) // 2
    cy = (w.ymin + w.ymax) // 2
    if not w.contains_star((cx, cy)) or not w.contains_plaquette((cx + 1, cy + 1)):
        raise ValueError("window too small to show a star and a plaquette")
    star = star_bonds((cx, cy))
    plaq = plaquette_bonds((cx + 1, cy + 1))
    fig, ax = _new_axes(w, "star (dashed) and plaquette (thick)")
    _grid(ax, w, skip=star | plaq)
    for b in sorted(star):
        _segment(ax, b, _tag("star", b), color="black", linewidth=1.6, linestyle="--")
    for b in sorted(plaq):
        _segment(ax, b, _tag("plaquette", b), color="black", linewidth=3.0)
    return fig


def cones_figure(w: Window, cones: dict) -> Figure:
    """Bonds of each cone drawn bold; the innermost cone wins where cones overlap."""
    fig, ax = _new_axes(w, "cone bonds (bold)")
    names = sorted(cones)
    drawn = set()
    for k, name in enumerate(names):
        c = cones[name]
        color = PALETTE[k % len(PALETTE)]
        for b in w.bond_list:
            if b in drawn or not cone_contains_bond(c, b):
                continue
            if any(cone_contains_bond(cones[o], b) for o in names[k + 1:]):
                continue
            drawn.add(b)
            gid = _tag("cone", b) if len(names) == 1 else _tag(f"cone-{name}", b)
            _segment(ax, b, gid, color=color, linewidth=2.6)
        _cone_rays(ax, c, w, color, name)
    _grid(ax, w, skip=drawn)
    return fig


def scaffold_figure(scaffold) -> Figure:
    w = scaffold.window
    fig, ax = _new_axes(w, "scaffold paths in the gap")
    _grid(ax, w)
    for k, (name, c) in enumerate((("lambda1", scaffold.inner), ("lambda2", scaffold.outer))):
        _cone_rays(ax, c, w, PALETTE[k], name)
    for k, g in enumerate(scaffold.gamma):
        color = PALETTE[(k + 2) % len(PALETTE)]
        style = "-" if g.kind == "vertex" else "--"
        for b in sorted(g.op.support):
            _segment(ax, b, _tag(f"gamma-{g.name}", b), color=color, linewidth=2.4, linestyle=style)
    return fig


def canonical_figure(form) -> Figure:
    sc = form.scaffold
    w = sc.window
    fig, ax = _new_axes(w, f"canonical form, phase i^{form.phase}")
    _grid(ax, w)
    for k, (name, c) in enumerate((("lambda1", sc.inner), ("lambda2", sc.outer))):
        _cone_rays(ax, c, w, PALETTE[k], name)
    for label, op, color in (("f1", form.f1, PALETTE[0]), ("fhat", form.fhat, PALETTE[2]),
                             ("f2", form.f2, PALETTE[1])):
        for b in sorted(op.z):
            _segment(ax, b, _tag(f"{label}-z", b), color=color, linewidth=2.4)
        for b in sorted(op.x):
            _segment(ax, b, _tag(f"{label}-x", b), color=color, linewidth=2.4, linestyle="--")
    return fig


def save_svg(fig: Figure, path: str) -> str:
    return _save(fig, path)


# --------------------------------------------------------------------------
# Plain-text rendering
# --------------------------------------------------------------------------


def ascii_bonds(w: Window, marks: dict) -> str:
    """Text picture of ``w``; ``marks`` maps bonds to a one-character glyph.

    Unmarked east bonds print as ``-`` and north bonds as ``|``; vertices are
    ``+``.  The top row of the picture is ``y = ymax``.
    """
    rows = []
    for y in range(w.ymax, w.ymin - 1, -1):
        line = []
        for x in range(w.xmin, w.xmax + 1):
            line.append("+")
            if x < w.xmax:
                line.append(marks.get(Bond(x, y, 0), "-") * 3)
        rows.append(f"{y:>3} " + "".join(line))
        if y > w.ymin:
            line = []
            for x in range(w.xmin, w.xmax + 1):
                line.append(marks.get(Bond(x, y - 1, 1), "|"))
                if x < w.xmax:
                    line.append("   ")
            rows.append("    " + "".join(line))
    return "\n".join(rows) + "\n"


def ascii_cones(w: Window, cones: dict) -> str:
    """Cone bonds as ``#``; with two cones the first (sorted) name gets ``#`` and the second ``%``."""
    marks = {}
    names = sorted(cones)[:2]
    for name, glyph in reversed(list(zip(names, "#%"))):
        for b in w.bond_list:
            if cone_contains_bond(cones[name], b):
                marks[b] = glyph
    return ascii_bonds(w, marks)


def ascii_scaffold(scaffold) -> str:
    """Scaffold paths labelled ``a``, ``b``, ... in scaffold order."""
    marks = {}
    for k, g in enumerate(scaffold.gamma):
        glyph = chr(ord("a") + k % 26)
        for b in g.op.support:
            marks.setdefault(b, glyph)
    return ascii_bonds(scaffold.window, marks)
