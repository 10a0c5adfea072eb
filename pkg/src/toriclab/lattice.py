"""Exact geometry of the square lattice, its dual, and cone regions.

Vertices, bonds and plaquettes are small named tuples so they hash fast and
sort deterministically.  Vertices and plaquettes are both ``(x, y)`` pairs and
compare equal as tuples; never mix them in one container.

Bond encoding: ``Bond(x, y, o)`` runs from ``(x, y)`` to ``(x+1, y)`` when
``o == E`` and to ``(x, y+1)`` when ``o == N``.  Plaquette ``(x, y)`` is the
unit square with lower-left corner ``(x, y)``.

All geometric predicates use integer or :class:`fractions.Fraction`
arithmetic.  Nothing in this module touches floating point.
"""

from __future__ import annotations

import enum
import functools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, Optional, Sequence


class LatticeError(Exception):
    pass


class Unreachable(LatticeError):
    """No path exists inside the requested region and window."""


class Orientation(enum.IntEnum):
    E = 0
    N = 1


class Vertex(NamedTuple):
    x: int
    y: int


class Plaquette(NamedTuple):
    x: int
    y: int

    @property
    def anchor(self) -> Vertex:
        return Vertex(self.x, self.y)

    def center(self) -> tuple[Fraction, Fraction]:
        return Fraction(2 * self.x + 1, 2), Fraction(2 * self.y + 1, 2)


class Bond(NamedTuple):
    x: int
    y: int
    o: Orientation

    @property
    def base(self) -> Vertex:
        return Vertex(self.x, self.y)

    @property
    def orientation(self) -> Orientation:
        return self.o

    def endpoints(self) -> tuple[Vertex, Vertex]:
        if self.o == Orientation.E:
            return Vertex(self.x, self.y), Vertex(self.x + 1, self.y)
        return Vertex(self.x, self.y), Vertex(self.x, self.y + 1)

    def plaquettes(self) -> tuple[Plaquette, Plaquette]:
        """The two plaquettes sharing this bond."""
        if self.o == Orientation.E:
            return Plaquette(self.x, self.y - 1), Plaquette(self.x, self.y)
        return Plaquette(self.x - 1, self.y), Plaquette(self.x, self.y)


E = Orientation.E
N = Orientation.N


def bond_key(b: Bond) -> tuple[int, int, int]:
    """Sort key ``(y, x, orientation)`` used for every deterministic ordering."""
    return (b.y, b.x, int(b.o))


def site_key(s: tuple[int, int]) -> tuple[int, int]:
    """Sort key ``(y, x)`` for vertices and plaquettes."""
    return (s[1], s[0])


def sorted_bonds(bonds: Iterable[Bond]) -> list[Bond]:
    return sorted(bonds, key=bond_key)


def star_bonds(v: Vertex) -> frozenset[Bond]:
    x, y = v
    return frozenset((Bond(x, y, E), Bond(x - 1, y, E), Bond(x, y, N), Bond(x, y - 1, N)))


def plaquette_bonds(p: Plaquette) -> frozenset[Bond]:
    x, y = p
    return frozenset((Bond(x, y, E), Bond(x + 1, y, N), Bond(x, y + 1, E), Bond(x, y, N)))


def bond_between(u: Vertex, v: Vertex) -> Bond:
    dx, dy = v[0] - u[0], v[1] - u[1]
    if (dx, dy) == (1, 0):
        return Bond(u[0], u[1], E)
    if (dx, dy) == (-1, 0):
        return Bond(v[0], v[1], E)
    if (dx, dy) == (0, 1):
        return Bond(u[0], u[1], N)
    if (dx, dy) == (0, -1):
        return Bond(v[0], v[1], N)
    raise LatticeError(f"vertices {u} and {v} are not adjacent")


def bond_across(p: Plaquette, q: Plaquette) -> Bond:
    """The bond crossed when stepping from plaquette ``p`` to ``q``."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    if (dx, dy) == (1, 0):
        return Bond(q[0], q[1], N)
    if (dx, dy) == (-1, 0):
        return Bond(p[0], p[1], N)
    if (dx, dy) == (0, 1):
        return Bond(q[0], q[1], E)
    if (dx, dy) == (0, -1):
        return Bond(p[0], p[1], E)
    raise LatticeError(f"plaquettes {p} and {q} are not adjacent")


# --------------------------------------------------------------------------
# Paths
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """A lattice path given by its vertex sequence.

    A path with fewer than two vertices is the empty path.  ``bonds()`` is the
    mod-2 edge set, so a bond traversed twice drops out; this is the support
    of the corresponding string operator.
    """

    vertices: tuple[Vertex, ...] = ()

    def __post_init__(self):
        vs = tuple(Vertex(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        for u, v in zip(vs, vs[1:]):
            bond_between(u, v)

    def edges(self) -> list[Bond]:
        return [bond_between(u, v) for u, v in zip(self.vertices, self.vertices[1:])]

    def bonds(self) -> frozenset[Bond]:
        out: set[Bond] = set()
        for b in self.edges():
            out ^= {b}
        return frozenset(out)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) < 2

    @property
    def is_closed(self) -> bool:
        return not self.is_empty and self.vertices[0] == self.vertices[-1]

    @property
    def endpoints(self) -> tuple[Vertex, Vertex]:
        return self.vertices[0], self.vertices[-1]

    def __len__(self) -> int:
        return max(0, len(self.vertices) - 1)


@dataclass(frozen=True)
class DualPath:
    """A path on the dual lattice, as a sequence of adjacent plaquettes."""

    plaquettes: tuple[Plaquette, ...] = ()

    def __post_init__(self):
        ps = tuple(Plaquette(*p) for p in self.plaquettes)
        object.__setattr__(self, "plaquettes", ps)
        for p, q in zip(ps, ps[1:]):
            bond_across(p, q)

    def edges(self) -> list[Bond]:
        return [bond_across(p, q) for p, q in zip(self.plaquettes, self.plaquettes[1:])]

    def crossed_bonds(self) -> frozenset[Bond]:
        out: set[Bond] = set()
        for b in self.edges():
            out ^= {b}
        return frozenset(out)

    bonds = crossed_bonds

    @property
    def is_empty(self) -> bool:
        return len(self.plaquettes) < 2

    @property
    def is_closed(self) -> bool:
        return not self.is_empty and self.plaquettes[0] == self.plaquettes[-1]

    @property
    def endpoints(self) -> tuple[Plaquette, Plaquette]:
        return self.plaquettes[0], self.plaquettes[-1]

    def __len__(self) -> int:
        return max(0, len(self.plaquettes) - 1)


def rectangle_loop(x0: int, y0: int, x1: int, y1: int) -> Path:
    """Counterclockwise boundary of the vertex rectangle [x0,x1]x[y0,y1]."""
    if x1 <= x0 or y1 <= y0:
        raise LatticeError("degenerate rectangle")
    vs = [Vertex(x, y0) for x in range(x0, x1)]
    vs += [Vertex(x1, y) for y in range(y0, y1)]
    vs += [Vertex(x, y1) for x in range(x1, x0, -1)]
    vs += [Vertex(x0, y) for y in range(y1, y0 - 1, -1)]
    return Path(tuple(vs))


def dual_rectangle_loop(x0: int, y0: int, x1: int, y1: int) -> DualPath:
    """Closed dual path around the plaquette rectangle [x0,x1]x[y0,y1]."""
    if x1 <= x0 or y1 <= y0:
        raise LatticeError("degenerate rectangle")
    ps = [Plaquette(x, y0) for x in range(x0, x1)]
    ps += [Plaquette(x1, y) for y in range(y0, y1)]
    ps += [Plaquette(x, y1) for x in range(x1, x0, -1)]
    ps += [Plaquette(x0, y) for y in range(y1, y0 - 1, -1)]
    return DualPath(tuple(ps))


# --------------------------------------------------------------------------
# Windows
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Finite vertex rectangle ``[xmin, xmax] x [ymin, ymax]`` (inclusive).

    Bonds of the window have both endpoints inside it; plaquettes have all
    four corners inside it.
    """

    xmin: int
    xmax: int
    ymin: int
    ymax: int

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise LatticeError(f"empty or degenerate window {self}")

    def contains_vertex(self, v) -> bool:
        return self.xmin <= v[0] <= self.xmax and self.ymin <= v[1] <= self.ymax

    def contains_bond(self, b: Bond) -> bool:
        if b.o == E:
            return self.xmin <= b.x < self.xmax and self.ymin <= b.y <= self.ymax
        return self.xmin <= b.x <= self.xmax and self.ymin <= b.y < self.ymax

    def contains_plaquette(self, p: Plaquette) -> bool:
        return self.xmin <= p[0] < self.xmax and self.ymin <= p[1] < self.ymax

    def contains_star(self, v: Vertex) -> bool:
        return self.xmin < v[0] < self.xmax and self.ymin < v[1] < self.ymax

    def vertices(self) -> list[Vertex]:
        return [Vertex(x, y) for y in range(self.ymin, self.ymax + 1)
                for x in range(self.xmin, self.xmax + 1)]

    def stars(self) -> list[Vertex]:
        """Vertices whose whole star lies in the window."""
        return [Vertex(x, y) for y in range(self.ymin + 1, self.ymax)
                for x in range(self.xmin + 1, self.xmax)]

    def plaquettes(self) -> list[Plaquette]:
        return [Plaquette(x, y) for y in range(self.ymin, self.ymax)
                for x in range(self.xmin, self.xmax)]

    @functools.cached_property
    def bond_list(self) -> tuple[Bond, ...]:
        out = []
        for y in range(self.ymin, self.ymax + 1):
            for x in range(self.xmin, self.xmax + 1):
                if x < self.xmax:
                    out.append(Bond(x, y, E))
                if y < self.ymax:
                    out.append(Bond(x, y, N))
        return tuple(out)

    @functools.cached_property
    def bond_set(self) -> frozenset[Bond]:
        return frozenset(self.bond_list)

    def bonds(self) -> tuple[Bond, ...]:
        return self.bond_list

    @property
    def n_bonds(self) -> int:
        nx, ny = self.xmax - self.xmin, self.ymax - self.ymin
        return nx * (ny + 1) + ny * (nx + 1)

    def shrink(self, margin: int) -> "Window":
        return Window(self.xmin + margin, self.xmax - margin, self.ymin + margin, self.ymax - margin)

    def to_dict(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax}

    @classmethod
    def from_dict(cls, d: dict) -> "Window":
        return cls(int(d["xmin"]), int(d["xmax"]), int(d["ymin"]), int(d["ymax"]))


# --------------------------------------------------------------------------
# Cones
# --------------------------------------------------------------------------


def cross(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v) -> int:
    return u[0] * v[0] + u[1] * v[1]


def _primitive(d) -> tuple[int, int]:
    a, b = int(d[0]), int(d[1])
    g = math.gcd(a, b)
    if g == 0:
        raise LatticeError("zero direction vector")
    return (a // g, b // g)


@dataclass(frozen=True)
class Cone:
    """Open sector ``apex + a*d1 + b*d2`` (a, b > 0) with d1 -> d2 counterclockwise.

    Directions are reduced to primitive vectors on construction, so scaling
    them by a positive integer gives the same cone.
    """

    apex: Vertex
    d1: tuple[int, int]
    d2: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "apex", Vertex(int(self.apex[0]), int(self.apex[1])))
        object.__setattr__(self, "d1", _primitive(self.d1))
        object.__setattr__(self, "d2", _primitive(self.d2))
        if cross(self.d1, self.d2) <= 0:
            raise LatticeError(
                f"cone rays {self.d1}, {self.d2} must turn strictly counterclockwise by less than pi")

    @property
    def directions(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.d1, self.d2)

    def side_value(self, i: int, p) -> Fraction | int:
        """Signed cross value of ``p`` against ray ``i``; positive on the inner side."""
        w = (p[0] - self.apex[0], p[1] - self.apex[1])
        return cross(self.d1, w) if i == 0 else cross(w, self.d2)

    def in_open_sector(self, p) -> bool:
        return self.side_value(0, p) > 0 and self.side_value(1, p) > 0

    def in_closed_sector(self, p) -> bool:
        return self.side_value(0, p) >= 0 and self.side_value(1, p) >= 0

    def on_ray(self, p) -> bool:
        w = (p[0] - self.apex[0], p[1] - self.apex[1])
        return any(cross(d, w) == 0 and dot(d, w) >= 0 for d in (self.d1, self.d2))

    def __contains__(self, b: Bond) -> bool:
        return cone_contains_bond(self, b)

    def to_dict(self) -> dict:
        return {"apex": list(self.apex), "d1": list(self.d1), "d2": list(self.d2)}

    @classmethod
    def from_dict(cls, d: dict) -> "Cone":
        return cls(Vertex(*d["apex"]), tuple(d["d1"]), tuple(d["d2"]))


def _open_interval_where_positive(c0: int, c1: int, lo: Fraction, hi: Fraction):
    """Shrink (lo, hi) to the part where c0 + c1*t > 0."""
    if c1 == 0:
        return (lo, hi) if c0 > 0 else (Fraction(1), Fraction(0))
    root = Fraction(-c0, c1)
    if c1 > 0:
        return max(lo, root), hi
    return lo, min(hi, root)


@functools.lru_cache(maxsize=1 << 18)
def cone_contains_bond(c: Cone, b: Bond) -> bool:
    """True iff the open unit segment of ``b`` meets the open sector of ``c``."""
    p, q = b.endpoints()
    u = (p[0] - c.apex[0], p[1] - c.apex[1])
    e = (q[0] - p[0], q[1] - p[1])
    lo, hi = Fraction(0), Fraction(1)
    lo, hi = _open_interval_where_positive(cross(c.d1, u), cross(c.d1, e), lo, hi)
    lo, hi = _open_interval_where_positive(cross(u, c.d2), cross(e, c.d2), lo, hi)
    return lo < hi


def sample_contains_bond(c: Cone, b: Bond, samples: int = 997) -> bool:
    """Rasterization check: test the points ``k/samples`` along the bond.

    Independent of :func:`cone_contains_bond`.  Coordinates are scaled by
    ``samples`` so every test is an integer inequality.  A prime sample
    count never lands on a sector edge for small direction vectors.
    """
    p, q = b.endpoints()
    ax, ay = c.apex[0] * samples, c.apex[1] * samples
    for k in range(1, samples):
        wx = p[0] * samples + k * (q[0] - p[0]) - ax
        wy = p[1] * samples + k * (q[1] - p[1]) - ay
        if c.d1[0] * wy - c.d1[1] * wx > 0 and wx * c.d2[1] - wy * c.d2[0] > 0:
            return True
    return False


def boundary_vertices(c: Cone, w: Window) -> frozenset[Vertex]:
    out = set()
    for v in w.vertices():
        if c.on_ray(v):
            out.add(v)
        elif not c.in_closed_sector(v) and any(cone_contains_bond(c, b) for b in star_bonds(v)):
            out.add(v)
    return frozenset(out)


def boundary_plaquettes(c: Cone, w: Window) -> frozenset[Plaquette]:
    out = set()
    for p in w.plaquettes():
        k = sum(cone_contains_bond(c, b) for b in plaquette_bonds(p))
        if 0 < k < 4:
            out.add(p)
    return frozenset(out)


# --------------------------------------------------------------------------
# Regions
# --------------------------------------------------------------------------


class Region:
    """A set of bonds with exact, decidable membership."""

    def __contains__(self, b: Bond) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def bonds_in(self, w: Window) -> frozenset[Bond]:
        return frozenset(b for b in w.bond_list if b in self)


@dataclass(frozen=True)
class ConeRegion(Region):
    cone: Cone

    def __contains__(self, b: Bond) -> bool:
        return cone_contains_bond(self.cone, b)


@dataclass(frozen=True)
class Complement(Region):
    cone: Cone

    def __contains__(self, b: Bond) -> bool:
        return not cone_contains_bond(self.cone, b)


@dataclass(frozen=True)
class Gap(Region):
    """Bonds of ``outer`` not in ``inner``: the complement of inner + outer^c."""

    inner: Cone
    outer: Cone

    def __contains__(self, b: Bond) -> bool:
        return cone_contains_bond(self.outer, b) and not cone_contains_bond(self.inner, b)


@dataclass(frozen=True)
class FiniteSet(Region):
    bonds: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "bonds", frozenset(self.bonds))

    def __contains__(self, b: Bond) -> bool:
        return b in self.bonds


@dataclass(frozen=True)
class All(Region):
    def __contains__(self, b: Bond) -> bool:
        return True


def stars_in_region(r: Region, w: Window) -> frozenset[Vertex]:
    return frozenset(v for v in w.stars() if all(b in r for b in star_bonds(v)))


def plaquettes_in_region(r: Region, w: Window) -> frozenset[Plaquette]:
    return frozenset(p for p in w.plaquettes() if all(b in r for b in plaquette_bonds(p)))


# --------------------------------------------------------------------------
# Distal separation
# --------------------------------------------------------------------------


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Separation:
    verdict: Verdict
    witness: Optional[tuple[str, tuple[int, int]]] = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict.value, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = {"kind": self.witness[0], "site": list(self.witness[1])}
        return d


def _cells_in_window(w: Window):
    for v in w.stars():
        yield "star", v, star_bonds(v)
    for p in w.plaquettes():
        yield "plaquette", p, plaquette_bonds(p)


def _is_witness(bonds, c1: Cone, c2: Cone) -> bool:
    in1 = [cone_contains_bond(c1, b) for b in bonds]
    out2 = [not cone_contains_bond(c2, b) for b in bonds]
    return all(a or o for a, o in zip(in1, out2)) and any(in1) and any(
        o and not a for a, o in zip(in1, out2))


def _straddles(bonds, c1: Cone, c2: Cone) -> bool:
    return any(cone_contains_bond(c1, b) for b in bonds) and any(
        not cone_contains_bond(c2, b) for b in bonds)


def nested(c1: Cone, c2: Cone) -> bool:
    """Exact test that the closed sector of ``c1`` lies in the closed sector of ``c2``."""
    if not c2.in_closed_sector(c1.apex):
        return False
    for d in c1.directions:
        if cross(c2.d1, d) < 0 or cross(d, c2.d2) < 0:
            return False
    return True


def _upper_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def _tail_extent(c1: Cone, c2: Cone, i: int) -> Optional[Fraction]:
    """Projection bound beyond which side ``i`` of the pair is witness-free.

    Returns ``s_end`` (in units of ``dot(p - apex2, e)`` with ``e`` the ray
    direction of ``c2``) such that every potential witness near ray ``i`` of
    ``c2`` either has projection at most ``s_end`` or is a lattice translate
    of one that does.  ``None`` means no such bound exists.
    """
    e = c2.directions[i]
    f = c1.directions[i]
    ee = dot(e, e)
    a2 = c2.apex
    e_len = _upper_sqrt(ee)
    j = 1 - i

    def s_of(p) -> Fraction:
        return Fraction(dot((p[0] - a2[0], p[1] - a2[1]), e))

    if cross(e, f) == 0 and dot(e, f) > 0:
        # Parallel rays: beyond the other rays' reach the strip is periodic
        # under translation by e, so one period past that point suffices.
        thresholds = [s_of(c1.apex)]
        for cone in (c1, c2):
            d = cone.directions[j]
            base = cone.side_value(j, a2)
            rate = cross(d, e) if j == 0 else cross(e, d)
            if rate <= 0:
                return None
            need = 4 * _upper_sqrt(dot(d, d)) + 1
            thresholds.append(Fraction((need - base) * ee, rate))
        return max(thresholds) + ee

    # Diverging rays: points of the inner sector within distance 3 of the
    # outer ray form a bounded triangle.
    h0 = c2.side_value(i, c1.apex)
    g = [c2.side_value(i, (a2[0] + d[0], a2[1] + d[1])) for d in c1.directions]
    if any(gk <= 0 for gk in g):
        return None
    budget = 3 * e_len - h0
    s_max = s_of(c1.apex)
    if budget > 0:
        for gk, d in zip(g, c1.directions):
            corner = Fraction(budget, gk)
            s_max = max(s_max, s_of(c1.apex) + corner * dot(d, e))
    return s_max + 3 * ee


def _required_cells(c2: Cone, i: int, s_end: Fraction):
    """Cells whose centre lies within distance 3 of ray ``i`` of ``c2`` up to ``s_end``."""
    e = c2.directions[i]
    ee = dot(e, e)
    a2 = c2.apex
    t_end = max(Fraction(0), s_end / ee)
    q = (a2[0] + t_end * e[0], a2[1] + t_end * e[1])
    xlo = math.floor(min(a2[0], q[0])) - 4
    xhi = math.ceil(max(a2[0], q[0])) + 4
    ylo = math.floor(min(a2[1], q[1])) - 4
    yhi = math.ceil(max(a2[1], q[1])) + 4

    def near(cx, cy) -> bool:
        w = (cx - a2[0], cy - a2[1])
        t = Fraction(dot(w, e), ee)
        t = min(max(t, Fraction(0)), t_end)
        dx, dy = w[0] - t * e[0], w[1] - t * e[1]
        return dx * dx + dy * dy <= 9

    for y in range(ylo, yhi + 1):
        for x in range(xlo, xhi + 1):
            if near(x, y):
                yield "star", Vertex(x, y), star_bonds(Vertex(x, y))
            if near(Fraction(2 * x + 1, 2), Fraction(2 * y + 1, 2)):
                yield "plaquette", Plaquette(x, y), plaquette_bonds(Plaquette(x, y))


def is_distally_separated(c1: Cone, c2: Cone, w: Window) -> Separation:
    """Three-valued test of distal separation ``c1 << c2`` relative to a window.

    FALSE carries a witness cell whose bonds all lie in ``c1`` or outside
    ``c2`` with both parts present.  TRUE requires no witness among cells
    inside ``w`` and that every cell which could straddle the two regions
    outside ``w`` is a lattice translate of a checked one (parallel rays) or
    does not exist (diverging rays).
    """
    for b in w.bond_list:
        if cone_contains_bond(c1, b) and not cone_contains_bond(c2, b):
            raise LatticeError(f"bond {b} lies in the inner cone but not the outer cone")

    for kind, site, bonds in _cells_in_window(w):
        if _is_witness(bonds, c1, c2):
            return Separation(Verdict.FALSE, (kind, tuple(site)),
                              f"{kind} at {tuple(site)} splits across inner cone and outer complement")

    if not nested(c1, c2):
        return Separation(Verdict.UNDETERMINED, None, "inner cone leaves the outer cone outside the window")
    for i in (0, 1):
        s_end = _tail_extent(c1, c2, i)
        if s_end is None:
            return Separation(Verdict.UNDETERMINED, None, f"no tail bound along ray {i + 1}")
        for kind, site, bonds in _required_cells(c2, i, s_end):
            if not _straddles(bonds, c1, c2):
                continue
            if not all(w.contains_bond(b) for b in bonds):
                return Separation(Verdict.UNDETERMINED, None,
                                  f"{kind} at {tuple(site)} near ray {i + 1} needs a larger window")
    return Separation(Verdict.TRUE, None, "no witness in window; tail criterion holds")


# --------------------------------------------------------------------------
# Breadth-first routing
# --------------------------------------------------------------------------


def _vertex_neighbours(v: Vertex, r: Region, w: Window, reverse: bool):
    bonds = sorted(star_bonds(v), key=bond_key, reverse=reverse)
    for b in bonds:
        if w.contains_bond(b) and b in r:
            a, c = b.endpoints()
            yield c if a == v else a


def _plaquette_neighbours(p: Plaquette, r: Region, w: Window, reverse: bool):
    bonds = sorted(plaquette_bonds(p), key=bond_key, reverse=reverse)
    for b in bonds:
        if b not in r:
            continue
        s, t = b.plaquettes()
        q = t if s == p else s
        if w.contains_plaquette(q):
            yield q


def _bfs(start, is_goal: Callable, neighbours: Callable):
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if is_goal(cur):
            out = [cur]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])
            return out[::-1]
        for nxt in neighbours(cur):
            if nxt not in prev:
                prev[nxt] = cur
                queue.append(nxt)
    return None


def path_to_nearest(start: Vertex, targets, r: Region, w: Window, reverse: bool = False) -> Path:
    targets = frozenset(targets)
    found = _bfs(Vertex(*start), lambda v: v in targets,
                 lambda v: _vertex_neighbours(v, r, w, reverse))
    if found is None:
        raise Unreachable(f"no path from {tuple(start)} to the target set inside the region")
    return Path(tuple(found))


def dual_path_to_nearest(start: Plaquette, targets, r: Region, w: Window,
                         reverse: bool = False) -> DualPath:
    targets = frozenset(targets)
    found = _bfs(Plaquette(*start), lambda p: p in targets,
                 lambda p: _plaquette_neighbours(p, r, w, reverse))
    if found is None:
        raise Unreachable(f"no dual path from {tuple(start)} to the target set inside the region")
    return DualPath(tuple(found))


def path_between(v1: Vertex, v2: Vertex, r: Region, w: Window, reverse: bool = False) -> Path:
    """Breadth-first path from ``v1`` to ``v2`` using bonds of ``r`` inside ``w``.

    Neighbours are explored in ``(y, x, orientation)`` order of the connecting
    bond (descending when ``reverse``), so the result is deterministic.
    """
    if tuple(v1) == tuple(v2):
        return Path((Vertex(*v1),))
    return path_to_nearest(v1, {Vertex(*v2)}, r, w, reverse)


def dual_path_between(p1: Plaquette, p2: Plaquette, r: Region, w: Window,
                      reverse: bool = False) -> DualPath:
    if tuple(p1) == tuple(p2):
        return DualPath((Plaquette(*p1),))
    return dual_path_to_nearest(p1, {Plaquette(*p2)}, r, w, reverse)


def bond_to_json(b: Bond) -> list:
    return [b.x, b.y, b.o.name]


def bond_from_json(d: Sequence) -> Bond:
    x, y, o = d
    return Bond(int(x), int(y), Orientation[o] if isinstance(o, str) else Orientation(int(o)))


def iter_window_bonds(w: Window) -> Iterator[Bond]:
    return iter(w.bond_list)


def random_closed_walk(w: Window, rng, dual: bool = False, max_steps: int = 12):
    """A random walk inside ``w`` closed up by a shortest path back to its start.

    Returns a closed :class:`Path`, or a closed :class:`DualPath` when ``dual``.
    Walks that cancel to nothing are allowed; they are still closed.
    """
    if dual:
        if w.xmax - w.xmin < 1 or w.ymax - w.ymin < 1:
            raise LatticeError("window has no plaquettes")
        seq = [Plaquette(rng.randrange(w.xmin, w.xmax), rng.randrange(w.ymin, w.ymax))]
        ok = w.contains_plaquette
    else:
        seq = [Vertex(rng.randint(w.xmin, w.xmax), rng.randint(w.ymin, w.ymax))]
        ok = w.contains_vertex
    kind = type(seq[0])
    for _ in range(rng.randint(2, max_steps)):
        x, y = seq[-1]
        nbrs = [n for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)) if ok(n)]
        if nbrs:
            seq.append(kind(*rng.choice(nbrs)))
    if len(seq) < 2:
        raise LatticeError("window too small for a closed walk")
    if dual:
        back = dual_path_between(seq[-1], seq[0], All(), w).plaquettes
        return DualPath(tuple(seq) + back[1:])
    back = path_between(seq[-1], seq[0], All(), w).vertices
    return Path(tuple(seq) + back[1:])
