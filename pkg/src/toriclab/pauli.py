"""Finitely supported Pauli operators with Z4 phases.

Every operator is stored in the normal order ``i^phase X(x) Z(z)``: all X
factors to the left of all Z factors.  Moving a Z past an X on the same bond
costs a sign, which is the only source of phase bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .lattice import (
    Bond,
    DualPath,
    LatticeError,
    Path,
    Plaquette,
    Vertex,
    Window,
    bond_from_json,
    bond_key,
    bond_to_json,
    plaquette_bonds,
    star_bonds,
)


class NotACycle(LatticeError):
    """Raised when a bond set is not the boundary of a finite stabilizer set."""


@dataclass(frozen=True)
class PauliOp:
    phase: int
    x: frozenset
    z: frozenset

    def __init__(self, phase: int = 0, x: Iterable[Bond] = (), z: Iterable[Bond] = ()):
        object.__setattr__(self, "phase", int(phase) % 4)
        object.__setattr__(self, "x", frozenset(x))
        object.__setattr__(self, "z", frozenset(z))

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    @property
    def support(self) -> frozenset:
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return not self.x and not self.z and self.phase == 0

    def with_phase(self, phase: int) -> "PauliOp":
        return PauliOp(phase, self.x, self.z)

    def times_phase(self, k: int) -> "PauliOp":
        """Multiply by the scalar ``i**k``."""
        return PauliOp(self.phase + k, self.x, self.z)

    def restrict(self, keep) -> "PauliOp":
        """Bonds of the support satisfying ``keep``, with phase zero."""
        return PauliOp(0, (b for b in self.x if keep(b)), (b for b in self.z if keep(b)))

    def to_json(self) -> dict:
        return {
            "lambda": self.phase,
            "x_support": [bond_to_json(b) for b in sorted(self.x, key=bond_key)],
            "z_support": [bond_to_json(b) for b in sorted(self.z, key=bond_key)],
        }

    @classmethod
    def from_json(cls, d: dict) -> "PauliOp":
        return cls(int(d.get("lambda", 0)),
                   (bond_from_json(b) for b in d.get("x_support", [])),
                   (bond_from_json(b) for b in d.get("z_support", [])))

    def __repr__(self) -> str:
        fmt = lambda s: ",".join(f"{b.o.name}{b.x},{b.y}" for b in sorted(s, key=bond_key))
        return f"PauliOp(i^{self.phase} X[{fmt(self.x)}] Z[{fmt(self.z)}])"


IDENTITY = PauliOp()


def identity() -> PauliOp:
    return IDENTITY


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    """Product ``p * q`` brought back to normal order."""
    sign = 2 * (len(p.z & q.x) % 2)
    return PauliOp(p.phase + q.phase + sign, p.x ^ q.x, p.z ^ q.z)


def product(ops: Iterable[PauliOp]) -> PauliOp:
    out = IDENTITY
    for op in ops:
        out = multiply(out, op)
    return out


def adjoint(p: PauliOp) -> PauliOp:
    # (X Z)^dagger = Z X = (-1)^{|x & z|} X Z
    return PauliOp(-p.phase + 2 * (len(p.x & p.z) % 2), p.x, p.z)


def is_self_adjoint(p: PauliOp) -> bool:
    return p.phase % 2 == len(p.x & p.z) % 2


def commutes(p: PauliOp, q: PauliOp) -> bool:
    return (len(p.x & q.z) + len(p.z & q.x)) % 2 == 0


def x_op(bonds: Iterable[Bond]) -> PauliOp:
    return PauliOp(0, bonds, ())


def z_op(bonds: Iterable[Bond]) -> PauliOp:
    return PauliOp(0, (), bonds)


def string_from_path(path: Path) -> PauliOp:
    return PauliOp(0, (), path.bonds())


def string_from_dual_path(path: DualPath) -> PauliOp:
    return PauliOp(0, path.crossed_bonds(), ())


def star_op(s: Vertex) -> PauliOp:
    return PauliOp(0, star_bonds(Vertex(*s)), ())


def plaquette_op(p: Plaquette) -> PauliOp:
    return PauliOp(0, (), plaquette_bonds(Plaquette(*p)))


# --------------------------------------------------------------------------
# Syndromes and stabilizer membership
# --------------------------------------------------------------------------


class Syndrome(NamedTuple):
    charges: frozenset
    fluxes: frozenset

    @property
    def is_empty(self) -> bool:
        return not self.charges and not self.fluxes

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        return Syndrome(self.charges ^ other.charges, self.fluxes ^ other.fluxes)


def _odd_vertex_pairs(bonds: Iterable[Bond]) -> set:
    odd: set = set()
    for x, y, o in bonds:
        for v in ((x, y), (x + 1, y) if o == 0 else (x, y + 1)):
            if v in odd:
                odd.remove(v)
            else:
                odd.add(v)
    return odd


def _odd_plaquette_pairs(bonds: Iterable[Bond]) -> set:
    odd: set = set()
    for x, y, o in bonds:
        for p in ((x, y), (x, y - 1) if o == 0 else (x - 1, y)):
            if p in odd:
                odd.remove(p)
            else:
                odd.add(p)
    return odd


def odd_vertices(bonds: Iterable[Bond]) -> frozenset:
    return frozenset(Vertex(*v) for v in _odd_vertex_pairs(bonds))


def odd_plaquettes(bonds: Iterable[Bond]) -> frozenset:
    return frozenset(Plaquette(*p) for p in _odd_plaquette_pairs(bonds))


def syndrome(p: PauliOp) -> Syndrome:
    """Stars and plaquettes anticommuting with ``p``."""
    return Syndrome(odd_vertices(p.z), odd_plaquettes(p.x))


def is_cycle(bonds: Iterable[Bond]) -> bool:
    return not _odd_vertex_pairs(bonds)


def is_dual_cycle(bonds: Iterable[Bond]) -> bool:
    return not _odd_plaquette_pairs(bonds)


def express_as_plaquette_sum(bonds: Iterable[Bond]) -> frozenset:
    """Plaquettes whose boundaries add up (mod 2) to the cycle ``bonds``.

    Scanline fill: plaquette ``(x, y)`` is enclosed iff an odd number of
    north bonds ``N@(x', y)`` with ``x' <= x`` belong to the cycle.
    """
    bonds = frozenset(bonds)
    rows: dict[int, list[int]] = {}
    for b in bonds:
        if b.o == 1:
            rows.setdefault(b.y, []).append(b.x)
    out = set()
    for y, xs in rows.items():
        xs.sort()
        for k in range(0, len(xs) - 1, 2):
            out.update(Plaquette(x, y) for x in range(xs[k], xs[k + 1]))
        if len(xs) % 2:
            raise NotACycle("bond set is not closed")
    got: set = set()
    for p in out:
        got ^= plaquette_bonds(p)
    if got != bonds:
        raise NotACycle("bond set is not closed")
    return frozenset(out)


def express_as_star_sum(bonds: Iterable[Bond]) -> frozenset:
    """Vertices whose stars add up (mod 2) to the dual cycle ``bonds``.

    Vertex ``(x, y)`` is enclosed iff an odd number of east bonds
    ``E@(x', y)`` with ``x' < x`` belong to the set.
    """
    bonds = frozenset(bonds)
    rows: dict[int, list[int]] = {}
    for b in bonds:
        if b.o == 0:
            rows.setdefault(b.y, []).append(b.x)
    out = set()
    for y, xs in rows.items():
        xs.sort()
        for k in range(0, len(xs) - 1, 2):
            out.update(Vertex(x, y) for x in range(xs[k] + 1, xs[k + 1] + 1))
        if len(xs) % 2:
            raise NotACycle("bond set is not dual-closed")
    got: set = set()
    for v in out:
        got ^= star_bonds(v)
    if got != bonds:
        raise NotACycle("bond set is not dual-closed")
    return frozenset(out)


def intersection_parity(loop: Path, dual_loop: DualPath) -> int:
    if not loop.is_closed or not dual_loop.is_closed:
        raise LatticeError("intersection parity needs a closed path and a closed dual path")
    return len(loop.bonds() & dual_loop.crossed_bonds()) % 2


def loop_parity_census(w: Window, pairs: int, seed: int) -> dict:
    """Crossing parities of random closed loops and closed dual loops in ``w``.

    Each dual loop is drawn inside the bounding box of its partner loop so
    that a good share of pairs actually cross.
    """
    import random

    from .lattice import random_closed_walk

    rng = random.Random(seed)
    crossing = 0
    odd = []
    for _ in range(pairs):
        loop = random_closed_walk(w, rng)
        xs = [v.x for v in loop.vertices]
        ys = [v.y for v in loop.vertices]
        box = Window(max(w.xmin, min(xs) - 1), min(w.xmax, max(xs) + 1),
                     max(w.ymin, min(ys) - 1), min(w.ymax, max(ys) + 1))
        dual = random_closed_walk(box, rng, dual=True)
        if loop.bonds() & dual.crossed_bonds():
            crossing += 1
        if intersection_parity(loop, dual):
            odd.append({"loop": [list(v) for v in loop.vertices],
                        "dual_loop": [list(p) for p in dual.plaquettes]})
    return {"pairs": pairs, "crossing_pairs": crossing, "odd": odd}


def local_hamiltonian_terms(w: Window) -> list[tuple[int, PauliOp]]:
    """``(coefficient, operator)`` pairs of the window Hamiltonian, all with coefficient -1."""
    terms = [(-1, star_op(v)) for v in w.stars()]
    terms += [(-1, plaquette_op(p)) for p in w.plaquettes()]
    return terms
