"""The split map as a relabelling of canonical forms.

A canonical vector ``i^k f1 fhat f2 Omega`` is sent to the product label
``i^k (f1 Omega) x (f2 Omega) x (fhat Omega)``.  The map is never built as a
matrix; every claim about it is checked through exact pairings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .canonical import Scaffold, canonicalize
from .lattice import (
    DualPath,
    Path,
    Plaquette,
    Vertex,
    Window,
    cone_contains_bond,
    dual_rectangle_loop,
    rectangle_loop,
)
from .pauli import (
    IDENTITY,
    PauliOp,
    adjoint,
    commutes,
    multiply,
    plaquette_op,
    star_op,
    string_from_dual_path,
    string_from_path,
)
from .vacuum import ExcitationVector, GaussianRational, inner, omega, omega_exponent, states_equal


class MembershipError(ValueError):
    pass


@dataclass(frozen=True)
class TensorLabel:
    left: PauliOp
    middle: PauliOp
    right: PauliOp
    phase: int
    scaffold: Scaffold

    @classmethod
    def from_form(cls, form) -> "TensorLabel":
        return cls(form.f1, form.f2, form.fhat, form.phase, form.scaffold)

    def vector(self) -> ExcitationVector:
        """The canonical vector this label stands for, before the split."""
        op = multiply(multiply(self.left, self.right), self.middle)
        return ExcitationVector.of(op, GaussianRational.unit(self.phase))

    def to_json(self) -> dict:
        return {"left": self.left.to_json(), "middle": self.middle.to_json(),
                "right": self.right.to_json(), "phase": self.phase}


def vacuum_label(scaffold: Scaffold) -> TensorLabel:
    return TensorLabel(IDENTITY, IDENTITY, IDENTITY, 0, scaffold)


def _pair(p: PauliOp, q: PauliOp) -> GaussianRational:
    return omega(multiply(adjoint(p), q))


def tensor_inner(t1: TensorLabel, t2: TensorLabel) -> GaussianRational:
    if t1.scaffold.gamma != t2.scaffold.gamma:
        raise ValueError("labels belong to different scaffolds")
    return (GaussianRational.unit(-t1.phase) * GaussianRational.unit(t2.phase)
            * _pair(t1.left, t2.left) * _pair(t1.middle, t2.middle) * _pair(t1.right, t2.right))


# --------------------------------------------------------------------------
# Random canonical vectors
# --------------------------------------------------------------------------


def random_walk_string(w: Window, rng: random.Random, dual: bool, max_steps: int = 8) -> PauliOp:
    """String operator along a random walk inside ``w``."""
    steps = rng.randint(1, max_steps)
    if dual:
        seq = [Plaquette(rng.randrange(w.xmin, w.xmax), rng.randrange(w.ymin, w.ymax))]
        ok = w.contains_plaquette
    else:
        seq = [Vertex(rng.randint(w.xmin, w.xmax), rng.randint(w.ymin, w.ymax))]
        ok = w.contains_vertex
    for _ in range(steps):
        x, y = seq[-1]
        nbrs = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
        nbrs = [n for n in nbrs if ok(n)]
        nxt = rng.choice(nbrs)
        seq.append(type(seq[0])(*nxt))
    if dual:
        return string_from_dual_path(DualPath(tuple(seq)))
    return string_from_path(Path(tuple(seq)))


def random_string_product(w: Window, rng: random.Random, max_strings: int = 4) -> PauliOp:
    op = IDENTITY
    for _ in range(rng.randint(1, max_strings)):
        op = multiply(op, random_walk_string(w, rng, rng.random() < 0.5))
    return op.times_phase(rng.randrange(4))


def _random_region_op(w: Window, rng: random.Random, keep: Callable) -> PauliOp:
    """A random string product restricted to bonds satisfying ``keep``."""
    op = random_string_product(w, rng)
    return op.restrict(keep).times_phase(rng.randrange(4))


def _random_stabilizer(w: Window, rng: random.Random) -> PauliOp:
    acc = IDENTITY
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.5:
            acc = multiply(acc, star_op(Vertex(rng.randint(w.xmin + 1, w.xmax - 1),
                                               rng.randint(w.ymin + 1, w.ymax - 1))))
        else:
            acc = multiply(acc, plaquette_op(Plaquette(rng.randrange(w.xmin, w.xmax),
                                                       rng.randrange(w.ymin, w.ymax))))
    return acc


def _sample_pair(scaffold: Scaffold, rng: random.Random, margin: int = 2):
    """A pair of operators, often chosen so that their vectors overlap."""
    w = scaffold.window.shrink(margin)
    p = random_string_product(w, rng)
    mode = rng.randrange(5)
    if mode == 0:
        q = random_string_product(w, rng)
    elif mode == 1:
        q = multiply(p, _random_stabilizer(w, rng)).times_phase(rng.randrange(4))
    elif mode == 2:
        q = multiply(_random_region_op(w, rng, lambda b: scaffold.part_of(b) == 1), p)
    elif mode == 3:
        q = multiply(p, _random_region_op(w, rng, lambda b: scaffold.part_of(b) == 2))
    else:
        q = multiply(multiply(_random_region_op(w, rng, lambda b: scaffold.part_of(b) == 1), p),
                     _random_region_op(w, rng, lambda b: scaffold.part_of(b) == 2))
    return p, q


# --------------------------------------------------------------------------
# Checks
# --------------------------------------------------------------------------


def verify_isometry(scaffold: Scaffold, samples: int, seed: int) -> dict:
    """Compare vacuum pairings with product-label pairings on sampled canonical vectors."""
    rng = random.Random(seed)
    violations = []
    nonzero = 0
    pairs = [(IDENTITY, IDENTITY)] + [_sample_pair(scaffold, rng) for _ in range(samples - 1)]
    for p, q in pairs:
        lp = TensorLabel.from_form(canonicalize(p, scaffold))
        lq = TensorLabel.from_form(canonicalize(q, scaffold))
        direct = inner(ExcitationVector.of(p), ExcitationVector.of(q))
        split = tensor_inner(lp, lq)
        via_forms = inner(lp.vector(), lq.vector())
        nonzero += bool(direct)
        if direct != split or direct != via_forms:
            violations.append({"p": p.to_json(), "q": q.to_json(),
                               "direct": direct.to_json(), "split": split.to_json()})
    return {"samples": len(pairs), "nonzero_pairs": nonzero, "violations": violations}


def verify_factorization(f1: PauliOp, f2: PauliOp, scaffold: Optional[Scaffold] = None,
                         inner_cone=None, outer_cone=None) -> bool:
    """``omega(f1 f2) == omega(f1) * omega(f2)`` for ``f1`` in the inner cone and ``f2`` outside the outer one."""
    if scaffold is not None:
        inner_cone, outer_cone = scaffold.inner, scaffold.outer
    if inner_cone is None or outer_cone is None:
        raise ValueError("cones are required")
    if not all(cone_contains_bond(inner_cone, b) for b in f1.support):
        raise MembershipError("first operator leaves the inner cone")
    if any(cone_contains_bond(outer_cone, b) for b in f2.support):
        raise MembershipError("second operator meets the outer cone")
    return omega(multiply(f1, f2)) == omega(f1) * omega(f2)


def loop_family(w: Window, keep: Callable) -> list[PauliOp]:
    """Rectangle loops, dual rectangle loops and single-bond strings inside ``w`` whose bonds satisfy ``keep``."""
    out = []
    for x0 in range(w.xmin, w.xmax + 1):
        for x1 in range(x0 + 1, w.xmax + 1):
            for y0 in range(w.ymin, w.ymax + 1):
                for y1 in range(y0 + 1, w.ymax + 1):
                    op = string_from_path(rectangle_loop(x0, y0, x1, y1))
                    if all(keep(b) for b in op.z):
                        out.append(op)
                    if x1 < w.xmax and y1 < w.ymax:
                        op = string_from_dual_path(dual_rectangle_loop(x0, y0, x1, y1))
                        if all(keep(b) and w.contains_bond(b) for b in op.x):
                            out.append(op)
    for b in w.bond_list:
        if keep(b):
            out.append(PauliOp(0, (), (b,)))
            out.append(PauliOp(0, (b,), ()))
    return out


def factorization_census(scaffold: Scaffold, w: Window) -> dict:
    """Exhaustive factorization check over all pairs from the loop families of both sides."""
    left = loop_family(w, lambda b: scaffold.part_of(b) == 1)
    right = loop_family(w, lambda b: scaffold.part_of(b) == 2)
    # Values of omega are powers of i or zero, so compare exponents exactly.
    left_vals = [omega_exponent(f) for f in left]
    right_vals = [omega_exponent(f) for f in right]
    failures = []
    checked = 0
    for f1, o1 in zip(left, left_vals):
        for f2, o2 in zip(right, right_vals):
            checked += 1
            expected = None if o1 is None or o2 is None else (o1 + o2) % 4
            if omega_exponent(multiply(f1, f2)) != expected:
                failures.append({"f1": f1.to_json(), "f2": f2.to_json()})
    return {"left_family": len(left), "right_family": len(right), "pairs": checked, "failures": failures}


def _same_up_to_sign(p: PauliOp, q: PauliOp) -> bool:
    return p.x == q.x and p.z == q.z and (p.phase - q.phase) % 2 == 0


def conjugation_check(a: PauliOp, t: TensorLabel) -> bool:
    """Acting with an inner-cone operator only changes the left slot of the label."""
    sc = t.scaffold
    if not all(sc.part_of(b) == 1 for b in a.support):
        raise MembershipError("operator must lie in the inner cone")
    acted = multiply(a, multiply(multiply(t.left, t.right), t.middle)).times_phase(t.phase)
    new = TensorLabel.from_form(canonicalize(acted, sc))
    expected = TensorLabel(multiply(a, t.left), t.middle, t.right, t.phase, sc)
    return (tensor_inner(new, expected) == 1
            and _same_up_to_sign(new.middle, expected.middle)
            and _same_up_to_sign(new.right, expected.right)
            and states_equal(new.left, expected.left) is not None)


def mirror_conjugation_check(b: PauliOp, t: TensorLabel) -> bool:
    """Acting with an outer-complement operator only changes the middle slot."""
    sc = t.scaffold
    if not all(sc.part_of(x) == 2 for x in b.support):
        raise MembershipError("operator must lie outside the outer cone")
    front = multiply(t.left, t.right)
    acted = multiply(b, multiply(front, t.middle)).times_phase(t.phase)
    new = TensorLabel.from_form(canonicalize(acted, sc))
    # b passes f1 * fhat on its way to the middle slot
    sign = 0 if commutes(b, front) else 2
    expected = TensorLabel(t.left, multiply(b, t.middle), t.right, t.phase + sign, sc)
    return (tensor_inner(new, expected) == 1
            and _same_up_to_sign(new.left, expected.left)
            and _same_up_to_sign(new.right, expected.right)
            and states_equal(new.middle, expected.middle) is not None)


def random_label(scaffold: Scaffold, rng: random.Random, margin: int = 2) -> TensorLabel:
    w = scaffold.window.shrink(margin)
    return TensorLabel.from_form(canonicalize(random_string_product(w, rng), scaffold))


def conjugation_suite(scaffold: Scaffold, samples: int, seed: int, mirror: bool = False) -> dict:
    rng = random.Random(seed)
    w = scaffold.window.shrink(2)
    side = 2 if mirror else 1
    check = mirror_conjugation_check if mirror else conjugation_check
    failures = []
    for _ in range(samples):
        t = random_label(scaffold, rng)
        op = _random_region_op(w, rng, lambda b: scaffold.part_of(b) == side)
        if not check(op, t):
            failures.append({"op": op.to_json(), "label": t.to_json()})
    return {"samples": samples, "failures": failures}
