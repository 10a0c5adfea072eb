"""The translation-invariant ground state as a closed-form functional.

The vacuum is the unique state with ``omega(A_s) = omega(B_p) = 1`` for every
star and plaquette.  Since it is invariant under each stabilizer, a Pauli
operator that anticommutes with any stabilizer has vanishing expectation,
and one that commutes with all of them is, on the plane, a product of
stabilizers up to its phase.  Hence::

    omega(i^k X(a) Z(b)) = i^k   if a is a dual cycle and b is a cycle
                         = 0     otherwise

Vectors ``P * Omega`` are handled formally and compared only through
``<P Omega, Q Omega> = omega(P^dagger Q)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .pauli import (
    IDENTITY,
    PauliOp,
    adjoint,
    is_cycle,
    is_dual_cycle,
    is_self_adjoint,
    multiply,
)


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def unit(cls, k: int) -> "GaussianRational":
        """The scalar ``i**k``."""
        return _UNITS[k % 4]

    @classmethod
    def coerce(cls, v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(v, 0)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianRational.coerce(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussianRational.coerce(o)
        n = o.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        num = self * o.conj()
        return GaussianRational(num.re / n, num.im / n)

    def __eq__(self, o):
        try:
            o = GaussianRational.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def unit_exponent(self) -> Optional[int]:
        """``k`` with ``self == i**k``, or None when not a unit."""
        for k in range(4):
            if self == _UNITS[k]:
                return k
        return None

    def to_json(self) -> str:
        return f"{self.re}+{self.im}i" if self.im >= 0 else f"{self.re}{self.im}i"

    def __repr__(self) -> str:
        return f"GaussianRational({self.to_json()})"


_UNITS = (GaussianRational(1, 0), GaussianRational(0, 1), GaussianRational(-1, 0), GaussianRational(0, -1))
ZERO = GaussianRational(0, 0)
ONE = _UNITS[0]


def omega_exponent(p: PauliOp) -> Optional[int]:
    """``k`` with ``omega(p) == i**k``, or None when ``omega(p) == 0``."""
    if is_dual_cycle(p.x) and is_cycle(p.z):
        return p.phase
    return None


def omega(p: PauliOp) -> GaussianRational:
    k = omega_exponent(p)
    return ZERO if k is None else _UNITS[k]


def pair_exponent(p: PauliOp, q: PauliOp) -> Optional[int]:
    """Exponent of ``<p Omega, q Omega>``, or None when the vectors are orthogonal."""
    return omega_exponent(multiply(adjoint(p), q))


def states_equal(p: PauliOp, q: PauliOp) -> Optional[int]:
    """``k`` with ``p Omega == i**k * q Omega``, or None if no such phase exists.

    Note ``k == 0`` is a success; test the result against None.
    """
    k = pair_exponent(p, q)
    return None if k is None else (-k) % 4


# --------------------------------------------------------------------------
# Formal vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExcitationVector:
    """Formal sum ``sum_k c_k P_k Omega``."""

    terms: tuple = ()

    def __init__(self, terms: Iterable = ()):
        object.__setattr__(self, "terms", tuple((GaussianRational.coerce(c), op) for c, op in terms))

    @classmethod
    def of(cls, op: PauliOp, coef=1) -> "ExcitationVector":
        return cls([(coef, op)])

    def __add__(self, other: "ExcitationVector") -> "ExcitationVector":
        return ExcitationVector(self.terms + other.terms)

    def __sub__(self, other: "ExcitationVector") -> "ExcitationVector":
        return self + other.scale(-1)

    def scale(self, c) -> "ExcitationVector":
        c = GaussianRational.coerce(c)
        return ExcitationVector((c * a, op) for a, op in self.terms)

    def apply(self, op: PauliOp) -> "ExcitationVector":
        """Left action of a Pauli operator."""
        return ExcitationVector((c, multiply(op, t)) for c, t in self.terms)


def inner(u: ExcitationVector, v: ExcitationVector) -> GaussianRational:
    """Sesquilinear pairing, antilinear in the first slot."""
    acc = ZERO
    for c, p in u.terms:
        pd = adjoint(p)
        for d, q in v.terms:
            k = omega_exponent(multiply(pd, q))
            if k is not None:
                acc = acc + c.conj() * d * _UNITS[k]
    return acc


def norm2(u: ExcitationVector) -> Fraction:
    val = inner(u, u)
    assert val.im == 0
    return val.re


# --------------------------------------------------------------------------
# Exact linear algebra over Q(i)
# --------------------------------------------------------------------------


def _gauss_int(z: GaussianRational, scale: int) -> tuple[int, int]:
    re, im = z.re * scale, z.im * scale
    assert re.denominator == 1 and im.denominator == 1
    return int(re), int(im)


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gdiv_exact(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    num = _gmul(a, (b[0], -b[1]))
    q0, r0 = divmod(num[0], n)
    q1, r1 = divmod(num[1], n)
    if r0 or r1:
        raise ArithmeticError("inexact division in fraction-free elimination")
    return (q0, q1)


def _bareiss_rank(rows: list[list[tuple[int, int]]]) -> tuple[int, list[int]]:
    """Rank and pivot rows of a Gaussian-integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    idx = list(range(len(m)))
    ncols = len(m[0]) if m else 0
    rank = 0
    prev = (1, 0)
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != (0, 0)), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        idx[rank], idx[piv] = idx[piv], idx[rank]
        p = m[rank][col]
        for r in range(rank + 1, len(m)):
            a = m[r][col]
            row = m[r]
            prow = m[rank]
            for c in range(col + 1, ncols):
                row[c] = _gdiv_exact(_gsub(_gmul(p, row[c]), _gmul(a, prow[c])), prev)
            row[col] = (0, 0)
        prev = p
        rank += 1
    return rank, sorted(idx[:rank])


def _blocks(matrix: Sequence[Sequence[GaussianRational]]) -> list[list[int]]:
    """Connected components of the nonzero pattern of a Hermitian matrix."""
    n = len(matrix)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            j = stack.pop()
            comp.append(j)
            for k in range(n):
                if not seen[k] and matrix[j][k]:
                    seen[k] = True
                    stack.append(k)
        out.append(sorted(comp))
    return out


def exact_rank(matrix: Sequence[Sequence[GaussianRational]]) -> tuple[int, list[int]]:
    """Rank of a Hermitian matrix over Q(i), with a maximal independent set of rows.

    The matrix is split into the connected blocks of its nonzero pattern, and
    each block is cleared of denominators row by row before Bareiss
    elimination over the Gaussian integers.
    """
    rank, basis = 0, []
    for comp in _blocks(matrix):
        rows = []
        for j in comp:
            entries = [matrix[j][k] for k in comp]
            scale = 1
            for z in entries:
                scale = _lcm(scale, z.re.denominator, z.im.denominator)
            rows.append([_gauss_int(z, scale) for z in entries])
        r, piv = _bareiss_rank(rows)
        rank += r
        basis.extend(comp[i] for i in piv)
    return rank, sorted(basis)


def _lcm(*xs: int) -> int:
    from math import lcm
    return lcm(*xs)


def is_positive_semidefinite(matrix: Sequence[Sequence[GaussianRational]]) -> bool:
    """Exact PSD test for a Hermitian matrix by symmetric elimination with pivoting."""
    n = len(matrix)
    a = [[GaussianRational.coerce(v) for v in row] for row in matrix]
    for j in range(n):
        for k in range(n):
            if a[j][k] != a[k][j].conj():
                return False
    active = list(range(n))
    while active:
        piv = max(active, key=lambda j: a[j][j].re)
        d = a[piv][piv].re
        if d < 0:
            return False
        if d == 0:
            # A zero diagonal forces the whole row to vanish.
            return all(not a[piv][k] for k in active) and is_positive_semidefinite(
                [[a[r][c] for c in active if c != piv] for r in active if r != piv])
        active.remove(piv)
        for r in active:
            f = a[r][piv] / a[piv][piv]
            if not f:
                continue
            for c in active:
                a[r][c] = a[r][c] - f * a[piv][c]
    return True


@dataclass(frozen=True)
class GramSummary:
    matrix: tuple
    rank: int
    basis_indices: tuple

    def to_json(self) -> dict:
        return {
            "matrix": [[z.to_json() for z in row] for row in self.matrix],
            "rank": self.rank,
            "basis_indices": list(self.basis_indices),
        }


def gram_matrix(vectors: Sequence) -> tuple:
    """Gram matrix of Pauli operators (as ``P * Omega``) or formal vectors."""
    items = list(vectors)
    if all(isinstance(v, PauliOp) for v in items):
        adj = [adjoint(p) for p in items]
        rows = []
        for j, pd in enumerate(adj):
            rows.append(tuple(omega(multiply(pd, q)) for q in items))
        return tuple(rows)
    vecs = [v if isinstance(v, ExcitationVector) else ExcitationVector.of(v) for v in items]
    return tuple(tuple(inner(u, v) for v in vecs) for u in vecs)


def gram(vectors: Sequence) -> GramSummary:
    m = gram_matrix(vectors)
    rank, basis = exact_rank(m)
    return GramSummary(m, rank, tuple(basis))


def stabilizer_absorption_check(x: PauliOp, y: PauliOp) -> bool:
    """Check ``omega(x y) == omega(y x) == omega(y)`` for a stabilizer-like ``x``."""
    if omega(x) != ONE:
        raise ValueError("first argument must have unit expectation")
    if not is_self_adjoint(x) or multiply(x, x) != IDENTITY:
        raise ValueError("first argument must be a self-adjoint involution")
    w = omega(y)
    return omega(multiply(x, y)) == w and omega(multiply(y, x)) == w


def subset_products(generators: Sequence[PauliOp], max_length: Optional[int] = None) -> list[PauliOp]:
    """Products of at most ``max_length`` distinct generators, identity first.

    Pauli generators commute up to sign and square to a scalar, so every
    product of generators is a phase times one of these.
    """
    n = len(generators)
    top = n if max_length is None else min(n, max_length)
    out = [IDENTITY]
    for r in range(1, top + 1):
        for combo in itertools.combinations(generators, r):
            acc = IDENTITY
            for g in combo:
                acc = multiply(acc, g)
            out.append(acc)
    return out


MAX_CENSUS_PRODUCTS = 1 << 14


def span_density_census(w, generators: Optional[Sequence[PauliOp]] = None,
                        max_length: Optional[int] = None) -> tuple[int, int]:
    """Rank of generated excitation vectors next to the oracle's cyclic dimension.

    ``generators`` defaults to the single-bond operators that satisfy the
    oracle's window contract.  Both numbers are computed from the same
    operator products, one exactly through ``omega`` and one by dense
    state vectors.
    """
    from . import oracle

    if generators is None:
        generators = oracle.interior_generators(w)
    generators = list(generators)
    n = len(generators)
    top = n if max_length is None else min(n, max_length)
    count = sum(_binom(n, r) for r in range(top + 1))
    if count > MAX_CENSUS_PRODUCTS:
        raise ValueError(f"census would need {count} products; reduce the window or max_length")
    ops = subset_products(generators, max_length)
    achieved = gram(ops).rank
    ambient = oracle.cyclic_dimension(w, generators, max_length)
    return achieved, ambient


def _binom(n: int, r: int) -> int:
    from math import comb
    return comb(n, r)
