"""Scaffold paths in the gap between two cones, canonical forms, and locality tools for the inner cone.

For nested cones ``inner`` and ``outer`` the bonds split into three parts:
the inner cone, the gap (outer minus inner) and the outer complement.  A
fixed family of gap paths, the scaffold, lets any excitation vector be
rewritten as ``phase * f1 * fhat * f2 * Omega`` with ``f1`` inside the inner
cone, ``f2`` outside the outer cone and ``fhat`` a product of scaffold
strings.  The scaffold group element is recorded as a bitmask over the
scaffold list.

Charges (odd vertices of the Z support) and fluxes (odd plaquettes of the X
support) are routed one kind at a time.  The same code handles both kinds
through a small table of per-kind helpers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .lattice import (
    Complement,
    Cone,
    ConeRegion,
    DualPath,
    Gap,
    LatticeError,
    Path,
    Plaquette,
    Region,
    Unreachable,
    Verdict,
    Vertex,
    Window,
    boundary_plaquettes,
    boundary_vertices,
    cone_contains_bond,
    dual_path_between,
    dual_path_to_nearest,
    is_distally_separated,
    path_between,
    path_to_nearest,
    plaquette_bonds,
    site_key,
    star_bonds,
)
from .pauli import (
    IDENTITY,
    PauliOp,
    commutes,
    is_self_adjoint,
    multiply,
    plaquette_op,
    star_op,
    string_from_dual_path,
    string_from_path,
    syndrome,
)
from .vacuum import ExcitationVector, GaussianRational, inner, states_equal


class ScaffoldError(LatticeError):
    pass


class NoGapRoute(ScaffoldError):
    """The gap region inside the window cannot connect the required endpoints."""


class NotRoutable(LatticeError):
    """An excitation cannot be routed inside the window."""


class CertificateError(AssertionError):
    """An exact certificate failed; this indicates a bug, not bad input."""


# --------------------------------------------------------------------------
# Per-kind helpers: charges live on vertices, fluxes on plaquettes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Kind:
    name: str
    cell_bonds: object
    sites: object
    route: object
    route_nearest: object
    to_op: object
    support: object

    def string(self, path) -> PauliOp:
        return self.to_op(path)


VERTEX_KIND = _Kind(
    "vertex",
    star_bonds,
    lambda w: w.vertices(),
    path_between,
    path_to_nearest,
    string_from_path,
    lambda op: op.z,
)
PLAQUETTE_KIND = _Kind(
    "plaquette",
    plaquette_bonds,
    lambda w: w.plaquettes(),
    dual_path_between,
    dual_path_to_nearest,
    string_from_dual_path,
    lambda op: op.x,
)


def _syndrome_sites(op: PauliOp, kind: _Kind) -> frozenset:
    s = syndrome(op)
    return s.charges if kind is VERTEX_KIND else s.fluxes


# --------------------------------------------------------------------------
# Scaffold
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaffoldPath:
    name: str
    kind: str
    path: Union[Path, DualPath]
    op: PauliOp

    @property
    def endpoints(self):
        return self.path.endpoints


@dataclass(frozen=True)
class Scaffold:
    """The gap path family for a pair of nested cones on a window.

    ``gamma`` lists the scaffold strings in a fixed order: the vertex
    connector, the plaquette connector, the two anchor paths, then one path
    per remaining interior vertex and interior plaquette.  Anchor entries are
    absent when the gap has no interior site of that kind.
    """

    inner: Cone
    outer: Cone
    window: Window
    gamma: tuple
    interior_vertices: frozenset
    interior_plaquettes: frozenset
    anchor_vertex: Optional[Vertex]
    anchor_plaquette: Optional[Plaquette]
    reverse: bool = False
    index: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def interior_labels(self) -> tuple:
        return (self.interior_vertices, self.interior_plaquettes)

    def position(self, name: str) -> int:
        return self.index[name]

    def __len__(self) -> int:
        return len(self.gamma)

    def part_of(self, b) -> int:
        """1 for the inner cone, 0 for the gap, 2 for the outer complement."""
        if cone_contains_bond(self.inner, b):
            return 1
        return 0 if cone_contains_bond(self.outer, b) else 2

    def regions(self):
        return ConeRegion(self.inner), Gap(self.inner, self.outer), Complement(self.outer)

    def to_json(self) -> dict:
        out = []
        for g in self.gamma:
            sites = g.path.vertices if g.kind == "vertex" else g.path.plaquettes
            out.append({"name": g.name, "kind": g.kind, "sites": [list(s) for s in sites]})
        return {
            "inner": self.inner.to_dict(),
            "outer": self.outer.to_dict(),
            "window": self.window.to_dict(),
            "gamma": out,
            "interior_vertices": [list(v) for v in sorted(self.interior_vertices, key=site_key)],
            "interior_plaquettes": [list(p) for p in sorted(self.interior_plaquettes, key=site_key)],
        }


def _cell_parts(scaffold_parts, cell_bonds, site) -> set:
    return {scaffold_parts(b) for b in cell_bonds(site)}


def _classify_sites(inner: Cone, outer: Cone, w: Window, kind: _Kind) -> dict:
    """Map each window site to the set of parts its cell touches."""
    def part(b):
        if cone_contains_bond(inner, b):
            return 1
        return 0 if cone_contains_bond(outer, b) else 2
    return {s: _cell_parts(part, kind.cell_bonds, s) for s in kind.sites(w)}


def _route(kind: _Kind, a, b, region: Region, w: Window, reverse: bool, err=NotRoutable):
    try:
        return kind.route(a, b, region, w, reverse)
    except Unreachable as exc:
        raise err(str(exc)) from exc


def _route_nearest(kind: _Kind, a, targets, region: Region, w: Window, reverse: bool, err=NotRoutable):
    try:
        return kind.route_nearest(a, targets, region, w, reverse)
    except Unreachable as exc:
        raise err(str(exc)) from exc


def build_scaffold(inner: Cone, outer: Cone, w: Window, reverse: bool = False) -> Scaffold:
    """Deterministic scaffold for ``inner << outer`` on the window ``w``.

    Endpoints are always chosen the same way: the smallest eligible site in
    ``(y, x)`` order, and for the far end the first site reached by
    forward-order BFS.  ``reverse`` only changes the tie-breaking of the
    connecting paths, which yields an alternative scaffold with the same
    endpoints.
    """
    sep = is_distally_separated(inner, outer, w)
    if sep.verdict is not Verdict.TRUE:
        raise ScaffoldError(f"cones are not verified distally separated: {sep.verdict.value} ({sep.detail})")
    gap = Gap(inner, outer)
    gamma = []
    interiors = {}
    anchors = {}
    for kind, tag in ((VERTEX_KIND, "v"), (PLAQUETTE_KIND, "p")):
        parts = _classify_sites(inner, outer, w, kind)
        mixed = sorted((s for s, ps in parts.items() if {1, 2} <= ps), key=site_key)
        if mixed:
            raise ScaffoldError(
                f"{kind.name} at {tuple(mixed[0])} touches both the inner cone and the outer complement")
        near1 = {s for s, ps in parts.items() if 1 in ps and 0 in ps}
        near2 = {s for s, ps in parts.items() if 2 in ps and 0 in ps}
        interior = frozenset(s for s, ps in parts.items() if ps == {0})
        interiors[kind.name] = interior
        if not near1 or not near2:
            raise NoGapRoute(f"no {kind.name} on both sides of the gap inside the window")
        start = min(near1, key=site_key)
        fwd = _route_nearest(kind, start, near2, gap, w, False, NoGapRoute)
        end = fwd.endpoints[1] if not fwd.is_empty else start
        path = fwd if not reverse else _route(kind, start, end, gap, w, True, NoGapRoute)
        gamma.append(ScaffoldPath(f"connector_{tag}", kind.name, path, kind.string(path)))
        anchors[kind.name] = None
        if interior:
            anchor = min(interior, key=site_key)
            anchors[kind.name] = anchor
            fwd = _route_nearest(kind, anchor, near1, gap, w, False, NoGapRoute)
            path = fwd if not reverse else _route(kind, anchor, fwd.endpoints[1], gap, w, True, NoGapRoute)
            interiors[kind.name + "_anchor_path"] = ScaffoldPath(
                f"anchor_{tag}", kind.name, path, kind.string(path))
    # Order: connectors, anchor paths, then per-site paths.
    ordered = list(gamma)
    for kname in ("vertex", "plaquette"):
        ap = interiors.get(kname + "_anchor_path")
        if ap is not None:
            ordered.append(ap)
    for kind, tag in ((VERTEX_KIND, "v"), (PLAQUETTE_KIND, "p")):
        anchor = anchors[kind.name]
        for s in sorted(interiors[kind.name], key=site_key):
            if s == anchor:
                continue
            path = _route(kind, s, anchor, gap, w, reverse, NoGapRoute)
            ordered.append(ScaffoldPath(f"site_{tag}_{s[0]}_{s[1]}", kind.name, path, kind.string(path)))
    index = {g.name: k for k, g in enumerate(ordered)}
    return Scaffold(inner, outer, w, tuple(ordered), interiors["vertex"], interiors["plaquette"],
                    anchors["vertex"], anchors["plaquette"], reverse, index)


DEFAULT_CAP = 1 << 12


def f0_element(scaffold: Scaffold, mask: int) -> PauliOp:
    """Product of the scaffold strings selected by ``mask``, in scaffold order."""
    acc = IDENTITY
    for j, g in enumerate(scaffold.gamma):
        if mask >> j & 1:
            acc = multiply(acc, g.op)
    return acc


def f0_group_elements(scaffold: Scaffold, cap: int = DEFAULT_CAP) -> list[PauliOp]:
    """All scaffold-group elements; entry ``m`` is the product selected by bitmask ``m``."""
    n = len(scaffold.gamma)
    if (1 << n) > cap:
        raise ValueError(f"scaffold group has 2^{n} elements, above the cap {cap}")
    return [f0_element(scaffold, m) for m in range(1 << n)]


def h0_dimension(scaffold: Scaffold, cap: int = DEFAULT_CAP) -> int:
    from .vacuum import gram

    return gram(f0_group_elements(scaffold, cap)).rank


def syndrome_class_count(scaffold: Scaffold, cap: int = DEFAULT_CAP) -> int:
    """Number of distinct syndromes among scaffold-group elements."""
    return len({syndrome(op) for op in f0_group_elements(scaffold, cap)})


# --------------------------------------------------------------------------
# Canonical forms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    """``i**phase * f1 * fhat * f2`` acting on the vacuum."""

    phase: int
    f1: PauliOp
    fhat: PauliOp
    f2: PauliOp
    mask: int
    scaffold: Scaffold = field(compare=False, repr=False)

    def operator(self) -> PauliOp:
        return multiply(multiply(self.f1, self.fhat), self.f2).times_phase(self.phase)

    def to_json(self) -> dict:
        return {
            "phase": self.phase,
            "f1": self.f1.to_json(),
            "fhat": self.fhat.to_json(),
            "f2": self.f2.to_json(),
            "mask": self.mask,
        }


def split_by_part(op: PauliOp, scaffold: Scaffold) -> tuple[PauliOp, PauliOp, PauliOp, int]:
    """``op = i**k * inner_part * gap_part * outer_part`` with phase-free parts.

    The parts have disjoint supports, so reordering them costs no sign.
    """
    parts = [PauliOp(0, (b for b in op.x if scaffold.part_of(b) == t),
                     (b for b in op.z if scaffold.part_of(b) == t)) for t in (1, 0, 2)]
    return parts[0], parts[1], parts[2], op.phase


def _pair_up(sites, kind: _Kind, region: Region, w: Window, reverse: bool) -> PauliOp:
    ordered = sorted(sites, key=site_key)
    acc = IDENTITY
    for a, b in zip(ordered[0::2], ordered[1::2]):
        acc = multiply(acc, kind.string(_route(kind, a, b, region, w, reverse)))
    return acc


def _sides(sites, kind: _Kind, scaffold: Scaffold):
    side1, side2 = [], []
    for s in sites:
        parts = {scaffold.part_of(b) for b in kind.cell_bonds(s)}
        if 1 in parts:
            side1.append(s)
        elif 2 in parts:
            side2.append(s)
        else:
            raise NotRoutable(f"{kind.name} excitation at {tuple(s)} is outside the scaffold's reach")
    return side1, side2


def _route_gap_syndrome(op0: PauliOp, scaffold: Scaffold, reverse: bool):
    """Scaffold mask and inner/outer correction strings matching the syndrome of a gap operator."""
    w = scaffold.window
    inner_region, _, outer_region = scaffold.regions()
    mask = 0
    c1, c2 = IDENTITY, IDENTITY
    for kind, tag, interior, anchor in (
            (VERTEX_KIND, "v", scaffold.interior_vertices, scaffold.anchor_vertex),
            (PLAQUETTE_KIND, "p", scaffold.interior_plaquettes, scaffold.anchor_plaquette)):
        residual = set(_syndrome_sites(op0, kind))
        for s in sorted(residual & interior, key=site_key):
            if s == anchor:
                continue
            j = scaffold.position(f"site_{tag}_{s[0]}_{s[1]}")
            mask ^= 1 << j
            residual ^= _syndrome_sites(scaffold.gamma[j].op, kind)
        if anchor is not None and anchor in residual:
            j = scaffold.position(f"anchor_{tag}")
            mask ^= 1 << j
            residual ^= _syndrome_sites(scaffold.gamma[j].op, kind)
        if len(_sides(residual, kind, scaffold)[0]) % 2:
            j = scaffold.position(f"connector_{tag}")
            mask ^= 1 << j
            residual ^= _syndrome_sites(scaffold.gamma[j].op, kind)
        side1, side2 = _sides(residual, kind, scaffold)
        c1 = multiply(c1, _pair_up(side1, kind, inner_region, w, reverse))
        c2 = multiply(c2, _pair_up(side2, kind, outer_region, w, reverse))
    return mask, c1, c2


def canonicalize(op: PauliOp, scaffold: Scaffold, reverse: bool = False) -> CanonicalForm:
    """Rewrite ``op * Omega`` as ``i**phase * f1 * fhat * f2 * Omega``.

    The gap part of ``op`` is replaced by scaffold strings plus correction
    strings inside the inner cone and outside the outer cone chosen so that
    the syndromes agree; the two vectors then differ by a stabilizer, and
    the phase is read off exactly from the vacuum functional.
    """
    w = scaffold.window
    if not all(w.contains_bond(b) for b in op.support):
        raise NotRoutable("operator support leaves the scaffold window")
    p1, p0, p2, _ = split_by_part(op, scaffold)
    mask, c1, c2 = _route_gap_syndrome(p0, scaffold, reverse)
    f1 = multiply(p1, c1).with_phase(0)
    f2 = multiply(p2, c2).with_phase(0)
    fhat = f0_element(scaffold, mask)
    bare = multiply(multiply(f1, fhat), f2)
    k = states_equal(op, bare)
    if k is None:
        raise CertificateError("rerouted operator does not reproduce the input state")
    form = CanonicalForm(k, f1, fhat, f2, mask, scaffold)
    if states_equal(op, form.operator()) != 0:
        raise CertificateError("canonical form phase certificate failed")
    return form


def verify_membership(form: CanonicalForm) -> bool:
    sc = form.scaffold
    ok1 = all(sc.part_of(b) == 1 for b in form.f1.support)
    ok2 = all(sc.part_of(b) == 2 for b in form.f2.support)
    return ok1 and ok2 and form.fhat == f0_element(sc, form.mask)


def canonical_uniqueness_check(a: CanonicalForm, b: CanonicalForm) -> bool:
    """Check ``fhat == ±fhat'`` for two forms of the same vector.

    Under one scaffold the comparison is between operators.  Across two
    scaffolds with the same endpoints the strings differ bond by bond, so
    the masks must agree and the two ``fhat`` vectors must be equal up to
    sign.
    """
    if states_equal(a.operator(), b.operator()) is None:
        raise ValueError("forms do not represent the same vector up to phase")
    if a.scaffold.gamma == b.scaffold.gamma:
        return a.fhat.x == b.fhat.x and a.fhat.z == b.fhat.z and (a.fhat.phase - b.fhat.phase) % 2 == 0
    return a.mask == b.mask and states_equal(a.fhat, b.fhat) in (0, 2)


# --------------------------------------------------------------------------
# Single-cone tools: pull-in, dichotomy, dense decomposition
# --------------------------------------------------------------------------


def pull_in(path: Union[Path, DualPath], c: Cone, w: Window) -> Union[Path, DualPath]:
    """Same-endpoint path whose bonds (crossed bonds) all lie in the cone."""
    region = ConeRegion(c)
    if isinstance(path, Path):
        kind, boundary = VERTEX_KIND, boundary_vertices(c, w)
    else:
        kind, boundary = PLAQUETTE_KIND, boundary_plaquettes(c, w)
    if path.is_empty:
        return path
    a, b = path.endpoints
    if a not in boundary or b not in boundary:
        raise LatticeError("pull-in needs both endpoints on the cone boundary")
    if all(bd in region for bd in path.bonds()):
        return path
    new = kind.route(a, b, region, w, False)
    if states_equal(kind.string(path), kind.string(new)) != 0:
        raise CertificateError("pulled-in string does not reproduce the original state")
    return new


@dataclass(frozen=True)
class Witness:
    stab: PauliOp
    kind: str
    site: tuple

    def verify(self, op: PauliOp, c: Cone) -> bool:
        return not any(cone_contains_bond(c, b) for b in self.stab.support) and not commutes(self.stab, op)

    def to_json(self) -> dict:
        return {"branch": "witness", "kind": self.kind, "site": list(self.site)}


@dataclass(frozen=True)
class InRepresentative:
    rep: PauliOp
    phase: int

    def verify(self, op: PauliOp, c: Cone) -> bool:
        return all(cone_contains_bond(c, b) for b in self.rep.support) and states_equal(op, self.rep) == self.phase

    def to_json(self) -> dict:
        return {"branch": "representative", "phase": self.phase, "rep": self.rep.to_json()}


def classify_excitation(op: PauliOp, c: Cone, w: Window):
    """Either a complement-side stabilizer that detects ``op``, or a cone-side representative.

    The syndrome serves as the normal form of the string family: loops
    cancel and merged paths keep only their endpoints.  A charge whose whole
    star lies outside the cone is a witness; otherwise every excitation sits
    on the cone boundary and is reconnected inside the cone.
    """
    if any(cone_contains_bond(c, b) for b in op.support):
        raise ValueError("operator must be supported outside the cone")
    syn = syndrome(op)
    for v in sorted(syn.charges, key=site_key):
        if not any(cone_contains_bond(c, b) for b in star_bonds(v)):
            return Witness(star_op(v), "star", tuple(v))
    for p in sorted(syn.fluxes, key=site_key):
        if not any(cone_contains_bond(c, b) for b in plaquette_bonds(p)):
            return Witness(plaquette_op(p), "plaquette", tuple(p))
    bv, bp = boundary_vertices(c, w), boundary_plaquettes(c, w)
    if not syn.charges <= bv or not syn.fluxes <= bp:
        raise CertificateError("excitation touching the cone is not on its boundary")
    region = ConeRegion(c)
    rep = multiply(_pair_up(syn.charges, VERTEX_KIND, region, w, False),
                   _pair_up(syn.fluxes, PLAQUETTE_KIND, region, w, False))
    k = states_equal(op, rep)
    if k is None:
        raise CertificateError("cone-side representative does not match the excitation")
    return InRepresentative(rep, k)


@dataclass(frozen=True)
class DenseDecomposition:
    a: ExcitationVector
    b: ExcitationVector
    case: str

    def residual(self, lam: GaussianRational, op: PauliOp) -> GaussianRational:
        diff = self.a + self.b.scale(GaussianRational(0, 1)) - ExcitationVector.of(op, lam)
        return inner(diff, diff)


def _mirror(op: PauliOp, region: Region, w: Window) -> PauliOp:
    syn = syndrome(op)
    return multiply(_pair_up(syn.charges, VERTEX_KIND, region, w, False),
                    _pair_up(syn.fluxes, PLAQUETTE_KIND, region, w, False))


def dense_decompose(lam, op: PauliOp, c: Cone, w: Window) -> DenseDecomposition:
    """Self-adjoint ``A`` in the cone and ``B`` outside it with ``A + iB = lam * op`` on the vacuum."""
    lam = GaussianRational.coerce(lam)
    if not all(cone_contains_bond(c, b) for b in op.support):
        raise ValueError("operator must be supported inside the cone")
    # op = s * herm with herm self-adjoint
    if is_self_adjoint(op):
        herm, s = op, GaussianRational(1)
    else:
        herm, s = op.times_phase(1), GaussianRational(0, -1)
    mu = lam * s
    re, im = mu.re, mu.im
    a_terms = [(re, herm)] if re else []
    b_terms = []
    case = "real"
    if im:
        syn = syndrome(herm)
        flip = None
        for v in sorted(syn.charges, key=site_key):
            if all(cone_contains_bond(c, b) for b in star_bonds(v)):
                flip = star_op(v)
                break
        if flip is None:
            for p in sorted(syn.fluxes, key=site_key):
                if all(cone_contains_bond(c, b) for b in plaquette_bonds(p)):
                    flip = plaquette_op(p)
                    break
        if flip is not None:
            # i*T*S is self-adjoint and i*T*S*Omega = -i*S*Omega
            t = multiply(flip, herm).times_phase(1)
            if not is_self_adjoint(t):
                raise CertificateError("flipped term is not self-adjoint")
            a_terms.append((-im, t))
            case = "flip"
        else:
            mirror = _mirror(herm, Complement(c), w)
            k = states_equal(herm, mirror)
            if k is None:
                raise CertificateError("mirror does not reproduce the state")
            hat = mirror.times_phase(k)
            if not is_self_adjoint(hat):
                raise CertificateError("mirror of a self-adjoint string is not self-adjoint")
            b_terms.append((im, hat))
            case = "mirror"
    dec = DenseDecomposition(ExcitationVector(a_terms), ExcitationVector(b_terms), case)
    if dec.residual(lam, op):
        raise CertificateError("decomposition does not reproduce lam * op * Omega")
    return dec
