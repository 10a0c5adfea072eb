"""Dense state-vector oracle on a finite window.

This is a deliberately naive second route: Pauli operators act on a
``2**n`` amplitude array bit by bit, and the window ground state is built by
projecting the all-zero Z-basis state onto the +1 eigenspace of every
interior star.  Nothing here calls the symbolic functional or the Pauli
multiplication rule.

Basis convention: window bonds are sorted by ``(y, x, orientation)`` and bond
``k`` is bit ``k`` of the basis index; a set bit means Z eigenvalue -1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .lattice import Window, bond_key, plaquette_bonds, star_bonds, sorted_bonds
from .pauli import PauliOp

MAX_BONDS = 22
TOL = 1e-9


class WindowTooLarge(ValueError):
    pass


class OutsideWindow(ValueError):
    pass


@dataclass
class DenseState:
    window: Window
    bonds: tuple
    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return len(self.bonds)

    def index_of(self) -> dict:
        return {b: k for k, b in enumerate(self.bonds)}

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _window_bonds(w: Window) -> tuple:
    bonds = tuple(sorted_bonds(w.bond_list))
    if len(bonds) > MAX_BONDS:
        raise WindowTooLarge(f"window has {len(bonds)} bonds; the oracle handles at most {MAX_BONDS}")
    return bonds


def _mask(bonds, index: dict) -> int:
    m = 0
    for b in bonds:
        k = index.get(b)
        if k is None:
            raise OutsideWindow(f"bond {b} is outside the oracle window")
        m |= 1 << k
    return m


def _parity(idx: np.ndarray, mask: int) -> np.ndarray:
    return np.bitwise_count(idx & mask) & 1


def _apply_masks(amps: np.ndarray, phase: int, xmask: int, zmask: int) -> np.ndarray:
    idx = np.arange(amps.size, dtype=np.int64)
    out = amps * (1 - 2 * _parity(idx, zmask).astype(np.float64))
    if xmask:
        out = out[idx ^ xmask]
    return out * (1j ** (phase % 4))


def apply_pauli(state: DenseState, op: PauliOp) -> DenseState:
    """``op |state>`` with ``op = i^phase X(x) Z(z)``: Z signs, then X flips, then the phase."""
    index = state.index_of()
    xm = _mask(op.x, index)
    zm = _mask(op.z, index)
    return DenseState(state.window, state.bonds, _apply_masks(state.amplitudes, op.phase, xm, zm))


def expectation(state: DenseState, op: PauliOp) -> complex:
    return complex(np.vdot(state.amplitudes, apply_pauli(state, op).amplitudes))


def build_ground_state(w: Window) -> DenseState:
    """Normalised projection of the all-zero state onto every interior star's +1 eigenspace."""
    bonds = _window_bonds(w)
    index = {b: k for k, b in enumerate(bonds)}
    amps = np.zeros(1 << len(bonds), dtype=np.complex128)
    amps[0] = 1.0
    idx = np.arange(amps.size, dtype=np.int64)
    for v in w.stars():
        m = _mask(star_bonds(v), index)
        amps = 0.5 * (amps + amps[idx ^ m])
    amps /= np.linalg.norm(amps)
    state = DenseState(w, bonds, amps)
    for v in w.stars():
        m = _mask(star_bonds(v), index)
        if np.max(np.abs(_apply_masks(amps, 0, m, 0) - amps)) > TOL:
            raise AssertionError(f"star at {v} does not stabilise the window state")
    for p in w.plaquettes():
        m = _mask(plaquette_bonds(p), index)
        if np.max(np.abs(_apply_masks(amps, 0, 0, m) - amps)) > TOL:
            raise AssertionError(f"plaquette at {p} does not stabilise the window state")
    return state


def energy(state: DenseState) -> float:
    """``<psi| H_w |psi>`` with ``H_w = -sum A_s - sum B_p`` over terms inside the window."""
    index = state.index_of()
    w = state.window
    total = 0.0
    for v in w.stars():
        m = _mask(star_bonds(v), index)
        total -= np.vdot(state.amplitudes, _apply_masks(state.amplitudes, 0, m, 0)).real
    for p in w.plaquettes():
        m = _mask(plaquette_bonds(p), index)
        total -= np.vdot(state.amplitudes, _apply_masks(state.amplitudes, 0, 0, m)).real
    return float(total)


def ground_energy_floor(w: Window) -> int:
    return -(len(w.stars()) + len(w.plaquettes()))


# --------------------------------------------------------------------------
# The window contract and random operators
# --------------------------------------------------------------------------


def _odd_sites(bonds, sites_of: Callable) -> set:
    odd: set = set()
    for b in bonds:
        for s in sites_of(b):
            odd ^= {s}
    return odd


def within_contract(w: Window, op: PauliOp) -> bool:
    """Support inside ``w`` and every anticommuting star and plaquette fully inside ``w``.

    Computed here from geometry alone so the oracle does not depend on the
    symbolic syndrome routine.
    """
    if not all(w.contains_bond(b) for b in op.x | op.z):
        return False
    charges = _odd_sites(op.z, lambda b: b.endpoints())
    fluxes = _odd_sites(op.x, lambda b: b.plaquettes())
    return all(w.contains_star(v) for v in charges) and all(w.contains_plaquette(p) for p in fluxes)


def interior_generators(w: Window) -> list[PauliOp]:
    """Single-bond Z and X operators that stay inside the window contract."""
    out = []
    for b in w.bond_list:
        if all(w.contains_star(v) for v in b.endpoints()):
            out.append(PauliOp(0, (), (b,)))
    for b in w.bond_list:
        if all(w.contains_plaquette(p) for p in b.plaquettes()):
            out.append(PauliOp(0, (b,), ()))
    return sorted(out, key=lambda op: (bool(op.x), [bond_key(b) for b in sorted(op.x | op.z, key=bond_key)]))


def _xor_into(acc: set, bonds) -> None:
    for b in bonds:
        acc ^= {b}


def random_interior_pauli(w: Window, rng: random.Random, max_tries: int = 1000) -> PauliOp:
    """A random operator satisfying the window contract.

    Half of the draws start from a random stabilizer product (so the
    expectation is a unit), the other half from random supports; either way
    a few contract-respecting single-bond factors are mixed in.
    """
    stars = w.stars()
    plaqs = w.plaquettes()
    gens = interior_generators(w)
    bonds = list(w.bond_list)
    for _ in range(max_tries):
        x: set = set()
        z: set = set()
        if rng.random() < 0.5:
            for v in stars:
                if rng.random() < 0.5:
                    _xor_into(x, star_bonds(v))
            for p in plaqs:
                if rng.random() < 0.5:
                    _xor_into(z, plaquette_bonds(p))
        else:
            x = {b for b in bonds if rng.random() < 0.3}
            z = {b for b in bonds if rng.random() < 0.3}
        if gens and rng.random() < 0.5:
            for g in rng.sample(gens, k=min(len(gens), rng.randint(1, 2))):
                _xor_into(x, g.x)
                _xor_into(z, g.z)
        op = PauliOp(rng.randrange(4), x, z)
        if within_contract(w, op):
            return op
    raise RuntimeError("could not sample an operator inside the window contract")


def stabilizer_products(w: Window, max_factors: int = 3) -> list[PauliOp]:
    """All products of at most ``max_factors`` distinct window stabilizers, with phase zero."""
    import itertools

    gens = [frozenset(star_bonds(v)) for v in w.stars()]
    kinds = ["x"] * len(gens)
    gens += [frozenset(plaquette_bonds(p)) for p in w.plaquettes()]
    kinds += ["z"] * (len(gens) - len(kinds))
    out = [PauliOp()]
    for r in range(1, max_factors + 1):
        for combo in itertools.combinations(range(len(gens)), r):
            x: set = set()
            z: set = set()
            for k in combo:
                _xor_into(x if kinds[k] == "x" else z, gens[k])
            out.append(PauliOp(0, x, z))
    return out


def cross_validate(w: Window, trials: int, seed: int,
                   omega_fn: Optional[Callable] = None,
                   include_stabilizer_products: bool = False) -> dict:
    """Compare the closed-form functional against dense expectations on random operators.

    ``omega_fn`` defaults to the symbolic functional and is a hook for
    negative controls.  Only this function reaches into the symbolic side,
    and only to obtain the values being checked.
    """
    if omega_fn is None:
        from .vacuum import omega as omega_fn
    state = build_ground_state(w)
    rng = random.Random(seed)
    ops = [random_interior_pauli(w, rng) for _ in range(trials)]
    if include_stabilizer_products:
        ops += stabilizer_products(w, 3)
    worst = 0.0
    failures = []
    for op in ops:
        dense = expectation(state, op)
        sym = complex(omega_fn(op))
        dev = abs(dense - sym)
        worst = max(worst, dev)
        if dev >= TOL:
            failures.append({"op": op.to_json(), "dense": [dense.real, dense.imag],
                             "symbolic": [sym.real, sym.imag]})
    return {
        "window": w.to_dict(),
        "trials": len(ops),
        "max_abs_deviation": worst,
        "failures": failures,
    }


def cyclic_dimension(w: Window, generators: Sequence[PauliOp], max_length: Optional[int] = None,
                     tol: float = 1e-8) -> int:
    """Numerical rank of ``{G_1 ... G_k psi}`` over subsets of at most ``max_length`` generators.

    Products are formed by applying the generators one after another to the
    dense state, never by symbolic multiplication.
    """
    import itertools

    state = build_ground_state(w)
    gens = list(generators)
    top = len(gens) if max_length is None else min(len(gens), max_length)
    cols = []
    for r in range(top + 1):
        for combo in itertools.combinations(gens, r):
            cur = state
            for g in reversed(combo):
                cur = apply_pauli(cur, g)
            cols.append(cur.amplitudes)
    s = np.linalg.svd(np.stack(cols, axis=1), compute_uv=False)
    return int(np.sum(s > tol))
