"""Verification suites run by the command line tool.

Each suite returns a :class:`SuiteResult` with integer counters and the
first failing certificate, if any.  Results never contain timings, so the
report is byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import oracle
from .canonical import (
    CertificateError,
    ScaffoldError,
    build_scaffold,
    canonical_uniqueness_check,
    canonicalize,
    classify_excitation,
    dense_decompose,
    f0_group_elements,
    h0_dimension,
    syndrome_class_count,
    verify_membership,
)
from .config import RunConfig
from .lattice import (
    LatticeError,
    Verdict,
    cone_contains_bond,
    is_distally_separated,
    sample_contains_bond,
)
from .pauli import IDENTITY, PauliOp, loop_parity_census, multiply, plaquette_op, star_op
from .split import conjugation_suite, factorization_census, random_string_product, verify_isometry
from .vacuum import GaussianRational, span_density_census

PASS, FAIL, UNDETERMINED = "pass", "fail", "undetermined"


@dataclass
class SuiteResult:
    name: str
    status: str = PASS
    counters: dict = field(default_factory=dict)
    first_failure_certificate: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def fail(self, certificate: dict) -> None:
        if self.first_failure_certificate is None:
            self.first_failure_certificate = certificate
        self.status = FAIL

    def count(self, key: str, n: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + n

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "counters": dict(sorted(self.counters.items())),
            "first_failure_certificate": self.first_failure_certificate,
            "details": self.details,
        }


# Cone shapes used for the membership census, besides the configured ones.
CENSUS_SHAPES = (
    ((0, 0), (1, 0), (0, 1)),
    ((0, 0), (1, 1), (-1, 1)),
    ((1, 0), (2, 1), (1, 2)),
)


def geometry_suite(cfg: RunConfig) -> SuiteResult:
    from .lattice import Cone

    res = SuiteResult("geometry")
    w = cfg.window()
    shapes = [Cone(a, d1, d2) for a, d1, d2 in CENSUS_SHAPES]
    for name in sorted(cfg.data["cones"]):
        shapes.append(cfg.cone(name))
    for c in shapes:
        for b in w.bond_list:
            res.count("bonds_censused")
            if cone_contains_bond(c, b) != sample_contains_bond(c, b):
                res.fail({"check": "membership", "cone": c.to_dict(), "bond": [b.x, b.y, b.o.name]})
    if cfg.has_pair():
        c1, c2 = cfg.cone("lambda1"), cfg.cone("lambda2")
        try:
            sep = is_distally_separated(c1, c2, w)
        except LatticeError as exc:
            res.fail({"check": "separation", "error": str(exc)})
        else:
            res.details["separation"] = sep.to_dict()
            if sep.verdict is Verdict.FALSE:
                res.fail({"check": "separation", **sep.to_dict()})
            elif sep.verdict is Verdict.UNDETERMINED and res.status == PASS:
                res.status = UNDETERMINED
        same = is_distally_separated(c2, c2, w)
        res.details["self_separation"] = same.to_dict()
        if same.verdict is not Verdict.FALSE or same.witness is None:
            res.fail({"check": "self-separation", **same.to_dict()})
    par = loop_parity_census(w, cfg.trials("parity"), cfg.seed)
    res.count("loop_pairs", par["pairs"])
    res.count("crossing_pairs", par["crossing_pairs"])
    if par["odd"]:
        res.fail({"check": "parity", **par["odd"][0]})
    return res


def omega_oracle_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("omega-oracle")
    w = cfg.window("oracle_window")
    report = oracle.cross_validate(w, cfg.trials("omega-oracle"), cfg.seed, include_stabilizer_products=True)
    res.count("trials", report["trials"])
    res.count("failures", len(report["failures"]))
    res.details["max_abs_deviation"] = f"{report['max_abs_deviation']:.3e}"
    if report["failures"]:
        res.fail({"check": "omega", **report["failures"][0]})
    state = oracle.build_ground_state(w)
    for v in w.stars():
        val = oracle.expectation(state, star_op(v))
        res.count("stars_checked")
        if abs(val - 1) >= oracle.TOL:
            res.fail({"check": "star", "site": list(v), "value": [val.real, val.imag]})
    for p in w.plaquettes():
        val = oracle.expectation(state, plaquette_op(p))
        res.count("plaquettes_checked")
        if abs(val - 1) >= oracle.TOL:
            res.fail({"check": "plaquette", "site": list(p), "value": [val.real, val.imag]})
    e = oracle.energy(state)
    floor = oracle.ground_energy_floor(w)
    res.details["energy"] = f"{e:.12f}"
    res.details["energy_floor"] = floor
    if abs(e - floor) >= 1e-8:
        res.fail({"check": "energy", "energy": e, "floor": floor})
    cw = cfg.window("census_window")
    achieved, ambient = span_density_census(cw)
    res.details["census"] = {"window": cw.to_dict(), "bonds": cw.n_bonds,
                             "achieved_rank": achieved, "cyclic_dimension": ambient}
    if achieved != ambient:
        res.fail({"check": "census", "achieved_rank": achieved, "cyclic_dimension": ambient})
    return res


def _scaffold_or_fail(cfg: RunConfig, res: SuiteResult, reverse: bool = False):
    if not cfg.has_pair():
        res.fail({"check": "config", "error": "suite needs lambda1 and lambda2"})
        return None
    c1, c2 = cfg.cone("lambda1"), cfg.cone("lambda2")
    w = cfg.window()
    try:
        sep = is_distally_separated(c1, c2, w)
    except LatticeError as exc:
        res.fail({"check": "separation", "error": str(exc)})
        return None
    if sep.verdict is Verdict.FALSE:
        res.fail({"check": "separation", **sep.to_dict()})
        return None
    if sep.verdict is Verdict.UNDETERMINED:
        res.status = UNDETERMINED
        res.first_failure_certificate = {"check": "separation", **sep.to_dict()}
        return None
    try:
        return build_scaffold(c1, c2, w, reverse=reverse)
    except ScaffoldError as exc:
        res.fail({"check": "scaffold", "error": str(exc)})
        return None


def canonical_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("canonical")
    sc = _scaffold_or_fail(cfg, res)
    if sc is None:
        return res
    alt = build_scaffold(sc.inner, sc.outer, sc.window, reverse=True)
    rng = random.Random(cfg.seed)
    inner_w = sc.window.shrink(2)
    for _ in range(cfg.trials("canonical")):
        op = random_string_product(inner_w, rng)
        res.count("trials")
        try:
            form = canonicalize(op, sc)
            alt_form = canonicalize(op, alt)
            rerouted = canonicalize(op, sc, reverse=True)
        except (LatticeError, CertificateError) as exc:
            res.fail({"check": "canonicalize", "op": op.to_json(), "error": str(exc)})
            continue
        ok = verify_membership(form) and verify_membership(alt_form)
        ok = ok and canonical_uniqueness_check(form, rerouted) and canonical_uniqueness_check(form, alt_form)
        if not ok:
            res.fail({"check": "canonical", "op": op.to_json(), "form": form.to_json(),
                      "alternative": alt_form.to_json()})
        else:
            res.count("certified")
    return res


def classify_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("classify")
    c = cfg.cone("lambda")
    w = cfg.window()
    ew = cfg.window("classify_window")
    outside = [b for b in ew.bond_list if not cone_contains_bond(c, b)]
    gens = [PauliOp(0, (), (b,)) for b in outside] + [PauliOp(0, (b,), ()) for b in outside]
    seen = set()
    for r in range(cfg.data["classify_max_strings"] + 1):
        for combo in itertools.combinations(gens, r):
            op = IDENTITY
            for g in combo:
                op = multiply(op, g)
            if op in seen:
                continue
            seen.add(op)
            res.count("operators")
            try:
                out = classify_excitation(op, c, w)
            except (LatticeError, CertificateError) as exc:
                res.fail({"check": "classify", "op": op.to_json(), "error": str(exc)})
                continue
            res.count(type(out).__name__.lower())
            if not out.verify(op, c):
                res.fail({"check": "classify", "op": op.to_json(), "outcome": out.to_json()})
    return res


LAMBDAS = (GaussianRational(1), GaussianRational(0, 1), GaussianRational(1, 1))


def dense_decompose_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("dense-decompose")
    c = cfg.cone("lambda")
    w = cfg.window()
    ew = cfg.window("classify_window")
    inside = [b for b in ew.bond_list if cone_contains_bond(c, b)]
    gens = [PauliOp(0, (), (b,)) for b in inside] + [PauliOp(0, (b,), ()) for b in inside]
    for r in range(3):
        for combo in itertools.combinations(gens, r):
            op = IDENTITY
            for g in combo:
                op = multiply(op, g)
            for lam in LAMBDAS:
                res.count("decompositions")
                try:
                    dec = dense_decompose(lam, op, c, w)
                except (LatticeError, CertificateError) as exc:
                    res.fail({"check": "dense", "op": op.to_json(), "lambda": lam.to_json(), "error": str(exc)})
                    continue
                res.count(f"case_{dec.case}")
    return res


def split_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("split")
    sc = _scaffold_or_fail(cfg, res)
    if sc is None:
        return res
    iso = verify_isometry(sc, cfg.trials("split"), cfg.seed)
    res.count("isometry_pairs", iso["samples"])
    res.count("isometry_nonzero_pairs", iso["nonzero_pairs"])
    if iso["violations"]:
        res.fail({"check": "isometry", **iso["violations"][0]})
    fac = factorization_census(sc, cfg.window("factorization_window"))
    res.count("factorization_pairs", fac["pairs"])
    if fac["failures"]:
        res.fail({"check": "factorization", **fac["failures"][0]})
    for mirror in (False, True):
        key = "mirror_conjugation" if mirror else "conjugation"
        rep = conjugation_suite(sc, cfg.trials("conjugation"), cfg.seed + (1 if mirror else 0), mirror)
        res.count(key, rep["samples"])
        if rep["failures"]:
            res.fail({"check": key, **rep["failures"][0]})
    return res


def h0_suite(cfg: RunConfig) -> SuiteResult:
    res = SuiteResult("h0")
    sc = _scaffold_or_fail(cfg, res)
    if sc is None:
        return res
    try:
        elements = f0_group_elements(sc)
    except ValueError as exc:
        res.fail({"check": "h0", "error": str(exc)})
        return res
    dim = h0_dimension(sc)
    classes = syndrome_class_count(sc)
    res.counters.update({"scaffold_paths": len(sc.gamma), "group_elements": len(elements),
                         "h0_dimension": dim, "syndrome_classes": classes,
                         "interior_vertices": len(sc.interior_vertices),
                         "interior_plaquettes": len(sc.interior_plaquettes)})
    res.details["scaffold"] = sc.to_json()
    if dim != classes:
        res.fail({"check": "h0", "h0_dimension": dim, "syndrome_classes": classes})
    return res


SUITE_FUNCTIONS: dict[str, Callable[[RunConfig], SuiteResult]] = {
    "geometry": geometry_suite,
    "omega-oracle": omega_oracle_suite,
    "canonical": canonical_suite,
    "classify": classify_suite,
    "dense-decompose": dense_decompose_suite,
    "split": split_suite,
    "h0": h0_suite,
}
