"""Verification pipelines: one per spec family, each producing a VerificationReport.

A pipeline records checks in a fixed order. When a check failure makes the
rest meaningless, the pipeline stops and every planned check it did not
reach is reported as skipped with the reason.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import anyio
import numpy as np

from kernel_atomicity.actions import (
    GroupAction,
    action_from_table,
    action_homomorphism,
    action_kernel,
    natural_action,
    orbit,
    orbit_symmetry_witness,
    orbits,
    verify_orbit_stabilizer,
)
from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.fields import PrimeField
from kernel_atomicity.groups import (
    SAMPLED,
    FiniteGroup,
    Subgroup,
    check_axioms,
    normality_witness,
    subgroup_generated,
    verify_axioms,
)
from kernel_atomicity.homomorphism import (
    AtomicityReport,
    QuotientGroup,
    check_atomicity,
    first_isomorphism_witness,
    hom_from_generator_images,
    hom_from_table,
    image,
    is_injective,
    kernel,
    quotient_group,
)
from kernel_atomicity.linear import (
    ExactMatrix,
    Inconsistent,
    fiber_cardinality,
    fiber_census,
    matvec,
    null_space_basis,
    rank,
    rref,
    sample_coefficients,
    solve_affine,
    verify_translation_family,
)
from kernel_atomicity.report import (
    CAP_EXCEEDED,
    FAIL,
    INVALID_INPUT,
    PARSE_ERROR,
    PASS,
    SELF_CHECK,
    SKIPPED,
    Check,
    VerificationReport,
)
from kernel_atomicity.specs import (
    ACTION_KINDS,
    ALL_KINDS,
    GROUP_KINDS,
    HOM_KINDS,
    LINEAR_KINDS,
    QUOTIENT_KINDS,
    ActionSpec,
    GroupSpec,
    HomSpec,
    LinearSystemSpec,
    QuotientSpec,
    Spec,
    load_spec,
)
from kernel_atomicity.utils.errors import (
    ActionError,
    AtomicityError,
    CapExceeded,
    HomomorphismError,
    IndexOutOfRange,
    InvariantViolation,
    NotAGroup,
    NotAHomomorphism,
    NotASolutionSet,
    NotASubgroup,
    NotNormal,
    OrderCapExceeded,
    SpecParseError,
    WitnessCheckFailed,
)

# Set up logger
logger = logging.getLogger(__name__)

CHECK_STATEMENTS: Dict[str, str] = {
    "group.closure": "every product of two elements is an element",
    "group.identity": "a two-sided identity element exists",
    "group.inverses": "every element has a two-sided inverse",
    "group.associativity": "(ab)c = a(bc) for every triple",
    "hom.valid": "pi(xy) = pi(x)pi(y) for every pair",
    "kernel.subgroup": "Ker(pi) is a subgroup of the domain",
    "image.subgroup": "Im(pi) is a subgroup of the codomain",
    "atomicity.fiber-size": "every image-point fiber has exactly |Ker| elements",
    "atomicity.fiber-cosets": "the fibers are exactly the left cosets of the kernel",
    "atomicity.counting": "|G| = |Ker| * |Im|",
    "quotient.normal": "the subgroup is normal: gKg^-1 = K for every g",
    "quotient.well-defined": "coset multiplication does not depend on representatives",
    "firstiso.bijective": "gKer -> pi(g) is a bijection G/Ker -> Im",
    "firstiso.homomorphic": "gKer -> pi(g) preserves the operation",
    "injectivity.equivalence": "pi is injective iff Ker(pi) is trivial",
    "action.valid": "each row is a bijection, e acts trivially and (gh)x = g(hx)",
    "action.kernel": "the elements acting trivially form a normal subgroup",
    "orbit.equivalence": "y in Orb(x) iff x in Orb(y)",
    "orbstab.counting": "|G| = |Orb(x)| * |Stab(x)| at every point",
    "orbstab.fiber-size": "every fiber {g : gx = y} has |Stab(x)| elements",
    "orbstab.fiber-cosets": "the fibers of g -> gx are the left cosets of Stab(x)",
    "orbstab.restriction": "the fiber over x itself is Stab(x)",
    "linear.consistency": "Ly = b has a solution",
    "linear.rank-nullity": "rank + nullity = number of columns",
    "linear.kernel-basis": "the kernel basis is independent and annihilated by L",
    "linear.particular": "the particular solution satisfies Ly0 = b",
    "linear.translation-family": "y0 + sum(c_i k_i) solves Ly = b for sampled coefficients",
    "linear.fiber-cardinality": "every nonempty fiber is a translate of Ker(L)",
    "linear.gf-oracle": "brute force over GF(p)^n finds every image bucket of size p^nullity",
}

GROUP_CHECKS = ("group.closure", "group.identity", "group.inverses", "group.associativity")
ATOMICITY_CHECKS = ("atomicity.fiber-size", "atomicity.fiber-cosets", "atomicity.counting")
HOM_CHECKS = (
    ("hom.valid", "kernel.subgroup", "image.subgroup")
    + ATOMICITY_CHECKS
    + ("quotient.normal", "quotient.well-defined", "firstiso.bijective", "firstiso.homomorphic")
    + ("injectivity.equivalence",)
)
ACTION_CHECKS = (
    "action.valid",
    "action.kernel",
    "orbit.equivalence",
    "orbstab.counting",
    "orbstab.fiber-size",
    "orbstab.fiber-cosets",
    "orbstab.restriction",
)
LINEAR_CHECKS = (
    "linear.consistency",
    "linear.rank-nullity",
    "linear.kernel-basis",
    "linear.particular",
    "linear.translation-family",
    "linear.fiber-cardinality",
    "linear.gf-oracle",
)
QUOTIENT_CHECKS = ("quotient.normal", "quotient.well-defined") + ATOMICITY_CHECKS

COMMAND_KINDS: Dict[str, Tuple[str, ...]] = {
    "verify-group": GROUP_KINDS,
    "verify-hom": HOM_KINDS,
    "verify-action": ACTION_KINDS,
    "solve": LINEAR_KINDS,
    "verify-quotient": QUOTIENT_KINDS,
}

FAMILY_SAMPLES = 10


class _Recorder:
    """Collects checks in execution order and fills in the ones never reached."""

    def __init__(self, planned: Sequence[str]):
        self.planned = tuple(planned)
        self.checks: List[Check] = []
        self.stop_reason = ""

    def _add(self, name: str, status: str, witness: Optional[dict] = None, reason: str = "") -> None:
        self.checks.append(Check(name, CHECK_STATEMENTS[name], status, witness or {}, reason))

    def passed(self, name: str, witness: Optional[dict] = None) -> None:
        self._add(name, PASS, witness)

    def failed(self, name: str, witness: dict) -> None:
        logger.error(f"Check {name} failed: {witness}")
        self._add(name, FAIL, witness)

    def skipped(self, name: str, reason: str) -> None:
        self._add(name, SKIPPED, reason=reason)

    def check(self, name: str, holds: bool, witness: dict) -> bool:
        if holds:
            self.passed(name, witness)
        else:
            self.failed(name, witness)
        return holds

    def stop(self, reason: str) -> None:
        self.stop_reason = reason

    def finish(self) -> Tuple[Check, ...]:
        done = {check.name for check in self.checks}
        for name in self.planned:
            if name not in done:
                self.skipped(name, self.stop_reason or "not reached")
        # unplanned checks (a failed group axiom) lead, the rest follow the plan
        position = {name: i for i, name in enumerate(self.planned)}
        return tuple(sorted(self.checks, key=lambda check: position.get(check.name, -1)))


def _sampled_reason(groups: Sequence[FiniteGroup], config: AtomicityConfig) -> Optional[str]:
    if config.allow_sampled:
        return None
    if any(G.associativity == SAMPLED for G in groups):
        return "associativity was only sampled; rerun with --allow-sampled"
    return None


def _build_group(spec: GroupSpec, role: str, rec: _Recorder, config: AtomicityConfig) -> Optional[FiniteGroup]:
    try:
        G = spec.build(config)
    except NotAGroup as e:
        rec.failed(f"group.{e.axiom}", {"group": role, "elements": list(e.elements)})
        rec.stop(f"{role} is not a group")
        return None
    logger.info(f"Built {role} {G!r} from {spec.describe()}")
    return G


# Groups

def _verify_group(spec: GroupSpec, rec: _Recorder, config: AtomicityConfig) -> None:
    if spec.kind == "cayley":
        if spec.order > config.max_order:
            raise OrderCapExceeded(
                f"table order {spec.order} exceeds cap {config.max_order}", spec.order, config.max_order
            )
        results, _ = check_axioms(np.asarray(spec.table, dtype=np.int64), config)
    else:
        results = verify_axioms(spec.build(config), config)

    for result in results:
        name = f"group.{result.axiom}"
        if result.holds:
            witness = {}
            if result.mode == SAMPLED:
                witness = {"mode": SAMPLED, "samples": config.associativity_samples, "seed": config.seed}
            rec.passed(name, witness)
            continue
        witness = {"elements": list(result.witness)}
        if result.detail:
            witness["detail"] = result.detail
        rec.failed(name, witness)
        rec.stop(f"{result.axiom} fails")
        return


# Homomorphisms

def _record_atomicity(rec: _Recorder, report: AtomicityReport, G: FiniteGroup) -> None:
    k = report.kernel.order
    if report.fiber_sizes_equal:
        rec.passed("atomicity.fiber-size", {"kernel_order": k, "fibers": len(report.fibers)})
    else:
        h = report.size_witness
        rec.failed("atomicity.fiber-size", {"h": h, "fiber_size": len(report.fibers[h]), "kernel_order": k})

    if report.fibers_are_cosets:
        rec.passed("atomicity.fiber-cosets", {"index": report.partition.index})
    else:
        blocks = report.partition.block_set()
        h = next(h for h, members in sorted(report.fibers.items()) if frozenset(members) not in blocks)
        rec.failed("atomicity.fiber-cosets", {"h": h, "fiber": list(report.fibers[h])})

    rec.check(
        "atomicity.counting",
        report.counting_identity_holds,
        {"order": G.order, "kernel": k, "image": report.image.order},
    )


def _record_quotient(
    rec: _Recorder, G: FiniteGroup, K: Subgroup, config: AtomicityConfig
) -> Optional[QuotientGroup]:
    try:
        q = quotient_group(G, K, config)
    except NotNormal as e:
        rec.failed("quotient.normal", {"g": e.g, "subgroup": list(K.members)})
        rec.stop("subgroup is not normal")
        return None
    except InvariantViolation as e:
        rec.passed("quotient.normal", {"subgroup_order": K.order})
        rec.failed("quotient.well-defined", e.witness or {"detail": e.message})
        rec.stop("coset multiplication is not well defined")
        return None
    rec.passed("quotient.normal", {"subgroup_order": K.order})
    rec.passed("quotient.well-defined", {"quotient_order": q.group.order})
    return q


def _verify_hom(spec: HomSpec, rec: _Recorder, config: AtomicityConfig) -> None:
    G = _build_group(spec.domain, "domain", rec, config)
    if G is None:
        return
    H = _build_group(spec.codomain, "codomain", rec, config)
    if H is None:
        return

    try:
        if spec.kind == "hom":
            pi = hom_from_table(G, H, spec.map, config)
        else:
            pi = hom_from_generator_images(G, H, spec.images, config)
    except NotAHomomorphism as e:
        rec.failed("hom.valid", e.witness)
        rec.stop("map is not a homomorphism")
        return
    except (HomomorphismError, IndexOutOfRange) as e:
        rec.failed("hom.valid", e.witness or {"detail": e.message})
        rec.stop("map is not a homomorphism")
        return
    rec.passed("hom.valid", {"map": list(pi.map)})

    try:
        ker = kernel(pi)
    except NotASubgroup as e:
        rec.failed("kernel.subgroup", e.witness)
        rec.stop("kernel is not a subgroup")
        return
    rec.passed("kernel.subgroup", {"order": ker.order, "members": list(ker.members)})
    try:
        img = image(pi)
    except NotASubgroup as e:
        rec.failed("image.subgroup", e.witness)
        rec.stop("image is not a subgroup")
        return
    rec.passed("image.subgroup", {"order": img.order, "members": list(img.members)})

    reason = _sampled_reason((G, H), config)
    if reason:
        rec.stop(reason)
        return

    _record_atomicity(rec, check_atomicity(pi, config), G)
    if _record_quotient(rec, G, ker, config) is None:
        return

    try:
        witness = first_isomorphism_witness(pi, config)
    except WitnessCheckFailed as e:
        if e.prop == "homomorphic":
            rec.passed("firstiso.bijective")
            rec.failed("firstiso.homomorphic", e.witness)
        else:
            rec.failed("firstiso.bijective", e.witness)
            rec.stop("induced map is not a bijection")
    else:
        rec.passed("firstiso.bijective", {"forward": list(witness.forward)})
        rec.passed("firstiso.homomorphic", {"pairs": witness.quotient.order ** 2})

    try:
        injective = is_injective(pi, config)
    except InvariantViolation as e:
        rec.failed("injectivity.equivalence", e.witness)
    else:
        rec.passed("injectivity.equivalence", {"injective": injective})


# Actions

def _verify_action(spec: ActionSpec, rec: _Recorder, config: AtomicityConfig) -> None:
    G = _build_group(spec.group, "group", rec, config)
    if G is None:
        return
    try:
        if spec.kind == "natural-action":
            A = natural_action(G, config)
        else:
            A = action_from_table(G, spec.set_size, spec.table, config)
    except ActionError as e:
        rec.failed("action.valid", e.witness or {"detail": e.message})
        rec.stop("table is not an action")
        return
    rec.passed("action.valid", {"points": A.set_size})

    _record_action_kernel(rec, A, config)

    symmetry = orbit_symmetry_witness(A)
    classes = orbits(A)
    mismatch = next(
        (x for cls in classes for x in cls if orbit(A, x) != cls),
        None,
    )
    if symmetry is not None:
        rec.failed("orbit.equivalence", {"x": symmetry[0], "y": symmetry[1]})
    elif mismatch is not None:
        rec.failed("orbit.equivalence", {"x": mismatch, "orbit": list(orbit(A, mismatch))})
    else:
        rec.passed("orbit.equivalence", {"orbits": [list(cls) for cls in classes]})

    reason = _sampled_reason((G,), config)
    if reason:
        rec.stop(reason)
        return

    reports = [verify_orbit_stabilizer(A, x, config) for x in range(A.set_size)]
    bad = next((r for r in reports if not r.counting_holds), None)
    if bad is None:
        rec.passed("orbstab.counting", {"points": A.set_size, "order": G.order})
    else:
        rec.failed(
            "orbstab.counting",
            {"x": bad.point, "orbit": len(bad.orbit), "stabilizer": bad.stabilizer.order, "order": G.order},
        )
    for name, attribute in (
        ("orbstab.fiber-size", "fiber_sizes_equal"),
        ("orbstab.fiber-cosets", "fibers_are_cosets"),
        ("orbstab.restriction", "restriction_holds"),
    ):
        bad = next((r for r in reports if not getattr(r, attribute)), None)
        if bad is None:
            rec.passed(name, {"points": A.set_size})
        else:
            rec.failed(name, {"x": bad.point, "stabilizer": list(bad.stabilizer.members)})


def _record_action_kernel(rec: _Recorder, A: GroupAction, config: AtomicityConfig) -> None:
    G = A.group
    K = action_kernel(A)
    g = normality_witness(G, K)
    if g is not None:
        rec.failed("action.kernel", {"g": g, "kernel": list(K.members)})
        return
    if math.factorial(A.set_size) <= config.max_order and G.order <= config.max_validate:
        pi = action_homomorphism(A, config)
        if kernel(pi).members != K.members:
            rec.failed("action.kernel", {"kernel": list(K.members), "hom_kernel": list(kernel(pi).members)})
            return
    rec.passed("action.kernel", {"order": K.order})


# Linear systems

def _verify_linear(spec: LinearSystemSpec, rec: _Recorder, config: AtomicityConfig) -> None:
    M, b, F = spec.matrix, spec.rhs, spec.field
    try:
        result = solve_affine(M, b, config)
    except NotASolutionSet as e:
        rec.passed("linear.consistency")
        rec.failed("linear.particular", e.witness or {"detail": e.message})
        rec.stop("solution set failed verification")
        return
    if isinstance(result, Inconsistent):
        rec.failed("linear.consistency", result.witness)
        rec.stop("system is inconsistent")
        return
    rec.passed("linear.consistency")

    r, n = rank(M), M.ncols
    d = len(null_space_basis(M, config))
    rec.check(
        "linear.rank-nullity",
        r + d == n and d == result.dimension,
        {"rank": r, "nullity": d, "columns": n},
    )

    zero = tuple(F.zero for _ in range(M.nrows))
    basis = result.kernel_basis
    independent = not basis or rref(ExactMatrix(F, basis)).rank == len(basis)
    annihilated = all(matvec(M, k) == zero for k in basis)
    rec.check(
        "linear.kernel-basis",
        independent and annihilated,
        {"dimension": result.dimension, "basis": [[F.format(a) for a in k] for k in basis]},
    )

    rec.check(
        "linear.particular",
        matvec(M, result.particular) == tuple(b),
        {"y0": [F.format(a) for a in result.particular]},
    )

    samples = sample_coefficients(F, result.dimension, config.seed, FAMILY_SAMPLES)
    try:
        verify_translation_family(M, b, result, samples, config)
    except NotASolutionSet as e:
        rec.failed("linear.translation-family", e.witness or {"detail": e.message})
    else:
        rec.passed("linear.translation-family", {"samples": len(samples)})

    cardinality = fiber_cardinality(M)
    rec.check(
        "linear.fiber-cardinality",
        cardinality.dimension == result.dimension,
        {"fibers": str(cardinality)},
    )

    if not isinstance(F, PrimeField):
        rec.skipped("linear.gf-oracle", "field is Q; brute force needs a finite field")
        return
    if F.p ** n > config.brute_force_cap:
        rec.skipped("linear.gf-oracle", f"{F.p}^{n} inputs exceed the brute-force cap {config.brute_force_cap}")
        return
    census = fiber_census(M, b, config)
    expected = F.p ** d
    holds = (
        census.distinct_sizes == frozenset({expected})
        and census.bucket_count == F.p ** r
        and census.rhs_bucket is not None
        and len(census.rhs_bucket) == expected
    )
    rec.check(
        "linear.gf-oracle",
        holds,
        {"buckets": census.bucket_count, "sizes": sorted(census.distinct_sizes), "expected_size": expected},
    )


# Quotients

def _verify_quotient(spec: QuotientSpec, rec: _Recorder, config: AtomicityConfig) -> None:
    G = _build_group(spec.group, "group", rec, config)
    if G is None:
        return
    K = subgroup_generated(G, spec.subgroup)
    q = _record_quotient(rec, G, K, config)
    if q is None:
        return
    reason = _sampled_reason((G,), config)
    if reason:
        rec.stop(reason)
        return
    _record_atomicity(rec, check_atomicity(q.projection, config), G)


_PIPELINES: Dict[str, Tuple[Tuple[str, ...], Callable]] = {}
for _kind in GROUP_KINDS:
    _PIPELINES[_kind] = (GROUP_CHECKS, _verify_group)
for _kind in HOM_KINDS:
    _PIPELINES[_kind] = (HOM_CHECKS, _verify_hom)
for _kind in ACTION_KINDS:
    _PIPELINES[_kind] = (ACTION_CHECKS, _verify_action)
for _kind in LINEAR_KINDS:
    _PIPELINES[_kind] = (LINEAR_CHECKS, _verify_linear)
for _kind in QUOTIENT_KINDS:
    _PIPELINES[_kind] = (QUOTIENT_CHECKS, _verify_quotient)


def verify_spec(spec: Spec, subject: str, config: Optional[AtomicityConfig] = None) -> VerificationReport:
    """Run the pipeline for a parsed spec.

    Cap overruns and invalid inputs end the run early; the report then
    carries an ``error`` entry and the unreached checks are skipped.
    """
    config = config or load_config()
    planned, pipeline = _PIPELINES[spec.kind]
    rec = _Recorder(planned)
    error = None
    try:
        pipeline(spec, rec, config)
    except CapExceeded as e:
        logger.warning(f"{subject}: {e.message}")
        error = {"type": CAP_EXCEEDED, "message": e.message, "witness": e.witness}
        rec.stop("size cap exceeded")
    except InvariantViolation as e:
        logger.error(f"{subject}: self-check failed: {e.message}")
        error = {"type": SELF_CHECK, "message": e.message, "witness": e.witness}
        rec.stop("library self-check failed")
    except AtomicityError as e:
        logger.error(f"{subject}: {e.message}")
        error = {"type": INVALID_INPUT, "message": e.message, "witness": e.witness}
        rec.stop("invalid input")
    return VerificationReport(subject, spec.kind, rec.finish(), error=error)


def verify_path(
    path: Union[str, Path],
    config: Optional[AtomicityConfig] = None,
    kinds: Sequence[str] = ALL_KINDS,
) -> VerificationReport:
    """Load a spec file and verify it; parse problems become a parse-error report."""
    config = config or load_config()
    subject = str(path)
    try:
        spec = load_spec(path)
    except SpecParseError as e:
        logger.error(f"Cannot parse spec: {e}")
        error = {"type": PARSE_ERROR, "message": str(e), "witness": e.witness}
        return VerificationReport(subject, "unknown", error=error)
    if spec.kind not in kinds:
        message = f"{subject}: field 'kind': expected one of {', '.join(kinds)}, got {spec.kind}"
        logger.error(message)
        error = {"type": PARSE_ERROR, "message": message, "witness": {"field": "kind"}}
        return VerificationReport(subject, spec.kind, error=error)
    logger.info(f"Verifying {subject} ({spec.kind})")
    return verify_spec(spec, subject, config)


async def _verify_all(paths: Sequence[Union[str, Path]], config: AtomicityConfig) -> List[VerificationReport]:
    reports: List[Optional[VerificationReport]] = [None] * len(paths)

    async def run_one(position: int, path: Union[str, Path]) -> None:
        reports[position] = await anyio.to_thread.run_sync(verify_path, path, config)

    async with anyio.create_task_group() as tg:
        for position, path in enumerate(paths):
            tg.start_soon(run_one, position, path)
    return [report for report in reports if report is not None]


def verify_many(
    paths: Sequence[Union[str, Path]],
    config: Optional[AtomicityConfig] = None,
) -> List[VerificationReport]:
    """Verify several spec files concurrently; reports come back in input order."""
    config = config or load_config()
    return anyio.run(_verify_all, list(paths), config)
