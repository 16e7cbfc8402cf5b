"""Validated homomorphisms, kernels, fibers, quotients and the first isomorphism witness."""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.groups import (
    CosetPartition,
    FiniteGroup,
    Subgroup,
    from_cayley_table,
    left_cosets,
    make_subgroup,
    normality_witness,
    require_verified,
)
from kernel_atomicity.utils.errors import (
    EnumerationCapExceeded,
    HomomorphismError,
    InvariantViolation,
    NotAHomomorphism,
    NotNormal,
    ValidationCapExceeded,
    WitnessCheckFailed,
)

# Set up logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Homomorphism:
    """A structure-preserving map ``domain -> codomain`` stored as an index array."""

    domain: FiniteGroup
    codomain: FiniteGroup
    map: Tuple[int, ...]
    validated: bool = False

    def __call__(self, g: int) -> int:
        return self.map[g]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.map, dtype=np.int64)


def _validate_pairs(G: FiniteGroup, H: FiniteGroup, images: np.ndarray) -> Optional[Tuple[int, int]]:
    # lhs[x, y] = pi(xy), rhs[x, y] = pi(x)pi(y)
    lhs = images[G.table]
    rhs = H.table[images[:, None], images[None, :]]
    diff = np.argwhere(lhs != rhs)
    if diff.size:
        x, y = (int(v) for v in diff[0])
        return x, y
    return None


def _validate_sampled(G: FiniteGroup, H: FiniteGroup, mapping: List[int], config: AtomicityConfig) -> Homomorphism:
    logger.warning(
        f"domain order {G.order} exceeds validation cap {config.max_validate}; "
        f"sampling {config.associativity_samples} pairs (seed {config.seed})"
    )
    if mapping[0] != 0:
        raise NotAHomomorphism(0, 0, "identity is not mapped to the identity")
    rng = np.random.default_rng(config.seed)
    for x, y in rng.integers(0, G.order, size=(config.associativity_samples, 2)).tolist():
        xy = G.op(x, y)
        if mapping[xy] != H.op(mapping[x], mapping[y]):
            raise NotAHomomorphism(
                x, y, f"pi({xy}) = {mapping[xy]} but pi({x})pi({y}) = {H.op(mapping[x], mapping[y])}"
            )
    return Homomorphism(G, H, tuple(mapping), validated=False)


def hom_from_table(
    G: FiniteGroup,
    H: FiniteGroup,
    mapping: Sequence[int],
    config: Optional[AtomicityConfig] = None,
    sampled: bool = False,
) -> Homomorphism:
    """Validate ``mapping`` as a homomorphism G -> H on every pair of elements.

    Above ``max_validate`` the pair check needs ``sampled=True``. It then runs on
    a seeded sample of pairs and the result is left unvalidated, so kernel,
    fiber and first-isomorphism operations will refuse it.

    Args:
        G: domain
        H: codomain
        mapping: ``mapping[x]`` is the codomain index of x
        config: validation cap, sample count and seed
        sampled: allow sampled validation above the cap

    Returns:
        Homomorphism: with ``validated`` set unless the check was sampled

    Raises:
        HomomorphismError: If the array has the wrong length or bad entries
        NotAHomomorphism: With the first violating (x, y) in lexicographic order
        ValidationCapExceeded: If |G| is above ``max_validate`` and ``sampled`` is off
    """
    config = config or load_config()
    if G.order > config.max_validate and not sampled:
        raise ValidationCapExceeded(
            f"domain order {G.order} exceeds validation cap {config.max_validate}",
            G.order,
            config.max_validate,
        )
    mapping = list(mapping)
    if len(mapping) != G.order:
        raise HomomorphismError(
            f"map has {len(mapping)} entries, domain has order {G.order}",
            {"length": len(mapping), "order": G.order},
        )
    for x, h in enumerate(mapping):
        if isinstance(h, bool) or not isinstance(h, (int, np.integer)) or not 0 <= h < H.order:
            raise HomomorphismError(f"map[{x}] = {h!r} is not an element of the codomain", {"x": x})
    if G.order > config.max_validate:
        return _validate_sampled(G, H, [int(h) for h in mapping], config)

    images = np.asarray(mapping, dtype=np.int64)
    violation = _validate_pairs(G, H, images)
    if violation is not None:
        x, y = violation
        xy = G.op(x, y)
        raise NotAHomomorphism(
            x, y, f"pi({xy}) = {mapping[xy]} but pi({x})pi({y}) = {H.op(mapping[x], mapping[y])}"
        )
    if mapping[0] != 0:
        raise NotAHomomorphism(0, 0, "identity is not mapped to the identity")
    return Homomorphism(G, H, tuple(int(h) for h in mapping), validated=True)


def hom_from_generator_images(
    G: FiniteGroup,
    H: FiniteGroup,
    images: Sequence[int],
    config: Optional[AtomicityConfig] = None,
    sampled: bool = False,
) -> Homomorphism:
    """Extend generator images along each element's word, then validate as in ``hom_from_table``.

    The full pairwise check is the proof of well-definedness; an inconsistent
    assignment surfaces as NotAHomomorphism.
    """
    config = config or load_config()
    images = list(images)
    if len(images) != len(G.generators):
        raise HomomorphismError(
            f"expected {len(G.generators)} generator images, got {len(images)}",
            {"expected": len(G.generators), "got": len(images)},
        )
    for h in images:
        H._check_index(h)
    mapping = []
    for word in G.words:
        h = 0
        for position in word:
            h = H.op(h, images[position])
        mapping.append(h)
    return hom_from_table(G, H, mapping, config, sampled=sampled)


def identity_hom(G: FiniteGroup, config: Optional[AtomicityConfig] = None) -> Homomorphism:
    return hom_from_table(G, G, list(G.elements), config)


def composite(sigma: Homomorphism, pi: Homomorphism, config: Optional[AtomicityConfig] = None) -> Homomorphism:
    """sigma after pi."""
    if pi.codomain is not sigma.domain:
        raise HomomorphismError("codomain of the inner map is not the domain of the outer map")
    return hom_from_table(pi.domain, sigma.codomain, [sigma.map[h] for h in pi.map], config)


def _require_validated(pi: Homomorphism) -> None:
    if not pi.validated:
        raise HomomorphismError("homomorphism has not been validated")


def kernel(pi: Homomorphism) -> Subgroup:
    """Elements mapped onto the identity, verified closed."""
    _require_validated(pi)
    return make_subgroup(pi.domain, [x for x, h in enumerate(pi.map) if h == 0])


def image(pi: Homomorphism) -> Subgroup:
    _require_validated(pi)
    return make_subgroup(pi.codomain, set(pi.map))


def fiber(pi: Homomorphism, h: int, config: Optional[AtomicityConfig] = None) -> Tuple[int, ...]:
    """The pull-back of ``h``; empty when h is not in the image.

    With ``self_check`` enabled a nonempty fiber is also checked to be the
    coset x0*Ker of its least member x0.
    """
    _require_validated(pi)
    config = config or load_config()
    pi.codomain._check_index(h)
    members = tuple(x for x, value in enumerate(pi.map) if value == h)
    if members and config.self_check:
        G = pi.domain
        coset = {G.op(members[0], k) for k in kernel(pi).members}
        if coset != set(members):
            raise InvariantViolation(f"fiber over {h} is not a kernel coset", {"h": h})
    return members


def is_injective(pi: Homomorphism, config: Optional[AtomicityConfig] = None) -> bool:
    """True iff the kernel is trivial; cross-checked against distinct images."""
    _require_validated(pi)
    config = config or load_config()
    by_kernel = kernel(pi).order == 1
    if config.self_check:
        by_map = len(set(pi.map)) == len(pi.map)
        if by_kernel != by_map:
            raise InvariantViolation(
                f"trivial kernel is {by_kernel} but distinct images is {by_map}",
                {"kernel_trivial": by_kernel, "distinct_images": by_map},
            )
    return by_kernel


@dataclass(frozen=True)
class AtomicityReport:
    """Fiber structure of a homomorphism, computed without raising."""

    kernel: Subgroup
    image: Subgroup
    fibers: Dict[int, Tuple[int, ...]]
    partition: CosetPartition
    fiber_sizes_equal: bool
    fibers_are_cosets: bool
    counting_identity_holds: bool
    size_witness: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.fiber_sizes_equal and self.fibers_are_cosets and self.counting_identity_holds


def check_atomicity(pi: Homomorphism, config: Optional[AtomicityConfig] = None) -> AtomicityReport:
    """Compare every image-point fiber with the kernel and its coset partition."""
    _require_validated(pi)
    config = config or load_config()
    require_verified(pi.domain, config)
    ker = kernel(pi)
    img = image(pi)
    fibers: Dict[int, List[int]] = {h: [] for h in img.members}
    for x, h in enumerate(pi.map):
        fibers[h].append(x)
    partition = left_cosets(pi.domain, ker)

    wrong_size = [h for h, members in fibers.items() if len(members) != ker.order]
    fiber_family = frozenset(frozenset(members) for members in fibers.values())
    report = AtomicityReport(
        kernel=ker,
        image=img,
        fibers={h: tuple(members) for h, members in fibers.items()},
        partition=partition,
        fiber_sizes_equal=not wrong_size,
        fibers_are_cosets=fiber_family == partition.block_set(),
        counting_identity_holds=pi.domain.order == ker.order * img.order,
        size_witness=wrong_size[0] if wrong_size else None,
    )
    if not report.holds:
        logger.error(f"Atomicity failed for map {pi.map}")
    return report


@dataclass(frozen=True)
class QuotientGroup:
    """G/K as a group together with the projection and the coset partition."""

    group: FiniteGroup
    projection: Homomorphism
    partition: CosetPartition


def quotient_group(G: FiniteGroup, K: Subgroup, config: Optional[AtomicityConfig] = None) -> QuotientGroup:
    """Build G/K on the left cosets of a normal subgroup.

    Coset i is the i-th block of ``left_cosets(G, K)``; products are computed
    from least representatives and then recomputed from every pair of members.

    Raises:
        NotNormal: With the least g for which gKg^-1 != K
        NotASubgroup: If K is not closed in G
        ValidationCapExceeded: If |G| is above ``max_validate``
    """
    config = config or load_config()
    if G.order > config.max_validate:
        raise ValidationCapExceeded(
            f"group order {G.order} exceeds validation cap {config.max_validate}",
            G.order,
            config.max_validate,
        )
    partition = left_cosets(G, K)
    g = normality_witness(G, K)
    if g is not None:
        raise NotNormal(g)

    reps = np.asarray(partition.representatives, dtype=np.int64)
    block_of = np.asarray(partition.block_of, dtype=np.int64)
    table = block_of[G.table[np.ix_(reps, reps)]]

    # every member pair must land in the block the representatives give
    full = block_of[G.table]
    expected = table[block_of[:, None], block_of[None, :]]
    diff = np.argwhere(full != expected)
    if diff.size:
        a, b = (int(v) for v in diff[0])
        raise InvariantViolation(f"coset product not well defined at ({a}, {b})", {"a": a, "b": b})

    labels = [f"{G.label(int(r))}K" for r in reps]
    name = f"{G.name}/K" if G.name else ""
    quotient = from_cayley_table(table, name=name, labels=labels, config=config)
    projection = hom_from_table(G, quotient, block_of.tolist(), config)
    logger.info(f"Quotient of order {quotient.order} built from subgroup of order {K.order}")
    return QuotientGroup(quotient, projection, partition)


@dataclass(frozen=True)
class IsomorphismWitness:
    """An explicit isomorphism G/Ker(pi) -> image(pi).

    ``forward[b]`` is the image point of coset b; ``backward[h]`` is the coset
    over h, or -1 when h is outside the image.
    """

    quotient: FiniteGroup
    image: Subgroup
    forward: Tuple[int, ...]
    backward: Tuple[int, ...]
    kernel: Subgroup
    partition: CosetPartition


def first_isomorphism_witness(pi: Homomorphism, config: Optional[AtomicityConfig] = None) -> IsomorphismWitness:
    """Construct and check the isomorphism G/Ker(pi) ~ image(pi).

    Kernel normality is verified, not assumed. Bijectivity onto the image and
    preservation of the operation are checked on every pair of cosets.

    Raises:
        NotNormal: Only if the library is broken (kernels are always normal)
        WitnessCheckFailed: If the induced map is not an isomorphism
    """
    _require_validated(pi)
    config = config or load_config()
    require_verified(pi.domain, config)
    require_verified(pi.codomain, config)
    G, H = pi.domain, pi.codomain

    ker = kernel(pi)
    q = quotient_group(G, ker, config)
    img = image(pi)

    forward = [pi.map[rep] for rep in q.partition.representatives]
    for b, block in enumerate(q.partition.blocks):
        for x in block:
            if pi.map[x] != forward[b]:
                raise WitnessCheckFailed(b, x, "map is not constant on the coset")

    seen: Dict[int, int] = {}
    for b, h in enumerate(forward):
        if h in seen:
            raise WitnessCheckFailed(seen[h], b, f"cosets {seen[h]} and {b} both map to {h}")
        seen[h] = b
    if sorted(seen) != list(img.members):
        raise InvariantViolation("induced map does not cover the image")

    f = np.asarray(forward, dtype=np.int64)
    lhs = f[q.group.table]
    rhs = H.table[f[:, None], f[None, :]]
    diff = np.argwhere(lhs != rhs)
    if diff.size:
        a, b = (int(v) for v in diff[0])
        raise WitnessCheckFailed(a, b, "operation not preserved", prop="homomorphic")

    backward = [-1] * H.order
    for h, b in seen.items():
        backward[h] = b
    if any(backward[h] != b for b, h in enumerate(forward)):
        raise WitnessCheckFailed(0, 0, "backward map does not invert forward map")

    logger.debug(f"First isomorphism witness: quotient order {q.group.order} onto image order {img.order}")
    return IsomorphismWitness(
        quotient=q.group,
        image=img,
        forward=tuple(forward),
        backward=tuple(backward),
        kernel=ker,
        partition=q.partition,
    )


def enumerate_homomorphisms(
    G: FiniteGroup,
    H: FiniteGroup,
    config: Optional[AtomicityConfig] = None,
) -> List[Homomorphism]:
    """All homomorphisms G -> H, found by trying every assignment of generator images.

    Returns:
        Homomorphisms sorted lexicographically by map array, without duplicates

    Raises:
        EnumerationCapExceeded: If |H|^(number of generators) is above ``max_enumeration``
    """
    config = config or load_config()
    generators = G.generators
    candidates = H.order ** len(generators)
    if candidates > config.max_enumeration:
        raise EnumerationCapExceeded(
            f"{candidates} candidate assignments exceed cap {config.max_enumeration}",
            candidates,
            config.max_enumeration,
        )

    # element x = parent[x] * generator[step[x]], in order of word length
    index_of_word = {word: x for x, word in enumerate(G.words)}
    order = sorted(G.elements, key=lambda x: len(G.words[x]))[1:]
    parent = {x: index_of_word[G.words[x][:-1]] for x in order}
    step = {x: G.words[x][-1] for x in order}
    H_table = H.table

    found: Dict[Tuple[int, ...], Homomorphism] = {}
    for images in itertools.product(range(H.order), repeat=len(generators)):
        mapping = [0] * G.order
        for x in order:
            mapping[x] = int(H_table[mapping[parent[x]], images[step[x]]])
        try:
            pi = hom_from_table(G, H, mapping, config)
        except NotAHomomorphism:
            continue
        found.setdefault(pi.map, pi)
    logger.debug(f"Found {len(found)} homomorphisms among {candidates} candidates")
    return [found[key] for key in sorted(found)]
