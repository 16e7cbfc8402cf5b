"""Finite groups on dense element indices, their subgroups and coset partitions.

Elements are the integers ``0..order-1`` with the identity pinned at index 0.
Two backends exist: a Cayley table supplied by the caller, and a permutation
group enumerated breadth-first from a list of generators.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.utils.errors import (
    GroupError,
    IndexOutOfRange,
    InvariantViolation,
    NotAGroup,
    NotAPermutation,
    NotASubgroup,
    OrderCapExceeded,
    SampledAxiomsRejected,
    WrongBackend,
)

# Set up logger
logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]

CAYLEY = "cayley"
PERMUTATION = "permutation"
EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
AXIOMS = ("closure", "identity", "inverses", "associativity")


# Permutation helpers (p[i] is the image of i)

def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return p after q, i.e. i -> p[q[i]]."""
    return tuple(p[i] for i in q)


def invert(p: Permutation) -> Permutation:
    inverse = [0] * len(p)
    for i, image in enumerate(p):
        inverse[image] = i
    return tuple(inverse)


def cycle_notation(p: Permutation) -> str:
    """Render a permutation as disjoint cycles, ``()`` for the identity."""
    seen = set()
    cycles = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = p[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = p[nxt]
        cycles.append("(" + " ".join(str(i) for i in cycle) + ")")
    return "".join(cycles) or "()"


def _check_permutation(position: int, candidate: Sequence[int], degree: int) -> Permutation:
    seen = set()
    for image in candidate:
        if not isinstance(image, (int, np.integer)) or not 0 <= image < degree or image in seen:
            raise NotAPermutation(position, int(image) if isinstance(image, (int, np.integer)) else -1)
        seen.add(int(image))
    if len(seen) != degree:
        raise NotAPermutation(position, len(candidate))
    return tuple(int(i) for i in candidate)


@dataclass(frozen=True)
class AxiomResult:
    """Outcome of checking one group axiom."""

    axiom: str
    holds: bool
    witness: Tuple[int, ...] = ()
    mode: str = EXHAUSTIVE
    detail: str = ""


class FiniteGroup:
    """A finite group with enumerable elements and a total multiplication.

    Instances are immutable after construction; build them with
    :func:`from_cayley_table` or :func:`from_permutation_generators`.
    """

    def __init__(
        self,
        *,
        order: int,
        backend: str,
        table: Optional[np.ndarray] = None,
        permutations: Optional[Sequence[Permutation]] = None,
        generator_permutations: Sequence[Permutation] = (),
        words: Optional[Sequence[Tuple[int, ...]]] = None,
        labels: Optional[Sequence[str]] = None,
        associativity: str = EXHAUSTIVE,
        name: str = "",
    ):
        self.order = order
        self.backend = backend
        self.name = name
        self.associativity = associativity
        self._labels = tuple(labels) if labels is not None else None
        self._table = None
        if table is not None:
            self._table = np.array(table, dtype=np.int64)
            self._table.setflags(write=False)
        self.permutations: Tuple[Permutation, ...] = tuple(permutations or ())
        self.generator_permutations: Tuple[Permutation, ...] = tuple(generator_permutations)
        self._index_of: Dict[Permutation, int] = {p: i for i, p in enumerate(self.permutations)}
        self._words = tuple(words) if words is not None else None
        self._inverses = self._compute_inverses()

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"FiniteGroup({label}, order={self.order}, backend={self.backend})"

    @property
    def elements(self) -> range:
        return range(self.order)

    @property
    def degree(self) -> int:
        if self.backend != PERMUTATION:
            raise WrongBackend("only permutation groups have a degree")
        return len(self.permutations[0])

    @property
    def metadata(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "backend": self.backend,
            "associativity": self.associativity,
        }

    def _compute_inverses(self) -> Tuple[int, ...]:
        if self.backend == PERMUTATION:
            return tuple(self._index_of[invert(p)] for p in self.permutations)
        table = self._table
        positions = np.argmax(table == 0, axis=1)
        return tuple(int(h) for h in positions)

    def _check_index(self, g: int) -> None:
        if not isinstance(g, (int, np.integer)) or not 0 <= g < self.order:
            raise IndexOutOfRange(int(g) if isinstance(g, (int, np.integer)) else -1, self.order)

    def op(self, g: int, h: int) -> int:
        """Multiply two elements by index."""
        self._check_index(g)
        self._check_index(h)
        if self._table is not None:
            return int(self._table[g, h])
        return self._index_of[compose(self.permutations[g], self.permutations[h])]

    def inverse(self, g: int) -> int:
        self._check_index(g)
        return self._inverses[g]

    def permutation(self, g: int) -> Permutation:
        if self.backend != PERMUTATION:
            raise WrongBackend(f"{self!r} has no permutation representation")
        self._check_index(g)
        return self.permutations[g]

    def index_of_permutation(self, p: Sequence[int]) -> int:
        if self.backend != PERMUTATION:
            raise WrongBackend(f"{self!r} has no permutation representation")
        return self._index_of[tuple(p)]

    def label(self, g: int) -> str:
        self._check_index(g)
        if self._labels is not None:
            return self._labels[g]
        if self.backend == PERMUTATION:
            return cycle_notation(self.permutations[g])
        return str(g)

    def element_order(self, g: int) -> int:
        self._check_index(g)
        power, n = g, 1
        while power != 0:
            power = self.op(power, g)
            n += 1
        return n

    @property
    def table(self) -> np.ndarray:
        """The full Cayley table as a read-only integer array."""
        if self._table is None:
            self._table = self._build_permutation_table()
        return self._table

    def _build_permutation_table(self) -> np.ndarray:
        logger.debug(f"Building Cayley table for permutation group of order {self.order}")
        perms = np.asarray(self.permutations, dtype=np.int64)
        table = np.empty((self.order, self.order), dtype=np.int64)
        for g in range(self.order):
            # composed[h] = perms[g] after perms[h]
            composed = perms[g][perms]
            table[g] = [self._index_of[tuple(row)] for row in composed.tolist()]
        table.setflags(write=False)
        return table

    @cached_property
    def _generating_data(self) -> Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...]]:
        if self.backend == PERMUTATION:
            gens = tuple(self._index_of[p] for p in self.generator_permutations)
            return gens, self._words
        gens: List[int] = []
        span = {0}
        for g in range(self.order):
            if g not in span:
                gens.append(g)
                span = set(_closure(self, gens))
        return tuple(gens), _words_for(self, gens)

    @property
    def generators(self) -> Tuple[int, ...]:
        """Element indices of the generating set.

        Permutation groups use their input generators in input order; table
        groups use a greedy generating set (ascending indices, each added only
        when not already generated).
        """
        return self._generating_data[0]

    @property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        """Per element, a shortest word in generator positions reaching it from the identity."""
        return self._generating_data[1]


def _words_for(G: FiniteGroup, gens: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    words: List[Optional[Tuple[int, ...]]] = [None] * G.order
    words[0] = ()
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for position, s in enumerate(gens):
            y = G.op(x, s)
            if words[y] is None:
                words[y] = words[x] + (position,)
                queue.append(y)
    if any(w is None for w in words):
        raise InvariantViolation("generating set does not reach every element")
    return tuple(words)


def _closure(G: FiniteGroup, seeds: Iterable[int]) -> List[int]:
    seeds = list(dict.fromkeys(seeds))
    members = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in seeds:
            y = G.op(x, s)
            if y not in members:
                members.add(y)
                queue.append(y)
    return sorted(members)


# Axioms

def _as_square_table(table: Any) -> np.ndarray:
    rows = [list(row) for row in table]
    n = len(rows)
    if n == 0:
        raise NotAGroup("identity", (), "empty table has no identity")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise NotAGroup("closure", (r,), f"row {r} has {len(row)} entries, expected {n}")
        for c, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise NotAGroup("closure", (r, c), f"entry {value!r} is not an element index")
    return np.array(rows, dtype=np.int64).reshape(n, n)


def check_axioms(
    table: np.ndarray,
    config: Optional[AtomicityConfig] = None,
) -> Tuple[List[AxiomResult], Optional[int]]:
    """Check closure, identity, inverses and associativity of a square table.

    Checks run in that order and stop at the first failure, so the returned
    list may be shorter than four entries.

    Args:
        table: n x n integer table, ``table[g, h]`` is the product gh
        config: caps for the exhaustive associativity check

    Returns:
        The per-axiom results and the identity index (None if not found)
    """
    config = config or load_config()
    n = table.shape[0]
    results: List[AxiomResult] = []

    bad = np.argwhere((table < 0) | (table >= n))
    if bad.size:
        g, h = (int(v) for v in bad[0])
        results.append(AxiomResult("closure", False, (g, h, int(table[g, h])), detail="product out of range"))
        return results, None
    results.append(AxiomResult("closure", True))

    span = np.arange(n)
    row_ok = (table == span[None, :]).all(axis=1)
    col_ok = (table == span[:, None]).all(axis=0)
    candidates = np.flatnonzero(row_ok & col_ok)
    if candidates.size == 0:
        misses = np.flatnonzero((table[0] != span) | (table[:, 0] != span))
        g = int(misses[0])
        results.append(AxiomResult("identity", False, (0, g, int(table[0, g])), detail="no two-sided identity"))
        return results, None
    e = int(candidates[0])
    results.append(AxiomResult("identity", True))

    mask = (table == e) & (table.T == e)
    missing = np.flatnonzero(~mask.any(axis=1))
    if missing.size:
        results.append(AxiomResult("inverses", False, (int(missing[0]),), detail="element has no inverse"))
        return results, e
    results.append(AxiomResult("inverses", True))

    results.append(_check_associativity(table, config))
    return results, e


def _check_associativity(table: np.ndarray, config: AtomicityConfig) -> AxiomResult:
    n = table.shape[0]
    if n <= config.associativity_cap:
        for a in range(n):
            # lhs[b, c] = (ab)c, rhs[b, c] = a(bc)
            lhs = table[table[a]]
            rhs = table[a][table]
            diff = np.argwhere(lhs != rhs)
            if diff.size:
                b, c = (int(v) for v in diff[0])
                return AxiomResult("associativity", False, (a, b, c))
        return AxiomResult("associativity", True)
    logger.warning(
        f"Order {n} exceeds associativity cap {config.associativity_cap}; "
        f"sampling {config.associativity_samples} triples (seed {config.seed})"
    )
    rng = np.random.default_rng(config.seed)
    triples = rng.integers(0, n, size=(config.associativity_samples, 3))
    a, b, c = triples[:, 0], triples[:, 1], triples[:, 2]
    failed = np.flatnonzero(table[table[a, b], c] != table[a, table[b, c]])
    if failed.size:
        i = failed[0]
        return AxiomResult("associativity", False, (int(a[i]), int(b[i]), int(c[i])), mode=SAMPLED)
    return AxiomResult("associativity", True, mode=SAMPLED)


def verify_axioms(G: FiniteGroup, config: Optional[AtomicityConfig] = None) -> List[AxiomResult]:
    """Re-run the group axioms on a constructed group.

    Large permutation groups (above the associativity cap) are checked on a
    sample of triples for closure and associativity, and exhaustively for
    identity and inverses.
    """
    config = config or load_config()
    if G.backend == CAYLEY or G.order <= config.associativity_cap:
        results, _ = check_axioms(G.table, config)
        return results

    rng = np.random.default_rng(config.seed)
    triples = rng.integers(0, G.order, size=(config.associativity_samples, 3)).tolist()
    results = [AxiomResult("closure", True, mode=SAMPLED)]
    for a, b, _ in triples:
        composed = compose(G.permutations[a], G.permutations[b])
        if composed not in G._index_of:
            return [AxiomResult("closure", False, (a, b), mode=SAMPLED)]
    missing = [g for g in G.elements if G.op(0, g) != g or G.op(g, 0) != g]
    if missing:
        return results + [AxiomResult("identity", False, (0, missing[0]))]
    results.append(AxiomResult("identity", True))
    missing = [g for g in G.elements if G.op(g, G.inverse(g)) != 0]
    if missing:
        return results + [AxiomResult("inverses", False, (missing[0],))]
    results.append(AxiomResult("inverses", True))
    for a, b, c in triples:
        if G.op(G.op(a, b), c) != G.op(a, G.op(b, c)):
            return results + [AxiomResult("associativity", False, (a, b, c), mode=SAMPLED)]
    results.append(AxiomResult("associativity", True, mode=SAMPLED))
    return results


def require_verified(G: FiniteGroup, config: Optional[AtomicityConfig] = None) -> None:
    """Reject groups whose associativity was only sampled, unless allowed."""
    config = config or load_config()
    if G.associativity == SAMPLED and not config.allow_sampled:
        raise SampledAxiomsRejected(
            f"{G!r} has sampled associativity; pass allow_sampled to run theorem checks on it",
            {"order": G.order},
        )


# Construction

def from_cayley_table(
    table: Any,
    *,
    name: str = "",
    labels: Optional[Sequence[str]] = None,
    config: Optional[AtomicityConfig] = None,
) -> FiniteGroup:
    """Build a group from a square multiplication table.

    Args:
        table: n x n matrix of element indices, ``table[g][h]`` = gh
        name: optional display name
        labels: optional per-element display strings
        config: caps for the associativity check

    Returns:
        FiniteGroup: the group, with its identity relabelled to index 0

    Raises:
        NotAGroup: If closure, identity, inverses or associativity fails;
            the witness indices refer to the input table
    """
    config = config or load_config()
    arr = _as_square_table(table)
    n = arr.shape[0]
    if n > config.max_order:
        raise OrderCapExceeded(f"table order {n} exceeds cap {config.max_order}", n, config.max_order)
    results, e = check_axioms(arr, config)
    failed = [r for r in results if not r.holds]
    if failed:
        raise NotAGroup(failed[0].axiom, failed[0].witness, failed[0].detail)

    if labels is not None and len(labels) != n:
        raise GroupError(f"expected {n} labels, got {len(labels)}")
    if e != 0:
        logger.debug(f"Relabelling identity {e} to index 0")
        swap = np.arange(n)
        swap[0], swap[e] = e, 0
        # swap is an involution: new index i corresponds to old index swap[i]
        arr = swap[arr[np.ix_(swap, swap)]]
        if labels is not None:
            labels = [labels[int(i)] for i in swap]

    group = FiniteGroup(
        order=n,
        backend=CAYLEY,
        table=arr,
        labels=labels,
        associativity=results[-1].mode,
        name=name,
    )
    logger.info(f"Constructed {group!r} from Cayley table ({group.associativity} associativity)")
    return group


def from_permutation_generators(
    degree: int,
    generators: Sequence[Sequence[int]],
    *,
    name: str = "",
    config: Optional[AtomicityConfig] = None,
) -> FiniteGroup:
    """Enumerate the permutation group generated by ``generators``.

    Elements are discovered breadth-first from the identity, applying the
    generators in input order on the right, so the element table is
    deterministic for a fixed input.

    Args:
        degree: number of points moved, points are 0..degree-1
        generators: permutations given as image lists
        name: optional display name
        config: enumeration and associativity caps

    Returns:
        FiniteGroup: permutation-backed group with generator words recorded

    Raises:
        NotAPermutation: If a generator is not a bijection on 0..degree-1
        OrderCapExceeded: If the closure grows past ``max_order``
    """
    config = config or load_config()
    if not isinstance(degree, int) or degree < 1:
        raise GroupError(f"degree must be a positive integer, got {degree!r}")
    gens = [_check_permutation(i, g, degree) for i, g in enumerate(generators)]

    identity = tuple(range(degree))
    perms: List[Permutation] = [identity]
    words: List[Tuple[int, ...]] = [()]
    index_of = {identity: 0}
    i = 0
    while i < len(perms):
        for position, s in enumerate(gens):
            new = compose(perms[i], s)
            if new not in index_of:
                if len(perms) >= config.max_order:
                    raise OrderCapExceeded(
                        f"permutation group exceeds order cap {config.max_order}",
                        len(perms) + 1,
                        config.max_order,
                    )
                index_of[new] = len(perms)
                perms.append(new)
                words.append(words[i] + (position,))
        i += 1

    group = FiniteGroup(
        order=len(perms),
        backend=PERMUTATION,
        permutations=perms,
        generator_permutations=gens,
        words=words,
        associativity=EXHAUSTIVE if len(perms) <= config.associativity_cap else SAMPLED,
        name=name,
    )
    failed = [r for r in verify_axioms(group, config) if not r.holds]
    if failed:
        raise InvariantViolation(f"permutation group failed {failed[0].axiom} at {failed[0].witness}")
    logger.info(f"Enumerated {group!r} from {len(gens)} generators on {degree} points")
    return group


def group_op(G: FiniteGroup, g: int, h: int) -> int:
    return G.op(g, h)


def group_inverse(G: FiniteGroup, g: int) -> int:
    return G.inverse(g)


# Subgroups and cosets

@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its sorted member indices in ``parent``."""

    parent: FiniteGroup
    members: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self._member_set

    @cached_property
    def _member_set(self) -> frozenset:
        return frozenset(self.members)


def _closure_witness(G: FiniteGroup, members: Sequence[int]) -> Optional[Tuple[str, Tuple[int, ...]]]:
    member_set = set(members)
    if 0 not in member_set:
        return "missing identity", (0,)
    for g in members:
        if G.inverse(g) not in member_set:
            return "not closed under inverse", (g, G.inverse(g))
    if G._table is not None or G.order <= 2048:
        idx = np.asarray(sorted(member_set), dtype=np.int64)
        products = G.table[np.ix_(idx, idx)]
        outside = np.argwhere(~np.isin(products, idx))
        if outside.size:
            a, b = (int(idx[v]) for v in outside[0])
            return "not closed under product", (a, b, G.op(a, b))
        return None
    for a in sorted(member_set):
        for b in sorted(member_set):
            if G.op(a, b) not in member_set:
                return "not closed under product", (a, b, G.op(a, b))
    return None


def make_subgroup(G: FiniteGroup, members: Iterable[int]) -> Subgroup:
    """Validate an explicit member set as a subgroup of ``G``.

    Raises:
        IndexOutOfRange: If a member index is outside the group
        NotASubgroup: If the identity is missing or closure fails
    """
    members = sorted(set(members))
    for g in members:
        G._check_index(g)
    problem = _closure_witness(G, members)
    if problem is not None:
        raise NotASubgroup(*problem)
    if G.order % len(members):
        raise InvariantViolation(f"subgroup order {len(members)} does not divide {G.order}")
    return Subgroup(G, tuple(members))


def subgroup_generated(G: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    """Smallest subgroup of ``G`` containing ``seeds``."""
    seeds = list(seeds)
    for g in seeds:
        G._check_index(g)
    members = _closure(G, seeds)
    logger.debug(f"Subgroup generated by {seeds} has order {len(members)}")
    return Subgroup(G, tuple(members))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (0,))


def whole_group(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(G.elements))


@dataclass(frozen=True)
class CosetPartition:
    """The cosets of ``subgroup`` in ``parent``: the atoms of a fiber partition.

    ``blocks`` are listed in ascending order of their least element, which is
    also the block's representative.
    """

    parent: FiniteGroup
    subgroup: Subgroup
    blocks: Tuple[Tuple[int, ...], ...]
    representatives: Tuple[int, ...]
    block_of: Tuple[int, ...]
    side: str = "left"

    @property
    def index(self) -> int:
        return len(self.blocks)

    def block_containing(self, g: int) -> Tuple[int, ...]:
        return self.blocks[self.block_of[g]]

    def block_set(self) -> frozenset:
        return frozenset(frozenset(block) for block in self.blocks)


def _require_subgroup_of(G: FiniteGroup, K: Subgroup) -> None:
    for g in K.members:
        G._check_index(g)
    problem = _closure_witness(G, K.members)
    if problem is not None:
        raise NotASubgroup(*problem)


def left_cosets(G: FiniteGroup, K: Subgroup, *, right: bool = False) -> CosetPartition:
    """Partition ``G`` into the left cosets gK (or right cosets Kg).

    Raises:
        NotASubgroup: If ``K`` is not closed in ``G``
        InvariantViolation: If the blocks fail to partition G into equal atoms
    """
    _require_subgroup_of(G, K)
    block_of = [-1] * G.order
    blocks: List[Tuple[int, ...]] = []
    representatives: List[int] = []
    for g in G.elements:
        if block_of[g] != -1:
            continue
        if right:
            block = sorted({G.op(k, g) for k in K.members})
        else:
            block = sorted({G.op(g, k) for k in K.members})
        for x in block:
            if block_of[x] != -1:
                raise InvariantViolation(f"cosets overlap at element {x}")
            block_of[x] = len(blocks)
        blocks.append(tuple(block))
        representatives.append(g)

    if any(len(block) != K.order for block in blocks) or len(blocks) * K.order != G.order:
        raise InvariantViolation("coset blocks are not equal-sized atoms covering the group")
    return CosetPartition(
        parent=G,
        subgroup=K,
        blocks=tuple(blocks),
        representatives=tuple(representatives),
        block_of=tuple(block_of),
        side="right" if right else "left",
    )


def normality_witness(G: FiniteGroup, K: Subgroup) -> Optional[int]:
    """Return the least g with gKg^-1 != K, or None when K is normal."""
    member_set = set(K.members)
    for g in G.elements:
        g_inv = G.inverse(g)
        for k in K.members:
            if G.op(G.op(g, k), g_inv) not in member_set:
                return g
    return None


def is_normal(G: FiniteGroup, K: Subgroup) -> bool:
    return normality_witness(G, K) is None
