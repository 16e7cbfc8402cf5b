"""Group actions on finite sets: orbits, stabilizers and their fiber partitions.

Actions are left actions stored as dense tables, ``table[g][x]`` being the
image of point x under g, so that (gh)x = g(hx).
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from kernel_atomicity.catalog import symmetric
from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.groups import (
    PERMUTATION,
    FiniteGroup,
    Subgroup,
    left_cosets,
    make_subgroup,
    require_verified,
)
from kernel_atomicity.homomorphism import Homomorphism, hom_from_table
from kernel_atomicity.utils.errors import (
    ActionError,
    InvariantViolation,
    NotABijection,
    NotAnAction,
    OrderCapExceeded,
    PointOutOfRange,
    ValidationCapExceeded,
    WrongBackend,
)

# Set up logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupAction:
    """A homomorphism from ``group`` into the bijections of {0..set_size-1}."""

    group: FiniteGroup
    set_size: int
    table: Tuple[Tuple[int, ...], ...]
    validated: bool = False

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64).reshape(self.group.order, self.set_size)

    def _check_point(self, x: int) -> None:
        if isinstance(x, bool) or not isinstance(x, (int, np.integer)) or not 0 <= x < self.set_size:
            raise PointOutOfRange(int(x) if isinstance(x, (int, np.integer)) else -1, self.set_size)


def action_from_table(
    G: FiniteGroup,
    set_size: int,
    table: Sequence[Sequence[int]],
    config: Optional[AtomicityConfig] = None,
) -> GroupAction:
    """Validate a |G| x |X| table as a group action.

    Args:
        G: the acting group
        set_size: number of points, points are 0..set_size-1
        table: ``table[g][x]`` is the image of x under g
        config: validation cap on |G|^2 * |X|

    Returns:
        GroupAction: with ``validated`` set

    Raises:
        ActionError: If the table has the wrong shape
        NotABijection: If some row is not a permutation of the points
        NotAnAction: With the first (g, h, x) where (gh)x != g(hx)
        ValidationCapExceeded: If the exhaustive check is too large
    """
    config = config or load_config()
    if isinstance(set_size, bool) or not isinstance(set_size, int) or set_size < 1:
        raise ActionError(f"set size must be a positive integer, got {set_size!r}")
    rows = [list(row) for row in table]
    if len(rows) != G.order or any(len(row) != set_size for row in rows):
        raise ActionError(
            f"action table must be {G.order} x {set_size}",
            {"rows": len(rows), "order": G.order, "set_size": set_size},
        )
    work = G.order * G.order * set_size
    if work > config.max_action_validate:
        raise ValidationCapExceeded(
            f"action check needs {work} evaluations, cap is {config.max_action_validate}",
            work,
            config.max_action_validate,
        )
    for g, row in enumerate(rows):
        if any(isinstance(v, bool) or not isinstance(v, (int, np.integer)) for v in row):
            raise NotABijection(g)
    arr = np.asarray(rows, dtype=np.int64).reshape(G.order, set_size)

    points = np.arange(set_size)
    not_bijective = np.flatnonzero(~(np.sort(arr, axis=1) == points[None, :]).all(axis=1))
    if not_bijective.size:
        raise NotABijection(int(not_bijective[0]))

    # lhs[g, h, x] = (gh)x, rhs[g, h, x] = g(hx)
    lhs = arr[G.table]
    rhs = arr[:, arr]
    diff = np.argwhere(lhs != rhs)
    if diff.size:
        g, h, x = (int(v) for v in diff[0])
        raise NotAnAction(g, h, x)
    moved = np.flatnonzero(arr[0] != points)
    if moved.size:
        raise NotAnAction(0, 0, int(moved[0]))

    logger.debug(f"Validated action of {G!r} on {set_size} points")
    return GroupAction(G, set_size, tuple(tuple(int(v) for v in row) for row in arr.tolist()), validated=True)


def natural_action(G: FiniteGroup, config: Optional[AtomicityConfig] = None) -> GroupAction:
    """A permutation group acting on its own points."""
    if G.backend != PERMUTATION:
        raise WrongBackend(f"{G!r} is not a permutation group")
    return action_from_table(G, G.degree, G.permutations, config)


def coset_action(G: FiniteGroup, K: Subgroup, config: Optional[AtomicityConfig] = None) -> GroupAction:
    """G acting on its left cosets of K by left multiplication; coset i is block i."""
    partition = left_cosets(G, K)
    table = [
        [partition.block_of[G.op(g, rep)] for rep in partition.representatives]
        for g in G.elements
    ]
    return action_from_table(G, partition.index, table, config)


def _require_validated(A: GroupAction) -> None:
    if not A.validated:
        raise ActionError("action has not been validated")


def orbit(A: GroupAction, x: int) -> Tuple[int, ...]:
    """Sorted images of ``x`` under every group element."""
    _require_validated(A)
    A._check_point(x)
    return tuple(sorted({row[x] for row in A.table}))


def stabilizer(A: GroupAction, x: int) -> Subgroup:
    """Elements fixing ``x``: the kernel of the evaluation map g -> gx over x."""
    _require_validated(A)
    A._check_point(x)
    return make_subgroup(A.group, [g for g, row in enumerate(A.table) if row[x] == x])


def _fiber_members(A: GroupAction, x: int, y: int) -> Tuple[int, ...]:
    return tuple(g for g, row in enumerate(A.table) if row[x] == y)


def action_fiber(A: GroupAction, x: int, y: int) -> Tuple[int, ...]:
    """Elements sending ``x`` to ``y``; a coset g0*Stab(x) or empty.

    Raises:
        PointOutOfRange: If x or y is not a point
        InvariantViolation: If a nonempty fiber is not the coset of its least member
    """
    _require_validated(A)
    A._check_point(x)
    A._check_point(y)
    members = _fiber_members(A, x, y)
    if members:
        G = A.group
        coset = {G.op(members[0], s) for s in stabilizer(A, x).members}
        if coset != set(members):
            raise InvariantViolation(f"fiber {x} -> {y} is not a stabilizer coset", {"x": x, "y": y})
    return members


@dataclass(frozen=True)
class OrbitStabilizerReport:
    """Orbit, stabilizer and fibers of one point, with the identities checked on them."""

    point: int
    orbit: Tuple[int, ...]
    stabilizer: Subgroup
    fibers: Dict[int, Tuple[int, ...]]
    counting_holds: bool
    fiber_sizes_equal: bool
    fibers_are_cosets: bool
    restriction_holds: bool

    @property
    def counting_identity_holds(self) -> bool:
        return self.counting_holds and self.fiber_sizes_equal and self.fibers_are_cosets and self.restriction_holds


def verify_orbit_stabilizer(
    A: GroupAction,
    x: int,
    config: Optional[AtomicityConfig] = None,
) -> OrbitStabilizerReport:
    """Check |G| = |Orb(x)|*|Stab(x)| by exhibiting the fiber partition.

    Failures are recorded in the report rather than raised.
    """
    _require_validated(A)
    config = config or load_config()
    require_verified(A.group, config)
    G = A.group
    points = orbit(A, x)
    stab = stabilizer(A, x)
    fibers = {y: _fiber_members(A, x, y) for y in points}
    blocks = left_cosets(G, stab).block_set()

    report = OrbitStabilizerReport(
        point=x,
        orbit=points,
        stabilizer=stab,
        fibers=fibers,
        counting_holds=len(points) * stab.order == G.order,
        fiber_sizes_equal=all(len(members) == stab.order for members in fibers.values()),
        fibers_are_cosets=frozenset(frozenset(m) for m in fibers.values()) == blocks,
        restriction_holds=fibers.get(x) == stab.members,
    )
    if not report.counting_identity_holds:
        logger.error(f"Orbit-stabilizer check failed at point {x}")
    return report


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if x != y:
            self.parent[max(x, y)] = min(x, y)


def orbits(A: GroupAction) -> Tuple[Tuple[int, ...], ...]:
    """The orbit partition of X, ordered by least point."""
    _require_validated(A)
    uf = _UnionFind(A.set_size)
    for g in A.group.generators:
        for x, y in enumerate(A.table[g]):
            uf.union(x, y)
    classes: Dict[int, List[int]] = {}
    for x in range(A.set_size):
        classes.setdefault(uf.find(x), []).append(x)
    return tuple(tuple(members) for _, members in sorted(classes.items()))


def orbit_symmetry_witness(A: GroupAction) -> Optional[Tuple[int, int]]:
    """First (x, y) with y in Orb(x) but x not in Orb(y), or None."""
    all_orbits = [set(orbit(A, x)) for x in range(A.set_size)]
    for x in range(A.set_size):
        for y in range(A.set_size):
            if (y in all_orbits[x]) != (x in all_orbits[y]):
                return x, y
    return None


def action_kernel(A: GroupAction) -> Subgroup:
    """Elements acting as the identity on every point."""
    _require_validated(A)
    points = tuple(range(A.set_size))
    return make_subgroup(A.group, [g for g, row in enumerate(A.table) if row == points])


def action_homomorphism(A: GroupAction, config: Optional[AtomicityConfig] = None) -> Homomorphism:
    """The action as a homomorphism G -> Sym(X), realised in ``symmetric(|X|)``.

    Raises:
        OrderCapExceeded: If |X|! is above ``max_order``
    """
    _require_validated(A)
    config = config or load_config()
    size = math.factorial(A.set_size)
    if size > config.max_order:
        raise OrderCapExceeded(
            f"Sym({A.set_size}) has order {size}, above cap {config.max_order}", size, config.max_order
        )
    S = symmetric(A.set_size, config)
    return hom_from_table(A.group, S, [S.index_of_permutation(row) for row in A.table], config)
