"""Exact linear algebra over Q and GF(p): elimination, null spaces and solution families.

Every solution set Ly = b is an affine family y0 + span(kernel basis); over
GF(p) each fiber of L has exactly p^nullity points, which the brute-force
census checks directly.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.fields import Field, PrimeField, Scalar
from kernel_atomicity.utils.errors import (
    DimensionMismatch,
    EnumerationCapExceeded,
    FieldMismatch,
    InvariantViolation,
    LinearAlgebraError,
    NotASolutionSet,
)

# Set up logger
logger = logging.getLogger(__name__)

Vector = Tuple[Scalar, ...]


@dataclass(frozen=True)
class ExactMatrix:
    """An m x n matrix whose entries all belong to ``field``."""

    field: Field
    rows: Tuple[Vector, ...]

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise DimensionMismatch("matrix dimensions must be positive")
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise DimensionMismatch("matrix rows have different lengths")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], field: Field) -> "ExactMatrix":
        return cls(field, tuple(tuple(field.convert(v) for v in row) for row in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.rows)

    def scaled(self, c: Any) -> "ExactMatrix":
        c = self.field.convert(c)
        return ExactMatrix(self.field, tuple(tuple(self.field.mul(c, a) for a in row) for row in self.rows))


def identity_matrix(n: int, field: Field) -> ExactMatrix:
    return ExactMatrix.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], field)


def make_vector(values: Sequence[Any], field: Field) -> Vector:
    return tuple(field.convert(v) for v in values)


def matvec(M: ExactMatrix, v: Sequence[Scalar]) -> Vector:
    if len(v) != M.ncols:
        raise DimensionMismatch(f"vector of length {len(v)} against {M.ncols} columns")
    F = M.field
    result = []
    for row in M.rows:
        total = F.zero
        for a, x in zip(row, v):
            total = F.add(total, F.mul(a, x))
        result.append(total)
    return tuple(result)


def matmul(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    if A.field != B.field:
        raise FieldMismatch(f"cannot multiply {A.field} and {B.field} matrices")
    if A.ncols != B.nrows:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} do not compose")
    columns = [matvec(A, B.column(j)) for j in range(B.ncols)]
    return ExactMatrix(A.field, tuple(zip(*columns)))


def _combine(F: Field, base: Sequence[Scalar], coefficients: Sequence[Scalar], basis: Sequence[Vector]) -> Vector:
    result = list(base)
    for c, k in zip(coefficients, basis):
        for i, ki in enumerate(k):
            result[i] = F.add(result[i], F.mul(c, ki))
    return tuple(result)


@dataclass(frozen=True)
class RrefResult:
    matrix: ExactMatrix
    rank: int
    pivots: Tuple[int, ...]


def rref(M: ExactMatrix) -> RrefResult:
    """Reduced row-echelon form by exact Gauss-Jordan elimination.

    Columns are scanned left to right; the pivot is the first row at or
    below the current pivot row with a nonzero entry in the column.
    """
    F = M.field
    R = [list(row) for row in M.rows]
    m, n = M.shape
    pivots: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pivot = next((i for i in range(r, m) if not F.is_zero(R[i][c])), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        scale = F.inv(R[r][c])
        R[r] = [F.mul(scale, a) for a in R[r]]
        for i in range(m):
            if i != r and not F.is_zero(R[i][c]):
                factor = R[i][c]
                R[i] = [F.sub(a, F.mul(factor, b)) for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1

    rank = len(pivots)
    free = [c for c in range(n) if c not in pivots]
    if rank + len(free) != n:
        raise InvariantViolation(f"rank {rank} + nullity {len(free)} != {n}")
    return RrefResult(ExactMatrix(F, tuple(tuple(row) for row in R)), rank, tuple(pivots))


def rank(M: ExactMatrix) -> int:
    return rref(M).rank


def nullity(M: ExactMatrix) -> int:
    return M.ncols - rref(M).rank


def null_space_basis(M: ExactMatrix, config: Optional[AtomicityConfig] = None) -> Tuple[Vector, ...]:
    """One kernel vector per free column, in ascending free-column order.

    The free variable is set to 1, the other free variables to 0, and the
    pivot variables are solved for.
    """
    config = config or load_config()
    F = M.field
    reduced = rref(M)
    R = reduced.matrix.rows
    basis = []
    for f in range(M.ncols):
        if f in reduced.pivots:
            continue
        v = [F.zero] * M.ncols
        v[f] = F.one
        for i, c in enumerate(reduced.pivots):
            v[c] = F.neg(R[i][f])
        basis.append(tuple(v))

    zero = tuple(F.zero for _ in range(M.nrows))
    for k in basis:
        if matvec(M, k) != zero:
            raise InvariantViolation("kernel basis vector is not annihilated", {"vector": [F.format(a) for a in k]})
    if basis and config.self_check and rref(ExactMatrix(F, tuple(basis))).rank != len(basis):
        raise InvariantViolation("kernel basis is not linearly independent")
    return tuple(basis)


@dataclass(frozen=True)
class Inconsistent:
    """Ly = b has no solution: reduced row ``row`` of [L|b] reads 0 = ``value``."""

    row: int
    value: Scalar

    @property
    def witness(self) -> Dict[str, Any]:
        return {"row": self.row, "value": str(self.value)}


@dataclass(frozen=True)
class AffineSolutionSet:
    """All solutions y0 + sum(c_i k_i) of ``matrix`` y = ``rhs``.

    The invariants are re-verified at construction.
    """

    matrix: ExactMatrix
    rhs: Vector
    particular: Vector
    kernel_basis: Tuple[Vector, ...]

    def __post_init__(self) -> None:
        F = self.matrix.field
        if matvec(self.matrix, self.particular) != tuple(self.rhs):
            raise NotASolutionSet("particular solution does not solve the system")
        zero = tuple(F.zero for _ in range(self.matrix.nrows))
        for k in self.kernel_basis:
            if matvec(self.matrix, k) != zero:
                raise NotASolutionSet("kernel basis vector is not in the kernel")
        if self.kernel_basis and rref(ExactMatrix(F, self.kernel_basis)).rank != len(self.kernel_basis):
            raise NotASolutionSet("kernel basis vectors are linearly dependent")

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)

    def member(self, coefficients: Sequence[Any]) -> Vector:
        """y0 + sum(c_i k_i) for the given coefficients."""
        if len(coefficients) != self.dimension:
            raise DimensionMismatch(f"expected {self.dimension} coefficients, got {len(coefficients)}")
        F = self.field
        return _combine(F, self.particular, [F.convert(c) for c in coefficients], self.kernel_basis)


def solve_affine(
    M: ExactMatrix,
    b: Sequence[Any],
    config: Optional[AtomicityConfig] = None,
) -> Union[AffineSolutionSet, Inconsistent]:
    """Solve My = b exactly.

    Returns:
        AffineSolutionSet with free variables of the particular solution set
        to 0, or Inconsistent when a pivot lands in the augmented column

    Raises:
        DimensionMismatch: If b does not have one entry per row of M
    """
    config = config or load_config()
    F = M.field
    if len(b) != M.nrows:
        raise DimensionMismatch(f"right-hand side has {len(b)} entries, matrix has {M.nrows} rows")
    rhs = tuple(F.convert(v) for v in b)
    augmented = ExactMatrix(F, tuple(row + (v,) for row, v in zip(M.rows, rhs)))
    reduced = rref(augmented)
    n = M.ncols
    if n in reduced.pivots:
        row = reduced.pivots.index(n)
        logger.info(f"System is inconsistent at reduced row {row}")
        return Inconsistent(row, reduced.matrix.rows[row][n])

    particular = [F.zero] * n
    for i, c in enumerate(reduced.pivots):
        particular[c] = reduced.matrix.rows[i][n]
    return AffineSolutionSet(M, rhs, tuple(particular), null_space_basis(M, config))


@dataclass(frozen=True)
class FiberCardinality:
    """Size of every fiber of a linear map: a finite count or an infinite dimension."""

    kind: str
    count: Optional[int]
    dimension: int

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"finite: {self.count}"
        return f"infinite: dimension {self.dimension}"


def fiber_cardinality(M: ExactMatrix) -> FiberCardinality:
    """Every point of the image pulls back to a copy of the kernel."""
    d = nullity(M)
    if isinstance(M.field, PrimeField):
        return FiberCardinality("finite", M.field.p ** d, d)
    if d == 0:
        return FiberCardinality("finite", 1, 0)
    return FiberCardinality("infinite", None, d)


@dataclass(frozen=True)
class FiberCensus:
    """Brute-force count of all GF(p)^n inputs bucketed by their image."""

    total: int
    bucket_sizes: Dict[Vector, int]
    rhs_bucket: Optional[FrozenSet[Vector]] = None

    @property
    def bucket_count(self) -> int:
        return len(self.bucket_sizes)

    @property
    def distinct_sizes(self) -> FrozenSet[int]:
        return frozenset(self.bucket_sizes.values())


def fiber_census(
    M: ExactMatrix,
    b: Optional[Sequence[Any]] = None,
    config: Optional[AtomicityConfig] = None,
    chunk: int = 1 << 16,
) -> FiberCensus:
    """Enumerate every input vector over GF(p) and bucket it by image.

    Args:
        M: matrix over a prime field
        b: optional right-hand side whose whole bucket is returned
        config: ``brute_force_cap`` bounds p^n
        chunk: vectors evaluated per numpy batch

    Raises:
        LinearAlgebraError: If M is over Q
        EnumerationCapExceeded: If p^n is above ``brute_force_cap``
    """
    config = config or load_config()
    if not isinstance(M.field, PrimeField):
        raise LinearAlgebraError("brute-force census needs a finite field")
    p, n = M.field.p, M.ncols
    total = p ** n
    if total > config.brute_force_cap:
        raise EnumerationCapExceeded(
            f"{p}^{n} inputs exceed cap {config.brute_force_cap}", total, config.brute_force_cap
        )

    A = np.asarray(M.rows, dtype=np.int64)
    powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    target = None if b is None else np.asarray([M.field.convert(v) for v in b], dtype=np.int64)
    sizes: Counter = Counter()
    rhs_bucket = set()
    for start in range(0, total, chunk):
        k = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # lexicographic digits of k in base p
        V = (k[:, None] // powers[None, :]) % p
        images = (V @ A.T) % p
        distinct, counts = np.unique(images, axis=0, return_counts=True)
        for row, count in zip(distinct.tolist(), counts.tolist()):
            sizes[tuple(row)] += count
        if target is not None:
            hits = np.flatnonzero((images == target[None, :]).all(axis=1))
            rhs_bucket.update(tuple(v) for v in V[hits].tolist())
    logger.debug(f"Census of {total} inputs found {len(sizes)} image points")
    return FiberCensus(total, dict(sizes), frozenset(rhs_bucket) if target is not None else None)


def verify_translation_family(
    M: ExactMatrix,
    b: Sequence[Any],
    solset: AffineSolutionSet,
    coefficient_samples: Sequence[Sequence[Any]],
    config: Optional[AtomicityConfig] = None,
) -> bool:
    """Check that y0 + sum(c_i k_i) solves My = b for each sampled coefficient tuple.

    Over GF(p) with p^d within ``family_enumeration_cap`` every tuple is
    enumerated, the p^d members must be distinct, and when p^n is within
    ``brute_force_cap`` they must be exactly the brute-force fiber over b.

    Raises:
        NotASolutionSet: If any check fails
    """
    config = config or load_config()
    F = M.field
    rhs = tuple(F.convert(v) for v in b)
    if solset.matrix != M or tuple(solset.rhs) != rhs:
        raise NotASolutionSet("solution set was produced for a different system")

    for sample in coefficient_samples:
        if len(sample) != solset.dimension:
            raise NotASolutionSet(
                f"sample has {len(sample)} coefficients, family has dimension {solset.dimension}",
                {"coefficients": [str(c) for c in sample]},
            )
        y = solset.member(sample)
        if matvec(M, y) != rhs:
            raise NotASolutionSet("family member does not solve the system", {"coefficients": [str(c) for c in sample]})

    if not isinstance(F, PrimeField):
        return True
    p, d = F.p, solset.dimension
    if p ** d > config.family_enumeration_cap:
        return True
    family = set()
    for coefficients in itertools.product(range(p), repeat=d):
        y = solset.member(coefficients)
        if matvec(M, y) != rhs:
            raise NotASolutionSet("family member does not solve the system", {"coefficients": list(coefficients)})
        family.add(y)
    if len(family) != p ** d:
        raise NotASolutionSet(f"family has {len(family)} distinct members, expected {p ** d}")
    if p ** M.ncols <= config.brute_force_cap:
        census = fiber_census(M, rhs, config)
        if census.rhs_bucket != frozenset(family):
            raise NotASolutionSet("family differs from the brute-force fiber over b")
    return True


def sample_coefficients(field: Field, dimension: int, seed: int, count: int = 10) -> List[Tuple[Scalar, ...]]:
    """Seeded coefficient tuples for sampling a translation family.

    Over GF(p) entries are uniform residues. Over Q they are fractions with
    numerator in -6..6 and denominator in 1..3, so non-integral members of
    the family are exercised too.
    """
    if dimension == 0:
        return [()]
    rng = np.random.default_rng(seed)
    if isinstance(field, PrimeField):
        raw = rng.integers(0, field.p, size=(count, dimension))
        return [tuple(int(c) for c in row) for row in raw.tolist()]
    numerators = rng.integers(-6, 7, size=(count, dimension)).tolist()
    denominators = rng.integers(1, 4, size=(count, dimension)).tolist()
    return [tuple(Fraction(a, q) for a, q in zip(nums, dens)) for nums, dens in zip(numerators, denominators)]
