# Tests for exact fields and linear algebra over Q and GF(p)

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernel_atomicity.config import AtomicityConfig
from kernel_atomicity.fields import GF, QQ, is_prime, parse_fraction
from kernel_atomicity.linear import (
    AffineSolutionSet,
    ExactMatrix,
    Inconsistent,
    fiber_cardinality,
    fiber_census,
    identity_matrix,
    matmul,
    matvec,
    null_space_basis,
    nullity,
    rank,
    rref,
    sample_coefficients,
    solve_affine,
    verify_translation_family,
)
from kernel_atomicity.utils import (
    DimensionMismatch,
    EnumerationCapExceeded,
    FieldDivisionByZero,
    FieldMismatch,
    LinearAlgebraError,
    NotAPrime,
    NotASolutionSet,
)


def Q(rows):
    return ExactMatrix.from_rows(rows, QQ)


class TestFields:
    def test_parse_fraction(self):
        assert parse_fraction("3/6") == Fraction(1, 2)
        assert parse_fraction(" -4 ") == Fraction(-4)
        assert parse_fraction(7) == Fraction(7)

    def test_floats_are_refused(self):
        with pytest.raises(LinearAlgebraError):
            parse_fraction(0.5)
        with pytest.raises(LinearAlgebraError):
            parse_fraction(True)

    def test_zero_denominator(self):
        with pytest.raises(FieldDivisionByZero):
            parse_fraction("1/0")

    def test_prime_fields(self):
        assert is_prime(7) and not is_prime(1) and not is_prime(9)
        with pytest.raises(NotAPrime):
            GF(4)
        assert GF(7).convert("1/2") == 4
        assert GF(7).convert(-1) == 6
        assert GF(5).inv(2) == 3

    def test_denominator_vanishing_mod_p(self):
        with pytest.raises(FieldDivisionByZero):
            GF(3).convert("1/3")

    def test_division_by_zero(self):
        with pytest.raises(FieldDivisionByZero):
            QQ.inv(Fraction(0))
        with pytest.raises(FieldDivisionByZero):
            GF(5).div(1, 0)


class TestMatrices:
    def test_ragged_rows(self):
        with pytest.raises(DimensionMismatch):
            Q([[1, 2], [3]])

    def test_matvec_and_matmul(self):
        M = Q([[1, 2], [3, 4]])
        assert matvec(M, (Fraction(1), Fraction(1))) == (3, 7)
        assert matmul(M, identity_matrix(2, QQ)) == M
        with pytest.raises(DimensionMismatch):
            matvec(M, (Fraction(1),))

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatch):
            matmul(identity_matrix(2, QQ), identity_matrix(2, GF(2)))

    def test_rref(self):
        reduced = rref(Q([[2, 4], [1, 2]]))
        assert reduced.rank == 1
        assert reduced.pivots == (0,)
        assert reduced.matrix.rows == ((1, 2), (0, 0))

    def test_rank_and_nullity(self):
        M = Q([[1, 0, 1], [0, 1, 1], [1, 1, 2]])
        assert rank(M) == 2
        assert nullity(M) == 1

    def test_null_space_basis(self):
        assert null_space_basis(Q([[1, -1]])) == ((1, 1),)
        assert null_space_basis(identity_matrix(3, QQ)) == ()

    def test_null_space_over_gf2(self):
        basis = null_space_basis(ExactMatrix.from_rows([[1, 1, 0]], GF(2)))
        assert basis == ((1, 1, 0), (0, 0, 1))


@st.composite
def scaled_matrices(draw):
    field = draw(st.sampled_from([QQ, GF(2), GF(3), GF(7)]))
    m = draw(st.integers(min_value=1, max_value=5))
    n = draw(st.integers(min_value=1, max_value=5))
    if field is QQ:
        entry = st.fractions(min_value=-4, max_value=4, max_denominator=3)
        scale = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda c: c != 0)
    else:
        entry = st.integers(min_value=0, max_value=field.p - 1)
        scale = st.integers(min_value=1, max_value=field.p - 1)
    rows = draw(st.lists(st.lists(entry, min_size=n, max_size=n), min_size=m, max_size=m))
    return ExactMatrix.from_rows(rows, field), draw(scale)


class TestRrefProperties:
    @settings(max_examples=80, deadline=None)
    @given(scaled_matrices())
    def test_rref_is_idempotent_and_rank_ignores_scaling(self, data):
        M, c = data
        reduced = rref(M)
        again = rref(reduced.matrix)
        assert again.matrix.rows == reduced.matrix.rows
        assert (again.rank, again.pivots) == (reduced.rank, reduced.pivots)
        assert rank(M.scaled(c)) == rank(M)
        assert rref(M.scaled(c)).matrix.rows == reduced.matrix.rows
        assert rank(M) + len(null_space_basis(M)) == M.ncols


class TestSolve:
    def test_underdetermined_system(self):
        solset = solve_affine(Q([[1, -1]]), [2])
        assert isinstance(solset, AffineSolutionSet)
        assert solset.particular == (2, 0)
        assert solset.kernel_basis == ((1, 1),)
        assert solset.dimension == 1
        assert solset.member([3]) == (5, 3)
        assert solset.member(["1/2"]) == (Fraction(5, 2), Fraction(1, 2))

    def test_inconsistent_system(self):
        result = solve_affine(Q([[1, 0], [1, 0]]), [1, 2])
        assert result == Inconsistent(1, Fraction(1))
        assert result.witness == {"row": 1, "value": "1"}

    def test_rhs_length(self):
        with pytest.raises(DimensionMismatch):
            solve_affine(Q([[1, 0]]), [1, 2])

    def test_member_needs_one_coefficient_per_direction(self):
        solset = solve_affine(Q([[1, -1]]), [2])
        with pytest.raises(DimensionMismatch):
            solset.member([])

    def test_bad_solution_set_is_rejected(self):
        with pytest.raises(NotASolutionSet):
            AffineSolutionSet(Q([[1, -1]]), (Fraction(2),), (Fraction(0), Fraction(0)), ())

    def test_translation_family_over_gf3(self):
        F = GF(3)
        M = ExactMatrix.from_rows([[1, 2, 0, 1], [0, 1, 1, "1/2"]], F)
        solset = solve_affine(M, [1, 0])
        assert solset.dimension == 2
        assert verify_translation_family(M, [1, 0], solset, [(0, 0), (1, 2), (2, 1)])

    def test_translation_family_for_another_system(self):
        solset = solve_affine(Q([[1, -1]]), [2])
        with pytest.raises(NotASolutionSet):
            verify_translation_family(Q([[1, -1]]), [3], solset, [(1,)])

    def test_fractional_coefficients_stay_in_the_family(self):
        M = Q([[1, 2, -1], [0, 1, 3]])
        solset = solve_affine(M, [4, 1])
        assert solset.dimension == 1
        assert matvec(M, solset.member([Fraction(7, 3)])) == (4, 1)
        samples = sample_coefficients(QQ, solset.dimension, seed=0)
        assert len(samples) == 10
        assert verify_translation_family(M, [4, 1], solset, samples)

    def test_rational_samples_include_non_integers(self):
        samples = sample_coefficients(QQ, 3, seed=0)
        assert samples == sample_coefficients(QQ, 3, seed=0)
        entries = [c for sample in samples for c in sample]
        assert all(isinstance(c, Fraction) and -6 <= c <= 6 for c in entries)
        assert any(c.denominator != 1 for c in entries)

    def test_prime_field_samples_are_residues(self):
        samples = sample_coefficients(GF(5), 2, seed=3, count=20)
        assert len(samples) == 20
        assert all(0 <= c < 5 and isinstance(c, int) for sample in samples for c in sample)
        assert sample_coefficients(GF(5), 0, seed=3) == [()]


class TestFiberCounts:
    def test_cardinality(self):
        assert str(fiber_cardinality(Q([[1, -1]]))) == "infinite: dimension 1"
        assert str(fiber_cardinality(identity_matrix(2, QQ))) == "finite: 1"
        assert str(fiber_cardinality(ExactMatrix.from_rows([[1, 1, 0]], GF(3)))) == "finite: 9"

    def test_census(self):
        census = fiber_census(ExactMatrix.from_rows([[1, 1, 0]], GF(2)), [1])
        assert census.total == 8
        assert census.bucket_sizes == {(0,): 4, (1,): 4}
        assert census.distinct_sizes == frozenset({4})
        assert (1, 0, 0) in census.rhs_bucket and len(census.rhs_bucket) == 4

    def test_census_in_small_chunks(self):
        M = ExactMatrix.from_rows([[1, 2, 0], [0, 1, 1]], GF(3))
        census = fiber_census(M, config=AtomicityConfig(), chunk=5)
        assert census.bucket_count == 9
        assert census.distinct_sizes == frozenset({3})

    def test_census_needs_a_finite_field(self):
        with pytest.raises(LinearAlgebraError):
            fiber_census(Q([[1]]))

    def test_census_cap(self):
        with pytest.raises(EnumerationCapExceeded):
            fiber_census(ExactMatrix.from_rows([[1, 1, 0]], GF(2)), config=AtomicityConfig(brute_force_cap=4))
