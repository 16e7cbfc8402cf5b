# Tests for group actions: validation, orbits, stabilizers and fibers

import pytest

from kernel_atomicity.actions import (
    action_fiber,
    action_from_table,
    action_homomorphism,
    action_kernel,
    coset_action,
    natural_action,
    orbit,
    orbit_symmetry_witness,
    orbits,
    stabilizer,
    verify_orbit_stabilizer,
)
from kernel_atomicity.catalog import cyclic, dihedral
from kernel_atomicity.config import AtomicityConfig
from kernel_atomicity.groups import from_cayley_table, subgroup_generated
from kernel_atomicity.utils import (
    ActionError,
    NotABijection,
    NotAnAction,
    OrderCapExceeded,
    PointOutOfRange,
    ValidationCapExceeded,
    WrongBackend,
)

from conftest import A3


@pytest.fixture
def natural(s3, config):
    return natural_action(s3, config)


class TestValidation:
    def test_natural_action_rows_are_the_permutations(self, natural, s3):
        assert natural.validated
        assert natural.table == s3.permutations

    def test_row_not_a_bijection(self, c2):
        with pytest.raises(NotABijection) as info:
            action_from_table(c2, 2, [[0, 1], [0, 0]])
        assert info.value.g == 1

    def test_action_law_failure(self, c2):
        # the 3-cycle squared is not the identity
        with pytest.raises(NotAnAction) as info:
            action_from_table(c2, 3, [[0, 1, 2], [1, 2, 0]])
        assert (info.value.g, info.value.h, info.value.x) == (1, 1, 0)

    def test_wrong_shape(self, c2):
        with pytest.raises(ActionError):
            action_from_table(c2, 3, [[0, 1, 2]])

    def test_validation_cap(self, s3):
        with pytest.raises(ValidationCapExceeded) as info:
            natural_action(s3, AtomicityConfig(max_action_validate=10))
        assert info.value.size == 108

    def test_natural_action_needs_permutations(self):
        with pytest.raises(WrongBackend):
            natural_action(from_cayley_table([[0, 1], [1, 0]]))


class TestOrbitsAndStabilizers:
    def test_orbit_and_stabilizer(self, natural):
        assert orbit(natural, 0) == (0, 1, 2)
        assert stabilizer(natural, 0).members == (0, 2)

    def test_fiber_is_stabilizer_coset(self, natural):
        assert action_fiber(natural, 0, 1) == (1, 3)
        assert action_fiber(natural, 0, 0) == (0, 2)

    def test_point_out_of_range(self, natural):
        with pytest.raises(PointOutOfRange):
            orbit(natural, 3)
        with pytest.raises(PointOutOfRange):
            action_fiber(natural, 0, -1)

    def test_orbit_stabilizer_report(self, natural):
        report = verify_orbit_stabilizer(natural, 0)
        assert report.counting_identity_holds
        assert report.fibers == {0: (0, 2), 1: (1, 3), 2: (4, 5)}

    def test_empty_fiber_outside_orbit(self, c2):
        swap = action_from_table(c2, 3, [[0, 1, 2], [1, 0, 2]])
        assert action_fiber(swap, 0, 2) == ()
        assert orbit(swap, 2) == (2,)
        assert stabilizer(swap, 2).order == 2

    def test_orbit_partition(self, c2):
        swap = action_from_table(c2, 3, [[0, 1, 2], [1, 0, 2]])
        assert orbits(swap) == ((0, 1), (2,))
        assert orbit_symmetry_witness(swap) is None

    def test_every_point_of_a_dihedral_action(self):
        D = dihedral(5)
        A = natural_action(D)
        for x in range(5):
            report = verify_orbit_stabilizer(A, x)
            assert report.counting_identity_holds
            assert report.stabilizer.order == 2


class TestDerivedActions:
    def test_coset_action_on_non_normal_subgroup(self, s3):
        A = coset_action(s3, subgroup_generated(s3, [1]))
        assert A.set_size == 3
        assert stabilizer(A, 0).members == (0, 1)
        assert action_kernel(A).members == (0,)

    def test_coset_action_kernel_is_the_normal_subgroup(self, s3):
        A = coset_action(s3, subgroup_generated(s3, [3]))
        assert action_kernel(A).members == A3

    def test_action_homomorphism_of_natural_action(self, natural):
        pi = action_homomorphism(natural)
        assert pi.map == tuple(range(6))

    def test_action_homomorphism_cap(self, natural):
        with pytest.raises(OrderCapExceeded):
            action_homomorphism(natural, AtomicityConfig(max_order=5))

    def test_regular_action_of_a_cyclic_group(self):
        C = cyclic(4)
        A = action_from_table(C, 4, [[C.op(g, x) for x in range(4)] for g in C.elements])
        assert orbits(A) == ((0, 1, 2, 3),)
        assert stabilizer(A, 2).members == (0,)
