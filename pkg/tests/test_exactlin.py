"""
Exact linear algebra: normal forms, lattices and subquotients
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.errors import BadParams, InvalidMatrix, NotASublattice
from gysin.exactlin import (
    FGAbelianGroup,
    IntMatrix,
    Lattice,
    Subquotient,
    determinant,
    image_basis,
    intersect,
    inverse,
    kernel_basis,
    lattice_equal,
    preimage,
    rank,
    snf,
    solve,
    subquotient,
)
from gysin.rings import QQ, Ring

small_matrices = st.integers(1, 4).flatmap(
    lambda rows: st.integers(1, 4).flatmap(
        lambda cols: st.lists(st.lists(st.integers(-6, 6), min_size=cols, max_size=cols),
                              min_size=rows, max_size=rows)))


# ------------------------
# Smith normal form
# ------------------------
def test_snf_known_matrix():
    S, U, V = snf([[2, 4], [6, 8]])
    assert S.to_rows() == [[2, 0], [0, 4]]
    assert S == U @ IntMatrix([[2, 4], [6, 8]]) @ V
    assert abs(determinant(U.array)) == 1
    assert abs(determinant(V.array)) == 1


def test_snf_over_prime_field_sees_units():
    S, _, _ = snf([[5, 0], [0, 3]], Ring.prime_field(5))
    assert sorted([S.entry(0, 0), S.entry(1, 1)]) == [0, 1]


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_snf_is_diagonal_with_divisibility_chain(rows):
    M = IntMatrix(rows)
    S, U, V = snf(rows)
    assert S == U @ M @ V
    assert abs(determinant(U.array)) == 1
    assert abs(determinant(V.array)) == 1
    diagonal = [S.entry(i, i) for i in range(min(S.shape))]
    assert all(i == j for i, j, _ in S.to_triples())
    assert all(d >= 0 for d in diagonal)
    for a, b in zip(diagonal, diagonal[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)


# ------------------------
# Groups and subquotients
# ------------------------
def test_subquotient_cyclic_of_order_six():
    group = subquotient([[1, 0], [0, 1]], [[2, 0], [0, 3]])
    assert group == FGAbelianGroup(0, (6,))
    assert str(group) == "Z/6"


def test_subquotient_with_free_part():
    group = subquotient([[1, 0], [0, 1], [0, 0]], [[4], [0], [0]])
    assert group == FGAbelianGroup(1, (4,))
    assert str(group) == "Z + Z/4"


def test_denominator_outside_numerator_is_rejected():
    with pytest.raises(NotASublattice):
        Subquotient([[2]], [[1]])


def test_from_orders_normalizes_to_invariant_factors():
    assert FGAbelianGroup.from_orders(0, [2, 3]) == FGAbelianGroup(0, (6,))
    assert FGAbelianGroup.from_orders(1, [4, 2, 0]) == FGAbelianGroup(2, (2, 4))
    assert FGAbelianGroup.from_orders(0, [1]).is_trivial


def test_invalid_invariant_factors():
    with pytest.raises(BadParams):
        FGAbelianGroup(0, (2, 3))
    with pytest.raises(BadParams):
        FGAbelianGroup(0, (1,))


def test_elementary_divisors_and_order():
    group = FGAbelianGroup(0, (2, 12))
    assert group.elementary_divisors() == [2, 3, 4]
    assert group.order == 24
    assert FGAbelianGroup(1).order is None


def test_subquotient_coordinates_are_reduced():
    pres = Subquotient([[1]], [[3]])
    assert pres.moduli == (3,)
    assert list(pres.coordinates([4])) in ([1], [-2])
    assert pres.is_zero_class([6])


# ------------------------
# Lattices, kernels, solving
# ------------------------
def test_hermite_basis_is_canonical():
    first = Lattice.span([[2, 4], [0, 6]])
    second = Lattice.span([[-2, 6], [0, 6]])
    assert lattice_equal(first, second)
    assert not lattice_equal(first, Lattice.full(2))


def test_kernel_image_rank():
    M = [[1, 2], [2, 4]]
    assert rank(M) == 1
    assert kernel_basis(M).shape == (2, 1)
    assert image_basis(M).shape == (2, 1)


def test_intersection_and_preimage():
    two = Lattice.span([[2]])
    three = Lattice.span([[3]])
    assert intersect(two, three) == Lattice.span([[6]])
    assert preimage([[2]], Lattice.span([[4]])) == Lattice.span([[2]])


def test_solve_over_integers_and_rationals():
    assert list(solve([[2]], [4])) == [2]
    assert solve([[2]], [3]) is None
    assert list(solve([[2]], [3], QQ)) == [Fraction(3, 2)]


def test_inverse_of_unimodular_matrix():
    assert IntMatrix(inverse([[1, 1], [0, 1]])).to_rows() == [[1, -1], [0, 1]]
    with pytest.raises(BadParams):
        inverse([[2]])


# ------------------------
# IntMatrix
# ------------------------
def test_from_triples_validates_indices():
    M = IntMatrix.from_triples(2, 2, [(0, 1, 5)])
    assert M.to_triples() == [(0, 1, 5)]
    with pytest.raises(InvalidMatrix):
        IntMatrix.from_triples(2, 2, [(2, 0, 1)])
    with pytest.raises(InvalidMatrix):
        IntMatrix.from_triples(2, 2, [(0, 0, 1), (0, 0, 2)])


def test_submatrix_accepts_empty_selections():
    M = IntMatrix([[1, 2], [3, 4]])
    assert M.submatrix([], [0, 1]).shape == (0, 2)
    assert M.submatrix([1], [0]).to_rows() == [[3]]


def test_ring_parsing():
    assert Ring.parse("Zp:5") == Ring.parse("Z/5") == Ring.parse("F5")
    assert Ring.parse("Q").is_field
    assert not Ring.parse("Z").is_field
    with pytest.raises(BadParams):
        Ring.parse("Zp:4")
