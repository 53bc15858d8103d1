"""
Chain complexes, chain maps, shifts and tensor products
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.complexes import (
    ChainComplex,
    ChainMap,
    circle_complex,
    compose,
    cpn_complex,
    direct_sum,
    identity_map,
    induced_map,
    kunneth_check,
    kunneth_naturality,
    point_complex,
    rp2_complex,
    shift,
    shift_map,
    sphere_complex,
    tensor,
    tensor_map,
)
from gysin.equivariant import bv_delta, trivial_action_datum
from gysin.errors import BadParams, InvalidChainMap, InvalidComplex, RingMismatch
from gysin.exactlin import FGAbelianGroup, IntMatrix
from gysin.factory import random_chain_map, random_complex
from gysin.rings import QQ, ZZ, Ring

F2 = Ring.prime_field(2)


def test_rp2_homology_over_integers(rp2):
    assert rp2.homology(0) == FGAbelianGroup(1)
    assert rp2.homology(1) == FGAbelianGroup(0, (2,))
    assert rp2.homology(2).is_trivial


def test_rp2_homology_over_two_elements():
    C = rp2_complex(F2)
    assert [C.betti(k) for k in range(3)] == [1, 1, 1]


def test_cpn_homology_line():
    assert cpn_complex(2).homology_line() == "H0=Z H1=0 H2=Z H3=0 H4=Z"


def test_sphere_zero_is_two_points():
    assert sphere_complex(0).homology(0) == FGAbelianGroup(2)
    with pytest.raises(BadParams):
        sphere_complex(-1)


def test_d_squared_nonzero_names_degree():
    with pytest.raises(InvalidComplex) as info:
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    assert info.value.location == {"degree": 2}


def test_differential_shape_is_checked():
    with pytest.raises(InvalidComplex):
        ChainComplex({0: 1, 1: 2}, {1: [[1]]})


def test_labels_do_not_affect_equality():
    plain = ChainComplex({0: 1, 1: 1}, {1: [[2]]})
    labelled = ChainComplex({0: 1, 1: 1}, {1: [[2]]}, labels={0: ["v"], 1: ["e"]})
    assert plain == labelled


def test_shift_moves_homology(rp2):
    shifted = shift(rp2, 1)
    assert shifted.homology(0) == FGAbelianGroup(0, (2,))
    assert shifted.d(1).tolist() == [[-2]]
    assert shift(shifted, -1) == rp2


def test_chain_condition_is_checked():
    C = ChainComplex({0: 1, 1: 1}, {1: [[1]]})
    D = ChainComplex({0: 1, 1: 1}, {})
    with pytest.raises(InvalidChainMap):
        ChainMap(C, D, 0, {0: [[1]]})


def test_identity_induces_identity(rp2):
    f = identity_map(rp2)
    for k in range(3):
        g = rp2.homology_presentation(k).num_generators
        assert induced_map(f, k) == IntMatrix.identity(g)


def test_multiplication_by_two_on_circle():
    S1 = circle_complex()
    double = ChainMap(S1, S1, 0, {0: [[2]], 1: [[2]]})
    assert induced_map(double, 1).to_rows() == [[2]]
    assert compose(double, double).mat(1).tolist() == [[4]]
    assert shift_map(double, 1).source == shift(S1, 1)


def test_direct_sum_adds_homology(rp2):
    total = direct_sum(rp2, point_complex())
    assert total.homology(0) == FGAbelianGroup(2)
    assert total.homology(1) == FGAbelianGroup(0, (2,))


def test_torus_over_rationals():
    T = tensor(circle_complex(QQ), circle_complex(QQ))
    assert [T.betti(k) for k in range(3)] == [1, 2, 1]
    assert kunneth_check(circle_complex(QQ), circle_complex(QQ)).ok


def test_rp2_squared_over_two_elements():
    P = rp2_complex(F2)
    T = tensor(P, P)
    assert [T.betti(k) for k in range(5)] == [1, 2, 3, 2, 1]
    assert kunneth_check(P, P).ok


def test_kunneth_check_needs_a_field(rp2):
    with pytest.raises(BadParams):
        kunneth_check(rp2, rp2)


def test_change_ring_and_mismatch(rp2):
    assert rp2.change_ring(F2).homology(2) == FGAbelianGroup(1)
    with pytest.raises(RingMismatch):
        tensor(rp2, rp2_complex(QQ))


@pytest.mark.parametrize("field", [QQ, F2], ids=["Q", "Z2"])
@pytest.mark.parametrize("seed", range(100))
def test_random_pairs_satisfy_kunneth(seed, field):
    C = random_complex(seed, 10, field)
    D = random_complex(seed + 1000, 10, field)
    report = kunneth_check(C, D)
    assert report.ok, report.table()


# ------------------------
# Tensor products of chain maps
# ------------------------
def _bv_operator():
    delta, _ = bv_delta(trivial_action_datum(1), QQ)
    return delta


def test_tensor_of_identities_is_the_identity():
    C, D = rp2_complex(QQ), cpn_complex(1, QQ)
    fg = tensor_map(identity_map(C), identity_map(D))
    assert fg.source == fg.target == tensor(C, D)
    for k in fg.source.degrees:
        assert induced_map(fg, k) == induced_map(identity_map(fg.source), k)


def test_odd_shifts_pick_up_koszul_signs():
    delta = _bv_operator()
    circle = circle_complex(QQ)
    for fg in (tensor_map(identity_map(circle), delta), tensor_map(delta, identity_map(circle))):
        assert fg.shift == 1
        assert fg.is_chain_map()


@pytest.mark.parametrize("seed", range(20))
def test_naturality_of_kunneth_for_parameter_inclusions(seed):
    C = random_complex(seed, 8, QQ)
    inclusion = ChainMap(cpn_complex(1, QQ), cpn_complex(2, QQ), 0, {0: [[1]], 2: [[1]]})
    assert kunneth_naturality(identity_map(C), inclusion).ok
    g = random_chain_map(seed, 6, QQ)
    assert kunneth_naturality(identity_map(C), g).ok
    assert kunneth_naturality(g, identity_map(C)).ok


def test_naturality_with_odd_shift():
    delta = _bv_operator()
    circle = circle_complex(QQ)
    assert kunneth_naturality(identity_map(circle), delta).ok
    assert kunneth_naturality(delta, identity_map(circle)).ok


def test_naturality_needs_a_field(rp2):
    with pytest.raises(BadParams):
        kunneth_naturality(identity_map(rp2), identity_map(rp2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5000))
def test_euler_characteristic_is_preserved(seed):
    C = random_complex(seed, 8, QQ)
    chain_chi = sum((-1) ** k * r for k, r in C.ranks.items())
    homology_chi = sum((-1) ** k * C.betti(k) for k in C.degrees)
    assert chain_chi == homology_chi


def test_integer_complex_is_default_ring():
    assert point_complex().ring == ZZ
