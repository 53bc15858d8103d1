"""
Equivariant Morse data, Morse-Bott two-line complexes, the Borel model and the Gysin diagram
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.complexes import ChainComplex, circle_complex, rp2_complex
from gysin.equivariant import (
    ActionSign,
    Circle,
    MorseBottS1Datum,
    Orbit,
    S1MorseDatum,
    assemble_morse_bott,
    assemble_s1_morse,
    borel_stabilization,
    borel_trivial_action,
    bv_delta,
    compare_quotient_morse,
    diagram17_check,
    diagram_from_datum,
    ewc_certificate,
    gysin_theorem11,
    phi_e1,
    trivial_action_datum,
    two_line_from_datum,
    vanishing_column_deduction,
)
from gysin.errors import BadParams, DSquaredNonzero, InvalidFiltration, SubcomplexViolation
from gysin.exactlin import FGAbelianGroup, IntMatrix
from gysin.factory import ewc_instance, generate, random_complex, random_mb_datum
from gysin.rings import QQ
from gysin.solver import MapStatus

PLUS, MINUS = ActionSign.PLUS, ActionSign.MINUS
MB_CORPUS = ["morse_bott_hopf", "trivial_mb(0)", "trivial_mb(1)", "trivial_mb(2)", "trivial_mb(3)",
             "ewc_instance(0)", "ewc_instance(1)", "ewc_instance(2)", "ewc_instance(3)"]


# ------------------------
# S1-equivariant Morse complex
# ------------------------
def test_two_circles_with_count_two():
    D = S1MorseDatum([Circle("a", 0), Circle("b", 1)], {(1, 0): 2})
    C = assemble_s1_morse(D)
    assert C.homology(0) == FGAbelianGroup(0, (2,))
    assert C.homology(1).is_trivial


def test_equivariant_differential_must_square_to_zero():
    D = S1MorseDatum([Circle("a", 2), Circle("b", 1), Circle("c", 0)], {(0, 1): 1, (1, 2): 1})
    with pytest.raises(DSquaredNonzero) as info:
        assemble_s1_morse(D)
    assert info.value.location["degree"] == 2


def test_counts_need_index_difference_one():
    D = S1MorseDatum([Circle("a", 2), Circle("b", 0)], {(0, 1): 1})
    with pytest.raises(BadParams):
        assemble_s1_morse(D)


def test_compare_with_labelled_quotient_complex():
    D = S1MorseDatum([Circle("a", 0), Circle("b", 1)], {(1, 0): 2})
    same = ChainComplex({0: 1, 1: 1}, {1: [[2]]}, labels={0: ["a"], 1: ["b"]})
    other = ChainComplex({0: 1, 1: 1}, {1: [[3]]}, labels={0: ["a"], 1: ["b"]})
    assert compare_quotient_morse(D, same)
    assert not compare_quotient_morse(D, other)


# ------------------------
# Morse-Bott data
# ------------------------
def test_d1_must_drop_weight_by_one():
    D = MorseBottS1Datum([Orbit("a", 0), Orbit("c", 2)], [[0, 1], [0, 0]], [[0, 0], [0, 0]])
    with pytest.raises(InvalidFiltration):
        D.validate()


def test_d1_must_square_to_zero():
    orbits = [Orbit("a", 2), Orbit("b", 1), Orbit("c", 0)]
    d1 = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    D = MorseBottS1Datum(orbits, d1, [[0] * 3] * 3)
    with pytest.raises(DSquaredNonzero):
        D.validate()


def test_minus_orbits_form_a_subcomplex():
    orbits = [Orbit("a", 1, MINUS), Orbit("b", 0, PLUS)]
    D = MorseBottS1Datum(orbits, [[0, 0], [1, 0]], [[0, 0], [0, 0]])
    with pytest.raises(SubcomplexViolation):
        D.validate()


def test_count_matrices_must_be_square():
    with pytest.raises(BadParams):
        MorseBottS1Datum([Orbit("a", 0)], IntMatrix.zeros(1, 2), IntMatrix.zeros(1, 1))


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_trivial_action_total_is_odd_sphere(N):
    tot = assemble_morse_bott(trivial_action_datum(N)).complex
    assert tot.homology(0) == FGAbelianGroup(1)
    assert tot.homology(2 * N + 1) == FGAbelianGroup(1)
    assert all(tot.homology(k).is_trivial for k in range(1, 2 * N + 1))


def test_assembled_filtration_drops_one_or_two():
    FC = assemble_morse_bott(ewc_instance(2))
    assert set(FC.drops()) <= {1, 2}


@pytest.mark.parametrize("datum", [trivial_action_datum(2), ewc_instance(1)], ids=["trivial", "ewc"])
def test_phi_identifies_page_one(datum):
    report = phi_e1(datum)
    assert report.certified, report.details


@pytest.mark.parametrize("seed", range(50))
def test_phi_on_random_data(seed):
    assert phi_e1(random_mb_datum(seed, 6)).certified


def test_gysin_sequence_uses_equivariant_names():
    les = gysin_theorem11(trivial_action_datum(1))
    assert {m.kind for m in les.maps} == {"M", "E", "D"}
    assert les.is_exact()


def test_hopf_pattern_datum_reproduces_the_hopf_sequence():
    les = gysin_theorem11(generate("morse_bott_hopf"))
    totals = {e.degree: e.group for e in les.entries if e.label.endswith("(total)")}
    assert totals[0] == totals[3] == FGAbelianGroup(1)
    assert all(totals.get(k, FGAbelianGroup(0)).is_trivial for k in (1, 2))
    assert les.maps_of_kind("D")[2].to_rows() in ([[1]], [[-1]])
    assert les.is_exact()


def test_phi_report_carries_no_homotopy_orders():
    report = phi_e1(trivial_action_datum(1))
    assert report.orders == ()
    assert report.to_dict()["orders"] == []


@pytest.mark.parametrize("name", MB_CORPUS)
def test_bv_operator_matches_gysin_composite(name):
    delta, report = bv_delta(generate(name))
    assert report.ok, report.failures
    assert report.squares_to_zero
    assert delta.shift == 1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_bv_operator_on_random_data(seed, size):
    _, report = bv_delta(random_mb_datum(seed, size), QQ)
    assert report.ok


# ------------------------
# Borel model for the trivial action
# ------------------------
def test_borel_model_of_circle():
    model, report = borel_trivial_action(circle_complex(), 1)
    assert [model.betti(k) for k in range(4)] == [1, 1, 1, 1]
    assert report.ok
    assert list(report.table().columns) == ["degree", "model", "expected", "groups_ok", "d_map_ok"]


def test_borel_model_keeps_torsion():
    model, report = borel_trivial_action(rp2_complex(), 2)
    assert model.homology(3) == FGAbelianGroup(0, (2,))
    assert report.ok


def test_borel_level_must_be_nonnegative():
    with pytest.raises(BadParams):
        borel_trivial_action(circle_complex(), -1)


def test_borel_stabilizes():
    groups = borel_stabilization(circle_complex(), 3, [0, 1, 2, 3])
    assert groups[0].is_trivial
    assert groups[1] == groups[2] == groups[3] == FGAbelianGroup(1)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("seed", range(20))
def test_borel_model_of_random_complexes(seed, N):
    _, report = borel_trivial_action(random_complex(seed, 6), N)
    assert report.ok, report.table()


@pytest.mark.parametrize("seed", range(20))
def test_borel_homology_is_level_independent_once_2n_reaches_k(seed):
    C = random_complex(seed, 6)
    _, hi = C.degree_range
    for k in range(hi + 3):
        groups = borel_stabilization(C, k, [1, 2, 3, 4])
        stable = [N for N in groups if 2 * N >= k]
        assert all(groups[N] == groups[4] for N in stable)


# ------------------------
# Gysin diagram
# ------------------------
def test_diagram_needs_action_signs():
    with pytest.raises(BadParams):
        diagram_from_datum(trivial_action_datum(1))


@pytest.mark.parametrize("N", [0, 1, 2])
def test_diagram_of_acyclic_m_line(N):
    G = diagram_from_datum(ewc_instance(N))
    report = diagram17_check(G)
    assert report.ok, report.failure
    assert report.sequences_checked == 6
    ewc = ewc_certificate(G)
    assert ewc.all_vanish
    assert len(ewc.images) == N + 1


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_vanishing_total_forces_isomorphisms_and_kills_distinguished_classes(N):
    G = diagram_from_datum(ewc_instance(N), QQ)
    les, solved = vanishing_column_deduction(G)
    hidden = [j for j, e in enumerate(les.entries) if not e.label.endswith("(cone)")]
    assert hidden and all(solved.dims[j] is None for j in hidden)
    connecting = [j for j, m in enumerate(les.maps) if m.kind == "connecting"]
    assert connecting
    assert all(solved.maps[j] is MapStatus.ISO for j in connecting)
    report = diagram17_check(G)
    assert report.forced_isomorphisms == [les.maps[j].degree for j in connecting]
    assert ewc_certificate(G).all_vanish


def test_integer_diagram_skips_the_solver():
    assert diagram17_check(diagram_from_datum(ewc_instance(1))).forced_isomorphisms is None


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10))
def test_diagram_on_random_data(seed, size):
    assert diagram17_check(diagram_from_datum(random_mb_datum(seed, size))).ok


def test_two_line_from_datum_uses_d2_as_connecting_map():
    T = two_line_from_datum(trivial_action_datum(1))
    assert T.f.shift == -2
    assert T.f.mat(2).tolist() == [[1]]
