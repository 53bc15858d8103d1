"""
Spectral sequence pages, filtered maps and the Gysin sequence of a two-line complex
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.complexes import ChainMap, cpn_complex
from gysin.errors import InvalidChainMap, InvalidFiltration, NotAHomotopy
from gysin.exactlin import FGAbelianGroup
from gysin.factory import (
    random_filtered,
    random_homotopy,
    random_homotopy_equivalence,
    random_two_line,
)
from gysin.rings import QQ
from gysin.spectra import (
    FilteredComplex,
    FilteredMap,
    check_bete_factorization,
    check_cone_equals_gysin,
    convergence_check,
    filtered_order,
    filtration_bete,
    gysin_from_two_line,
    homotopy_page_agreement,
    page_iso_from_filtered_homotopy_equivalence,
    page_recursion_check,
    spectral_pages,
)


# ------------------------
# Pages
# ------------------------
def test_bete_filtration_pages_of_cpn():
    C = cpn_complex(2)
    sp = spectral_pages(filtration_bete(C), 2)
    assert sp.group(0, 2, 2) == FGAbelianGroup(1)
    assert sp.infinity_group(4, 4) == FGAbelianGroup(1)
    assert sp.nonzero_differentials(0) == []


def test_filtration_levels_must_match_ranks():
    C = cpn_complex(1)
    with pytest.raises(InvalidFiltration):
        FilteredComplex(C, {0: [0], 2: [0, 1]})


def test_page_index_must_be_nonnegative(rp2):
    with pytest.raises(InvalidFiltration):
        spectral_pages(filtration_bete(rp2), -1)


def test_table_is_indexed_by_level_and_degree(rp2):
    frame = spectral_pages(filtration_bete(rp2), 2).table(2)
    assert frame.index.name == "p"
    assert frame.loc[1, 1] == "Z/2"


@pytest.mark.parametrize("seed", range(100))
def test_pages_follow_the_recursion_and_converge(seed):
    sp = spectral_pages(random_filtered(seed, 10), 4)
    assert page_recursion_check(sp) == []
    assert convergence_check(sp) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_convergence_over_rationals(seed):
    sp = spectral_pages(random_filtered(seed, 5, QQ), 4)
    assert convergence_check(sp) == []


# ------------------------
# Filtered maps and homotopies
# ------------------------
def test_order_one_homotopy_agrees_from_page_two():
    inst = random_homotopy(11, 4, order=1)
    assert filtered_order(inst.K) <= 1
    assert homotopy_page_agreement(inst.f, inst.g, inst.K, 2)


def test_order_zero_homotopy_agrees_from_page_one():
    inst = random_homotopy(5, 4, order=0)
    assert filtered_order(inst.K) == 0
    assert homotopy_page_agreement(inst.f, inst.g, inst.K, 1)


@pytest.mark.parametrize("order, page", [(1, 2), (0, 1)])
@pytest.mark.parametrize("seed", range(50))
def test_homotopic_maps_agree_from_the_expected_page(seed, order, page):
    inst = random_homotopy(seed, 6, order=order)
    assert filtered_order(inst.K) <= order
    assert homotopy_page_agreement(inst.f, inst.g, inst.K, page)


def test_homotopy_must_raise_degree_by_one():
    inst = random_homotopy(3, 3, order=1)
    with pytest.raises(NotAHomotopy):
        homotopy_page_agreement(inst.f, inst.g, inst.f, 2)


def test_filtered_map_must_match_complexes(rp2):
    FC = filtration_bete(rp2)
    with pytest.raises(InvalidChainMap):
        FilteredMap(ChainMap(cpn_complex(1), cpn_complex(1), 0, {}), FC, FC)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_homotopy_equivalence_is_certified_on_page_two(seed, size):
    eq = random_homotopy_equivalence(seed, size)
    report = page_iso_from_filtered_homotopy_equivalence(eq.s12, eq.s21, eq.K1, eq.K2)
    assert report.certified, report.details
    assert report.page == 2
    assert max(report.orders) <= 1


# ------------------------
# Two-line complexes
# ------------------------
def test_hopf_gysin_sequence(hopf):
    les = gysin_from_two_line(hopf)
    assert les.is_exact()
    assert les.entry("H0(total)").group == FGAbelianGroup(1)
    assert les.entry("H3(total)").group == FGAbelianGroup(1)
    assert les.entry("H2(total)").group.is_trivial
    d2 = les.maps_of_kind("d2")[2]
    assert d2.shape == (1, 1)
    assert abs(d2.entry(0, 0)) == 1


def test_hopf_sequence_counts(hopf):
    les = gysin_from_two_line(hopf)
    degrees = sorted({e.degree for e in les.entries})
    assert len(les.entries) == 3 * len(degrees)
    assert len(les.maps) == 3 * len(degrees) - 1


def test_hopf_has_no_late_differentials(hopf):
    sp = spectral_pages(hopf.filtered(), 5)
    assert all(not sp.nonzero_differentials(r) for r in range(3, 6))


def test_cone_agrees_with_gysin_on_hopf(hopf):
    report = check_cone_equals_gysin(hopf)
    assert report.ok
    assert report.to_dict()["ok"] is True


@pytest.mark.parametrize("seed", range(100))
def test_cone_agrees_with_gysin(seed, ring):
    report = check_cone_equals_gysin(random_two_line(seed, 10, ring), raise_on_mismatch=False)
    assert report.ok, report.mismatches


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_two_line_late_differentials_vanish(seed, size):
    sp = spectral_pages(random_two_line(seed, size).filtered(), 5)
    assert all(not sp.nonzero_differentials(r) for r in range(3, 6))


def test_bete_factorization_on_hopf(hopf):
    report = check_bete_factorization(hopf)
    assert report.ok, [c for c in report.checks if not c["ok"]]
    assert {c["check"] for c in report.checks} == {
        "P_is_page_map", "I_is_page_map", "P_factors_through_F", "I_factors_through_F1"}


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_bete_factorization_on_random_two_lines(seed, size):
    assert check_bete_factorization(random_two_line(seed, size)).ok
