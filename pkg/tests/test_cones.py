"""
Mapping cones, snake sequences and the grid of cones
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.complexes import (
    ChainComplex,
    ChainMap,
    GradedMap,
    circle_complex,
    identity_map,
    induced_map,
    point_complex,
    shift,
)
from gysin.cones import (
    ShortExactSequence,
    cone,
    cone_ses,
    connecting_mismatches,
    grid_lemma57,
    snake_les,
)
from gysin.errors import ExactnessFailure, InvalidChainMap
from gysin.exactlin import FGAbelianGroup
from gysin.factory import random_chain_map, random_ses_morphism
from gysin.rings import QQ


def _times_two():
    P = point_complex()
    return ChainMap(P, P, 0, {0: [[2]]})


def test_cone_of_multiplication_by_two():
    C = cone(_times_two())
    assert C.ranks == {-1: 1, 0: 1}
    assert C.homology(-1) == FGAbelianGroup(0, (2,))
    assert C.homology(0).is_trivial


def test_cone_of_identity_is_acyclic(rp2):
    C = cone(identity_map(rp2))
    assert all(C.homology(k).is_trivial for k in range(-1, 3))


def test_cone_rejects_non_chain_maps():
    S1 = circle_complex()
    D = ChainComplex({0: 1, 1: 1}, {1: [[1]]})
    with pytest.raises(InvalidChainMap):
        cone(GradedMap(D, S1, 0, {0: [[1]]}))


def test_cone_sequence_connecting_map_is_f():
    f = _times_two()
    les = snake_les(cone_ses(f))
    assert les.is_exact()
    assert les.map("connecting", 0).to_rows() == [[2]]
    assert connecting_mismatches(f) == []


def test_snake_labels_follow_names():
    les = snake_les(cone_ses(_times_two()))
    labels = [e.label for e in les.entries]
    assert labels[:3] == ["H0(A'[1])", "H0(cone)", "H0(A)"]


def test_short_exact_sequence_needs_kernel_equal_to_image():
    P = point_complex()
    zero = ChainComplex({}, {})
    with pytest.raises(ExactnessFailure):
        ShortExactSequence(ChainMap(P, P, 0, {0: [[2]]}), ChainMap(P, zero, 0, {}))


def test_shifted_sequence_keeps_exactness():
    ses = cone_ses(_times_two())
    moved = ses.shifted(1)
    assert moved.A == shift(ses.A, 1)
    assert snake_les(moved).is_exact()


@pytest.mark.parametrize("seed", range(200))
def test_connecting_map_equals_induced_map(seed):
    assert connecting_mismatches(random_chain_map(seed, 12)) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_connecting_map_over_rationals(seed):
    assert connecting_mismatches(random_chain_map(seed, 5, QQ)) == []


@pytest.mark.parametrize("seed", range(50))
def test_grid_squares_commute_except_the_marked_one(seed):
    report = grid_lemma57(random_ses_morphism(seed, 9))
    assert report.ok, report.failures
    assert report.anticommuting_checked > 0 or report.squares_checked == 0
    assert report.sequences_exact == 6


def test_grid_report_serializes():
    report = grid_lemma57(random_ses_morphism(3, 3))
    doc = report.to_dict()
    assert doc["ok"] is True
    assert doc["squares_checked"] == report.squares_checked


def test_grid_keeps_row_and_column_sequences():
    morphism = random_ses_morphism(8, 5)
    report = grid_lemma57(morphism)
    assert len(report.row_les) == len(report.column_les) == 3
    assert all(les.is_exact() for les in report.row_les + report.column_les)
    connecting = report.column_les[0].maps_of_kind("connecting")
    for k, matrix in connecting.items():
        assert matrix == induced_map(morphism.f, k)
    assert report.to_dict()["sequences_exact"] == 6


def test_grid_records_inexact_sequences(monkeypatch):
    def broken(ses):
        raise ExactnessFailure("ker differs from im", {"degree": 1})

    monkeypatch.setattr("gysin.cones.snake_les", broken)
    report = grid_lemma57(random_ses_morphism(2, 3))
    assert not report.ok
    assert report.sequences_exact == 0
    assert report.failures[0]["sequence"] == "row 0"
    assert report.failures[0]["degree"] == 1
