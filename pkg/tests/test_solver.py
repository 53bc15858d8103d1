"""
Exact-sequence solver on partially known dimensions
"""
import pytest

from gysin.errors import BadParams, Contradiction
from gysin.factory import hopf_two_line
from gysin.rings import QQ
from gysin.solver import MapStatus, PartialLES, Slot, les_solver
from gysin.spectra import gysin_from_two_line


def test_two_slots_force_an_isomorphism():
    report = les_solver(PartialLES([Slot("A", 2), Slot("B")]))
    assert report.dims == [2, 2]
    assert report.maps == [MapStatus.ISO]
    assert report.isomorphisms == [0]


def test_zero_ends_make_the_middle_map_an_isomorphism():
    report = les_solver(PartialLES([Slot("A", 0), Slot("B"), Slot("C"), Slot("D", 0)]))
    assert report.maps == [MapStatus.ZERO, MapStatus.ISO, MapStatus.ZERO]
    assert report.dims[1] is None


def test_bounded_sequence_with_wrong_alternating_sum():
    with pytest.raises(Contradiction):
        les_solver(PartialLES([Slot("A", 2), Slot("B", 3)]))


def test_zero_maps_on_both_sides_kill_the_slot():
    partial = PartialLES([Slot("A", 1), Slot("B"), Slot("C", 1)], [MapStatus.ZERO, MapStatus.ZERO], bounded=False)
    report = les_solver(partial)
    assert report.dims[1] == 0
    assert "R1: dim B = 0" in report.derivations


def test_isomorphism_between_different_dimensions():
    partial = PartialLES([Slot("A", 1), Slot("B", 2), Slot("C", 1)], [MapStatus.ISO, MapStatus.UNKNOWN],
                         bounded=False)
    with pytest.raises(Contradiction):
        les_solver(partial)


def test_map_count_must_fit_the_slots():
    with pytest.raises(BadParams):
        PartialLES([Slot("A"), Slot("B")], [MapStatus.ZERO, MapStatus.ZERO])
    with pytest.raises(BadParams):
        PartialLES([Slot("A", -1)])


def test_hidden_entry_is_recovered_from_hopf_sequence():
    les = gysin_from_two_line(hopf_two_line(QQ))
    partial = PartialLES.from_les(les, hidden=["H3(total)"])
    assert partial.slots[1].dim is None
    report = les_solver(partial)
    assert report.dims == [1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1]


def test_known_zero_map_is_carried_over():
    les = gysin_from_two_line(hopf_two_line(QQ))
    partial = PartialLES.from_les(les, known_zero_maps=[1])
    assert partial.maps[1] is MapStatus.ZERO
    assert les_solver(partial).maps[1] is MapStatus.ZERO


def test_report_serializes_integers_as_strings():
    doc = les_solver(PartialLES([Slot("A", 2), Slot("B")])).to_dict()
    assert doc["dims"] == ["2", "2"]
    assert doc["maps"] == ["iso"]
