"""
Example specs, the fixed corpus and seeded random instances
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gysin.complexes import ChainComplex
from gysin.documents import encode
from gysin.equivariant import MorseBottS1Datum
from gysin.errors import BadParams
from gysin.factory import ExampleSpec, generate, random_filtered, random_two_line
from gysin.rings import QQ
from gysin.spectra import FilteredComplex, TwoLineComplex


def test_cpn_from_spec():
    assert generate("cpn(2)").ranks == {0: 1, 2: 1, 4: 1}
    assert generate("cpn(2)").homology_line() == "H0=Z H1=0 H2=Z H3=0 H4=Z"


def test_hopf_is_a_two_line_complex():
    T = generate("hopf")
    assert isinstance(T, TwoLineComplex)
    assert T.total().betti(3) == 1


@pytest.mark.parametrize("text", ["cpn(2)", "hopf", "random_complex(7, 10)", "trivial_borel(rp2, 2)"])
def test_spec_text_round_trips(text):
    assert str(ExampleSpec.parse(text)) == text


def test_nested_spec_keeps_inner_example():
    spec = ExampleSpec.parse("trivial_borel(rp2, 2)")
    assert spec.inner == ExampleSpec("rp2")
    assert spec.params == (2,)
    assert isinstance(generate(spec), TwoLineComplex)


@pytest.mark.parametrize("text", ["klein_bottle", "cpn(x)", "random_complex(1, 0)", "random_complex(1, 999)",
                                  "sphere(-1)", "cpn(2"])
def test_bad_specs_are_rejected(text):
    with pytest.raises(BadParams):
        generate(text)


@pytest.mark.parametrize("text", ["random_complex(3, 6)", "random_filtered(3, 6)", "random_chain_map(3, 6)",
                                  "random_two_line(3, 6)", "random_ses_morphism(3, 4)", "random_mb_datum(3, 6)"])
def test_generation_is_deterministic(text):
    assert encode(generate(text)) == encode(generate(text))


def test_different_seeds_usually_differ():
    docs = {str(encode(generate(f"random_complex({seed}, 8)"))) for seed in range(6)}
    assert len(docs) > 1


def test_ring_is_passed_through():
    assert generate("random_complex(2, 5)", ring=QQ).ring == QQ
    assert generate("circle", ring=QQ).ring == QQ


def test_trivial_borel_needs_a_complex_inside():
    with pytest.raises(BadParams):
        generate("trivial_borel(hopf, 1)")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 12))
def test_random_objects_are_valid(seed, size):
    assert isinstance(random_filtered(seed, size), FilteredComplex)
    assert isinstance(random_two_line(seed, size).total(), ChainComplex)
    assert isinstance(generate(f"random_mb_datum({seed}, {size})"), MorseBottS1Datum)
