from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuselab.elements import ModuleElement, RingElement, as_number, is_exact, label_key, sorted_labels


def test_natural_label_order():
    assert sorted_labels(["u10", "u2", "u1", "u0"]) == ["u0", "u1", "u2", "u10"]
    assert sorted_labels(["e1", "e-1", "e0", "e-2"]) == ["e-2", "e-1", "e0", "e1"]
    assert label_key("g2") > label_key("g")


def test_parse_and_render():
    assert str(RingElement.parse("2*u1 + u3")) == "2*u1 + u3"
    assert str(RingElement.parse("u1 - u2")) == "u1 - u2"
    assert str(RingElement.parse("3 u2 - u0")) == "-u0 + 3*u2"
    assert str(ModuleElement.parse("1/2*e-1 + e1")) == "1/2*e-1 + e1"


def test_zero_terms_are_dropped():
    assert RingElement({"u1": 1}) - RingElement({"u1": 1}) == RingElement()
    assert not RingElement({"u0": 0})


def test_ring_elements_reject_fractions():
    with pytest.raises(ValueError):
        RingElement({"u1": Fraction(1, 2)})


def test_module_coefficients_stay_exact():
    m = ModuleElement({"e0": Fraction(1, 3)}) + ModuleElement({"e0": Fraction(2, 3)})
    assert m["e0"] == 1 and is_exact(m["e0"])


def test_as_number():
    assert as_number("3/4") == Fraction(3, 4)
    assert as_number(2.0) == 2.0
    assert is_exact(as_number(5))


coeffs = st.dictionaries(st.sampled_from(["u0", "u1", "u2", "u3"]), st.integers(-5, 5), max_size=4)


@given(coeffs, coeffs)
def test_addition_is_commutative(a, b):
    x, y = RingElement(a), RingElement(b)
    assert x + y == y + x
    assert (x + y) - y == x


@given(coeffs)
def test_render_parse_round_trip(a):
    x = RingElement(a)
    if x:
        assert RingElement.parse(str(x)) == x
