import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuselab import make_fusion_algebra, pf_dimension, validate_axioms
from fuselab.algebra import close, pf_eigenvalue
from fuselab.catalog import cyclic_group_ring, su2_ring, verlinde_ring
from fuselab.errors import (
    BallOverflow,
    InvolutionNotInvolutive,
    NonPositiveMultiplicity,
    NotFinite,
    Reducible,
    UnitLawViolation,
    UnknownLabel,
)

from .oracles import chebyshev_dims, su2_product


def z3_rules(x, y):
    idx = {"e": 0, "g": 1, "g2": 2}
    names = ["e", "g", "g2"]
    return {names[(idx[x] + idx[y]) % 3]: 1}


def make_z3(**kw):
    args = dict(
        basis=["e", "g", "g2"], unit="e", involution={"e": "e", "g": "g2", "g2": "g"}, rules=z3_rules, dim=lambda _: 1
    )
    args.update(kw)
    return make_fusion_algebra(**args)


# -- construction ---------------------------------------------------------


def test_z3_group_ring_is_valid():
    A = make_z3()
    assert A.basis == ("e", "g", "g2")
    assert validate_axioms(A, radius=2).ok


def test_unit_law_violation():
    def rules(x, y):
        if {x, y} == {"u0", "u1"}:
            return {"u2": 1}
        return su2_ring(2).product(x, y)

    with pytest.raises(UnitLawViolation):
        make_fusion_algebra(lambda s: s.startswith("u"), "u0", None, rules, lambda s: 1, generators=["u1"])


def test_unknown_label_in_rules():
    A = make_z3(rules=lambda x, y: {"h": 1} if "g" in (x, y) and x != "e" and y != "e" else z3_rules(x, y))
    with pytest.raises(UnknownLabel):
        A.product("g", "g")


def test_nonpositive_multiplicity():
    A = make_z3(rules=lambda x, y: {**z3_rules(x, y), "e": 0} if x == "g" == y else z3_rules(x, y))
    with pytest.raises(NonPositiveMultiplicity):
        A.product("g", "g")


def test_involution_must_be_involutive():
    with pytest.raises(InvolutionNotInvolutive):
        make_z3(involution={"e": "e", "g": "g2", "g2": "e"})


# -- products, conjugation, dimensions ------------------------------------


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 2), (3, 5), (4, 0), (6, 6)])
def test_su2_products_match_character_oracle(m, n):
    assert su2_ring(2).product(f"u{m}", f"u{n}") == su2_product(m, n)


def test_su2_product_examples():
    A = su2_ring(2)
    assert A.product("u1", "u1") == {"u0": 1, "u2": 1}
    assert A.product("u1", "u2") == {"u1": 1, "u3": 1}
    assert A.product("u2", "u2") == {"u0": 1, "u2": 1, "u4": 1}
    assert A.multiply("u0", "2*u3 + u1") == A.element("2*u3 + u1")


def test_conjugation():
    assert su2_ring(2).conjugate("u3") == su2_ring(2).element("u3")
    A = cyclic_group_ring(3)
    assert A.conjugate("g") == A.element("g2")
    assert A.conjugate("2*g - g2") == A.element("2*g2 - g")


def test_dimensions():
    assert su2_ring(2).dim_of("u3") == 4
    assert su2_ring(3).dim_of("u2") == 8
    assert su2_ring(2).dim_of("u0 + u1") == 3
    assert [su2_ring(3).dim(f"u{n}") for n in range(8)] == chebyshev_dims(3, 8)


def test_unknown_label():
    with pytest.raises(UnknownLabel):
        su2_ring(2).dim("x1")


def test_close_is_exact_for_rationals():
    assert close(1, 1, 0.0)
    assert close(1.0, 1.0 + 1e-12, 1e-9)
    assert not close(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10**30), 1e-9)


# -- validation -----------------------------------------------------------


def test_su2_validates():
    rep = validate_axioms(su2_ring(2), radius=6)
    assert rep.ok and rep.violations == []
    assert len(rep.ball) == 7


def test_z2_validates():
    assert validate_axioms(cyclic_group_ring(2), radius=3).ok


def test_mutated_su2_reports_frobenius_at_u1_u1_u2():
    A = su2_ring(2).with_rules({("u1", "u1"): {"u0": 1, "u2": 2}})
    rep = validate_axioms(A, radius=4)
    assert not rep.ok
    frob = [v for v in rep.violations if v.kind == "frobenius"]
    assert ("u1", "u1", "u2") in {tuple(v.labels) for v in frob}


def test_radius_must_be_positive():
    with pytest.raises(ValueError):
        validate_axioms(su2_ring(2), radius=0)


def test_ball_overflow(monkeypatch):
    with pytest.raises(BallOverflow):
        su2_ring(2).ball(50, max_size=10)
    monkeypatch.setenv("FUSELAB_MAX_BALL", "5")
    with pytest.raises(BallOverflow):
        validate_axioms(su2_ring(2), radius=8)


# -- Perron-Frobenius dimension -------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_verlinde_pf_dimension(k):
    pf = pf_dimension(verlinde_ring(k))
    for n in range(k + 1):
        expected = math.sin((n + 1) * math.pi / (k + 2)) / math.sin(math.pi / (k + 2))
        assert pf[f"u{n}"] == pytest.approx(expected, abs=1e-9)
    assert pf_eigenvalue(verlinde_ring(k), "u1") == pytest.approx(2 * math.cos(math.pi / (k + 2)), abs=1e-9)


def test_verlinde_k2_example():
    pf = pf_dimension(verlinde_ring(2))
    assert [pf[f"u{n}"] for n in range(3)] == pytest.approx([1, math.sqrt(2), 1], abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_group_pf_dimension_is_one(n):
    assert all(v == pytest.approx(1) for v in pf_dimension(cyclic_group_ring(n)).values())


def test_pf_dimension_needs_finite_basis():
    with pytest.raises(NotFinite):
        pf_dimension(su2_ring(2))


def test_pf_dimension_reducible():
    A = make_z3(generators=["e"])
    with pytest.raises(Reducible):
        pf_dimension(A)


# -- properties -----------------------------------------------------------

labels = st.integers(0, 6).map(lambda n: f"u{n}")


@settings(max_examples=60, deadline=None)
@given(labels, labels, labels)
def test_su2_frobenius_reciprocity(a, b, c):
    A = su2_ring(3)
    lhs = A.product(a, b).get(c, 0)
    assert lhs == A.product(A.bar(a), c).get(b, 0) == A.product(c, A.bar(b)).get(a, 0)


@settings(max_examples=60, deadline=None)
@given(labels, labels)
def test_su2_dimension_is_multiplicative(a, b):
    for N in (2, 3):
        A = su2_ring(N)
        assert A.dim_of(A.multiply(a, b)) == A.dim(a) * A.dim(b)


@settings(max_examples=40, deadline=None)
@given(labels, labels, labels)
def test_su2_associativity(a, b, c):
    A = su2_ring(2)
    assert A.multiply(A.multiply(a, b), c) == A.multiply(a, A.multiply(b, c))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.data())
def test_verlinde_rules_are_symmetric_and_dimension_compatible(k, data):
    A = verlinde_ring(k)
    a = data.draw(st.sampled_from(A.basis))
    b = data.draw(st.sampled_from(A.basis))
    assert A.product(a, b) == A.product(b, a)
    assert float(A.dim_of(A.multiply(a, b))) == pytest.approx(float(A.dim(a)) * float(A.dim(b)), rel=1e-12)


def test_mutation_that_hides_a_generator_is_still_caught():
    # g*e -> 0 must not shrink the validated ball to {e}
    A = cyclic_group_ring(2).with_rules({("g", "e"): {}})
    rep = validate_axioms(A, radius=3)
    assert rep.ball == ["e", "g"]
    assert "unit_law" in rep.kinds() and "dimension_multiplicative" in rep.kinds()
