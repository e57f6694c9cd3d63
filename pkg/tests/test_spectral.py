import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuselab import (
    AffineWeights,
    ProbabilityMeasure,
    TableWeights,
    Verdict,
    amenability_test,
    build_gamma,
    build_gamma_mu,
    certify_upper_bound,
    enumerate_ball,
    kesten_norm_check,
    mu_from_positive_element,
    norm_lower_bound,
    regular_module,
)
from fuselab.catalog import (
    s3_group_ring,
    su2_regular_weights,
    su2_ring,
    torus_module,
    torus_weights,
    verlinde_ring,
)
from fuselab.errors import (
    DegenerateWindow,
    DimensionNotRational,
    InequalityFails,
    InvalidMeasure,
    NegativeCoefficient,
    NotSymmetricElement,
    WeightNotPositive,
    ZeroElement,
)
from fuselab.spectral import kesten_eigenvalue, minimal_certificate_bound, module_verdict, nested_windows

from .oracles import path_adjacency, path_norm, spectral_norm

SU2 = regular_module(su2_ring(2))
SU3 = regular_module(su2_ring(3))
TORUS = torus_module(2)


# -- windows --------------------------------------------------------------


def test_torus_window_order():
    assert enumerate_ball(TORUS, ["u1"], 2).labels == ("e0", "e-1", "e1", "e-2", "e2")


def test_radius_zero_is_seed():
    assert enumerate_ball(TORUS, ["u1"], 0).labels == ("e0",)


def test_su2_window():
    assert enumerate_ball(SU2, ["u1"], 3).labels == ("u0", "u1", "u2", "u3")


def test_empty_support_is_degenerate():
    with pytest.raises(DegenerateWindow):
        enumerate_ball(SU2, [], 3)


def test_window_support_includes_conjugates():
    M = regular_module(s3_group_ring())
    assert set(enumerate_ball(M, ["r"], 1).support) == {"r", "r2"}


# -- operators ------------------------------------------------------------


def test_su2_gamma_is_path():
    w = enumerate_ball(SU2, ["u1"], 2)
    op = build_gamma(SU2, "u1", w)
    assert np.array_equal(op.dense(), path_adjacency(3))
    assert op.interior == (True, True, False)


def test_unit_gamma_is_identity():
    w = enumerate_ball(TORUS, ["u1"], 3)
    assert np.array_equal(build_gamma(TORUS, "u0", w).dense(), np.identity(len(w)))


def test_torus_gamma_column():
    w = enumerate_ball(TORUS, ["u1"], 1)
    op = build_gamma(TORUS, "u1", w)
    assert op.entry("e-1", "e0") == 1 and op.entry("e1", "e0") == 1 and op.entry("e0", "e0") == 0


def test_restrict_matches_rebuilt_window():
    big = build_gamma(SU3, "u1 + u2", enumerate_ball(SU3, ["u1", "u2"], 10))
    small_w = enumerate_ball(SU3, ["u1", "u2"], 4)
    small = big.restrict(small_w)
    rebuilt = build_gamma(SU3, "u1 + u2", small_w)
    assert small.entries == rebuilt.entries
    assert small.interior == rebuilt.interior
    with pytest.raises(ValueError):
        big.restrict(enumerate_ball(TORUS, ["u1"], 1))


def test_gamma_mu_delta_unit_is_identity():
    w = enumerate_ball(SU2, ["u1"], 4)
    op = build_gamma_mu(SU2, ProbabilityMeasure.delta("u0"), w)
    assert op.exact
    assert np.array_equal(op.dense(), np.identity(5))


def test_gamma_mu_uniform_su2():
    w = enumerate_ball(SU2, ["u1"], 2)
    op = build_gamma_mu(SU2, ProbabilityMeasure.parse("1/2:u0, 1/2:u1"), w)
    expected = np.identity(3) / 2 + path_adjacency(3) / 4
    assert np.allclose(op.dense(), expected, atol=0)
    assert op.entry("u1", "u0") == Fraction(1, 4)


def test_gamma_mu_delta_u1_is_half_gamma():
    w = enumerate_ball(SU2, ["u1"], 5)
    a = build_gamma_mu(SU2, ProbabilityMeasure.delta("u1"), w)
    b = build_gamma(SU2, "u1", w)
    assert all(a.entries[k] == Fraction(v, 2) for k, v in b.entries.items())


def test_gamma_mu_irrational_dimension_in_exact_mode():
    M = regular_module(verlinde_ring(2))
    w = enumerate_ball(M, ["u1"], 2)
    with pytest.raises(DimensionNotRational):
        build_gamma_mu(M, ProbabilityMeasure.delta("u1"), w, exact=True)
    assert not build_gamma_mu(M, ProbabilityMeasure.delta("u1"), w).exact


# -- measures -------------------------------------------------------------


def test_measure_must_sum_to_one():
    with pytest.raises(InvalidMeasure):
        ProbabilityMeasure({"u0": Fraction(1, 2)})
    with pytest.raises(InvalidMeasure):
        ProbabilityMeasure({"u0": -1, "u1": 2})


def test_mu_from_u1():
    mu = mu_from_positive_element(su2_ring(2), "u1")
    assert mu == ProbabilityMeasure.delta("u1") and mu.mass == 2


def test_mu_from_u0_plus_u1():
    mu = mu_from_positive_element(su2_ring(2), "u0 + u1")
    assert mu.weights == {"u0": Fraction(1, 3), "u1": Fraction(2, 3)} and mu.mass == 3


def test_mu_from_unit():
    assert mu_from_positive_element(su2_ring(3), "u0") == ProbabilityMeasure.delta("u0")


def test_mu_errors():
    with pytest.raises(ZeroElement):
        mu_from_positive_element(su2_ring(2), {})
    with pytest.raises(NegativeCoefficient):
        mu_from_positive_element(su2_ring(2), "u1 - u0")
    with pytest.raises(DimensionNotRational):
        mu_from_positive_element(verlinde_ring(2), "u1", exact=True)


def test_mu_float_weights_sum_to_one():
    mu = mu_from_positive_element(verlinde_ring(3), "u1 + u2 + 3*u0")
    assert math.fsum(mu.weights.values()) == 1.0


# -- power iteration ------------------------------------------------------


def test_path3_norm():
    op = build_gamma(SU2, "u1", enumerate_ball(SU2, ["u1"], 2))
    assert norm_lower_bound(op).value == pytest.approx(math.sqrt(2), abs=1e-12)


def test_identity_norm():
    op = build_gamma(TORUS, "u0", enumerate_ball(TORUS, ["u1"], 7))
    nb = norm_lower_bound(op)
    assert nb.value == pytest.approx(1.0, abs=1e-15) and nb.converged


def test_path401_norm():
    op = build_gamma(SU2, "u1", enumerate_ball(SU2, ["u1"], 400))
    nb = norm_lower_bound(op)
    assert nb.converged
    assert nb.value <= path_norm(401) + 1e-12
    assert nb.value == pytest.approx(path_norm(401), abs=1e-8)
    assert path_norm(401) == pytest.approx(1.99993893, abs=1e-8)


def test_bipartite_window_converges():
    # the path spectrum is symmetric, so +-lambda compete under plain iteration
    op = build_gamma(TORUS, "u1", enumerate_ball(TORUS, ["u1"], 10))
    assert norm_lower_bound(op).value == pytest.approx(path_norm(21), abs=1e-9)


def test_nonsymmetric_operator_uses_normal_matrix():
    M = regular_module(s3_group_ring())
    op = build_gamma(M, "r + s", enumerate_ball(M, ["r", "s"], 3))
    assert not op.is_symmetric()
    nb = norm_lower_bound(op)
    assert nb.method == "normal"
    assert nb.value == pytest.approx(spectral_norm(op.dense()), abs=1e-9)


def test_no_convergence_returns_best_with_flag():
    op = build_gamma(SU2, "u1", enumerate_ball(SU2, ["u1"], 300))
    with pytest.warns(UserWarning):
        nb = norm_lower_bound(op, max_iter=5)
    assert not nb.converged and 0 < nb.value <= path_norm(301)


def test_negative_entries_rejected():
    op = build_gamma(SU2, "u1 - u0", enumerate_ball(SU2, ["u1"], 3))
    with pytest.raises(ValueError):
        norm_lower_bound(op)


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.sampled_from(["u0", "u1", "u2", "u3"]), st.integers(1, 4), min_size=1), st.integers(1, 30))
def test_power_iteration_agrees_with_dense_svd(u, r):
    op = build_gamma(SU3, u, enumerate_ball(SU3, list(u), r))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nb = norm_lower_bound(op)
    exact = spectral_norm(op.dense())
    assert nb.value <= exact * (1 + 1e-12)
    assert nb.value == pytest.approx(exact, rel=1e-6)


# -- certificates ---------------------------------------------------------


def test_su3_affine_certificate():
    res = certify_upper_bound(SU3, "2*u1", 4, su2_regular_weights("affine"))
    assert res.certified and res.bound == 4
    assert res.tail_from[0] is not None


def test_su3_certificate_too_small():
    with pytest.raises(InequalityFails) as info:
        certify_upper_bound(SU3, "2*u1", 3, su2_regular_weights("affine"))
    # every row fails: 2 (w(k-1) + w(k+1)) = 4 (k+1) > 3 (k+1); rows are scanned from u0
    assert info.value.witness == "u0"


@pytest.mark.parametrize("M", [regular_module(s3_group_ring()), regular_module(verlinde_ring(1))], ids=lambda M: M.name)
def test_dimension_weights_certify_dimension_on_finite_modules(M):
    A = M.algebra
    u = A.symmetrize(A.basis[1])
    res = certify_upper_bound(M, u, A.dim_of(u), TableWeights({a: M.dim(a) for a in M.basis}))
    assert res.certified and res.rows_checked == len(M.basis)


def test_constant_weights_certify_dimension_on_torus():
    assert certify_upper_bound(TORUS, "u1 + 2*u3", 2 + 2 * 4, torus_weights()).certified
    with pytest.raises(InequalityFails):
        certify_upper_bound(TORUS, "u1 + 2*u3", 9, torus_weights())


def test_minimal_certificate_bound():
    assert minimal_certificate_bound(SU3, "2*u1", su2_regular_weights("affine")) == 4
    assert minimal_certificate_bound(TORUS, "2*u1", torus_weights()) == 4


def test_certificate_input_errors():
    with pytest.raises(NotSymmetricElement):
        certify_upper_bound(regular_module(s3_group_ring()), "r", 2, TableWeights({}))
    bad = AffineWeights(lambda s: int(s[1:]), lambda k: f"u{k}", -1, 3, translation_invariant=True)
    with pytest.raises(WeightNotPositive):
        certify_upper_bound(SU3, "2*u1", 100, bad)
    untrusted = AffineWeights(lambda s: int(s[1:]), lambda k: f"u{k}", 1, 1)
    with pytest.raises(WeightNotPositive):
        certify_upper_bound(SU3, "2*u1", 4, untrusted)


# -- verdicts -------------------------------------------------------------


def test_su2_regular_is_amenable():
    rep = amenability_test(SU2, "u1", [100, 200, 400], tol=1e-3)
    assert rep.verdict is Verdict.AMENABLE_NUMERIC
    assert rep.target == 4
    assert rep.final_bound == pytest.approx(2 * path_norm(401), abs=1e-7)


def test_su3_regular_is_not_amenable():
    rep = amenability_test(SU3, "u1", [25, 50], certificate=(su2_regular_weights("affine"), 4))
    assert rep.verdict is Verdict.NOT_AMENABLE_CERTIFIED
    assert rep.target == 6 and rep.gap == pytest.approx(2)


def test_torus_is_amenable():
    rep = amenability_test(TORUS, "u1", [50, 150, 250], tol=1e-3)
    assert rep.verdict is Verdict.AMENABLE_NUMERIC
    assert rep.final_bound == pytest.approx(2 * path_norm(501), abs=1e-7)


def test_small_window_is_inconclusive():
    rep = amenability_test(SU2, "u1", [5], tol=1e-6)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert rep.final_bound == pytest.approx(2 * path_norm(6), abs=1e-9)


def test_lower_bounds_are_nondecreasing():
    rep = amenability_test(SU3, "u1 + u2", [3, 1, 10, 6])
    bounds = [b for _, b in rep.lower_bounds]
    assert [r for r, _ in rep.lower_bounds] == [1, 3, 6, 10]
    assert bounds == sorted(bounds)
    assert rep.consistent


def test_measure_test():
    rep = amenability_test(SU2, ProbabilityMeasure.parse("1/2:u0, 1/2:u1"), [200], tol=1e-3)
    assert rep.target == 1 and rep.verdict is Verdict.AMENABLE_NUMERIC


def test_amenability_input_errors():
    with pytest.raises(NegativeCoefficient):
        amenability_test(SU2, "u1 - u0", [3])
    with pytest.raises(ZeroElement):
        amenability_test(SU2, {}, [3])


def test_non_generating_support_adds_caveat():
    M = regular_module(s3_group_ring())
    with pytest.warns(UserWarning):
        rep = amenability_test(M, "r", [3])
    assert any("generate" in c for c in rep.caveats)


def test_module_verdict():
    a = amenability_test(TORUS, "u1", [150])
    b = amenability_test(SU3, "u1", [10], certificate=(su2_regular_weights("affine"), 4))
    assert module_verdict([a]) is Verdict.AMENABLE_NUMERIC
    assert module_verdict([a, b]) is Verdict.NOT_AMENABLE_CERTIFIED


# -- Kesten route ---------------------------------------------------------


def test_kesten_torus():
    assert kesten_norm_check(TORUS, "u1", enumerate_ball(TORUS, ["u1"], 250), 1e-3)


@pytest.mark.parametrize("r", [5, 50, 300])
def test_kesten_su3_fails_at_any_radius(r):
    w = enumerate_ball(SU3, ["u1"], r)
    assert not kesten_norm_check(SU3, "u1", w, 1e-3)
    assert kesten_eigenvalue(SU3, "u1", w) <= 2


def test_kesten_unit():
    assert kesten_norm_check(SU3, "u0", enumerate_ball(SU3, ["u1"], 3), 0.0)


@pytest.mark.parametrize("M,support", [(SU3, ["u1", "u2"]), (TORUS, ["u3"]), (regular_module(s3_group_ring()), ["r", "s"])],
                         ids=["su2", "torus", "S3"])
def test_nested_windows_match_single_balls(M, support):
    radii = [0, 1, 2, 5, 9]
    for w in nested_windows(M, support, radii):
        assert w == enumerate_ball(M, support, w.radius)


def test_norm_lower_bound_accepts_matrix_slices():
    op = build_gamma(TORUS, "u1 + u2", enumerate_ball(TORUS, ["u1", "u2"], 30))
    small = nested_windows(TORUS, ["u1", "u2"], [12])[0]
    n = len(small)
    sliced = norm_lower_bound(op.sparse()[:n, :n])
    assert sliced == norm_lower_bound(op.restrict(small))
    with pytest.raises(ValueError):
        norm_lower_bound(-np.identity(3))
