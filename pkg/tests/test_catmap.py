import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anosovq.catmap import (
    CAT,
    CatSystem,
    build_cat_coefficient_map,
    cat_anosov_directions,
    cat_eigenvectors,
    classify_inner,
    eigen_residual,
    run_cat,
    verify_cat_anosov,
)
from anosovq.weyl import Direction, symplectic_form

LAM = 0.9624236501192069


def _vec(d):
    return np.concatenate([d.direction.alpha_x, d.direction.alpha_p])


def test_system_invariants():
    sys = CatSystem(1.0)
    C = sys.C
    assert np.linalg.det(C) == pytest.approx(1.0) and np.array_equal(C, C.T)
    assert sys.lam > 0
    assert math.exp(sys.lam) + math.exp(-sys.lam) == pytest.approx(np.trace(C), abs=1e-12)


def test_exponent_from_characteristic_polynomial():
    roots = np.roots([1.0, -3.0, 1.0])
    assert CatSystem().lam == pytest.approx(math.log(roots.max()), abs=1e-12)
    assert CatSystem().lam == pytest.approx(LAM, abs=1e-10)


def test_eigenvector_normalisation():
    vm, vp = cat_eigenvectors()
    for v, mu in ((vm, math.exp(-LAM)), (vp, math.exp(LAM))):
        assert np.allclose(CAT @ v, mu * v, atol=1e-14)
        assert np.linalg.norm(v) == pytest.approx(1.0) and v[0] > 0
        assert v[1] / v[0] == pytest.approx(mu - 2.0)


def test_config_space_examples():
    m = build_cat_coefficient_map(CatSystem(1.0))
    vm, vp = cat_eigenvectors()
    out = m.apply(Direction(np.zeros(2), vm))
    assert np.allclose(out.alpha_x, 0.0) and np.allclose(out.alpha_p, math.exp(-LAM) * vm, atol=1e-15)
    out = m.apply(Direction(np.zeros(2), vp))
    assert np.allclose(out.alpha_p, math.exp(LAM) * vp, atol=1e-15)


def test_coefficient_map_is_pullback_of_phase_map():
    # U (p; x) U^dag = P (p; x) gives stacked (a_p; a_x) -> P^T (a_p; a_x)
    m = build_cat_coefficient_map(CatSystem(1.7))
    rng = np.random.default_rng(3)
    for _ in range(5):
        ax, ap = rng.standard_normal(2), rng.standard_normal(2)
        via_phase = m.phase.T @ np.concatenate([ap, ax])
        direct = m.M_F @ np.concatenate([ax, ap])
        assert np.allclose(np.concatenate([via_phase[2:], via_phase[:2]]), direct)


@pytest.mark.parametrize("T", [1.0, 2.5, 0.0])
def test_four_directions_exact(T):
    sys = CatSystem(T)
    rep = verify_cat_anosov(build_cat_coefficient_map(sys), cat_anosov_directions(sys), sys.lam)
    assert rep.verdict == "pass"
    assert max(rep.residuals) <= 1e-12
    assert [d.exponent for d in rep.directions] == [-sys.lam, -sys.lam, sys.lam, sys.lam]
    assert rep.lambda_bar == pytest.approx(sys.lam)


@given(st.floats(0.0, 10.0))
def test_exactness_for_any_kick_period(T):
    sys = CatSystem(T)
    m = build_cat_coefficient_map(sys)
    assert max(eigen_residual(m, d) for d in cat_anosov_directions(sys)) <= 1e-12


def test_degenerate_kick_period_collapses_to_position_directions():
    dirs = cat_anosov_directions(CatSystem(0.0))
    assert np.all(dirs[1].direction.alpha_p == 0) and np.all(dirs[3].direction.alpha_p == 0)


def test_spectrum_pairing():
    ev = np.sort(np.abs(np.linalg.eigvals(build_cat_coefficient_map(CatSystem(1.3)).M_F)))
    assert np.allclose(ev, [math.exp(-LAM)] * 2 + [math.exp(LAM)] * 2, atol=1e-10)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 5.0))
def test_commutator_covariance(seed, T):
    rng = np.random.default_rng(seed)
    m = build_cat_coefficient_map(CatSystem(T))
    a = Direction(rng.standard_normal(2), rng.standard_normal(2))
    b = Direction(rng.standard_normal(2), rng.standard_normal(2))
    assert symplectic_form(m.apply(a), m.apply(b)) == pytest.approx(symplectic_form(a, b), abs=1e-12)


@pytest.mark.parametrize("k", range(1, 21))
def test_iterated_relation(k):
    sys = CatSystem(1.0)
    m = build_cat_coefficient_map(sys)
    inv = np.linalg.inv(m.M_F)
    for d in cat_anosov_directions(sys):
        v = _vec(d)
        # expanding side of the identity, so rounding in v is not amplified
        M, rate = (m.M_F, d.exponent) if d.exponent > 0 else (inv, -d.exponent)
        w = np.linalg.matrix_power(M, k) @ v
        err = np.linalg.norm(w - math.exp(k * rate) * v) / (math.exp(k * rate) * np.linalg.norm(v))
        assert err <= k * 1e-11
    if k <= 10:
        assert max(eigen_residual(m, d, k) for d in cat_anosov_directions(sys)) <= k * 1e-11


def test_perturbed_direction_detected():
    sys = CatSystem(1.0)
    m = build_cat_coefficient_map(sys)
    d1, _, d3, _ = cat_anosov_directions(sys)
    bad = type(d1)("bad", Direction(d1.direction.alpha_x + 1e-6 * d3.direction.alpha_x,
                                    d1.direction.alpha_p + 1e-6 * d3.direction.alpha_p), d1.exponent)
    r = eigen_residual(m, bad)
    assert 1e-7 <= r <= 1e-5
    assert verify_cat_anosov(m, [bad]).verdict == "fail"


def test_flipped_sign_breaks_eigenrelation():
    sys = CatSystem(1.0)
    plus = build_cat_coefficient_map(sys, sign=+1)
    r = [eigen_residual(plus, d) for d in cat_anosov_directions(sys)]
    assert r[0] <= 1e-12 and r[2] <= 1e-12
    assert r[1] >= 0.1 and r[3] >= 0.1


def test_both_sign_variants_are_block_symplectic():
    # a lower-triangular block map with C^-T D = I and symmetric shear is symplectic for either sign
    for sign in (-1, 1):
        assert build_cat_coefficient_map(CatSystem(2.0), sign=sign).phase_deviation() == 0.0


def test_inner_outer_pattern():
    rep = run_cat(1.0)
    assert rep.derivations == ("inner", "outer", "inner", "outer")


def test_inner_examples():
    assert classify_inner(Direction(2 * math.pi * np.array([3.0, 7.0]), np.zeros(2))) == "inner"
    assert classify_inner(Direction(np.array([0.0, 2.5]), np.zeros(2))) == "inner"
    assert classify_inner(Direction(np.array([355.0, 113.0]), np.zeros(2))) == "inner"
    golden = (1 + 5 ** 0.5) / 2
    assert classify_inner(Direction(np.array([1.0, golden]), np.zeros(2))) == "outer"
    assert classify_inner(Direction(np.array([math.sqrt(2), 1.0]), np.zeros(2))) == "outer"


def test_large_denominator_is_undecidable():
    assert math.gcd(1234567, 2345671) == 1
    a = Direction(np.array([1234567.0, 2345671.0]), np.zeros(2))
    assert classify_inner(a) == "undecidable"


@given(st.integers(1, 500), st.integers(1, 500), st.floats(0.01, 100))
def test_small_rationals_inner(p, q, c):
    assert classify_inner(Direction(c * np.array([float(p), float(q)]), np.zeros(2))) == "inner"


def test_inner_needs_two_degrees_of_freedom():
    with pytest.raises(ValueError):
        classify_inner(Direction.of(1.0, 0.0))


def test_report_json():
    doc = json.loads(run_cat(1.0).to_json())
    assert doc["verdict"] == "pass" and doc["lambda"] == pytest.approx(LAM)
    row = doc["directions"][0]
    assert set(row) >= {"alpha_x", "alpha_p", "exponent", "residual", "derivation"}
    assert set(row["exponent"]) == {"re", "im"}
