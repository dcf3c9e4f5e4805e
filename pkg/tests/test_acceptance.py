"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from anosovq.catmap import (
    CatSystem,
    build_cat_coefficient_map,
    cat_anosov_directions,
    classify_inner,
    eigen_residual,
)
from anosovq.cli import main
from anosovq.cocycle import integrate_cocycle, skew_shift_residual
from anosovq.dichotomy import certify_periodic, classify_gap, monodromy
from anosovq.lyapunov import classical_lyapunov, direction_profile
from anosovq.weyl import Direction, commutator_norm, symplectic_deviation

from .specs import ELLIPTIC_E, NEGATIVE_TONGUE_E, TONGUE_E, free, mathieu

TWO_PI = 2.0 * math.pi


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, elapsed, limit):
        ok = ok and elapsed < limit
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}  [{elapsed:.2f} s / {limit:g} s]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_criterion_1_commutator_identity(report):
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    raw = rng.standard_normal((10_000, 4))
    mismatches = 0
    for ax, ap, bx, bp in raw:
        a, b = Direction.of(ax, ap), Direction.of(bx, bp)
        if commutator_norm(a, b) != abs(ax * bp - ap * bx):
            mismatches += 1
    elapsed = time.perf_counter() - start
    report(1, "commutator norm equals |sigma|", mismatches == 0, f"{mismatches} mismatches in 10^4 pairs", elapsed, 1.0)


def test_criterion_2_cocycle_validity(report):
    start = time.perf_counter()
    spec = mathieu(ELLIPTIC_E)
    theta = np.array([0.3])
    worst = {"deviation": 0.0, "composition": 0.0, "skew": 0.0}
    for H in (10.0, 50.0, 100.0):
        F = integrate_cocycle(spec, theta, 0.0, H).F
        worst["deviation"] = max(worst["deviation"], symplectic_deviation(F))
        mid = 0.37 * H
        split = integrate_cocycle(spec, theta, mid, H).F @ integrate_cocycle(spec, theta, 0.0, mid).F
        worst["composition"] = max(worst["composition"], float(np.max(np.abs(split - F)) / np.max(np.abs(F))))
        worst["skew"] = max(worst["skew"], skew_shift_residual(spec, theta, H, 0.0, 1.7))
    elapsed = time.perf_counter() - start
    ok = all(v <= 1e-7 for v in worst.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    report(2, "cocycle identities on Mathieu driving, H <= 100", ok, detail, elapsed, 10.0)


def test_criterion_3_constant_closed_forms(report):
    start = time.perf_counter()
    errors = []
    for E in (-4.0, -1.0, -0.25):
        errors.append((E, abs(classical_lyapunov(free(E), [0.0], 100.0).value - math.sqrt(-E)), 1e-3))
    for E in (0.25, 1.0):
        errors.append((E, abs(classical_lyapunov(free(E), [0.0], 100.0).value), 1e-2))
    elapsed = time.perf_counter() - start
    ok = all(err <= tol for _, err, tol in errors)
    detail = ", ".join(f"E={E:g}: {err:.1e}" for E, err, _ in errors)
    report(3, "constant-coefficient exponents", ok, detail, elapsed, 10.0)


def test_criterion_4_dichotomy_profile(report):
    start = time.perf_counter()
    lines = []
    ok = True
    for name, spec, H in (("V=0 E=-1", free(-1.0), 100.0), ("tongue", mathieu(TONGUE_E), 400.0)):
        lam = classical_lyapunov(spec, [0.0], H).value
        prof = direction_profile(spec, [0.0], horizon=H)
        if prof.stable_index is None:
            ok = False
            lines.append(f"{name}: no stable direction")
            continue
        up = np.max(np.abs(prof.unstable_values() - lam)) / lam
        down = abs(prof.exponents[prof.stable_index].value + lam) / lam
        bar = abs(prof.values.max() - lam) / lam
        ok &= max(up, down, bar) <= 1e-2
        lines.append(f"{name} lambda_c={lam:.4f} rel.err up {up:.1e} stable {down:.1e} bar {bar:.1e}")
    elapsed = time.perf_counter() - start
    report(4, "direction profile dichotomy", ok, "; ".join(lines), elapsed, 60.0)


def test_criterion_5_floquet_residual(report):
    start = time.perf_counter()
    lines = []
    ok = True
    for E in (TONGUE_E, NEGATIVE_TONGUE_E):
        cert = certify_periodic(mathieu(E), [0.0], TWO_PI, periods=5)
        lam = complex(cert.exponents[1])
        ok &= cert.residual_max <= 1e-6
        lines.append(f"E={E:g} residual {cert.residual_max:.1e} lambda+={lam.real:.5f}{lam.imag:+.5f}i")
        if E == NEGATIVE_TONGUE_E:
            ok &= abs(lam.imag - math.pi / TWO_PI) <= 1e-12
    elapsed = time.perf_counter() - start
    report(5, "Floquet direction fields over 5 periods", ok, "; ".join(lines), elapsed, 60.0)


def test_criterion_6_gap_classification(report):
    start = time.perf_counter()
    energies = np.linspace(-1.0, 5.0, 200)
    trace_kind, growth_kind = [], []
    for E in energies:
        spec = mathieu(E, q=1.0)
        trace_kind.append(classify_gap(monodromy(spec, [0.0], TWO_PI)) == "hyperbolic")
        est = classical_lyapunov(spec, [0.0], 100.0)
        growth_kind.append(est.value > 3.0 * est.slope_stderr)
    interior = [i for i in range(1, len(energies) - 1)
                if trace_kind[i - 1] == trace_kind[i] == trace_kind[i + 1]]
    bad = [energies[i] for i in interior if trace_kind[i] != growth_kind[i]]
    elapsed = time.perf_counter() - start
    detail = (f"{len(bad)} disagreements over {len(interior)} non-boundary points "
              f"({sum(trace_kind)} hyperbolic by trace)")
    if bad:
        detail += " at E=" + ",".join(f"{E:.3f}" for E in bad[:5])
    report(6, "trace vs exponent classification, q=1 sweep", not bad, detail, elapsed, 120.0)


def test_criterion_7_cat_exactness(report):
    start = time.perf_counter()
    sys = CatSystem(1.0)
    minus = build_cat_coefficient_map(sys)
    dirs = cat_anosov_directions(sys)
    residuals = [eigen_residual(minus, d) for d in dirs]
    lam_err = abs(sys.lam - math.log((3.0 + math.sqrt(5.0)) / 2.0))
    lam_ref = math.acosh(1.5)
    pattern = tuple(classify_inner(d.direction) for d in dirs)
    plus_dev = build_cat_coefficient_map(sys, sign=+1).phase_deviation()
    checks = {
        "eigen": max(residuals) <= 1e-12,
        "lambda": lam_err <= 1e-12 and abs(sys.lam - lam_ref) <= 1e-12,
        "pattern": pattern == ("inner", "outer", "inner", "outer"),
        "plus-variant deviation 2T": abs(plus_dev - 2.0 * sys.T) <= 1e-12,
    }
    elapsed = time.perf_counter() - start
    detail = (f"max residual {max(residuals):.1e}, pattern {pattern}, "
              f"plus-variant deviation {plus_dev:.1e} (claimed {2.0 * sys.T:g}); "
              f"failed: {[k for k, v in checks.items() if not v] or 'none'}")
    report(7, "cat-map Anosov relations", all(checks.values()), detail, elapsed, 1.0)


def test_criterion_8_deterministic_scan(report, tmp_path):
    start = time.perf_counter()
    cfg = {
        "dimension": 1,
        "omega": [1.0],
        "potential": {"constant": 0.0, "terms": [{"k": [1], "a": 2.0, "b": 0.0}]},
        "E_grid": {"min": -1.0, "max": 5.0, "count": 12},
        "horizon": 60.0,
        "count": 8,
        "seed": 7,
    }
    path = tmp_path / "scan.json"
    path.write_text(json.dumps(cfg))
    outputs = []
    for i, threads in enumerate((1, 3, 1)):
        out = tmp_path / f"scan{i}.csv"
        code = main(["scan", "--config", str(path), "--out", str(out), "--threads", str(threads), "--seed", "7"])
        assert code == 0
        outputs.append(out.read_bytes())
    elapsed = time.perf_counter() - start
    same = all(o == outputs[0] for o in outputs)
    report(8, "scan CSV reproducibility", same, f"{len(outputs)} runs, {len(outputs[0])} bytes each, identical={same}",
           elapsed, 10.0)
