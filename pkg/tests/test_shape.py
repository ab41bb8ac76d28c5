import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triadg3.correlation import ShapeCoefficients, shape_coefficients
from triadg3.shape import (
    STATIONARY_POINTS,
    TOL,
    Verdict,
    classical_bell_coeffs,
    classical_bell_coeffs_batch,
    classify,
    cubic_real_roots,
    h_poly,
    stationary_point_no_revival,
    quantum_bell_coeffs,
    simplex_form,
    verify_appendix_a,
    ymin_and_h1,
)
from triadg3.sources import ClassicalSourceMoments

MU_GRID = [k / 100 for k in range(101)]


def test_single_photon_bell_revives():
    rc = classify(2 / 9, 1 / 9, 4 / 9)
    assert rc.verdict is Verdict.SIMPLE_REVIVAL
    assert rc.y_min == pytest.approx(math.sqrt(2), abs=1e-12)
    (root,) = rc.roots_gt1
    assert h_poly(root, 2 / 9, 1 / 9, 4 / 9) == pytest.approx(0, abs=1e-14)
    assert root > math.sqrt(2)


def test_classical_equal_bell_no_revival():
    assert classify(2 / 3, 1 / 3, 4 / 9).verdict is Verdict.NO_REVIVAL


def test_positive_polynomial():
    rc = classify(1, 1, 0)
    assert rc.verdict is Verdict.NO_REVIVAL and rc.roots_gt1 == ()


def test_two_roots_dip():
    # h = (y - 2)(y - 3)(y + 5) = y^3 - 19 y + 30
    rc = classify(1, 7.5, 19 / 3)
    assert rc.verdict is Verdict.DIP_IN_REVIVAL
    np.testing.assert_allclose(rc.roots_gt1, [2, 3], atol=1e-12)


def test_negative_a_single_crossing():
    rc = classify(-1, 1, 0)
    assert rc.verdict is Verdict.SIMPLE_REVIVAL
    assert rc.roots_gt1[0] == pytest.approx(4 ** (1 / 3), abs=1e-12)


def test_degenerate_cases():
    assert classify(0, 0, 0).verdict is Verdict.DEGENERATE
    # simple root exactly at y = 1: h = y^3 - 1
    assert classify(1, -0.25, 0).verdict is Verdict.DEGENERATE
    # A ~ 0 with C > 0, B > 0: the sign at infinity is not decided
    assert classify(1e-12, 1.0, 0.5).verdict is Verdict.DEGENERATE


def test_mu_half_boundary_is_no_revival():
    rc = classify(*quantum_bell_coeffs(0.5))
    assert rc.verdict is Verdict.NO_REVIVAL
    assert rc.y_min == pytest.approx(1.0, abs=1e-12)


def test_classify_rejects_nonfinite():
    with pytest.raises(ValueError):
        classify(float("nan"), 0, 0)


def test_verdict_json():
    doc = json.loads(classify(2 / 9, 1 / 9, 4 / 9).to_json())
    assert doc["verdict"] == "SimpleRevival"
    assert set(doc) == {"verdict", "roots_gt1", "y_min", "A", "B", "C"}
    assert doc["y_min"] == pytest.approx(math.sqrt(2))


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_cubic_roots_are_roots(a, b, c):
    if abs(a) < 1e-3:
        return
    for r in cubic_real_roots(a, b, c):
        scale = abs(a) * abs(r) ** 3 + 3 * abs(c * r) + 4 * abs(b)
        assert abs(h_poly(r, a, b, c)) <= 1e-12 * max(scale, 1.0)


def test_agrees_with_two_condition_criterion():
    rng = np.random.default_rng(5)
    checked = 0
    for a, b, c in rng.uniform([0, -1, 0], [1, 1, 1], size=(5000, 3)):
        rc = classify(a, b, c)
        if rc.verdict is Verdict.DEGENERATE:
            continue
        checked += 1
        assert stationary_point_no_revival(a, b, c) == (rc.verdict is Verdict.NO_REVIVAL)
    assert checked > 4500


def _curve_sign_changes(sc, grid):
    g = sc.evaluate(grid)
    dg = np.gradient(g, grid)
    floor = 1e-12 * max(1.0, abs(sc.S))
    signs = np.sign(dg[np.abs(dg) > floor])
    return int(np.count_nonzero(np.diff(signs)))


def test_classification_matches_curve():
    rng = np.random.default_rng(11)
    grid = np.linspace(6 / 2000, 6, 2000)
    seen = {v: 0 for v in Verdict}
    tried = 0
    while sum(seen[v] for v in (Verdict.NO_REVIVAL, Verdict.SIMPLE_REVIVAL, Verdict.DIP_IN_REVIVAL)) < 600:
        tried += 1
        a, b, c = rng.uniform(-1, 1, 3)
        if tried % 3 == 0:
            # plant two roots y1 < y2 on y > 1; the third is -(y1 + y2)
            y1, y2 = np.sort(np.exp(rng.uniform(0.01, 9, 2)))
            a = abs(a) + 0.01
            c = -a * (y1 * y2 - (y1 + y2) ** 2) / 3
            b = a * y1 * y2 * (y1 + y2) / 4
        rc = classify(a, b, c)
        seen[rc.verdict] += 1
        if rc.verdict is Verdict.DEGENERATE:
            continue
        deltas = [math.sqrt(math.log(y)) for y in rc.roots_gt1]
        # roots the grid cannot resolve are skipped, not counted
        if any(d < 0.05 or d > 3.5 for d in deltas) or (len(deltas) == 2 and deltas[1] - deltas[0] < 0.05):
            continue
        sc = ShapeCoefficients(rng.uniform(-2, 2), a, b, c)
        assert _curve_sign_changes(sc, grid) == len(rc.roots_gt1), (a, b, c)
    assert seen[Verdict.DIP_IN_REVIVAL] > 10


def test_mu_threshold_scan():
    verdicts = [classify(*quantum_bell_coeffs(mu)).verdict for mu in MU_GRID]
    assert all(v is Verdict.NO_REVIVAL for v in verdicts[:51])
    assert all(v is Verdict.SIMPLE_REVIVAL for v in verdicts[51:])


@pytest.mark.parametrize("mu", MU_GRID[::10])
def test_ymin_h1_formulas(mu):
    y_min, h1 = ymin_and_h1(*quantum_bell_coeffs(mu))
    assert y_min**2 == pytest.approx(2 / (3 - 2 * mu), abs=1e-12)
    assert h1 == pytest.approx(2 * (1 - 2 * mu) / 3, abs=1e-12)


def test_ymin_h1_examples():
    y, h = ymin_and_h1(*quantum_bell_coeffs(1.0))
    assert y == pytest.approx(math.sqrt(2), abs=1e-12) and h == pytest.approx(-2 / 3, abs=1e-12)
    assert ymin_and_h1(*quantum_bell_coeffs(0.0))[1] == pytest.approx(2 / 3, abs=1e-12)
    assert ymin_and_h1(1, 0, 1) == (1.0, -2.0)
    with pytest.raises(ValueError, match="stationary point undefined"):
        ymin_and_h1(0, 1, 1)


def test_quantum_bell_coeffs():
    np.testing.assert_allclose(quantum_bell_coeffs(1), (2 / 9, 1 / 9, 4 / 9), atol=1e-15)
    np.testing.assert_allclose(quantum_bell_coeffs(0), classical_bell_coeffs((1, 1, 1)), atol=1e-15)
    for bad in (-0.01, 1.01):
        with pytest.raises(ValueError):
            quantum_bell_coeffs(bad)


def test_classical_bell_coeffs_examples():
    np.testing.assert_allclose(classical_bell_coeffs((1, 1, 1)), (2 / 3, 1 / 3, 4 / 9), atol=1e-15)
    np.testing.assert_allclose(classical_bell_coeffs((1, 0, 1)), (0, 3 / 4, 0), atol=1e-15)
    np.testing.assert_allclose(classical_bell_coeffs((1, 1, 1), (1, 1, 1)), (10 / 9, 5 / 9, 4 / 9), atol=1e-15)
    with pytest.raises(ValueError):
        classical_bell_coeffs((0, 0, 0))


def test_classical_bell_coeffs_match_engine(bell):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, v = rng.uniform(0, 3, 3), rng.uniform(0, 3, 3)
        sc = shape_coefficients(bell, [ClassicalSourceMoments.gamma(a, b) for a, b in zip(x, v)], "classical")
        np.testing.assert_allclose((sc.A, sc.B, sc.C), classical_bell_coeffs(x, v), atol=1e-12)
        np.testing.assert_allclose(
            np.ravel(classical_bell_coeffs_batch(x[None], v[None])), classical_bell_coeffs(x, v), atol=1e-15
        )


def test_classical_bell_never_revives():
    rng = np.random.default_rng(2024)
    x = rng.uniform(0, 10, (100_000, 3))
    v = rng.uniform(0, 10, (100_000, 3))
    a, b, c = classical_bell_coeffs_batch(x, v)
    for row in zip(a, b, c):
        assert not classify(*row).is_revival


def test_variance_monotonicity():
    rng = np.random.default_rng(8)
    y = np.linspace(1, 20, 400)
    for _ in range(200):
        x, v = rng.uniform(0, 5, 3), rng.uniform(0, 5, 3)
        bump = v.copy()
        bump[rng.integers(3)] += rng.uniform(0, 5)
        h0 = h_poly(y, *classical_bell_coeffs(x, v))
        h1 = h_poly(y, *classical_bell_coeffs(x, bump))
        assert np.all(h1 - h0 >= -1e-12)


def test_appendix_report():
    rep = verify_appendix_a(500)
    assert rep.ok
    assert rep.grid_min >= -1e-12
    assert rep.stationary_values["t0"] == pytest.approx(1 / 9, abs=1e-12)
    assert rep.stationary_values["t1"] == pytest.approx(2 / 9, abs=1e-12)
    assert min(rep.edge_minima.values()) >= 0
    assert json.loads(rep.to_json())["ok"] is True


def test_appendix_pieces():
    assert simplex_form(0, 0.5, 0.5) == pytest.approx(0.25)
    assert simplex_form(*STATIONARY_POINTS["t1"]) == pytest.approx(2 / 9, abs=1e-12)
    with pytest.raises(ValueError):
        verify_appendix_a(1)


def test_simplex_form_is_h1_over_three():
    rng = np.random.default_rng(1)
    for x in rng.uniform(0.01, 5, (50, 3)):
        a, b, c = classical_bell_coeffs(x)
        t = x / x.sum()
        assert h_poly(1.0, a, b, c) == pytest.approx(3 * simplex_form(*t), abs=1e-12)
