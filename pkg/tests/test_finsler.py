"""Gauge geometry: polar duality, Wulff volumes, and the identity suite.

Volume anchors come from closed forms (gamma-function expressions for
p-balls, determinant scaling for ellipsoids); identity checks draw random
points per gauge kind.
"""

import numpy as np
import pytest

from anisotm import (FinslerNorm, WulffBall, GaugeError, wulff_volume,
                     sharp_constant, bipolar_residual, coarea_surface_check,
                     unit_ball_measure)

# p-ball volumes 2 Gamma(1 + 1/p)^dim / Gamma(1 + dim/p) * 2^(dim-1),
# evaluated once and frozen
KAPPA_PNORM4_2D = 2.541639254381936       # dual exponent 4/3
KAPPA_PNORM15_2D = 3.533277500570898      # dual exponent 3
KAPPA_PNORM3_3D = 2.9427657258847137      # dual exponent 3/2
LAMBDA3_EUCLID = 10.634723105433096       # 3^{3/2} (4 pi / 3)^{1/2}


def rand_points(dim, count, seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, dim)) * 1.3 + 0.05
    return pts


# -- volume and sharp-constant anchors ---------------------------------------

def test_kappa_closed_forms(gauge_euclid, gauge_ellipse, gauge_pnorm4):
    assert abs(wulff_volume(gauge_euclid) - np.pi) < 1e-10
    # Wulff ball of sqrt(x^T A x) is the A^{-1} ellipse, area pi sqrt(det A)
    assert abs(wulff_volume(gauge_ellipse) - 2.0 * np.pi) < 1e-10
    assert abs(wulff_volume(gauge_pnorm4) - KAPPA_PNORM4_2D) < 1e-10
    assert abs(wulff_volume(FinslerNorm.pnorm(1.5)) - KAPPA_PNORM15_2D) < 1e-10


def test_kappa_3d():
    assert abs(wulff_volume(FinslerNorm.euclidean(3)) - 4.0 * np.pi / 3.0) < 1e-10
    ell = FinslerNorm.ellipse([[4.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert abs(wulff_volume(ell) - 8.0 * np.pi / 3.0) < 1e-8
    got = wulff_volume(FinslerNorm.pnorm(3.0, 3))
    assert abs(got - KAPPA_PNORM3_3D) / KAPPA_PNORM3_3D < 1e-7


def test_sharp_constants(gauge_euclid, gauge_maxgauge):
    assert abs(sharp_constant(gauge_euclid) - 4.0 * np.pi) < 1e-10
    assert abs(sharp_constant(gauge_maxgauge) - 8.0) < 1e-6
    assert abs(sharp_constant(FinslerNorm.euclidean(3)) - LAMBDA3_EUCLID) < 1e-10


def test_unit_ball_measure_is_gauge_volume(gauge_ellipse):
    # unit_ball_measure takes the gauge itself; kappa takes its polar
    assert abs(unit_ball_measure(gauge_ellipse) - np.pi / 2.0) < 1e-10


# -- polar duality ------------------------------------------------------------

def test_polar_pnorm_is_dual_exponent(gauge_pnorm4):
    pts = rand_points(2, 300, 1)
    pol = gauge_pnorm4.polar()
    direct = (np.abs(pts) ** (4.0 / 3.0)).sum(axis=-1) ** (3.0 / 4.0)
    assert np.max(np.abs(pol(pts) - direct) / direct) < 1e-12


def test_polar_ellipse_is_inverse_matrix(gauge_ellipse):
    pts = rand_points(2, 300, 2)
    pol = gauge_ellipse.polar()
    inv = np.linalg.inv([[4.0, 0.0], [0.0, 1.0]])
    direct = np.sqrt(np.einsum("ki,ij,kj->k", pts, inv, pts))
    assert np.max(np.abs(pol(pts) - direct) / direct) < 1e-12


def test_polar_sampled_matches_closed_form():
    # tabulate the ellipse gauge, then compare the swept polar to the exact one
    n = 4096
    th = np.arange(n) * (2.0 * np.pi / n)
    dirs = np.column_stack([np.cos(th), np.sin(th)])
    ell = FinslerNorm.ellipse([[4.0, 0.0], [0.0, 1.0]])
    samp = FinslerNorm.sampled(ell(dirs), rule="spline")
    pts = rand_points(2, 300, 3)
    exact = ell.polar()(pts)
    assert np.max(np.abs(samp.polar()(pts) - exact) / exact) < 1e-6


def test_polar_is_involution_on_closed_forms(gauge_euclid, gauge_ellipse,
                                             gauge_pnorm4):
    for F in (gauge_euclid, gauge_ellipse, gauge_pnorm4):
        assert bipolar_residual(F, sample_count=200) < 1e-10


def test_bipolar_residual_sampled(gauge_maxgauge, gauge_sampled_smooth):
    assert bipolar_residual(gauge_maxgauge, sample_count=100) < 1e-8
    assert bipolar_residual(gauge_sampled_smooth, sample_count=100) < 1e-8


# -- identity suite -----------------------------------------------------------

def identity_residuals(F, pts):
    P = F.polar()
    x = pts
    y = pts[::-1] * 0.7 + 0.1
    g = F.grad(x)
    gp = P.grad(x)
    res = {}
    res["triangle"] = float(np.max(np.maximum(F(x + y) - F(x) - F(y), 0.0)
                                   / np.maximum(F(x + y), 1e-300)))
    res["euler"] = float(np.max(np.abs(np.sum(x * g, axis=-1) - F(x)) / F(x)))
    res["grad_homog"] = float(np.max(np.abs(F.grad(2.7 * x) - g)
                                     / np.maximum(np.abs(g), 1.0)))
    res["grad_odd"] = float(np.max(np.abs(F.grad(-2.7 * x) + g)
                                   / np.maximum(np.abs(g), 1.0)))
    res["dual_unit"] = max(float(np.max(np.abs(F(gp) - 1.0))),
                           float(np.max(np.abs(P(g) - 1.0))))
    rec = F(x)[:, None] * P.grad(g)
    res["inversion"] = float(np.max(np.linalg.norm(rec - x, axis=-1)
                                    / np.linalg.norm(x, axis=-1)))
    return res


@pytest.mark.parametrize("kind", ["euclidean", "pnorm", "ellipse", "sampled"])
def test_identities_per_kind(kind, gauge_euclid, gauge_pnorm4, gauge_ellipse,
                             gauge_sampled_smooth):
    F = {"euclidean": gauge_euclid, "pnorm": gauge_pnorm4,
         "ellipse": gauge_ellipse, "sampled": gauge_sampled_smooth}[kind]
    res = identity_residuals(F, rand_points(2, 200, 11))
    worst = max(res.values())
    assert worst < 1e-6, res


def test_identities_3d():
    pts = rand_points(3, 200, 12)
    for F in (FinslerNorm.euclidean(3), FinslerNorm.pnorm(3.0, 3)):
        assert max(identity_residuals(F, pts).values()) < 1e-6


def test_coarea_closed_forms(gauge_euclid, gauge_ellipse):
    for F in (gauge_euclid, gauge_ellipse):
        for r in (0.5, 1.0, 2.0):
            assert abs(coarea_surface_check(F, r)) < 1e-8


def test_coarea_sampled_and_3d(gauge_maxgauge):
    assert abs(coarea_surface_check(gauge_maxgauge, 1.0)) < 1e-8
    assert abs(coarea_surface_check(FinslerNorm.euclidean(3), 1.0)) < 1e-10
    assert abs(coarea_surface_check(FinslerNorm.pnorm(3.0, 3), 1.0)) < 1e-5


# -- Wulff balls --------------------------------------------------------------

def test_wulff_ball_membership_and_volume(gauge_ellipse):
    # the Wulff ball of F is a sublevel set of the polar gauge
    pol = gauge_ellipse.polar()
    ball = WulffBall(pol, radius=1.5, center=(0.3, -0.2))
    assert abs(ball.volume() - 2.0 * np.pi * 1.5 ** 2) < 1e-8
    pts = rand_points(2, 200, 4)
    inside = pol(pts - np.array([0.3, -0.2])) <= 1.5
    assert np.array_equal(ball.contains(pts), inside)
    with pytest.raises(GaugeError):
        WulffBall(pol, radius=0.0)


def test_direction_bounds(gauge_ellipse):
    a, b = gauge_ellipse.direction_bounds()
    assert abs(a - 1.0) < 1e-9 and abs(b - 2.0) < 1e-9


# -- validation ---------------------------------------------------------------

def test_rejects_bad_inputs():
    with pytest.raises(GaugeError):
        FinslerNorm.euclidean(4)
    with pytest.raises(GaugeError):
        FinslerNorm.pnorm(1.0)
    with pytest.raises(GaugeError):
        FinslerNorm.ellipse([[1.0, 2.0], [0.0, 1.0]])        # not symmetric
    with pytest.raises(GaugeError):
        FinslerNorm.ellipse([[-1.0, 0.0], [0.0, 1.0]])       # not positive
    with pytest.raises(GaugeError):
        FinslerNorm.sampled(np.zeros(64))                    # not positive
    with pytest.raises(GaugeError):
        FinslerNorm.sampled(np.ones(3))                      # too few nodes


def test_grad_rejects_origin(gauge_euclid):
    with pytest.raises(GaugeError):
        gauge_euclid.grad(np.zeros(2))


def test_from_config_round_trip(gauge_pnorm4):
    spec = gauge_pnorm4.config()
    again = FinslerNorm.from_config(spec, dim=2)
    pts = rand_points(2, 50, 5)
    assert np.allclose(again(pts), gauge_pnorm4(pts), rtol=0, atol=1e-14)
    with pytest.raises(GaugeError):
        FinslerNorm.from_config({"kind": "nope"}, dim=2)
