"""Anisotropic Trudinger-Moser functionals on radial profiles.

For a nonincreasing profile g, the Wulff-symmetric function u(x) = g(F0(x))
has closed radial reductions: with kappa the unit Wulff-ball volume,

    ||u||_q^q            = n kappa int_0^R g^q r^{n-1} dr,
    ||F(grad u)||_n^n    = n kappa int_0^R |g'|^n r^{n-1} dr,
    int K(u) F0^{-b} dx  = n kappa int_0^R K(g) r^{n-1-b} dr.

The subcritical functional integrates exp(lam(1-b/n) g^{n/(n-1)}) g^p (the
exp-power variant) or the truncated exponential series Phi (the phi-series
variant); the critical functional always uses the Phi form.  Normalization
maps rescale profiles so both norms are 1 (unit-sphere form) or onto the
constraint sphere ||F grad u||^a + ||u||_q^b = 1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .finsler import wulff_volume, sharp_constant
from .profiles import RadialProfile

EXP_POWER = "exp_power"
PHI_SERIES = "phi_series"

_EXP_ARG_MAX = 690.0     # exp(690) ~ 1e299; beyond this the integrand overflows
_INT_SNAP = 1e-9         # floats this close to an integer count as that integer


class ParamError(ValueError):
    """Parameter combination outside the admissible regime."""


class FunctionalOverflowError(OverflowError):
    """Integrand exceeded the floating-point range.

    Carries the offending location so callers can see where a Moser-type
    profile blew up.
    """

    def __init__(self, message, radius=None, knot_index=None, argument=None):
        super().__init__(message)
        self.radius = radius
        self.knot_index = knot_index
        self.argument = argument


@dataclass(frozen=True)
class FunctionalParams:
    """Regime parameters: dimension n, norm exponent q, weight power beta,
    exponential rate lam, constraint exponents a and b, power p for the
    exp-power variant."""

    n: int
    q: float
    beta: float
    lam: float
    a: float = 1.0
    b: float = 1.0
    p: float = None
    variant: str = PHI_SERIES

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParamError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not self.q > 1.0:
            raise ParamError(f"q must exceed 1, got {self.q}")
        if not (0.0 <= self.beta < self.n):
            raise ParamError(f"beta must lie in [0, n), got {self.beta}")
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise ParamError(f"lam must be positive and finite, got {self.lam}")
        if self.a <= 0.0 or self.b <= 0.0:
            raise ParamError("constraint exponents a, b must be positive")
        if self.variant not in (EXP_POWER, PHI_SERIES):
            raise ParamError(f"variant must be {EXP_POWER!r} or {PHI_SERIES!r}")
        if self.variant == EXP_POWER:
            if self.p is None:
                raise ParamError("exp-power variant needs the power p")
            floor = self.q * (1.0 - self.beta / self.n)
            if self.beta > 0.0 and not self.p > floor:
                raise ParamError(
                    f"exp-power with beta > 0 needs p > q(1-beta/n) = {floor}, got {self.p}")
            if self.beta == 0.0 and not self.p >= self.q:
                raise ParamError(f"exp-power with beta = 0 needs p >= q, got {self.p}")

    def with_lam(self, lam):
        return FunctionalParams(self.n, self.q, self.beta, lam, self.a, self.b,
                                self.p, self.variant)


def validate_lambda(params, F):
    """Check lam < sharp constant of F (the admissible exponential range)."""
    lam_max = sharp_constant(F)
    if not params.lam < lam_max:
        raise ParamError(
            f"lam = {params.lam} is not below the sharp exponential constant "
            f"{lam_max} of this gauge; the supremum is only finite below it")
    if params.n != F.dim:
        raise ParamError(f"params dimension {params.n} != gauge dimension {F.dim}")


@dataclass(frozen=True)
class SeriesIndex:
    """Start index of the truncated exponential series; ``strict`` records
    whether the defining inequality on j was strict (the beta > 0 case)."""

    j_start: int
    strict: bool


def series_start(params):
    """Smallest admissible series index j for the Phi kernel.

    beta > 0: smallest integer strictly above q(n-1)/n * (1-beta/n);
    beta = 0: smallest integer >= q(n-1)/n.  Values within 1e-9 of an
    integer are snapped before flooring so the strict branch is decided by
    the intended real number, not float noise.
    """
    m = params.q * (params.n - 1.0) / params.n * (1.0 - params.beta / params.n)
    if abs(m - round(m)) < _INT_SNAP:
        m = round(m)
    if params.beta > 0.0:
        return SeriesIndex(int(math.floor(m)) + 1, True)
    return SeriesIndex(int(math.ceil(m)), False)


def _phi_stable(t, j_start):
    """Tail of the exponential series, sum_{j >= j_start} t^j/j!.

    Three regimes keep relative error near machine precision: expm1 when
    only the constant term is removed; a direct tail sum for t <= 1 where
    e^t minus the head would cancel; e^t minus the head elsewhere (the head
    is then small relative to e^t, so the subtraction is benign).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ParamError("series argument must be nonnegative")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if j_start == 1:
        out = np.expm1(t)
    else:
        out = np.empty_like(t)
        small = t <= 1.0
        if np.any(small):
            ts = t[small]
            term = ts ** j_start / math.factorial(j_start)
            acc = term.copy()
            for j in range(j_start, j_start + 48):
                term = term * ts / (j + 1.0)
                acc += term
            out[small] = acc
        if np.any(~small):
            tl = t[~small]
            head = np.ones_like(tl)
            term = np.ones_like(tl)
            for j in range(1, j_start):
                term = term * tl / j
                head += term
            with np.errstate(over="ignore"):
                out[~small] = np.exp(tl) - head
    return float(out[0]) if scalar else out


def phi(params, t):
    """Truncated exponential series sum_{j >= j_start} t^j / j! at t >= 0."""
    return _phi_stable(t, series_start(params).j_start)


def phi_direct(params, t, terms=64):
    """Reference route: plain ascending summation of ``terms`` tail terms.

    Converged (hence comparable to phi at full precision) only while the
    truncated tail is negligible, i.e. for t well below ``terms``.
    """
    j0 = series_start(params).j_start
    t = np.asarray(t, dtype=float)
    term = t ** j0 / math.factorial(j0)
    acc = term.copy()
    for j in range(j0, j0 + terms - 1):
        term = term * t / (j + 1.0)
        acc = acc + term
    return acc if acc.ndim else float(acc)


# -- radial quadrature -------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_QUAD_SPLIT = 4
_QUAD_GEOM = 24


def _interval_rule(knots):
    """Composite Gauss-Legendre nodes/weights over the knot intervals."""
    lo, hi = knots[:-1], knots[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    r = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    return r, w


def _panelize(knots, refine=()):
    """Subdivide knot intervals so the rule sees only smooth pieces.

    Each interval splits into equal panels; the panel touching the first or
    last knot is further refined geometrically when requested, which absorbs
    fractional-power behavior there (the singular radial weight at the
    origin, powers of the vanishing profile at the support radius).  Profiles
    with few knots, like a bare cone, would otherwise under-resolve these.
    """
    lo, hi = knots[:-1], knots[1:]
    frac = np.arange(_QUAD_SPLIT) / _QUAD_SPLIT
    pts = (lo[:, None] + (hi - lo)[:, None] * frac[None, :]).ravel()
    pts = np.append(pts, knots[-1])
    geo = 2.0 ** -np.arange(_QUAD_GEOM, 0, -1)
    if "origin" in refine and pts.size > 1:
        a, b = pts[0], pts[1]
        pts = np.concatenate([[a], a + (b - a) * geo, pts[1:]])
    if "end" in refine and pts.size > 1:
        a, b = pts[-2], pts[-1]
        pts = np.concatenate([pts[:-1], b - (b - a) * geo[::-1], [b]])
    return pts


def lq_norm_radial(g, q, F):
    """(n kappa int_0^R g^q r^{n-1} dr)^{1/q} for u(x) = g(F0(x))."""
    if q < 1.0:
        raise ParamError(f"q must be >= 1, got {q}")
    n = F.dim
    r, w = _interval_rule(_panelize(g.knots, refine=("end",)))
    gv = np.interp(r, g.knots, g.values)
    val = float(np.sum(w * gv ** q * r ** (n - 1)))
    return (n * wulff_volume(F) * val) ** (1.0 / q)


def dirichlet_energy_radial(g, F):
    """n kappa int_0^R |g'|^n r^{n-1} dr, exact for piecewise-linear g.

    Per interval the slope is constant, so the integral is
    |s_k|^n (r_{k+1}^n - r_k^n)/n in closed form.
    """
    n = F.dim
    slopes = np.diff(g.values) / np.diff(g.knots)
    rn = g.knots ** n
    return float(wulff_volume(F) * np.sum(np.abs(slopes) ** n * np.diff(rn)))


def grad_norm_radial(g, F):
    """||F(grad u)||_n = (dirichlet energy)^{1/n}."""
    return dirichlet_energy_radial(g, F) ** (1.0 / F.dim)


def pointwise_kernel(u_vals, params, force_phi=False):
    """Exponential integrand at given |u| values (no spatial weight).

    exp-power: exp(lam(1-beta/n) u^{n/(n-1)}) u^p; phi-series: the
    truncated series at the same argument.  Raises on overflow.
    """
    n = params.n
    arg = params.lam * (1.0 - params.beta / n) * np.asarray(u_vals, float) ** (n / (n - 1.0))
    amax = float(np.max(arg)) if arg.size else 0.0
    if amax > _EXP_ARG_MAX:
        raise FunctionalOverflowError(
            f"exponential argument {amax:.6g} exceeds the floating-point range",
            argument=amax)
    if params.variant == EXP_POWER and not force_phi:
        return np.exp(arg) * np.asarray(u_vals, float) ** params.p
    return _phi_stable(arg, series_start(params).j_start)


def _radial_exp_integral(g, params, F, force_phi):
    """n kappa int_0^R kernel(g) r^{n-1-beta} dr with the singular weight.

    For beta > n-1 the weight exponent is negative; the substitution
    r = rho^{1/(n-beta)} makes the weight constant, at the cost of
    evaluating g at transformed nodes.
    """
    n, beta = params.n, params.beta
    if params.n != F.dim:
        raise ParamError(f"params dimension {params.n} != gauge dimension {F.dim}")
    if beta > n - 1.0:
        ex = n - beta
        rho, w = _interval_rule(_panelize(g.knots ** ex, refine=("origin", "end")))
        r = rho ** (1.0 / ex)
        weight = 1.0 / ex
    else:
        r, w = _interval_rule(_panelize(g.knots, refine=("origin", "end")))
        weight = r ** (n - 1.0 - beta)
    gv = np.interp(r, g.knots, g.values)
    try:
        kern = pointwise_kernel(gv, params, force_phi=force_phi)
    except FunctionalOverflowError as err:
        r_bad = float(r.ravel()[int(np.argmax(gv))])
        k = max(int(np.searchsorted(g.knots, r_bad, side="right")) - 1, 0)
        raise FunctionalOverflowError(
            f"integrand overflow on knot interval {k} "
            f"(r near {r_bad:.6g}): {err}",
            radius=r_bad, knot_index=k, argument=err.argument) from None
    val = float(np.sum(w * kern * weight))
    if not np.isfinite(val):
        raise FunctionalOverflowError("non-finite integral value")
    return n * wulff_volume(F) * val


def atmsc_value(g, params, F):
    """Subcritical functional of the profile g (raw integral, no norms)."""
    return _radial_exp_integral(g, params, F, force_phi=False)


def critical_value(g, params, F):
    """Critical-functional integrand: always the Phi-series form."""
    return _radial_exp_integral(g, params, F, force_phi=True)


def ratio_functional(g, params, F):
    """atmsc_value(g) / ||g||_q^{q(1-beta/n)}."""
    qn = lq_norm_radial(g, params.q, F)
    if qn <= 0.0:
        raise ParamError("ratio functional is undefined for the zero profile")
    return atmsc_value(g, params, F) / qn ** (params.q * (1.0 - params.beta / params.n))


# -- normalization maps ------------------------------------------------------

def normalize_sphere(g, q, F):
    """Rescale to the unit sphere of both norms.

    v(r) = g(t r)/e with e = ||F grad g||_n and t = (||g||_q / e)^{q/n}
    gives ||F grad v||_n = ||v||_q = 1; the ratio functional does not
    decrease under this map.
    """
    e = grad_norm_radial(g, F)
    if e <= 1e-14:
        raise ParamError("cannot normalize a profile with zero gradient energy")
    qn = lq_norm_radial(g, q, F)
    if qn <= 1e-300:
        raise ParamError("cannot normalize the zero profile")
    t = (qn / e) ** (q / F.dim)
    return g.scaled(value_factor=1.0 / e, radius_factor=1.0 / t)


@dataclass(frozen=True)
class ConstraintScaled:
    """Result of projecting a profile onto the constraint sphere."""

    c: float
    scaled: RadialProfile
    feasible: bool          # original constraint value was <= 1 (so c >= 1)
    residual: float         # |constraint(scaled) - 1|, re-evaluated


def constraint_scale(g, a, b, F, q):
    """Scale c g onto {||F grad u||_n^a + ||u||_q^b = 1} by bisection.

    The map c -> c^a X^a + c^b Y^b is strictly increasing for X, Y > 0, so
    the root is unique; bisection runs to relative width 1e-14.  When the
    constraint value of g already exceeds 1 the root has c < 1 and the
    result is flagged infeasible for ascent purposes.
    """
    X = grad_norm_radial(g, F)
    Y = lq_norm_radial(g, q, F)
    S = X ** a + Y ** b
    if S <= 0.0:
        raise ParamError("zero profile cannot be scaled onto the constraint sphere")

    def val(c):
        return (c * X) ** a + (c * Y) ** b

    lo = hi = 1.0
    for _ in range(200):
        if val(hi) >= 1.0:
            break
        hi *= 2.0
    for _ in range(200):
        if val(lo) <= 1.0:
            break
        lo /= 2.0
    for _ in range(200):
        c = 0.5 * (lo + hi)
        if val(c) < 1.0:
            lo = c
        else:
            hi = c
        if hi - lo <= 1e-14 * hi:
            break
    c = 0.5 * (lo + hi)
    scaled = g.scaled(value_factor=c)
    res = abs(grad_norm_radial(scaled, F) ** a + lq_norm_radial(scaled, q, F) ** b - 1.0)
    return ConstraintScaled(c=c, scaled=scaled, feasible=S <= 1.0 + 1e-12,
                            residual=float(res))


def aa_bracket(t, params):
    """Sup-identity bracket ((1 - s^{a(n-1)/n}) / s^{b(n-1)/n})^{(q/b)(1-beta/n)}
    at s = t/lam, linking the subcritical value at t to the critical value
    at lam."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0) or np.any(t >= params.lam):
        raise ParamError("bracket is defined for t strictly inside (0, lam)")
    s = t / params.lam
    ex = (params.n - 1.0) / params.n
    out = ((1.0 - s ** (params.a * ex)) / s ** (params.b * ex)) \
        ** ((params.q / params.b) * (1.0 - params.beta / params.n))
    return out if out.ndim else float(out)
