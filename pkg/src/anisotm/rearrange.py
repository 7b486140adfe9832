"""Decreasing rearrangement and convex symmetrization on uniform grids.

Grid functions live at cell centers of [-L, L]^n with zero boundary layer,
so extension by zero is consistent and the sort-based decreasing
rearrangement u_sharp is exact (grid functions are step functions).  Convex
symmetrization composes u_sharp with the Wulff-ball volume radius:

    u_star(x) = u_sharp(kappa * F0(x)^n),

which is equimeasurable with u, Wulff-symmetric, and nonincreasing in
F0(x).  Schwarz symmetrization is the Euclidean special case.  The module
also carries the verification harness: equimeasurability gaps, the
Polya-Szego energy comparison, and the Hardy-Littlewood product inequality
with its equality-case diagnostic.

Discretization allowance: symmetrization moves mass across cell boundaries,
so identities that are exact in the continuum hold on grids only up to a
resolution-dependent gap.  The declared allowance is disc_tolerance(h) =
C * h; C was calibrated on Euclidean cone profiles at M in {128, 256, 512}
(max observed relative gap around 0.9*h for the norms and 2.8*h for the
energy comparison) and frozen with headroom.
"""

from dataclasses import dataclass

import numpy as np

from .finsler import wulff_volume
from .functional import (ParamError, FunctionalOverflowError, pointwise_kernel,
                         dirichlet_energy_radial)
from .profiles import RadialProfile

DISC_TOL_COEFF = 6.0


def disc_tolerance(h):
    """Declared discretization allowance C*h for grid-vs-continuum gaps."""
    return DISC_TOL_COEFF * h


class SupportOverflowError(RuntimeError):
    """Symmetrized support does not fit inside the grid box."""

    def __init__(self, message, needed_halfwidth=None):
        super().__init__(message)
        self.needed_halfwidth = needed_halfwidth


class SymmetryError(ValueError):
    """Input claimed to be Wulff-symmetric exceeds the symmetry tolerance."""


class GridFunction:
    """Nonnegative function sampled at cell centers of [-L, L]^n.

    ``values`` is an (m,)*n array; axis k of the array is coordinate k.
    The outermost cell layer must be zero so that zero extension to all of
    space is consistent.
    """

    def __init__(self, halfwidth, values):
        values = np.asarray(values, dtype=float)
        if values.ndim not in (2, 3):
            raise ValueError("grid functions are 2-d or 3-d")
        m = values.shape[0]
        if values.shape != (m,) * values.ndim or m < 4:
            raise ValueError(f"values must be a cube of side >= 4, got {values.shape}")
        if halfwidth <= 0.0:
            raise ValueError("halfwidth must be positive")
        if np.any(values < 0.0) or np.any(~np.isfinite(values)):
            raise ValueError("grid values must be finite and nonnegative")
        edge = np.ones(values.shape, dtype=bool)
        edge[(slice(1, -1),) * values.ndim] = False
        if np.any(values[edge] != 0.0):
            raise ValueError("boundary cell layer must be zero")
        self.halfwidth = float(halfwidth)
        self.values = values
        self.dim = values.ndim
        self.m = m

    @property
    def h(self):
        return 2.0 * self.halfwidth / self.m

    @property
    def cell_volume(self):
        return self.h ** self.dim

    def axis_centers(self):
        return -self.halfwidth + (np.arange(self.m) + 0.5) * self.h

    def centers(self):
        """Cell-center coordinates, shape (m,)*dim + (dim,)."""
        ax = self.axis_centers()
        grids = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack(grids, axis=-1)

    @classmethod
    def zeros(cls, dim, halfwidth, m):
        return cls(halfwidth, np.zeros((m,) * dim))

    # -- file formats: text "N L M" + row-major values, or JSON ----------

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"{self.dim} {self.halfwidth!r} {self.m}\n")
            np.savetxt(fh, self.values.reshape(self.m, -1), fmt="%.17g")

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            head = fh.readline().split()
            if len(head) != 3:
                raise ValueError(f"{path}: header must be 'N L M'")
            dim, l, m = int(head[0]), float(head[1]), int(head[2])
            flat = np.loadtxt(fh).ravel()
        if flat.size != m ** dim:
            raise ValueError(f"{path}: expected {m ** dim} values, got {flat.size}")
        return cls(l, flat.reshape((m,) * dim))

    def to_json(self):
        return {"n": self.dim, "l": self.halfwidth, "m": self.m,
                "values": self.values.ravel().tolist()}

    @classmethod
    def from_json(cls, obj):
        for key in ("n", "l", "m", "values"):
            if key not in obj:
                raise ValueError(f"grid JSON lacks {key!r}")
        flat = np.asarray(obj["values"], dtype=float)
        if flat.size != obj["m"] ** obj["n"]:
            raise ValueError("grid JSON value count does not match m^n")
        return cls(obj["l"], flat.reshape((obj["m"],) * obj["n"]))


@dataclass(frozen=True)
class StepRearrangement:
    """Right-continuous nonincreasing step function of the measure variable.

    u_sharp(t) = values[k] on [breakpoints[k-1], breakpoints[k]) and 0 past
    the last breakpoint; levels are strictly decreasing and positive.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        if self.values.size == 0:
            out = np.zeros_like(t)
        else:
            out = np.where(idx < self.values.size,
                           self.values[np.minimum(idx, self.values.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def total_support(self):
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def mass(self, q):
        """sum (t_k - t_{k-1}) values_k^q; equals ||u||_q^q of the source."""
        if self.breakpoints.size == 0:
            return 0.0
        widths = np.diff(np.concatenate([[0.0], self.breakpoints]))
        return float(np.sum(widths * self.values ** q))


def grid_lq_norm(u, q):
    """(h^n sum u^q)^{1/q}, the midpoint quadrature of ||u||_q."""
    if q < 1.0:
        raise ParamError(f"q must be >= 1, got {q}")
    return float((u.cell_volume * np.sum(u.values ** q)) ** (1.0 / q))


def distribution_function(u, s):
    """Measure of the superlevel set {u >= s} by cell counting."""
    if s < 0.0:
        raise ValueError("level must be nonnegative")
    return float(u.cell_volume * np.count_nonzero(u.values >= s))


def decreasing_rearrangement(u):
    """Exact decreasing rearrangement of the grid step function.

    Distinct positive values become levels; breakpoints are cumulative cell
    measures.  Sort ties carry no ambiguity: equal values merge into one
    step, so the result is independent of tie order.
    """
    flat = u.values.ravel()
    pos = flat[flat > 0.0]
    if pos.size == 0:
        return StepRearrangement(np.zeros(0), np.zeros(0))
    lev, counts = np.unique(pos, return_counts=True)
    lev, counts = lev[::-1], counts[::-1]
    breaks = np.cumsum(counts) * u.cell_volume
    return StepRearrangement(breaks, lev)


def convex_symmetrization(u, F):
    """u_star(x) = u_sharp(kappa F0(x)^n) sampled on u's own grid.

    Raises SupportOverflowError when the symmetrized support touches the
    zero boundary layer (the caller must enlarge the box).
    """
    rearr = decreasing_rearrangement(u)
    if rearr.values.size == 0:
        return GridFunction(u.halfwidth, np.zeros_like(u.values))
    kappa = wulff_volume(F)
    pol = F.polar()
    pts = u.centers().reshape(-1, u.dim)
    t = kappa * pol(pts) ** u.dim
    vals = rearr(t).reshape(u.values.shape)
    edge = np.ones(vals.shape, dtype=bool)
    edge[(slice(1, -1),) * u.dim] = False
    if np.any(vals[edge] > 0.0):
        r_supp = (rearr.total_support / kappa) ** (1.0 / u.dim)
        a_pol = pol.direction_bounds()[0]
        need = r_supp / a_pol + 2.0 * u.h
        raise SupportOverflowError(
            f"symmetrized support radius {r_supp:.6g} (in F0) reaches the box "
            f"edge; use half-width >= {need:.6g}", needed_halfwidth=float(need))
    return GridFunction(u.halfwidth, vals)


def profile_of(u_star, F, knot_count=None, tol=None):
    """Radial profile g with u_star(x) = g(F0(x)), on uniform knots.

    In the radial variable the rearrangement is a staircase with jumps at
    rho_k = (t_k/kappa)^{1/n}; sampling it pointwise would put its whole
    variation into isolated knot intervals and overshoot slope-sensitive
    quantities like the Dirichlet energy.  Knot values are therefore window
    averages of the staircase (computed exactly from its cumulative
    integral), which converge to the continuum profile at O(h).

    ``u_star`` must already be Wulff-symmetric: the relative L1 gap between
    u_star and the rasterization of g is checked against ``tol`` (default
    disc_tolerance(h)).  The zero function maps to the zero profile.
    """
    rearr = decreasing_rearrangement(u_star)
    kappa = wulff_volume(F)
    if rearr.values.size == 0:
        return RadialProfile(np.array([0.0, u_star.h]), np.zeros(2))
    n = u_star.dim
    rho = (rearr.breakpoints / kappa) ** (1.0 / n)
    radius = float(rho[-1])
    seg = np.diff(np.concatenate([[0.0], rho])) * rearr.values
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    jump_r = np.concatenate([[0.0], rho])
    count = knot_count or u_star.m
    # windows never narrower than the grid resolution: near the center the
    # staircase jumps are sparser than h and narrower windows stay jagged
    half = max(0.5 * radius / count, u_star.h)
    # knots extend one window width past the staircase so the averaged ramp
    # descends to zero on its own; truncating it at the support radius leaves
    # a cliff one knot wide whose slope pollutes the Dirichlet energy
    knots = np.linspace(0.0, radius + 2.0 * half, count + 1)
    half = max(0.5 * (knots[1] - knots[0]), half)
    lo = np.clip(knots - half, 0.0, None)
    hi = knots + half
    ints = np.interp(hi, jump_r, cum) - np.interp(lo, jump_r, cum)
    vals = ints / (hi - lo)
    vals[-1] = 0.0
    g = RadialProfile(knots, np.minimum.accumulate(np.maximum(vals, 0.0)))
    pol = F.polar()
    pts = u_star.centers().reshape(-1, u_star.dim)
    resampled = g(pol(pts)).reshape(u_star.values.shape)
    l1 = np.sum(np.abs(u_star.values))
    gap = float(np.sum(np.abs(u_star.values - resampled)) / max(l1, 1e-300))
    if tol is None:
        tol = disc_tolerance(u_star.h)
    if gap > tol:
        raise SymmetryError(
            f"input is not Wulff-symmetric within tolerance: relative L1 "
            f"residual {gap:.3e} > {tol:.3e}")
    return g


def rasterize_profile(g, F, halfwidth, m, dim=None):
    """Sample the Wulff-symmetric function g(F0(x)) on a fresh grid."""
    dim = dim or F.dim
    if dim != F.dim:
        raise ValueError(f"requested dimension {dim} != gauge dimension {F.dim}")
    grid = GridFunction.zeros(dim, halfwidth, m)
    pol = F.polar()
    pts = grid.centers().reshape(-1, dim)
    vals = g(pol(pts)).reshape(grid.values.shape)
    edge = np.ones(vals.shape, dtype=bool)
    edge[(slice(1, -1),) * dim] = False
    if np.any(vals[edge] > 0.0):
        a_pol = pol.direction_bounds()[0]
        need = g.support_radius / a_pol + 2.0 * grid.h
        raise SupportOverflowError(
            f"profile support radius {g.support_radius:.6g} reaches the box "
            f"edge; use half-width >= {need:.6g}", needed_halfwidth=float(need))
    return GridFunction(halfwidth, vals)


def grid_dirichlet_energy(u, F):
    """h^n sum F(grad u)^n with forward differences and zero extension."""
    comps = [np.diff(u.values, axis=k, append=0.0) / u.h for k in range(u.dim)]
    vecs = np.stack(comps, axis=-1)
    return float(u.cell_volume * np.sum(F(vecs) ** u.dim))


def grid_atmsc_value(u, params, F):
    """Grid quadrature of the exponential integrand with weight F0^{-beta}.

    Cell-center evaluation keeps the singular weight finite provided no
    center sits at the origin; even m guarantees that.
    """
    if params.beta > 0.0 and u.m % 2 == 1:
        raise ParamError("grids with odd m have a cell center at the origin; "
                         "the singular weight needs even m")
    try:
        kern = pointwise_kernel(u.values, params)
    except FunctionalOverflowError as err:
        k = int(np.argmax(u.values))
        raise FunctionalOverflowError(
            f"integrand overflow at grid cell {np.unravel_index(k, u.values.shape)}: {err}",
            knot_index=k, argument=err.argument) from None
    if params.beta > 0.0:
        pol = F.polar()
        pts = u.centers().reshape(-1, u.dim)
        w = pol(pts).reshape(u.values.shape) ** (-params.beta)
        kern = kern * w
    return float(u.cell_volume * np.sum(kern))


# -- inequality harnesses ----------------------------------------------------

@dataclass(frozen=True)
class HardyLittlewoodResult:
    lhs: float                # int f g
    rhs: float                # int f* g*
    gap: float                # rhs - lhs, nonnegative up to quadrature
    g_symmetry_gap: float     # ||g - g*||_1, the equality-case diagnostic


def hardy_littlewood_check(f, g, F):
    """Product-integral comparison int f g <= int f* g*."""
    if f.dim != g.dim or f.m != g.m or f.halfwidth != g.halfwidth:
        raise ValueError("both factors must live on the same grid")
    lhs = float(f.cell_volume * np.sum(f.values * g.values))
    fs = convex_symmetrization(f, F)
    gs = convex_symmetrization(g, F)
    rhs = float(f.cell_volume * np.sum(fs.values * gs.values))
    sym = float(f.cell_volume * np.sum(np.abs(g.values - gs.values)))
    return HardyLittlewoodResult(lhs=lhs, rhs=rhs, gap=rhs - lhs, g_symmetry_gap=sym)


@dataclass(frozen=True)
class PolyaSzegoResult:
    energy_u: float
    energy_ustar: float
    gap: float                # energy_u - energy_ustar, >= -disc allowance


def polya_szego_check(u, F):
    """Anisotropic Dirichlet energies of u and u_star, and their gap.

    The grid energy uses forward differences; the symmetrized energy goes
    through the radial profile, where piecewise-linear slopes integrate in
    closed form.
    """
    if not np.any(u.values > 0.0):
        return PolyaSzegoResult(0.0, 0.0, 0.0)
    e_u = grid_dirichlet_energy(u, F)
    ustar = convex_symmetrization(u, F)
    prof = profile_of(ustar, F)
    e_star = dirichlet_energy_radial(prof, F)
    return PolyaSzegoResult(energy_u=e_u, energy_ustar=e_star, gap=e_u - e_star)


def equimeasurability_gaps(u, ustar, qs):
    """Relative gaps |  ||u||_q - ||u*||_q | / ||u||_q for each q."""
    out = {}
    for q in qs:
        a = grid_lq_norm(u, q)
        b = grid_lq_norm(ustar, q)
        out[float(q)] = abs(a - b) / max(a, 1e-300)
    return out
