"""Decreasing and symmetric-decreasing rearrangements, star functions, and the
rearrangement inequalities used by the comparison audits.

Rearranging a step function is exact bookkeeping: sort the pieces by value.
Rearranging a piecewise quadratic is done either by dense sampling (fast,
default for audits) or by exact level-set measures with bisection on the
level (used where a pointwise bound is asserted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PreconditionError
from .piecewise import (
    Interval,
    StepFunction,
    extrema,
    integrate_product,
    step_product,
)

#: default cell count for the brute-force star oracle
BRUTEFORCE_GRID = 1024
#: default outer-quadrature resolution for the convolution inequalities
CONVOLUTION_GRID = 4096
#: number of hinge thresholds in the convex-means test family
HINGE_COUNT = 64
#: default sample count when rearranging a piecewise polynomial
POLY_STAR_SAMPLES = 100_000


# ---------------------------------------------------------------------------
# rearrangements of step functions

def decreasing_rearrangement(f):
    """Pieces sorted by value, descending, on [0, |X|]; stable on ties."""
    order = np.argsort(-f.values, kind="stable")
    widths = f.widths[order]
    bp = np.concatenate([[0.0], np.cumsum(widths)])
    bp[-1] = f.interval.length
    return StepFunction(Interval(0.0, f.interval.length), bp, f.values[order])


def symmetric_decreasing_rearrangement(f):
    """Even, centered version of the decreasing rearrangement on [-|X|/2, |X|/2]."""
    fs = decreasing_rearrangement(f)
    t = fs.breakpoints
    half = f.interval.length / 2.0
    left = -t[1:][::-1] / 2.0
    right = t[1:] / 2.0
    bp = np.concatenate([left, right])
    bp[0], bp[-1] = -half, half
    vals = np.concatenate([fs.values[::-1], fs.values[1:]])
    return StepFunction(Interval(-half, half), bp, vals)


# ---------------------------------------------------------------------------
# star functions

class StarCurve:
    """Piecewise-linear curve t -> sup over sets of measure t of the integral."""

    __slots__ = ("nodes", "values")

    def __init__(self, nodes, values):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1 or len(nodes) < 2:
            raise ParameterError("star curve needs matching 1-d nodes and values")
        if nodes[0] != 0.0 or values[0] != 0.0:
            raise ParameterError("star curve must start at (0, 0)")
        if np.any(np.diff(nodes) <= 0):
            raise ParameterError("star curve nodes must be strictly increasing")
        nodes.setflags(write=False)
        values.setflags(write=False)
        self.nodes = nodes
        self.values = values

    @property
    def length(self):
        return float(self.nodes[-1])

    def __call__(self, t):
        ts = np.asarray(t, dtype=float)
        if np.any(ts < -1e-9) or np.any(ts > self.length + 1e-9):
            raise ParameterError("star curve evaluated outside [0, length]")
        out = np.interp(ts, self.nodes, self.values)
        return float(out) if np.isscalar(t) else out


def star_function(f):
    """Exact star curve: running integral of the decreasing rearrangement."""
    fs = decreasing_rearrangement(f)
    vals = np.concatenate([[0.0], np.cumsum(fs.values * fs.widths)])
    return StarCurve(fs.breakpoints, vals)


def star_function_bruteforce(f, t, n_grid=BRUTEFORCE_GRID):
    """Independent oracle: best sum of cell averages over sets of measure t.

    The domain is cut into n_grid equal cells; the floor(t/h) largest cell
    averages are taken plus a fractional share of the next one. Accurate to
    2 * sup|f| * h.
    """
    if n_grid < 16:
        raise ParameterError("need n_grid >= 16")
    L = f.interval.length
    if t < -1e-12 or t > L + 1e-12:
        raise ParameterError(f"t={t} outside [0, {L}]")
    t = min(max(t, 0.0), L)
    h = L / n_grid
    edges = np.linspace(f.interval.lo, f.interval.hi, n_grid + 1)
    prefix = np.concatenate([[0.0], np.cumsum(f.values * f.widths)])
    cums = np.interp(edges, f.breakpoints, prefix)
    avgs = np.sort((cums[1:] - cums[:-1]) / h)[::-1]
    k = min(int(t / h), n_grid)
    frac = t / h - k
    out = h * float(avgs[:k].sum())
    if k < n_grid:
        out += frac * h * float(avgs[k])
    return out


def star_margin(a, b):
    """min over the union of node sets of b(t) - a(t)."""
    if abs(a.length - b.length) > 1e-9 * max(1.0, a.length):
        raise ParameterError("star curves have different lengths")
    ts = np.union1d(a.nodes, b.nodes)
    return float(np.min(b(ts) - a(ts)))


def star_dominates(a, b, tol=0.0):
    """True iff a <= b + tol at every node of either curve."""
    return star_margin(a, b) >= -tol


# ---------------------------------------------------------------------------
# exact level-set machinery for piecewise quadratics

def _quad_roots(c0, c1, c2, levels):
    """Sorted roots of c0 - s + c1 x + c2 x^2 per level, cancellation-free.

    The small root comes from the conjugate form so a near-degenerate leading
    coefficient still produces the accurate quasi-linear root; the far root
    may overflow to +-inf, which downstream clipping treats as off-piece.
    """
    disc = c1 * c1 - 4.0 * c2 * (c0 - levels)
    sq = np.sqrt(np.maximum(disc, 0.0))
    sign = 1.0 if c1 >= 0.0 else -1.0
    qq = -0.5 * (c1 + sign * sq)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r1 = qq / c2
        r2 = np.where(qq != 0.0, (c0 - levels) / np.where(qq != 0.0, qq, 1.0), np.inf)
    return disc, np.minimum(r1, r2), np.maximum(r1, r2)


def _measure_above(p, levels):
    """|{x : p(x) > s}| for a vector of levels, exact per quadratic piece."""
    levels = np.asarray(levels, dtype=float)
    out = np.zeros_like(levels)
    bp = p.breakpoints
    for i in range(len(p.coeffs)):
        a, b = bp[i], bp[i + 1]
        c0, c1, c2 = (float(c) for c in p.coeffs[i])
        if c2 == 0.0 and c1 == 0.0:
            out += np.where(c0 > levels, b - a, 0.0)
        elif c2 == 0.0:
            r = (levels - c0) / c1
            if c1 > 0.0:
                out += np.clip(b - np.maximum(r, a), 0.0, b - a)
            else:
                out += np.clip(np.minimum(r, b) - a, 0.0, b - a)
        else:
            disc, lo_r, hi_r = _quad_roots(c0, c1, c2, levels)
            inside = np.clip(np.minimum(hi_r, b) - np.maximum(lo_r, a), 0.0, b - a)
            if c2 > 0.0:
                out += (b - a) - np.where(disc > 0.0, inside, 0.0)
            else:
                out += np.where(disc > 0.0, inside, 0.0)
    return out


def _integral_above(p, levels):
    """Integral of p over {p > s} for a vector of levels, exact."""
    levels = np.asarray(levels, dtype=float)
    out = np.zeros_like(levels)
    bp = p.breakpoints

    for i in range(len(p.coeffs)):
        a, b = bp[i], bp[i + 1]
        c0, c1, c2 = (float(c) for c in p.coeffs[i])

        def seg(x1, x2):
            x1 = np.clip(x1, a, b)
            x2 = np.clip(x2, a, b)
            x2 = np.maximum(x1, x2)
            return (
                c0 * (x2 - x1)
                + c1 * (x2**2 - x1**2) / 2.0
                + c2 * (x2**3 - x1**3) / 3.0
            )

        full = seg(np.full_like(levels, a), np.full_like(levels, b))
        if c2 == 0.0 and c1 == 0.0:
            out += np.where(c0 > levels, full, 0.0)
        elif c2 == 0.0:
            r = (levels - c0) / c1
            out += seg(r, np.full_like(levels, b)) if c1 > 0.0 else seg(np.full_like(levels, a), r)
        else:
            disc, lo_r, hi_r = _quad_roots(c0, c1, c2, levels)
            if c2 > 0.0:
                outside = seg(np.full_like(levels, a), lo_r) + seg(hi_r, np.full_like(levels, b))
                out += np.where(disc > 0.0, outside, full)
            else:
                out += np.where(disc > 0.0, seg(lo_r, hi_r), 0.0)
    return out


def poly_decreasing_values(p, ts, iters=60):
    """Decreasing rearrangement of a piecewise quadratic, evaluated at measures ts.

    Bisection on the exact level-set measure; returns the smallest level s with
    |{p > s}| <= t, which is the right-continuous rearrangement value.
    """
    ts = np.asarray(ts, dtype=float)
    mn, _, mx, _ = extrema(p)
    lo = np.full(ts.shape, mn)
    hi = np.full(ts.shape, mx)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        small = _measure_above(p, mid) <= ts
        hi = np.where(small, mid, hi)
        lo = np.where(small, lo, mid)
    return 0.5 * (lo + hi)


def poly_sym_decreasing_values(p, xs):
    """Symmetric decreasing rearrangement of p evaluated at points xs."""
    xs = np.asarray(xs, dtype=float)
    ts = np.clip(2.0 * np.abs(xs), 0.0, p.interval.length)
    return poly_decreasing_values(p, ts)


def poly_star_curve(p, n=POLY_STAR_SAMPLES, method="sampling"):
    """Star curve of a piecewise quadratic.

    sampling: evaluate at n cell midpoints, sort descending, prefix-sum
    (error is O(osc * |X| / n)). levelset: exact star values on a uniform
    node grid via level-set measures and integrals.
    """
    L = p.interval.length
    if method == "sampling":
        h = L / n
        xs = p.interval.lo + h * (np.arange(n) + 0.5)
        vals = np.sort(p(xs))[::-1]
        star = np.concatenate([[0.0], np.cumsum(vals) * h])
        return StarCurve(np.linspace(0.0, L, n + 1), star)
    if method == "levelset":
        ts = np.linspace(0.0, L, n + 1)
        s = poly_decreasing_values(p, ts)
        lam = _measure_above(p, s)
        vals = _integral_above(p, s) + s * (ts - lam)
        vals[0] = 0.0
        return StarCurve(ts, vals)
    raise ParameterError(f"unknown star method {method!r}")


# ---------------------------------------------------------------------------
# convex means

@dataclass
class ConvexMeansResult:
    family: str
    min_margin: float
    worst_phi: str
    mean_u: float
    mean_v: float
    passed: bool


def _hinge_integrals(p, cs):
    """Exact integral of max(p - c, 0) for a vector of thresholds c."""
    return _integral_above(p, cs) - cs * _measure_above(p, cs)


def convex_means_check(u, v, family="increasing_convex", tol=1e-6):
    """Verify that every test function in the family has larger mean under v.

    The family is 64 hinge functions with thresholds spanning the joint range,
    plus the identity, plus the square for the plain convex family (which
    requires the means of u and v to agree within tol).
    """
    if family not in ("increasing_convex", "convex"):
        raise ParameterError(f"unknown family {family!r}")
    if not u.interval.same(v.interval):
        raise ParameterError("convex means need matching domains")
    size = u.interval.length
    mean_u = u.integrate() / size
    mean_v = v.integrate() / size
    if family == "convex" and abs(mean_u - mean_v) > tol:
        raise PreconditionError(
            f"convex family needs equal means, got {mean_u:g} vs {mean_v:g}"
        )
    mn_u, _, mx_u, _ = extrema(u)
    mn_v, _, mx_v, _ = extrema(v)
    lo, hi = min(mn_u, mn_v), max(mx_u, mx_v)
    if hi - lo < 1e-15:
        hi = lo + 1.0
    cs = np.linspace(lo, hi, HINGE_COUNT)
    margins = _hinge_integrals(v, cs) - _hinge_integrals(u, cs)
    idx = int(np.argmin(margins))
    min_margin = float(margins[idx])
    worst = f"hinge(c={cs[idx]:.6g})"
    id_margin = (mean_v - mean_u) * size
    if id_margin < min_margin:
        min_margin, worst = id_margin, "identity"
    if family == "convex":
        sq_margin = integrate_product(v, v) - integrate_product(u, u)
        if sq_margin < min_margin:
            min_margin, worst = sq_margin, "square"
    return ConvexMeansResult(
        family=family,
        min_margin=float(min_margin),
        worst_phi=worst,
        mean_u=float(mean_u),
        mean_v=float(mean_v),
        passed=min_margin >= -tol,
    )


# ---------------------------------------------------------------------------
# rearrangement inequalities

@dataclass
class InequalityCheck:
    name: str
    lhs: float
    rhs: float
    tol: float
    margin: float
    passed: bool


def _check(name, lhs, rhs, tol):
    return InequalityCheck(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        tol=float(tol),
        margin=float(rhs - lhs),
        passed=lhs <= rhs + tol,
    )


def hardy_littlewood_check(f, g, tol=1e-10):
    """Exact two-sided product integrals; symmetrization can only increase them."""
    if not f.interval.same(g.interval):
        raise ParameterError("hardy-littlewood needs matching domains")
    lhs = step_product(f, g).integrate()
    rhs = step_product(
        symmetric_decreasing_rearrangement(f),
        symmetric_decreasing_rearrangement(g),
    ).integrate()
    return _check("hardy_littlewood", lhs, rhs, tol)


def _zero_extended_cumulative(g):
    """Nodes and values of the running integral of g, constant outside its domain."""
    prefix = np.concatenate([[0.0], np.cumsum(g.values * g.widths)])
    return g.breakpoints, prefix


def _convolution_at(g, h, xs, shifts=(0.0,)):
    """conv(x) = integral of g(y) * h(x - y) dy, both extended by zero.

    Exact in y: for fixed x the kernel slice is a step function, so the inner
    integral telescopes through the running integral of g. `shifts` adds
    periodic copies of h.
    """
    nodes, cum = _zero_extended_cumulative(g)
    out = np.zeros_like(xs)
    for s in shifts:
        z = xs[:, None] - (h.breakpoints[None, :] + s)
        m = np.interp(z, nodes, cum)
        out += (h.values[None, :] * (m[:, :-1] - m[:, 1:])).sum(axis=1)
    return out


def _jump_total(f):
    """Sum of |jumps| of a step function, counting the drops to zero at the edges."""
    v = f.values
    return float(abs(v[0]) + np.abs(np.diff(v)).sum() + abs(v[-1]))


def _midpoint_eps(f, g, h, n_grid, n_shifts):
    """Conservative C/n bound on the outer midpoint error of one double integral.

    Midpoint is exact on cells where the integrand is linear; the losses are
    the cells hit by a jump of f (first term) or by a slope change of the
    convolution (second term).
    """
    width = f.interval.length
    dx = width / n_grid
    conv_bound = min(g.l1_norm() * h.sup_norm(), g.sup_norm() * h.l1_norm())
    jump_term = 0.5 * dx * _jump_total(f) * conv_bound
    lip = 2.0 * float(np.abs(h.values).sum()) * g.sup_norm()
    n_kinks = (len(g.values) + 1) * (len(h.values) + 1) * n_shifts
    kink_term = 0.25 * dx * dx * n_kinks * f.sup_norm() * lip
    return jump_term + kink_term


def _double_integral(f, g, h, n_grid, shifts):
    xs = f.interval.lo + (f.interval.length / n_grid) * (np.arange(n_grid) + 0.5)
    conv = _convolution_at(g, h, xs, shifts)
    return float(np.dot(f(xs), conv)) * (f.interval.length / n_grid)


def riesz_sobolev_check(f, g, h, n_grid=CONVOLUTION_GRID):
    """Convolution triple integral against its fully symmetrized counterpart.

    Nonnegative data extended by zero off their domains; inner integral exact,
    outer by composite midpoint with the reported C/n_grid slack.
    """
    for fn in (f, g, h):
        if np.any(fn.values < 0.0):
            raise PreconditionError("riesz-sobolev needs nonnegative data")
    lhs = _double_integral(f, g, h, n_grid, (0.0,))
    fs = symmetric_decreasing_rearrangement(f)
    gs = symmetric_decreasing_rearrangement(g)
    hs = symmetric_decreasing_rearrangement(h)
    rhs = _double_integral(fs, gs, hs, n_grid, (0.0,))
    eps = _midpoint_eps(f, g, h, n_grid, 1) + _midpoint_eps(fs, gs, hs, n_grid, 1)
    return _check("riesz_sobolev", lhs, rhs, eps)


def baernstein_check(f, g, h, n_grid=CONVOLUTION_GRID):
    """Periodic version of the convolution comparison on [-pi, pi].

    The kernel argument wraps modulo 2*pi, realized by summing three shifted
    zero-extended copies of h.
    """
    full = Interval(-math.pi, math.pi)
    for fn in (f, g, h):
        if not fn.interval.same(full):
            raise ParameterError("periodic check needs all functions on [-pi, pi]")
    period = 2.0 * math.pi
    shifts = (-period, 0.0, period)
    lhs = _double_integral(f, g, h, n_grid, shifts)
    fs = symmetric_decreasing_rearrangement(f)
    gs = symmetric_decreasing_rearrangement(g)
    hs = symmetric_decreasing_rearrangement(h)
    rhs = _double_integral(fs, gs, hs, n_grid, shifts)
    eps = _midpoint_eps(f, g, h, n_grid, 3) + _midpoint_eps(fs, gs, hs, n_grid, 3)
    return _check("baernstein", lhs, rhs, eps)
