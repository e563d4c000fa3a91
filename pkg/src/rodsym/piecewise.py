"""Exact piecewise-constant and piecewise-quadratic functions on a closed interval.

Step functions carry the sources; integrating them once or twice produces
piecewise polynomials of degree at most two, which is all the degree the
solvers ever need. Everything here is closed-form arithmetic except the
general-exponent norm, which falls back on adaptive quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ParameterError

# breakpoints closer than this are fused so no zero-width piece survives
MERGE_TOL = 1e-12
# endpoint slack accepted when matching user-supplied coordinates
EDGE_TOL = 1e-9
# junction mismatch allowed on polys flagged continuous (scaled above unit size)
CONTINUITY_TOL = 1e-10


class Interval:
    """Closed interval [lo, hi] with lo < hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, x, slack=EDGE_TOL):
        return self.lo - slack <= x <= self.hi + slack

    def same(self, other, tol=EDGE_TOL):
        return abs(self.lo - other.lo) <= tol and abs(self.hi - other.hi) <= tol

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))


def _as_interval(obj):
    if isinstance(obj, Interval):
        return obj
    lo, hi = obj
    return Interval(lo, hi)


def _fuse(breakpoints, rows):
    """Drop zero-width pieces: breakpoints closer than MERGE_TOL are merged."""
    kb = [breakpoints[0]]
    kr = []
    for j in range(1, len(breakpoints)):
        if breakpoints[j] - kb[-1] < MERGE_TOL:
            kb[-1] = breakpoints[j]
            continue
        kb.append(breakpoints[j])
        kr.append(rows[j - 1])
    if not kr:
        raise DomainError("no pieces left after fusing breakpoints")
    return np.asarray(kb, dtype=float), kr


def _validated_breaks(interval, breakpoints, rows, what):
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or len(bp) < 2:
        raise ParameterError(f"{what}: need at least two breakpoints")
    if len(rows) != len(bp) - 1:
        raise ParameterError(f"{what}: got {len(rows)} pieces for {len(bp)} breakpoints")
    if np.any(np.diff(bp) <= 0):
        raise ParameterError(f"{what}: breakpoints must be strictly increasing")
    if abs(bp[0] - interval.lo) > EDGE_TOL or abs(bp[-1] - interval.hi) > EDGE_TOL:
        raise DomainError(f"{what}: breakpoints do not span the interval")
    bp, rows = _fuse(bp, rows)
    bp[0] = interval.lo
    bp[-1] = interval.hi
    bp.setflags(write=False)
    return bp, rows


def _locate(bp, xs):
    """Piece indices for xs: right piece at a breakpoint, left piece at hi."""
    idx = np.searchsorted(bp, xs, side="right") - 1
    return np.clip(idx, 0, len(bp) - 2)


class StepFunction:
    """Piecewise-constant function: values[i] on (breakpoints[i], breakpoints[i+1])."""

    __slots__ = ("interval", "breakpoints", "values")

    def __init__(self, interval, breakpoints, values):
        self.interval = _as_interval(interval)
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1:
            raise ParameterError("step values must be a flat sequence")
        bp, rows = _validated_breaks(self.interval, breakpoints, list(vals), "StepFunction")
        self.breakpoints = bp
        self.values = np.asarray(rows, dtype=float)
        self.values.setflags(write=False)

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if np.any(xs < self.interval.lo - EDGE_TOL) or np.any(xs > self.interval.hi + EDGE_TOL):
            raise DomainError("evaluation point outside the domain")
        out = self.values[_locate(self.breakpoints, xs)]
        return float(out) if np.isscalar(x) else out

    def integrate(self, a=None, b=None):
        """Exact integral over [a, b] (defaults to the whole domain)."""
        a = self.interval.lo if a is None else float(a)
        b = self.interval.hi if b is None else float(b)
        _check_subinterval(self.interval, a, b)
        a = min(max(a, self.interval.lo), self.interval.hi)
        b = min(max(b, self.interval.lo), self.interval.hi)
        over = np.minimum(self.breakpoints[1:], b) - np.maximum(self.breakpoints[:-1], a)
        return float(np.dot(self.values, np.clip(over, 0.0, None)))

    def l1_norm(self):
        return float(np.dot(np.abs(self.values), self.widths))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def with_values(self, values):
        return StepFunction(self.interval, self.breakpoints, values)

    def to_dict(self):
        return {
            "interval": [self.interval.lo, self.interval.hi],
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [float(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data["interval"], data["breakpoints"], data["values"])
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"bad step-function record: {exc}") from exc

    def __repr__(self):
        return f"StepFunction({self.interval!r}, pieces={len(self.values)})"


class PiecewisePoly:
    """Piecewise polynomial of degree <= 2; coeffs[i] = (c0, c1, c2) in global x."""

    __slots__ = ("interval", "breakpoints", "coeffs", "continuous")

    def __init__(self, interval, breakpoints, coeffs, continuous=False):
        self.interval = _as_interval(interval)
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ParameterError("coeffs must be (c0, c1, c2) triples")
        bp, rows = _validated_breaks(self.interval, breakpoints, list(arr), "PiecewisePoly")
        self.breakpoints = bp
        self.coeffs = np.asarray(rows, dtype=float)
        self.coeffs.setflags(write=False)
        self.continuous = bool(continuous)
        if self.continuous:
            self._check_continuity()

    def _check_continuity(self):
        for j in range(1, len(self.breakpoints) - 1):
            x = self.breakpoints[j]
            left = _horner(self.coeffs[j - 1], x)
            right = _horner(self.coeffs[j], x)
            tol = CONTINUITY_TOL * max(1.0, abs(left), abs(right))
            if abs(left - right) > tol:
                raise ParameterError(f"discontinuity {left - right:g} at x={x:g}")

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if np.any(xs < self.interval.lo - EDGE_TOL) or np.any(xs > self.interval.hi + EDGE_TOL):
            raise DomainError("evaluation point outside the domain")
        idx = _locate(self.breakpoints, xs)
        c = self.coeffs[idx]
        out = c[..., 0] + xs * (c[..., 1] + xs * c[..., 2])
        return float(out) if np.isscalar(x) else out

    def integrate(self, a=None, b=None):
        """Exact integral over [a, b] via the per-piece antiderivative."""
        a = self.interval.lo if a is None else float(a)
        b = self.interval.hi if b is None else float(b)
        _check_subinterval(self.interval, a, b)
        a = min(max(a, self.interval.lo), self.interval.hi)
        b = min(max(b, self.interval.lo), self.interval.hi)
        x1 = np.maximum(self.breakpoints[:-1], a)
        x2 = np.minimum(self.breakpoints[1:], b)
        x2 = np.maximum(x2, x1)
        c0, c1, c2 = self.coeffs[:, 0], self.coeffs[:, 1], self.coeffs[:, 2]
        parts = (
            c0 * (x2 - x1)
            + c1 * (x2**2 - x1**2) / 2.0
            + c2 * (x2**3 - x1**3) / 3.0
        )
        return float(parts.sum())

    def derivative(self):
        d = np.column_stack([self.coeffs[:, 1], 2.0 * self.coeffs[:, 2], np.zeros(len(self.coeffs))])
        return PiecewisePoly(self.interval, self.breakpoints, d)

    def antiderivative(self):
        """Antiderivative vanishing at lo; input must have degree <= 1."""
        if np.any(self.coeffs[:, 2] != 0.0):
            raise ParameterError("antiderivative of a quadratic would exceed degree 2")
        a = self.breakpoints[:-1]
        c0, c1 = self.coeffs[:, 0], self.coeffs[:, 1]
        piece_ints = c0 * np.diff(self.breakpoints) + c1 * (self.breakpoints[1:] ** 2 - a**2) / 2.0
        prefix = np.concatenate([[0.0], np.cumsum(piece_ints)])[:-1]
        g0 = prefix - (c0 * a + c1 * a**2 / 2.0)
        return PiecewisePoly(
            self.interval,
            self.breakpoints,
            np.column_stack([g0, c0, c1 / 2.0]),
            continuous=True,
        )

    def restrict(self, a, b):
        _check_subinterval(self.interval, a, b)
        a = min(max(a, self.interval.lo), self.interval.hi)
        b = min(max(b, self.interval.lo), self.interval.hi)
        inner = self.breakpoints[(self.breakpoints > a + MERGE_TOL) & (self.breakpoints < b - MERGE_TOL)]
        bp = np.concatenate([[a], inner, [b]])
        mids = (bp[:-1] + bp[1:]) / 2.0
        coeffs = self.coeffs[_locate(self.breakpoints, mids)]
        return PiecewisePoly(Interval(a, b), bp, coeffs, continuous=self.continuous)

    def to_dict(self):
        return {
            "interval": [self.interval.lo, self.interval.hi],
            "breakpoints": [float(b) for b in self.breakpoints],
            "coeffs": [[float(c) for c in row] for row in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data["interval"], data["breakpoints"], data["coeffs"])
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"bad piecewise-poly record: {exc}") from exc

    def __repr__(self):
        return f"PiecewisePoly({self.interval!r}, pieces={len(self.coeffs)})"


def _horner(c, x):
    return c[0] + x * (c[1] + x * c[2])


def _check_subinterval(interval, a, b):
    if a > b:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    if a < interval.lo - EDGE_TOL or b > interval.hi + EDGE_TOL:
        raise DomainError(f"[{a}, {b}] not contained in [{interval.lo}, {interval.hi}]")


# ---------------------------------------------------------------------------
# constructors

def step_constant(interval, value):
    interval = _as_interval(interval)
    return StepFunction(interval, [interval.lo, interval.hi], [value])


def step_indicator(interval, lo, hi, value=1.0):
    """Indicator of [lo, hi] inside the interval, scaled by `value`."""
    interval = _as_interval(interval)
    lo = max(float(lo), interval.lo)
    hi = min(float(hi), interval.hi)
    if not lo < hi:
        raise ParameterError("indicator support is empty")
    bp = [interval.lo, lo, hi, interval.hi]
    vals = [0.0, value, 0.0]
    keep_b = [bp[0]]
    keep_v = []
    for j in range(1, 4):
        if bp[j] - keep_b[-1] < MERGE_TOL:
            keep_b[-1] = bp[j]
            continue
        keep_b.append(bp[j])
        keep_v.append(vals[j - 1])
    keep_b[0], keep_b[-1] = interval.lo, interval.hi
    return StepFunction(interval, keep_b, keep_v)


def reflect_even(f):
    """Even reflection of a step function on [0, L] to [-L, L]."""
    if abs(f.interval.lo) > EDGE_TOL:
        raise ParameterError("even reflection expects a domain starting at 0")
    L = f.interval.hi
    bp = np.concatenate([-f.breakpoints[::-1][:-1], f.breakpoints])
    vals = np.concatenate([f.values[::-1], f.values])
    return StepFunction(Interval(-L, L), bp, vals)


# ---------------------------------------------------------------------------
# step-function algebra

def step_product(f, g):
    """Pointwise product; exact because both factors are constant per merged piece."""
    if not f.interval.same(g.interval, tol=MERGE_TOL * 10):
        raise ParameterError("step product needs matching domains")
    bp = merge_breakpoints(f.breakpoints, g.breakpoints)
    mids = (bp[:-1] + bp[1:]) / 2.0
    vals = f.values[_locate(f.breakpoints, mids)] * g.values[_locate(g.breakpoints, mids)]
    return StepFunction(f.interval, bp, vals)


def merge_breakpoints(bp1, bp2):
    merged = np.union1d(bp1, bp2)
    keep = [merged[0]]
    for x in merged[1:]:
        if x - keep[-1] >= MERGE_TOL:
            keep.append(x)
        else:
            keep[-1] = max(keep[-1], x)
    return np.asarray(keep)


# ---------------------------------------------------------------------------
# poly algebra

def _poly_on_union(p, q):
    bp = merge_breakpoints(p.breakpoints, q.breakpoints)
    mids = (bp[:-1] + bp[1:]) / 2.0
    cp = p.coeffs[_locate(p.breakpoints, mids)]
    cq = q.coeffs[_locate(q.breakpoints, mids)]
    return bp, cp, cq


def poly_add(p, q):
    if not p.interval.same(q.interval, tol=MERGE_TOL * 10):
        raise ParameterError("poly addition needs matching domains")
    bp, cp, cq = _poly_on_union(p, q)
    return PiecewisePoly(p.interval, bp, cp + cq, continuous=p.continuous and q.continuous)


def poly_sub(p, q):
    return poly_add(p, poly_scale(q, -1.0))


def poly_scale(p, k):
    return PiecewisePoly(p.interval, p.breakpoints, p.coeffs * float(k), continuous=p.continuous)


def poly_add_const(p, c):
    coeffs = p.coeffs.copy()
    coeffs[:, 0] += float(c)
    return PiecewisePoly(p.interval, p.breakpoints, coeffs, continuous=p.continuous)


def poly_line(interval, intercept, slope):
    interval = _as_interval(interval)
    return PiecewisePoly(
        interval,
        [interval.lo, interval.hi],
        [[float(intercept), float(slope), 0.0]],
        continuous=True,
    )


def poly_mul_x(p):
    """Multiply by the coordinate; input must have degree <= 1."""
    if np.any(p.coeffs[:, 2] != 0.0):
        raise ParameterError("x * quadratic would exceed degree 2")
    coeffs = np.column_stack([np.zeros(len(p.coeffs)), p.coeffs[:, 0], p.coeffs[:, 1]])
    return PiecewisePoly(p.interval, p.breakpoints, coeffs, continuous=False)


def integrate_product(p, q):
    """Exact integral of p*q over the common domain (degree-4 antiderivative)."""
    if not p.interval.same(q.interval, tol=MERGE_TOL * 10):
        raise ParameterError("product integral needs matching domains")
    bp, cp, cq = _poly_on_union(p, q)
    total = 0.0
    x1, x2 = bp[:-1], bp[1:]
    powers = [x2 ** (k + 1) - x1 ** (k + 1) for k in range(5)]
    for k in range(5):
        # coefficient of x^k in the product, per piece
        ek = np.zeros(len(x1))
        for i in range(max(0, k - 2), min(2, k) + 1):
            ek += cp[:, i] * cq[:, k - i]
        total += float(np.dot(ek, powers[k])) / (k + 1)
    return total


def sup_norm_diff(p, q):
    """Exact sup norm of p - q."""
    return lp_norm(poly_sub(p, q), math.inf)


# ---------------------------------------------------------------------------
# named operations

def cumulative_moments(f):
    """(M0, M1) with M0(x) = integral of f up to x and M1(x) = integral of y*f(y).

    Both are exact piecewise polynomials; M0 is linear per piece, M1 quadratic.
    """
    b = f.breakpoints
    v = f.values
    left = b[:-1]
    w = np.diff(b)
    prefix0 = np.concatenate([[0.0], np.cumsum(v * w)])[:-1]
    prefix1 = np.concatenate([[0.0], np.cumsum(v * (b[1:] ** 2 - left**2) / 2.0)])[:-1]
    m0 = np.column_stack([prefix0 - v * left, v, np.zeros_like(v)])
    m1 = np.column_stack([prefix1 - v * left**2 / 2.0, np.zeros_like(v), v / 2.0])
    return (
        PiecewisePoly(f.interval, b, m0, continuous=True),
        PiecewisePoly(f.interval, b, m1, continuous=True),
    )


def extrema(p):
    """Global (min, argmin, max, argmax) over the closed domain.

    Candidates are piece endpoints and interior critical points; ties go to the
    smallest argument.
    """
    best_min = math.inf
    best_max = -math.inf
    arg_min = arg_max = p.interval.lo
    for i in range(len(p.coeffs)):
        a, b = p.breakpoints[i], p.breakpoints[i + 1]
        c0, c1, c2 = (float(c) for c in p.coeffs[i])
        xs = [a]
        if c2 != 0.0:
            xc = -c1 / (2.0 * c2)  # may overflow to inf for tiny c2; then skipped
            if a < xc < b:
                xs.append(xc)
        xs.append(b)
        for x in xs:
            val = c0 + x * (c1 + x * c2)
            if val < best_min:
                best_min, arg_min = val, x
            if val > best_max:
                best_max, arg_max = val, x
    return best_min, arg_min, best_max, arg_max


def _piece_roots(c0, c1, c2, a, b):
    """Real roots of the piece polynomial strictly inside (a, b), sorted.

    Uses the cancellation-free quadratic formula so that a near-degenerate
    leading coefficient still yields the accurate quasi-linear root.
    """
    c0, c1, c2 = float(c0), float(c1), float(c2)
    roots = []
    if c2 == 0.0:
        if c1 != 0.0:
            roots.append(-c0 / c1)
    else:
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc > 0.0:
            qq = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1 if c1 != 0.0 else 1.0))
            roots.append(qq / c2)
            roots.append(c0 / qq)
        elif disc == 0.0:
            roots.append(-c1 / (2.0 * c2))
    return sorted(r for r in roots if a < r < b and math.isfinite(r))


def lp_norm(p, pexp):
    """L^p norm of a piecewise polynomial.

    Exact for pexp in {1, 2, inf}; other exponents integrate |p|^pexp by
    adaptive quadrature at relative tolerance 1e-9 after splitting pieces at
    sign changes.
    """
    if pexp != math.inf and pexp < 1:
        raise ParameterError(f"need pexp >= 1, got {pexp}")
    if pexp == math.inf:
        mn, _, mx, _ = extrema(p)
        return max(abs(mn), abs(mx))
    if pexp == 2:
        return math.sqrt(max(integrate_product(p, p), 0.0))
    total = 0.0
    for i in range(len(p.coeffs)):
        a, b = p.breakpoints[i], p.breakpoints[i + 1]
        c0, c1, c2 = p.coeffs[i]
        cuts = [a] + _piece_roots(c0, c1, c2, a, b) + [b]
        for x1, x2 in zip(cuts[:-1], cuts[1:]):
            seg = (
                c0 * (x2 - x1)
                + c1 * (x2**2 - x1**2) / 2.0
                + c2 * (x2**3 - x1**3) / 3.0
            )
            if pexp == 1:
                total += abs(seg)
            else:
                val, _ = quad(
                    lambda x: abs(c0 + x * (c1 + x * c2)) ** pexp,
                    x1,
                    x2,
                    epsrel=1e-9,
                    epsabs=1e-13,
                )
                total += val
    return total if pexp == 1 else total ** (1.0 / pexp)
