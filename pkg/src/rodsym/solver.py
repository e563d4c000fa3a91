"""Closed-form solvers for -u'' = f on an interval under Robin, Neumann, or
Dirichlet end conditions, plus an independent direct-integration oracle.

Robin and Dirichlet problems live on [-pi, pi] and are solved exactly through
their integral kernels written out as cumulative moments of the source; the
Neumann problem lives on [0, pi] and is solved by direct double integration
with the zero-mean normalization. Every solve audits its own boundary
residuals before returning.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson

from .errors import CompatibilityError, DomainError, InternalError, ParameterError
from .piecewise import (
    Interval,
    PiecewisePoly,
    cumulative_moments,
    poly_add,
    poly_add_const,
    poly_line,
    poly_mul_x,
    poly_scale,
)

PI = math.pi
FULL = Interval(-PI, PI)
HALF = Interval(0.0, PI)

#: absolute tolerance on the zero-mean compatibility requirement
COMPAT_TOL = 1e-10
#: boundary residuals must stay below RESIDUAL_TOL * (1 + l1 norm of the source)
RESIDUAL_TOL = 1e-10


class RobinParam:
    """Positive heat-exchange coefficient and its kernel constant."""

    __slots__ = ("alpha",)

    def __init__(self, alpha):
        alpha = float(alpha)
        if not alpha > 0.0:
            raise ParameterError(f"need alpha > 0, got {alpha}")
        self.alpha = alpha

    @property
    def c_alpha(self):
        return self.alpha / (1.0 + self.alpha * PI)

    def __repr__(self):
        return f"RobinParam({self.alpha!r})"


def _as_robin(alpha):
    return alpha if isinstance(alpha, RobinParam) else RobinParam(alpha)


class BoundaryCondition:
    """One of robin (with its parameter), neumann, or dirichlet."""

    __slots__ = ("kind", "alpha")

    def __init__(self, kind, alpha=None):
        if kind not in ("robin", "neumann", "dirichlet"):
            raise ParameterError(f"unknown boundary kind {kind!r}")
        if kind == "robin":
            if alpha is None:
                raise ParameterError("robin condition needs alpha")
            alpha = _as_robin(alpha)
        elif alpha is not None:
            raise ParameterError(f"{kind} condition takes no alpha")
        self.kind = kind
        self.alpha = alpha

    @classmethod
    def robin(cls, alpha):
        return cls("robin", alpha)

    @classmethod
    def neumann(cls):
        return cls("neumann")

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    def __repr__(self):
        return f"BoundaryCondition({self.kind!r}, {self.alpha!r})"


# ---------------------------------------------------------------------------
# kernels

def robin_green(x, y, alpha):
    """Integral kernel of the Robin problem on [-pi, pi]."""
    alpha = _as_robin(alpha)
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if np.any(np.abs(xs) > PI + 1e-12) or np.any(np.abs(ys) > PI + 1e-12):
        raise DomainError("kernel arguments must lie in [-pi, pi]")
    c = alpha.c_alpha
    # group x*y first so the kernel is symmetric to the last bit
    out = -(0.5 * c) * (xs * ys) - 0.5 * np.abs(xs - ys) + 0.5 / c
    return float(out) if np.isscalar(x) and np.isscalar(y) else out


def neumann_kernel(x):
    """Zero-mean periodic kernel whose second derivative is -1 off the lattice."""
    r = math.remainder(float(x), 2.0 * PI)
    return 0.5 * r * r - PI * abs(r) + PI * PI / 3.0


def kernel_fourier_check(n):
    """Fourier coefficient of the periodic kernel by composite quadrature.

    Simpson on each smooth half of the period, 4096 panels apiece; the result
    should be 1/n^2 for n != 0 and 0 for n = 0, within 1e-6.
    """
    n = int(n)
    if abs(n) > 64:
        raise ParameterError("coefficient index limited to |n| <= 64")
    total = 0.0
    for a, b in ((-PI, 0.0), (0.0, PI)):
        xs = np.linspace(a, b, 2 * 4096 + 1)
        ys = (0.5 * xs * xs - PI * np.abs(xs) + PI * PI / 3.0) * np.cos(n * xs)
        total += simpson(ys, x=xs)
    return total / (2.0 * PI)


# ---------------------------------------------------------------------------
# solvers

def _require_domain(f, interval, what):
    if not f.interval.same(interval, tol=1e-9):
        raise DomainError(
            f"{what} needs a source on [{interval.lo:g}, {interval.hi:g}], "
            f"got [{f.interval.lo:g}, {f.interval.hi:g}]"
        )


def _kernel_solve(f, c):
    """Exact solve through the kernel -(c/2) x y - |x - y|/2 + 1/(2c).

    u(x) = -(c/2) x M1(pi) - (1/2)[x (2 M0(x) - M0(pi)) - (2 M1(x) - M1(pi))]
           + M0(pi) / (2c), assembled from the cumulative moments of f.
    """
    m0, m1 = cumulative_moments(f)
    m0_pi = m0(f.interval.hi)
    m1_pi = m1(f.interval.hi)
    parts = poly_add(poly_scale(poly_mul_x(m0), -1.0), m1)
    line = poly_line(
        f.interval,
        m0_pi / (2.0 * c) - 0.5 * m1_pi,
        0.5 * m0_pi - 0.5 * c * m1_pi,
    )
    u = poly_add(parts, line)
    return PiecewisePoly(u.interval, u.breakpoints, u.coeffs, continuous=True)


def _audit(residuals, bound, what):
    worst = max(abs(r) for r in residuals)
    if worst > bound:
        raise InternalError(f"{what}: boundary residual {worst:g} exceeds {bound:g}")


def robin_solve(f, alpha):
    """Unique solution of -u'' = f with -u'(-pi) + a u(-pi) = u'(pi) + a u(pi) = 0."""
    alpha = _as_robin(alpha)
    _require_domain(f, FULL, "robin solve")
    u = _kernel_solve(f, alpha.c_alpha)
    du = u.derivative()
    bound = RESIDUAL_TOL * (1.0 + f.l1_norm())
    _audit(
        [-du(-PI) + alpha.alpha * u(-PI), du(PI) + alpha.alpha * u(PI)],
        bound,
        "robin solve",
    )
    return u


def dirichlet_solve(f):
    """Unique solution of -u'' = f vanishing at both ends of [-pi, pi]."""
    _require_domain(f, FULL, "dirichlet solve")
    u = _kernel_solve(f, 1.0 / PI)
    bound = RESIDUAL_TOL * (1.0 + f.l1_norm())
    _audit([u(-PI), u(PI)], bound, "dirichlet solve")
    return u


def neumann_solve(f):
    """Zero-mean solution of -u'' = f on [0, pi] with u'(0) = u'(pi) = 0.

    Requires compatible data (zero total integral); u' = -M0 starts flat at 0
    and ends flat at pi exactly because of compatibility.
    """
    _require_domain(f, HALF, "neumann solve")
    total = f.integrate()
    if abs(total) > COMPAT_TOL:
        raise CompatibilityError(
            f"neumann data must integrate to zero, got {total:g}"
        )
    m0, _ = cumulative_moments(f)
    w = m0.antiderivative()
    u0 = poly_scale(w, -1.0)
    u = poly_add_const(u0, -u0.integrate() / f.interval.length)
    du = u.derivative()
    bound = RESIDUAL_TOL * (1.0 + f.l1_norm())
    _audit([du(0.0), du(PI), u.integrate()], bound, "neumann solve")
    return u


def _periodic_kernel_integral(f, x):
    """Exact value at x of the periodic-kernel convolution of f.

    Splits each source piece at the kink (x - y = 0) and at the wrap points
    (x - y = +-pi); on each slice the kernel is a single quadratic in y.
    """
    two_pi = 2.0 * PI
    total = 0.0
    for i in range(len(f.values)):
        v = f.values[i]
        if v == 0.0:
            continue
        a, b = f.breakpoints[i], f.breakpoints[i + 1]
        cuts = sorted({a, b} | {p for p in (x - PI, x, x + PI) if a < p < b})
        for y1, y2 in zip(cuts[:-1], cuts[1:]):
            z = x - 0.5 * (y1 + y2)
            if z > PI:
                d, sgn = two_pi, 1.0
            elif z >= 0.0:
                d, sgn = 0.0, -1.0
            elif z >= -PI:
                d, sgn = 0.0, 1.0
            else:
                d, sgn = -two_pi, -1.0
            # antiderivative in y of K(x - y - d); w = x - d - y
            w1, w2 = x - d - y1, x - d - y2

            def anti(w):
                return -(w**3 / 6.0 + sgn * PI * w * w / 2.0 + PI * PI * w / 3.0)

            total += v * (anti(w2) - anti(w1))
    return total / two_pi


def neumann_convolution_solve(f):
    """Periodic-kernel convolution solution on [-pi, pi] for zero-mean data.

    Values come from exact kernel integrals; each piece of the result is the
    quadratic through three such values, so the construction never touches the
    direct-integration path. Self-audits the end slopes and the zero mean.
    """
    _require_domain(f, FULL, "convolution solve")
    total = f.integrate()
    if abs(total) > COMPAT_TOL:
        raise CompatibilityError(
            f"convolution data must integrate to zero, got {total:g}"
        )
    bp = f.breakpoints
    coeffs = []
    cache = {float(x): _periodic_kernel_integral(f, float(x)) for x in bp}
    for i in range(len(bp) - 1):
        x0, x2 = float(bp[i]), float(bp[i + 1])
        x1 = 0.5 * (x0 + x2)
        u0, u2 = cache[x0], cache[x2]
        u1 = _periodic_kernel_integral(f, x1)
        s01 = (u1 - u0) / (x1 - x0)
        s12 = (u2 - u1) / (x2 - x1)
        c2 = (s12 - s01) / (x2 - x0)
        c1 = s01 - c2 * (x0 + x1)
        c0 = u0 - x0 * (c1 + c2 * x0)
        coeffs.append([c0, c1, c2])
    u = PiecewisePoly(FULL, bp, coeffs, continuous=True)
    _, m1 = cumulative_moments(f)
    end_slope = -m1(PI) / (2.0 * PI)
    du = u.derivative()
    bound = 1e-9 * (1.0 + f.l1_norm())
    _audit(
        [du(-PI) - end_slope, du(PI) - end_slope, u.integrate()],
        bound,
        "convolution solve",
    )
    return u


def direct_integration_oracle(f, bc):
    """Independent solve: double antiderivative plus an affine correction.

    u = -W + c x + d with W the second antiderivative of f; (c, d) come from a
    2x2 linear solve against the boundary conditions (or the zero-mean
    normalization for the Neumann case). Shares nothing with the kernel path.
    """
    if not isinstance(bc, BoundaryCondition):
        raise ParameterError("expected a BoundaryCondition")
    m0, _ = cumulative_moments(f)
    w = m0.antiderivative()
    lo, hi = f.interval.lo, f.interval.hi
    if bc.kind == "neumann":
        total = f.integrate()
        if abs(total) > COMPAT_TOL:
            raise CompatibilityError(
                f"neumann data must integrate to zero, got {total:g}"
            )
        u0 = poly_scale(w, -1.0)
        return poly_add_const(u0, -u0.integrate() / f.interval.length)
    if bc.kind == "dirichlet":
        _require_domain(f, FULL, "dirichlet oracle")
        # u(lo) = c*lo + d = 0 and u(hi) = -W(hi) + c*hi + d = 0
        c = w(hi) / (hi - lo)
        d = -c * lo
    else:
        _require_domain(f, FULL, "robin oracle")
        a = bc.alpha.alpha
        # rows: -u'(-pi) + a u(-pi) = 0 and u'(pi) + a u(pi) = 0
        mat = np.array([[-1.0 - a * PI, a], [1.0 + a * PI, a]])
        rhs = np.array([0.0, m0(PI) + a * w(PI)])
        det = np.linalg.det(mat)
        if abs(det) < 1e-14:
            raise InternalError("singular boundary system for positive alpha")
        c, d = np.linalg.solve(mat, rhs)
    u0 = poly_scale(w, -1.0)
    line = poly_line(f.interval, float(d), float(c))
    u = poly_add(u0, line)
    return PiecewisePoly(u.interval, u.breakpoints, u.coeffs, continuous=True)
