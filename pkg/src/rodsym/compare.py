"""End-to-end audits of the three comparison principles.

Each audit solves the problem twice, once with the given source and once with
its rearrangement, and measures every margin the corresponding theorem
promises to be nonnegative: star-function domination, convex test means,
Lebesgue norms, and (where the normalization allows) max/min/oscillation.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CompatibilityError, ParameterError, PreconditionError
from .piecewise import (
    Interval,
    StepFunction,
    extrema,
    integrate_product,
    lp_norm,
    poly_add,
    poly_sub,
    sup_norm_diff,
)
from .rearrange import (
    StarCurve,
    convex_means_check,
    decreasing_rearrangement,
    poly_sym_decreasing_values,
    symmetric_decreasing_rearrangement,
)
from .solver import FULL, HALF, PI, dirichlet_solve, neumann_solve, robin_solve

#: margins measured through sampled star curves
TOL_STAR = 1e-6
#: margins with an exact integration path
TOL_LP = 1e-9
TOL_EXTREMA = 1e-9
#: convex-means and pointwise-rearrangement margins
TOL_CONVEX = 1e-6
TOL_POINTWISE = 1e-6
#: samples per solution when building its star curve
STAR_SAMPLES = 100_000
#: grid for the pointwise rearranged-solution bound
POINTWISE_GRID = 1001

TOLERANCES = {
    "star": TOL_STAR,
    "lp": TOL_LP,
    "convex": TOL_CONVEX,
    "extrema": TOL_EXTREMA,
    "pointwise": TOL_POINTWISE,
}


@dataclass
class ComparisonReport:
    theorem: str
    alpha: float | None
    star_margin: float
    lp_margins: dict
    convex_margin: float
    convex_family: str
    extrema_margins: tuple | None
    pointwise_margin: float | None
    passed: bool
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))

    def to_dict(self):
        return asdict(self)


def _solution_star_margin(u, v, n=STAR_SAMPLES):
    """min over t of v_star(t) - u_star(t), via a shared sampling grid.

    Both solutions are shifted by the same constant before prefix-summing;
    the margin is invariant under common shifts and the shift keeps the
    partial sums well conditioned when the solutions ride a large constant.
    """
    L = u.interval.length
    h = L / n
    xs = u.interval.lo + h * (np.arange(n) + 0.5)
    su = np.sort(u(xs))[::-1]
    sv = np.sort(v(xs))[::-1]
    shift = min(su[-1], sv[-1])
    diff = np.cumsum(sv - shift) - np.cumsum(su - shift)
    return float(min(0.0, diff.min() * h))


def solution_star_curve(u, n=STAR_SAMPLES):
    """Sampled star curve of a solution (kept for the public star pipeline)."""
    L = u.interval.length
    h = L / n
    xs = u.interval.lo + h * (np.arange(n) + 0.5)
    vals = np.sort(u(xs))[::-1]
    return StarCurve(np.linspace(0.0, L, n + 1), np.concatenate([[0.0], np.cumsum(vals) * h]))


def _lp_margins(u, v, nonneg):
    """‖v‖_p - ‖u‖_p for p in {1, 2, inf}, computed difference-first.

    Forming the difference polynomial before integrating avoids catastrophic
    cancellation when both solutions carry a large common constant.
    """
    diff = poly_sub(v, u)
    if nonneg:
        l1 = diff.integrate()
    else:
        l1 = lp_norm(v, 1) - lp_norm(u, 1)
    sq = integrate_product(diff, poly_add(u, v))
    denom = lp_norm(u, 2) + lp_norm(v, 2)
    l2 = sq / denom if denom > 0.0 else 0.0
    linf = lp_norm(v, math.inf) - lp_norm(u, math.inf)
    return {"1": float(l1), "2": float(l2), "inf": float(linf)}


def robin_compare(f, alpha):
    """Audit: symmetrizing a nonnegative source raises increasing convex means."""
    if np.any(f.values < 0.0):
        raise PreconditionError("robin comparison needs a nonnegative source")
    u = robin_solve(f, alpha)
    v = robin_solve(symmetric_decreasing_rearrangement(f), alpha)
    return _build_report("robin", _alpha_value(alpha), f, u, v, family="increasing_convex")


def dirichlet_compare(f):
    """Audit with frozen ends, plus the pointwise rearranged-solution bound."""
    if np.any(f.values < 0.0):
        raise PreconditionError("dirichlet comparison needs a nonnegative source")
    u = dirichlet_solve(f)
    v = dirichlet_solve(symmetric_decreasing_rearrangement(f))
    xs = np.linspace(-PI, PI, POINTWISE_GRID)
    pointwise = float(np.min(v(xs) - poly_sym_decreasing_values(u, xs)))
    return _build_report(
        "dirichlet", None, f, u, v, family="increasing_convex", pointwise=pointwise
    )


def neumann_compare(f):
    """Audit with insulated ends: zero-mean data, full convex family, extrema."""
    total = f.integrate()
    if abs(total) > 1e-10:
        raise CompatibilityError(f"neumann comparison needs zero-mean data, got {total:g}")
    u = neumann_solve(f)
    v = neumann_solve(decreasing_rearrangement(f))
    size = f.interval.length
    for w, name in ((u, "u"), (v, "v")):
        mean = w.integrate() / size
        if abs(mean) > 1e-10:
            raise PreconditionError(f"solution {name} lost its zero mean: {mean:g}")
    mn_u, _, mx_u, _ = extrema(u)
    mn_v, _, mx_v, _ = extrema(v)
    margins = (mx_v - mx_u, mn_u - mn_v, (mx_v - mn_v) - (mx_u - mn_u))
    return _build_report(
        "neumann", None, f, u, v, family="convex", extrema_margins=margins, nonneg=False
    )


def _alpha_value(alpha):
    return float(alpha.alpha) if hasattr(alpha, "alpha") else float(alpha)


def _build_report(theorem, alpha, f, u, v, family, extrema_margins=None,
                  pointwise=None, nonneg=True):
    star = _solution_star_margin(u, v)
    convex = convex_means_check(u, v, family=family, tol=TOL_CONVEX)
    lp = _lp_margins(u, v, nonneg=nonneg)
    passed = (
        star >= -TOL_STAR
        and convex.passed
        and all(m >= -TOL_LP for m in lp.values())
    )
    if extrema_margins is not None:
        passed = passed and all(m >= -TOL_EXTREMA for m in extrema_margins)
    if pointwise is not None:
        passed = passed and pointwise >= -TOL_POINTWISE
    return ComparisonReport(
        theorem=theorem,
        alpha=alpha,
        star_margin=star,
        lp_margins=lp,
        convex_margin=convex.min_margin,
        convex_family=family,
        extrema_margins=extrema_margins,
        pointwise_margin=pointwise,
        passed=passed,
    )


def robin_dirichlet_limit(f, alphas):
    """Sup-norm distances between the Robin solves and the frozen-end solve.

    Distances shrink as the exchange coefficient grows; the caller gets the
    raw sequence to assert monotonicity or fit a 1/alpha envelope.
    """
    if np.any(f.values < 0.0):
        raise PreconditionError("limit audit expects a nonnegative source")
    alphas = [float(a) for a in alphas]
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ParameterError("alphas must be strictly increasing")
    ud = dirichlet_solve(f)
    return [sup_norm_diff(robin_solve(f, a), ud) for a in alphas]


# ---------------------------------------------------------------------------
# random corpora

def random_step(rng, interval, kind="nonneg"):
    """Random step function: 1..12 interior breakpoints, values uniform in [0, 3].

    kind zero_mean recenters the values so the integral vanishes; kind signed
    draws values uniform in [-1.5, 1.5] without recentering.
    """
    interval = interval if isinstance(interval, Interval) else Interval(*interval)
    k = int(rng.integers(1, 13))
    inner = np.sort(rng.uniform(interval.lo, interval.hi, size=k))
    bp = np.concatenate([[interval.lo], inner, [interval.hi]])
    keep = np.concatenate([[True], np.diff(bp) > 1e-9])
    bp = bp[keep]
    if kind == "signed":
        vals = rng.uniform(-1.5, 1.5, size=len(bp) - 1)
    else:
        vals = rng.uniform(0.0, 3.0, size=len(bp) - 1)
    f = StepFunction(interval, bp, vals)
    if kind == "zero_mean":
        f = f.with_values(f.values - f.integrate() / interval.length)
    return f


def _instance_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def audit_instance(theorem, seed, index):
    """One audited random instance; returns a JSON-ready record."""
    rng = _instance_rng(seed, index)
    if theorem == "robin":
        f = random_step(rng, FULL, "nonneg")
        alpha = 10.0 * (1.0 - rng.random())
        report = robin_compare(f, alpha)
    elif theorem == "dirichlet":
        f = random_step(rng, FULL, "nonneg")
        report = dirichlet_compare(f)
    elif theorem == "neumann":
        f = random_step(rng, HALF, "zero_mean")
        report = neumann_compare(f)
    else:
        raise ParameterError(f"unknown theorem {theorem!r}")
    record = {"index": index, "seed": int(seed)}
    record.update(report.to_dict())
    record["source"] = f.to_dict()
    return record


def _audit_worker(args):
    return audit_instance(*args)


def run_audit(theorem, count, seed=0, threads=None):
    """Audit `count` random instances; deterministic in (theorem, count, seed).

    Instances are independent (per-index RNG streams), so the optional process
    pool changes nothing but wall time; results come back sorted by index.
    """
    if threads is None:
        threads = int(os.environ.get("RODSYM_THREADS", "1"))
    jobs = [(theorem, seed, i) for i in range(count)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_audit_worker, jobs, chunksize=16))
    else:
        records = [audit_instance(*job) for job in jobs]
    records.sort(key=lambda r: r["index"])
    return records
