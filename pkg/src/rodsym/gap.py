"""Temperature-gap analysis for a length-pi source interval sliding along the
rod, and a combinatorial search over unions of cells for the open placement
question.

The closed-form gap, its derivatives, and the critical center are exact
algebra; the numeric path re-derives the same numbers from a full solve so
the two stay cross-checked. The cell search makes no optimality claim, it
only reports the best configuration it saw.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalError, ParameterError
from .piecewise import PiecewisePoly, StepFunction, extrema, step_indicator, sup_norm_diff
from .solver import FULL, PI, _as_robin, robin_solve

#: below this exchange coefficient the gap is maximized at the rod ends
ALPHA_INTERIOR = 2.0 / (math.sqrt(3.0) * math.pi)

#: default resolution of the center grid on [-pi/2, pi/2]
SCAN_GRID = 2001
#: agreement required between the numeric and closed-form gap
GAP_AGREE_TOL = 1e-8


def example_solutions(alpha):
    """Closed-form solutions for the half-rod source and its symmetrization.

    u solves the Robin problem with source 1 on [-pi, 0]; v solves it with the
    centered source 1 on [-pi/2, pi/2]. Both are cross-checked against the
    kernel solver before being returned.
    """
    alpha = _as_robin(alpha)
    c = alpha.c_alpha
    a1 = PI / 2.0 + PI * PI * c / 4.0
    b1 = PI / (2.0 * c) + PI * PI / 4.0
    u = PiecewisePoly(
        FULL,
        [-PI, 0.0, PI],
        [
            [b1 - PI * PI / 2.0, a1 - PI, -0.5],
            [b1 - PI * PI / 2.0, a1 - PI, 0.0],
        ],
        continuous=True,
    )
    d = PI / (2.0 * c)
    v = PiecewisePoly(
        FULL,
        [-PI, -PI / 2.0, PI / 2.0, PI],
        [
            [d, PI / 2.0, 0.0],
            [d - PI * PI / 8.0, 0.0, -0.5],
            [d, -PI / 2.0, 0.0],
        ],
        continuous=True,
    )
    tol = 1e-10
    if sup_norm_diff(u, robin_solve(step_indicator(FULL, -PI, 0.0), alpha)) > tol:
        raise InternalError("closed-form u disagrees with the kernel solve")
    if sup_norm_diff(v, robin_solve(step_indicator(FULL, -PI / 2.0, PI / 2.0), alpha)) > tol:
        raise InternalError("closed-form v disagrees with the kernel solve")
    return u, v


def _check_center(b):
    if abs(b) > PI / 2.0 + 1e-12:
        raise ParameterError(f"source center must lie in [-pi/2, pi/2], got {b}")


def gap_formula(alpha, b):
    """Closed-form temperature gap for the source interval centered at b.

    The algebraic branch is stated for centers in the left half; centers in
    the right half map onto it by the mirror symmetry of the problem.
    """
    alpha = _as_robin(alpha).alpha
    _check_center(b)
    bb = -abs(float(b))
    denom = 8.0 * (1.0 + alpha * PI) ** 2
    return -PI * (1.0 + alpha * (bb + PI)) * (-3.0 * PI * (1.0 + alpha * PI) + bb * (4.0 + 3.0 * alpha * PI)) / denom


def gap_derivatives(alpha, b):
    """(d/db, d2/db2) of the gap at center b.

    Computed on the left-half branch and mirrored (odd first derivative, even
    second) for positive centers; the second derivative is negative for every
    positive exchange coefficient, so the gap is strictly concave in b on
    either half.
    """
    alpha = _as_robin(alpha).alpha
    _check_center(b)
    bb = -abs(float(b))
    denom = 4.0 * (1.0 + alpha * PI) ** 2
    d1 = -PI * (2.0 + 2.0 * alpha * PI + alpha * bb * (4.0 + 3.0 * alpha * PI)) / denom
    d2 = -alpha * PI * (4.0 + 3.0 * alpha * PI) / denom
    if b > 0.0:
        d1 = -d1
    return d1, d2


def b_crit(alpha):
    """Interior maximizing center, or None in the boundary-maximizer regime."""
    alpha = _as_robin(alpha).alpha
    if alpha <= ALPHA_INTERIOR:
        return None
    return -2.0 * (1.0 + alpha * PI) / (alpha * (4.0 + 3.0 * alpha * PI))


def gap_numeric(alpha, b):
    """Gap from a full solve of the indicator source centered at b."""
    alpha = _as_robin(alpha)
    _check_center(b)
    f = step_indicator(FULL, b - PI / 2.0, b + PI / 2.0)
    mn, _, mx, _ = extrema(robin_solve(f, alpha))
    return mx - mn


@dataclass
class GapScanResult:
    alpha: float
    b_values: list
    gaps_numeric: list
    gaps_formula: list
    argmax_numeric: float
    b_crit_formula: float | None


def gap_scan(alpha, n_grid=SCAN_GRID):
    """Numeric and closed-form gaps over a uniform center grid.

    Raises if the two paths drift apart beyond GAP_AGREE_TOL anywhere.
    """
    alpha = _as_robin(alpha)
    if n_grid < 2:
        raise ParameterError("need at least two grid points")
    bs = np.linspace(-PI / 2.0, PI / 2.0, n_grid)
    nums = [gap_numeric(alpha, b) for b in bs]
    forms = [gap_formula(alpha, b) for b in bs]
    worst = max(abs(n - f) for n, f in zip(nums, forms))
    if worst > GAP_AGREE_TOL:
        raise InternalError(f"gap paths disagree by {worst:g}")
    return GapScanResult(
        alpha=alpha.alpha,
        b_values=[float(b) for b in bs],
        gaps_numeric=[float(g) for g in nums],
        gaps_formula=[float(g) for g in forms],
        argmax_numeric=float(bs[int(np.argmax(nums))]),
        b_crit_formula=b_crit(alpha),
    )


# ---------------------------------------------------------------------------
# cell search for the open placement question

@dataclass
class SearchResult:
    cells: tuple
    source: StepFunction
    gap: float
    n_cells: int
    exhaustive: bool


#: exhaustive enumeration is feasible up to this many cells
EXHAUSTIVE_LIMIT = 24
#: random restarts for the swap-ascent heuristic
HEURISTIC_STARTS = 64


def _cell_solutions(alpha, n_cells):
    """Per-cell solve coefficients on the shared edge grid (solves are linear in f)."""
    edges = np.linspace(-PI, PI, n_cells + 1)
    coeffs = np.empty((n_cells, n_cells, 3))
    for i in range(n_cells):
        vals = np.zeros(n_cells)
        vals[i] = 1.0
        u = robin_solve(StepFunction(FULL, edges, vals), alpha)
        coeffs[i] = u.coeffs
    return edges, coeffs


def _gaps_from_coeffs(batch, edges):
    """Vectorized max-minus-min for a batch of coefficient stacks."""
    a, b = edges[:-1], edges[1:]
    c0, c1, c2 = batch[..., 0], batch[..., 1], batch[..., 2]
    va = c0 + a * (c1 + a * c2)
    vb = c0 + b * (c1 + b * c2)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = np.where(c2 != 0.0, -c1 / (2.0 * np.where(c2 != 0.0, c2, 1.0)), a)
    xc = np.clip(xc, a, b)
    vc = c0 + xc * (c1 + xc * c2)
    vals = np.stack([va, vb, vc], axis=-1)
    return vals.max(axis=(-2, -1)) - vals.min(axis=(-2, -1))


def _contiguous_starts(n_cells, k):
    return [tuple(range(s, s + k)) for s in range(n_cells - k + 1)]


def extremal_search(alpha, n_cells, measure=PI, seed=0):
    """Best union of grid cells of total length `measure` for the gap.

    Exhaustive for small grids; otherwise steepest-ascent single-cell swaps
    from seeded random starts plus every contiguous run. Ties break toward the
    lexicographically smallest cell set. The result is a report of the best
    configuration found, not a claim of optimality.
    """
    alpha = _as_robin(alpha)
    if n_cells < 8 or n_cells % 2 != 0:
        raise ParameterError("need an even cell count of at least 8")
    width = 2.0 * PI / n_cells
    k_float = measure / width
    k = round(k_float)
    if abs(k_float - k) > 1e-9 or not 1 <= k <= n_cells:
        raise ParameterError("measure must be a whole number of cells")
    edges, coeffs = _cell_solutions(alpha, n_cells)

    def gap_of(cells):
        return float(_gaps_from_coeffs(coeffs[list(cells)].sum(axis=0), edges))

    exhaustive = n_cells <= EXHAUSTIVE_LIMIT
    best_cells, best_gap = None, -math.inf
    if exhaustive:
        for cells in itertools.combinations(range(n_cells), k):
            g = gap_of(cells)
            if g > best_gap + 1e-15 or (abs(g - best_gap) <= 1e-15 and cells < best_cells):
                best_cells, best_gap = cells, g
    else:
        rng = np.random.default_rng(seed)
        starts = _contiguous_starts(n_cells, k)
        starts += [tuple(sorted(rng.choice(n_cells, size=k, replace=False)))
                   for _ in range(HEURISTIC_STARTS)]
        for start in starts:
            current = tuple(sorted(start))
            g_cur = gap_of(current)
            improved = True
            while improved:
                improved = False
                in_set = set(current)
                base = coeffs[list(current)].sum(axis=0)
                swaps = [(i, j) for i in current for j in range(n_cells) if j not in in_set]
                batch = np.stack([base - coeffs[i] + coeffs[j] for i, j in swaps])
                gains = _gaps_from_coeffs(batch, edges)
                order = np.argsort(-gains, kind="stable")
                top = order[0]
                if gains[top] > g_cur + 1e-12:
                    ties = [swaps[t] for t in order if gains[t] >= gains[top] - 1e-15]
                    candidates = sorted(
                        tuple(sorted((set(current) - {i}) | {j})) for i, j in ties
                    )
                    current = candidates[0]
                    g_cur = gap_of(current)
                    improved = True
            if g_cur > best_gap + 1e-15 or (abs(g_cur - best_gap) <= 1e-15 and current < best_cells):
                best_cells, best_gap = current, g_cur

    vals = np.zeros(n_cells)
    vals[list(best_cells)] = 1.0
    source = StepFunction(FULL, edges, vals)
    return SearchResult(
        cells=tuple(int(c) for c in best_cells),
        source=source,
        gap=best_gap,
        n_cells=n_cells,
        exhaustive=exhaustive,
    )
