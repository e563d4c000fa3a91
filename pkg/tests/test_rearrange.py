import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PI, random_step, step_functions
from rodsym.errors import ParameterError, PreconditionError
from rodsym.piecewise import (
    Interval,
    PiecewisePoly,
    StepFunction,
    step_constant,
    step_indicator,
)
from rodsym.rearrange import (
    StarCurve,
    baernstein_check,
    convex_means_check,
    decreasing_rearrangement,
    hardy_littlewood_check,
    poly_decreasing_values,
    poly_star_curve,
    riesz_sobolev_check,
    star_dominates,
    star_function,
    star_function_bruteforce,
    star_margin,
    symmetric_decreasing_rearrangement,
)


def thirds(values):
    return StepFunction(Interval(0, PI), [0, PI / 3, 2 * PI / 3, PI], values)


def chi_left():
    return step_indicator(Interval(-PI, PI), -PI, 0.0)


class TestDecreasingRearrangement:
    def test_sorts_values(self):
        fs = decreasing_rearrangement(thirds([1.0, 3.0, 2.0]))
        assert list(fs.values) == [3.0, 2.0, 1.0]
        assert np.allclose(fs.breakpoints, [0, PI / 3, 2 * PI / 3, PI])

    def test_decreasing_input_is_fixed_point(self):
        f = thirds([3.0, 2.0, 1.0])
        fs = decreasing_rearrangement(f)
        assert list(fs.values) == list(f.values)
        assert np.allclose(fs.breakpoints, f.breakpoints)

    def test_half_indicator(self):
        fs = decreasing_rearrangement(chi_left())
        assert list(fs.values) == [1.0, 0.0]
        assert np.allclose(fs.breakpoints, [0, PI, 2 * PI])

    @given(step_functions())
    def test_equimeasurable(self, f):
        fs = decreasing_rearrangement(f)
        fsym = symmetric_decreasing_rearrangement(f)
        for t in np.unique(f.values):
            m = f.widths[f.values > t].sum()
            ms = fs.widths[fs.values > t].sum()
            msym = fsym.widths[fsym.values > t].sum()
            assert ms == pytest.approx(m, abs=1e-12)
            assert msym == pytest.approx(m, abs=1e-12)


class TestSymmetricRearrangement:
    def test_half_mass_indicator_centers(self):
        fs = symmetric_decreasing_rearrangement(chi_left())
        assert np.allclose(fs.breakpoints, [-PI, -PI / 2, PI / 2, PI])
        assert list(fs.values) == [0.0, 1.0, 0.0]

    def test_constant_unchanged(self):
        f = step_constant(Interval(-PI, PI), 2.5)
        fs = symmetric_decreasing_rearrangement(f)
        assert list(fs.values) == [2.5]
        assert fs.interval.lo == -PI and fs.interval.hi == PI

    def test_halves_recenters(self):
        # by hand: value 1 occupies measure pi/2, so it sits on (-pi/4, pi/4)
        f = StepFunction(Interval(0, PI), [0, PI / 2, PI], [0.0, 1.0])
        fs = symmetric_decreasing_rearrangement(f)
        assert np.allclose(fs.breakpoints, [-PI / 2, -PI / 4, PI / 4, PI / 2])
        assert list(fs.values) == [0.0, 1.0, 0.0]

    @given(step_functions())
    def test_even(self, f):
        fs = symmetric_decreasing_rearrangement(f)
        xs = np.linspace(0.001, fs.interval.hi * 0.999, 50)
        assert np.allclose(fs(xs), fs(-xs))


class TestStarFunction:
    def test_three_steps(self):
        curve = star_function(thirds([3.0, 2.0, 1.0]))
        assert curve(PI / 3) == pytest.approx(PI, abs=1e-12)
        assert curve(2 * PI / 3) == pytest.approx(5 * PI / 3, abs=1e-12)
        assert curve(PI) == pytest.approx(2 * PI, abs=1e-12)

    def test_zero(self):
        curve = star_function(step_constant(Interval(-PI, PI), 0.0))
        assert curve(1.0) == 0.0

    def test_half_indicator_min_shape(self):
        curve = star_function(chi_left())
        for t in (0.3, 1.0, PI, 4.0, 2 * PI):
            assert curve(t) == pytest.approx(min(t, PI), abs=1e-12)

    @given(step_functions())
    def test_total_matches_integral(self, f):
        curve = star_function(f)
        assert curve(curve.length) == pytest.approx(f.integrate(), rel=1e-12, abs=1e-12)

    @given(step_functions())
    def test_concave(self, f):
        curve = star_function(f)
        slopes = np.diff(curve.values) / np.diff(curve.nodes)
        assert np.all(np.diff(slopes) <= 1e-12)


class TestBruteforceStar:
    def test_constant_exact(self):
        f = step_constant(Interval(0, PI), 2.0)
        for t in (0.0, 1.0, PI / 2, PI):
            assert star_function_bruteforce(f, t, 64) == pytest.approx(2.0 * t, abs=1e-12)

    def test_half_indicator_within_bound(self):
        f = chi_left()
        t = PI / 2
        approx = star_function_bruteforce(f, t, 1024)
        bound = 2.0 * 1.0 * (2 * PI) / 1024
        assert abs(approx - PI / 2) <= bound

    def test_zero_measure(self):
        assert star_function_bruteforce(chi_left(), 0.0, 64) == 0.0

    def test_rejects_bad_t_and_grid(self):
        with pytest.raises(ParameterError):
            star_function_bruteforce(chi_left(), -1.0, 64)
        with pytest.raises(ParameterError):
            star_function_bruteforce(chi_left(), 1.0, 8)

    @given(step_functions(), st.floats(min_value=0.0, max_value=1.0))
    def test_matches_exact_star(self, f, frac):
        t = frac * f.interval.length
        exact = star_function(f)(t)
        approx = star_function_bruteforce(f, t, 1024)
        bound = 2.0 * f.sup_norm() * f.interval.length / 1024 + 1e-12
        assert abs(approx - exact) <= bound


class TestStarDominates:
    def test_reflexive_at_zero_tol(self):
        a = star_function(thirds([1.0, 2.0, 3.0]))
        assert star_dominates(a, a, tol=0.0)

    def test_detects_violation(self):
        a = StarCurve([0, 1, 2], [0, 2.0, 2.0])
        b = StarCurve([0, 1, 2], [0, 1.0, 2.0])
        assert not star_dominates(a, b, tol=0.0)
        assert star_dominates(b, a, tol=0.0)

    def test_length_mismatch(self):
        a = StarCurve([0, 1], [0, 1])
        b = StarCurve([0, 2], [0, 1])
        with pytest.raises(ParameterError):
            star_dominates(a, b)

    @given(step_functions(nonneg=True))
    def test_implies_convex_means(self, f):
        """Star domination of the rearranged source transfers to convex means."""
        from rodsym.solver import robin_solve

        u = robin_solve(f, 1.0)
        v = robin_solve(symmetric_decreasing_rearrangement(f), 1.0)
        us = poly_star_curve(u, n=4000)
        vs = poly_star_curve(v, n=4000)
        if star_dominates(us, vs, tol=1e-6):
            res = convex_means_check(u, v, family="increasing_convex", tol=1e-6)
            assert res.passed


class TestPolyRearrangement:
    def test_levelset_matches_sampling(self):
        p = PiecewisePoly(Interval(0, 2), [0, 1, 2], [[0, 1, 0], [2, -1, 0]])
        fine = poly_star_curve(p, n=200_000, method="sampling")
        exact = poly_star_curve(p, n=64, method="levelset")
        assert abs(star_margin(fine, exact)) < 1e-4
        assert abs(star_margin(exact, fine)) < 1e-4

    def test_decreasing_values_of_tent(self):
        # tent 1 - |x| on [-1, 1]: measure above s is 2(1-s), so u*(t) = 1 - t/2
        p = PiecewisePoly(Interval(-1, 1), [-1, 0, 1], [[1, 1, 0], [1, -1, 0]])
        ts = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
        vals = poly_decreasing_values(p, ts)
        assert np.allclose(vals, 1.0 - ts / 2.0, atol=1e-10)


class TestConvexMeans:
    def test_equal_functions_pass_zero_tol(self):
        p = PiecewisePoly(Interval(0, 1), [0, 1], [[1, 2, 1]])
        res = convex_means_check(p, p, family="increasing_convex", tol=0.0)
        assert res.passed and res.min_margin == 0.0

    def test_shifted_up_fails(self):
        p = PiecewisePoly(Interval(0, 1), [0, 1], [[0, 1, 0]])
        q = PiecewisePoly(Interval(0, 1), [0, 1], [[1, 1, 0]])  # q = p + 1
        res = convex_means_check(q, p, family="increasing_convex", tol=1e-9)
        assert not res.passed

    def test_convex_family_requires_equal_means(self):
        p = PiecewisePoly(Interval(0, 1), [0, 1], [[0, 0, 0]])
        q = PiecewisePoly(Interval(0, 1), [0, 1], [[1, 0, 0]])
        with pytest.raises(PreconditionError):
            convex_means_check(p, q, family="convex", tol=1e-9)

    def test_unknown_family(self):
        p = PiecewisePoly(Interval(0, 1), [0, 1], [[0, 0, 0]])
        with pytest.raises(ParameterError):
            convex_means_check(p, p, family="concave")


class TestHardyLittlewood:
    def test_disjoint_indicators(self):
        f = chi_left()
        g = step_indicator(Interval(-PI, PI), 0.0, PI)
        res = hardy_littlewood_check(f, g)
        assert res.lhs == pytest.approx(0.0, abs=1e-14)
        assert res.rhs == pytest.approx(PI, abs=1e-12)
        assert res.passed

    def test_equal_inputs(self):
        f = thirds([1.0, -2.0, 0.5])
        res = hardy_littlewood_check(f, f)
        # rearranging preserves the square integral, so equality holds
        assert res.lhs == pytest.approx(res.rhs, abs=1e-12)

    def test_constant_is_equality(self):
        f = step_constant(Interval(-PI, PI), 2.0)
        g = thirds_full_domain = StepFunction(
            Interval(-PI, PI), [-PI, 0.0, PI], [1.0, -1.0]
        )
        res = hardy_littlewood_check(f, g)
        assert res.lhs == pytest.approx(res.rhs, abs=1e-12)

    def test_domain_mismatch(self):
        f = step_constant(Interval(-PI, PI), 1.0)
        g = step_constant(Interval(0, PI), 1.0)
        with pytest.raises(ParameterError):
            hardy_littlewood_check(f, g)

    def test_random_corpus(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            f = random_step(rng, -PI, PI, "signed")
            g = random_step(rng, -PI, PI, "signed")
            assert hardy_littlewood_check(f, g).passed


def brute_double_integral(f, g, h, n=1500):
    """Independent oracle: plain midpoint double sum over both variables."""
    lo = min(f.interval.lo, g.interval.lo + h.interval.lo)
    hi = max(f.interval.hi, g.interval.hi + h.interval.hi)

    def ext(fn, x):
        inside = (x >= fn.interval.lo) & (x <= fn.interval.hi)
        out = np.zeros_like(x)
        out[inside] = fn(x[inside])
        return out

    xs = f.interval.lo + (f.interval.length / n) * (np.arange(n) + 0.5)
    ys = g.interval.lo + (g.interval.length / n) * (np.arange(n) + 0.5)
    fx = f(xs)
    gy = g(ys)
    hz = ext(h, xs[:, None] - ys[None, :])
    return float(fx @ hz @ gy) * (f.interval.length / n) * (g.interval.length / n)


class TestRieszSobolev:
    def test_all_centered_is_equality(self):
        box = Interval(-0.5, 0.5)
        f = step_constant(box, 1.0)
        res = riesz_sobolev_check(f, f, f, n_grid=2048)
        assert res.lhs == pytest.approx(res.rhs, abs=1e-9)
        assert res.lhs == pytest.approx(0.75, abs=1e-3)

    def test_translated_boxes_equalize(self):
        # translating f and g leaves both sides equal; the margin is ~0, not strict
        unit = Interval(0.0, 1.0)
        f = step_constant(unit, 1.0)
        g = step_constant(unit, 1.0)
        h = step_constant(Interval(-0.5, 0.5), 1.0)
        res = riesz_sobolev_check(f, g, h, n_grid=2048)
        assert res.passed
        assert res.lhs == pytest.approx(res.rhs, abs=1e-6)
        assert res.lhs == pytest.approx(0.75, abs=1e-3)

    def test_split_source_is_strict(self):
        dom = Interval(-2.0, 2.0)
        f = StepFunction(dom, [-2, -1, 1, 2], [1.0, 0.0, 1.0])
        g = step_indicator(dom, -0.5, 0.5)
        h = step_indicator(dom, -0.5, 0.5)
        res = riesz_sobolev_check(f, g, h, n_grid=2048)
        assert res.passed
        assert res.rhs > res.lhs + 0.1
        # cross-check both sides against the independent dense oracle
        assert res.lhs == pytest.approx(brute_double_integral(f, g, h), abs=5e-3)
        fs = symmetric_decreasing_rearrangement(f)
        gs = symmetric_decreasing_rearrangement(g)
        hs = symmetric_decreasing_rearrangement(h)
        assert res.rhs == pytest.approx(brute_double_integral(fs, gs, hs), abs=5e-3)

    def test_zero_factor(self):
        dom = Interval(-1, 1)
        z = step_constant(dom, 0.0)
        f = step_constant(dom, 1.0)
        res = riesz_sobolev_check(z, f, f)
        assert res.lhs == 0.0 and res.rhs == 0.0

    def test_rejects_negative(self):
        dom = Interval(-1, 1)
        f = step_constant(dom, -1.0)
        g = step_constant(dom, 1.0)
        with pytest.raises(PreconditionError):
            riesz_sobolev_check(f, g, g)

    def test_random_corpus(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            f = random_step(rng, -PI, PI, "nonneg")
            g = random_step(rng, -PI, PI, "nonneg")
            h = random_step(rng, -PI, PI, "nonneg")
            assert riesz_sobolev_check(f, g, h, n_grid=2048).passed


def quadratic_kernel_steps(alpha, n_cells=64):
    """Step discretization (cell midpoint values) of the symmetric-decreasing
    kernel (c/4) z^2 - |z|/2 with c = alpha / (1 + alpha*pi)."""
    c = alpha / (1.0 + alpha * PI)
    edges = np.linspace(-PI, PI, n_cells + 1)
    mids = (edges[:-1] + edges[1:]) / 2.0
    vals = (c / 4.0) * mids**2 - np.abs(mids) / 2.0
    return StepFunction(Interval(-PI, PI), edges, vals)


class TestBaernstein:
    def test_symmetric_decreasing_inputs_equalize(self):
        f = step_indicator(Interval(-PI, PI), -1.0, 1.0)
        res = baernstein_check(f, f, f, n_grid=2048)
        assert res.lhs == pytest.approx(res.rhs, abs=res.tol)

    def test_half_sources_with_quadratic_kernel(self):
        f = chi_left()
        g = step_indicator(Interval(-PI, PI), 0.0, PI)
        h = quadratic_kernel_steps(1.0)
        res = baernstein_check(f, g, h, n_grid=2048)
        assert res.passed

    def test_constant_kernel_factorizes(self):
        rng = np.random.default_rng(3)
        f = random_step(rng, -PI, PI, "signed")
        g = random_step(rng, -PI, PI, "signed")
        h = step_constant(Interval(-PI, PI), 1.0)
        res = baernstein_check(f, g, h, n_grid=4096)
        expected = f.integrate() * g.integrate()
        assert res.lhs == pytest.approx(expected, abs=res.tol)
        assert res.rhs == pytest.approx(expected, abs=res.tol)

    def test_domain_mismatch(self):
        f = step_constant(Interval(-1, 1), 1.0)
        g = step_constant(Interval(-PI, PI), 1.0)
        with pytest.raises(ParameterError):
            baernstein_check(f, g, g)

    def test_random_corpus(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            f = random_step(rng, -PI, PI, "signed")
            g = random_step(rng, -PI, PI, "signed")
            h = random_step(rng, -PI, PI, "signed")
            assert baernstein_check(f, g, h, n_grid=2048).passed
