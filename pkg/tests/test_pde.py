import math

import numpy as np
import pytest
from scipy.integrate import quad

from ambiclt.closed_form import lower_indicator_limit, normal_cdf, upper_indicator_limit
from ambiclt.measures import interval
from ambiclt.pde import (
    GeneratorSpec,
    NotMonotone,
    OutOfDomain,
    PdeGrid,
    UnstableGrid,
    dpp_check,
    epsilon_extrapolate,
    monotone_reduction,
    solve_g_expectation,
    solve_g_expectation_profile,
)
from ambiclt.terminal import TerminalFunction

# coarse grid: keeps most tests fast, tight checks use the default grid
COARSE = PdeGrid(-8.0, 8.0, 801, 500)
EPS_SWEEP = [0.2, 0.1, 0.05, 0.025]


def gauss_integral(phi: TerminalFunction, mu: float) -> float:
    val, _ = quad(
        lambda t: phi(t) * math.exp(-0.5 * (t - mu) ** 2) / math.sqrt(2 * math.pi),
        mu - 12, mu + 12, points=sorted(phi.breakpoints()) or None, limit=200,
    )
    return val


class TestGeneratorSpec:
    def test_vanishes_at_zero_exactly(self):
        gen = GeneratorSpec(0.3, 0.05)
        assert gen.g(np.array([0.0]))[0] == 0.0

    def test_smoothing_gap_bounded(self):
        z = np.linspace(-5, 5, 101)
        kappa, eps = 0.4, 0.1
        sharp = GeneratorSpec(kappa, 0.0).g(z)
        smooth = GeneratorSpec(kappa, eps).g(z)
        gap = sharp - smooth
        assert np.all(gap >= -1e-15)
        assert np.all(gap <= kappa * eps + 1e-15)

    def test_negative_parameters_rejected(self):
        with pytest.raises(ValueError):
            GeneratorSpec(-0.1, 0.0)
        with pytest.raises(ValueError):
            GeneratorSpec(0.1, -0.5)


class TestGrid:
    def test_must_straddle_zero(self):
        with pytest.raises(ValueError):
            PdeGrid(0.5, 10.0, 101, 100)

    def test_default_shape(self):
        g = PdeGrid.default()
        assert (g.nx, g.nt) == (2001, 2000)
        assert g.x[0] == -10.0 and g.x[-1] == 10.0


class TestSolve:
    def test_constant_terminal_is_fixed_point(self):
        const = TerminalFunction.tabulated([2.5] * COARSE.nx)
        got = solve_g_expectation(const, GeneratorSpec(0.4, 0.05), COARSE, 0.0)
        assert got == pytest.approx(2.5, abs=1e-12)

    def test_heat_equation_matches_quadrature(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        got = solve_g_expectation(phi, GeneratorSpec(0.0, 0.05), COARSE, 0.0)
        assert got == pytest.approx(gauss_integral(phi, 0.0), abs=2e-3)

    def test_probe_point_off_grid_node(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        mid = solve_g_expectation(phi, GeneratorSpec(0.0, 0.05), COARSE, 0.005)
        lo = solve_g_expectation(phi, GeneratorSpec(0.0, 0.05), COARSE, 0.0)
        hi = solve_g_expectation(phi, GeneratorSpec(0.0, 0.05), COARSE, 0.02)
        assert min(lo, hi) - 1e-9 <= mid <= max(lo, hi) + 1e-9

    def test_out_of_domain(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        with pytest.raises(OutOfDomain):
            solve_g_expectation(phi, GeneratorSpec(0.0, 0.05), COARSE, 9.5)

    def test_unstable_grid_rejected(self):
        grid = PdeGrid(-8.0, 8.0, 801, 5)  # dt = 0.2, dx = 0.02
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        with pytest.raises(UnstableGrid):
            solve_g_expectation(phi, GeneratorSpec(2.0, 0.05), grid, 0.0)

    def test_sharp_indicator_is_mollified_automatically(self):
        sharp = TerminalFunction.indicator(-1, 1)
        smooth = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        gen = GeneratorSpec(0.3, 0.05)
        a = solve_g_expectation(sharp, gen, COARSE, 0.0)
        b = solve_g_expectation(smooth, gen, COARSE, 0.0)
        assert a == b


class TestAgainstClosedForm:
    def test_extrapolated_solution_matches_indicator_limit(self):
        kappa = 0.3
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        res = epsilon_extrapolate(phi, kappa, PdeGrid.default(), EPS_SWEEP)
        want = upper_indicator_limit(interval(-kappa, kappa), -1, 1)
        assert res.extrapolated == pytest.approx(want, abs=5e-3)

    def test_lower_formula_against_complement_solve(self):
        # the general lower-expectation formula is validated, not assumed:
        # lower[a,b] = 1 - upper value of the mollified complement
        grid = PdeGrid.default()
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.02)
        comp = TerminalFunction.tabulated(1.0 - phi.sample(grid.x))
        res = epsilon_extrapolate(comp, 0.3, grid, EPS_SWEEP)
        want = lower_indicator_limit(interval(-0.3, 0.3), -1, 1)
        assert 1.0 - res.extrapolated == pytest.approx(want, abs=5e-3)


class TestEpsExtrapolation:
    def test_zero_kappa_sequence_constant(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        res = epsilon_extrapolate(phi, 0.0, COARSE, EPS_SWEEP)
        assert len(set(res.values)) == 1
        assert res.extrapolated == res.values[0]

    def test_values_rise_as_eps_falls(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        res = epsilon_extrapolate(phi, 0.4, COARSE, EPS_SWEEP)
        assert all(b >= a - 1e-12 for a, b in zip(res.values, res.values[1:]))
        assert res.extrapolated >= res.values[-1] - 1e-12

    def test_sequence_must_decrease(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        with pytest.raises(ValueError):
            epsilon_extrapolate(phi, 0.3, COARSE, [0.1, 0.2])


class TestDppCheck:
    PROBES = [-1.5, -0.5, 0.0, 0.5, 1.5]

    def test_degenerate_split_is_bit_identical(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        disc = dpp_check(phi, GeneratorSpec(0.3, 0.05), COARSE, 1, 1, self.PROBES)
        assert disc == 0.0

    def test_heat_semigroup(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        disc = dpp_check(phi, GeneratorSpec(0.0, 0.05), PdeGrid.default(), 4, 2, self.PROBES)
        assert disc <= 1e-4

    def test_reference_case(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        disc = dpp_check(phi, GeneratorSpec(0.3, 0.05), PdeGrid.default(), 4, 2, self.PROBES)
        assert disc <= 5e-4

    def test_step_index_validated(self):
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        with pytest.raises(ValueError):
            dpp_check(phi, GeneratorSpec(0.3, 0.05), COARSE, 4, 0, self.PROBES)


class TestStructuralProperties:
    def test_comparison_ordering(self):
        gen = GeneratorSpec(0.3, 0.05)
        big = solve_g_expectation_profile(
            TerminalFunction.smoothed_indicator(-1, 1, 0.05), gen, COARSE
        )
        small = solve_g_expectation_profile(
            TerminalFunction.smoothed_indicator(-0.5, 0.5, 0.05), gen, COARSE
        )
        assert np.all(small <= big + 1e-10)

    def test_translation_homogeneity(self):
        gen = GeneratorSpec(0.3, 0.05)
        phi = TerminalFunction.smoothed_indicator(-1, 1, 0.05)
        base = solve_g_expectation_profile(phi, gen, COARSE)
        lifted = solve_g_expectation_profile(
            TerminalFunction.tabulated(phi.sample(COARSE.x) + 4.0), gen, COARSE
        )
        assert np.max(np.abs(lifted - base - 4.0)) <= 1e-11

    def test_symmetry_propagates(self):
        gen = GeneratorSpec(0.3, 0.05)
        prof = solve_g_expectation_profile(
            TerminalFunction.smoothed_indicator(-1, 1, 0.05), gen, COARSE
        )
        assert np.max(np.abs(prof - prof[::-1])) <= 1e-10

    def test_gradient_sign_propagates(self):
        gen = GeneratorSpec(0.3, 0.05)
        prof = solve_g_expectation_profile(
            TerminalFunction.smoothed_indicator(-1, 1, 0.05), gen, COARSE
        )
        g = np.gradient(prof, COARSE.x)
        bad = (np.sign(g) * np.sign(COARSE.x) > 0) & (np.abs(g) > 1e-12)
        assert not np.any(bad)

    def test_values_within_terminal_bounds(self):
        gen = GeneratorSpec(0.5, 0.05)
        prof = solve_g_expectation_profile(
            TerminalFunction.smoothed_indicator(-1, 1, 0.05), gen, COARSE
        )
        assert prof.min() >= -1e-9 and prof.max() <= 1.0 + 1e-9


class TestMonotoneReduction:
    def test_left_indicator(self):
        iv = interval(-0.3, 0.3)
        got = monotone_reduction(TerminalFunction.left(0.5), iv)
        assert got == pytest.approx(normal_cdf(-0.3, 0.5), abs=1e-9)

    def test_constant(self):
        const = TerminalFunction.smoothed_indicator(-math.inf, math.inf, 1.0)
        assert monotone_reduction(const, interval(-0.3, 0.3)) == pytest.approx(1.0)

    def test_two_sided_rejected(self):
        with pytest.raises(NotMonotone):
            monotone_reduction(
                TerminalFunction.smoothed_indicator(-1, 1, 0.05), interval(-0.3, 0.3)
            )

    def test_increasing_case_matches_solver(self):
        iv = interval(-0.3, 0.3)
        phi = TerminalFunction.smoothed_indicator(0.2, math.inf, 0.05)
        want = monotone_reduction(phi, iv)
        res = epsilon_extrapolate(phi, 0.3, PdeGrid.default(), EPS_SWEEP)
        assert res.extrapolated == pytest.approx(want, abs=5e-3)
