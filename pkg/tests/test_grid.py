import math

import numpy as np
import pytest

from isofokker.grid import (
    GridFunction,
    cumulative_integral,
    derivative,
    divide,
    integrate,
    interior_sign_changes,
    log_derivative,
    make_grid,
    read_csv_columns,
    sample,
    sup_diff,
    sup_norm,
    write_csv,
)


class TestMakeGrid:
    def test_three_point_nodes(self):
        g = make_grid(0.0, 1.0, 3)
        assert np.allclose(g.x, [0.0, 0.5, 1.0])

    def test_default_domain_spacing(self):
        g = make_grid(-12.0, 12.0, 2001)
        assert g.h == pytest.approx(0.012)

    def test_degenerate_domain_rejected(self):
        with pytest.raises(ValueError):
            make_grid(1.0, 1.0, 3)
        with pytest.raises(ValueError):
            make_grid(2.0, 1.0, 11)

    def test_even_node_count_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            make_grid(0.0, 1.0, 10)

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError):
            make_grid(0.0, 1.0, 1)


class TestIntegrate:
    def test_constant(self):
        g = make_grid(0.0, 1.0, 101)
        assert integrate(sample(g, lambda x: np.ones_like(x))) == pytest.approx(1.0, abs=1e-14)

    def test_linear(self):
        g = make_grid(0.0, 1.0, 101)
        assert integrate(sample(g, lambda x: x)) == pytest.approx(0.5, abs=1e-14)

    def test_cubic_exact(self):
        g = make_grid(-1.0, 2.0, 61)
        got = integrate(sample(g, lambda x: x**3))
        assert got == pytest.approx((2.0**4 - 1.0) / 4.0, abs=1e-13)

    def test_gaussian(self):
        g = make_grid(-10.0, 10.0, 2001)
        got = integrate(sample(g, lambda x: np.exp(-(x**2))))
        assert abs(got - math.sqrt(math.pi)) < 1e-10


class TestCumulativeIntegral:
    def test_constant_gives_x(self):
        g = make_grid(0.0, 1.0, 101)
        got = cumulative_integral(sample(g, lambda x: np.ones_like(x)))
        assert np.max(np.abs(got.values - g.x)) < 1e-14

    def test_zero(self):
        g = make_grid(-3.0, 3.0, 51)
        got = cumulative_integral(sample(g, lambda x: np.zeros_like(x)))
        assert np.all(got.values == 0.0)

    def test_endpoint_matches_integrate(self):
        g = make_grid(-10.0, 10.0, 2001)
        f = sample(g, lambda x: np.exp(-(x**2)) * (1.0 + np.sin(x)))
        total = integrate(f)
        assert abs(cumulative_integral(f).values[-1] - total) <= 1e-12 * abs(total)

    def test_ou_ground_density_reaches_one(self, ou_spectrum):
        phi0 = ou_spectrum.state(0)
        I0 = cumulative_integral(phi0 * phi0)
        # independent high-resolution quadrature of the analytic density
        fine = make_grid(-12.0, 12.0, 16001)
        ref = integrate(sample(fine, lambda x: np.exp(-(x**2) / 2.0) / math.sqrt(2.0 * math.pi)))
        assert abs(I0.values[-1] - ref) < 1e-8


class TestDerivative:
    def test_quadratic_exact_everywhere(self):
        g = make_grid(-2.0, 3.0, 201)
        got = derivative(sample(g, lambda x: x**2))
        assert np.max(np.abs(got.values - 2.0 * g.x)) < 1e-10

    def test_sin_interior(self):
        g = make_grid(-math.pi, math.pi, 629)  # h ~ 0.01
        got = derivative(sample(g, np.sin))
        interior = slice(2, -2)
        assert np.max(np.abs(got.values[interior] - np.cos(g.x)[interior])) < 1e-8

    def test_constant_is_zero(self):
        g = make_grid(0.0, 5.0, 51)
        got = derivative(sample(g, lambda x: np.full_like(x, 2.7)))
        assert np.max(np.abs(got.values)) < 1e-12

    def test_linearity(self):
        g = make_grid(-1.0, 1.0, 201)
        f = sample(g, lambda x: np.exp(x))
        h = sample(g, lambda x: np.sin(3 * x))
        lhs = derivative(2.5 * f + (-1.25) * h)
        rhs = 2.5 * derivative(f) + (-1.25) * derivative(h)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12

    def test_fundamental_theorem(self):
        # integrate(derivative F) reproduces F(c2) - F(c1) within O(h^4)
        g = make_grid(-1.0, 2.0, 301)
        F = sample(g, lambda x: np.sin(2 * x) * np.exp(-x))
        got = integrate(derivative(F))
        exact = math.sin(4.0) * math.exp(-2.0) - math.sin(-2.0) * math.exp(1.0)
        assert abs(got - exact) < 10 * g.h**4


class TestLogDerivative:
    def test_gaussian(self):
        g = make_grid(-6.0, 6.0, 1201)
        got = log_derivative(sample(g, lambda x: np.exp(-(x**2) / 4.0)))
        keep = got.unmasked()
        err = np.abs(got.values - (-g.x / 2.0))
        assert np.max(err[keep]) < 1e-6  # one-sided boundary rows dominate
        interior = keep.copy()
        interior[:2] = interior[-2:] = False
        assert np.max(err[interior]) < 1e-7  # h^4 (x/2)^5 / 30 at the domain edge

    def test_pure_exponential(self):
        g = make_grid(0.0, 3.0, 301)
        got = log_derivative(sample(g, lambda x: np.exp(3.0 * x)))
        err = np.abs(got.values - 3.0)
        assert np.max(err) < 1e-6
        assert np.max(err[2:-2]) < 1e-7

    def test_ou_first_excited_masks_node(self):
        # phi_1 ~ x e^{-x^2/4}: one interior zero, log-derivative 1/x - x/2
        g = make_grid(-12.0, 12.0, 4001)
        phi1 = sample(g, lambda x: x * np.exp(-(x**2) / 4.0))
        got = log_derivative(phi1)
        assert got.mask is not None
        mid = g.n_points // 2
        assert got.mask[mid]  # node at x = 0 is masked
        keep = got.unmasked()
        exact = 1.0 / g.x[keep] - g.x[keep] / 2.0
        assert np.max(np.abs(got.values[keep] - exact)) < 1e-6

    def test_everywhere_below_floor_rejected(self):
        g = make_grid(0.0, 1.0, 11)
        f = sample(g, lambda x: np.ones_like(x))
        with pytest.raises(ValueError):
            log_derivative(f, floor=10.0)

    def test_floor_must_be_positive(self):
        g = make_grid(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            log_derivative(sample(g, lambda x: np.exp(x)), floor=-1.0)


class TestGridFunction:
    def test_length_mismatch_rejected(self):
        g = make_grid(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            GridFunction(g, np.zeros(7))

    def test_non_finite_rejected(self):
        g = make_grid(0.0, 1.0, 11)
        vals = np.zeros(11)
        vals[3] = np.inf
        with pytest.raises(ValueError):
            GridFunction(g, vals)

    def test_masked_values_zeroed(self):
        g = make_grid(0.0, 1.0, 11)
        mask = np.zeros(11, dtype=bool)
        mask[2] = True
        f = GridFunction(g, np.ones(11), mask)
        assert f.values[2] == 0.0

    def test_mask_union_in_arithmetic(self):
        g = make_grid(0.0, 1.0, 11)
        m1 = np.zeros(11, dtype=bool)
        m1[1] = True
        m2 = np.zeros(11, dtype=bool)
        m2[9] = True
        f = GridFunction(g, np.ones(11), m1) + GridFunction(g, np.ones(11), m2)
        assert f.mask[1] and f.mask[9] and not f.mask[5]

    def test_divide_masks_small_denominator(self):
        g = make_grid(-1.0, 1.0, 201)
        num = sample(g, lambda x: np.ones_like(x))
        den = sample(g, lambda x: x)
        out = divide(num, den, floor=0.1)
        assert out.mask is not None
        assert np.all(out.mask == (np.abs(g.x) < 0.1))

    def test_sign_changes(self):
        g = make_grid(-1.0, 1.0, 201)
        assert interior_sign_changes(sample(g, lambda x: x)) == 1
        assert interior_sign_changes(sample(g, lambda x: x**2 - 0.25)) == 2
        assert interior_sign_changes(sample(g, lambda x: np.exp(x))) == 0


class TestCsv:
    def test_roundtrip_17_digits(self, tmp_path):
        g = make_grid(-1.0, 1.0, 11)
        f = sample(g, lambda x: np.exp(x) / 3.0)
        path = tmp_path / "out.csv"
        write_csv(path, {"f": f})
        cols = read_csv_columns(path)
        assert set(cols) == {"x", "f"}
        assert np.array_equal(cols["x"], g.x)  # 17 significant digits round-trip exactly
        assert np.array_equal(cols["f"], f.values)

    def test_sup_norm_window(self):
        g = make_grid(-2.0, 2.0, 401)
        f = sample(g, lambda x: x)
        assert sup_norm(f) == pytest.approx(2.0)
        assert sup_norm(f, window=(-1.0, 0.5)) == pytest.approx(1.0)
        assert sup_diff(f, sample(g, lambda x: x + 1.0)) == pytest.approx(1.0)
