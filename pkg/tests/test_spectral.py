import math

import numpy as np
import pytest

from isofokker.grid import (
    cumulative_integral,
    derivative,
    integrate,
    interior_sign_changes,
    make_grid,
    sample,
    sup_diff,
)
from isofokker.scenarios import box_scenario, ou_scenario
from isofokker.spectral import (
    DriftSpec,
    build_hamiltonian,
    ground_state_to_drift,
    solve_spectrum,
)


@pytest.fixture(scope="module")
def fine_ou():
    """Finer grid for the O(h^2)-limited residual invariants."""
    g = make_grid(-12.0, 12.0, 6001)
    drift = ou_scenario(g)
    return g, drift, solve_spectrum(build_hamiltonian(drift.W), 7)


class TestBuildHamiltonian:
    def test_ou_potential(self, ou_grid):
        W = sample(ou_grid, lambda x: x**2 / 4.0)
        op = build_hamiltonian(W)
        exact = ou_grid.x**2 / 4.0 - 0.5
        assert np.max(np.abs(op.V.values - exact)) < 1e-8

    def test_zero_prepotential(self, ou_grid):
        W = sample(ou_grid, lambda x: np.zeros_like(x))
        op = build_hamiltonian(W)
        assert np.max(np.abs(op.V.values)) < 1e-12

    def test_tridiagonal_structure(self, ou_grid):
        op = build_hamiltonian(sample(ou_grid, lambda x: x**2 / 4.0))
        h = ou_grid.h
        assert op.diag.shape == (ou_grid.n_points - 2,)
        assert np.allclose(op.offdiag, -1.0 / h**2)
        assert np.allclose(op.diag, 2.0 / h**2 + op.V.values[1:-1])

    def test_nontrivial_prepotential_symbolic_spot_check(self):
        # V = W'^2 - W'' for W = x^2/4 - ln cosh x, checked at spot nodes
        # against symbolic differentiation
        sympy = pytest.importorskip("sympy")
        x = sympy.Symbol("x")
        Wsym = x**2 / 4 - sympy.log(sympy.cosh(x))
        Vsym = sympy.lambdify(x, sympy.diff(Wsym, x) ** 2 - sympy.diff(Wsym, x, 2))
        g = make_grid(-10.0, 10.0, 2001)
        op = build_hamiltonian(sample(g, lambda v: v**2 / 4.0 - np.log(np.cosh(v))))
        for xi in (-3.7, -1.0, 0.0, 0.012, 2.5, 8.1):
            i = int(round((xi - g.c1) / g.h))
            assert op.V.values[i] == pytest.approx(float(Vsym(g.x[i])), abs=1e-6)


class TestSolveSpectrum:
    def test_ou_integer_eigenvalues(self, ou_spectrum):
        assert np.max(np.abs(ou_spectrum.energies - np.arange(8))) < 1e-3

    def test_box_eigenvalues(self):
        g = make_grid(0.0, 1.0, 2001)
        spec = solve_spectrum(build_hamiltonian(box_scenario(g).W), 3)
        exact = ((np.arange(4) + 1) * math.pi) ** 2
        assert np.max(np.abs(spec.energies - exact) / exact) < 1e-3

    def test_ground_energy_non_negative(self, ou_spectrum):
        assert ou_spectrum.energies[0] >= -1e-8

    def test_strictly_increasing(self, ou_spectrum):
        assert np.all(np.diff(ou_spectrum.energies) > 0)

    def test_orthonormality(self, ou_spectrum):
        worst = max(
            abs(integrate(ou_spectrum.state(j) * ou_spectrum.state(k)) - (j == k))
            for j in range(8)
            for k in range(8)
        )
        assert worst <= 1e-6

    def test_eigen_residual(self, fine_ou):
        # ||(-phi'' + V phi) - eps phi||_inf / ||phi||_inf <= 1e-4 inside;
        # the gap to the continuum ODE is O(h^2 k^2), so this runs on the
        # finer grid
        _, drift, spec = fine_ou
        op = build_hamiltonian(drift.W)
        for k in (0, 3, 7):
            phi = spec.state(k)
            second = derivative(derivative(phi))
            resid = -1.0 * second + op.V * phi - spec.energies[k] * phi
            keep = resid.unmasked()
            keep[:5] = keep[-5:] = False  # one-sided rows of the repeated stencil
            err = np.max(np.abs(resid.values[keep]))
            assert err <= 1e-4 * np.max(np.abs(phi.values))

    def test_ground_state_annihilated(self, fine_ou):
        # phi_0' + W' phi_0 ~ 0
        _, drift, spec = fine_ou
        phi0 = spec.state(0)
        w1 = derivative(drift.W)
        resid = derivative(phi0) + w1 * phi0
        assert np.max(np.abs(resid.values)) <= 1e-6 * np.max(np.abs(phi0.values))

    def test_ground_state_positive_and_unit_density(self, ou_spectrum):
        phi0 = ou_spectrum.state(0)
        assert np.all(phi0.values[1:-1] > -1e-12)
        assert integrate(phi0 * phi0) == pytest.approx(1.0, abs=1e-8)

    def test_node_counts(self, ou_spectrum):
        for k in range(8):
            assert interior_sign_changes(ou_spectrum.state(k)) == k

    def test_sign_convention(self, ou_spectrum):
        # first significant lobe positive, i.e. the state rises off the left wall
        for k in range(8):
            v = ou_spectrum.state(k).values
            first = np.argmax(np.abs(v) > 1e-3 * np.max(np.abs(v)))
            assert v[first] > 0

    def test_resolution_guard(self, ou_grid):
        op = build_hamiltonian(sample(ou_grid, lambda x: x**2 / 4.0))
        with pytest.raises(ValueError, match="kmax"):
            solve_spectrum(op, ou_grid.n_points // 4)


class TestGroundStateToDrift:
    def test_ou_ground_state(self, ou_grid):
        phi0 = sample(ou_grid, lambda x: np.exp(-(x**2) / 4.0))
        ds = ground_state_to_drift(phi0)
        assert sup_diff(ds.D, sample(ou_grid, lambda x: -x), window=(-8, 8)) < 1e-5

    def test_quartic_ground_state(self):
        # steep derivatives: h^4 (4x^3)^5 / 30 truncation needs a fine grid
        g = make_grid(-2.0, 2.0, 4001)
        phi0 = sample(g, lambda x: np.exp(-(x**4)))
        ds = ground_state_to_drift(phi0)
        ref = sample(g, lambda x: -8.0 * x**3)
        assert sup_diff(ds.D, ref, window=(-1.8, 1.8)) < 1e-5

    def test_deformed_ground_state_closed_form(self, ou_spectrum, ou_grid):
        # D^ = -x - 2 phi0^2/(lambda + I0) for the reciprocal-virtual-state
        # ground state, with I0 from the quadrature oracle
        phi0 = ou_spectrum.state(0)
        I0 = cumulative_integral(phi0 * phi0)
        lam = 0.5
        deformed = phi0 * (1.0 / (I0 + lam))  # no normalization needed for log-derivative
        ds = ground_state_to_drift(deformed)
        base = ground_state_to_drift(phi0)
        closed = base.D - 2.0 * phi0 * phi0 * (1.0 / (I0 + lam))
        assert sup_diff(ds.D, closed, window=(-8, 8)) < 1e-5

    def test_prepotential_consistency(self, ou_grid):
        # W = -ln phi0 and D = -2 W' hold together
        phi0 = sample(ou_grid, lambda x: np.exp(-(x**2) / 4.0))
        ds = ground_state_to_drift(phi0)
        resid = ds.D + 2.0 * derivative(ds.W)
        assert np.max(np.abs(resid.values[resid.unmasked()])) < 1e-5

    def test_noded_state_rejected(self, ou_spectrum):
        with pytest.raises(ValueError, match="zero"):
            ground_state_to_drift(ou_spectrum.state(1))


class TestDriftSpec:
    def test_from_prepotential(self, ou_grid):
        ds = DriftSpec.from_prepotential(sample(ou_grid, lambda x: x**2 / 4.0))
        assert sup_diff(ds.D, sample(ou_grid, lambda x: -x)) < 1e-9
