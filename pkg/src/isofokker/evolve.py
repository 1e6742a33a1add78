"""Eigenfunction-expansion evolution of a Fokker-Planck density.

A unit-mass initial density expands as P(x,0) = phi_0 sum_k c_k phi_k with
c_k = int phi_k (phi_0^{-1} P) dx; each mode then relaxes with e^{-eps_k t}
(classical) or E_alpha(-eps_k t^alpha) (fractional).  Mass is conserved
exactly: int P dx = c_0 because both temporal factors equal 1 at eps = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, divide, integrate, simpson_weights
from .mittag import ml_relaxation
from .spectral import Spectrum

__all__ = ["TemporalRule", "FpeSolution", "project", "evolve_pdf", "moments", "truncation_residual"]


@dataclass(frozen=True)
class TemporalRule:
    """Temporal factor rule: classical exponential or Mittag-Leffler with 0 < alpha < 1."""

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("classical", "fractional"):
            raise ValueError(f"unknown temporal rule {self.kind!r}")
        if self.kind == "classical":
            if self.alpha is not None:
                raise ValueError("classical rule takes no alpha")
        elif self.alpha is None or not 0.0 < self.alpha < 1.0:
            raise ValueError(f"fractional rule needs alpha in (0, 1), got {self.alpha}")

    @classmethod
    def classical(cls) -> "TemporalRule":
        return cls(kind="classical")

    @classmethod
    def fractional(cls, alpha: float) -> "TemporalRule":
        return cls(kind="fractional", alpha=alpha)

    def factor(self, eps: float, t: float) -> float:
        if self.kind == "classical":
            return float(np.exp(-eps * t))
        if eps < 0.0:
            if eps < -1e-8:
                raise ValueError(f"negative relaxation rate {eps}")
            eps = 0.0  # numerical zero mode
        return ml_relaxation(self.alpha, eps, t)

    def factors(self, energies, t: float) -> np.ndarray:
        return np.array([self.factor(float(e), t) for e in np.asarray(energies)])


@dataclass(frozen=True, eq=False)
class FpeSolution:
    """Expansion coefficients over a spectrum plus a temporal rule."""

    spectrum: Spectrum
    coeffs: np.ndarray
    temporal: TemporalRule

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if len(coeffs) > self.spectrum.kmax + 1:
            raise ValueError(
                f"{len(coeffs)} coefficients exceed the {self.spectrum.kmax + 1} solved modes"
            )
        object.__setattr__(self, "coeffs", coeffs)


def project(P0: GridFunction, spectrum: Spectrum) -> np.ndarray:
    """Expansion coefficients c_k = int phi_k (phi_0^{-1} P0) dx, k <= kmax.

    P0 must be a unit-mass density no heavier-tailed than the stationary one;
    a significant P0 where phi_0 has already underflowed means the expansion
    cannot represent it and is rejected.
    """
    if spectrum.energies[0] > 1e-6:
        raise ValueError(
            f"lowest level {spectrum.energies[0]} is positive: the zero mode e^-W is "
            "not an eigenstate (no stationary density), so the ground-state-prefactor "
            "expansion does not solve this equation"
        )
    vals = P0.values
    if np.min(vals) < -1e-9 * max(np.max(np.abs(vals)), 1e-300):
        raise ValueError("initial density has significant negative values")
    mass = integrate(P0)
    if abs(mass - 1.0) > 1e-6:
        raise ValueError(f"initial density mass {mass} is not 1 within 1e-6")
    phi0 = spectrum.state(0)
    ratio = divide(P0, phi0)
    if ratio.mask is not None:
        lost = np.abs(vals[ratio.mask])
        if lost.size and np.max(lost) > 1e-8 * np.max(np.abs(vals)):
            raise ValueError(
                "initial density has heavier tails than the stationary density; "
                "phi_0^{-1} P0 blows up near the walls"
            )
    w = simpson_weights(P0.grid)
    weighted = w * ratio.values
    return np.array([float(weighted @ spectrum.state(k).values) for k in range(spectrum.kmax + 1)])


def evolve_pdf(sol: FpeSolution, t: float) -> GridFunction:
    """Density at time t: phi_0 sum_k c_k phi_k tau_k(t); no renormalization needed."""
    if t < 0:
        raise ValueError("t must be non-negative")
    factors = sol.temporal.factors(sol.spectrum.energies[: len(sol.coeffs)], t)
    grid = sol.spectrum.grid
    acc = np.zeros(grid.n_points)
    for c, tau, state in zip(sol.coeffs, factors, sol.spectrum.states):
        if c != 0.0:
            acc += (c * tau) * state.values
    return GridFunction(grid, sol.spectrum.state(0).values * acc)


def moments(P: GridFunction, orders) -> list[float]:
    """Raw moments int x^m P dx for each requested order."""
    w = simpson_weights(P.grid)
    x = P.grid.x
    return [float(w @ (x ** int(m) * P.values)) for m in orders]


def truncation_residual(sol: FpeSolution, P0: GridFunction) -> float:
    """L1 distance between P0 and its truncated expansion; reports expansion adequacy."""
    recon = evolve_pdf(sol, 0.0)
    w = simpson_weights(P0.grid)
    return float(w @ np.abs(P0.values - recon.values))
