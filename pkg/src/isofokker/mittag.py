"""Mittag-Leffler function E_alpha(z) on the non-positive real axis.

E_alpha(z) = sum_k z^k / Gamma(alpha k + 1) interpolates between algebraic
relaxation and the exponential (alpha = 1); only 0 < alpha <= 1 and z <= 0
are supported, which is exactly the regime the fractional solver needs.

Two evaluation branches back each other up:

* power series for |z| <= z_switch.  The alternating series cancels like
  exp(|z|^(1/alpha)), so once the predicted float64 loss exceeds a few
  digits the summation escalates to arbitrary precision; plain compensated
  summation cannot hold the accuracy contract for small alpha.
* for z < -z_switch, Gauss-Laguerre quadrature of the completely-monotone
  spectral representation
      E_alpha(-x) = sin(alpha pi)/(pi x) *
                    int_0^inf u^(alpha-1) e^-u / Q(u^alpha / x) du,
      Q(w) = w^2 + 2 cos(alpha pi) w + 1,
  with the leading w-powers of 1/Q integrated in closed form (Chebyshev-U
  coefficients against Gamma moments) so the u^alpha endpoint singularity
  never touches the quadrature.  The divergent-tail estimate
  sum_m (-1)^(m+1) x^-m / Gamma(1 - alpha m) cross-checks every integral
  evaluation at its own optimal-truncation accuracy.

The spectral density develops an unresolvable near-pole as alpha -> 1, so
alpha > 0.9 always takes the series branch, where cancellation is mild.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, rgamma

__all__ = ["mittag_leffler", "ml_relaxation", "ml_series", "ml_integral"]

DEFAULT_Z_SWITCH = 5.0
SERIES_ALPHA_MIN_FOR_INTEGRAL = 0.9  # above this, integral peak too sharp
FLOAT_LOSS_DIGITS = 3.0  # escalate series to mpmath beyond this predicted loss
MAX_SERIES_DPS = 12000
_LOG10_E = math.log10(math.e)

QUAD_NODES = 400
HEAD_TERMS = 12


def _series_loss_digits(alpha: float, x: float) -> float:
    """Predicted decimal digits lost to cancellation: log10 sum|terms| ~ x^(1/alpha) log10 e."""
    if x == 0.0:
        return 0.0
    return x ** (1.0 / alpha) * _LOG10_E


def _series_float(alpha: float, x: float) -> float:
    """Kahan-compensated float64 series at z = -x; only for mild cancellation."""
    total = 0.0
    comp = 0.0
    k = 0
    while True:
        term = math.exp(k * math.log(x) - gammaln(alpha * k + 1.0)) if x > 0.0 else (1.0 if k == 0 else 0.0)
        if k % 2:
            term = -term
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < 1e-18 * max(1.0, abs(total)) and k > x ** (1.0 / alpha):
            return total
        k += 1
        if k > 100000:  # pragma: no cover - series always terminates long before
            raise RuntimeError("series failed to converge")


def _series_mp(alpha: float, x: float, loss_digits: float) -> float:
    """Arbitrary-precision series for severe cancellation."""
    dps = 25 + int(loss_digits)
    if dps > MAX_SERIES_DPS:
        raise ValueError(
            f"E_alpha({-x}) with alpha={alpha} needs ~{dps} digits in the series; "
            "alpha is too small for this |z|"
        )
    k_peak = alpha * x ** (1.0 / alpha)
    with mpmath.workdps(dps):
        z = mpmath.mpf(-x)
        a = mpmath.mpf(alpha)  # gamma argument must carry full precision
        total = mpmath.mpf(0)
        k = 0
        cutoff = mpmath.mpf(10) ** (-(dps - 5))
        while True:
            term = z**k / mpmath.gamma(a * k + 1)
            total += term
            if abs(term) < cutoff and k > k_peak:
                return float(total)
            k += 1
            if k > 2000000:  # pragma: no cover
                raise RuntimeError("series failed to converge")


def ml_series(alpha: float, z: float) -> float:
    """Series branch of E_alpha at z <= 0 (exposed for branch-continuity checks)."""
    x = -z
    loss = _series_loss_digits(alpha, x)
    if loss <= FLOAT_LOSS_DIGITS:
        return _series_float(alpha, x)
    return _series_mp(alpha, x, loss)


@lru_cache(maxsize=32)
def _laguerre_rule(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Generalized Gauss-Laguerre rule for weight u^(alpha-1) e^-u.

    Golub-Welsch on the Jacobi matrix of the generalized Laguerre
    polynomials; stable at orders where scipy's Newton-based nodes break.
    """
    a = alpha - 1.0
    k = np.arange(QUAD_NODES, dtype=float)
    diag = 2.0 * k + a + 1.0
    off = np.sqrt((k[:-1] + 1.0) * (k[:-1] + 1.0 + a))
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = math.gamma(a + 1.0) * vecs[0, :] ** 2
    return nodes, weights


def ml_integral(alpha: float, z: float) -> float:
    """Gauss-Laguerre branch of E_alpha at z < 0 for 0 < alpha < 1."""
    x = -z
    if x <= 0.0:
        raise ValueError("integral branch requires z < 0")
    u, wq = _laguerre_rule(alpha)
    c = math.cos(math.pi * alpha)
    w = u**alpha / x
    f = 1.0 / (1.0 + 2.0 * c * w + w * w)
    # head coefficients of 1/Q: g_j = (-1)^j U_j(cos(alpha pi))
    g = np.empty(HEAD_TERMS)
    g[0] = 1.0
    g[1] = -2.0 * c
    for j in range(2, HEAD_TERMS):
        g[j] = -2.0 * c * g[j - 1] - g[j - 2]
    head = np.zeros_like(w)
    for j in range(HEAD_TERMS - 1, -1, -1):
        head = head * w + g[j]
    quad = float(wq @ (f - head))
    j = np.arange(HEAD_TERMS)
    analytic = float(np.sum(g * x ** (-j.astype(float)) * np.exp(gammaln(alpha * (j + 1)))))
    return math.sin(math.pi * alpha) / (math.pi * x) * (analytic + quad)


def _asymptotic_tail(alpha: float, x: float, max_terms: int = 60) -> tuple[float, float]:
    """Optimally truncated tail sum; returns (value, size of smallest kept term)."""
    total = 0.0
    last = math.inf
    smallest = math.inf
    for m in range(1, max_terms + 1):
        term = (-1.0) ** (m + 1) * x ** (-m) * rgamma(1.0 - alpha * m)
        mag = abs(term)
        if mag == 0.0:  # exact zero at a Gamma pole, not the divergence floor
            continue
        if mag >= last:
            break
        total += term
        last = mag
        smallest = mag
    return total, smallest


def mittag_leffler(alpha: float, z: float, z_switch: float = DEFAULT_Z_SWITCH) -> float:
    """E_alpha(z) for 0 < alpha <= 1 and z <= 0, accurate to ~1e-10.

    Raises for arguments outside that regime, and raises a diagnostic if the
    quadrature and asymptotic branches disagree beyond what the asymptotic
    series' own truncation floor allows.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if z > 0.0:
        raise ValueError(f"only non-positive arguments are supported, got z={z}")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(z)
    if -z <= z_switch or alpha > SERIES_ALPHA_MIN_FOR_INTEGRAL:
        return ml_series(alpha, z)
    value = ml_integral(alpha, z)
    tail, smallest = _asymptotic_tail(alpha, -z)
    tol = max(1e-8, 10.0 * smallest)
    if abs(value - tail) > tol:
        raise ArithmeticError(
            f"integral branch ({value}) and asymptotic tail ({tail}) of "
            f"E_{alpha}({z}) disagree beyond {tol}; evaluation is suspect"
        )
    return value


def ml_relaxation(alpha: float, eps: float, t: float) -> float:
    """Temporal relaxation factor E_alpha(-eps t^alpha).

    Equals 1 at t = 0, stays 1 forever for the zero mode, and decays
    monotonically otherwise (algebraically for alpha < 1).
    """
    if eps < 0.0:
        raise ValueError(f"relaxation rate must be non-negative, got {eps}")
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")
    if eps == 0.0 or t == 0.0:
        return 1.0
    return mittag_leffler(alpha, -eps * t**alpha)
