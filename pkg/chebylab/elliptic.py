"""Elliptic periods, theta functions and the τ/τ′/nome bookkeeping.

Conventions, pinned once for the whole package:

- ϑ₀(t|τ′) = 1 + Σ_{m≥1} (−1)^m 2 h^{m²} cos(2πmt) with h = e^{πiτ′}
  (real in (0, 1) for purely imaginary τ′);
- ϑ₁(v|τ) = 2 Σ_{n≥0} (−1)^n q^{(n+½)²} sin((2n+1)πv) with q = e^{πiτ};
- τ = 2i·mod(Ω), τ′ = −1/τ, so |τ′| = 1/(2·mod(Ω)) = K′/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

from chebylab.config import THETA_TRUNCATION
from chebylab.errors import EllipticError

# Gauss–Chebyshev node counts tried by elliptic_periods (doubling).
_QUADRATURE_START = 64
_QUADRATURE_MAX = 2**17
_QUADRATURE_TOLERANCE = 1e-14

_AGM_MAX_ITERATIONS = 64
_SERIES_MAX_TERMS = 400


# ---------------------------------------------------------------------------
# Complete elliptic integrals
# ---------------------------------------------------------------------------


def _agm(a: float, b: float) -> float:
    for _ in range(_AGM_MAX_ITERATIONS):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def agm_complete(k: float) -> tuple[float, float]:
    """Complete elliptic integrals K(k) and K′(k) = K(√(1−k²)) by AGM.

    Args:
        k: Modulus in (0, 1).

    Returns:
        (K, K′) to about 1e−15 relative.

    Raises:
        EllipticError: For k outside (0, 1).
    """
    if not 0.0 < k < 1.0:
        raise EllipticError(f"modulus k must lie in (0, 1), got {k}", "agm_complete")
    k_prime = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, k_prime)), math.pi / (2.0 * _agm(1.0, k))


def reduced_modulus(endpoints: Sequence[float]) -> tuple[float, float, float]:
    """Cross-ratio reduction of the four-endpoint periods to Legendre form.

    For α₁ < β₁ < α₂ < β₂ the gap integral equals prefactor·K(k) and the band
    integral prefactor·K(k′).

    Returns:
        (k, k′, prefactor).
    """
    a1, b1, a2, b2 = _checked_endpoints(endpoints, "reduced_modulus")
    denominator = (b2 - b1) * (a2 - a1)
    k_squared = (a2 - b1) * (b2 - a1) / denominator
    k_prime_squared = (b1 - a1) * (b2 - a2) / denominator
    return math.sqrt(k_squared), math.sqrt(k_prime_squared), 2.0 / math.sqrt(denominator)


def _checked_endpoints(endpoints: Sequence[float], operation: str) -> tuple[float, ...]:
    values = tuple(float(x) for x in endpoints)
    if len(values) != 4 or not all(values[i] < values[i + 1] for i in range(3)):
        raise EllipticError(
            f"need four strictly increasing endpoints, got {list(endpoints)}", operation
        )
    return values


def _arc_integral(left: float, right: float, others: tuple[float, float]) -> float:
    """∫_left^right dξ/√|Q(ξ)| with the two roots left/right absorbed.

    With ξ = m + h·cos φ the factor (ξ − left)(right − ξ) cancels against dξ,
    leaving ∫_0^π dφ/√|(ξ − o₁)(ξ − o₂)|; Gauss–Chebyshev in ξ is the
    midpoint rule in φ. Node counts double until two estimates agree.
    """
    middle, half = 0.5 * (left + right), 0.5 * (right - left)
    previous = None
    count = _QUADRATURE_START
    while True:
        nodes, weights = cheb.chebgauss(count)
        xi = middle + half * nodes
        estimate = float(np.sum(weights / np.sqrt(np.abs((xi - others[0]) * (xi - others[1])))))
        if previous is not None and abs(estimate - previous) <= _QUADRATURE_TOLERANCE * estimate:
            return estimate
        if count >= _QUADRATURE_MAX:
            return estimate
        previous, count = estimate, 2 * count


def elliptic_periods(endpoints: Sequence[float]) -> tuple[float, float]:
    """Periods K (gap cycle) and K′ (band cycle) of dξ/√Q.

    Q(ξ) = (ξ−α₁)(ξ−β₁)(ξ−α₂)(ξ−β₂). K integrates over the gap (β₁, α₂), K′
    over the band (α₁, β₁); both are positive.

    Args:
        endpoints: α₁ < β₁ < α₂ < β₂.

    Returns:
        (K, K′).

    Raises:
        EllipticError: When the endpoints are not strictly increasing.
    """
    a1, b1, a2, b2 = _checked_endpoints(endpoints, "elliptic_periods")
    gap = _arc_integral(b1, a2, (a1, b2))
    band = _arc_integral(a1, b1, (a2, b2))
    return gap, band


# ---------------------------------------------------------------------------
# Theta functions
# ---------------------------------------------------------------------------


def nome(abs_tau_prime: float) -> float:
    """h = exp(−π|τ′|)."""
    return math.exp(-math.pi * abs_tau_prime)


def theta_terms(h: float) -> int:
    """Number of series terms m ≥ 1 kept before h^{m²} < THETA_TRUNCATION."""
    if h <= 0.0:
        return 0
    terms = 0
    while terms < _SERIES_MAX_TERMS and h ** ((terms + 1) ** 2) >= THETA_TRUNCATION:
        terms += 1
    return terms


def theta0(
    t: float | np.ndarray, abs_tau_prime: float, terms: int | None = None
) -> float | np.ndarray:
    """ϑ₀(t|τ′) = 1 + Σ (−1)^m 2 h^{m²} cos(2πmt), h = e^{−π|τ′|}.

    Args:
        t: Real argument(s).
        abs_tau_prime: |τ′| > 0.
        terms: Force this many terms m ≥ 1 instead of the truncation rule.

    Returns:
        ϑ₀ at t (scalar in, scalar out).

    Raises:
        EllipticError: When |τ′| ≤ 0, i.e. h ≥ 1.
    """
    if not abs_tau_prime > 0:
        raise EllipticError(f"|tau'| must be positive (h < 1), got {abs_tau_prime}", "theta0")
    h = nome(abs_tau_prime)
    count = theta_terms(h) if terms is None else terms
    values = np.asarray(t, dtype=float)
    values = values - np.round(values)  # period 1
    total = np.ones_like(values)
    for m in range(count, 0, -1):
        total = total + (-1) ** m * 2.0 * h ** (m * m) * np.cos(2 * np.pi * m * values)
    return float(total) if np.ndim(t) == 0 else total


def _complex_series(terms) -> complex:
    total = 0j
    for n, term in enumerate(terms):
        total += term
        if n > 2 and abs(term) <= 1e-18 * max(abs(total), 1e-300):
            break
    return total


def _check_tau(tau: complex, operation: str) -> complex:
    tau = complex(tau)
    if tau.real != 0.0 or not tau.imag > 0:
        raise EllipticError(
            f"tau must be purely imaginary with positive imaginary part, got {tau}", operation
        )
    return tau


def theta0_complex(v: complex, tau: complex) -> complex:
    """ϑ₀(v|τ) for complex v: 1 + 2Σ(−1)^n q^{n²} cos(2πnv), q = e^{πiτ}."""
    tau = _check_tau(tau, "theta0_complex")
    q = np.exp(1j * np.pi * tau)

    def series():
        yield 1.0 + 0j
        for n in range(1, _SERIES_MAX_TERMS):
            yield 2.0 * (-1) ** n * q ** (n * n) * np.cos(2 * np.pi * n * v)

    return _complex_series(series())


def theta1(v: complex, tau: complex) -> complex:
    """ϑ₁(v|τ) = 2Σ(−1)^n q^{(n+½)²} sin((2n+1)πv), q = e^{πiτ}."""
    tau = _check_tau(tau, "theta1")

    def series():
        for n in range(_SERIES_MAX_TERMS):
            exponent = 1j * np.pi * tau * (n + 0.5) ** 2
            yield 2.0 * (-1) ** n * np.exp(exponent) * np.sin((2 * n + 1) * np.pi * v)

    return _complex_series(series())


def half_period_reduce(v: complex, tau: complex) -> float:
    """Residual of ϑ₁(v+τ/2|τ) = i·e^{−πiτ/4}·e^{−πiv}·ϑ₀(v|τ).

    The asymptotic formula is stated with ϑ₁ at half-period-shifted arguments;
    this identity is what lets the asymptotics work with ϑ₀ alone.

    Returns:
        |left − right|.

    Raises:
        EllipticError: When τ is not purely imaginary with Im τ > 0.
    """
    tau = _check_tau(tau, "half_period_reduce")
    left = theta1(v + tau / 2, tau)
    right = 1j * np.exp(-1j * np.pi * tau / 4) * np.exp(-1j * np.pi * v) * theta0_complex(v, tau)
    return float(abs(left - right))


# ---------------------------------------------------------------------------
# Elliptic data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticData:
    """Everything the elliptic asymptotic formula consumes.

    Attributes:
        modulus_omega: mod(Ω).
        tau: 2i·mod(Ω).
        tau_prime: −1/τ.
        abs_tau_prime: |τ′|.
        nome_h: e^{−π|τ′|}.
        K: Gap period (1 when only the condenser route is available).
        K_prime: Band period (|τ′|·K in that case).
        omega_infinity: Harmonic measure of the interval component at ∞.
    """

    modulus_omega: float
    tau: complex
    tau_prime: complex
    abs_tau_prime: float
    nome_h: float
    K: float
    K_prime: float
    omega_infinity: float


def build_elliptic_data(
    modulus_omega: float,
    omega_infinity: float,
    periods: tuple[float, float] | None = None,
) -> EllipticData:
    """Fill EllipticData from the conformal modulus and ω(∞).

    Args:
        modulus_omega: mod(Ω) > 0.
        omega_infinity: ω(∞) in (0, 1).
        periods: (K, K′) when a quadrature route exists; otherwise the
            normalized pair (1, |τ′|) is stored.

    Returns:
        The EllipticData.

    Raises:
        EllipticError: For out-of-range inputs.
    """
    if not modulus_omega > 0:
        raise EllipticError(
            f"modulus must be positive, got {modulus_omega}", "build_elliptic_data"
        )
    if not 0.0 < omega_infinity < 1.0:
        raise EllipticError(
            f"omega(inf) must lie in (0, 1), got {omega_infinity}", "build_elliptic_data"
        )
    tau = 2j * modulus_omega
    abs_tau_prime = 1.0 / (2.0 * modulus_omega)
    K, K_prime = periods if periods is not None else (1.0, abs_tau_prime)
    return EllipticData(
        modulus_omega=modulus_omega,
        tau=tau,
        tau_prime=-1.0 / tau,
        abs_tau_prime=abs_tau_prime,
        nome_h=math.exp(-math.pi / (2.0 * modulus_omega)),
        K=K,
        K_prime=K_prime,
        omega_infinity=omega_infinity,
    )


def elliptic_data_from_endpoints(
    endpoints: Sequence[float], omega_infinity: float
) -> EllipticData:
    """Quadrature route for two-interval systems: mod(Ω) = K/(2K′)."""
    K, K_prime = elliptic_periods(endpoints)
    return build_elliptic_data(K / (2.0 * K_prime), omega_infinity, periods=(K, K_prime))
