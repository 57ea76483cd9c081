"""Fixed-energy amplitude of the Coulomb problem with a flux line.

Two independent evaluators are provided:

* :func:`green_q_integral` sums, over angular channels ``m``, a one-dimensional
  integral in a pseudotime variable ``q`` whose integrand is a product of
  two modified Bessel functions.
* :func:`green_partial_wave` sums Whittaker-function radial products weighted
  by Ferrers functions of non-integer degree.

Both return ``-i`` times the kernel of ``(H - E)^{-1}`` in natural units
(hbar = 1). Energies must be negative. The remaining functions check the
intermediate identities that connect the two forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import integrate
from scipy import special as sp

from . import specfun
from ._quadrature import tanh_sinh
from .errors import AccuracyError, DomainError, NearPoleError, SingularConfigurationError
from .kstransform import GAMMA_PERIOD, SphericalPoint, spherical_to_double_polar
from .spectrum import PhysParams

__all__ = [
    "FixedEnergy",
    "EndpointPair",
    "TruncationSpec",
    "AmplitudeValue",
    "PoleEstimate",
    "POLE_GUARD",
    "m_window",
    "q_integrand",
    "channel_q_integral",
    "green_q_integral",
    "green_partial_wave",
    "bessel_product_identity_check",
    "legendre_integral_identity_check",
    "oscillator_sum_reduction_check",
    "pole_scan",
]

POLE_GUARD = 1e-6


@dataclass(frozen=True)
class FixedEnergy:
    """Negative energy ``E`` with oscillator frequency ``omega = sqrt(-E / 2M)``."""

    energy: float
    omega: float

    @classmethod
    def from_energy(cls, params: PhysParams, energy: float) -> "FixedEnergy":
        if not (math.isfinite(energy) and energy < 0):
            raise DomainError(f"energy must be negative, got {energy}")
        return cls(energy, math.sqrt(-energy / (2.0 * params.mass)))

    def kappa(self, params: PhysParams) -> float:
        """Coulomb index ``-xi / (2 omega)``; poles sit at ``kappa = 1 + |m+alpha| + k``."""
        return -params.coulomb / (2.0 * self.omega)


@dataclass(frozen=True)
class EndpointPair:
    a: SphericalPoint
    b: SphericalPoint

    def swapped(self) -> "EndpointPair":
        return EndpointPair(self.b, self.a)

    def require_off_axis(self) -> None:
        for p in (self.a, self.b):
            p.validate()
            if p.theta <= 0.0 or p.theta >= math.pi:
                raise SingularConfigurationError("endpoint on flux axis")


@dataclass(frozen=True)
class TruncationSpec:
    """Series and quadrature budgets: ``|m - m0| <= m_max``, ``n <= n_max``."""

    m_max: int = 12
    n_max: int = 40
    quad_rel_tol: float = 1e-11
    quad_abs_tol: float = 1e-300

    def __post_init__(self):
        if self.m_max < 0 or self.n_max < 0:
            raise DomainError("m_max and n_max must be non-negative")
        if not (self.quad_rel_tol > 0 and self.quad_abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")


class AmplitudeValue(NamedTuple):
    value: complex
    err_estimate: float


class PoleEstimate(NamedTuple):
    energy: float
    growth: float


def m_window(flux: float, m_max: int) -> range:
    """Channels ``m0 - m_max .. m0 + m_max`` centred on ``m0 = -floor(alpha)``.

    The centre follows the flux, so shifting ``alpha`` by an integer relabels
    the channels without changing the set of orders ``|m + alpha|``.
    """
    m0 = -math.floor(flux)
    return range(m0 - m_max, m0 + m_max + 1)


def _geometry(pts: EndpointPair):
    ra, rb = pts.a.r, pts.b.r
    ha, hb = 0.5 * pts.a.theta, 0.5 * pts.b.theta
    c = math.cos(ha) * math.cos(hb)
    s = math.sin(ha) * math.sin(hb)
    # (sqrt(ra) - sqrt(rb))^2 + 4 sqrt(ra rb) sin^2((theta_a - theta_b)/4), cancellation-free
    d = (ra - rb) ** 2 / (math.sqrt(ra) + math.sqrt(rb)) ** 2 + 4.0 * math.sqrt(ra * rb) * math.sin(
        0.25 * (pts.a.theta - pts.b.theta)
    ) ** 2
    return ra, rb, c, s, d


def _guard_poles(params: PhysParams, fe: FixedEnergy, orders: Iterable[tuple[int, float]],
                 k_max: int | None = None) -> None:
    """Raise :class:`NearPoleError` if ``E`` is within ``POLE_GUARD`` of a channel pole."""
    if params.coulomb >= 0:
        return
    kappa = fe.kappa(params)
    for m, nu in orders:
        k = round(kappa - 1.0 - nu)
        if k < 0 or (k_max is not None and k > k_max):
            continue
        principal = 1.0 + nu + k
        e_level = -params.mass * params.coulomb**2 / (2.0 * principal**2)
        if abs(fe.energy - e_level) <= POLE_GUARD * abs(e_level):
            raise NearPoleError(
                f"energy {fe.energy!r} is within {POLE_GUARD:g} (relative) of the level "
                f"E={e_level!r} (principal {principal!r}, m={m})",
                e_level,
                principal,
                m,
            )


# ---------------------------------------------------------------------------
# q-integral evaluator
# ---------------------------------------------------------------------------


def _log_integrand_parts(nu, kappa, mw, ra, rb, c, s, d, sinh_q, two_sinh2_half, q):
    x = 4.0 * mw * math.sqrt(ra * rb) / sinh_q
    expo = 2.0 * kappa * q - 2.0 * mw * ((ra + rb) * two_sinh2_half + d) / sinh_q
    bessel = sp.ive(nu, x * c) * sp.ive(nu, x * s)
    return expo, bessel


def q_integrand(params: PhysParams, pts: EndpointPair, fe: FixedEnergy, m: int, q: float) -> float:
    """Integrand of channel ``m`` at pseudotime ``q > 0``.

    ``exp(2 kappa q - 2 M omega (r_a + r_b) coth q) / sinh(q)^2 * I_nu(X c) I_nu(X s)``
    with ``X = 4 M omega sqrt(r_a r_b) / sinh q``. The Bessel growth is folded
    into the exponent, which stays finite as ``q -> 0``.
    """
    if not q > 0:
        raise DomainError("q must be positive")
    ra, rb, c, s, d = _geometry(pts)
    nu = abs(m + params.flux)
    sinh_q = math.sinh(q)
    expo, bessel = _log_integrand_parts(
        nu, fe.kappa(params), params.mass * fe.omega, ra, rb, c, s, d, sinh_q,
        2.0 * math.sinh(0.5 * q) ** 2, q,
    )
    return float(math.exp(expo) * bessel / sinh_q**2) if bessel > 0 else 0.0


def _series_mul(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    return np.convolve(a, b)[:k]


def _scaled_bessel_series(nu: float, t: float, k: int) -> np.ndarray:
    """Taylor coefficients in ``x`` of ``I_nu(y)/(y/2)^nu`` with ``y^2/4 = t x/(1-x)^2``."""
    inner = t * np.arange(k, dtype=float)  # t * sum_k k x^k
    coeffs = [float(sp.rgamma(nu + j + 1.0) / math.factorial(j)) for j in range(k)]
    out = np.zeros(k)
    out[0] = coeffs[-1]
    for f in reversed(coeffs[:-1]):
        out = _series_mul(out, inner, k)
        out[0] += f
    return out


def _continued_tail(nu, kappa, a_exp, beta, c, s, x0, rel_tol):
    """Integral over ``q > q0`` with ``x = exp(-2q)``, analytically continued in ``kappa``.

    The integrand becomes ``2 (beta^2 c s / 4)^nu x^(nu - kappa) G(x)`` with
    ``G`` analytic on ``|x| < 1``; integrating the Taylor series of ``G``
    term by term over ``[0, x0]`` is exact and stays finite above the
    channel threshold, where the ``q``-integral itself diverges.
    """
    s0 = nu - kappa + 1.0
    p = 2.0 + 2.0 * nu
    k = 48
    while True:
        idx = np.arange(k, dtype=float)
        binom = np.ones(k)
        for j in range(1, k):
            binom[j] = binom[j - 1] * (p + j - 1.0) / j
        # exp(-2A x/(1-x)) via the exp-of-series recurrence
        expo = np.zeros(k)
        expo[0] = 1.0
        for j in range(1, k):
            expo[j] = (-2.0 * a_exp / j) * np.dot(idx[1 : j + 1], expo[j - 1 :: -1][:j])
        g = _series_mul(binom, expo, k)
        g = _series_mul(g, _scaled_bessel_series(nu, 0.25 * (beta * c) ** 2, k), k)
        g = _series_mul(g, _scaled_bessel_series(nu, 0.25 * (beta * s) ** 2, k), k)
        terms = g * x0**idx / (s0 + idx)
        total = math.fsum(terms)
        tail_mag = np.max(np.abs(terms[-4:]))
        if tail_mag <= rel_tol * 1e-3 * abs(total) or k >= 768:
            break
        k *= 2
    log_pre = (
        math.log(2.0) + nu * math.log(0.25 * beta * beta * c * s) - a_exp + s0 * math.log(x0)
    )
    err = tail_mag + 8.0 * np.finfo(float).eps * float(np.sum(np.abs(terms)))
    return total * math.exp(log_pre), err * math.exp(log_pre)


def channel_q_integral(nu: float, kappa: float, mw: float, pts: EndpointPair,
                       rel_tol: float = 1e-11, abs_tol: float = 1e-300) -> tuple[float, float]:
    """``int_0^inf dq`` of the channel integrand (continued past its threshold); returns (value, err)."""
    ra, rb, c, s, d = _geometry(pts)
    if d <= 0:
        raise DomainError("endpoints coincide in (r, theta); the channel integral diverges")
    a_exp = 2.0 * mw * (ra + rb)
    beta = 8.0 * mw * math.sqrt(ra * rb)
    q0 = 1.5 + 0.5 * math.log(max(1.0, (a_exp + 0.25 * beta * beta) / 4.0))
    x0 = math.exp(-2.0 * q0)
    t0 = math.tanh(0.5 * q0)

    def f(t):
        # q = 2 atanh t: sinh q = 2t/(1-t^2), 2 sinh^2(q/2) = 2t^2/(1-t^2), dq = 2 dt/(1-t^2)
        if t <= 0.0:
            return 0.0
        omt2 = 1.0 - t * t
        sinh_q = 2.0 * t / omt2
        expo, bessel = _log_integrand_parts(
            nu, kappa, mw, ra, rb, c, s, d, sinh_q, 2.0 * t * t / omt2, 2.0 * math.atanh(t)
        )
        if bessel == 0.0:
            return 0.0
        return math.exp(expo) * bessel / (sinh_q * sinh_q) * 2.0 / omt2

    head, head_err, info = integrate.quad(
        f, 0.0, t0, epsabs=abs_tol, epsrel=rel_tol, limit=400, full_output=True
    )[:3]
    tail, tail_err = _continued_tail(nu, kappa, a_exp, beta, c, s, x0, rel_tol)
    value = head + tail
    err = head_err + tail_err
    if err > max(abs_tol, 100.0 * rel_tol * abs(value)):
        raise AccuracyError(
            f"q-integral for order {nu} did not converge (err {err:.2e}, value {value:.3e})",
            best_estimate=value,
        )
    return value, err


def green_q_integral(params: PhysParams, pts: EndpointPair, fe: FixedEnergy,
                     trunc: TruncationSpec = TruncationSpec(), *, guard: bool = True) -> AmplitudeValue:
    """Amplitude as ``(-i M^2 omega / pi) sum_m e^{i m (phi_b - phi_a)} int_0^inf dq (...)``.

    The m-sum runs over :func:`m_window`, accumulated in ``+/-`` pairs around
    the window centre. ``err_estimate`` adds the quadrature errors and the
    magnitude of the outermost m-shell.
    """
    pts.require_off_axis()
    window = m_window(params.flux, trunc.m_max)
    if guard:
        _guard_poles(params, fe, ((m, abs(m + params.flux)) for m in window))
    kappa = fe.kappa(params)
    mw = params.mass * fe.omega
    dphi = pts.b.phi - pts.a.phi
    m0 = window[trunc.m_max]
    total = 0j
    quad_err = 0.0
    shell = 0.0
    for j in range(trunc.m_max + 1):
        ring = [m0] if j == 0 else [m0 - j, m0 + j]
        part = 0j
        for m in ring:
            val, err = channel_q_integral(
                abs(m + params.flux), kappa, mw, pts, trunc.quad_rel_tol, trunc.quad_abs_tol
            )
            part += complex(math.cos(m * dphi), math.sin(m * dphi)) * val
            quad_err += err
        total += part
        shell = abs(part)
    pref = params.mass**2 * fe.omega / math.pi
    return AmplitudeValue(complex(-1j * pref * total), float(pref * (quad_err + shell)))


# ---------------------------------------------------------------------------
# partial-wave evaluator
# ---------------------------------------------------------------------------


def _ferrers_row(n_max: int, nu: float, theta: float) -> np.ndarray:
    h = 0.5 * theta
    return specfun.ferrers_negative_order(
        n_max, nu, math.cos(theta), omx=2.0 * math.sin(h) ** 2, opx=2.0 * math.cos(h) ** 2
    )


def _radial_log_terms(nu: float, kappa: float, n_max: int, x_big: float, y_small: float,
                      energy: float, m: int):
    """Per-``n`` sign, log-magnitude and branch phase of ``Gamma(1+lam-kappa) W M``."""
    out = []
    for n in range(n_max + 1):
        lam = n + nu
        mu = lam + 0.5
        g_arg = 1.0 + lam - kappa
        g_sign = specfun.gamma_sign(g_arg)
        if g_sign == 0.0:
            # kappa is then exactly the principal number of the level
            raise NearPoleError(f"energy {energy!r} sits on the level with principal {kappa!r} (m={m})",
                                energy, kappa, m)
        w = specfun.whittaker_w(kappa, mu, x_big)
        mm = specfun.whittaker_m(-kappa, mu, -y_small)
        sign = g_sign * math.copysign(1.0, w.value) * math.copysign(1.0, mm.value)
        log_mag = (
            specfun.gamma_ln(g_arg) + w.log_abs() + mm.log_abs()
            + sp.gammaln(lam + nu + 1.0) - sp.gammaln(n + 1.0) - sp.gammaln(2.0 * lam + 1.0)
        )
        out.append((sign, log_mag, mm.phase))
    return out


def green_partial_wave(params: PhysParams, pts: EndpointPair, fe: FixedEnergy,
                       trunc: TruncationSpec = TruncationSpec(), *, guard: bool = True) -> AmplitudeValue:
    """Amplitude as a double sum over channels ``m`` and radial index ``n``.

    Each term, with ``nu = |m+alpha|``, ``lam = n + nu``, ``kappa = -xi/(2 omega)``::

        e^{i m dphi} e^{-i pi (nu + 1/2)} (-1)^{n+1} / pi
        * Gamma(lam+nu+1) / (Gamma(lam-nu+1) Gamma(2 lam+1)) * Gamma(1+lam-kappa)
        * P^{-nu}_lam(cos theta_a) P^{-nu}_lam(cos theta_b)
        * W_{kappa, lam+1/2}(4 M omega r_>) M_{-kappa, lam+1/2}(-4 M omega r_<)

    times ``1 / (8 omega r_a r_b)``. The Whittaker M at negative argument is
    taken on the principal branch; its phase and the explicit phases are
    accumulated per term.
    """
    pts.require_off_axis()
    ra, rb, c, s, d = _geometry(pts)
    if d <= 0:
        raise DomainError("endpoints coincide in (r, theta); the partial-wave sum diverges")
    window = m_window(params.flux, trunc.m_max)
    if guard:
        _guard_poles(params, fe, ((m, abs(m + params.flux)) for m in window), trunc.n_max)
    kappa = fe.kappa(params)
    mw = params.mass * fe.omega
    x_big = 4.0 * mw * max(ra, rb)
    y_small = 4.0 * mw * min(ra, rb)
    dphi = pts.b.phi - pts.a.phi
    m0 = window[trunc.m_max]
    radial_cache: dict[float, list] = {}
    total = 0j
    shell_m = 0.0
    shell_n = 0.0
    for j in range(trunc.m_max + 1):
        ring = [m0] if j == 0 else [m0 - j, m0 + j]
        part = 0j
        for m in ring:
            nu = abs(m + params.flux)
            pa = _ferrers_row(trunc.n_max, nu, pts.a.theta)
            pb = _ferrers_row(trunc.n_max, nu, pts.b.theta)
            key = round(nu, 15)
            if key not in radial_cache:
                radial_cache[key] = _radial_log_terms(nu, kappa, trunc.n_max, x_big, y_small, fe.energy, m)
            channel = 0j
            last = 0j
            for n, (sign, log_mag, branch) in enumerate(radial_cache[key]):
                phase = m * dphi - math.pi * (nu + 0.5) + math.pi * (n + 1) + branch
                mag = sign * pa[n] * pb[n] * math.exp(log_mag) / math.pi
                last = mag * complex(math.cos(phase), math.sin(phase))
                channel += last
            shell_n += abs(last)
            part += channel
        total += part
        shell_m = abs(part)
    pref = 1.0 / (8.0 * fe.omega * ra * rb)
    return AmplitudeValue(complex(pref * total), float(pref * (shell_m + shell_n)))


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: complex
    rel_err: float


def bessel_product_identity_check(arg: float, alpha_m: float, theta_a: float, theta_b: float,
                                  n_max: int = 30) -> IdentityCheck:
    """``I_nu(X c) I_nu(X s)`` against its expansion in ``I_{2 lam + 1}(X)`` and Ferrers functions.

    ``c = cos(theta_a/2) cos(theta_b/2)``, ``s = sin(theta_a/2) sin(theta_b/2)``.
    The expansion is written with ``J_{2lam+1}(iX) = e^{i pi (2lam+1)/2} I_{2lam+1}(X)``::

        e^{-i pi (nu + 1/2)} (2 pi / X) sum_n (-1)^n (2 lam + 1) Gamma(lam+nu+1)
            / (pi Gamma(lam-nu+1)) J_{2lam+1}(iX) P^{-nu}_lam(cos theta_a) P^{-nu}_lam(cos theta_b)

    with ``lam = n + nu``; the phases cancel and ``rhs`` is real up to rounding.
    """
    if not arg > 0:
        raise DomainError("arg must be positive")
    if not (0 < theta_a < math.pi and 0 < theta_b < math.pi):
        raise SingularConfigurationError("endpoint on flux axis")
    nu = abs(alpha_m)
    c = math.cos(0.5 * theta_a) * math.cos(0.5 * theta_b)
    s = math.sin(0.5 * theta_a) * math.sin(0.5 * theta_b)
    lhs_log = arg * (c + s)
    lhs = float(sp.ive(nu, arg * c) * sp.ive(nu, arg * s))
    pa = _ferrers_row(n_max, nu, theta_a)
    pb = _ferrers_row(n_max, nu, theta_b)
    rhs = 0j
    for n in range(n_max + 1):
        lam = n + nu
        i_big = specfun.bessel_i_scaled(2.0 * lam + 1.0, arg)
        log_mag = (
            math.log(2.0 * math.pi / arg) + math.log(2.0 * lam + 1.0) + sp.gammaln(lam + nu + 1.0)
            - math.log(math.pi) - sp.gammaln(lam - nu + 1.0) + i_big.scale_exponent - lhs_log
        )
        phase = -math.pi * (nu + 0.5) + math.pi * n + 0.5 * math.pi * (2.0 * lam + 1.0)
        rhs += i_big.value * pa[n] * pb[n] * math.exp(log_mag) * complex(math.cos(phase), math.sin(phase))
    scale = math.exp(lhs_log)
    lhs_full = lhs * scale
    rhs_full = rhs * scale
    return IdentityCheck(float(lhs_full), complex(rhs_full), float(abs(rhs - lhs) / abs(lhs)))


def _legendre_gamma_ratio(lam: float, mu: float, nu: float) -> float:
    num_log = math.log(math.pi) + mu * math.log(2.0)
    num_log += specfun.gamma_ln(lam + 0.5 * mu) + specfun.gamma_ln(lam - 0.5 * mu)
    sign = specfun.gamma_sign(lam + 0.5 * mu) * specfun.gamma_sign(lam - 0.5 * mu)
    inv = 1.0
    for x in (lam + 0.5 * nu + 0.5, lam - 0.5 * nu, 1.0 - 0.5 * mu + 0.5 * nu, 0.5 - 0.5 * mu - 0.5 * nu):
        inv *= specfun.recip_gamma(x)
    return sign * math.exp(num_log) * inv


_EDGE = 1e-150


def legendre_integral_identity_check(lam: float, mu: float, nu: float,
                                     rtol: float = 1e-13) -> IdentityCheck:
    """``int_{-1}^{1} (1-x^2)^(lam-1) P^mu_nu(x) dx`` by quadrature against its Gamma-ratio closed form.

    ``rel_err`` is relative to the closed form, or absolute when the closed
    form vanishes.
    """
    if not (lam - 0.5 * abs(mu) > 0):
        raise DomainError("integral diverges unless lam > |mu|/2")
    rhs = _legendre_gamma_ratio(lam, mu, nu)

    def f(x, da, db):
        # da = 1 + x, db = 1 - x, both exact; nodes within _EDGE of an endpoint
        # are dropped, an error of order _EDGE**(lam - |mu|/2)
        out = np.zeros_like(x)
        for i, (xi, d0, d1) in enumerate(zip(x.tolist(), da.tolist(), db.tolist())):
            if min(d0, d1) < _EDGE:
                continue
            weight = math.exp((lam - 1.0) * (math.log(d0) + math.log(d1)))
            out[i] = weight * specfun.assoc_legendre(nu, mu, xi, omx=d1, opx=d0)
        return out

    lhs, _ = tanh_sinh(f, -1.0, 1.0, rtol=rtol, atol=1e-15)
    err = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs - rhs)
    return IdentityCheck(lhs, rhs, err)


def oscillator_sum_reduction_check(params: PhysParams, pts: EndpointPair, gamma_b: float,
                                   fe: FixedEnergy, trunc: TruncationSpec = TruncationSpec(m_max=4),
                                   q_values: Sequence[float] = (0.3, 0.8, 1.5, 3.0),
                                   n_gamma: int | None = None) -> float:
    """Average the two-plane oscillator double sum over the fiber angle and compare with the diagonal sum.

    At each ``q`` the double sum over ``(m1, m2)``, built from the
    double-polar coordinates of both endpoints, is integrated over
    ``gamma_a`` in ``[0, 4 pi)`` by the trapezoid rule and divided by
    ``4 pi``. It is compared with the single sum over ``m`` of
    ``e^{i m (phi_b - phi_a)} I_nu(X c) I_nu(X s)``. Common ``q``-dependent
    prefactors multiply both sides and are included. Returns the largest
    relative deviation.
    """
    pts.require_off_axis()
    m_list = list(m_window(params.flux, trunc.m_max))
    mw = params.mass * fe.omega
    kappa = fe.kappa(params)
    ra, rb, c, s, d = _geometry(pts)
    n_gamma = n_gamma or 8 * (2 * trunc.m_max + 1) + 1
    gammas = np.arange(n_gamma) * (GAMMA_PERIOD / n_gamma)
    dpb = spherical_to_double_polar(pts.b, gamma_b)
    worst = 0.0
    for q in q_values:
        sinh_q = math.sinh(q)
        pref = math.exp(2.0 * kappa * q - 2.0 * mw * (ra + rb) / math.tanh(q)) / sinh_q**2
        diag = 0j
        for m in m_list:
            nu = abs(m + params.flux)
            x = 4.0 * mw * math.sqrt(ra * rb) / sinh_q
            diag += complex(math.cos(m * (pts.b.phi - pts.a.phi)), math.sin(m * (pts.b.phi - pts.a.phi))) * (
                sp.iv(nu, x * c) * sp.iv(nu, x * s)
            )
        acc = 0j
        for g in gammas:
            dpa = spherical_to_double_polar(pts.a, float(g))
            k1 = 4.0 * mw * dpa.rho1 * dpb.rho1 / sinh_q
            k2 = 4.0 * mw * dpa.rho2 * dpb.rho2 / sinh_q
            plane1 = sum(
                complex(math.cos(m * (dpb.theta1 - dpa.theta1)), math.sin(m * (dpb.theta1 - dpa.theta1)))
                * sp.iv(abs(m + params.flux), k1)
                for m in m_list
            )
            plane2 = sum(
                complex(math.cos(m * (dpb.theta2 - dpa.theta2)), math.sin(m * (dpb.theta2 - dpa.theta2)))
                * sp.iv(abs(m + params.flux), k2)
                for m in m_list
            )
            acc += plane1 * plane2
        averaged = pref * acc / n_gamma
        target = pref * diag
        worst = max(worst, abs(averaged - target) / abs(target))
    return worst


# ---------------------------------------------------------------------------
# pole location
# ---------------------------------------------------------------------------


def _inverse_amplitude(params, pts, e, trunc):
    g = green_partial_wave(params, pts, FixedEnergy.from_energy(params, e), trunc, guard=False).value
    return 1.0 / g


def pole_scan(params: PhysParams, pts: EndpointPair, e_grid: Sequence[float],
              trunc: TruncationSpec = TruncationSpec(m_max=6, n_max=20),
              min_growth: float = 1e3, neighborhood: int = 3) -> list[PoleEstimate]:
    """Locate poles of the partial-wave amplitude on an energy grid.

    Grid local maxima of ``|G|`` are refined by bisection on the sign of
    ``Re(h(E) conj(h(hi) - h(lo)))`` with ``h = 1/G``, which crosses zero
    at the pole, until the bracket is below ``1e-8 |E|``. ``growth`` is
    ``|G|`` at ``1e-6 |E*|`` from the pole divided by the median ``|G|``
    over ``neighborhood`` grid points on each side; poles with growth
    below ``min_growth`` are dropped.
    """
    e_grid = [float(e) for e in e_grid]
    if any(e >= 0 for e in e_grid):
        raise DomainError("energy grid must be negative")
    if any(b <= a for a, b in zip(e_grid, e_grid[1:])):
        raise DomainError("energy grid must be strictly increasing")
    pts.require_off_axis()
    mags = [
        abs(green_partial_wave(params, pts, FixedEnergy.from_energy(params, e), trunc, guard=False).value)
        for e in e_grid
    ]
    found: list[PoleEstimate] = []
    for i in range(len(e_grid)):
        left = mags[i - 1] if i > 0 else -math.inf
        right = mags[i + 1] if i + 1 < len(mags) else -math.inf
        if not (mags[i] > left and mags[i] > right):
            continue
        # bracket on the side where |G| is larger
        candidates = []
        if i > 0:
            candidates.append((e_grid[i - 1], e_grid[i]))
        if i + 1 < len(e_grid):
            candidates.append((e_grid[i], e_grid[i + 1]))
        for lo, hi in candidates:
            pole = _bisect_pole(params, pts, lo, hi, trunc)
            if pole is None:
                continue
            nb = mags[max(0, i - neighborhood): i + neighborhood + 1]
            baseline = float(np.median(nb))
            probe = 1e-6 * abs(pole)
            near = min(
                abs(1.0 / _inverse_amplitude(params, pts, pole - probe, trunc)),
                abs(1.0 / _inverse_amplitude(params, pts, pole + probe, trunc)),
            )
            growth = near / baseline
            if growth >= min_growth:
                found.append(PoleEstimate(pole, growth))
            break
    return found


def _bisect_pole(params, pts, lo, hi, trunc):
    h_lo = _inverse_amplitude(params, pts, lo, trunc)
    h_hi = _inverse_amplitude(params, pts, hi, trunc)
    slope = h_hi - h_lo
    if slope == 0:
        return None

    def side(h):
        return (h * slope.conjugate()).real

    s_lo, s_hi = side(h_lo), side(h_hi)
    if s_lo > 0 or s_hi < 0:
        return None
    while hi - lo > 1e-8 * abs(0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        if side(_inverse_amplitude(params, pts, mid, trunc)) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
