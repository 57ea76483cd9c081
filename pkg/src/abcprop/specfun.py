"""Special-function kernel with real, non-integer orders and degrees.

Every function takes real parameters. Quantities that can overflow are
returned as :class:`SpecialValue`, i.e. ``value * exp(scale_exponent)``
(times ``exp(i*phase)`` when a branch phase is involved), so that callers
can combine large and small factors in log space.

Gamma, digamma and the exponentially scaled Bessel function come from
:mod:`scipy.special`; the hypergeometric, Whittaker and Ferrers functions are
implemented here because their non-integer parameter ranges are not covered
accurately there.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError

__all__ = [
    "SpecialValue",
    "gamma_ln",
    "gamma_sign",
    "recip_gamma",
    "bessel_i_scaled",
    "kummer_m",
    "tricomi_u",
    "whittaker_m",
    "whittaker_w",
    "gauss_2f1",
    "gauss_2f1_regularized",
    "assoc_legendre",
    "ferrers_negative_order",
]

_EPS = np.finfo(float).eps
_MAX_TERMS = 20000


@dataclass(frozen=True)
class SpecialValue:
    """A real number held as ``value * exp(scale_exponent) * exp(i*phase)``.

    ``phase`` is zero except for Whittaker M at negative argument, where the
    principal-branch factor ``exp(i*pi*(mu+1/2))`` is kept symbolic.
    """

    value: float
    scale_exponent: float = 0.0
    phase: float = 0.0

    @property
    def is_complex(self) -> bool:
        return self.phase != 0.0

    def log_abs(self) -> float:
        if self.value == 0:
            return -math.inf
        return math.log(abs(self.value)) + self.scale_exponent

    def sign(self) -> float:
        return math.copysign(1.0, self.value) if self.value != 0 else 0.0

    def real_part_scaled(self) -> float:
        """``value * exp(scale_exponent)``, ignoring ``phase``."""
        if self.value == 0:
            return 0.0
        return self.value * math.exp(self.scale_exponent)

    def resolve(self) -> float | complex:
        """Recombine into a plain float (or complex when a phase is present)."""
        mag = self.real_part_scaled()
        if self.phase == 0.0:
            return mag
        return mag * complex(math.cos(self.phase), math.sin(self.phase))

    def __float__(self) -> float:
        if self.phase != 0.0:
            raise TypeError("SpecialValue carries a complex phase; use resolve()")
        return self.real_part_scaled()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma_ln(x: float) -> float:
    """``ln|Gamma(x)|``; raises :class:`DomainError` at the poles."""
    if not math.isfinite(x):
        raise DomainError(f"gamma_ln: non-finite argument {x!r}")
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma_ln: pole of Gamma at x={x}")
    return float(sp.gammaln(x))


def gamma_sign(x: float) -> float:
    """Sign of ``Gamma(x)``; 0 at the poles."""
    if _is_nonpositive_integer(x):
        return 0.0
    return float(sp.gammasgn(x))


def recip_gamma(x: float) -> float:
    """``1/Gamma(x)``, exactly zero at non-positive integers."""
    if _is_nonpositive_integer(x):
        return 0.0
    return float(sp.rgamma(x))


def bessel_i_scaled(nu: float, x: float) -> SpecialValue:
    """Modified Bessel ``I_nu(x)`` as ``exp(-x) I_nu(x)`` with scale ``x``."""
    if not nu >= 0:
        raise DomainError(f"bessel_i_scaled: order must be >= 0, got {nu}")
    if not x >= 0:
        raise DomainError(f"bessel_i_scaled: argument must be >= 0, got {x}")
    return SpecialValue(float(sp.ive(nu, x)), float(x))


# ---------------------------------------------------------------------------
# Confluent hypergeometric functions
# ---------------------------------------------------------------------------


def _kummer_series(a: float, b: float, z: float) -> tuple[float, float]:
    """Series for M(a, b, z) as (value, log-scale); periodically renormalised."""
    term = 1.0
    total = 1.0
    scale = 0.0
    k = 0
    while True:
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        k += 1
        if abs(total) > 1e250:
            term /= 1e250
            total /= 1e250
            scale += math.log(1e250)
        if term == 0.0:
            break
        if k > abs(z) and abs(term) <= _EPS * 0.25 * abs(total):
            break
        if k > _MAX_TERMS:
            break
    return total, scale


def kummer_m(a: float, b: float, z: float) -> SpecialValue:
    """Kummer's function ``M(a, b, z) = 1F1(a; b; z)``.

    Negative arguments go through ``M(a, b, z) = exp(z) M(b-a, b, -z)`` so
    the series is summed at a positive argument.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"kummer_m: b={b} is a pole of the series")
    if z == 0:
        return SpecialValue(1.0)
    if z < 0:
        if _is_nonpositive_integer(a):
            val, sc = _kummer_series(a, b, z)  # terminating polynomial
            return SpecialValue(val, sc)
        val, sc = _kummer_series(b - a, b, -z)
        return SpecialValue(val, sc + z)
    val, sc = _kummer_series(a, b, z)
    return SpecialValue(val, sc)


def _log_u_integrand(v, a, c, z, t0):
    t = t0 * np.exp(v)
    return -z * t + a * np.log(t) + c * np.log1p(t)


def _tricomi_u_positive(a: float, b: float, z: float) -> tuple[float, float]:
    """U(a, b, z) for a >= 1, z > 0 from its Laplace-integral representation.

    Returns (value, log-scale). The integral is taken in ``v = ln t`` with a
    trapezoid rule, which converges geometrically for this analytic integrand.
    """
    c = b - a - 1.0
    # stationary point of t^a (1+t)^c e^{-zt} in v = ln t
    p = a + c - z
    t0 = (p + math.sqrt(p * p + 4.0 * z * a)) / (2.0 * z)
    peak = -z * t0 + a * math.log(t0) + c * math.log1p(t0)
    # bracket where the log-integrand has dropped by 45 below its peak
    lo = -1.0
    while _log_u_integrand(lo, a, c, z, t0) - peak > -45.0:
        lo *= 2.0
    hi = 1.0
    while _log_u_integrand(hi, a, c, z, t0) - peak > -45.0:
        hi *= 2.0
    # nested grids anchored at the peak, so each halving only adds midpoints
    h = min(0.25, 0.5 / math.sqrt(a + abs(c) + 1.0))
    prev = None
    for _ in range(12):
        v = np.arange(math.floor(lo / h), math.ceil(hi / h) + 1) * h
        s = h * math.fsum(np.exp(_log_u_integrand(v, a, c, z, t0) - peak))
        if prev is not None and abs(s - prev) <= 4e-16 * abs(s):
            break
        prev = s
        h *= 0.5
    log_val = math.log(s) + peak - float(sp.gammaln(a))
    return 1.0, log_val


def tricomi_u(a: float, b: float, z: float) -> SpecialValue:
    """Tricomi's confluent hypergeometric function ``U(a, b, z)`` for z > 0.

    For ``a < 1`` the value is obtained from ``U(a+K)`` and ``U(a+K+1)`` by
    the downward recurrence in ``a``, in which U is the minimal solution.
    """
    if not z > 0:
        raise DomainError(f"tricomi_u: requires z > 0, got {z}")
    if a >= 1.0:
        v, s = _tricomi_u_positive(a, b, z)
        return SpecialValue(v, s)
    shift = int(math.ceil(1.0 - a))
    top = a + shift
    v1, s1 = _tricomi_u_positive(top, b, z)
    v2, s2 = _tricomi_u_positive(top + 1.0, b, z)
    ref = s1
    u_hi = v2 * math.exp(s2 - ref)  # U(x+1)
    u_mid = v1  # U(x)
    x = top
    for _ in range(shift):
        u_lo = -(b - 2.0 * x - z) * u_mid - x * (x - b + 1.0) * u_hi
        u_hi, u_mid = u_mid, u_lo
        x -= 1.0
        mag = abs(u_mid)
        if mag > 1e200 or (0 < mag < 1e-200):
            sc = math.log(mag)
            u_mid /= mag
            u_hi /= mag
            ref += sc
    return SpecialValue(u_mid, ref)


def whittaker_m(kappa: float, mu: float, z: float) -> SpecialValue:
    """Whittaker ``M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} M(mu-kappa+1/2, 1+2mu, z)``.

    For ``z < 0`` the principal branch ``z^{mu+1/2} = |z|^{mu+1/2}
    e^{i pi (mu+1/2)}`` is used; the phase is returned symbolically in
    ``SpecialValue.phase``.
    """
    b = 1.0 + 2.0 * mu
    if _is_nonpositive_integer(b):
        raise DomainError(f"whittaker_m: 1+2mu={b} is a non-positive integer")
    a = mu - kappa + 0.5
    if z == 0:
        if mu + 0.5 > 0:
            return SpecialValue(0.0)
        raise DomainError("whittaker_m: singular at z=0 for mu <= -1/2")
    km = kummer_m(a, b, z)
    scale = km.scale_exponent - 0.5 * z + (mu + 0.5) * math.log(abs(z))
    phase = math.pi * (mu + 0.5) if z < 0 else 0.0
    return SpecialValue(km.value, scale, phase)


def whittaker_w(kappa: float, mu: float, z: float) -> SpecialValue:
    """Whittaker ``W_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} U(mu-kappa+1/2, 1+2mu, z)``, z > 0."""
    if not z > 0:
        raise DomainError(f"whittaker_w: requires z > 0, got {z}")
    u = tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z)
    scale = u.scale_exponent - 0.5 * z + (mu + 0.5) * math.log(z)
    return SpecialValue(u.value, scale)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function
# ---------------------------------------------------------------------------


def _poch(x: float, n: int) -> float:
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def _f21_reg_series(a: float, b: float, c: float, z: float) -> float:
    """sum_k (a)_k (b)_k / (k! Gamma(c+k)) z^k, pole-safe in c.

    When the terms cancel by more than three digits the sum is repeated in
    decimal arithmetic with enough guard digits to absorb the cancellation.
    """
    k0 = 0
    if _is_nonpositive_integer(c):
        k0 = int(1 - c)  # first index with c + k0 >= 1
        term = _poch(a, k0) * _poch(b, k0) / math.factorial(k0) * z**k0 * recip_gamma(c + k0)
    else:
        term = recip_gamma(c)
    if term == 0.0:
        return 0.0
    total = term
    biggest = abs(term)
    k = k0
    terminating = _is_nonpositive_integer(a) or _is_nonpositive_integer(b)
    while True:
        term *= (a + k) * (b + k) * z / ((k + 1) * (c + k))
        k += 1
        total += term
        biggest = max(biggest, abs(term))
        if term == 0.0:
            if terminating or k > 2:
                break
        elif abs(term) <= _EPS * 0.1 * abs(total) and k > 2:
            break
        if k > _MAX_TERMS:
            break
    if biggest > 1e3 * abs(total):
        return _f21_reg_series_decimal(a, b, c, z, k0, biggest / max(abs(total), 1e-300))
    return total


def _f21_reg_series_decimal(a: float, b: float, c: float, z: float, k0: int,
                            loss: float) -> float:
    digits = 20 + int(math.log10(loss)) + 5
    while True:
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            D = decimal.Decimal
            da, db, dc, dz = D(a), D(b), D(c), D(z)
            if k0:
                term = D(_poch(a, k0) * _poch(b, k0) / math.factorial(k0) * recip_gamma(c + k0)) * dz**k0
            else:
                term = D(recip_gamma(c))
            total = term
            biggest = abs(term)
            tol = abs(term) * D(10) ** (-digits)
            k = k0
            while True:
                term = term * (da + k) * (db + k) * dz / ((k + 1) * (dc + k))
                k += 1
                total += term
                biggest = max(biggest, abs(term))
                if term == 0 or (k > 2 and abs(term) <= D(10) ** -20 * abs(total)):
                    break
                if k > _MAX_TERMS:
                    break
            if total != 0 and biggest <= abs(total) * D(10) ** (digits - 20):
                return float(total)
            if total == 0 and biggest <= tol:
                return 0.0
        digits *= 2
        if digits > 2000:
            return float(total)


def _f21_reg_one_minus_z_integer(a: float, b: float, m: int, w: float) -> float:
    """F(a,b;a+b+m;1-w)/Gamma(a+b+m) for integer m >= 0 (logarithmic case)."""
    psi = sp.digamma
    total = 0.0
    if m > 0:
        pre = math.gamma(m) * recip_gamma(a + m) * recip_gamma(b + m)
        t = 1.0
        s = 0.0
        for n in range(m):
            if n > 0:
                t *= (a + n - 1) * (b + n - 1) / (n * (1 - m + n - 1)) * w
            s += t
        total += pre * s
    pre2 = (-1) ** m * recip_gamma(a) * recip_gamma(b)
    if pre2 == 0.0:
        return total
    lw = math.log(w)
    t = 1.0 / math.factorial(m)
    s = 0.0
    n = 0
    while True:
        bracket = lw - psi(n + 1) - psi(n + m + 1) + psi(a + n + m) + psi(b + n + m)
        contrib = t * bracket
        s += contrib
        t *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * w
        n += 1
        if abs(t) * (abs(lw) + 10.0 + math.log(n + m + 2)) <= _EPS * 0.1 * abs(s) and n > 2:
            break
        if n > _MAX_TERMS:
            break
    total -= pre2 * w**m * s
    return total


def gauss_2f1_regularized(a: float, b: float, c: float, z: float) -> float:
    """``2F1(a, b; c; z) / Gamma(c)`` for real ``-1 < z < 1``.

    Finite for every ``c``, including non-positive integers. Arguments above
    1/2 are mapped to ``1 - z`` (logarithmic formulas when ``c - a - b`` is an
    integer); negative arguments use the Pfaff transformation.
    """
    if not -1.0 < z < 1.0:
        raise DomainError(f"gauss_2f1: |z| < 1 required, got {z}")
    w = 1.0 - z
    return _f21_reg(a, b, c, z, w)


def _f21_reg(a: float, b: float, c: float, z: float, w: float) -> float:
    """Regularised 2F1 with ``w = 1 - z`` supplied exactly by the caller."""
    if z == 0.0:
        return recip_gamma(c)
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _f21_reg_series(a, b, c, z)
    if z < 0:
        # Pfaff: (1-z)^{-a} F(a, c-b; c; z/(z-1))
        zz = z / (z - 1.0)
        return w ** (-a) * _f21_reg(a, c - b, c, zz, 1.0 / w)
    if z <= 0.5:
        return _f21_reg_series(a, b, c, z)
    s = c - a - b
    si = round(s)
    if abs(s - si) < 1e-13 * max(1.0, abs(s)):
        m = int(si)
        if m >= 0:
            return _f21_reg_one_minus_z_integer(a, b, m, w)
        # Euler: F(a,b;c;z) = w^{c-a-b} F(c-a, c-b; c; z), reversing the sign of m
        aa, bb = c - a, c - b
        if _is_nonpositive_integer(aa) or _is_nonpositive_integer(bb):
            return w**s * _f21_reg_series(aa, bb, c, z)
        return w**s * _f21_reg_one_minus_z_integer(aa, bb, -m, w)
    if abs(s - si) < 1e-5 and z < 0.995:
        # near-integer c-a-b: the connection formula cancels, the series does not
        return _f21_reg_series(a, b, c, z)
    # DLMF 15.8.4 with Gamma(s) Gamma(1-s) = pi / sin(pi s)
    pis = math.pi / math.sin(math.pi * s)
    t1 = pis * recip_gamma(c - a) * recip_gamma(c - b) * _f21_reg_series(a, b, 1.0 - s, w)
    t2 = pis * recip_gamma(a) * recip_gamma(b) * w**s * _f21_reg_series(c - a, c - b, 1.0 + s, w)
    return t1 - t2


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric ``2F1(a, b; c; z)`` for real ``-1 < z < 1``."""
    if _is_nonpositive_integer(c):
        raise DomainError(f"gauss_2f1: c={c} is a pole")
    reg = gauss_2f1_regularized(a, b, c, z)
    return reg * gamma_sign(c) * math.exp(gamma_ln(c))


# ---------------------------------------------------------------------------
# Ferrers (associated Legendre) functions on the cut
# ---------------------------------------------------------------------------


def ferrers_negative_order(n_max: int, nu: float, x: float, omx: float | None = None,
                           opx: float | None = None) -> np.ndarray:
    """``P^{-nu}_{n+nu}(x)`` for ``n = 0..n_max`` by Gegenbauer recurrence.

    Uses ``P^{-nu}_{n+nu}(x) = Gamma(2nu+1) n! / (2^nu Gamma(nu+1) Gamma(n+2nu+1))
    * (1-x^2)^{nu/2} C_n^{(nu+1/2)}(x)``; the three-term recurrence for
    ``C_n`` is stable for all ``n``, unlike the hypergeometric series.
    ``omx``/``opx`` may carry ``1-x`` and ``1+x`` exactly.
    """
    if nu < 0:
        raise DomainError("ferrers_negative_order: nu must be >= 0")
    if omx is None:
        omx = 1.0 - x
    if opx is None:
        opx = 1.0 + x
    lam = nu + 0.5
    c = np.empty(n_max + 1)
    c[0] = 1.0
    if n_max >= 1:
        c[1] = 2.0 * lam * x
    for n in range(1, n_max):
        c[n + 1] = (2.0 * (n + lam) * x * c[n] - (n + 2.0 * lam - 1.0) * c[n - 1]) / (n + 1)
    n = np.arange(n_max + 1)
    log_pre = (sp.gammaln(2 * nu + 1) + sp.gammaln(n + 1) - nu * math.log(2.0)
               - sp.gammaln(nu + 1) - sp.gammaln(n + 2 * nu + 1))
    sin_pow = (omx * opx) ** (0.5 * nu) if nu != 0 else 1.0
    return np.exp(log_pre) * sin_pow * c


def _ferrers_halves(nu: float, mu: float, z: float, w: float) -> float:
    """P^mu_nu at x = 1 - 2z (z = (1-x)/2, w = (1+x)/2 given exactly)."""
    pre = math.exp(0.5 * mu * (math.log(w) - math.log(z))) if mu != 0 else 1.0
    return pre * _f21_reg(-nu, nu + 1.0, 1.0 - mu, z, w)


def _near_integer(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol * max(1.0, abs(x))


def assoc_legendre(nu: float, mu: float, x: float, *, omx: float | None = None,
                   opx: float | None = None) -> float:
    """Ferrers function of the first kind ``P^mu_nu(x)`` on ``-1 < x < 1``.

    Defined by ``P^mu_nu(x) = ((1+x)/(1-x))^{mu/2} 2F1(-nu, nu+1; 1-mu; (1-x)/2)
    / Gamma(1-mu)`` (Condon-Shortley phase included), with ``1/Gamma`` folded
    into the series so integer orders are handled without special cases.
    Optional ``omx``, ``opx`` give ``1-x``, ``1+x`` exactly near the endpoints.
    """
    if omx is None:
        omx = 1.0 - x
    if opx is None:
        opx = 1.0 + x
    if not (omx > 0 and opx > 0):
        raise DomainError(f"assoc_legendre: |x| < 1 required, got {x}")
    # P^mu_nu = P^mu_{-nu-1}; take the representative with nu >= -1/2
    if nu < -0.5:
        nu = -nu - 1.0
    # degree minus |order| a non-negative integer: stable recurrence
    if mu <= 0 and _near_integer(nu + mu) and round(nu + mu) >= 0:
        n = int(round(nu + mu))
        return float(ferrers_negative_order(n, -mu, x, omx, opx)[n])
    if mu > 0 and _near_integer(mu) and _near_integer(nu) and round(nu) >= round(mu):
        m, n = int(round(mu)), int(round(nu))
        ratio = math.exp(math.lgamma(n + m + 1) - math.lgamma(n - m + 1))
        return (-1) ** m * ratio * float(ferrers_negative_order(n - m, float(m), x, omx, opx)[n - m])
    z, w = 0.5 * omx, 0.5 * opx
    if z <= 0.5 or not _near_integer(nu + mu) or round(nu + mu) < 0:
        return _ferrers_halves(nu, mu, z, w)
    # reflection P^mu_nu(-x) = cos((nu+mu) pi) P^mu_nu(x) - (2/pi) sin((nu+mu) pi) Q^mu_nu(x);
    # the Q term drops only when nu + mu is a non-negative integer (Q is finite there)
    return (-1) ** int(round(nu + mu)) * _ferrers_halves(nu, mu, w, z)
