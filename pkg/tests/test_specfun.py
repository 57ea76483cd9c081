import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from abcprop import specfun as sf
from abcprop.errors import DomainError

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / abs(b)


def ferrers_ref(nu, mu, x):
    try:
        return float(mp.legenp(nu, mu, x, type=2))
    except ValueError:  # mpmath cannot certify digits at an exact zero
        return 0.0


# frozen 30-digit values
RECIP_GAMMA_4_3 = 0.11292616890111501435
SCALED_I_1_3_AT_37 = 0.064304512464910118158
WHITTAKER_M_NEG = -82.194960881250509656
FERRERS_1_7_0_4 = -0.61124317034709096281
F21_SPOT = 1.5164147784250471579


class TestGamma:
    def test_gamma_ln_half(self):
        assert sf.gamma_ln(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)

    def test_gamma_ln_pole_rejected(self):
        with pytest.raises(DomainError):
            sf.gamma_ln(-2.0)

    @pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
    def test_recip_gamma_zero_at_poles(self, x):
        assert sf.recip_gamma(x) == 0.0

    def test_recip_gamma_frozen(self):
        assert rel(sf.recip_gamma(4.3), RECIP_GAMMA_4_3) <= 1e-13

    def test_gamma_sign(self):
        assert sf.gamma_sign(-0.5) == -1.0
        assert sf.gamma_sign(-1.5) == 1.0
        assert sf.gamma_sign(-3.0) == 0.0


class TestBessel:
    def test_origin(self):
        v = sf.bessel_i_scaled(0.0, 0.0)
        assert v.value == 1.0 and v.scale_exponent == 0.0

    def test_half_integer_closed_form(self):
        v = sf.bessel_i_scaled(0.5, 1.0)
        assert rel(float(v), math.sqrt(2 / math.pi) * math.sinh(1.0)) <= 1e-14

    def test_frozen_large_argument(self):
        assert rel(sf.bessel_i_scaled(1.3, 37.0).value, SCALED_I_1_3_AT_37) <= 1e-12

    def test_large_argument_finite(self):
        v = sf.bessel_i_scaled(2.7, 1e4)
        ref = mp.besseli(2.7, 10000) * mp.exp(-10000)
        assert rel(v.value, float(ref)) <= 1e-12

    @pytest.mark.parametrize("nu,x", [(-1.0, 1.0), (1.0, -0.5)])
    def test_domain(self, nu, x):
        with pytest.raises(DomainError):
            sf.bessel_i_scaled(nu, x)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 20.0), st.floats(0.1, 100.0))
    def test_recurrence(self, nu, x):
        # I_{nu} - I_{nu+2} = 2 (nu+1)/x I_{nu+1}, all orders non-negative
        lo, mid, hi = (sf.bessel_i_scaled(nu + d, x).value for d in (0.0, 1.0, 2.0))
        rhs = 2 * (nu + 1) / x * mid
        assert abs(lo - hi - rhs) <= 1e-10 * max(abs(lo), abs(rhs))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 10.0), st.floats(0.01, 30.0))
    def test_scaling_recomposition(self, nu, x):
        direct = float(mp.besseli(nu, x))
        assert rel(float(sf.bessel_i_scaled(nu, x)), direct) <= 1e-12


class TestConfluent:
    def test_kummer_at_zero(self):
        assert float(sf.kummer_m(0.3, 1.7, 0.0)) == 1.0

    def test_kummer_pole(self):
        with pytest.raises(DomainError):
            sf.kummer_m(0.5, -2.0, 1.0)

    @pytest.mark.parametrize("a,b,z", [(0.3, 1.7, 2.5), (-2.4, 3.1, -6.0), (5.5, 12.0, 40.0), (0.7, 2.2, -45.0)])
    def test_kummer_vs_mpmath(self, a, b, z):
        v = sf.kummer_m(a, b, z)
        ref = mp.hyp1f1(a, b, z)
        assert rel(v.real_part_scaled(), float(ref)) <= 1e-12

    @pytest.mark.parametrize("a,b,z", [(1.5, 2.2, 0.7), (0.3, 3.4, 5.0), (-1.7, 2.1, 3.3), (-4.2, 1.5, 9.0), (8.0, 18.0, 30.0)])
    def test_tricomi_vs_mpmath(self, a, b, z):
        v = sf.tricomi_u(a, b, z)
        assert rel(v.real_part_scaled(), float(mp.hyperu(a, b, z))) <= 1e-10

    def test_tricomi_domain(self):
        with pytest.raises(DomainError):
            sf.tricomi_u(1.0, 1.0, 0.0)

    def test_whittaker_m_small_z(self):
        for z in (1e-3, 1e-5):
            assert float(sf.whittaker_m(0.0, 0.5, z)) / z == pytest.approx(1.0, abs=2 * z)

    def test_whittaker_m_negative_argument_frozen(self):
        v = sf.whittaker_m(1.5, 2.5, -3.2).resolve()
        assert abs(complex(v) - WHITTAKER_M_NEG) <= 1e-11 * abs(WHITTAKER_M_NEG)

    @pytest.mark.parametrize("k,mu,z", [(1.2, 1.8, -2.5), (-0.7, 0.9, -11.0), (2.6, 3.3, -0.4)])
    def test_whittaker_m_principal_branch(self, k, mu, z):
        v = complex(sf.whittaker_m(k, mu, z).resolve())
        ref = complex(mp.whitm(k, mu, z))
        assert abs(v - ref) <= 1e-11 * abs(ref)

    @pytest.mark.parametrize("k,mu,z", [(1.2, 1.8, 2.5), (-0.7, 0.9, 11.0), (2.6, 3.3, 0.4), (1.9, 7.5, 6.0)])
    def test_whittaker_vs_mpmath(self, k, mu, z):
        assert rel(float(sf.whittaker_m(k, mu, z)), float(mp.whitm(k, mu, z))) <= 1e-12
        assert rel(float(sf.whittaker_w(k, mu, z)), float(mp.whitw(k, mu, z))) <= 1e-10

    def test_whittaker_w_asymptotic(self):
        k, mu, z = 0.8, 0.6, 400.0
        lead = math.exp(-z / 2) * z**k
        assert float(sf.whittaker_w(k, mu, z)) / lead == pytest.approx(1.0, abs=5.0 / z)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-2.0, 2.0), st.floats(0.1, 4.0), st.floats(0.5, 20.0))
    def test_wronskian(self, k, mu, z):
        # W M' - W' M = Gamma(1+2mu) / Gamma(mu-k+1/2)
        h = 1e-5 * z
        m0, w0 = float(sf.whittaker_m(k, mu, z)), float(sf.whittaker_w(k, mu, z))
        dm = (float(sf.whittaker_m(k, mu, z + h)) - float(sf.whittaker_m(k, mu, z - h))) / (2 * h)
        dw = (float(sf.whittaker_w(k, mu, z + h)) - float(sf.whittaker_w(k, mu, z - h))) / (2 * h)
        expected = float(mp.gamma(1 + 2 * mu) * mp.rgamma(mu - k + 0.5))
        scale = abs(w0 * dm) + abs(dw * m0)
        assert abs((w0 * dm - dw * m0) - expected) <= 1e-6 * max(scale, abs(expected))


class TestHypergeometric:
    def test_at_zero(self):
        assert sf.gauss_2f1(0.3, 1.2, 2.7, 0.0) == 1.0

    def test_frozen(self):
        assert rel(sf.gauss_2f1(0.5, 1.5, 2.0, 0.7), F21_SPOT) <= 1e-12

    def test_pole(self):
        with pytest.raises(DomainError):
            sf.gauss_2f1(0.5, 0.5, -1.0, 0.3)

    def test_outside_disc(self):
        with pytest.raises(DomainError):
            sf.gauss_2f1(0.5, 0.5, 1.5, 1.2)

    @pytest.mark.parametrize(
        "a,b,c,z",
        [(-3.7, 4.7, 0.6, 0.4), (-12.3, 13.3, 1.0, 0.95), (0.2, 0.9, 1.1, 0.99), (2.5, -1.2, 3.5, -0.8),
         (-20.4, 21.4, 0.3, 0.5), (1.0, 2.0, 3.0, 0.9999)],
    )
    def test_vs_mpmath(self, a, b, c, z):
        assert rel(sf.gauss_2f1(a, b, c, z), float(mp.hyp2f1(a, b, c, z))) <= 1e-12


class TestLegendre:
    def test_p1(self):
        assert sf.assoc_legendre(1.0, 0.0, 0.3) == pytest.approx(0.3, rel=1e-14)

    def test_p2(self):
        x = 0.5
        assert sf.assoc_legendre(2.0, 0.0, x) == pytest.approx((3 * x * x - 1) / 2, rel=1e-14)

    def test_frozen(self):
        assert rel(sf.assoc_legendre(1.7, 0.4, -0.2), FERRERS_1_7_0_4) <= 1e-11

    @pytest.mark.parametrize("x", [1.0, -1.0, 1.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            sf.assoc_legendre(1.2, 0.3, x)

    @pytest.mark.parametrize("n", range(11))
    def test_integer_degree(self, n):
        for m in range(n + 1):
            for x in (-0.83, -0.2, 0.05, 0.61, 0.97):
                ref = sps.lpmv(m, n, x)
                got = sf.assoc_legendre(float(n), float(m), x)
                assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 12.0), st.floats(-3.0, 3.0), st.floats(-0.98, 0.98))
    def test_vs_mpmath(self, nu, mu, x):
        self._compare(nu, mu, x)

    @staticmethod
    def _compare(nu, mu, x):
        ref = ferrers_ref(nu, mu, x)
        got = sf.assoc_legendre(nu, mu, x)
        # absolute floor near zeros of the function
        size = max(abs(ferrers_ref(nu, mu, t)) for t in (-0.5, 0.1, 0.5))
        # below 1e-100 the reference cannot resolve the function from zero
        assert abs(got - ref) <= max(1e-10 * max(abs(ref), 1e-3 * size), 1e-100)

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.25, -1.5])
    @pytest.mark.parametrize("mu", [-3.0, -1.5, -1.0, 0.0, 1.0, 2.5])
    def test_integer_and_half_integer_grid(self, nu, mu):
        for x in (-0.9, -0.5, -0.1, 0.2, 0.7):
            self._compare(nu, mu, x)

    def test_negative_order_rows(self):
        nu, x = 0.7, 0.35
        row = sf.ferrers_negative_order(12, nu, x)
        for n in range(13):
            ref = float(mp.legenp(n + nu, -nu, x, type=2))
            assert rel(row[n], ref) <= 1e-12
