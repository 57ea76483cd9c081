import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcprop.errors import DomainError, NoBoundStateError
from abcprop.spectrum import (
    PhysParams,
    QuantumNumbers,
    effective_ell,
    energy,
    enumerate_levels,
    nearest_level,
    principal_number,
)

HYDROGEN = PhysParams(1.0, -1.0, 0.0)
flux = st.floats(-3.0, 3.0, allow_nan=False)
qn = st.builds(QuantumNumbers, st.integers(-6, 6), st.integers(0, 6), st.integers(0, 6))


def test_ground_state():
    assert energy(HYDROGEN, QuantumNumbers(0, 0, 0)) == -0.5


def test_half_flux_ground_state():
    assert energy(PhysParams(1.0, -1.0, 0.5), QuantumNumbers(0, 0, 0)) == pytest.approx(-2 / 9, rel=1e-15)


@pytest.mark.parametrize("coulomb", [0.0, 1.0])
def test_repulsive_rejected(coulomb):
    with pytest.raises(NoBoundStateError, match="no bound states for repulsive coupling"):
        energy(PhysParams(1.0, coulomb, 0.0), QuantumNumbers(0, 0, 0))
    with pytest.raises(NoBoundStateError):
        enumerate_levels(PhysParams(1.0, coulomb, 0.0), 2)


@pytest.mark.parametrize("kwargs", [dict(mass=0.0), dict(mass=-1.0), dict(coulomb=math.nan), dict(flux=math.inf)])
def test_params_validation(kwargs):
    base = dict(mass=1.0, coulomb=-1.0, flux=0.0)
    base.update(kwargs)
    with pytest.raises(DomainError):
        PhysParams(**base)


def test_negative_radial_numbers_rejected():
    with pytest.raises(DomainError):
        principal_number(0.0, QuantumNumbers(0, -1, 0))
    with pytest.raises(DomainError):
        effective_ell(0, 0.0, -1)


def test_effective_ell_examples():
    assert effective_ell(0, 0.0, 1) == 1.0
    assert effective_ell(1, 0.3, 0) == pytest.approx(1.3, rel=1e-15)


def test_hydrogen_two_levels():
    levels = enumerate_levels(HYDROGEN, 2)
    assert [(lv.energy, lv.degeneracy) for lv in levels] == [(-0.5, 1), (-0.125, 4)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hydrogen_degeneracy(n):
    levels = enumerate_levels(PhysParams(2.0, -0.7, 0.0), 5)
    lv = levels[n - 1]
    assert lv.degeneracy == n * n
    assert lv.energy == pytest.approx(-2.0 * 0.49 / (2 * n * n), rel=1e-15)


def test_half_flux_pairs():
    levels = enumerate_levels(PhysParams(1.0, -1.0, 0.5), 2.0)
    assert levels[0].principal == 1.5
    assert sorted(q.m for q in levels[0].members) == [-1, 0]


def test_irrational_flux_degeneracy_structure():
    alpha = 1 / math.sqrt(2)
    for lv in enumerate_levels(PhysParams(1.0, -1.0, alpha), 6.0):
        # brute force: members share principal number and the sign of m+alpha
        signs = {q.m + alpha > 0 for q in lv.members}
        assert len(signs) == 1
        ps = {principal_number(alpha, q) for q in lv.members}
        assert max(ps) - min(ps) <= 1e-12
        # within a level, members with equal m form the n + n' exchange family
        for m, count in Counter(q.m for q in lv.members).items():
            k = round(lv.principal - 1 - abs(m + alpha))
            assert count == k + 1


def test_enumeration_matches_brute_force():
    params = PhysParams(1.0, -1.0, 0.37)
    levels = enumerate_levels(params, 4.2)
    listed = sorted(q for lv in levels for q in lv.members)
    brute = sorted(
        QuantumNumbers(m, n, k)
        for m in range(-8, 9) for n in range(5) for k in range(5)
        if principal_number(0.37, QuantumNumbers(m, n, k)) <= 4.2
    )
    assert listed == brute
    energies = [lv.energy for lv in levels]
    assert energies == sorted(energies) and len(set(energies)) == len(energies)


def test_nearest_level():
    lv = nearest_level(HYDROGEN, -0.13, 3)
    assert lv.energy == -0.125


def test_max_principal_validation():
    with pytest.raises(DomainError):
        enumerate_levels(HYDROGEN, 0.5)


@given(flux, qn)
def test_flux_shift_with_relabel(alpha, q):
    p0, p1 = PhysParams(1.0, -1.0, alpha), PhysParams(1.0, -1.0, alpha + 1)
    assert energy(p1, QuantumNumbers(q.m - 1, q.n, q.nprime)) == pytest.approx(energy(p0, q), rel=1e-12)


@given(flux, qn)
def test_reflection(alpha, q):
    a = energy(PhysParams(1.0, -1.0, alpha), q)
    b = energy(PhysParams(1.0, -1.0, -alpha), QuantumNumbers(-q.m, q.n, q.nprime))
    assert a == pytest.approx(b, rel=1e-14)


@given(flux, qn, st.sampled_from(["n", "nprime", "m"]))
def test_monotonicity(alpha, q, which):
    params = PhysParams(1.0, -1.0, alpha)
    if which == "m":
        step = 1 if q.m + alpha >= 0 else -1
        bigger = QuantumNumbers(q.m + step, q.n, q.nprime)
    else:
        bigger = q._replace(**{which: getattr(q, which) + 1})
    assert energy(params, bigger) > energy(params, q)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 2.0))
def test_spectrum_periodic_multiset(alpha):
    def multiset(a):
        return sorted(
            round(lv.energy, 12) for lv in enumerate_levels(PhysParams(1.0, -1.0, a), 4.0) for _ in lv.members
        )

    lo, hi = multiset(alpha), multiset(alpha + 1)
    assert len(lo) == len(hi)
    assert all(abs(x - y) <= 1e-12 * abs(x) for x, y in zip(lo, hi))
