"""The nine acceptance criteria, each at its stated tolerance."""

import cmath
import math

import numpy as np

from abcprop import battery
from abcprop.amplitude import (
    EndpointPair,
    FixedEnergy,
    TruncationSpec,
    green_partial_wave,
    green_q_integral,
    pole_scan,
)
from abcprop.kstransform import SphericalPoint
from abcprop.spectrum import PhysParams, enumerate_levels


def sp(r, theta, phi):
    return SphericalPoint(r, theta, phi)


# (flux, energy, a, b): off-axis, r_a != r_b
EQUIVALENCE_PANEL = [
    (0.0, -0.30, sp(1.0, 1.0, 0.2), sp(2.2, 2.0, 1.1)),
    (0.0, -0.08, sp(0.7, 0.4, 5.9), sp(1.6, 1.3, 0.8)),
    (0.0, -0.20, sp(2.5, 2.7, 3.0), sp(0.9, 0.6, 4.4)),
    (0.3, -0.20, sp(1.0, 1.0, 0.2), sp(2.2, 2.0, 1.1)),
    (0.3, -0.35, sp(1.3, 0.5, 1.7), sp(0.6, 2.6, 2.2)),
    (0.3, -0.12, sp(3.1, 1.9, 4.0), sp(1.7, 1.2, 0.3)),
    (0.3, -0.06, sp(0.8, 2.9, 2.5), sp(2.0, 0.9, 6.0)),
    (0.5, -0.15, sp(1.1, 1.4, 0.0), sp(1.8, 1.6, 3.1)),
    (0.5, -0.30, sp(0.5, 0.8, 2.0), sp(1.4, 2.3, 5.2)),
    (0.5, -0.09, sp(2.4, 2.2, 1.2), sp(1.2, 0.7, 1.9)),
]


def _pole_clearance(params, energy):
    """Distance to the nearest level in units of the local level spacing."""
    levels = sorted({round(lv.energy, 14) for lv in enumerate_levels(params, 30.0)})
    i = int(np.argmin([abs(e - energy) for e in levels]))
    spacing = min(abs(levels[j] - levels[i]) for j in (i - 1, i + 1) if 0 <= j < len(levels))
    return abs(energy - levels[i]) / spacing


def test_criterion_1_spectrum_vs_oracle(report):
    worst = 0.0
    for flux in (0.0, 0.25, 0.5):
        rep = battery.spectrum_panel(PhysParams(1.0, -1.0, flux), max_principal=3.5, tol=1e-4)
        worst = max(worst, rep.max_residual)
    passed = worst <= 1e-4
    report(1, "spectrum vs finite-difference oracle", passed, f"max rel diff {worst:.2e} <= 1e-4")
    assert passed


def test_criterion_2_hydrogen_limit(report):
    params = PhysParams(1.0, -1.0, 0.0)
    levels = enumerate_levels(params, 4)
    counts = [lv.degeneracy for lv in levels]
    energy_err = max(abs(lv.energy - (-0.5 / n**2)) / (0.5 / n**2) for n, lv in enumerate(levels, 1))
    passed = counts == [1, 4, 9, 16] and energy_err <= 1e-12
    report(2, "zero-flux degeneracy N^2 and energies", passed, f"degeneracies {counts}, energy err {energy_err:.1e}")
    assert passed


def test_criterion_3_evaluator_equivalence(report):
    trunc = TruncationSpec(m_max=12, n_max=40)
    worst = 0.0
    for flux, energy, a, b in EQUIVALENCE_PANEL:
        params = PhysParams(1.0, -1.0, flux)
        assert _pole_clearance(params, energy) >= 0.1
        pts = EndpointPair(a, b)
        fe = FixedEnergy.from_energy(params, energy)
        q = green_q_integral(params, pts, fe, trunc).value
        pw = green_partial_wave(params, pts, fe, trunc).value
        worst = max(worst, abs(q - pw) / abs(pw))
    passed = worst <= 1e-6
    report(3, "q-integral vs partial-wave amplitude, 10 points", passed, f"max rel diff {worst:.2e} <= 1e-6")
    assert passed


def test_criterion_4_ks_battery(report):
    rep = battery.ks_battery(samples=10_000, seed=0)
    jac = rep.details["jacobian_residual"]
    report(4, "KS identity battery, 1e4 samples", rep.passed,
           f"max residual {rep.max_residual:.2e} <= 1e-12, jacobian {jac:.2e} <= 1e-6")
    assert rep.passed


def test_criterion_5_bessel_product(report):
    rep = battery.bessel_panel(seed=0, count=20, n_max=30, tol=1e-8)
    report(5, "Bessel-product expansion, 20 cases", rep.passed, f"max rel err {rep.max_residual:.2e} <= 1e-8")
    assert rep.passed


def test_criterion_6_legendre_integral(report):
    rep = battery.legendre_panel(seed=0, count=20, tol=1e-9)
    cases = [(c["lam"], c["mu"], c["nu"]) for c in rep.details["cases"]]
    assert (1.0, 0.0, 0.0) in cases and (1.0, 0.0, 1.0) in cases
    report(6, "Legendre integral closed form, 20 cases", rep.passed, f"max err {rep.max_residual:.2e} <= 1e-9")
    assert rep.passed


def test_criterion_7_gamma_reduction(report):
    rep = battery.gamma_reduction_panel(seed=0, m_max=4, tol=1e-8)
    report(7, "fiber-angle average collapses to m1 = m2", rep.passed, f"max rel err {rep.max_residual:.2e} <= 1e-8")
    assert rep.passed


def test_criterion_8_pole_consistency(report):
    params = PhysParams(1.0, -1.0, 0.3)
    pts = EndpointPair(sp(1.0, 1.0, 0.2), sp(2.2, 2.0, 1.1))
    details, passed = [], True
    for principal in (1.3, 1.7):
        level = -0.5 / principal**2
        grid = list(np.linspace(level * 1.053, level * 0.951, 10))
        poles = pole_scan(params, pts, grid)
        ok = len(poles) == 1 and abs(poles[0].energy / level - 1) <= 1e-6 and poles[0].growth >= 1e3
        passed &= ok
        if poles:
            details.append(f"N={principal}: rel {abs(poles[0].energy / level - 1):.1e}, growth {poles[0].growth:.1e}")
        else:
            details.append(f"N={principal}: no pole found")
    report(8, "pole scan at flux 0.3, two lowest levels", passed, "; ".join(details))
    assert passed


def test_criterion_9_flux_periodicity(report):
    spec_err = 0.0
    for flux in (0.0, 0.3, 0.5, -0.8):
        lo = sorted(lv.energy for lv in enumerate_levels(PhysParams(1.0, -1.0, flux), 4.0) for _ in lv.members)
        hi = sorted(lv.energy for lv in enumerate_levels(PhysParams(1.0, -1.0, flux + 1), 4.0) for _ in lv.members)
        assert len(lo) == len(hi)
        spec_err = max(spec_err, max(abs(x - y) / abs(x) for x, y in zip(lo, hi)))

    # relabelling m -> m - 1 multiplies every channel by exp(-i dphi)
    amp_err = 0.0
    trunc = TruncationSpec(m_max=12, n_max=40)
    for a, b in [(sp(1.0, 1.0, 0.2), sp(2.2, 2.0, 1.1)), (sp(1.3, 0.5, 1.7), sp(0.6, 2.6, 1.7))]:
        pts = EndpointPair(a, b)
        gauge = cmath.exp(-1j * (b.phi - a.phi))
        for flux in (0.3, 0.5):
            p0, p1 = PhysParams(1.0, -1.0, flux), PhysParams(1.0, -1.0, flux + 1)
            for evaluator in (green_q_integral, green_partial_wave):
                g0 = evaluator(p0, pts, FixedEnergy.from_energy(p0, -0.2), trunc).value
                g1 = evaluator(p1, pts, FixedEnergy.from_energy(p1, -0.2), trunc).value
                amp_err = max(amp_err, abs(g1 - gauge * g0) / abs(g0))
    passed = spec_err <= 1e-12 and amp_err <= 1e-8
    report(9, "flux shift by one", passed, f"spectrum {spec_err:.1e} <= 1e-12, amplitude {amp_err:.1e} <= 1e-8")
    assert passed
