"""Seeded randomized check panels shared by ``abcprop check`` and the test suite.

Each panel returns a :class:`CheckReport` with the largest measured residual
and the tolerance it is held to.
"""

from __future__ import annotations

import math
from typing import Any, NamedTuple, Sequence

import numpy as np

from . import amplitude as amp
from . import kstransform as ks
from .oracle import compare_spectrum
from .spectrum import PhysParams, enumerate_levels

__all__ = [
    "CheckReport",
    "CHECK_NAMES",
    "ks_battery",
    "legendre_panel",
    "bessel_panel",
    "gamma_reduction_panel",
    "spectrum_panel",
    "run_checks",
]

CHECK_NAMES = ("ks", "legendre", "bessel", "gamma", "spectrum")


class CheckReport(NamedTuple):
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    details: dict[str, Any]


def _random_u(rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(4) * 10.0 ** rng.uniform(-1.0, 1.0)


def ks_battery(samples: int = 10_000, seed: int = 0, tol: float = 1e-12,
               jacobian_tol: float = 1e-6) -> CheckReport:
    """Norm, metric, ``A A^T``, fourth-row nullity, Jacobian, one-form and fiber identities.

    All residuals are relative: to ``r`` for map-level identities and to the
    natural size of the one-form terms for the pullback comparison. The
    Jacobian is compared with a finite-difference determinant at ``jacobian_tol``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(("norm", "metric", "orthogonality", "row4", "oneform", "fiber"), 0.0)
    worst_jac = 0.0
    eye = np.eye(4)
    for _ in range(samples):
        u = _random_u(rng)
        du = rng.standard_normal(4)
        r = float(u @ u)
        xyz = np.array(ks.ks_map(u))
        worst["norm"] = max(worst["norm"], abs(math.sqrt(xyz @ xyz) - r) / r)
        a = ks.ks_matrix(u)
        worst["orthogonality"] = max(worst["orthogonality"], float(np.max(np.abs(a @ a.T - r * eye))) / r)
        worst["row4"] = max(worst["row4"], abs(float((a @ u)[3])) / r)
        d = ks.ks_differential(u, du)
        lhs, rhs = float(d @ d), 4.0 * r * float(du @ du)
        worst["metric"] = max(worst["metric"], abs(lhs - rhs) / rhs)
        exact = ks.ks_jacobian(u)
        worst_jac = max(worst_jac, abs(ks.ks_jacobian_numeric(u) - exact) / exact)
        flux = rng.uniform(-2.0, 2.0)
        pull = ks.ab_oneform_pullback(u, du, flux)
        direct = ks.ab_oneform_direct(u, du, flux)
        n12, n34 = u[0] ** 2 + u[1] ** 2, u[2] ** 2 + u[3] ** 2
        size = abs(flux) * math.sqrt(du @ du) * (1.0 / math.sqrt(n12) + 1.0 / math.sqrt(n34))
        worst["oneform"] = max(worst["oneform"], abs(pull - direct) / size if size > 0 else 0.0)
        p = ks.SphericalPoint(r, rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi))
        target = np.array(ks.cartesian(p))
        for g in rng.uniform(0.0, ks.GAMMA_PERIOD, 4):
            img = np.array(ks.ks_map(ks.spherical_to_ks(p, float(g))))
            worst["fiber"] = max(worst["fiber"], float(np.max(np.abs(img - target))) / r)
    max_res = max(worst.values())
    passed = bool(max_res <= tol and worst_jac <= jacobian_tol)
    details = {"samples": samples, "seed": seed, "residuals": worst,
               "jacobian_residual": worst_jac, "jacobian_tolerance": jacobian_tol}
    return CheckReport("ks", passed, max_res, tol, details)


def legendre_cases(seed: int = 0, count: int = 20) -> list[tuple[float, float, float]]:
    """``(lam, mu, nu)`` triples: the two elementary cases first, then random ones."""
    rng = np.random.default_rng(seed)
    cases = [(1.0, 0.0, 0.0), (1.0, 0.0, 1.0)]
    while len(cases) < count:
        mu = rng.uniform(-1.5, 1.5)
        nu = rng.uniform(0.0, 3.0)
        lam = 0.5 * abs(mu) + rng.uniform(0.3, 2.0)
        cases.append((float(lam), float(mu), float(nu)))
    return cases


def legendre_panel(seed: int = 0, count: int = 20, tol: float = 1e-9) -> CheckReport:
    """Quadrature of ``(1-x^2)^(lam-1) P^mu_nu`` against the Gamma-ratio closed form."""
    rows = []
    for lam, mu, nu in legendre_cases(seed, count):
        chk = amp.legendre_integral_identity_check(lam, mu, nu)
        rows.append({"lam": lam, "mu": mu, "nu": nu, "quadrature": chk.lhs,
                     "closed_form": chk.rhs, "rel_err": chk.rel_err})
    max_res = max(r["rel_err"] for r in rows)
    return CheckReport("legendre", bool(max_res <= tol), max_res, tol, {"seed": seed, "cases": rows})


def bessel_cases(seed: int = 0, count: int = 20) -> list[tuple[float, float, float, float]]:
    """``(X, nu, theta_a, theta_b)`` with off-axis angles."""
    rng = np.random.default_rng(seed)
    return [
        (float(rng.uniform(0.2, 15.0)), float(rng.uniform(0.0, 3.0)),
         float(rng.uniform(0.05, math.pi - 0.05)), float(rng.uniform(0.05, math.pi - 0.05)))
        for _ in range(count)
    ]


def bessel_panel(seed: int = 0, count: int = 20, n_max: int = 30, tol: float = 1e-8) -> CheckReport:
    """Direct ``I_nu(X c) I_nu(X s)`` against its Ferrers-Bessel series truncated at ``n_max``."""
    rows = []
    for arg, nu, ta, tb in bessel_cases(seed, count):
        chk = amp.bessel_product_identity_check(arg, nu, ta, tb, n_max=n_max)
        rows.append({"X": arg, "nu": nu, "theta_a": ta, "theta_b": tb,
                     "direct": chk.lhs, "series": chk.rhs, "rel_err": chk.rel_err})
    max_res = max(r["rel_err"] for r in rows)
    return CheckReport("bessel", bool(max_res <= tol), max_res, tol, {"seed": seed, "n_max": n_max, "cases": rows})


def gamma_reduction_panel(seed: int = 0, count: int = 3, m_max: int = 4, tol: float = 1e-8) -> CheckReport:
    """Fiber-averaged two-plane double sum against the diagonal ``m1 = m2`` sum."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(count):
        params = PhysParams(1.0, -1.0, float(rng.uniform(-1.0, 1.0)))
        pts = amp.EndpointPair(
            ks.SphericalPoint(float(rng.uniform(0.5, 2.5)), float(rng.uniform(0.3, 2.8)),
                              float(rng.uniform(0.0, 2.0 * math.pi))),
            ks.SphericalPoint(float(rng.uniform(0.5, 2.5)), float(rng.uniform(0.3, 2.8)),
                              float(rng.uniform(0.0, 2.0 * math.pi))),
        )
        fe = amp.FixedEnergy.from_energy(params, float(rng.uniform(-0.4, -0.05)))
        gamma_b = float(rng.uniform(0.0, ks.GAMMA_PERIOD))
        err = amp.oscillator_sum_reduction_check(params, pts, gamma_b, fe, amp.TruncationSpec(m_max=m_max))
        rows.append({"flux": params.flux, "energy": fe.energy, "gamma_b": gamma_b, "rel_err": err})
    max_res = max(r["rel_err"] for r in rows)
    return CheckReport("gamma", bool(max_res <= tol), max_res, tol, {"seed": seed, "m_max": m_max, "cases": rows})


def spectrum_panel(params: PhysParams, max_principal: float = 3.5, tol: float = 1e-4) -> CheckReport:
    """Closed-form levels against the finite-difference oracle for every state up to ``max_principal``."""
    members = [qn for lv in enumerate_levels(params, max_principal) for qn in lv.members]
    rows = [
        {"m": c.qn.m, "n": c.qn.n, "nprime": c.qn.nprime, "formula": c.formula_e,
         "oracle": c.oracle_e, "rel_diff": c.rel_diff}
        for c in compare_spectrum(params, members)
    ]
    max_res = max(r["rel_diff"] for r in rows)
    return CheckReport("spectrum", bool(max_res <= tol), max_res, tol,
                       {"flux": params.flux, "max_principal": max_principal, "table": rows})


def run_checks(names: Sequence[str], params: PhysParams, seed: int = 0, samples: int = 10_000,
               max_principal: float = 3.5) -> list[CheckReport]:
    out = []
    for name in names:
        if name == "ks":
            out.append(ks_battery(samples, seed))
        elif name == "legendre":
            out.append(legendre_panel(seed))
        elif name == "bessel":
            out.append(bessel_panel(seed))
        elif name == "gamma":
            out.append(gamma_reduction_panel(seed))
        elif name == "spectrum":
            out.append(spectrum_panel(params, max_principal))
        else:
            raise ValueError(f"unknown check {name!r}")
    return out
