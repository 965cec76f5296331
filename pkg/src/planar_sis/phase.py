"""Critical values and the survival/extinction phase diagram.

For the m2bi and b1i heuristics the locus ``p -> 0`` reduces to a quadratic in
the motion rate; its roots are the lower and upper critical motion rates.  The
discriminant-vanishing recovery rate ``beta0`` separates motion-insensitive
from motion-sensitive behavior, and ``gamma0`` is the double root there.  The
``(mu, beta)`` plane splits into Safe (``beta > alpha*mu``), UMI (survival for
every positive motion rate) and UMS (survival only below ``gamma_minus`` or
above ``gamma_plus``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from planar_sis.percolation import MU_STAR

SAFE = "safe"
UMI = "umi"
UMS = "ums"

PHASE_SPECS = ("m2bi", "b1i")

#: m2bi motion-sensitivity constant: mu0 = 2 * alpha / (3 + sqrt(8)).
M2BI_ETA = 2.0 / (3.0 + math.sqrt(8.0))


@dataclass
class PhasePoint:
    """Classification of one ``(mu, beta)`` point for a given heuristic."""

    mu: float
    beta: float
    alpha: float
    region: str
    boolean_supercritical: bool
    gamma_minus: Optional[float] = None
    gamma_plus: Optional[float] = None

    def to_row(self) -> dict:
        return {"mu": self.mu, "beta": self.beta, "region": self.region,
                "boolean_supercritical": self.boolean_supercritical,
                "gamma_minus": self.gamma_minus, "gamma_plus": self.gamma_plus}


# -- m2bi ---------------------------------------------------------------------

def _m2bi_gamma_quadratic(mu, beta, alpha):
    """Coefficients (a2, a1, a0) of the p->0 quadratic in gamma."""
    d = mu * alpha - beta
    return 8 * d, 2 * beta * (3 * d - 2 * alpha), beta * beta * d


def m2bi_criticals(mu: float, beta: float = None, alpha: float = 1.0) -> dict:
    """Closed-form critical values of the m2bi heuristic.

    Returns ``mu0`` and, for the given ``mu``, ``beta0`` and ``gamma0``; when
    ``beta`` is supplied with ``0 < beta < alpha*mu``, also ``gamma_minus`` /
    ``gamma_plus`` (None when the quadratic has no positive real roots, the
    motion-insensitive regime).
    """
    out = {"mu0": alpha * M2BI_ETA}
    beta0 = alpha * (mu - M2BI_ETA)
    out["beta0"] = max(beta0, 0.0)
    if mu > M2BI_ETA:
        out["gamma0"] = alpha * (mu - M2BI_ETA) * (2 - 3 * M2BI_ETA) / (8 * M2BI_ETA)
    else:
        out["gamma0"] = None
    if beta is not None:
        gm, gp = m2bi_gamma_c(mu, beta, alpha)
        out["gamma_minus"] = gm
        out["gamma_plus"] = gp
    return out


def m2bi_gamma_c(mu: float, beta: float, alpha: float = 1.0):
    """Critical motion rates ``(gamma_minus, gamma_plus)`` of m2bi, or
    ``(None, None)`` in the motion-insensitive regime."""
    if not 0 < beta < alpha * mu:
        raise ValueError("gamma_c queries need 0 < beta < alpha*mu")
    d = mu * alpha - beta
    s = 2 * alpha - 3 * d
    disc = s * s - 8 * d * d
    if disc < 0 or s <= 0:
        return None, None
    r = math.sqrt(disc)
    gm = beta * (s - r) / (8 * d)
    gp = beta * (s + r) / (8 * d)
    return gm, gp


def m2bi_beta_c(mu: float, gamma: float, alpha: float = 1.0) -> dict:
    """Extinction-survival critical recovery rate of m2bi at motion rate ``gamma``.

    The defining cubic is ``b^3 + b^2 (6g - alpha mu) + 2 g b (2 alpha
    - 3 mu alpha + 4 g) - 8 mu alpha g^2 = 0``.  Above ``gamma0`` the relevant
    root is returned directly; below it the value is clamped to ``beta0``
    (the survival window there belongs to the low-motion branch, where the
    cubic root tracks ``gamma_minus`` instead).  All real roots are exposed for
    inspection; for ``mu < mu0`` the curve is discontinuous and flagged.
    """
    coeffs = [1.0, 6 * gamma - alpha * mu,
              2 * gamma * (2 * alpha - 3 * mu * alpha + 4 * gamma),
              -8 * mu * alpha * gamma * gamma]
    roots = np.roots(coeffs)
    real = sorted(float(r.real) for r in roots
                  if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real > 0)
    crit = m2bi_criticals(mu, alpha=alpha)
    beta0 = crit["beta0"]
    gamma0 = crit["gamma0"]
    discontinuous = mu < alpha * M2BI_ETA
    if gamma == 0:
        value = beta0
    elif not real:
        value = beta0
    else:
        raw = real[-1] if len(real) > 1 else real[0]
        if not discontinuous and gamma0 is not None and gamma < gamma0:
            value = beta0
        else:
            value = raw
    return {"beta_c": value, "raw_roots": real, "beta0": beta0,
            "gamma0": gamma0, "discontinuous": discontinuous}


# -- b1i ----------------------------------------------------------------------

def _b1i_gamma_quadratic(mu, beta, alpha):
    """Coefficients (a2, a1, a0) of the b1i p->0 quadratic in gamma, with
    ``rho = (alpha*mu/beta)**(2/3)``."""
    rho = (alpha * mu / beta) ** (2.0 / 3.0)
    d = mu * alpha - beta
    a2 = 2 * d
    a1 = 2 * beta * d + beta * beta * (rho - 1) - beta * alpha
    a0 = beta ** 3 * (rho - 1)
    return a2, a1, a0


def b1i_discriminant(mu: float, beta: float, alpha: float = 1.0) -> float:
    a2, a1, a0 = _b1i_gamma_quadratic(mu, beta, alpha)
    return a1 * a1 - 4 * a2 * a0


def b1i_gamma_c(mu: float, beta: float, alpha: float = 1.0):
    """Critical motion rates ``(gamma_minus, gamma_plus)`` of b1i, or
    ``(None, None)`` when absent (negative discriminant or negative roots)."""
    if not 0 < beta < alpha * mu:
        raise ValueError("gamma_c queries need 0 < beta < alpha*mu")
    a2, a1, a0 = _b1i_gamma_quadratic(mu, beta, alpha)
    disc = a1 * a1 - 4 * a2 * a0
    if disc < 0 or a1 >= 0:
        return None, None
    r = math.sqrt(disc)
    return (-a1 - r) / (2 * a2), (-a1 + r) / (2 * a2)


def b1i_beta0(mu: float, alpha: float = 1.0, tol: float = 1e-10) -> float:
    """Motion-sensitivity threshold of b1i: the discriminant zero found by
    bisection on the branch with positive roots (``a1 < 0``).  Returns 0 when
    the whole wedge ``beta < alpha*mu`` is motion-sensitive (small ``mu``)."""
    hi = alpha * mu * (1 - 1e-12)

    def disc_neg_branch(b):
        a2, a1, a0 = _b1i_gamma_quadratic(mu, b, alpha)
        d = a1 * a1 - 4 * a2 * a0
        # force the search onto the positive-root branch
        return d if a1 < 0 else -abs(d)

    if disc_neg_branch(hi) <= 0:
        raise RuntimeError("no motion-sensitive window below alpha*mu")
    # log-spaced descent until the discriminant goes negative
    lo = hi
    for f in np.geomspace(1e-6, 1.0 - 1e-12, 400):
        b = alpha * mu * (1 - f)
        if disc_neg_branch(b) < 0:
            lo = b
            break
        hi = b
    else:
        return 0.0
    return brentq(disc_neg_branch, lo, hi, xtol=tol)


def b1i_criticals(mu: float, beta: float = None, alpha: float = 1.0) -> dict:
    """Critical values of the b1i heuristic: ``beta0`` (bisection on the
    discriminant), ``gamma0`` (double root at ``beta0``), and ``gamma_c`` pair
    when ``beta`` is supplied."""
    out = {}
    b0 = b1i_beta0(mu, alpha)
    out["beta0"] = b0
    if b0 > 0:
        a2, a1, _ = _b1i_gamma_quadratic(mu, b0, alpha)
        out["gamma0"] = -a1 / (2 * a2)
    else:
        out["gamma0"] = None
    if beta is not None:
        gm, gp = b1i_gamma_c(mu, beta, alpha)
        out["gamma_minus"] = gm
        out["gamma_plus"] = gp
    return out


def b1i_beta_c(mu: float, gamma: float, alpha: float = 1.0) -> dict:
    """Critical recovery rate of b1i at motion rate ``gamma``: the inverse of
    the increasing branch of ``gamma_plus(beta)``, clamped to ``beta0`` below
    ``gamma0``.  (The defining relation can also be read as a degree-9
    polynomial in ``beta``.)

    Below the motion-sensitivity constant (``beta0 = 0``) the survival set in
    ``beta`` need not be an interval; the upper envelope (largest surviving
    ``beta``) is returned with a discontinuity flag.
    """
    crit = b1i_criticals(mu, alpha=alpha)
    b0, g0 = crit["beta0"], crit["gamma0"]
    if b0 == 0.0:
        betas = np.linspace(alpha * mu * (1 - 1e-9), alpha * mu * 1e-6, 4000)
        for b in betas:
            if survival_indicated("b1i", mu, float(b), gamma, alpha):
                return {"beta_c": float(b), "beta0": b0, "gamma0": g0,
                        "discontinuous": True}
        return {"beta_c": 0.0, "beta0": b0, "gamma0": g0, "discontinuous": True}
    if gamma <= g0:
        return {"beta_c": b0, "beta0": b0, "gamma0": g0}

    def gp_minus_target(b):
        _, gp = b1i_gamma_c(mu, b, alpha)
        return (gp if gp is not None else g0) - gamma

    hi = alpha * mu * (1 - 1e-9)
    value = brentq(gp_minus_target, b0 * (1 + 1e-9), hi, xtol=1e-12)
    return {"beta_c": value, "beta0": b0, "gamma0": g0}


# -- unified interface ---------------------------------------------------------

def gamma_c(spec: str, mu: float, beta: float, alpha: float = 1.0):
    if spec == "m2bi":
        return m2bi_gamma_c(mu, beta, alpha)
    if spec == "b1i":
        return b1i_gamma_c(mu, beta, alpha)
    raise KeyError(f"critical values available for {PHASE_SPECS}, not {spec!r}")


def beta_c(spec: str, mu: float, gamma: float, alpha: float = 1.0) -> dict:
    if spec == "m2bi":
        return m2bi_beta_c(mu, gamma, alpha)
    if spec == "b1i":
        return b1i_beta_c(mu, gamma, alpha)
    raise KeyError(f"critical values available for {PHASE_SPECS}, not {spec!r}")


def classify(spec: str, mu: float, beta: float, alpha: float = 1.0) -> PhasePoint:
    """Label a parameter point Safe / UMI / UMS (with its critical motion rates).

    The boundary ``beta = alpha * mu`` is folded into Safe: the infected
    fraction bound is already zero there.
    """
    if mu <= 0 or beta < 0 or alpha <= 0:
        raise ValueError("classify needs positive mu, alpha and beta >= 0")
    boolean_sc = mu > MU_STAR
    if beta >= alpha * mu:
        return PhasePoint(mu, beta, alpha, SAFE, boolean_sc)
    if beta == 0:
        return PhasePoint(mu, beta, alpha, UMI, boolean_sc)
    gm, gp = gamma_c(spec, mu, beta, alpha)
    if gm is None:
        return PhasePoint(mu, beta, alpha, UMI, boolean_sc)
    return PhasePoint(mu, beta, alpha, UMS, boolean_sc,
                      gamma_minus=gm, gamma_plus=gp)


def survival_indicated(spec: str, mu: float, beta: float, gamma: float,
                       alpha: float = 1.0) -> bool:
    """True when the heuristic phase diagram predicts survival at ``gamma``."""
    point = classify(spec, mu, beta, alpha)
    if point.region == SAFE:
        return False
    if point.region == UMI:
        return gamma > 0 or mu > MU_STAR
    return gamma < point.gamma_minus or gamma > point.gamma_plus


def sweep(spec: str, mu_values, beta_values, alpha: float = 1.0) -> list:
    """Grid classification over ``mu_values`` x ``beta_values``."""
    return [classify(spec, float(m), float(b), alpha)
            for m in mu_values for b in beta_values]
