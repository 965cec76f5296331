"""Catalog of third-moment factorization heuristics.

Each closure expresses the conditional density of infected points at offset
``x``, given a susceptible point at the origin and a second conditioning point
at distance ``r``, as a product (or weighted combination of products) of pair
correlation functions.  A closure term is a triple of exponents applied to

* the cross PCF at ``|x|``,
* a second PCF at ``|x - (r, 0)|``  (cross PCF when conditioning on two
  susceptibles, infected-infected PCF when conditioning on one susceptible and
  one infected),
* the conditioning-pair PCF at ``r`` itself (an ``x``-independent prefactor).

All registered closures are exact under independence: with every PCF equal to
one they return exactly ``lambda_p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

#: Floor applied to PCF values raised to a negative exponent.  Fixed points of
#: the solvers keep PCFs strictly positive; the floor only guards transients.
EPS = 1e-12

#: Gauss-Legendre node count for the eta-integral of the infinite mixtures.
INTEGRAL_MIXTURE_NODES = 64


@dataclass(frozen=True)
class ClosureTerm:
    """One product term: weight * xi_a(|x|)^ex * xi_b(|x-r|)^ey * xi_cond(r)^er."""

    weight: float
    ex: float
    ey: float
    er: float


@dataclass(frozen=True)
class ClosureSpec:
    """A named factorization heuristic.

    ``terms_psi_psi`` applies when conditioning on two susceptible points (the
    second PCF argument is the cross PCF); ``terms_psi_phi`` when conditioning
    on a susceptible and an infected point (the second PCF argument is the
    infected-infected PCF).
    """

    name: str
    terms_psi_psi: Tuple[ClosureTerm, ...]
    terms_psi_phi: Tuple[ClosureTerm, ...]

    def __post_init__(self):
        for terms in (self.terms_psi_psi, self.terms_psi_phi):
            total = sum(t.weight for t in terms)
            if not math.isclose(total, 1.0, rel_tol=1e-12):
                raise ValueError(f"{self.name}: term weights sum to {total}, not 1")
            if any(t.weight <= 0 for t in terms):
                raise ValueError(f"{self.name}: weights must be positive")


def bayes_independent_exponents(k, l):
    """Exact exponent triples of the Bayes-independent family.

    Returns ``((ex, ey, er) for two susceptibles, (ex, ey, er) for mixed)``.
    ``k = inf`` and ``l = inf`` give the limiting members.
    """
    if k == math.inf and l == math.inf:
        raise ValueError("k and l cannot both be infinite")
    if k == math.inf:
        return (Fraction(1), Fraction(1), Fraction(-1)), \
               (Fraction(1), Fraction(0), Fraction(0))
    if l == math.inf:
        return (Fraction(1, 2), Fraction(1, 2), Fraction(0)), \
               (Fraction(1, 2), Fraction(1), Fraction(-1, 2))
    k = Fraction(k)
    l = Fraction(l)
    if k < 0 or l < 0 or (k == 0 and l == 0):
        raise ValueError("need k, l >= 0 and not both zero")
    den = k + 2 * l
    psi_psi = ((k + l) / den, (k + l) / den, -k / den)
    psi_phi = ((k + l) / den, 2 * l / den, -l / den)
    return psi_psi, psi_phi


def bayes_independent(k, l, name=None) -> ClosureSpec:
    pp, pf = bayes_independent_exponents(k, l)
    return ClosureSpec(
        name=name or f"b{k}{l}i",
        terms_psi_psi=(ClosureTerm(1.0, float(pp[0]), float(pp[1]), float(pp[2])),),
        terms_psi_phi=(ClosureTerm(1.0, float(pf[0]), float(pf[1]), float(pf[2])),))


def bayes_geometric(k, l, name=None) -> ClosureSpec:
    """Bayes family with the conditional-independence step replaced by the
    geometric-mean heuristic."""
    k = Fraction(k)
    l = Fraction(l)
    den = k + 2 * l
    pp = ((k + Fraction(3, 2) * l) / den,
          (k / 2 + Fraction(3, 2) * l) / den,
          -(l + k / 2) / den)
    pf = ((k / 2 + Fraction(3, 2) * l) / den,
          (l + k / 2) / den,
          -(l / 2) / den)
    return ClosureSpec(
        name=name or f"b{k}g{l}",
        terms_psi_psi=(ClosureTerm(1.0, float(pp[0]), float(pp[1]), float(pp[2])),),
        terms_psi_phi=(ClosureTerm(1.0, float(pf[0]), float(pf[1]), float(pf[2])),))


def geometric_mean(eta: float, name=None) -> ClosureSpec:
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    return ClosureSpec(
        name=name or f"g(eta={eta})",
        terms_psi_psi=(ClosureTerm(1.0, eta, 1 - eta, 0.0),),
        terms_psi_phi=(ClosureTerm(1.0, eta, 1 - eta, 0.0),))


def arithmetic_mean(eta: float, name=None) -> ClosureSpec:
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1) for a two-term mixture")
    terms = (ClosureTerm(eta, 1.0, 0.0, 0.0), ClosureTerm(1 - eta, 0.0, 1.0, 0.0))
    return ClosureSpec(name=name or f"a(eta={eta})",
                       terms_psi_psi=terms, terms_psi_phi=terms)


def mixture(components: Sequence[Tuple[float, ClosureSpec]], name=None) -> ClosureSpec:
    """Convex combination of closures; weights must be positive and sum to 1."""
    wsum = sum(w for w, _ in components)
    if not math.isclose(wsum, 1.0, rel_tol=1e-12):
        raise ValueError(f"mixture weights sum to {wsum}, not 1")
    pp: List[ClosureTerm] = []
    pf: List[ClosureTerm] = []
    for w, spec in components:
        if w <= 0:
            raise ValueError("mixture weights must be positive")
        pp.extend(ClosureTerm(float(w * t.weight), t.ex, t.ey, t.er)
                  for t in spec.terms_psi_psi)
        pf.extend(ClosureTerm(float(w * t.weight), t.ex, t.ey, t.er)
                  for t in spec.terms_psi_phi)
    return ClosureSpec(name=name or "mixture", terms_psi_psi=tuple(pp),
                       terms_psi_phi=tuple(pf))


def _gauss_legendre_01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def integral_mixture_bi(n_nodes: int = INTEGRAL_MIXTURE_NODES) -> ClosureSpec:
    """Equal mixture of the whole Bayes-independent family (eta-integral by
    fixed Gauss-Legendre quadrature)."""
    xs, ws = _gauss_legendre_01(n_nodes)
    pp = tuple(ClosureTerm(w, e, e, 1 - 2 * e) for e, w in zip(xs, ws))
    pf = tuple(ClosureTerm(w, e, 2 * (1 - e), e - 1) for e, w in zip(xs, ws))
    return ClosureSpec(name="minfbi", terms_psi_psi=pp, terms_psi_phi=pf)


def integral_mixture_bg1(n_nodes: int = INTEGRAL_MIXTURE_NODES) -> ClosureSpec:
    """Equal mixture of the Bayes-geometric(1) family."""
    xs, ws = _gauss_legendre_01(n_nodes)
    pp = tuple(ClosureTerm(w, 0.5 + e / 2, 1 - e / 2, -0.5) for e, w in zip(xs, ws))
    pf = tuple(ClosureTerm(w, 1 - e / 2, 0.5, e / 2 - 0.5) for e, w in zip(xs, ws))
    return ClosureSpec(name="minfbg1", terms_psi_psi=pp, terms_psi_phi=pf)


def _registry() -> dict:
    b0i = bayes_independent(math.inf, 1, name="b0i")
    b1i = bayes_independent(1, 1, name="b1i")
    b05i = bayes_independent(1, Fraction(1, 2), name="b0.5i")
    binfi = bayes_independent(1, math.inf, name="binfi")
    g1 = geometric_mean(0.5, name="g1")
    a1 = arithmetic_mean(0.5, name="a1")
    b1g1 = bayes_geometric(1, 1, name="b1g1")
    m2bi = mixture([(0.5, b0i), (0.5, binfi)], name="m2bi")
    m3bi = mixture([(Fraction(1, 3), b0i), (Fraction(1, 3), b1i),
                    (Fraction(1, 3), binfi)], name="m3bi")
    return {
        "b0i": b0i, "b1i": b1i, "b0.5i": b05i, "binfi": binfi,
        "g1": g1, "a1": a1, "b1g1": b1g1, "m2bi": m2bi, "m3bi": m3bi,
        "minfbi": integral_mixture_bi(), "minfbg1": integral_mixture_bg1(),
    }


REGISTRY = _registry()


def get_closure(name: str) -> ClosureSpec:
    """Look up a registered closure by canonical code."""
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown closure {name!r}; registered: "
                       f"{', '.join(sorted(REGISTRY))}") from None


def registered_names() -> list:
    return sorted(REGISTRY)


def _pow(base: float, expo: float) -> float:
    if expo == 0.0:
        return 1.0
    if base < EPS and expo < 0:
        base = EPS
    return base ** expo


def _eval_terms(terms, xa: float, xb: float, xr: float) -> float:
    total = 0.0
    for t in terms:
        total += t.weight * _pow(xa, t.ex) * _pow(xb, t.ey) * _pow(xr, t.er)
    return total


def eval_mu_psipsi(spec: ClosureSpec, pcf, lambda_p: float, r: float, x) -> float:
    """Conditional intensity of infected points at offset ``x`` given
    susceptible points at the origin and at ``(r, 0)``.

    ``pcf`` must expose callables ``xi_psi_phi``, ``xi_phi_phi``,
    ``xi_psi_psi`` over radii (see :class:`planar_sis.functional.PcfTriple`).
    """
    x = np.asarray(x, dtype=float)
    rx = float(np.hypot(x[0], x[1]))
    ry = float(np.hypot(x[0] - r, x[1]))
    xa = pcf.xi_psi_phi(rx)
    xb = pcf.xi_psi_phi(ry)
    xr = pcf.xi_psi_psi(r)
    return lambda_p * _eval_terms(spec.terms_psi_psi, xa, xb, xr)


def eval_mu_psiphi(spec: ClosureSpec, pcf, lambda_p: float, r: float, x) -> float:
    """Conditional intensity of infected points at offset ``x`` given a
    susceptible point at the origin and an infected point at ``(r, 0)``."""
    x = np.asarray(x, dtype=float)
    rx = float(np.hypot(x[0], x[1]))
    ry = float(np.hypot(x[0] - r, x[1]))
    xa = pcf.xi_psi_phi(rx)
    xb = pcf.xi_phi_phi(ry)
    xr = pcf.xi_psi_phi(r)
    return lambda_p * _eval_terms(spec.terms_psi_phi, xa, xb, xr)
