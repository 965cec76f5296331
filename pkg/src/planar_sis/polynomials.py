"""Plateau polynomial systems for the closure heuristics.

In the plateau setting the three pair correlation functions are constant on
the contact disc, with values ``w`` (cross), ``v`` (infected-infected) and
``z`` (susceptible-susceptible); together with the infected fraction ``p``
they satisfy a four-equation system per heuristic.  The first-moment relation
``beta = (1-p) * alpha * mu * w`` holds in every system, so survival requires
``w > beta / (alpha * mu)``.

Solutions are found by damped Newton iteration seeded at the high-motion
mean-field point, with continuation in the motion rate when the direct solve
stalls; the branch reached by continuation from infinite motion is the one
reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import root

from planar_sis.geometry import ModelParams

SURVIVAL = "survival"
EXTINCT = "extinct"
UNRESOLVED = "unresolved"

MOTION_SPECS = ("m2bi", "b1i", "b1g1", "minfbi", "minfbg1")
NO_MOTION_SPECS = ("b1i", "g1", "b1g1", "minfbg1", "m2bi", "minfbi")

RESIDUAL_TOL = 1e-10


def mean_field_p(mu: float, beta: float, alpha: float = 1.0) -> float:
    """High-velocity limit of the infected fraction, ``max(0, 1 - beta/(alpha*mu))``."""
    return max(0.0, 1.0 - beta / (alpha * mu))


def log_mean(x: float, y: float) -> float:
    """Logarithmic mean ``(x - y) / (log x - log y)`` with its diagonal limit.

    Evaluated through ``log1p`` with a series fallback near ``x = y`` so the
    removable singularity costs no precision.
    """
    if x <= 0 or y <= 0:
        raise ValueError("log_mean needs positive arguments")
    if x == y:
        return x
    u = (x - y) / (x + y)
    if abs(u) < 1e-4:
        # L = (x+y)/2 / (1 + u^2/3 + u^4/5 + ...)
        return 0.5 * (x + y) / (1.0 + u * u / 3.0 + u ** 4 / 5.0)
    return (x - y) / math.log(x / y)


@dataclass
class ClosureSolution:
    """Plateau solution of one heuristic system."""

    spec: str
    w: float
    v: float
    z: float
    p: float
    branch: str
    residual: float
    multiplicity_flag: bool = False
    p_tilde: Optional[float] = None
    notes: str = ""

    def as_dict(self) -> dict:
        out = {"spec": self.spec, "w": self.w, "v": self.v, "z": self.z,
               "p": self.p, "branch": self.branch, "residual": self.residual,
               "multiplicity_flag": self.multiplicity_flag}
        if self.p_tilde is not None:
            out["p_tilde"] = self.p_tilde
        return out


# -- motion-case systems ------------------------------------------------------

def _pw(x: float, e: float) -> float:
    return abs(x) ** e


def motion_residuals(spec: str, u, mu: float, beta: float, gamma: float,
                     alpha: float = 1.0) -> np.ndarray:
    """Residual vector of the four plateau equations at ``u = (w, v, z, p)``."""
    w, v, z, p = u
    if spec == "m2bi":
        e1 = (2 * gamma + beta) * p * v - 2 * gamma * p \
            - 2 * alpha * (1 - p) * w - beta * p * w
        e2 = 0.5 * beta * p * (w - z) - (1 - p) * gamma * (z - 1)
    elif spec == "b1i":
        e1 = (gamma + beta) * p * v - gamma * p - alpha * (1 - p) * w \
            - beta * p * _pw(v, 2 / 3) * _pw(w, 1 / 3)
        e2 = beta * p * w - (1 - p) * gamma * (z - 1) \
            - beta * p * _pw(z, 2 / 3) * _pw(w, 1 / 3)
    elif spec in ("b1g1", "minfbg1"):
        e1 = (gamma + beta) * p * v - gamma * p - alpha * (1 - p) * w \
            - beta * p * _pw(v, 0.5) * _pw(w, 0.5)
        e2 = beta * p * w - (1 - p) * gamma * (z - 1) \
            - beta * p * _pw(z, 0.5) * _pw(w, 0.5)
    elif spec == "minfbi":
        wa, va, za = abs(w), abs(v), abs(z)
        e1 = (gamma + beta) * p * v - gamma * p - alpha * (1 - p) * w \
            - beta * p * log_mean(va * va, wa * wa) / max(wa, 1e-300)
        e2 = beta * p * w - (1 - p) * gamma * (z - 1) \
            - beta * p * log_mean(wa * wa, za * za) / max(wa, 1e-300)
    else:
        raise KeyError(f"unknown motion spec {spec!r}; known: {MOTION_SPECS}")
    e3 = beta - (1 - p) * alpha * mu * w
    e4 = 1.0 - (1 - p) ** 2 * z - 2 * p * (1 - p) * w - p * p * v
    return np.array([e1, e2, e3, e4])


def _motion_root_from(spec, mu, beta, gamma, alpha, u0):
    # Newton in log-space for (w, v, z): keeps iterates positive and makes the
    # fractional powers and log-mean terms smooth
    w0, v0, z0, p0 = u0
    x0 = np.array([math.log(max(w0, 1e-12)), math.log(max(v0, 1e-12)),
                   math.log(max(z0, 1e-12)), p0])

    def fun(x):
        # clip the log-variables so squares cannot underflow to zero
        lw, lv, lz = np.clip(x[:3], -60.0, 60.0)
        u = (math.exp(lw), math.exp(lv), math.exp(lz), x[3])
        return motion_residuals(spec, u, mu, beta, gamma, alpha)

    sol = root(fun, x0, method="hybr", tol=1e-13)
    lw, lv, lz = np.clip(sol.x[:3], -60.0, 60.0)
    u = np.array([math.exp(lw), math.exp(lv), math.exp(lz), sol.x[3]])
    return u, sol.success


def _valid_survival(u, mu, beta, alpha) -> bool:
    w, v, z, p = u
    if not (0 < p < 1):
        return False
    if not (w > beta / (alpha * mu) - 1e-9):
        return False
    return v >= -1e-9 and z >= -1e-9 and w > 0


def _enumerate_roots(spec, mu, beta, gamma, alpha, n_seeds=20):
    """Scan survival candidates across p to detect root multiplicity.

    Seeds sit on the first-moment and superposition manifolds (w forced by p,
    v chosen so the superposition identity holds at z = 1), which keeps the
    scan on-branch for every registered heuristic."""
    p_hi = mean_field_p(mu, beta, alpha)
    if p_hi <= 0:
        return []
    roots = []
    for p0 in np.linspace(p_hi * 0.05, p_hi * 0.999, n_seeds):
        w0 = beta / ((1 - p0) * alpha * mu)
        v0 = (1.0 - (1 - p0) ** 2 - 2 * p0 * (1 - p0) * w0) / (p0 * p0)
        if v0 <= 0:
            v0 = 1.0
        u, ok = _motion_root_from(spec, mu, beta, gamma, alpha,
                                  np.array([w0, v0, 1.0, p0]))
        if ok and _valid_survival(u, mu, beta, alpha):
            if not any(abs(u[3] - r[3]) < 1e-7 for r in roots):
                roots.append(u)
    return roots


def solve_motion_poly(spec: str, params: ModelParams = None, *, mu: float = None,
                      beta: float = None, gamma: float = None,
                      alpha: float = 1.0) -> ClosureSolution:
    """Solve the motion-case plateau system for one heuristic.

    Either pass ``params`` or the ``(mu, beta, gamma, alpha)`` quadruple.
    Returns the survival branch reached by continuation from the high-motion
    mean-field point when it exists, otherwise the extinct solution.
    """
    if params is not None:
        mu, beta, gamma, alpha = params.mu, params.beta, params.gamma, params.alpha
    if spec not in MOTION_SPECS:
        raise KeyError(f"unknown motion spec {spec!r}; known: {MOTION_SPECS}")
    if beta <= 0:
        return ClosureSolution(spec=spec, w=1.0, v=1.0, z=1.0, p=1.0,
                               branch=SURVIVAL, residual=0.0,
                               notes="beta = 0: everything stays infected")
    p_mf = mean_field_p(mu, beta, alpha)
    if p_mf <= 0:
        return ClosureSolution(spec=spec, w=beta / (alpha * mu), v=1.0, z=1.0,
                               p=0.0, branch=EXTINCT, residual=0.0)

    u0 = np.array([1.0, 1.0, 1.0, p_mf])
    u, ok = _motion_root_from(spec, mu, beta, gamma, alpha, u0)
    last_good_p = None
    if not (ok and _valid_survival(u, mu, beta, alpha)):
        # homotopy in gamma downward from the mean-field regime
        u = u0.copy()
        path = np.geomspace(max(1e6, 10 * beta), max(gamma, 1e-6), 80)
        for g in path:
            u_try, ok_g = _motion_root_from(spec, mu, beta, g, alpha, u)
            if ok_g and _valid_survival(u_try, mu, beta, alpha):
                u = u_try
                last_good_p = u[3]
        u, ok = _motion_root_from(spec, mu, beta, gamma, alpha, u)

    res = float(np.max(np.abs(motion_residuals(spec, u, mu, beta, gamma, alpha))))
    if ok and _valid_survival(u, mu, beta, alpha) and res < RESIDUAL_TOL:
        roots = _enumerate_roots(spec, mu, beta, gamma, alpha)
        multi = len(roots) > 1
        if multi:
            # tie-break: largest p among valid roots
            best = max(roots, key=lambda r: r[3])
            if best[3] > u[3] + 1e-7:
                u = best
                res = float(np.max(np.abs(
                    motion_residuals(spec, u, mu, beta, gamma, alpha))))
        w, v, z, p = u
        return ClosureSolution(spec=spec, w=float(w), v=float(v), z=float(z),
                               p=float(p), branch=SURVIVAL, residual=res,
                               multiplicity_flag=multi)

    roots = _enumerate_roots(spec, mu, beta, gamma, alpha)
    if roots:
        # continuation failed but a scan finds valid roots: report the
        # largest-p one and flag the ambiguity
        u = max(roots, key=lambda r: r[3])
        res = float(np.max(np.abs(motion_residuals(spec, u, mu, beta, gamma,
                                                   alpha))))
        return ClosureSolution(spec=spec, w=float(u[0]), v=float(u[1]),
                               z=float(u[2]), p=float(u[3]), branch=SURVIVAL,
                               residual=res, multiplicity_flag=True,
                               notes="root found by scan, not continuation")

    # no survival root anywhere: separate a genuine extinction boundary
    # crossing (p collapsed along the continuation path) from a fold or a
    # solver breakdown, which is never silently reported as extinct
    collapsed = last_good_p is not None and last_good_p < 5e-3
    if spec in ("m2bi", "b1i"):
        from planar_sis.phase import survival_indicated
        if survival_indicated(spec, mu, beta, gamma, alpha):
            return ClosureSolution(
                spec=spec, w=float("nan"), v=float("nan"), z=float("nan"),
                p=float("nan"), branch=UNRESOLVED, residual=float("inf"),
                notes="phase diagram indicates survival but no root was found")
        return ClosureSolution(spec=spec, w=beta / (alpha * mu), v=1.0, z=1.0,
                               p=0.0, branch=EXTINCT, residual=0.0)
    if collapsed:
        return ClosureSolution(spec=spec, w=beta / (alpha * mu), v=1.0, z=1.0,
                               p=0.0, branch=EXTINCT, residual=0.0,
                               notes="p collapsed along continuation")
    return ClosureSolution(spec=spec, w=float("nan"), v=float("nan"),
                           z=float("nan"), p=float("nan"), branch=UNRESOLVED,
                           residual=float("inf"),
                           notes="survival branch lost without p collapse")


def m2bi_quartic_residual(w: float, mu: float, beta: float, gamma: float,
                          alpha: float = 1.0) -> float:
    """Normalized residual of the degree-4 equation in ``w`` obtained by
    eliminating ``v`` and ``z`` from the m2bi system.

    With ``X = alpha*mu*w - beta``:
    ``X (X + 2 gamma) (2 gamma X + 2 alpha beta w + beta w X)
    = (2 gamma + beta) ((X + 2 gamma)(w^2 alpha^2 mu^2 - 2 beta X w)
    - w X beta^2 - 2 gamma beta^2)``.
    """
    X = alpha * mu * w - beta
    lhs = X * (X + 2 * gamma) * (2 * gamma * X + 2 * alpha * beta * w
                                 + beta * w * X)
    rhs = (2 * gamma + beta) * ((X + 2 * gamma)
                                * (w * w * alpha * alpha * mu * mu
                                   - 2 * beta * X * w)
                                - w * X * beta * beta
                                - 2 * gamma * beta * beta)
    scale = max(abs(lhs), abs(rhs), 1.0)
    return (lhs - rhs) / scale


# -- no-motion (infinite-cluster) systems -------------------------------------

def no_motion_residuals(spec: str, u, mu_tilde: float, beta: float, c: float,
                        alpha: float = 1.0) -> np.ndarray:
    """Residuals of the cluster plateau system at ``u = (w, v, p)``.

    The susceptible-susceptible plateau equals ``w`` in every registered
    heuristic, so the system reduces to three equations; ``c`` is the cluster
    PCF plateau feeding the superposition constraint.
    """
    w, v, p = u
    if spec == "b1i":
        e1 = beta * p * v - alpha * (1 - p) * w \
            - beta * p * _pw(v, 2 / 3) * _pw(w, 1 / 3)
    elif spec in ("g1", "b1g1", "minfbg1"):
        e1 = beta * p * v - alpha * (1 - p) * w \
            - beta * p * _pw(v, 0.5) * _pw(w, 0.5)
    elif spec == "m2bi":
        e1 = beta * p * v - 2 * alpha * (1 - p) * w - beta * p * w
    elif spec == "minfbi":
        wa, va = abs(w), abs(v)
        e1 = beta * p * v - alpha * (1 - p) * w \
            - beta * p * log_mean(va * va, wa * wa) / max(wa, 1e-300)
    else:
        raise KeyError(f"unknown no-motion spec {spec!r}; known: {NO_MOTION_SPECS}")
    e2 = w * (1 - p) ** 2 - c + p * p * v + 2 * p * (1 - p) * w
    e3 = beta - (1 - p) * alpha * mu_tilde * w
    return np.array([e1, e2, e3])


def b1i_cube_form_residual(u, mu_tilde: float, beta: float, alpha: float = 1.0) -> float:
    """Residual of the pre-elimination (cube-root) form of the cluster b1i
    system; filters spurious roots introduced by cubing."""
    w, v, p = u
    lhs = (alpha * mu_tilde * w - beta) * v - alpha * w
    rhs = (alpha * mu_tilde * w - beta) * _pw(v, 2 / 3) * _pw(w, 1 / 3)
    return float(lhs - rhs)


def solve_no_motion_poly(spec: str, *, lam: float = None, a: float = None,
                         beta: float, alpha: float = 1.0, c: float = None,
                         q: float = None, mu: float = None) -> ClosureSolution:
    """Solve the no-motion plateau system on the infinite Boolean cluster.

    ``q`` and ``c`` default to the branching (Lambert) approximation computed
    from ``mu = lam * pi * a**2``.  Solves in tilde (cluster) variables with
    ``mu_tilde = q * mu`` and reports both ``p_tilde`` and ``p = q * p_tilde``.
    """
    from planar_sis.percolation import lambert_q

    if mu is None:
        if lam is None or a is None:
            raise ValueError("pass either mu or both lam and a")
        mu = lam * math.pi * a * a
    if q is None:
        q = lambert_q(mu)
    if q <= 0:
        return ClosureSolution(spec=spec, w=float("nan"), v=float("nan"),
                               z=float("nan"), p=0.0, p_tilde=0.0,
                               branch=EXTINCT, residual=0.0,
                               notes="Boolean model subcritical")
    if c is None:
        c = 1.0 / q
    if c < 1:
        raise ValueError(f"cluster plateau c must be >= 1, got {c}")
    mu_tilde = q * mu
    if beta >= c * alpha * mu_tilde:
        # critical recovery rate of the cluster systems
        return ClosureSolution(spec=spec, w=beta / (alpha * mu_tilde), v=1.0,
                               z=beta / (alpha * mu_tilde), p=0.0, p_tilde=0.0,
                               branch=EXTINCT, residual=0.0)

    def fun(x):
        lw, lv = np.clip(x[:2], -60.0, 60.0)
        u = (math.exp(lw), math.exp(lv), x[2])
        return no_motion_residuals(spec, u, mu_tilde, beta, c, alpha)

    best = None
    for p0 in np.linspace(0.02, 0.98, 25):
        w0 = beta / ((1 - p0) * alpha * mu_tilde)
        v0 = max((c - (1 - p0) ** 2 * w0 - 2 * p0 * (1 - p0) * w0) / (p0 * p0), 0.1)
        sol = root(fun, [math.log(w0), math.log(v0), p0], method="hybr", tol=1e-13)
        if not sol.success:
            continue
        w, v, p = math.exp(sol.x[0]), math.exp(sol.x[1]), sol.x[2]
        sol.x = np.array([w, v, p])
        if not (0 < p < 1 and v >= -1e-9 and w > 0):
            continue
        if spec == "b1i" and abs(b1i_cube_form_residual(sol.x, mu_tilde, beta,
                                                        alpha)) > 1e-8:
            continue
        if best is None or p > best[2] + 1e-9:
            best = sol.x
    if best is None:
        return ClosureSolution(spec=spec, w=float("nan"), v=float("nan"),
                               z=float("nan"), p=float("nan"),
                               branch=UNRESOLVED, residual=float("inf"),
                               notes="no valid root below the critical rate")
    w, v, p_t = (float(x) for x in best)
    res = float(np.max(np.abs(no_motion_residuals(spec, best, mu_tilde, beta,
                                                  c, alpha))))
    return ClosureSolution(spec=spec, w=w, v=v, z=w, p=q * p_t, p_tilde=p_t,
                           branch=SURVIVAL, residual=res)
