"""Fixed-point solution of the second-moment integral-equation systems.

Pair correlation functions live on a cell-centered radial grid (values at
``(i + 1/2) h``, constant per cell, tail value 1 beyond ``r_max``).  Each sweep
evaluates, for every grid radius, closure integrals of the form

    alpha * int_0^a v dv int_0^2pi xi_a(v)^e1 * xi_b(|x - r|)^e2 dtheta

by midpoint quadrature, then applies the damped update maps for the
infected-infected and cross PCFs; the infected fraction and the
susceptible-susceptible PCF are recomputed each sweep from the first-moment
and superposition constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from planar_sis.closures import get_closure
from planar_sis.geometry import ModelParams

EPS = 1e-12


@dataclass
class RadialFunction:
    """Radial step function: ``values[i]`` on ``[i h, (i+1) h)``, ``tail`` beyond."""

    h: float
    values: np.ndarray
    tail: float = 1.0

    @property
    def radii(self) -> np.ndarray:
        return (np.arange(len(self.values)) + 0.5) * self.h

    @property
    def r_max(self) -> float:
        return len(self.values) * self.h

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = (r / self.h).astype(np.int64)
        inside = idx < len(self.values)
        out = np.where(inside,
                       np.take(self.values, np.minimum(idx, len(self.values) - 1)),
                       self.tail)
        return out if out.ndim else float(out)

    @classmethod
    def constant(cls, h: float, n: int, value: float = 1.0, tail: float = 1.0):
        return cls(h=h, values=np.full(n, value, dtype=float), tail=tail)


@dataclass
class PcfTriple:
    """The three stationary pair correlation functions on a shared grid."""

    xi_psi_phi: RadialFunction
    xi_phi_phi: RadialFunction
    xi_psi_psi: RadialFunction


@dataclass
class GridConfig:
    """Discretization and iteration controls for the functional solver."""

    n_per_a: int = 16          # grid cells per contact radius
    r_max_factor: float = 8.0  # grid extent in units of a
    n_v: int = 64              # radial quadrature nodes on [0, a]
    n_theta: int = 128         # angular quadrature nodes on [0, 2 pi]
    damping: float = 0.5
    tol: float = 1e-6
    max_iter: int = 10000
    degenerate_p: float = 1e-6
    degenerate_sweeps: int = 50


@dataclass
class SolveReport:
    """Outcome of a functional solve."""

    pcf: PcfTriple
    p: float
    iterations: int
    residual: float
    converged: bool
    degenerate: bool = False
    p_tilde: Optional[float] = None
    w: float = float("nan")
    v: float = float("nan")
    z: float = float("nan")

    def plateau(self) -> tuple:
        return self.w, self.v, self.z


def ring_kernel(f1: RadialFunction, e1: float, f2: RadialFunction, e2: float,
                r: float, alpha: float, a: float,
                n_v: int = 64, n_theta: int = 128) -> float:
    """Midpoint quadrature of
    ``alpha * int_0^a v dv int_0^2pi f1(v)^e1 f2(sqrt(r^2+v^2-2 r v cos t))^e2 dt``.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    vs = (np.arange(n_v) + 0.5) * (a / n_v)
    ts = (np.arange(n_theta) + 0.5) * (2 * math.pi / n_theta)
    d = np.sqrt(r * r + vs[:, None] ** 2 - 2 * r * vs[:, None] * np.cos(ts[None, :]))
    g1 = np.maximum(np.asarray(f1(vs), dtype=float), EPS) ** e1 if e1 != 0 else np.ones(n_v)
    g2 = np.maximum(np.asarray(f2(d), dtype=float), EPS) ** e2 if e2 != 0 else np.ones_like(d)
    inner = g2.sum(axis=1) * (2 * math.pi / n_theta)
    return float(alpha * (a / n_v) * np.sum(vs * g1 * inner))


class _KernelEngine:
    """Precomputed quadrature geometry for closure integrals on a fixed grid.

    Distances from every grid radius through every quadrature node never
    change, so they are tabulated once as lookup indices into the radial
    value table (with one extra slot for the tail).
    """

    def __init__(self, a: float, h: float, n_r: int, n_v: int, n_theta: int):
        self.a = a
        self.h = h
        self.n_r = n_r
        self.n_v = n_v
        self.n_theta = n_theta
        self.w_v = a / n_v
        self.w_t = 2 * math.pi / n_theta
        self.vs = (np.arange(n_v) + 0.5) * self.w_v
        ts = (np.arange(n_theta) + 0.5) * self.w_t
        radii = (np.arange(n_r) + 0.5) * h
        d = np.sqrt(radii[:, None, None] ** 2 + self.vs[None, :, None] ** 2
                    - 2 * radii[:, None, None] * self.vs[None, :, None]
                    * np.cos(ts[None, None, :]))
        self.idx = np.minimum((d / h).astype(np.int64), n_r)
        self.v_idx = np.minimum((self.vs / h).astype(np.int64), n_r - 1)

    def closure_integrals(self, terms, xi_x: np.ndarray, xi_b: np.ndarray,
                          xi_cond: np.ndarray, alpha: float) -> np.ndarray:
        """Sum over closure terms of weight * xi_cond(r)^er * K_term(r) with
        ``K_term(r) = alpha * int xi_x(|x|)^ex xi_b(|x-r|)^ey dx`` over the disc.

        ``xi_x``, ``xi_b``, ``xi_cond`` are value arrays on the radial grid
        (tail 1 appended internally for ``xi_b``).
        """
        table_b = np.append(np.maximum(xi_b, EPS), 1.0)
        looked = table_b[self.idx]                        # (n_r, n_v, n_theta)
        vals_x = np.maximum(xi_x[self.v_idx], EPS)        # (n_v,)
        cond = np.maximum(xi_cond, EPS)                   # (n_r,)
        out = np.zeros(self.n_r)
        log_b = None
        for t in terms:
            gx = vals_x ** t.ex if t.ex != 0 else np.ones(self.n_v)
            if t.ey == 0:
                inner = np.full((self.n_r, self.n_v), self.n_theta, dtype=float)
            elif t.ey == 1.0:
                inner = looked.sum(axis=2)
            else:
                if log_b is None:
                    log_b = np.log(looked)
                inner = np.exp(t.ey * log_b).sum(axis=2)
            k = (inner * (self.vs * gx)[None, :]).sum(axis=1) * self.w_v * self.w_t
            pref = cond ** t.er if t.er != 0 else 1.0
            out += t.weight * pref * (alpha * k)
        return out


def _plateau_mean(values: np.ndarray, radii: np.ndarray, a: float) -> float:
    """Disc-area-weighted mean over (0, a), the plateau summary."""
    sel = radii < a
    return float(np.average(values[sel], weights=radii[sel]))


def _first_moment_p(xi_sp: np.ndarray, radii: np.ndarray, h: float, a: float,
                    lam: float, alpha: float, beta: float) -> float:
    sel = radii < a
    integral = 2 * math.pi * alpha * float(np.sum(xi_sp[sel] * radii[sel]) * h)
    if integral <= 0:
        return -1.0
    return 1.0 - beta / (lam * integral)


def solve_motion(spec, params: ModelParams, grid: GridConfig = None) -> SolveReport:
    """Damped Picard iteration of the motion-case second-moment system.

    Sweeps update the infected-infected and cross PCFs from the pair-balance
    equations under the given closure, recomputing the infected fraction from
    the first-moment identity and the susceptible-susceptible PCF from the
    Poisson superposition identity.  A collapse of ``p`` is reported as a
    degenerate (extinct) solution rather than an error.
    """
    if isinstance(spec, str):
        spec = get_closure(spec)
    if grid is None:
        grid = GridConfig()
    alpha, beta, gamma, lam, a = (params.alpha, params.beta, params.gamma,
                                  params.lam, params.a)
    if beta <= 0:
        raise ValueError("solve_motion requires beta > 0")
    h = a / grid.n_per_a
    n_r = int(round(grid.r_max_factor * grid.n_per_a))
    radii = (np.arange(n_r) + 0.5) * h
    engine = _KernelEngine(a, h, n_r, grid.n_v, grid.n_theta)
    f_vals = np.where(radii <= a, alpha, 0.0)

    xi_sp = np.ones(n_r)
    xi_pp = np.ones(n_r)
    p = max(1.0 - beta / (alpha * params.mu), 0.0)
    if p == 0.0:
        p = 1e-3  # start inside the simplex; collapse detection handles extinction
    xi_ss = np.ones(n_r)
    degenerate_run = 0
    residual = float("inf")

    for it in range(1, grid.max_iter + 1):
        p_new = _first_moment_p(xi_sp, radii, h, a, lam, alpha, beta)
        if p_new <= grid.degenerate_p:
            degenerate_run += 1
            if degenerate_run >= grid.degenerate_sweeps:
                pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
                return SolveReport(pcf=pcf, p=0.0, iterations=it,
                                   residual=residual, converged=False,
                                   degenerate=True)
            p = max(p_new, grid.degenerate_p)
        else:
            degenerate_run = 0
            p = p_new
        xi_ss = (1.0 - p * p * xi_pp - 2 * p * (1 - p) * xi_sp) / (1 - p) ** 2
        xi_ss_fl = np.maximum(xi_ss, 0.0)

        lam_p = lam * p
        j_sp = lam_p * engine.closure_integrals(
            spec.terms_psi_phi, xi_sp, xi_pp, xi_sp, alpha)
        j_ss = lam_p * engine.closure_integrals(
            spec.terms_psi_psi, xi_sp, xi_sp, xi_ss_fl, alpha)

        xi_pp_new = (p * gamma + (1 - p) * xi_sp * (f_vals + j_sp)) \
            / (p * (beta + gamma))
        # the cross-PCF balance, with its own superposition contribution to
        # the motion term moved to the left side: keeps the sweep stable for
        # arbitrarily large gamma (the map would otherwise amplify by ~gamma)
        xi_sp_new = (gamma * (1.0 - p * p * xi_pp - (1 - p) ** 2) / (1 - p)
                     + (1 - p) * xi_ss_fl * j_ss) / (p * (beta + 2 * gamma))
        xi_sp_new = np.maximum(xi_sp_new, 0.0)
        xi_pp_new = np.maximum(xi_pp_new, 0.0)

        residual = max(float(np.max(np.abs(xi_pp_new - xi_pp))),
                       float(np.max(np.abs(xi_sp_new - xi_sp))))
        xi_pp = xi_pp + grid.damping * (xi_pp_new - xi_pp)
        xi_sp = xi_sp + grid.damping * (xi_sp_new - xi_sp)
        if residual < grid.tol:
            p = _first_moment_p(xi_sp, radii, h, a, lam, alpha, beta)
            xi_ss = (1.0 - p * p * xi_pp - 2 * p * (1 - p) * xi_sp) / (1 - p) ** 2
            pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
            return SolveReport(
                pcf=pcf, p=p, iterations=it, residual=residual, converged=True,
                w=_plateau_mean(xi_sp, radii, a),
                v=_plateau_mean(xi_pp, radii, a),
                z=_plateau_mean(xi_ss, radii, a))

    pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
    return SolveReport(pcf=pcf, p=p, iterations=grid.max_iter,
                       residual=residual, converged=False,
                       w=_plateau_mean(xi_sp, radii, a),
                       v=_plateau_mean(xi_pp, radii, a),
                       z=_plateau_mean(xi_ss, radii, a))


def solve_no_motion(spec, params: ModelParams, c, q: float = None,
                    grid: GridConfig = None) -> SolveReport:
    """No-motion variant on the infinite Boolean cluster.

    ``c`` is the cluster pair correlation (a scalar plateau or a radial
    function); ``q`` defaults to the branching approximation.  Solves in
    cluster (tilde) variables and reports both ``p_tilde`` and ``p = q p_tilde``.
    """
    from planar_sis.percolation import lambert_q

    if isinstance(spec, str):
        spec = get_closure(spec)
    if grid is None:
        grid = GridConfig()
    alpha, beta, lam, a = params.alpha, params.beta, params.lam, params.a
    if beta <= 0:
        raise ValueError("solve_no_motion requires beta > 0")
    if q is None:
        q = lambert_q(params.mu)
    if q <= 0:
        raise ValueError("Boolean model subcritical: no infinite cluster")
    lam_t = q * lam
    mu_t = q * params.mu

    h = a / grid.n_per_a
    n_r = int(round(grid.r_max_factor * grid.n_per_a))
    radii = (np.arange(n_r) + 0.5) * h
    engine = _KernelEngine(a, h, n_r, grid.n_v, grid.n_theta)
    f_vals = np.where(radii <= a, alpha, 0.0)
    c_vals = np.asarray(c(radii), dtype=float) if callable(c) \
        else np.full(n_r, float(c))

    xi_sp = np.ones(n_r)
    xi_pp = np.ones(n_r)
    xi_ss = np.ones(n_r)
    p = max(1.0 - beta / (alpha * mu_t), 1e-3)
    degenerate_run = 0
    residual = float("inf")

    for it in range(1, grid.max_iter + 1):
        p_new = _first_moment_p(xi_sp, radii, h, a, lam_t, alpha, beta)
        if p_new <= grid.degenerate_p:
            degenerate_run += 1
            if degenerate_run >= grid.degenerate_sweeps:
                pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
                return SolveReport(pcf=pcf, p=0.0, p_tilde=0.0, iterations=it,
                                   residual=residual, converged=False,
                                   degenerate=True)
            p = max(p_new, grid.degenerate_p)
        else:
            degenerate_run = 0
            p = p_new
        xi_ss = (c_vals - p * p * xi_pp - 2 * p * (1 - p) * xi_sp) / (1 - p) ** 2
        xi_ss_fl = np.maximum(xi_ss, 0.0)

        lam_p = lam_t * p
        j_sp = lam_p * engine.closure_integrals(
            spec.terms_psi_phi, xi_sp, xi_pp, xi_sp, alpha)
        j_ss = lam_p * engine.closure_integrals(
            spec.terms_psi_psi, xi_sp, xi_sp, xi_ss_fl, alpha)

        xi_pp_new = (1 - p) * xi_sp * (f_vals + j_sp) / (p * beta)
        xi_sp_new = (1 - p) * xi_ss_fl * j_ss / (p * beta)

        residual = max(float(np.max(np.abs(xi_pp_new - xi_pp))),
                       float(np.max(np.abs(xi_sp_new - xi_sp))))
        xi_pp = xi_pp + grid.damping * (xi_pp_new - xi_pp)
        xi_sp = xi_sp + grid.damping * (xi_sp_new - xi_sp)
        if residual < grid.tol:
            p = _first_moment_p(xi_sp, radii, h, a, lam_t, alpha, beta)
            xi_ss = (c_vals - p * p * xi_pp - 2 * p * (1 - p) * xi_sp) / (1 - p) ** 2
            pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
            return SolveReport(
                pcf=pcf, p=q * p, p_tilde=p, iterations=it, residual=residual,
                converged=True,
                w=_plateau_mean(xi_sp, radii, a),
                v=_plateau_mean(xi_pp, radii, a),
                z=_plateau_mean(xi_ss, radii, a))

    pcf = _bundle(h, xi_sp, xi_pp, xi_ss)
    return SolveReport(pcf=pcf, p=q * p, p_tilde=p, iterations=grid.max_iter,
                       residual=residual, converged=False,
                       w=_plateau_mean(xi_sp, radii, a),
                       v=_plateau_mean(xi_pp, radii, a),
                       z=_plateau_mean(xi_ss, radii, a))


def _bundle(h: float, xi_sp, xi_pp, xi_ss) -> PcfTriple:
    return PcfTriple(
        xi_psi_phi=RadialFunction(h=h, values=np.asarray(xi_sp, dtype=float)),
        xi_phi_phi=RadialFunction(h=h, values=np.asarray(xi_pp, dtype=float)),
        xi_psi_psi=RadialFunction(h=h, values=np.asarray(xi_ss, dtype=float)))


def first_moment_residual(report: SolveReport, params: ModelParams,
                          lam: float = None) -> float:
    """Residual of ``beta = (1-p) lam int xi_SP(|x|) f(|x|) dx`` at a solution."""
    lam = params.lam if lam is None else lam
    rf = report.pcf.xi_psi_phi
    radii = rf.radii
    sel = radii < params.a
    integral = 2 * math.pi * params.alpha * float(
        np.sum(rf.values[sel] * radii[sel]) * rf.h)
    p = report.p_tilde if report.p_tilde is not None else report.p
    return float(params.beta - (1 - p) * lam * integral)
