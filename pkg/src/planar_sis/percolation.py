"""Boolean-model quantities for the no-motion case.

The probability ``q`` that a typical point lies in the infinite cluster is
approximated by the survival probability of a branching process with Poisson
offspring (the fixed point of ``q = 1 - exp(-mu*q)``), the cluster pair
correlation plateau is ``c = 1/q``, and the connection probability ``pi(r)``
satisfies a conditional-independence recursion over the contact disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from planar_sis.geometry import TorusDomain, sample_poisson

#: Boolean percolation threshold of the planar geometric graph (mean degree).
MU_STAR = 4.512


def lambert_q(mu_tilde: float, tol: float = 1e-12) -> float:
    """Unique root in (0, 1) of ``q = 1 - exp(-mu_tilde * q)``; 0 at or below
    the branching threshold ``mu_tilde = 1``."""
    if mu_tilde < 0:
        raise ValueError("mu_tilde must be >= 0")
    if mu_tilde <= 1.0:
        return 0.0
    f = lambda q: q - 1.0 + math.exp(-mu_tilde * q)
    lo, hi = tol, 1.0
    # f(lo) > 0 may fail for tiny lo when mu_tilde barely exceeds 1; expand
    while f(lo) <= 0 and lo < 0.5:
        lo *= 2
    lo /= 2
    a, b = lo, hi
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
        if b - a < tol * 0.01:
            break
    q = 0.5 * (a + b)
    # Newton polish to drive the residual below tol
    for _ in range(50):
        r = q - 1.0 + math.exp(-mu_tilde * q)
        d = 1.0 - mu_tilde * math.exp(-mu_tilde * q)
        if d == 0:
            break
        step = r / d
        q -= step
        if abs(step) < 1e-16:
            break
    return min(max(q, 0.0), 1.0)


@dataclass
class RadialProfile:
    """Connection probability on a radial grid; 1 on [0, a], ``tail`` beyond."""

    grid_step: float
    values: np.ndarray
    tail: float

    @property
    def radii(self) -> np.ndarray:
        n = len(self.values)
        return (np.arange(n) + 0.5) * self.grid_step

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = (r / self.grid_step).astype(int)
        out = np.where(idx < len(self.values),
                       np.take(self.values, np.minimum(idx, len(self.values) - 1)),
                       self.tail)
        return out if out.ndim else float(out)


def pi_recursion(lam: float, a: float, grid_step: float = None,
                 r_max: float = None, tol: float = 1e-8,
                 max_iter: int = 10000) -> RadialProfile:
    """Fixed point of the pairwise-connection recursion.

    ``pi(r) = 1 - exp(-lam * int_0^a int_0^2pi pi(sqrt(r^2+v^2+2 r v cos t))
    v dv dt)`` for ``r > a`` with ``pi = 1`` on ``[0, a]``; the tail converges
    to the branching survival probability.
    """
    mu = lam * math.pi * a * a
    q = lambert_q(mu)
    if grid_step is None:
        grid_step = a / 20.0
    if r_max is None:
        r_max = 8.0 * a
    n = int(round(r_max / grid_step))
    radii = (np.arange(n) + 0.5) * grid_step
    inside = radii <= a

    if q == 0.0:
        values = np.where(inside, 1.0, 0.0)
        return RadialProfile(grid_step=grid_step, values=values, tail=0.0)

    # quadrature nodes over the disc of radius a
    n_v, n_t = 64, 128
    vs = (np.arange(n_v) + 0.5) * (a / n_v)
    ts = (np.arange(n_t) + 0.5) * (2 * math.pi / n_t)
    wv = a / n_v
    wt = 2 * math.pi / n_t
    # distances from each grid radius through each (v, theta) node
    d = np.sqrt(radii[:, None, None] ** 2 + vs[None, :, None] ** 2
                + 2.0 * radii[:, None, None] * vs[None, :, None]
                * np.cos(ts[None, None, :]))
    idx = np.minimum((d / grid_step).astype(np.int64), n)  # n = tail slot

    values = np.where(inside, 1.0, q)
    for _ in range(max_iter):
        table = np.append(values, q)
        integral = (np.take(table, idx) * vs[None, :, None]).sum(axis=(1, 2)) * wv * wt
        new = 1.0 - np.exp(-lam * integral)
        new[inside] = 1.0
        delta = np.max(np.abs(new - values))
        values = new
        if delta < tol:
            return RadialProfile(grid_step=grid_step, values=values, tail=q)
    raise RuntimeError(f"pi recursion failed to converge below {tol}")


@dataclass
class ClusterApprox:
    """Bundle of Boolean-cluster quantities: ``q``, ``c = 1/q`` and ``pi``."""

    mu_tilde: float
    q: float
    c: float
    pi: Optional[RadialProfile]

    @property
    def defined(self) -> bool:
        return self.q > 0

    def c_radial(self) -> RadialProfile:
        """Cluster PCF approximation ``pi(r)/q`` as a radial function."""
        if not self.defined:
            raise ValueError("cluster quantities undefined at or below threshold")
        return RadialProfile(grid_step=self.pi.grid_step,
                             values=self.pi.values / self.q, tail=1.0)


def cluster_constants(lam: float, a: float, with_profile: bool = True) -> ClusterApprox:
    """Compute (q, c, pi) for the Boolean model of intensity ``lam``, radius ``a``."""
    mu = lam * math.pi * a * a
    q = lambert_q(mu)
    if q == 0.0:
        return ClusterApprox(mu_tilde=0.0, q=0.0, c=math.inf, pi=None)
    pi = pi_recursion(lam, a) if with_profile else None
    return ClusterApprox(mu_tilde=q * mu, q=q, c=1.0 / q, pi=pi)


# -- empirical estimate, used for validation ---------------------------------

class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]


def empirical_q(lam: float, a: float, dom: TorusDomain, seed,
                n_samples: int = 1) -> float:
    """Union-find estimate of the fraction of points in the largest component
    of sampled Boolean models (averaged over ``n_samples`` draws)."""
    fractions = []
    ss = np.random.SeedSequence(entropy=seed)
    for child in ss.spawn(n_samples):
        pts = sample_poisson(lam, dom, child)
        if len(pts) == 0:
            fractions.append(0.0)
            continue
        tree = cKDTree(np.mod(pts, dom.side), boxsize=dom.side)
        pairs = tree.query_pairs(a, output_type="ndarray")
        dsu = _DSU(len(pts))
        for i, j in pairs:
            dsu.union(int(i), int(j))
        largest = max(dsu.size[dsu.find(i)] for i in range(len(pts)))
        fractions.append(largest / len(pts))
    return float(np.mean(fractions))
