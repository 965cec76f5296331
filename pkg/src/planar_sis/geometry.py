"""Torus geometry, Poisson sampling, and the uniform-cell neighbor index.

All spatial computation lives on a square torus of side ``L``; distances are
minimum-image.  The infection ball is closed (``r <= a``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Hard cap on the expected number of sampled points (`lambda * L**2`).
MAX_EXPECTED_POINTS = 50_000_000


@dataclass(frozen=True)
class ModelParams:
    """Rate/geometry quintuple of the epidemic model.

    Attributes
    ----------
    alpha : float
        Pairwise infection rate (1/time).
    beta : float
        Recovery rate (1/time).
    gamma : float
        Jump (motion) rate (1/time).
    lam : float
        Spatial intensity of the Poisson point process (points/area).
    a : float
        Infection radius (length).
    """

    alpha: float
    beta: float
    gamma: float
    lam: float
    a: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")

    @property
    def mu(self) -> float:
        """Mean degree of the underlying geometric graph, ``lam * pi * a**2``."""
        return self.lam * math.pi * self.a * self.a

    @classmethod
    def from_mu(cls, alpha: float, beta: float, gamma: float, mu: float,
                lam: float = 1.0) -> "ModelParams":
        """Build params with the radius ``a`` chosen so that the mean degree is ``mu``."""
        a = math.sqrt(mu / (lam * math.pi))
        return cls(alpha=alpha, beta=beta, gamma=gamma, lam=lam, a=a)

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
                "lambda": self.lam, "a": self.a, "mu": self.mu}


@dataclass(frozen=True)
class TorusDomain:
    """Square torus of side ``side``; must exceed ``2a`` so a disc never self-wraps."""

    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError(f"side must be > 0, got {self.side}")

    def validate_radius(self, a: float) -> None:
        if not self.side > 2 * a:
            raise ValueError(
                f"torus side {self.side} must exceed 2*a = {2 * a} so the "
                "infection disc cannot overlap itself around the wrap")

    @property
    def area(self) -> float:
        return self.side * self.side

    def wrap(self, points: np.ndarray) -> np.ndarray:
        """Reduce coordinates into [0, L)."""
        return np.mod(points, self.side)


def torus_distance(p, q, dom: TorusDomain) -> float:
    """Minimum-image distance between two positions on the torus."""
    L = dom.side
    d = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)) % L
    d = np.minimum(d, L - d)
    return float(np.sqrt(np.sum(d * d, axis=-1)))


def torus_distances(points: np.ndarray, q, dom: TorusDomain) -> np.ndarray:
    """Vectorized minimum-image distances from every row of ``points`` to ``q``."""
    L = dom.side
    d = np.abs(points - np.asarray(q, dtype=float)) % L
    d = np.minimum(d, L - d)
    return np.sqrt(np.einsum("ij,ij->i", d, d))


def sample_poisson(lam: float, dom: TorusDomain, seed) -> np.ndarray:
    """Sample a homogeneous Poisson point process of intensity ``lam`` on the torus.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.  The count is
    Poisson(lam * L**2) and positions are i.i.d. uniform; fully deterministic
    given the seed.
    """
    expected = lam * dom.area
    if expected > MAX_EXPECTED_POINTS:
        raise ValueError(
            f"expected point count {expected:.3g} exceeds cap {MAX_EXPECTED_POINTS}")
    rng = np.random.default_rng(seed)
    n = rng.poisson(expected)
    return rng.random((n, 2)) * dom.side


@dataclass
class CellIndex:
    """Uniform-cell spatial index for radius-``a`` neighbor queries on the torus.

    Cell edge is ``L / floor(L / a)`` (the largest subdivision with edge >= a),
    so a 3x3 neighborhood always covers the closed ball of radius ``a``.
    Read-only after construction; rebuild to mutate.
    """

    points: np.ndarray
    a: float
    dom: TorusDomain
    n_side: int = field(init=False)
    cell_edge: float = field(init=False)
    _order: np.ndarray = field(init=False, repr=False)
    _starts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.dom.validate_radius(self.a)
        L = self.dom.side
        self.n_side = max(1, int(L / self.a))
        # guard against float edge cases making the cell smaller than a
        while self.n_side > 1 and L / self.n_side < self.a:
            self.n_side -= 1
        self.cell_edge = L / self.n_side
        pts = self.dom.wrap(np.asarray(self.points, dtype=float))
        self.points = pts
        cells = self._cell_of(pts)
        order = np.argsort(cells, kind="stable")
        counts = np.bincount(cells, minlength=self.n_side * self.n_side)
        self._order = order
        self._starts = np.concatenate(([0], np.cumsum(counts)))

    def _cell_of(self, pts: np.ndarray) -> np.ndarray:
        ix = np.minimum((pts[..., 0] / self.cell_edge).astype(np.int64), self.n_side - 1)
        iy = np.minimum((pts[..., 1] / self.cell_edge).astype(np.int64), self.n_side - 1)
        return ix * self.n_side + iy

    def candidates(self, p) -> np.ndarray:
        """Ids in the 3x3 cell neighborhood of position ``p`` (all cells if the
        grid is too small for distinct wrapped neighbors)."""
        n = self.n_side
        if n < 3:
            return self._order
        p = np.mod(np.asarray(p, dtype=float), self.dom.side)
        cx = min(int(p[0] / self.cell_edge), n - 1)
        cy = min(int(p[1] / self.cell_edge), n - 1)
        out = []
        for dx in (-1, 0, 1):
            x = (cx + dx) % n
            for dy in (-1, 0, 1):
                c = x * n + (cy + dy) % n
                s, e = self._starts[c], self._starts[c + 1]
                if e > s:
                    out.append(self._order[s:e])
        if not out:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(out)

    def query(self, p, exclude: int = -1) -> np.ndarray:
        """Ids at torus distance <= a from ``p`` (closed ball), minus ``exclude``."""
        cand = self.candidates(p)
        if cand.size == 0:
            return cand
        d = torus_distances(self.points[cand], p, self.dom)
        hit = cand[d <= self.a]
        if exclude >= 0:
            hit = hit[hit != exclude]
        return np.sort(hit)


def build_cell_index(points: np.ndarray, a: float, dom: TorusDomain) -> CellIndex:
    """Construct the uniform-cell index over ``points``."""
    return CellIndex(np.asarray(points, dtype=float), a, dom)


def neighbors_within(index: CellIndex, p, a: float = None, point_id: int = -1) -> np.ndarray:
    """Ids of indexed points within the closed ball of radius ``a`` around ``p``.

    When ``p`` is itself an indexed point, pass its ``point_id`` so it is
    excluded from its own neighbor list.
    """
    if a is not None and a != index.a:
        raise ValueError("query radius must match the index build radius")
    return index.query(p, exclude=point_id)
