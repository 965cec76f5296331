"""Estimators over simulation output.

Pair correlation functions are estimated with torus (minimum-image) distances,
so no edge correction is required.  Auto-PCFs use the ordered-pair convention
of the factorial moment definition; normalization uses empirical intensities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import t as student_t

from planar_sis.geometry import TorusDomain

STATE_S = 0
STATE_I = 1


@dataclass
class PcfEstimate:
    """Binned pair correlation estimates for the (susceptible, infected) split.

    ``xi_*`` values are NaN in bins with zero pair counts (flagged, not
    zero-filled); ``counts_*`` carry the raw pair tallies.
    """

    bin_edges: np.ndarray
    xi_psi_phi: np.ndarray
    xi_phi_phi: np.ndarray
    xi_psi_psi: np.ndarray
    counts_psi_phi: np.ndarray
    counts_phi_phi: np.ndarray
    counts_psi_psi: np.ndarray
    n_snapshots: int
    mean_intensity_s: float
    mean_intensity_i: float
    cross_available: bool = True

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def to_rows(self) -> list:
        rows = []
        for k in range(len(self.r_centers)):
            rows.append({
                "r_lo": self.bin_edges[k],
                "r_hi": self.bin_edges[k + 1],
                "xi_psiphi": self.xi_psi_phi[k],
                "xi_phiphi": self.xi_phi_phi[k],
                "xi_psipsi": self.xi_psi_psi[k],
                "counts": int(self.counts_psi_phi[k] + self.counts_phi_phi[k]
                              + self.counts_psi_psi[k]),
            })
        return rows


def _pair_distances(points: np.ndarray, L: float, r_max: float):
    """(i, j, d) for unordered pairs with torus distance <= r_max, i < j."""
    if len(points) < 2:
        return (np.empty(0, dtype=int), np.empty(0, dtype=int), np.empty(0))
    tree = cKDTree(np.mod(points, L), boxsize=L)
    pairs = tree.query_pairs(r_max, output_type="ndarray")
    if len(pairs) == 0:
        return (np.empty(0, dtype=int), np.empty(0, dtype=int), np.empty(0))
    d = np.abs(points[pairs[:, 0]] - points[pairs[:, 1]]) % L
    d = np.minimum(d, L - d)
    dist = np.sqrt((d * d).sum(axis=1))
    return pairs[:, 0], pairs[:, 1], dist


def estimate_pcf(snapshots: Sequence, dom: TorusDomain, bin_width: float,
                 r_max: float) -> PcfEstimate:
    """Estimate the three PCFs from ``(t, positions, states)`` snapshots.

    For each annulus, ``xi_AB = pairs / (lam_A * lam_B * area * annulus_area)``
    with empirical intensities ``lam_A``, ``lam_B``.  Cross pairs are counted
    ordered (S from one class, I from the other); auto pairs are counted twice
    to match the ordered-pair factorial-moment convention.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if not snapshots:
        raise ValueError("need at least one snapshot")
    L = dom.side
    edges = np.arange(0.0, r_max + bin_width * 0.5, bin_width)
    if edges[-1] < r_max:
        edges = np.append(edges, edges[-1] + bin_width)
    nb = len(edges) - 1
    annulus = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)

    cnt_si = np.zeros(nb)
    cnt_ii = np.zeros(nb)
    cnt_ss = np.zeros(nb)
    norm_si = np.zeros(nb)
    norm_ii = np.zeros(nb)
    norm_ss = np.zeros(nb)
    lam_s_sum = 0.0
    lam_i_sum = 0.0
    any_cross = False

    for _, pos, states in snapshots:
        states = np.asarray(states)
        n_s = int((states == STATE_S).sum())
        n_i = int((states == STATE_I).sum())
        lam_s = n_s / dom.area
        lam_i = n_i / dom.area
        lam_s_sum += lam_s
        lam_i_sum += lam_i
        i_arr, j_arr, d = _pair_distances(np.asarray(pos, dtype=float), L, edges[-1])
        if d.size:
            si = states[i_arr]
            sj = states[j_arr]
            bins = np.minimum((d / bin_width).astype(int), nb - 1)
            cross = si != sj
            both_i = (si == STATE_I) & (sj == STATE_I)
            both_s = (si == STATE_S) & (sj == STATE_S)
            cnt_si += np.bincount(bins[cross], minlength=nb)
            cnt_ii += 2 * np.bincount(bins[both_i], minlength=nb)
            cnt_ss += 2 * np.bincount(bins[both_s], minlength=nb)
        # per-snapshot normalization masses (ordered-pair densities)
        norm_si += lam_s * lam_i * dom.area * annulus
        norm_ii += lam_i * lam_i * dom.area * annulus
        norm_ss += lam_s * lam_s * dom.area * annulus
        if n_s > 0 and n_i > 0:
            any_cross = True

    def ratio(counts, norm):
        # zero-count bins are flagged NaN rather than zero-filled
        out = np.full(nb, np.nan)
        ok = (norm > 0) & (counts > 0)
        out[ok] = counts[ok] / norm[ok]
        return out

    # cross counts are unordered S-I pairs; the ordered density has both
    # orders, and lam_s*lam_i*area*annulus is exactly the one-order mass
    xi_si = ratio(cnt_si, norm_si)
    xi_ii = ratio(cnt_ii, norm_ii)
    xi_ss = ratio(cnt_ss, norm_ss)
    nsnap = len(snapshots)
    return PcfEstimate(
        bin_edges=edges, xi_psi_phi=xi_si, xi_phi_phi=xi_ii, xi_psi_psi=xi_ss,
        counts_psi_phi=cnt_si, counts_phi_phi=cnt_ii, counts_psi_psi=cnt_ss,
        n_snapshots=nsnap, mean_intensity_s=lam_s_sum / nsnap,
        mean_intensity_i=lam_i_sum / nsnap, cross_available=any_cross)


def check_superposition(pcf: PcfEstimate, p: float) -> np.ndarray:
    """Per-bin residual of the Poisson superposition identity,
    ``(1-p)^2 xi_SS + p^2 xi_II + 2 p (1-p) xi_SI - 1``."""
    return ((1 - p) ** 2 * pcf.xi_psi_psi + p ** 2 * pcf.xi_phi_phi
            + 2 * p * (1 - p) * pcf.xi_psi_phi - 1.0)


def w_plateau(pcf: PcfEstimate, a: float) -> float:
    """Count-weighted mean of the cross PCF over bins inside (0, a)."""
    sel = pcf.bin_edges[1:] <= a + 1e-12
    w = pcf.counts_psi_phi[sel]
    v = pcf.xi_psi_phi[sel]
    ok = ~np.isnan(v) & (w > 0)
    if not ok.any():
        return float("nan")
    return float(np.average(v[ok], weights=w[ok]))


# -- MTTA ------------------------------------------------------------------

@dataclass
class MttaRecord:
    """Absorption-time summary for one parameter value (and torus side)."""

    parameter_value: float
    L: float
    samples: List[float]
    censored_n: int
    mean: float = field(init=False)
    ci95_low: float = field(init=False)
    ci95_high: float = field(init=False)

    def __post_init__(self):
        xs = np.asarray(self.samples, dtype=float)
        if len(xs) == 0:
            self.mean = float("nan")
            self.ci95_low = float("nan")
            self.ci95_high = float("nan")
            return
        self.mean = float(xs.mean())
        if len(xs) > 1:
            half = float(student_t.ppf(0.975, len(xs) - 1) * xs.std(ddof=1)
                         / math.sqrt(len(xs)))
        else:
            half = float("inf")
        self.ci95_low = self.mean - half
        self.ci95_high = self.mean + half

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def all_censored(self) -> bool:
        return self.n == 0 and self.censored_n > 0

    def to_row(self) -> dict:
        return {"param": self.parameter_value, "L": self.L, "mean": self.mean,
                "ci_lo": self.ci95_low, "ci_hi": self.ci95_high,
                "n": self.n, "censored_n": self.censored_n}


def mtta_record(parameter_value: float, L: float, results) -> MttaRecord:
    """Summarize a list of ``ExtinctionResult`` into an :class:`MttaRecord`.

    Censored runs are excluded from the mean and flagged in ``censored_n``.
    """
    samples = [r.t_absorb for r in results if not r.censored]
    censored = sum(1 for r in results if r.censored)
    return MttaRecord(parameter_value=parameter_value, L=L,
                      samples=samples, censored_n=censored)


def mtta_curve(parameter_values, L, results_per_value) -> List[MttaRecord]:
    """One record per parameter value from per-value extinction results."""
    return [mtta_record(v, L, res)
            for v, res in zip(parameter_values, results_per_value)]


# -- Little's law ------------------------------------------------------------

def little_ratio(susceptible_sojourns: np.ndarray, p: float, beta: float) -> float:
    """Ratio of the measured mean susceptible period to its stationary value
    ``(1-p)/(p*beta)``; approximately 1 for a stationary surviving run."""
    xs = np.asarray(susceptible_sojourns, dtype=float)
    if xs.size == 0:
        raise ValueError("no completed susceptible sojourns available")
    if not 0 < p < 1:
        raise ValueError(f"need p in (0,1), got {p}")
    return float(xs.mean() * p * beta / (1 - p))


def little_check(run_result) -> float:
    """Little's-law consistency ratio for a finished run with sojourn capture."""
    if run_result.sojourn_times is None or len(run_result.sojourn_times) == 0:
        raise ValueError("run has no sojourn data; enable collect_sojourns")
    if run_result.absorbed:
        raise ValueError("run went extinct before a stable estimate")
    return little_ratio(run_result.sojourn_times, run_result.p_mean,
                        run_result.params.beta)


# -- misc helpers used by validation tests -----------------------------------

def dispersion_index(points: np.ndarray, dom: TorusDomain, n_cells: int) -> tuple:
    """Variance/mean ratio of counts over an ``n_cells x n_cells`` partition,
    with the count of cells used."""
    L = dom.side
    edge = L / n_cells
    ix = np.minimum((points[:, 0] / edge).astype(int), n_cells - 1)
    iy = np.minimum((points[:, 1] / edge).astype(int), n_cells - 1)
    counts = np.bincount(ix * n_cells + iy, minlength=n_cells * n_cells)
    m = counts.mean()
    if m == 0:
        return float("nan"), n_cells * n_cells
    return float(counts.var(ddof=1) / m), n_cells * n_cells
