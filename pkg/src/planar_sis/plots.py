"""Figure rendering for the CLI report paths.

Every command that writes delimited output can also render a matplotlib
figure next to it; all figures go through :func:`save_figure` so they share
backend setup and file handling.
"""

from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def save_figure(fig, path):
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_timeseries(times, fracs, path, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(times, fracs, lw=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("infected fraction")
    ax.set_ylim(0, 1.02)
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)


def plot_pcf(pcf, path, a=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.8))
    r = pcf.r_centers
    ax.plot(r, pcf.xi_psi_phi, label=r"$\xi_{SI}$")
    ax.plot(r, pcf.xi_phi_phi, label=r"$\xi_{II}$")
    ax.plot(r, pcf.xi_psi_psi, label=r"$\xi_{SS}$")
    ax.axhline(1.0, color="k", lw=0.6, ls=":")
    if a is not None:
        ax.axvline(a, color="gray", lw=0.6, ls="--")
    ax.set_xlabel("r")
    ax.set_ylabel("pair correlation")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)


def plot_solver_pcf(triple, path, a=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.8))
    r = triple.xi_psi_phi.radii
    ax.plot(r, triple.xi_psi_phi.values, label=r"$\xi_{SI}$")
    ax.plot(r, triple.xi_phi_phi.values, label=r"$\xi_{II}$")
    ax.plot(r, triple.xi_psi_psi.values, label=r"$\xi_{SS}$")
    ax.axhline(1.0, color="k", lw=0.6, ls=":")
    if a is not None:
        ax.axvline(a, color="gray", lw=0.6, ls="--")
    ax.set_xlabel("r")
    ax.set_ylabel("pair correlation")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)


def plot_gamma_curves(betas, gamma_minus, gamma_plus, path, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.8))
    gm = np.asarray(gamma_minus, dtype=float)
    gp = np.asarray(gamma_plus, dtype=float)
    ax.plot(betas, gp, color="tab:green", label=r"$\gamma_c^+$")
    ax.plot(betas, gm, color="tab:red", label=r"$\gamma_c^-$")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$\gamma$")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)


def plot_phase_grid(points, path, title=None):
    """Region map over the (mu, beta) grid of classified PhasePoints."""
    fig, ax = plt.subplots(figsize=(6, 4.2))
    colors = {"safe": "tab:blue", "umi": "tab:green", "ums": "tab:orange"}
    for region in colors:
        xs = [pt.mu for pt in points if pt.region == region]
        ys = [pt.beta for pt in points if pt.region == region]
        if xs:
            ax.scatter(xs, ys, s=12, c=colors[region], label=region.upper())
    mus = sorted({pt.mu for pt in points})
    ax.plot(mus, mus, color="k", lw=0.8, ls="--", label=r"$\beta=\alpha\mu$")
    ax.set_xlabel(r"$\mu$")
    ax.set_ylabel(r"$\beta$")
    ax.legend(frameon=False, fontsize=8)
    if title:
        ax.set_title(title, fontsize=9)
    return save_figure(fig, path)


def plot_mtta(records, path, xlabel="parameter", logx=False, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.8))
    xs = [r.parameter_value for r in records]
    ys = [r.mean for r in records]
    lo = [r.mean - r.ci95_low for r in records]
    hi = [r.ci95_high - r.mean for r in records]
    ax.errorbar(xs, ys, yerr=[lo, hi], fmt="o-", capsize=3, ms=4)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean time till absorption")
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)


def plot_pi_profile(profile, path, a=None, q=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(profile.radii, profile.values, lw=1.2)
    if q is not None:
        ax.axhline(q, color="gray", lw=0.7, ls=":", label="q")
        ax.legend(frameon=False)
    if a is not None:
        ax.axvline(a, color="gray", lw=0.6, ls="--")
    ax.set_xlabel("r")
    ax.set_ylabel("connection probability")
    if title:
        ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    return save_figure(fig, path)
