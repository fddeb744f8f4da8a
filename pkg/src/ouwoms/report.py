"""Figure rendering for the CLI report paths.

Each helper writes one figure file next to the CSV a subcommand emits.
Rendering is headless (Agg) and entirely optional; nothing here feeds
back into the simulations.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def exit_time_histogram(times, path, title="Approximated exit times"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(np.asarray(times, dtype=float), bins=80, density=True,
            color="#4878cf", edgecolor="white", linewidth=0.3)
    ax.set_xlabel("exit time")
    ax.set_ylabel("density")
    ax.set_title(title)
    _save(fig, path)


def step_scaling_curve(rows, path):
    """Mean step count versus eps (log-x), from StepScalingRow records."""
    eps = [r.eps for r in rows]
    mean = [r.mean_steps for r in rows]
    err = [3.0 * r.stderr_steps for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.errorbar(eps, mean, yerr=err, marker="o", color="#4878cf")
    ax.set_xscale("log")
    ax.set_xlabel(r"stopping tolerance $\epsilon$")
    ax.set_ylabel("mean number of steps")
    ax.set_title("Average step count versus stopping tolerance")
    _save(fig, path)


def bound_curves(eps_grid, xi_by_theta, path):
    """Error-bound curves versus eps, one line per theta (log-log)."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for theta, xi in xi_by_theta.items():
        ax.plot(eps_grid, xi, marker=".", label=rf"$\theta$ = {theta:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"stopping tolerance $\epsilon$")
    ax.set_ylabel(r"error bound $\Xi$")
    ax.legend()
    ax.set_title("Exit-CDF error bound versus stopping tolerance")
    _save(fig, path)


def gof_figure(taus, grid, density, path):
    """Sampled exit-time histogram with the analytic density overlaid."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(np.asarray(taus, dtype=float), bins=100, density=True,
            color="#4878cf", edgecolor="white", linewidth=0.3,
            label="sampled")
    ax.plot(grid, density, color="#d1495b", linewidth=1.5, label="analytic")
    ax.set_xlabel("spheroid exit time")
    ax.set_ylabel("density")
    ax.legend()
    ax.set_title("Spheroid exit-time sampler fit")
    _save(fig, path)


def ecdf_overlay(samples_by_label, path, title="Exit-time ECDFs"):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, samples in samples_by_label.items():
        xs = np.sort(np.asarray(samples, dtype=float))
        ys = np.arange(1, xs.size + 1) / xs.size
        ax.step(xs, ys, where="post", label=label)
    ax.set_xlabel("exit time")
    ax.set_ylabel("cumulative probability")
    ax.legend(loc="lower right")
    ax.set_title(title)
    _save(fig, path)
