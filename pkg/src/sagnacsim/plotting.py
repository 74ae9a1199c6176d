"""Figure rendering for the CLI report path.

Every function writes one PNG next to the delimited output and returns the
path. Rendering is headless (Agg); figures carry the same numbers as the
CSV/JSON artifacts, never extra computation.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_fringe(points, path, shots, title="Bright-port fringe"):
    phis = [p.phi for p in points]
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    dense = np.linspace(min(phis), max(phis), 400)
    ax.plot(dense, (1 + np.cos(dense)) / 2, "-", color="0.6", lw=1.2,
            label="(1 + cos phi)/2")
    ax.errorbar(phis, [p.counts / shots for p in points],
                yerr=[p.sigma / shots for p in points],
                fmt="o", ms=3.5, capsize=2, label="sampled rate")
    ax.plot(phis, [p.probability for p in points], ".", ms=2, color="C3",
            label="exact probability")
    ax.set_xlabel("plate phase (rad)")
    ax.set_ylabel("bright-port probability")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_correlation_table(rows, path):
    fig, ax = plt.subplots(figsize=(7.5, 3.8))
    labels = [row.operator for row in rows]
    values = [row.value for row in rows]
    sigmas = [row.sigma for row in rows]
    colors = {"x": "C0", "y": "C1", "z": "C2"}
    bar_colors = [colors[row.axis] for row in rows]
    ax.bar(range(len(rows)), values, yerr=sigmas, color=bar_colors, capsize=2)
    ax.axhline(0, color="0.3", lw=0.8)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=60, fontsize=7)
    ax.set_ylabel("pair correlation")
    ax.set_title("Two-body correlations, all pairs and axes")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_witness_vs_noise(report, noise_p, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    grid = np.linspace(0, 1, 101)
    ax.plot(grid, 1 - (5 / 3) * (1 - grid), "-", color="0.6",
            label="white-noise model")
    ax.axhline(0, color="0.3", lw=0.8)
    ax.axvline(0.4, color="0.3", lw=0.8, ls=":", label="detection threshold p = 2/5")
    ax.errorbar([noise_p], [report.value], yerr=[report.uncertainty], fmt="o",
                color="C3", capsize=3, label="this run")
    ax.set_xlabel("white-noise fraction p")
    ax.set_ylabel("structural witness")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_wmult(reports, path):
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    labels = [r.form for r in reports]
    values = [r.value for r in reports]
    sigmas = [r.uncertainty for r in reports]
    ax.bar(labels, values, yerr=sigmas, color=["C0", "C1"][: len(reports)], capsize=3)
    ax.axhline(0, color="0.3", lw=0.8)
    ax.set_ylabel("multipartite witness value")
    ax.set_title("Collective-spin witness, both evaluation forms")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_truth_table(rows, path):
    fig, axes = plt.subplots(1, len(rows), figsize=(3.2 * len(rows), 3.4))
    if len(rows) == 1:
        axes = [axes]
    for ax, row in zip(axes, rows):
        amps = row.target.amplitudes
        ax.bar([0, 1], np.abs(amps), color="C0", alpha=0.7, label="|amplitude|")
        for pos, amp in enumerate(amps):
            ax.annotate(f"{math.degrees(np.angle(amp)):.0f} deg", (pos, abs(amp)),
                        ha="center", va="bottom", fontsize=8)
        ax.set_xticks([0, 1])
        ax.set_xticklabels(["|0>", "|1>"])
        ax.set_ylim(0, 1.05)
        ax.set_title(f"control |{row.control}>, plate {row.plate_phase:.3f} rad",
                     fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_density_matrix(result, path):
    mat = result.rho.matrix
    fig, axes = plt.subplots(1, 2, figsize=(7.0, 3.2))
    for ax, part, name in ((axes[0], mat.real, "Re"), (axes[1], mat.imag, "Im")):
        image = ax.imshow(part, vmin=-1, vmax=1, cmap="RdBu_r")
        ax.set_title(f"{name}(rho), {result.method}", fontsize=9)
        ax.set_xticks(range(mat.shape[0]))
        ax.set_yticks(range(mat.shape[0]))
        fig.colorbar(image, ax=ax, shrink=0.85)
    if result.fidelity_vs_target is not None:
        fig.suptitle(f"fidelity vs target: {result.fidelity_vs_target:.4f}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
