"""Matplotlib rendering of benchmark reports to image files.

Figures are written next to the CSV/JSON output: an SER-vs-SNR curve
per detector for sweep runs and a heatmap per variant for landscape
runs. Rendering is headless (Agg) and optional at the CLI level.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DETECTOR_STYLE = {
    "ml": dict(color="black", marker="o", linestyle="-"),
    "zf": dict(color="tab:green", marker="v", linestyle="--"),
    "mmse": dict(color="tab:olive", marker="^", linestyle="--"),
    "bcd": dict(color="tab:gray", marker="d", linestyle="--"),
    "stdqaoa": dict(color="tab:red", marker="s", linestyle="-."),
    "ws-rx": dict(color="tab:orange", marker="P", linestyle="-."),
    "ws-ws": dict(color="tab:purple", marker="X", linestyle="-."),
    "lr-qaoa": dict(color="tab:brown", marker="*", linestyle="-."),
    "wslr-rx": dict(color="tab:cyan", marker="h", linestyle="-"),
    "wslr-w": dict(color="tab:blue", marker="D", linestyle="-"),
}


def render_ser_figure(report, out_dir: str) -> str:
    """Semilog SER-vs-SNR curves with 95% error bars; returns the file path."""
    detectors = []
    for cell in report.cells:
        if cell.detector not in detectors:
            detectors.append(cell.detector)
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    for det in detectors:
        cells = sorted((c for c in report.cells if c.detector == det),
                       key=lambda c: c.snr_db)
        snr = [c.snr_db for c in cells]
        ser = [max(c.ser, 1e-6) for c in cells]
        err = [c.ci95 for c in cells]
        ax.errorbar(snr, ser, yerr=err, label=det.upper(),
                    capsize=2, **_DETECTOR_STYLE.get(det, {}))
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("SER")
    nt, nr, order = (report.config.get(k) for k in ("nt", "nr", "order"))
    ax.set_title(f"{nt}x{nr} MIMO, {order}-QAM")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, "ser.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_landscape_figure(report, out_dir: str) -> str:
    """One heatmap of <H_C> per variant over the (gamma_max, beta_max) grid."""
    names = list(report.grids)
    ncols = 3
    nrows = -(-len(names) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.0 * ncols, 3.4 * nrows),
                             squeeze=False)
    extent = [report.axis[0], report.axis[-1], report.axis[0], report.axis[-1]]
    for idx, name in enumerate(names):
        ax = axes[idx // ncols][idx % ncols]
        grid = np.asarray(report.grids[name])
        im = ax.imshow(grid.T, origin="lower", extent=extent, aspect="auto",
                       cmap="viridis")
        ax.set_title(name, fontsize=10)
        ax.set_xlabel(r"$\gamma_{\max}$")
        ax.set_ylabel(r"$\beta_{\max}$")
        fig.colorbar(im, ax=ax, shrink=0.85)
    for idx in range(len(names), nrows * ncols):
        axes[idx // ncols][idx % ncols].axis("off")
    fig.suptitle("Expected cost over the schedule-parameter grid", y=0.99)
    fig.tight_layout()
    path = os.path.join(out_dir, "landscape.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
