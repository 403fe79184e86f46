"""Report figures. Rendered off-screen to PNG files next to the CSV output."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 110,
    "savefig.bbox": "tight",
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    # Fixed metadata keeps the PNG bytes stable across runs.
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_trace(trace: np.ndarray, columns, path: str | Path, title: str,
               band: float = 0.05, settle: float | None = None) -> Path:
    idx = {c: i for i, c in enumerate(columns)}
    t = trace[:, idx["t"]]
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.0, 4.6), sharex=True)
        ax0.plot(t, trace[:, idx["theta"]], lw=1.2, label=r"$\theta$")
        ax0.plot(t, trace[:, idx["phi"]], lw=1.2, label=r"$\phi$")
        ax0.axhspan(-band, band, color="0.85", lw=0)
        if settle is not None:
            ax0.axvline(settle, color="k", ls="--", lw=0.8)
        ax0.set_ylabel("attitude (deg)")
        ax0.set_title(title)
        ax0.legend(frameon=False, ncol=2)
        for c in columns:
            if c.startswith("dW"):
                ax1.plot(t, trace[:, idx[c]], lw=0.9, label=c[2:])
        ax1.set_xlabel("time (s)")
        ax1.set_ylabel("rotor command (rpm)")
        ax1.legend(frameon=False, ncol=4)
        return _save(fig, path)


def plot_sweep(points, path: str | Path) -> Path:
    n = np.array([p[0] for p in points], dtype=float)
    v = np.array([p[1] for p in points], dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.plot(n, v * 1e3, marker="o", ms=3, lw=1.2)
        ax.set_xlabel("turns N")
        ax.set_ylabel("induced voltage (mV)")
        return _save(fig, path)


def plot_inspection(gray: np.ndarray, filtered: np.ndarray, profile: np.ndarray,
                    threshold: float, cuts, path: str | Path) -> Path:
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(3, 1, figsize=(6.0, 5.4), sharex=True)
        axes[0].imshow(gray, cmap="gray", vmin=-1, vmax=1, aspect="auto")
        axes[0].set_ylabel("image")
        lim = float(np.abs(filtered).max()) or 1.0
        axes[1].imshow(filtered, cmap="RdBu_r", vmin=-lim, vmax=lim, aspect="auto")
        axes[1].set_ylabel("response")
        axes[2].plot(np.arange(len(profile)), profile, lw=1.0)
        axes[2].axhline(threshold, color="k", ls="--", lw=0.8)
        for ax in axes:
            for c in cuts:
                ax.axvline(c - 0.5, color="tab:orange", lw=0.8)
        axes[2].set_xlabel("column")
        axes[2].set_ylabel("mean |response|")
        return _save(fig, path)
