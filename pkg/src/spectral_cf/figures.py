"""Figure rendering for CLI outputs (non-interactive Agg backend).

Each function writes one PNG next to the delimited data it illustrates and
returns the path written.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .measures import CharacteristicFunctionTrace, SpectralMeasure  # noqa: E402

_DPI = 130


def charfun_figure(path: str, exact: CharacteristicFunctionTrace | None,
                   stone: CharacteristicFunctionTrace | None,
                   title: str = "characteristic function") -> str:
    """Real/imaginary parts of up to two CF traces, plus their gap when both
    are present (the resolvent trace carries its e^{-eps|t|} damping)."""
    if exact is None and stone is None:
        raise ValueError("need at least one trace")
    n_rows = 3 if (exact is not None and stone is not None) else 2
    fig, axes = plt.subplots(n_rows, 1, figsize=(8.0, 2.6 * n_rows), sharex=True)
    ax_re, ax_im = axes[0], axes[1]
    for trace, style, name in ((exact, "-", "exact"), (stone, "--", "resolvent")):
        if trace is None:
            continue
        ax_re.plot(trace.ts, trace.values.real, style, label=name)
        ax_im.plot(trace.ts, trace.values.imag, style, label=name)
    ax_re.set_ylabel("Re")
    ax_im.set_ylabel("Im")
    ax_re.legend(loc="upper right", fontsize=8)
    ax_re.set_title(title)
    if n_rows == 3:
        gap = np.abs(exact.values - stone.values)
        axes[2].semilogy(exact.ts, np.maximum(gap, 1e-18))
        axes[2].set_ylabel("|exact - resolvent|")
    axes[-1].set_xlabel("t")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def measure_figure(path: str, measure: SpectralMeasure,
                   title: str = "spectral measure") -> str:
    """Atoms (stems), smoothed density, and CDF of a spectral measure."""
    panels = 1 + (measure.density_samples is not None) + (measure.cdf_samples is not None)
    fig, axes = plt.subplots(panels, 1, figsize=(8.0, 2.6 * panels), sharex=True)
    if panels == 1:
        axes = [axes]
    idx = 0
    ax = axes[idx]
    if measure.atoms:
        locs = [a[0] for a in measure.atoms]
        wts = [a[1] for a in measure.atoms]
        markerline, stemlines, _ = ax.stem(locs, wts)
        plt.setp(markerline, markersize=4)
    ax.set_ylabel("atom weight")
    ax.set_title(title)
    if measure.density_samples is not None:
        idx += 1
        axes[idx].plot(measure.density_samples[:, 0], measure.density_samples[:, 1])
        axes[idx].set_ylabel(f"density (eps={measure.epsilon_used:g})")
    if measure.cdf_samples is not None:
        idx += 1
        axes[idx].plot(measure.cdf_samples[:, 0], measure.cdf_samples[:, 1])
        axes[idx].set_ylabel("cdf")
        axes[idx].set_ylim(-0.05, 1.05)
    axes[-1].set_xlabel("lambda")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def verify_figure(path: str, report) -> str:
    """Margin chart of a verification report: error/tolerance per check on a
    log scale (1 is the pass/fail line)."""
    names = [f"{r.name} [{r.context}]" for r in report.results]
    margins = [max(r.abs_error / r.tolerance, 1e-18) for r in report.results]
    colors = ["tab:blue" if r.passed else "tab:red" for r in report.results]
    height = max(3.0, 0.28 * len(names))
    fig, ax = plt.subplots(figsize=(9.0, height))
    ypos = np.arange(len(names))
    ax.barh(ypos, margins, color=colors)
    ax.set_yticks(ypos)
    ax.set_yticklabels(names, fontsize=6)
    ax.set_xscale("log")
    ax.axvline(1.0, color="k", lw=1)
    ax.set_xlabel("error / tolerance")
    ax.set_title(f"validation suite '{report.suite}': "
                 f"{'all passed' if report.passed else 'FAILURES PRESENT'}")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
