"""Static figures for scan reports (written next to the CSV/JSON outputs)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .scanner import ScanResult, TransitionWindow


def plot_scan(result: ScanResult, windows: dict[int, TransitionWindow] | None,
              path: str | Path, *, hi: float = 0.8, lo: float = 0.2) -> Path:
    """Satisfiability probability vs density, one curve per instance size.

    Error bars are the Wilson 95% intervals; the window levels are drawn as
    horizontal guides.  The output format follows the file suffix (.svg by
    default usage).
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    for n in result.n_list:
        row = result.row(n)
        cs = [cell.c for cell in row]
        ps = [cell.phat if cell.phat is not None else float("nan") for cell in row]
        err_lo, err_hi = [], []
        for cell in row:
            if cell.phat is None:
                err_lo.append(0.0)
                err_hi.append(0.0)
            else:
                ci = cell.interval
                err_lo.append(max(cell.phat - ci[0], 0.0))
                err_hi.append(max(ci[1] - cell.phat, 0.0))
        ax.errorbar(cs, ps, yerr=[err_lo, err_hi], marker="o", markersize=3,
                    capsize=2, linewidth=1.2, label=f"n={n}")
    for level in (hi, lo):
        ax.axhline(level, color="grey", linestyle="--", linewidth=0.8)
    if windows:
        for w in windows.values():
            if w.defined:
                ax.axvspan(w.c_lo, w.c_hi, alpha=0.06, color="tab:blue")
    ax.set_xlabel("density c  (p = c / n^(k-1))")
    ax.set_ylabel("empirical satisfiability probability")
    ax.set_ylim(-0.03, 1.03)
    ax.set_title(f"{result.dist_tag} [{result.model} model]")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
