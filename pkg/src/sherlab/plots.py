"""Figure emission for run reports.

Two figure families: log-log decay plots of a series column against 1 + t
with the fitted slope annotated, and linear-time energy plots showing the
monitored sum against its budget line.  Files are written as SVG.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .norms import NormReport


def render_plots(
    report: NormReport,
    out_dir: str,
    decay_column: str | None = None,
    budget: float | None = None,
) -> list:
    """Render the report's figures into ``out_dir``; returns written paths.

    ``decay_column`` selects the column for the log-log decay plot (skipped
    when None); ``budget`` draws the squared-budget line on the energy plot
    when the report carries the energy columns.
    """
    if len(report) < 2:
        raise ValueError("insufficient samples: need at least 2 to plot")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if decay_column is not None:
        vals = report.columns[decay_column]
        mask = vals > 0
        if np.count_nonzero(mask) >= 2:
            lt = np.log1p(report.times[mask])
            lv = np.log(vals[mask])
            slope = float(np.polyfit(lt, lv, 1)[0])
            fig, ax = plt.subplots()
            ax.loglog(1.0 + report.times[mask], vals[mask], "o-", ms=3)
            ax.set_xlabel("1 + t")
            ax.set_ylabel(decay_column)
            ax.set_title(f"{decay_column}: fitted slope {slope:.2f}")
            path = os.path.join(out_dir, f"decay_{decay_column}.svg")
            fig.savefig(path)
            plt.close(fig)
            written.append(path)

    if "h1_norm" in report.columns and "cum_dissipation" in report.columns:
        h1 = report.columns["h1_norm"]
        cum = report.columns["cum_dissipation"]
        fig, ax = plt.subplots()
        ax.plot(report.times, h1**2 + cum, label="norm$^2$ + cumulative dissipation")
        ax.plot(report.times, h1**2, label="norm$^2$", ls="--")
        if budget is not None:
            ax.axhline(budget**2, color="k", ls=":", label="budget$^2$")
        ax.set_xlabel("t")
        ax.legend()
        path = os.path.join(out_dir, "energy.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    if "x_norm" in report.columns:
        x2 = report.columns["x_norm"] ** 2
        cum = report.columns["cum_z2"]
        fig, ax = plt.subplots()
        ax.plot(report.times, x2 + cum, label="X$^2$ + cumulative Z$^2$")
        ax.plot(report.times, x2, label="X$^2$", ls="--")
        ax.axhline(x2[0], color="k", ls=":", label="initial X$^2$")
        ax.set_xlabel("t")
        ax.legend()
        path = os.path.join(out_dir, "analytic_energy.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    return written
