"""Figure rendering for the report-producing CLI paths.

Figures are written straight to files with the Agg backend; nothing here
opens a window.  The tabular output on stdout remains the primary record,
these are the same numbers drawn.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def plot_distillation(records, path: str) -> None:
    """Render a distillation trace: negativity and distance per round."""
    plt = _pyplot()
    steps = [rec.step for rec in records]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    ax1.plot(steps, [rec.log_negativity for rec in records], "o-", color="tab:blue")
    ax1.set_xlabel("round")
    ax1.set_ylabel("logarithmic negativity")
    ax1.grid(alpha=0.3)
    ax2.semilogy(steps, [max(rec.gaussianity_distance, 1e-16) for rec in records], "s-", color="tab:red")
    ax2.set_xlabel("round")
    ax2.set_ylabel("distance to Gaussian fit")
    ax2.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_continuity(points, path: str) -> None:
    """Render the discontinuity sequence: distance, entanglement, energy."""
    plt = _pyplot()
    ks = [pt.k for pt in points]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.loglog(ks, [pt.trace_distance for pt in points], "o-", label="trace distance")
    ax.loglog(ks, [pt.entanglement for pt in points], "s-", label="entanglement")
    ax.loglog(ks, [pt.mean_energy for pt in points], "^-", label="mean energy")
    ax.set_xlabel("k")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
