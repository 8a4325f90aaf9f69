"""Figures for flow traces."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_energy_trace(trace, path, title=None):
    """Energy and gradient norm against flow time on log axes, saved as PNG."""
    t = [r[0] for r in trace.steps]
    e = [max(r[1], 1e-300) for r in trace.steps]
    gn = [max(r[2], 1e-300) for r in trace.steps]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(t, e, label="energy")
    ax.semilogy(t, gn, label="gradient norm", linestyle="--")
    ax.set_xlabel("flow time")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path
