"""Figure rendering for the CLI report paths (written next to the data files)."""

import numpy as np

__all__ = ["render_curve", "render_sweep", "render_occupation"]


def _axes():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.2), dpi=150)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    import matplotlib.pyplot as plt

    plt.close(fig)


def render_curve(ys, vs, y_star, median, path):
    fig, ax = _axes()
    ax.plot(ys, vs, lw=1.6)
    ax.axvline(y_star, color="crimson", ls="--", lw=1.0, label=f"y* = {y_star:.4f}")
    ax.axvline(median, color="gray", ls=":", lw=1.0, label=f"median = {median:.4f}")
    ax.axhline(0.0, color="black", lw=0.6)
    ax.set_xlabel("y")
    ax.set_ylabel("V(y)")
    ax.legend(frameon=False)
    _save(fig, path)


def render_sweep(ys, means, stderrs, objective_analytic, y_star, path):
    fig, ax = _axes()
    ax.errorbar(ys, means, yerr=2.0 * np.asarray(stderrs), fmt="o", capsize=3, label="Monte Carlo (2 SE)")
    ax.axhline(objective_analytic, color="crimson", ls="--", lw=1.0, label="analytic V(0) + E[theta]")
    ax.axvline(y_star, color="gray", ls=":", lw=1.0, label=f"y* = {y_star:.4f}")
    ax.set_xlabel("threshold y")
    ax.set_ylabel("mean |theta - tau_y|")
    ax.legend(frameon=False)
    _save(fig, path)


def render_occupation(edges, mc_means, mc_stderrs, analytic, path):
    mids = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    fig, ax = _axes()
    ax.bar(mids, mc_means, width=0.9 * width, yerr=2.0 * np.asarray(mc_stderrs),
           capsize=2, label="Monte Carlo (2 SE)", color="#7fa8d9")
    ax.plot(mids, analytic, "k.-", lw=1.0, ms=4, label="potential density integral")
    ax.set_xlabel("drawdown level")
    ax.set_ylabel("occupation time per bin")
    ax.legend(frameon=False)
    _save(fig, path)
