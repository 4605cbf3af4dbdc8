"""Figures for the report paths of the command line tool.

Everything is drawn with the Agg backend and written straight to a file.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .mass_formula import eichler_constant, log_class_set_bound_estimate  # noqa: E402
from .swan_calculus import N_lower_bound  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-stable
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def plot_n_bound(path, mh_values, highlight=None):
    """log of the certified lower bound for N(G, n) against m_H."""
    mh_values = sorted(set(mh_values))
    logs = [float(N_lower_bound(mh).value.log_lower) for mh in mh_values]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(mh_values, logs, marker="o", ms=3, lw=1)
    if highlight is not None:
        ax.axvline(highlight, color="grey", ls="--", lw=0.8)
    ax.axhline(0.0, color="black", lw=0.5)
    ax.set_xlabel("m_H(G)")
    ax.set_ylabel("log lower bound for N(G, n)")
    ax.set_title("Stable class size bound")
    return _save(fig, path)


def plot_class_set_bound(path, n_max=500):
    """log B(2n) for the class set bound against n, with the (3/8) phi log m guide."""
    from ._nt import euler_phi

    ns = list(range(3, n_max + 1))
    logs = [log_class_set_bound_estimate(2 * n) for n in ns]
    guide = [0.375 * euler_phi(2 * n) * math.log(2 * n) for n in ns]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, logs, ".", ms=2, label="log B(2n)")
    ax.plot(ns, guide, ".", ms=1, alpha=0.5, label="(3/8) phi(2n) log 2n")
    ax.set_xlabel("n")
    ax.set_ylabel("natural log")
    ax.legend(loc="upper left")
    return _save(fig, path)


def plot_eichler_constants(path, ms):
    ms = sorted(ms)
    vals = [float(eichler_constant(m)) for m in ms]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ms, vals, marker="o", ls="none")
    for m, v in zip(ms, vals):
        ax.annotate(str(eichler_constant(m)), (m, v), fontsize=6, xytext=(2, 2), textcoords="offset points")
    ax.set_xlabel("m")
    ax.set_ylabel("ei of Q(zeta_m)^+")
    return _save(fig, path)
