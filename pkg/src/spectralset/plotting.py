"""Static figures written next to the CSV/JSON outputs of the CLI."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams.update({
    "svg.hashsalt": "spectralset",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
})


def _closed(z):
    z = np.asarray(z)
    return np.append(z, z[:1])


def _save(fig, path):
    # no timestamp so repeated runs are byte-identical
    meta = {"Date": None} if str(path).endswith((".svg", ".pdf")) else {}
    fig.savefig(path, metadata=meta, bbox_inches="tight")
    plt.close(fig)


def plot_numrange(path, boundary, domain_nodes=None, eigenvalues=None,
                  f_curve=None, g_curve=None, fbar_hull=None, title=None):
    """W(A), the enclosing contour, and optionally the Lemma-1 picture for one f.

    Every drawn curve carries a ``gid`` so it shows up as a labeled group in
    SVG output.
    """
    fig, ax = plt.subplots(figsize=(6, 6))
    w = _closed(boundary.points)
    ax.fill(w.real, w.imag, alpha=0.15, color="C0")
    ax.plot(w.real, w.imag, color="C0", lw=1.5, label="W(A)", gid="numrange")
    if domain_nodes is not None:
        s = _closed(domain_nodes.sigma)
        ax.plot(s.real, s.imag, color="C1", lw=1.2, ls="--", label="contour", gid="domain")
    if eigenvalues is not None:
        ev = np.asarray(eigenvalues)
        ax.plot(ev.real, ev.imag, "k.", ms=6, label="spectrum", gid="spectrum")
    if fbar_hull is not None:
        h = _closed(fbar_hull)
        ax.fill(h.real, h.imag, color="C2", alpha=0.1)
        ax.plot(h.real, h.imag, color="C2", lw=0.8, label="conv conj f(boundary)", gid="fbar_hull")
    if f_curve is not None:
        c = _closed(f_curve)
        ax.plot(c.real, c.imag, color="C3", lw=1.0, label="f(boundary)", gid="f_curve")
    if g_curve is not None:
        c = _closed(g_curve)
        ax.plot(c.real, c.imag, color="C4", lw=1.0, label="g(boundary)", gid="g_curve")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def plot_history(path, history, bound=None, lower=2.0):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if history:
        k, r = zip(*history)
        ax.step(k, r, where="post", color="C0", gid="history")
    ax.axhline(lower, color="k", lw=0.8, ls=":")
    if bound is not None:
        ax.axhline(bound, color="C3", lw=0.8, ls="--")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("best ratio")
    _save(fig, path)


def plot_campaign(path, reports):
    """Worst signed margin per check; anything below zero is a violation."""
    names = [r.check_name for r in reports]
    margins = [r.worst_margin for r in reports]
    fig, ax = plt.subplots(figsize=(1.2 * len(names) + 2, 3.5))
    colors = ["C3" if r.violations else "C0" for r in reports]
    ax.bar(names, margins, color=colors, gid="margins")
    ax.axhline(0, color="k", lw=0.8)
    ax.set_ylabel("worst margin")
    _save(fig, path)
