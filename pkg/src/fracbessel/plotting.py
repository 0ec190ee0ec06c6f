"""PNG renderings of the characteristic function and solution curves.

Figures are returned as bytes so callers can write them together with the
other artifacts. matplotlib is imported lazily; nothing else in the package
needs it.
"""

from __future__ import annotations

import io

import numpy as np

from .characteristic import G, CharacteristicRoot
from .equation import EquationSpec


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt, plt.figure(figsize=(7, 4.5), dpi=100)


def _png(plt, fig) -> bytes:
    buf = io.BytesIO()
    # fixed metadata keeps the bytes reproducible
    fig.savefig(buf, format="png", metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()


def characteristic_png(spec: EquationSpec, roots: list[CharacteristicRoot], lo: float, hi: float) -> bytes:
    """G(gamma) - nu2 over [lo, hi] with the roots marked."""
    plt, fig = _figure()
    ax = fig.add_subplot()
    g = np.linspace(lo, hi, 2000)
    with np.errstate(all="ignore"):
        f = np.asarray(G(spec, g)) - spec.nu2
    ax.plot(g, f, lw=1.2, label=r"$G(\gamma)-\nu^2$")
    ax.axhline(0.0, color="k", lw=0.6)
    for r in roots:
        ax.plot([r.gamma], [0.0], "o" if r.is_valid else "x", color="C3" if r.is_valid else "C7")
    if spec.caputo_floor is not None:
        ax.axvline(spec.caputo_floor, color="C2", ls="--", lw=0.8, label=r"$n_{max}-1$")
    finite = f[np.isfinite(f)]
    if finite.size:
        span = np.percentile(np.abs(finite), 90) or 1.0
        ax.set_ylim(-1.5 * span, 1.5 * span)
    ax.set_xlabel(r"$\gamma$")
    ax.legend(loc="best")
    return _png(plt, fig)


def solutions_png(curves: list[tuple[str, np.ndarray, np.ndarray]]) -> bytes:
    """u(x) curves, one per (label, x, u)."""
    plt, fig = _figure()
    ax = fig.add_subplot()
    for label, x, u in curves:
        ax.plot(x, u, lw=1.2, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("u(x)")
    if curves:
        ax.legend(loc="best")
    return _png(plt, fig)
