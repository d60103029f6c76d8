"""Log-log figures of count tables."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .counting import CountTable, FitResult


def plot_counts(table: CountTable, path, fit: FitResult | None = None, title: str | None = None):
    """Save ``N(B)`` against ``B`` on log-log axes, with the fitted curve if given."""
    rows = [r for r in table.sorted() if r.B > 0 and r.N > 0]
    bs = [float(r.B) for r in rows]
    ns = [r.N for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(bs, ns, "o", ms=3, label="N(B)")
    if fit is not None and bs:
        curve = [b for b in bs if b > 1]
        model = [fit.c * b ** fit.a * math.log(b) ** (fit.b - 1) for b in curve]
        ax.loglog(curve, model, "-", lw=1.2,
                  label=f"{fit.c:.3g} B^{fit.a:.3f} (log B)^{fit.b - 1:.3f}")
    ax.set_xlabel("B")
    ax.set_ylabel("number of points with H <= B")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
