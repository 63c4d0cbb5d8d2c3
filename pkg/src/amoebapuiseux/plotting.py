"""SVG figures of amoeba rasters with order-labelled complement components."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .amoeba import AMOEBA, COMPLEMENT  # noqa: E402

_SVG_RC = {"svg.hashsalt": "amoebapuiseux", "svg.fonttype": "none"}


def _label_index(ras):
    """Integer image: 0 amoeba, 1 unknown, 2 + k for the k-th order label."""
    labels = ras.label_set()
    img = np.ones(ras.resolution, dtype=int)
    img[ras.status == AMOEBA] = 0
    for k, lab in enumerate(labels):
        mask = (ras.status == COMPLEMENT) & np.all(ras.labels == np.array(lab), axis=-1)
        img[mask] = 2 + k
    return img, labels


def render_amoeba(ras, path, components=None, title=None):
    """Write the raster of a 1- or 2-variable amoeba to an SVG file."""
    if ras.dim not in (1, 2):
        raise ValueError("only amoebas in one or two variables can be drawn")
    img, labels = _label_index(ras)
    pastel = plt.get_cmap("Pastel1").colors + plt.get_cmap("Pastel2").colors
    colors = ["#202020", "#bbbbbb"] + [pastel[k % len(pastel)] for k in range(len(labels))]
    cmap = ListedColormap(colors)
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6 if ras.dim == 2 else 1.6))
        (x0, x1) = ras.box[0]
        if ras.dim == 2:
            (y0, y1) = ras.box[1]
            ax.imshow(img.T, origin="lower", extent=(x0, x1, y0, y1), cmap=cmap,
                      vmin=0, vmax=len(colors) - 1, interpolation="nearest", aspect="auto")
            ax.set_ylabel("log|y|")
        else:
            ax.imshow(img[None, :], extent=(x0, x1, 0, 1), cmap=cmap, vmin=0,
                      vmax=len(colors) - 1, interpolation="nearest", aspect="auto")
            ax.set_yticks([])
        ax.set_xlabel("log|x|")
        for comp in components or []:
            pos = comp.representative
            xy = (pos[0], pos[1]) if ras.dim == 2 else (pos[0], 0.5)
            ax.text(*xy, f"$F_{{{comp.order[0]},{comp.order[1]}}}$" if ras.dim == 2
                    else f"$F_{{{comp.order[0]}}}$", ha="center", va="center", fontsize=12)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return labels


def render_support(e, path, cone=None):
    """Scatter of |a_I| over the t-exponents of a two-variable expansion, with the cone drawn."""
    if e.dim != 2:
        raise ValueError("support plots need two base variables")
    exps, coeffs = e.arrays()
    cone = cone if cone is not None else e.support_cone
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        mag = np.log10(np.maximum(np.abs(coeffs), 1e-300))
        sc = ax.scatter(exps[:, 0], exps[:, 1], c=mag, s=14, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="log10 |a_I|")
        reach = float(np.abs(exps).max()) if len(exps) else 1.0
        for g in cone.generators:
            v = np.array(g, dtype=float)
            v *= reach / np.abs(v).max()
            ax.plot([0, v[0]], [0, v[1]], color="crimson", lw=1.5)
        ax.axhline(0, color="gray", lw=0.5)
        ax.axvline(0, color="gray", lw=0.5)
        ax.set_xlabel("I_1")
        ax.set_ylabel("I_2")
        ax.set_title(f"support, d = {e.d}")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
