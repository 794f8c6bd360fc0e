"""Render contexts to delimited text and heatmap figures.

Matrices become a single labeled heatmap plus a wide TSV; cubes become a
grid of per-relation (subject x object) heatmaps plus a long TSV of
nonzero cells.  Diffs against a baseline context render on a diverging
scale centered at zero.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamic import Context


def write_matrix_tsv(ctx: Context, path):
    vocab = ctx.numeric.dims
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t" + "\t".join(vocab[1].words) + "\n")
        for i, w in enumerate(vocab[0].words):
            row = "\t".join(repr(float(x)) for x in ctx.numeric.data[i])
            fh.write(f"{w}\t{row}\n")


def write_cube_tsv(ctx: Context, path):
    words = ctx.vocabulary.words
    arr = ctx.numeric.data
    binary = ctx.binary.data if ctx.binary is not None else None
    with open(path, "w", encoding="utf-8") as fh:
        header = "subject\trelation\tobject\tcount"
        if binary is not None:
            header += "\tbinary"
        fh.write(header + "\n")
        nz = arr != 0.0
        if binary is not None:
            nz |= binary != 0.0
        for i, j, k in zip(*np.nonzero(nz)):
            line = f"{words[i]}\t{words[j]}\t{words[k]}\t{arr[i, j, k]:g}"
            if binary is not None:
                line += f"\t{int(binary[i, j, k])}"
            fh.write(line + "\n")


def write_tsv(ctx: Context, path):
    if ctx.rank == 2:
        write_matrix_tsv(ctx, path)
    else:
        write_cube_tsv(ctx, path)


def _heatmap(ax, data, row_words, col_words, title, diverging=False):
    if diverging:
        bound = max(1e-9, float(np.max(np.abs(data))))
        im = ax.imshow(data, cmap="RdBu_r", vmin=-bound, vmax=bound)
    else:
        im = ax.imshow(data, cmap="viridis")
    ax.set_xticks(range(len(col_words)), col_words, rotation=90, fontsize=7)
    ax.set_yticks(range(len(row_words)), row_words, fontsize=7)
    ax.set_title(title, fontsize=9)
    return im


def render_matrix(ctx: Context, path, title="context", data=None, diverging=False):
    data = ctx.numeric.data if data is None else data
    rows, cols = ctx.numeric.dims
    fig, ax = plt.subplots(figsize=(max(3, 0.4 * len(cols)) + 1,
                                    max(3, 0.4 * len(rows))))
    im = _heatmap(ax, data, rows.words, cols.words, title, diverging)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_cube(ctx: Context, path, title="context", data=None, diverging=False):
    data = ctx.numeric.data if data is None else data
    words = ctx.vocabulary.words
    relations = [j for j in range(len(words)) if np.any(data[:, j, :] != 0.0)]
    if not relations:
        relations = [0] if len(words) else []
    ncols = min(3, max(1, len(relations)))
    nrows = max(1, -(-len(relations) // ncols))
    fig, axes = plt.subplots(
        nrows, ncols, squeeze=False,
        figsize=(ncols * max(2.5, 0.35 * len(words)) + 1,
                 nrows * max(2.5, 0.35 * len(words))),
    )
    ims = []
    for slot, j in enumerate(relations):
        ax = axes[slot // ncols][slot % ncols]
        ims.append(_heatmap(ax, data[:, j, :], words, words,
                            f"{title}: {words[j]}", diverging))
    for slot in range(len(relations), nrows * ncols):
        axes[slot // ncols][slot % ncols].axis("off")
    if ims:
        fig.colorbar(ims[0], ax=axes, shrink=0.7)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def report_context(ctx: Context, out_dir, name="context",
                   before: Context | None = None) -> list[Path]:
    """Write `<name>.tsv` and `<name>.png` (and `<name>_diff.png` against a
    baseline) under `out_dir`; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    tsv = out_dir / f"{name}.tsv"
    write_tsv(ctx, tsv)
    written.append(tsv)
    png = out_dir / f"{name}.png"
    render = render_matrix if ctx.rank == 2 else render_cube
    render(ctx, png, title=name)
    written.append(png)
    if before is not None:
        if before.vocabulary != ctx.vocabulary:
            before = before.with_words(ctx.vocabulary.words)
        diff = ctx.numeric.data - before.numeric.data
        dpng = out_dir / f"{name}_diff.png"
        render(ctx, dpng, title=f"{name} (change)", data=diff, diverging=True)
        written.append(dpng)
    return written
