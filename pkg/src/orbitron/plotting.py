"""Figures for sweep and trajectory CSV files.

The drawing helpers use only the standard library and matplotlib so that
``emit_plot_script`` can copy their source into a standalone script.
"""

import csv
import inspect
import math
import os

from .errors import MissingColumns


def read_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        return [], {}
    header = rows[0]
    cols = {name: [r[i] for r in rows[1:]] for i, name in enumerate(header)}
    return header, cols


def as_float(values):
    out = []
    for v in values:
        try:
            out.append(float(v))
        except ValueError:
            out.append(math.nan)
    return out


def margin_crossings(xs, margin):
    """x positions where a margin column changes sign (linear interpolation)."""
    out = []
    for i in range(len(xs) - 1):
        a, b = margin[i], margin[i + 1]
        if math.isnan(a) or math.isnan(b) or math.isinf(a) or math.isinf(b):
            continue
        if (a > 0) != (b > 0) and a != b:
            out.append(xs[i] + (xs[i + 1] - xs[i]) * a / (a - b))
    return out


def gap_spans(xs, definite, classification):
    """Runs of points with an indefinite form but an imaginary spectrum."""
    spans, start = [], None
    for i, x in enumerate(xs):
        gap = definite[i] == "0" and classification[i] == "spectrally_stable"
        if gap and start is None:
            start = i
        if not gap and start is not None:
            spans.append((xs[start], xs[i - 1]))
            start = None
    if start is not None:
        spans.append((xs[start], xs[-1]))
    return spans


def draw_line(plt, header, cols, title):
    fig, ax = plt.subplots(figsize=(7, 4))
    xname = header[0]
    xs = as_float(cols[xname])
    if "max_re" in cols:
        ys = as_float(cols["max_re"])
        ax.plot(xs, ys, color="black", lw=1.2, label="max Re(eigenvalue)")
        if "definite" in cols and "classification" in cols:
            for a, b in gap_spans(xs, cols["definite"], cols["classification"]):
                ax.axvspan(a, b, color="0.8", zorder=0)
        for name in header:
            if name.startswith("margin_"):
                for xc in margin_crossings(xs, as_float(cols[name])):
                    ax.axvline(xc, color="red", ls=":", lw=0.8)
                    ax.plot([xc], [0.0], "o", color="red", ms=6, zorder=5)
        ax.set_ylabel("max Re(eigenvalue) (1/s)")
    else:
        for name in ("h", "J1", "J2"):
            v = as_float(cols[name])
            ref = max(abs(v[0]), 1e-300)
            ax.semilogy(xs, [max(abs(u - v[0]) / ref, 1e-18) for u in v], label=name)
        ax.set_ylabel("relative drift")
        ax.legend()
    ax.set_xlabel(xname)
    ax.set_title(title)
    fig.tight_layout()
    return fig


def draw_heatmap(plt, header, cols, title):
    xname, yname = header[0], header[1]
    xs, ys = as_float(cols[xname]), as_float(cols[yname])
    ux, uy = sorted(set(xs)), sorted(set(ys))
    ix = {v: i for i, v in enumerate(ux)}
    iy = {v: i for i, v in enumerate(uy)}
    grid = [[math.nan] * len(ux) for _ in uy]
    status = {"nonlinearly_unstable": 0, "undecided": 1, "nonlinearly_stable": 2}
    for x, y, v in zip(xs, ys, cols["verdict"]):
        grid[iy[y]][ix[x]] = status.get(v, math.nan)
    fig, ax = plt.subplots(figsize=(6, 5))
    from matplotlib.colors import ListedColormap
    cmap = ListedColormap(["#c0392b", "#bdbdbd", "#2e86c1"])
    mesh = ax.pcolormesh(ux, uy, grid, cmap=cmap, vmin=-0.5, vmax=2.5, shading="nearest")
    bar = fig.colorbar(mesh, ax=ax, ticks=[0, 1, 2])
    bar.ax.set_yticklabels(["unstable", "undecided", "stable"])
    ax.set_xlabel(xname)
    ax.set_ylabel(yname)
    ax.set_title(title)
    fig.tight_layout()
    return fig


def required_columns(kind, header):
    if kind == "heatmap":
        need = ["verdict"]
        if len(header) < 2:
            return ["<two axis columns>"]
    else:
        need = ["max_re"] if "max_re" in header else ["t", "h", "J1", "J2"]
        if not header:
            return need
    return [c for c in need if c not in header]


# -- in-process rendering ---------------------------------------------------

def render(csv_path, png_path, kind, title=None):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    header, cols = read_columns(csv_path)
    missing = required_columns(kind, header)
    if missing:
        raise MissingColumns(f"{csv_path}: missing columns {', '.join(missing)}")
    title = title or os.path.splitext(os.path.basename(csv_path))[0]
    draw = draw_heatmap if kind == "heatmap" else draw_line
    fig = draw(plt, header, cols, title)
    fig.savefig(png_path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return png_path


# -- script emission ---------------------------------------------------------

_HELPERS = (read_columns, as_float, margin_crossings, gap_spans, draw_line, draw_heatmap)

_MAIN = '''

if __name__ == "__main__":
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    header, cols = read_columns(CSV_PATH)
    fig = {draw}(plt, header, cols, {title!r})
    fig.savefig(PNG_PATH, dpi=150)
    print("wrote", PNG_PATH)
'''


def emit_plot_script(csv_path, kind="line", script_path=None):
    """Write a standalone matplotlib script for the CSV and return its path.

    The script is only written, never run.
    """
    if kind not in ("line", "heatmap"):
        raise ValueError("kind must be line or heatmap")
    if not os.path.exists(csv_path):
        raise FileNotFoundError(csv_path)
    header, _ = read_columns(csv_path)
    missing = required_columns(kind, header)
    if missing:
        raise MissingColumns(f"{csv_path}: missing columns {', '.join(missing)}")
    stem = os.path.splitext(os.path.abspath(csv_path))[0]
    script_path = script_path or f"{stem}_{kind}.py"
    csv_abs = os.path.abspath(csv_path)
    if os.path.dirname(os.path.abspath(script_path)) == os.path.dirname(csv_abs):
        where = ("os.path.join(os.path.dirname(os.path.abspath(__file__)), "
                 f"{os.path.basename(csv_abs)!r})")
    else:
        where = repr(csv_abs)
    parts = ['"""Plot generated by orbitron; run with python3."""',
             "", "import csv", "import math", "import os", "",
             f"CSV_PATH = {where}",
             f"PNG_PATH = os.path.splitext(CSV_PATH)[0] + '_{kind}.png'", ""]
    for fn in _HELPERS:
        parts.append("")
        parts.append(inspect.getsource(fn).rstrip())
        parts.append("")
    draw = "draw_heatmap" if kind == "heatmap" else "draw_line"
    parts.append(_MAIN.format(draw=draw, title=os.path.basename(stem)))
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
    return script_path
