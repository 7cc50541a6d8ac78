"""CSV persistence and the variance-decay figure."""

import csv
import os

import numpy as np

from .study import Record, SlopeFit, SummaryRow

RAW_FIELDS = ("method", "integrand", "N", "rep", "seed", "estimate")
SUMMARY_FIELDS = ("method", "integrand", "N", "reps", "mean", "variance", "std_error")
SLOPE_FIELDS = ("method", "integrand", "slope", "intercept", "r_squared")

_SCHEMAS = {Record: RAW_FIELDS, SummaryRow: SUMMARY_FIELDS, SlopeFit: SLOPE_FIELDS}
_INT_FIELDS = {"N", "rep", "seed", "reps"}
_STR_FIELDS = {"method", "integrand"}

MARKERS = {"iid": "o", "spiral": "s", "spherical": "^", "jacobi": "D"}


def fmt(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(rows, path, kind=None):
    """Write records, summary rows or slope fits with their fixed header.

    ``kind`` selects the schema when ``rows`` is empty: one of ``"raw"``,
    ``"summary"``, ``"slopes"``.
    """
    rows = list(rows)
    if rows:
        fields = _SCHEMAS[type(rows[0])]
    else:
        fields = {"raw": RAW_FIELDS, "summary": SUMMARY_FIELDS, "slopes": SLOPE_FIELDS}[kind or "raw"]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(fields)
            for r in rows:
                w.writerow([fmt(getattr(r, k)) for k in fields])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_rows_to(stream, rows, fields=RAW_FIELDS, header=True):
    w = csv.writer(stream, lineterminator="\n")
    if header:
        w.writerow(fields)
    for r in rows:
        w.writerow([fmt(getattr(r, k)) for k in fields])


def read_csv(path):
    """Read a file written by :func:`write_csv` back into row objects."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        cls = {v: k for k, v in _SCHEMAS.items()}.get(header)
        if cls is None:
            raise ValueError(f"{path}: unrecognised header {header}")
        out = []
        for row in reader:
            vals = {}
            for k, v in zip(header, row):
                if k in _STR_FIELDS:
                    vals[k] = v
                elif k in _INT_FIELDS:
                    vals[k] = int(v)
                else:
                    vals[k] = float(v)
            out.append(cls(**vals))
        return out


def _style():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(
        {
            "svg.fonttype": "none",
            "svg.hashsalt": "spheredpp",
            "font.size": 9,
            "axes.labelsize": 10,
            "legend.fontsize": 8,
            "lines.linewidth": 1.2,
            "lines.markersize": 4,
        }
    )
    return plt


def emit_plot(summary, slopes, path, title=None):
    """Log variance against log N, one polyline per method plus its
    dashed least-squares line; written as SVG (or any format matplotlib
    infers from ``path``)."""
    summary = list(summary)
    if not summary:
        raise ValueError("empty summary")
    plt = _style()
    fits = {s.method: s for s in slopes}
    methods = list(dict.fromkeys(r.method for r in summary))
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for i, m in enumerate(methods):
        rows = sorted((r for r in summary if r.method == m), key=lambda r: r.N)
        rows = [r for r in rows if r.variance > 0]
        if not rows:
            continue
        color = f"C{i}"
        x = np.log([r.N for r in rows])
        y = np.log([r.variance for r in rows])
        label = m if m not in fits else f"{m} (slope {fits[m].slope:.2f})"
        (line,) = ax.plot(x, y, marker=MARKERS.get(m, "o"), color=color, label=label)
        line.set_gid(f"series-{m}")
        if m in fits:
            fit = fits[m]
            (fl,) = ax.plot(x, fit.intercept + fit.slope * x, ls="--", color=color, lw=0.8)
            fl.set_gid(f"fit-{m}")
    ax.set_xlabel("log N")
    ax.set_ylabel("log variance")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    try:
        fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
