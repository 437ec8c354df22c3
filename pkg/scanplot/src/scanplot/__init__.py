"""Render classical-bound scan CSV files as heatmaps.

The input is the CSV written by ``hwsteer scan``: a header line

    phi00,phi10,classical_bound,argmax_a,argmax_b,family

followed by one row per grid cell, row-major in (phi00, phi10).  The
renderer is a read-only consumer — color limits and the quoted range come
straight from the file, nothing is recomputed — and any structural problem
(bad header, wrong field count, unparsable number, duplicate or missing
cells, mixed families) is reported with the offending line number.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["CsvFormatError", "ScanData", "load_scan", "build_figure", "render"]
__version__ = "0.1.0"

EXPECTED_HEADER = ["phi00", "phi10", "classical_bound", "argmax_a",
                   "argmax_b", "family"]


class CsvFormatError(Exception):
    """Malformed scan CSV; ``line`` is the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class ScanData:
    """A parsed scan grid: sorted axes, values[i, j] at (phi00[i], phi10[j])."""

    phi00: np.ndarray
    phi10: np.ndarray
    values: np.ndarray
    family: str

    @property
    def vmin(self) -> float:
        return float(self.values.min())

    @property
    def vmax(self) -> float:
        return float(self.values.max())


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(line, f"unparsable {column} value {text!r}") from None


def load_scan(csv_path) -> ScanData:
    """Parse a scan CSV into a complete rectangular grid."""
    entries = []
    family = None
    line = 1
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EXPECTED_HEADER:
            raise CsvFormatError(1, f"expected header {','.join(EXPECTED_HEADER)}")
        for line, row in enumerate(reader, start=2):
            if len(row) != 6:
                raise CsvFormatError(line, f"expected 6 fields, got {len(row)}")
            p00 = _parse_float(row[0], line, "phi00")
            p10 = _parse_float(row[1], line, "phi10")
            val = _parse_float(row[2], line, "classical_bound")
            if family is None:
                family = row[5]
            elif row[5] != family:
                raise CsvFormatError(line, f"family changed from {family!r} "
                                           f"to {row[5]!r}")
            entries.append((p00, p10, val, line))
    if not entries:
        raise CsvFormatError(2, "no data rows")

    phi00 = np.unique([e[0] for e in entries])
    phi10 = np.unique([e[1] for e in entries])
    i_of = {v: i for i, v in enumerate(phi00)}
    j_of = {v: j for j, v in enumerate(phi10)}
    values = np.full((len(phi00), len(phi10)), np.nan)
    for p00, p10, val, row_line in entries:
        i, j = i_of[p00], j_of[p10]
        if not np.isnan(values[i, j]):
            raise CsvFormatError(row_line, f"duplicate cell at phi00={p00:.6g}, "
                                           f"phi10={p10:.6g}")
        values[i, j] = val
    if np.isnan(values).any():
        raise CsvFormatError(line, f"incomplete grid: {len(entries)} rows "
                                   f"cannot fill {len(phi00)}x{len(phi10)} cells")
    return ScanData(phi00, phi10, values, family)


def _edges(axis: np.ndarray) -> np.ndarray:
    """Cell edges bracketing each axis point (half-cell pad on the outside)."""
    if axis.size == 1:
        return np.array([axis[0] - 0.25, axis[0] + 0.25])
    mids = (axis[1:] + axis[:-1]) / 2
    first = 2 * axis[0] - mids[0]
    last = 2 * axis[-1] - mids[-1]
    return np.concatenate([[first], mids, [last]])


def _wrap_into(value: float, lo: float, hi: float) -> float:
    """Shift value by multiples of 2*pi into [lo, hi] if that is possible."""
    if lo <= value <= hi:
        return value
    shifted = value - 2 * np.pi * np.floor((value - lo) / (2 * np.pi))
    return shifted if shifted <= hi else value


def build_figure(data: ScanData, marker=None):
    """Heatmap figure for a parsed grid; returns (fig, ax, mesh, colorbar).

    Axes are in radians, phi00 horizontal.  Color limits span exactly the
    observed [min, max] of the file.  ``marker`` is an optional
    (phi00, phi10) pair drawn as a black dot; coordinates outside the
    plotted window are brought in mod 2*pi when they fit.
    """
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(_edges(data.phi00), _edges(data.phi10), data.values.T,
                         cmap="viridis", vmin=data.vmin, vmax=data.vmax)
    cbar = fig.colorbar(mesh, ax=ax, label="classical bound")
    ax.set_xlabel(r"$\varphi_{0,0}$ (rad)")
    ax.set_ylabel(r"$\varphi_{1,0}$ (rad)")
    ax.set_title(f"classical bound, family {data.family}")
    if marker is not None:
        mx = _wrap_into(float(marker[0]), data.phi00[0], data.phi00[-1])
        my = _wrap_into(float(marker[1]), data.phi10[0], data.phi10[-1])
        ax.plot([mx], [my], marker="o", color="black", markersize=7,
                markeredgecolor="white", markeredgewidth=1.0, linestyle="none")
    return fig, ax, mesh, cbar


def render(csv_path, out_path, marker=None, dpi: int = 150):
    """Render a scan CSV to an image file (format chosen by extension)."""
    data = load_scan(csv_path)
    fig, _, _, _ = build_figure(data, marker)
    try:
        fig.savefig(out_path, dpi=dpi, bbox_inches="tight")
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)
    return data
