"""File writers: VTK structured-points snapshots, CSV series, JSON summaries.

Every writer formats floats through the same helper so that identical runs
produce byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .analysis import height, winding_index
from .errors import SnapshotIOFailure

DIAGNOSTICS_HEADER = "t,S,min_u,sup_grad,sup_ut,S_over_t"
SPIRALS_HEADER = "curve_id,point_index,x,y,t"


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _vtk_header(fh, title: str, grid) -> None:
    fh.write("# vtk DataFile Version 3.0\n")
    fh.write(title + "\n")
    fh.write("ASCII\n")
    fh.write("DATASET STRUCTURED_POINTS\n")
    fh.write(f"DIMENSIONS {grid.nx} {grid.ny} 1\n")
    fh.write(f"SPACING {_fmt(grid.h)} {_fmt(grid.h)} 1\n")
    fh.write(f"ORIGIN {_fmt(grid.origin[0])} {_fmt(grid.origin[1])} 0\n")
    fh.write(f"POINT_DATA {grid.nx * grid.ny}\n")


def _vtk_scalars(fh, name: str, values: np.ndarray, *, integer: bool = False) -> None:
    kind = "int" if integer else "double"
    fh.write(f"SCALARS {name} {kind} 1\n")
    fh.write("LOOKUP_TABLE default\n")
    flat = np.ravel(values, order="F")  # x varies fastest, per structured points
    if integer:
        fh.write("\n".join(str(int(v)) for v in flat))
    else:
        fh.write("\n".join(_fmt(v) for v in flat))
    fh.write("\n")


def write_fields_vtk(path: str, grid, theta, u: np.ndarray, t: float) -> None:
    """Snapshot with scalars u, u_minus_theta_mod2pi and the node mask."""
    try:
        with open(path, "w") as fh:
            _vtk_header(fh, f"spiralflow fields t={_fmt(t)}", grid)
            _vtk_scalars(fh, "u", u)
            wrapped = np.mod(u - theta.theta, 2.0 * np.pi)
            wrapped[grid.classification == 0] = 0.0
            _vtk_scalars(fh, "u_minus_theta_mod2pi", wrapped)
            _vtk_scalars(fh, "mask", grid.classification, integer=True)
    except OSError as exc:
        raise SnapshotIOFailure(f"cannot write {path}: {exc}") from exc


def write_heights_vtk(path: str, grid, theta, u: np.ndarray, t: float,
                      h0: float) -> None:
    """Winding index k and reconstructed surface height at step size h0."""
    k = winding_index(u, theta)
    z = height(u, theta, h0)
    outside = grid.classification == 0
    k = k.copy()
    z = z.copy()
    k[outside] = 0
    z[outside] = 0.0
    try:
        with open(path, "w") as fh:
            _vtk_header(fh, f"spiralflow heights t={_fmt(t)} h0={_fmt(h0)}", grid)
            _vtk_scalars(fh, "k", k, integer=True)
            _vtk_scalars(fh, "height", z)
    except OSError as exc:
        raise SnapshotIOFailure(f"cannot write {path}: {exc}") from exc


def diagnostics_csv_text(diagnostics) -> str:
    lines = [DIAGNOSTICS_HEADER]
    for row in diagnostics.rows():
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_diagnostics_csv(path: str, diagnostics) -> None:
    with open(path, "w") as fh:
        fh.write(diagnostics_csv_text(diagnostics))


def write_spirals_csv(path: str, curves) -> None:
    lines = [SPIRALS_HEADER]
    for cid, curve in enumerate(curves):
        for pid, (x, y) in enumerate(curve.points):
            lines.append(f"{cid},{pid},{_fmt(x)},{_fmt(y)},{_fmt(curve.t)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


SUMMARY_KEYS = ("scenario", "h", "epsilon", "t_end", "C0", "K0", "forcing_margin",
                "growth_bounds", "Sc_slope", "Sc_fekete", "tip_rate", "checks")


def write_summary(path: str, summary: dict) -> None:
    """Fixed-schema run summary; every key is present for every scenario."""
    ordered = {key: summary.get(key) for key in SUMMARY_KEYS}
    with open(path, "w") as fh:
        json.dump(ordered, fh, indent=2)
        fh.write("\n")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
