"""Forcing (driving speed) families: constant, radial, or gridded samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Forcing:
    """Scalar driving field c(x) >= 0 on the domain.

    kind = "constant": c(x) = value
    kind = "radial":   c(x) = value * |x|
    kind = "grid":     per-node samples aligned with a specific grid shape
    """

    kind: str
    value: float = 0.0
    samples: np.ndarray | None = None

    @staticmethod
    def constant(value: float) -> "Forcing":
        return Forcing("constant", float(value))

    @staticmethod
    def radial(coef: float) -> "Forcing":
        return Forcing("radial", float(coef))

    @staticmethod
    def from_samples(samples: np.ndarray) -> "Forcing":
        return Forcing("grid", 0.0, np.asarray(samples, dtype=float))

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.kind == "constant":
            return np.full(pts.shape[:-1], self.value)
        if self.kind == "radial":
            return self.value * np.hypot(pts[..., 0], pts[..., 1])
        raise ValueError("gridded forcing has no off-node evaluation; use node_values")

    def node_values(self, grid) -> np.ndarray:
        if self.kind == "grid":
            if self.samples.shape != (grid.nx, grid.ny):
                raise ValueError(
                    f"forcing samples shaped {self.samples.shape} do not match grid "
                    f"({grid.nx}, {grid.ny})")
            return self.samples.astype(float)
        xs, ys = grid.node_mesh()
        if self.kind == "constant":
            return np.full((grid.nx, grid.ny), self.value)
        return self.value * np.hypot(xs, ys)

    def grad_sup(self, grid=None) -> float:
        """sup |Dc|: analytic for the built-in families, finite differences for samples."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "radial":
            return abs(self.value)
        if grid is None:
            raise ValueError("gridded forcing needs a grid to estimate sup|Dc|")
        gx, gy = np.gradient(self.samples, grid.h)
        interior = grid.classification == 1
        return float(np.hypot(gx, gy)[interior].max())

    def to_json(self) -> dict:
        if self.kind == "grid":
            return {"kind": "grid", "samples": self.samples.tolist()}
        return {"kind": self.kind, "value": self.value}

    @staticmethod
    def from_json(data: dict) -> "Forcing":
        kind = data["kind"]
        if kind == "grid":
            return Forcing.from_samples(np.asarray(data["samples"], dtype=float))
        if kind not in ("constant", "radial"):
            raise ValueError(f"unknown forcing kind {kind!r}")
        return Forcing(kind, float(data["value"]))
