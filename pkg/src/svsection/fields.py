"""Stress-field value types shared by the solvers, factor engine and fuzzer."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import TriMesh

__all__ = ["TangentialStressField", "AxialStressField"]


@dataclass
class TangentialStressField:
    """Piecewise-constant cross-sectional traction: one (S31, S32) pair per
    element. The carrier of the sealed-mantle admissibility contract."""

    mesh: TriMesh
    values: np.ndarray  # (n_elements, 2)
    origin: str = "unknown"  # torsion | flexure | fuzz | synthetic
    normalization: str = ""
    direction: str | None = None  # e1/e2 for flexure-like fields
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_elements, 2):
            raise ValueError("tangential field needs one (S31, S32) pair per element")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("tangential field contains non-finite values")

    def scaled(self, factor: float) -> TangentialStressField:
        return TangentialStressField(
            mesh=self.mesh,
            values=self.values * factor,
            origin=self.origin,
            normalization=self.normalization,
            direction=self.direction,
            meta=dict(self.meta),
        )


@dataclass
class AxialStressField:
    """Nodal axial stress S33 as a piecewise-linear field."""

    mesh: TriMesh
    values: np.ndarray  # (n_nodes,)
    origin: str = "unknown"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValueError("axial field needs one S33 value per node")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("axial field contains non-finite values")

    def scaled(self, factor: float) -> AxialStressField:
        return AxialStressField(
            mesh=self.mesh,
            values=self.values * factor,
            origin=self.origin,
            meta=dict(self.meta),
        )
