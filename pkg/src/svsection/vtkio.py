"""VTK legacy ASCII export (DATASET UNSTRUCTURED_GRID, triangle cells)."""
from __future__ import annotations

import numpy as np

from .mesh import TriMesh

__all__ = ["write_vtk"]

VTK_TRIANGLE = 5


def write_vtk(mesh: TriMesh, path, point_data=None, cell_data=None, title="svsection fields"):
    """Write a mesh with optional scalar point data and scalar/2-vector cell
    data. 2-vector arrays are padded with a zero third component."""
    point_data = point_data or {}
    cell_data = cell_data or {}
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("# vtk DataFile Version 2.0\n")
        fh.write(f"{title}\n")
        fh.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {mesh.n_nodes} double\n")
        for x, y in mesh.nodes:
            fh.write(f"{x:.17g} {y:.17g} 0\n")
        m = mesh.n_elements
        fh.write(f"CELLS {m} {4 * m}\n")
        for a, b, c in mesh.triangles:
            fh.write(f"3 {a} {b} {c}\n")
        fh.write(f"CELL_TYPES {m}\n")
        for _ in range(m):
            fh.write(f"{VTK_TRIANGLE}\n")

        if point_data:
            fh.write(f"POINT_DATA {mesh.n_nodes}\n")
            for name, values in point_data.items():
                values = np.asarray(values, dtype=float)
                if values.shape != (mesh.n_nodes,):
                    raise ValueError(f"point data {name!r} must have one value per node")
                fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                for v in values:
                    fh.write(f"{v:.17g}\n")
        if cell_data:
            fh.write(f"CELL_DATA {m}\n")
            for name, values in cell_data.items():
                values = np.asarray(values, dtype=float)
                if values.shape == (m,):
                    fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                    for v in values:
                        fh.write(f"{v:.17g}\n")
                elif values.shape == (m, 2):
                    fh.write(f"VECTORS {name} double\n")
                    for vx, vy in values:
                        fh.write(f"{vx:.17g} {vy:.17g} 0\n")
                else:
                    raise ValueError(
                        f"cell data {name!r} must be (m,) scalars or (m, 2) vectors"
                    )
