from __future__ import annotations

import numpy as np
import pytest

from svsection.geometry import (
    Annulus,
    Circle,
    Ellipse,
    Material,
    Polygon,
    Rectangle,
    SectionSpec,
    normalize_section,
)
from svsection.mesh import refine, triangulate

MAT = Material(G=1.0, nu=0.3)

L_VERTICES = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


def make_spec(name: str) -> SectionSpec:
    shapes = {
        "circle": Circle(1.0),
        "annulus": Annulus(1.0, 0.5),
        "square": Rectangle(1.0, 1.0),
        "rect2": Rectangle(2.0, 1.0),
        "rect5": Rectangle(5.0, 1.0),
        "ellipse": Ellipse(2.0, 1.0),
        "L": Polygon(L_VERTICES),
    }
    return normalize_section(SectionSpec(name, shapes[name], MAT))


@pytest.fixture(scope="session")
def disk_mesh():
    """Moderate disk mesh shared across solver tests (h ~ 0.05)."""
    return refine(triangulate(make_spec("circle"), 0.1))


@pytest.fixture(scope="session")
def square_mesh():
    return triangulate(make_spec("square"), 0.05)


@pytest.fixture(scope="session")
def annulus_mesh():
    return refine(triangulate(make_spec("annulus"), 0.1))


@pytest.fixture(scope="session")
def l_mesh():
    return triangulate(make_spec("L"), 0.1)


@pytest.fixture(scope="session")
def fuzz_meshes():
    """Small meshes for fuzz campaigns: square, disk, L-polygon."""
    return [
        ("square", triangulate(make_spec("square"), 0.1)),
        ("disk", triangulate(make_spec("circle"), 0.15)),
        ("L", triangulate(make_spec("L"), 0.25)),
    ]


def observed_orders(errors: np.ndarray) -> np.ndarray:
    errors = np.asarray(errors, dtype=float)
    return np.log2(errors[:-1] / errors[1:])
