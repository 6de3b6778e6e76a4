"""Cross-section stiffness identification from Saint-Venant stress fields.

Meshes a cross section, solves the torsion and flexure problems in stress
variables, evaluates the shear / torsion / extension / bending factors and the
matching stiffness moduli, and validates the factor lower bounds both on the
solved fields and on randomized admissible fields.
"""
from .fields import AxialStressField, TangentialStressField
from .factors import (
    FactorReport,
    Resultants,
    compute_factor,
    identify_stiffness,
    resultants,
    tangential_energy,
)
from .flexure import FlexureSolution, boundary_potential, solve_flexure
from .geometry import (
    Annulus,
    Circle,
    Ellipse,
    Material,
    Polygon,
    Rectangle,
    SectionProps,
    SectionSpec,
    analytic_props,
    load_section,
    normalize_section,
    section_from_json,
)
from .mesh import TriMesh, mesh_props, refine, triangulate, validate_mesh
from .oracles import OracleEntry, oracle_lookup
from .torsion import TorsionSolution, equality_deviation, solve_torsion

__version__ = "0.1.0"

__all__ = [
    "AxialStressField",
    "TangentialStressField",
    "FactorReport",
    "Resultants",
    "compute_factor",
    "identify_stiffness",
    "resultants",
    "tangential_energy",
    "FlexureSolution",
    "boundary_potential",
    "solve_flexure",
    "Annulus",
    "Circle",
    "Ellipse",
    "Material",
    "Polygon",
    "Rectangle",
    "SectionProps",
    "SectionSpec",
    "analytic_props",
    "load_section",
    "normalize_section",
    "section_from_json",
    "TriMesh",
    "mesh_props",
    "refine",
    "triangulate",
    "validate_mesh",
    "OracleEntry",
    "oracle_lookup",
    "TorsionSolution",
    "equality_deviation",
    "solve_torsion",
    "__version__",
]
