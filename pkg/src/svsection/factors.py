"""Energy integrals, load resultants, the four section factors and the
identified stiffness moduli.

The factors compare the cross-sectional stored energy against the energy a rod
carrying the same resultant would store:

    chi_s = A  * int(S31^2 + S32^2) / T^2      shear      (dimensionless >= 1)
    chi_t = Jo * int(S31^2 + S32^2) / Mt^2     torsion    (>= 1, = 1 only for
                                               circle / circular annulus)
    chi_e = A  * int(S33^2) / N^2              extension  (= 1 iff S33 const)
    chi_b = J  * int(S33^2) / M^2              bending    (= 1 iff S33 ~ x2)

and the stiffness moduli follow as G A / chi_s, G Jo / chi_t, E A / chi_e,
E J / chi_b. All quadratures are exact for the piecewise-polynomial fields the
solvers and the fuzzer produce, so the lower bounds hold to rounding error
when the section properties come from the same mesh.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import AxialStressField, TangentialStressField
from .geometry import Material, SectionProps
from .mesh import edge_midpoints

__all__ = [
    "Resultants",
    "FactorValue",
    "FactorReport",
    "tangential_energy",
    "axial_energy",
    "resultants",
    "compute_factor",
    "identify_stiffness",
    "RESULTANT_CUTOFF",
]

RESULTANT_CUTOFF = 1e-8
ROUTE_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class Resultants:
    """Force and moment resultants, by the defining quadratures only.

    Tangential fields fill T1, T2, Mt; axial fields fill N, M (bending moment
    about the x1 axis) and M2 (mirrored variant about the x2 axis).
    """

    T1: float | None = None
    T2: float | None = None
    Mt: float | None = None
    N: float | None = None
    M: float | None = None
    M2: float | None = None


def tangential_energy(field: TangentialStressField) -> float:
    """int (S31^2 + S32^2) dA, exact for the piecewise-constant field. The
    1/2G factor enters only at stiffness identification."""
    return float(np.sum(field.mesh.areas * (field.values**2).sum(axis=1)))


def axial_energy(field: AxialStressField) -> float:
    """int S33^2 dA, exact for the piecewise-linear nodal field."""
    mesh = field.mesh
    vm = 0.5 * (
        field.values[mesh.triangles] + np.roll(field.values[mesh.triangles], -1, axis=1)
    )
    return float(np.sum(mesh.areas / 3.0 * (vm**2).sum(axis=1)))


def resultants(field: TangentialStressField | AxialStressField) -> Resultants:
    """Load resultants of a stress field by exact quadrature."""
    mesh = field.mesh
    if isinstance(field, TangentialStressField):
        w = mesh.areas
        c = mesh.centroids
        T1 = float(np.sum(w * field.values[:, 0]))
        T2 = float(np.sum(w * field.values[:, 1]))
        Mt = float(
            np.sum(w * (c[:, 0] * field.values[:, 1] - c[:, 1] * field.values[:, 0]))
        )
        return Resultants(T1=T1, T2=T2, Mt=Mt)
    if isinstance(field, AxialStressField):
        tri_vals = field.values[mesh.triangles]
        vm = 0.5 * (tri_vals + np.roll(tri_vals, -1, axis=1))
        mids = edge_midpoints(mesh)
        w = mesh.areas / 3.0
        N = float(np.sum(w * vm.sum(axis=1)))
        M = float(np.sum(w * (mids[:, :, 1] * vm).sum(axis=1)))
        M2 = float(np.sum(w * (mids[:, :, 0] * vm).sum(axis=1)))
        return Resultants(N=N, M=M, M2=M2)
    raise TypeError(f"unknown field type {type(field).__name__}")


def _check_resultant(value: float, scale: float, kind: str) -> None:
    if abs(value) <= RESULTANT_CUTOFF * scale:
        raise ValueError(
            f"ill-posed {kind} factor: resultant {value:.3e} is below "
            f"{RESULTANT_CUTOFF:g} of its energy scale {scale:.3e}; the field "
            f"carries no load of this kind"
        )


def compute_factor(
    kind: str,
    field: TangentialStressField | AxialStressField,
    props: SectionProps,
    bending_axis: int = 1,
) -> float:
    """One of the four dimensionless factors for a stress field.

    `props` should come from the same mesh as the field (mesh_props) so the
    energy and the geometric moments share one discrete measure; the lower
    bounds then hold to rounding error.
    """
    if kind == "shear":
        if not isinstance(field, TangentialStressField):
            raise TypeError("shear factor needs a tangential field")
        E = tangential_energy(field)
        r = resultants(field)
        T2sq = r.T1**2 + r.T2**2
        _check_resultant(math.sqrt(T2sq), math.sqrt(props.A * E), "shear")
        return props.A * E / T2sq
    if kind == "torsion":
        if not isinstance(field, TangentialStressField):
            raise TypeError("torsion factor needs a tangential field")
        E = tangential_energy(field)
        r = resultants(field)
        _check_resultant(r.Mt, math.sqrt(props.Jo * E), "torsion")
        return props.Jo * E / r.Mt**2
    if kind == "extension":
        if not isinstance(field, AxialStressField):
            raise TypeError("extension factor needs an axial field")
        E = axial_energy(field)
        r = resultants(field)
        _check_resultant(r.N, math.sqrt(props.A * E), "extension")
        return props.A * E / r.N**2
    if kind == "bending":
        if not isinstance(field, AxialStressField):
            raise TypeError("bending factor needs an axial field")
        if bending_axis not in (1, 2):
            raise ValueError("bending_axis must be 1 (moment of x2*S33) or 2")
        E = axial_energy(field)
        r = resultants(field)
        J = props.I1 if bending_axis == 1 else props.I2
        M = r.M if bending_axis == 1 else r.M2
        _check_resultant(M, math.sqrt(J * E), "bending")
        return J * E / M**2
    raise ValueError(f"unknown factor kind {kind!r}")


@dataclass(frozen=True)
class FactorValue:
    """A computed factor together with the raw quadratures behind it, so the
    stiffness identification can be cross-checked through both routes."""

    kind: str  # shear | torsion | extension | bending
    chi: float
    energy: float  # int |s|^2 or int S33^2
    resultant_sq: float  # T^2, Mt^2, N^2 or M^2
    direction: str | None = None
    nu: float | None = None


@dataclass
class FactorReport:
    """Identified factors and stiffness moduli with provenance metadata."""

    props: SectionProps
    material: Material
    chi_t: float | None = None
    stiff_t: float | None = None
    Jt: float | None = None
    shear: list[dict] | None = None  # {direction, nu, chi_s, stiff_s}
    chi_e: float | None = None
    stiff_e: float | None = None
    chi_b: float | None = None
    stiff_b: float | None = None
    provenance: dict | None = None


def _two_route(modulus: float, geom: float, chi: float, energy: float, res_sq: float, kind: str) -> float:
    """Stiffness by the factor route, cross-checked against the energy route."""
    via_factor = modulus * geom / chi
    via_energy = modulus * res_sq / energy
    if abs(via_factor - via_energy) > ROUTE_CHECK_TOL * max(abs(via_factor), 1e-300):
        raise AssertionError(
            f"{kind} stiffness routes disagree: {via_factor!r} vs {via_energy!r}"
        )
    return via_factor


def identify_stiffness(
    material: Material, props: SectionProps, factors: list[FactorValue], provenance: dict | None = None
) -> FactorReport:
    """Turn computed factors into the stiffness moduli.

    Each modulus is evaluated through both defining routes (energy ratio and
    geometric-modulus-over-factor) and the two must agree to 1e-12 relative;
    they are the same algebraic quantity.
    """
    report = FactorReport(props=props, material=material, shear=[], provenance=provenance)
    G, E = material.G, material.E
    for fv in factors:
        if fv.kind == "torsion":
            report.chi_t = fv.chi
            report.stiff_t = _two_route(G, props.Jo, fv.chi, fv.energy, fv.resultant_sq, "torsion")
        elif fv.kind == "shear":
            stiff = _two_route(G, props.A, fv.chi, fv.energy, fv.resultant_sq, "shear")
            report.shear.append(
                {"direction": fv.direction, "nu": fv.nu, "chi_s": fv.chi, "stiff_s": stiff}
            )
        elif fv.kind == "extension":
            report.chi_e = fv.chi
            report.stiff_e = _two_route(E, props.A, fv.chi, fv.energy, fv.resultant_sq, "extension")
        elif fv.kind == "bending":
            report.chi_b = fv.chi
            report.stiff_b = _two_route(E, props.I1, fv.chi, fv.energy, fv.resultant_sq, "bending")
        else:
            raise ValueError(f"unknown factor kind {fv.kind!r}")
    return report


def factor_value(
    kind: str,
    field: TangentialStressField | AxialStressField,
    props: SectionProps,
    direction: str | None = None,
    nu: float | None = None,
) -> FactorValue:
    """compute_factor plus the raw quadratures, packaged for identification."""
    chi = compute_factor(kind, field, props)
    if kind in ("shear", "torsion"):
        energy = tangential_energy(field)
        r = resultants(field)
        res_sq = (r.T1**2 + r.T2**2) if kind == "shear" else r.Mt**2
    else:
        energy = axial_energy(field)
        r = resultants(field)
        res_sq = r.N**2 if kind == "extension" else r.M**2
    return FactorValue(
        kind=kind, chi=chi, energy=energy, resultant_sq=res_sq, direction=direction, nu=nu
    )
