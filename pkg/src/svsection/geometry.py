"""Cross-section shape definitions, normalization and exact geometric properties.

All shapes live in a single consistent length unit; materials are isotropic.
A section is *normalized* when its area centroid sits at the origin and its
axes are principal (product of inertia zero). Every downstream solver assumes
a normalized section.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "Material",
    "Circle",
    "Annulus",
    "Rectangle",
    "Ellipse",
    "Polygon",
    "SectionSpec",
    "SectionProps",
    "RigidTransform",
    "normalize_section",
    "analytic_props",
    "polygon_props",
    "section_from_json",
    "load_section",
]


@dataclass(frozen=True)
class Material:
    """Isotropic elastic constants: shear modulus G and Poisson ratio nu.

    The Young modulus is derived, E = 2 G (1 + nu).
    """

    G: float
    nu: float

    def __post_init__(self) -> None:
        if not (self.G > 0):
            raise ValueError(f"shear modulus must be positive, got G={self.G}")
        if not (-1.0 < self.nu < 0.5):
            raise ValueError(f"Poisson ratio must lie in (-1, 0.5), got nu={self.nu}")

    @property
    def E(self) -> float:
        return 2.0 * self.G * (1.0 + self.nu)

    @classmethod
    def from_young(cls, E: float, nu: float) -> Material:
        if not (E > 0):
            raise ValueError(f"Young modulus must be positive, got E={E}")
        return cls(G=E / (2.0 * (1.0 + nu)), nu=nu)


@dataclass(frozen=True)
class Circle:
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0):
            raise ValueError(f"circle radius must be positive, got {self.radius}")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


@dataclass(frozen=True)
class Annulus:
    outer: float
    inner: float

    def __post_init__(self) -> None:
        if not (self.inner > 0 and self.outer > 0):
            raise ValueError("annulus radii must be positive")
        if not (self.inner < self.outer):
            raise ValueError(
                f"annulus needs inner < outer, got inner={self.inner}, outer={self.outer}"
            )

    @property
    def diameter(self) -> float:
        return 2.0 * self.outer


@dataclass(frozen=True)
class Rectangle:
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("rectangle sides must be positive")

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError("ellipse semi-axes must be positive")

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.a, self.b)


class Polygon:
    """Simple polygon with optional holes.

    The outer loop must be counterclockwise, hole loops clockwise; loops must
    be simple, holes strictly inside the outer loop and pairwise disjoint.
    Vertex arrays are (n, 2) float and are copied on construction.
    """

    def __init__(self, outer, holes=()):
        self.outer = _as_loop(outer, "outer loop")
        self.holes = tuple(_as_loop(h, f"hole {k}") for k, h in enumerate(holes))
        self._validate()

    def _validate(self) -> None:
        loops = [self.outer, *self.holes]
        if _signed_area(self.outer) <= 0:
            raise ValueError("polygon loop 0 (outer) must be counterclockwise")
        for k, hole in enumerate(self.holes):
            if _signed_area(hole) >= 0:
                raise ValueError(f"polygon loop {k + 1} (hole {k}) must be clockwise")
        for k, loop in enumerate(loops):
            if not _is_simple(loop):
                raise ValueError(f"polygon loop {k} is self-intersecting")
        for k, hole in enumerate(self.holes):
            if not all(_point_in_loop(p, self.outer) for p in hole):
                raise ValueError(f"polygon loop {k + 1} (hole {k}) is not inside the outer loop")
            if _loops_intersect(hole, self.outer):
                raise ValueError(f"polygon loop {k + 1} (hole {k}) touches the outer loop")
        for i in range(len(self.holes)):
            for j in range(i + 1, len(self.holes)):
                hi, hj = self.holes[i], self.holes[j]
                if (
                    _loops_intersect(hi, hj)
                    or _point_in_loop(hj[0], hi)
                    or _point_in_loop(hi[0], hj)
                ):
                    raise ValueError(f"polygon holes {i} and {j} are not disjoint")

    @property
    def diameter(self) -> float:
        lo = self.outer.min(axis=0)
        hi = self.outer.max(axis=0)
        return float(math.hypot(*(hi - lo)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return np.array_equal(self.outer, other.outer) and len(self.holes) == len(
            other.holes
        ) and all(np.array_equal(a, b) for a, b in zip(self.holes, other.holes))


Shape = Circle | Annulus | Rectangle | Ellipse | Polygon


@dataclass(frozen=True)
class RigidTransform:
    """Translation followed by rotation applied during normalization."""

    dx: float = 0.0
    dy: float = 0.0
    angle: float = 0.0


@dataclass(frozen=True)
class SectionSpec:
    """A named cross-section shape plus its material: one problem instance."""

    name: str
    shape: Shape
    material: Material
    transform: RigidTransform | None = field(default=None, compare=False)

    @property
    def normalized(self) -> bool:
        return self.transform is not None

    @property
    def diameter(self) -> float:
        return self.shape.diameter


@dataclass(frozen=True)
class SectionProps:
    """Area, centroid and second moments about the centroid.

    I1 = int x2^2 dA, I2 = int x1^2 dA, I12 = int x1 x2 dA, Jo = I1 + I2.
    """

    A: float
    centroid: tuple[float, float]
    I1: float
    I2: float
    I12: float

    @property
    def Jo(self) -> float:
        return self.I1 + self.I2


# ---------------------------------------------------------------------------
# loop helpers


def _as_loop(vertices, what: str) -> np.ndarray:
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError(f"{what} must be an (n>=3, 2) vertex array")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite coordinates")
    if np.allclose(arr[0], arr[-1]):
        arr = arr[:-1]
    if arr.shape[0] < 3:
        raise ValueError(f"{what} must have at least 3 distinct vertices")
    out = arr.copy()
    out.setflags(write=False)
    return out


def _signed_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * y2 - x2 * y))


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return False


def _is_simple(loop: np.ndarray) -> bool:
    n = len(loop)
    for i in range(n):
        a1, a2 = loop[i], loop[(i + 1) % n]
        if np.allclose(a1, a2):
            return False
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = loop[j], loop[(j + 1) % n]
            if _segments_properly_intersect(a1, a2, b1, b2):
                return False
    return True


def _loops_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    na, nb = len(a), len(b)
    for i in range(na):
        for j in range(nb):
            if _segments_properly_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]):
                return True
    return False


def _point_in_loop(p, loop: np.ndarray) -> bool:
    # ray casting toward +x
    x, y = p
    inside = False
    n = len(loop)
    for i in range(n):
        x1, y1 = loop[i]
        x2, y2 = loop[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return inside


# ---------------------------------------------------------------------------
# properties


def polygon_props(outer: np.ndarray, holes=()) -> SectionProps:
    """Exact area/centroid/second moments of a polygon via Green's theorem.

    Moments are reported about the centroid. Holes must be clockwise so their
    signed contributions subtract.
    """

    def ring(loop):
        x, y = loop[:, 0], loop[:, 1]
        x2, y2 = np.roll(x, -1), np.roll(y, -1)
        c = x * y2 - x2 * y
        A = 0.5 * np.sum(c)
        sx = np.sum((x + x2) * c) / 6.0
        sy = np.sum((y + y2) * c) / 6.0
        ixx = np.sum((y * y + y * y2 + y2 * y2) * c) / 12.0
        iyy = np.sum((x * x + x * x2 + x2 * x2) * c) / 12.0
        ixy = np.sum((x * y2 + 2 * x * y + 2 * x2 * y2 + x2 * y) * c) / 24.0
        return A, sx, sy, ixx, iyy, ixy

    A, sx, sy, ixx, iyy, ixy = ring(outer)
    for hole in holes:
        dA, dsx, dsy, dixx, diyy, dixy = ring(hole)
        A += dA
        sx += dsx
        sy += dsy
        ixx += dixx
        iyy += diyy
        ixy += dixy
    if A <= 0:
        raise ValueError("polygon has non-positive area")
    cx, cy = sx / A, sy / A
    return SectionProps(
        A=float(A),
        centroid=(float(cx), float(cy)),
        I1=float(ixx - A * cy * cy),
        I2=float(iyy - A * cx * cx),
        I12=float(ixy - A * cx * cy),
    )


def analytic_props(spec: SectionSpec) -> SectionProps:
    """Closed-form section properties of a normalized spec.

    Primitives use textbook formulas; polygons use the exact Green's-theorem
    edge sums.
    """
    if not spec.normalized:
        raise ValueError("section must be normalized first (normalize_section)")
    s = spec.shape
    if isinstance(s, Circle):
        R = s.radius
        I = math.pi * R**4 / 4.0
        return SectionProps(A=math.pi * R**2, centroid=(0.0, 0.0), I1=I, I2=I, I12=0.0)
    if isinstance(s, Annulus):
        Ro, Ri = s.outer, s.inner
        I = math.pi * (Ro**4 - Ri**4) / 4.0
        return SectionProps(
            A=math.pi * (Ro**2 - Ri**2), centroid=(0.0, 0.0), I1=I, I2=I, I12=0.0
        )
    if isinstance(s, Rectangle):
        b, h = s.width, s.height
        return SectionProps(
            A=b * h,
            centroid=(0.0, 0.0),
            I1=b * h**3 / 12.0,
            I2=h * b**3 / 12.0,
            I12=0.0,
        )
    if isinstance(s, Ellipse):
        a, b = s.a, s.b
        return SectionProps(
            A=math.pi * a * b,
            centroid=(0.0, 0.0),
            I1=math.pi * a * b**3 / 4.0,
            I2=math.pi * a**3 * b / 4.0,
            I12=0.0,
        )
    if isinstance(s, Polygon):
        return polygon_props(s.outer, s.holes)
    raise TypeError(f"unknown shape {type(s).__name__}")


# ---------------------------------------------------------------------------
# normalization


def _principal_angle(I1: float, I2: float, I12: float) -> float:
    """Rotation angle (applied to the vertices) that zeroes the product of
    inertia, chosen so the rotated section has I1 <= I2 with the smallest
    magnitude of rotation (ties broken toward the negative angle)."""
    scale = abs(I1) + abs(I2) + abs(I12)
    if scale == 0 or abs(I12) <= 1e-14 * scale:
        if I1 <= I2:
            return 0.0
        return -0.5 * math.pi  # either quarter turn works; pick the negative one
    # inertia tensor M = [[I2, I12], [I12, I1]] in terms of int x_a x_b
    M = np.array([[I2, I12], [I12, I1]])
    w, V = np.linalg.eigh(M)  # ascending eigenvalues
    v_max = V[:, 1]  # direction that must become the x1-axis
    base = math.atan2(-v_max[1], v_max[0])
    candidates = [base + k * math.pi for k in (-1, 0, 1)]
    candidates.sort(key=lambda a: (abs(a), a))
    return candidates[0]


def _rotate(loop: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return loop @ R.T


def normalize_section(spec: SectionSpec) -> SectionSpec:
    """Translate the section so its centroid is at the origin and rotate it
    onto principal axes (I12 = 0).

    Primitives are centered and principal by construction and pass through
    with a zero transform recorded. Polygons are shifted and rotated; the
    applied transform is recorded on the result.
    """
    s = spec.shape
    if not isinstance(s, Polygon):
        return replace(spec, transform=RigidTransform())
    props = polygon_props(s.outer, s.holes)
    cx, cy = props.centroid
    angle = _principal_angle(props.I1, props.I2, props.I12)
    shift = np.array([cx, cy])
    outer = _rotate(s.outer - shift, angle)
    holes = [_rotate(h - shift, angle) for h in s.holes]
    return replace(
        spec,
        shape=Polygon(outer, holes),
        transform=RigidTransform(dx=-cx, dy=-cy, angle=angle),
    )


# ---------------------------------------------------------------------------
# JSON section files


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise ValueError(f"missing keys {sorted(missing)} in {where}")


def _shape_from_dict(d: dict) -> Shape:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError('shape must be an object with a "kind" key')
    kind = d["kind"]
    if kind == "circle":
        _require_keys(d, {"kind", "radius"}, {"radius"}, "circle shape")
        return Circle(radius=float(d["radius"]))
    if kind == "annulus":
        _require_keys(d, {"kind", "outer", "inner"}, {"outer", "inner"}, "annulus shape")
        return Annulus(outer=float(d["outer"]), inner=float(d["inner"]))
    if kind == "rectangle":
        _require_keys(d, {"kind", "width", "height"}, {"width", "height"}, "rectangle shape")
        return Rectangle(width=float(d["width"]), height=float(d["height"]))
    if kind == "ellipse":
        _require_keys(d, {"kind", "a", "b"}, {"a", "b"}, "ellipse shape")
        return Ellipse(a=float(d["a"]), b=float(d["b"]))
    if kind == "polygon":
        _require_keys(d, {"kind", "outer", "holes"}, {"outer"}, "polygon shape")
        return Polygon(d["outer"], d.get("holes", ()))
    raise ValueError(f"unknown shape kind {kind!r}")


def _material_from_dict(d: dict) -> Material:
    if not isinstance(d, dict):
        raise ValueError("material must be an object")
    if "G" in d:
        _require_keys(d, {"G", "nu"}, {"G", "nu"}, "material")
        return Material(G=float(d["G"]), nu=float(d["nu"]))
    if "E" in d:
        _require_keys(d, {"E", "nu"}, {"E", "nu"}, "material")
        return Material.from_young(E=float(d["E"]), nu=float(d["nu"]))
    raise ValueError('material needs either "G" or "E" plus "nu"')


def section_from_json(text: str) -> SectionSpec:
    """Parse a section definition from JSON text. Unknown keys are rejected."""
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError("section file must contain a JSON object")
    _require_keys(obj, {"name", "shape", "material"}, {"name", "shape", "material"}, "section")
    if not isinstance(obj["name"], str):
        raise ValueError("section name must be a string")
    return SectionSpec(
        name=obj["name"],
        shape=_shape_from_dict(obj["shape"]),
        material=_material_from_dict(obj["material"]),
    )


def load_section(path) -> SectionSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return section_from_json(fh.read())
