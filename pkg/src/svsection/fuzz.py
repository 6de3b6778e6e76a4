"""Randomized admissible stress fields and bound checking.

Samples satisfy only the admissibility assumptions (statical admissibility
and sealed mantle, discretely exact by construction), so every inequality the
factor definitions obey must hold on every sample:

  torsion-like   Mt^2 <= Jo * int|s|^2          and  chi_t >= 1
  shear-like     A int|s|^2 >= A int S32^2 >= (int S32)^2   and  chi_s > 1
  axial          chi_e >= 1,  chi_b >= 1

Randomness comes from SplitMix64, a fixed, named, dependency-free 64-bit
generator (output mix of Steele-Lea-Flood; the k-th draw for seed s mixes
s + (k+1) * 0x9E3779B97F4A7C15 mod 2^64), so corpora are bit-reproducible
across platforms and implementations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import factors
from .fem import gradient_field
from .fields import AxialStressField, TangentialStressField
from .flexure import particular_field, boundary_potential, solve_flexure
from .geometry import SectionProps
from .mesh import TriMesh, integrate_nodal, mesh_props

__all__ = [
    "splitmix64",
    "uniform_symmetric",
    "BoundCheck",
    "FuzzSample",
    "random_torsion_like",
    "random_shear_like",
    "random_axial",
    "check_bounds",
    "run_campaign",
    "write_corpus_csv",
    "EPS_EXACT",
    "EPS_FUZZ",
    "EPS_SOLVED",
    "RESEED_OFFSET",
]

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)

# tolerance tiers: exact discrete identities; discretely-exact fuzz bounds;
# solver-produced fields at the finest acceptance level
EPS_EXACT = 1e-12
EPS_FUZZ = 1e-6
EPS_SOLVED = 1e-3

RESEED_OFFSET = 1_000_003
MAX_RESEEDS = 64

KIND_ORDER = ("torsion-like", "shear-like", "axial")


def splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """The SplitMix64 output stream for a seed: draws offset..offset+count-1."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * GOLDEN
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


def uniform_symmetric(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """count deterministic uniforms in [-1, 1): top 53 bits of SplitMix64."""
    z = splitmix64(seed, count, offset)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-52 - 1.0


# ---------------------------------------------------------------------------
# per-mesh cached machinery


def _fuzz_cache(mesh: TriMesh) -> dict:
    cache = getattr(mesh, "_fuzz_cache", None)
    if cache is None:
        cache = {}
        mesh._fuzz_cache = cache
    return cache


def _interior_smoother(mesh: TriMesh) -> sp.csr_matrix:
    """One Jacobi-style nodal averaging pass over interior nodes; boundary
    rows are identity so constrained values stay put."""
    cache = _fuzz_cache(mesh)
    if "smoother" not in cache:
        cache["smoother"] = _smoother(mesh, keep=mesh.boundary_nodes)
    return cache["smoother"]


def _full_smoother(mesh: TriMesh) -> sp.csr_matrix:
    cache = _fuzz_cache(mesh)
    if "smoother_all" not in cache:
        cache["smoother_all"] = _smoother(mesh, keep=np.array([], dtype=np.int64))
    return cache["smoother_all"]


def _smoother(mesh: TriMesh, keep: np.ndarray) -> sp.csr_matrix:
    n = mesh.n_nodes
    adj = mesh.node_neighbors() + sp.identity(n, format="csr")
    inv_deg = 1.0 / np.asarray(adj.sum(axis=1)).ravel()
    S = sp.diags(inv_deg) @ adj
    if len(keep):
        mask = np.ones(n)
        mask[keep] = 0.0
        S = sp.diags(mask) @ S + sp.diags(1.0 - mask)
    return S.tocsr()


def _curl(mesh: TriMesh, phi: np.ndarray) -> np.ndarray:
    g = gradient_field(mesh, phi)
    return np.column_stack([g[:, 1], -g[:, 0]])


def _mesh_props_cached(mesh: TriMesh) -> SectionProps:
    cache = _fuzz_cache(mesh)
    if "props" not in cache:
        cache["props"] = mesh_props(mesh)
    return cache["props"]


def _flexure_base(mesh: TriMesh, nu: float, direction: str):
    cache = _fuzz_cache(mesh)
    key = ("flexure", nu, direction)
    if key not in cache:
        cache[key] = solve_flexure(mesh, nu=nu, direction=direction)
    return cache[key]


# ---------------------------------------------------------------------------
# sample generators


def random_torsion_like(mesh: TriMesh, seed: int) -> TangentialStressField:
    """Random admissible torsion-like traction: random nodal potential, zero
    on every boundary loop, one smoothing pass, then s = curl(phi).

    div s = 0 and s.n = 0 hold exactly in the discrete sense; the twisting
    moment is Mt = 2 int phi dA. Samples with |Mt| under the factor cutoff
    are reseeded (seed + k*RESEED_OFFSET, k recorded in meta)."""
    props = _mesh_props_cached(mesh)
    boundary = mesh.boundary_nodes
    smoother = _interior_smoother(mesh)
    for attempt in range(MAX_RESEEDS):
        eff_seed = (seed + attempt * RESEED_OFFSET) & 0xFFFFFFFFFFFFFFFF
        phi = uniform_symmetric(eff_seed, mesh.n_nodes)
        phi[boundary] = 0.0
        phi = smoother @ phi
        s = _curl(mesh, phi)
        energy = float(np.sum(mesh.areas * (s**2).sum(axis=1)))
        Mt = 2.0 * integrate_nodal(mesh, phi)
        if energy > 0 and abs(Mt) > factors.RESULTANT_CUTOFF * np.sqrt(props.Jo * energy):
            return TangentialStressField(
                mesh=mesh,
                values=s,
                origin="fuzz",
                normalization="torsion-like, zero boundary potential",
                meta={"seed": seed, "seed_offset": attempt * RESEED_OFFSET},
            )
    raise RuntimeError(f"could not draw a non-degenerate torsion-like sample (seed {seed})")


def random_shear_like(
    mesh: TriMesh,
    seed: int,
    nu: float = 0.0,
    direction: str = "e2",
    amplitude: float | None = None,
) -> TangentialStressField:
    """Random admissible shear-like traction: the exact flexure Dirichlet data
    plus a random interior potential perturbation.

    The boundary values of the potential are untouched, so s.n = 0 stays
    discretely exact and the realized resultant is shared by every sample in
    the family (it depends only on the boundary data and the particular
    field). amplitude defaults to the mesh size h, which keeps the
    perturbation's stress contribution O(1)."""
    base = _flexure_base(mesh, nu, direction)
    if amplitude is None:
        amplitude = mesh.h
    boundary = mesh.boundary_nodes
    pert = amplitude * uniform_symmetric(seed, mesh.n_nodes)
    pert[boundary] = 0.0
    pert = _interior_smoother(mesh) @ pert
    phi = base.potential + pert
    props = _mesh_props_cached(mesh)
    inertia = props.I1 if direction == "e2" else props.I2
    s0 = particular_field(direction, inertia)
    cen = mesh.centroids
    values = s0(cen[:, 0], cen[:, 1]) + _curl(mesh, phi)
    return TangentialStressField(
        mesh=mesh,
        values=values,
        origin="fuzz",
        normalization="shear-like, flexure boundary data",
        direction=direction,
        meta={"seed": seed, "seed_offset": 0, "nu": nu, "amplitude": amplitude},
    )


def random_axial(mesh: TriMesh, kind: str, seed: int) -> AxialStressField:
    """Random smooth nodal S33, rescaled so the relevant resultant (N for
    extension, M for bending) equals one."""
    if kind not in ("extension", "bending"):
        raise ValueError(f"axial kind must be 'extension' or 'bending', got {kind!r}")
    props = _mesh_props_cached(mesh)
    smoother = _full_smoother(mesh)
    for attempt in range(MAX_RESEEDS):
        eff_seed = (seed + attempt * RESEED_OFFSET) & 0xFFFFFFFFFFFFFFFF
        vals = smoother @ uniform_symmetric(eff_seed, mesh.n_nodes)
        f = AxialStressField(mesh=mesh, values=vals, origin="fuzz")
        r = factors.resultants(f)
        res = r.N if kind == "extension" else r.M
        energy = factors.axial_energy(f)
        scale = props.A if kind == "extension" else props.I1
        if energy > 0 and abs(res) > factors.RESULTANT_CUTOFF * np.sqrt(scale * energy):
            return AxialStressField(
                mesh=mesh,
                values=vals / res,
                origin="fuzz",
                meta={"seed": seed, "seed_offset": attempt * RESEED_OFFSET, "kind": kind},
            )
    raise RuntimeError(f"could not draw a non-degenerate axial sample (seed {seed})")


# ---------------------------------------------------------------------------
# bound evaluation


@dataclass(frozen=True)
class BoundCheck:
    inequality_id: str
    lhs: float
    rhs: float
    tol: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def ok(self) -> bool:
        return self.margin >= -self.tol * max(abs(self.lhs), abs(self.rhs), 1.0)


@dataclass
class FuzzSample:
    seed: int
    kind: str
    section: str
    field: TangentialStressField | AxialStressField
    checks: list[BoundCheck] = field(default_factory=list)
    seed_offset: int = 0

    @property
    def violations(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.ok]


def check_bounds(
    sample: FuzzSample,
    props: SectionProps,
    eps: float = EPS_FUZZ,
    shear_reference: float | None = None,
) -> list[BoundCheck]:
    """Evaluate every inequality applicable to the sample's kind, with exact
    left/right quadrature values. Violations are recorded, not raised."""
    f = sample.field
    checks: list[BoundCheck] = []
    if isinstance(f, TangentialStressField):
        E = factors.tangential_energy(f)
        r = factors.resultants(f)
        if sample.kind == "torsion-like":
            checks.append(
                BoundCheck("cbs_moment_sq_le_Jo_energy", props.Jo * E, r.Mt**2, EPS_EXACT)
            )
            checks.append(
                BoundCheck("chi_t_ge_1", props.Jo * E / r.Mt**2, 1.0, eps)
            )
        else:
            comp = 1 if (f.direction or "e2") == "e2" else 0
            T_dir = r.T2 if comp == 1 else r.T1
            E_dir = float(np.sum(f.mesh.areas * f.values[:, comp] ** 2))
            checks.append(BoundCheck("jensen_energy_ge_component", props.A * E, props.A * E_dir, EPS_EXACT))
            checks.append(BoundCheck("jensen_component_ge_resultant_sq", props.A * E_dir, T_dir**2, EPS_EXACT))
            chi_s = props.A * E / (r.T1**2 + r.T2**2)
            checks.append(BoundCheck("chi_s_gt_1", chi_s, 1.0, eps))
            if shear_reference is not None:
                checks.append(BoundCheck("chi_s_ge_family_minimum", chi_s, shear_reference, eps))
    else:
        E = factors.axial_energy(f)
        r = factors.resultants(f)
        scale_e = np.sqrt(props.A * E)
        scale_b = np.sqrt(props.I1 * E)
        if abs(r.N) > factors.RESULTANT_CUTOFF * scale_e:
            checks.append(BoundCheck("chi_e_ge_1", props.A * E / r.N**2, 1.0, eps))
        if abs(r.M) > factors.RESULTANT_CUTOFF * scale_b:
            checks.append(BoundCheck("chi_b_ge_1", props.I1 * E / r.M**2, 1.0, eps))
    sample.checks = checks
    return checks


# ---------------------------------------------------------------------------
# campaign


def run_campaign(
    sections: list[tuple[str, TriMesh]],
    n_samples: int,
    base_seed: int,
    kinds=KIND_ORDER,
    eps: float = EPS_FUZZ,
) -> list[FuzzSample]:
    """Seeded campaign over sections and kinds; returns samples in the
    deterministic seed-major order used by the corpus CSV."""
    for kind in kinds:
        if kind not in KIND_ORDER:
            raise ValueError(f"unknown fuzz kind {kind!r}")
    prepared = []
    for name, mesh in sections:
        props = _mesh_props_cached(mesh)
        shear_ref = None
        if "shear-like" in kinds and not mesh.hole_loops:
            base = _flexure_base(mesh, 0.0, "e2")
            shear_ref = factors.compute_factor("shear", base.stress, props)
        prepared.append((name, mesh, props, shear_ref))

    samples: list[FuzzSample] = []
    for i in range(n_samples):
        seed = base_seed + i
        for kind in kinds:
            for name, mesh, props, shear_ref in prepared:
                if kind == "torsion-like":
                    f = random_torsion_like(mesh, seed)
                elif kind == "shear-like":
                    if mesh.hole_loops:
                        continue  # flexure construction needs a simply connected mesh
                    f = random_shear_like(mesh, seed)
                else:
                    f = random_axial(mesh, "extension" if seed % 2 == 0 else "bending", seed)
                sample = FuzzSample(
                    seed=seed,
                    kind=kind,
                    section=name,
                    field=f,
                    seed_offset=f.meta.get("seed_offset", 0),
                )
                check_bounds(
                    sample,
                    props,
                    eps=eps,
                    shear_reference=shear_ref if kind == "shear-like" else None,
                )
                samples.append(sample)
    return samples


def write_corpus_csv(samples: list[FuzzSample], path) -> int:
    """Write the corpus CSV (seed-major order) and return the number of
    violated checks."""
    violations = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("seed,kind,section,inequality_id,lhs,rhs,margin\n")
        for s in samples:
            for c in s.checks:
                if not c.ok:
                    violations += 1
                fh.write(
                    f"{s.seed},{s.kind},{s.section},{c.inequality_id},"
                    f"{c.lhs:.17g},{c.rhs:.17g},{c.margin:.17g}\n"
                )
    return violations
