"""Voronoi aggregate surrogates: raster grain maps, crystal orientations,
BCC slip-system geometry with Schmid projection, and a per-grain stress
field stand-in.

The tessellation is realized directly on the grid (each node takes the
grain of its nearest seed, ties to the lowest seed index) rather than as
polygon geometry: every consumer is grid-sampled, so polygon edges would
add complexity with no observable effect.

The surrogate stress field is plumbing, not physics: a per-grain plateau
driven by the inverse of the grain's maximal Schmid factor under uniaxial
tension (hard orientations respond stiffer), recentered over grains,
plus one smooth intra-grain fluctuation realization from the synthesis
module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridField, GridSpec, _locked
from .models import PsdModel
from .synthesis import SynthesisPlan, simulate_field, substream

_RESEED_TRIES = 100

# sub-stream indices far above any realization count, so one user seed can
# feed the tessellation, the orientations, and synthesis noise without the
# streams overlapping
_TESSELLATION_STREAM = 1 << 32
_ORIENTATION_STREAM = (1 << 32) + 1


@dataclass(frozen=True)
class Tessellation:
    """Raster Voronoi grain map: seed points plus per-node grain indices."""

    n_grains: int
    seeds: np.ndarray
    spec: GridSpec
    grain_map: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.seeds, dtype=float)
        g = np.asarray(self.grain_map, dtype=np.int64)
        if s.shape != (self.n_grains, 2):
            raise ValueError("seeds must have shape (n_grains, 2)")
        if g.shape != (self.spec.ny, self.spec.nx):
            raise ValueError("grain map must have shape (ny, nx)")
        if g.min() < 0 or g.max() >= self.n_grains:
            raise ValueError("grain indices out of range")
        object.__setattr__(self, "seeds", _locked(s.copy()))
        object.__setattr__(self, "grain_map", _locked(g.copy()))

    @property
    def domain(self) -> tuple[float, float]:
        return (self.spec.extent_x, self.spec.extent_y)


@dataclass(frozen=True)
class Orientation:
    """Crystal orientation as Bunge z-x-z Euler angles (radians)."""

    phi1: float
    Phi: float
    phi2: float

    def __post_init__(self) -> None:
        two_pi = 2.0 * math.pi
        if not (0.0 <= self.phi1 < two_pi and 0.0 <= self.phi2 < two_pi):
            raise ValueError("phi1, phi2 must lie in [0, 2*pi)")
        if not (0.0 <= self.Phi <= math.pi):
            raise ValueError("Phi must lie in [0, pi]")


@dataclass(frozen=True)
class SlipSystem:
    """Slip plane normal and slip direction (unit vectors, orthogonal)."""

    normal: np.ndarray
    direction: np.ndarray
    family: str

    def __post_init__(self) -> None:
        n = np.asarray(self.normal, dtype=float)
        m = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12 or abs(np.linalg.norm(m) - 1.0) > 1e-12:
            raise ValueError("slip system vectors must be unit length")
        if abs(float(n @ m)) > 1e-12:
            raise ValueError("slip direction must lie in the slip plane")
        object.__setattr__(self, "normal", _locked(n.copy()))
        object.__setattr__(self, "direction", _locked(m.copy()))


def _assign_nearest(seeds: np.ndarray, spec: GridSpec) -> np.ndarray:
    """Nearest-seed index per node; ties break to the lowest seed index."""
    xs, ys = spec.x_coords(), spec.y_coords()
    xg, yg = np.meshgrid(xs, ys)
    nodes_x = xg.ravel()
    nodes_y = yg.ravel()
    out = np.empty(nodes_x.size, dtype=np.int64)
    chunk = 65536
    for a in range(0, nodes_x.size, chunk):
        b = min(a + chunk, nodes_x.size)
        d2 = ((nodes_x[a:b, None] - seeds[None, :, 0]) ** 2
              + (nodes_y[a:b, None] - seeds[None, :, 1]) ** 2)
        out[a:b] = np.argmin(d2, axis=1)
    return out.reshape(spec.ny, spec.nx)


def voronoi_tessellation(n_grains: int, spec: GridSpec, seed: int = 0) -> Tessellation:
    """Uniform random seeds in the grid domain; every node joins its nearest
    seed. Seeds that end up owning no node are redrawn (bounded retries)."""
    if n_grains < 1:
        raise ValueError("at least one grain is required")
    if n_grains > spec.nx * spec.ny:
        raise ValueError("more grains than grid nodes")
    rng = substream(seed, _TESSELLATION_STREAM)
    lo = np.array([spec.origin_x, spec.origin_y])
    hi = lo + np.array([spec.extent_x, spec.extent_y])
    seeds = rng.uniform(lo, hi, size=(n_grains, 2))
    for _ in range(_RESEED_TRIES):
        grain_map = _assign_nearest(seeds, spec)
        counts = np.bincount(grain_map.ravel(), minlength=n_grains)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return Tessellation(n_grains, seeds, spec, grain_map)
        seeds = seeds.copy()
        seeds[empty] = rng.uniform(lo, hi, size=(empty.size, 2))
    raise ValueError("degenerate tessellation")


def equivalent_grain_diameter(domain_area: float, n_grains: int) -> float:
    """Diameter of the disc whose area equals the mean grain area."""
    if domain_area <= 0.0 or n_grains <= 0:
        raise ValueError("domain area and grain count must be positive")
    return math.sqrt(4.0 / math.pi * domain_area / n_grains)


def sample_orientations(n_grains: int, seed: int = 0,
                        sphere_uniform: bool = True) -> list[Orientation]:
    """Random orientations: phi1, phi2 uniform on [0, 2*pi); Phi with density
    proportional to sin(Phi) (uniform on the sphere) by default, or uniform
    on [0, pi] when ``sphere_uniform`` is off."""
    if n_grains < 1:
        raise ValueError("at least one orientation is required")
    rng = substream(seed, _ORIENTATION_STREAM)
    phi1 = rng.uniform(0.0, 2.0 * math.pi, n_grains)
    if sphere_uniform:
        big_phi = np.arccos(rng.uniform(-1.0, 1.0, n_grains))
    else:
        big_phi = rng.uniform(0.0, math.pi, n_grains)
    phi2 = rng.uniform(0.0, 2.0 * math.pi, n_grains)
    return [Orientation(float(a), float(b), float(c))
            for a, b, c in zip(phi1, big_phi, phi2)]


def _unique_up_to_sign(vectors) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for v in vectors:
        v = np.asarray(v, dtype=float)
        if not any(np.array_equal(v, k) or np.array_equal(-v, k) for k in kept):
            kept.append(v)
    return kept


def _signed_permutations(base) -> list[np.ndarray]:
    out = set()
    for perm in itertools.permutations(base):
        for signs in itertools.product((1, -1), repeat=3):
            out.add(tuple(s * int(x) for s, x in zip(signs, perm)))
    return [np.array(v, dtype=float) for v in sorted(out)]


def slip_systems_bcc24() -> list[SlipSystem]:
    """The 12 {110}<111> and 12 {112}<111> systems in crystal coordinates.

    Each {110} plane hosts two distinct <111> axes; each {112} plane hosts
    exactly one. Plane/direction representatives are deduplicated up to
    sign and ordered deterministically (family, then lexicographic on the
    integer Miller indices), so the table is fixed and auditable.
    """
    systems: list[SlipSystem] = []
    d111 = _signed_permutations((1, 1, 1))
    for family, base in (("{110}<111>", (1, 1, 0)), ("{112}<111>", (1, 1, 2))):
        for n in _unique_up_to_sign(_signed_permutations(base)):
            in_plane = _unique_up_to_sign([d for d in d111 if abs(float(d @ n)) < 1e-12])
            for m in in_plane:
                systems.append(SlipSystem(n / np.linalg.norm(n),
                                          m / np.linalg.norm(m), family))
    assert len(systems) == 24
    return systems


def schmid_tensor(sys: SlipSystem) -> np.ndarray:
    """Symmetric projection tensor (m_i n_j + m_j n_i)/2; traceless because
    the slip direction lies in the plane."""
    m, n = sys.direction, sys.normal
    return 0.5 * (np.outer(m, n) + np.outer(n, m))


def _bunge_matrix(o: Orientation) -> np.ndarray:
    """Rotation taking sample-frame coordinates to crystal-frame (Bunge z-x-z)."""
    c1, s1 = math.cos(o.phi1), math.sin(o.phi1)
    c, s = math.cos(o.Phi), math.sin(o.Phi)
    c2, s2 = math.cos(o.phi2), math.sin(o.phi2)
    return np.array([
        [c1 * c2 - s1 * s2 * c, s1 * c2 + c1 * s2 * c, s2 * s],
        [-c1 * s2 - s1 * c2 * c, -s1 * s2 + c1 * c2 * c, c2 * s],
        [s1 * s, -c1 * s, c],
    ])


def resolved_shear(stress: np.ndarray, sys: SlipSystem, orientation: Orientation) -> float:
    """Stress projected onto the slip system after rotating the system into
    the sample frame."""
    stress = np.asarray(stress, dtype=float)
    if stress.shape != (3, 3) or not np.allclose(stress, stress.T, atol=1e-9):
        raise ValueError("stress must be a symmetric 3x3 tensor")
    g = _bunge_matrix(orientation)
    m = g.T @ sys.direction
    n = g.T @ sys.normal
    r = 0.5 * (np.outer(m, n) + np.outer(n, m))
    return float(np.sum(r * stress))


_UNIAXIAL_3 = np.diag([0.0, 0.0, 1.0])


def max_schmid_factor(orientation: Orientation,
                      systems: list[SlipSystem] | None = None) -> float:
    """Largest |resolved shear| over the 24 systems under unit uniaxial
    tension along sample axis 3."""
    if systems is None:
        systems = slip_systems_bcc24()
    return max(abs(resolved_shear(_UNIAXIAL_3, s, orientation)) for s in systems)


def surrogate_stress_field(tess: Tessellation, orientations, base_mean: float,
                           schmid_gain: float, intra_model: PsdModel,
                           seed: int = 0) -> GridField:
    """Grain plateaus plus smooth intra-grain fluctuation.

    Each grain's plateau is the inverse of its maximal Schmid factor under
    uniaxial tension (a Taylor-style stiffness proxy, constant per grain),
    recentered to zero mean over grains and scaled by ``schmid_gain``; one
    synthesis realization of ``intra_model`` (sub-stream 0 of ``seed``) adds
    the within-grain fluctuation on top of ``base_mean``.
    """
    orientations = list(orientations)
    if len(orientations) != tess.n_grains:
        raise ValueError("one orientation per grain is required")
    systems = slip_systems_bcc24()
    g = np.array([1.0 / max_schmid_factor(o, systems) for o in orientations])
    g -= g.mean()
    noise = simulate_field(SynthesisPlan(intra_model, tess.spec, mean=0.0, seed=seed))
    values = base_mean + schmid_gain * g[tess.grain_map] + noise.values
    return GridField(tess.spec, values)
