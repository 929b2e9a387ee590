"""Mirror-image ray tracing in rectangular rooms.

Rooms are axis-aligned boxes with six reflecting faces and optional
axis-aligned box obstacles. The tracer enumerates the direct path and
specular reflections up to second order via image sources, attaching a
Fresnel reflection coefficient (plus a fixed roughness loss) to every
bounce. All functions are pure; there is no shared state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

SPEED_OF_LIGHT = 3.0e8  # m/s

# Face ids: fixed order used for tie-breaking and material lookup.
# (axis, at_zero): 0:x=0  1:x=width  2:y=0  3:y=depth  4:floor z=0  5:ceiling z=height
_FACES = ((0, True), (0, False), (1, True), (1, False), (2, True), (2, False))

_EPS = 1e-12


class GeometryError(ValueError):
    """Degenerate or unsupported ray-tracing geometry."""


@dataclass(frozen=True)
class Material:
    """Dielectric surface: relative permittivity plus per-bounce roughness loss."""

    name: str
    relative_permittivity: float
    roughness_loss_db: float = 0.0

    def __post_init__(self):
        if self.relative_permittivity < 1.0:
            raise ValueError(f"relative_permittivity must be >= 1, got {self.relative_permittivity}")
        if self.roughness_loss_db < 0.0:
            raise ValueError(f"roughness_loss_db must be >= 0, got {self.roughness_loss_db}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned obstacle, defined by its min/max corners."""

    x0: float
    y0: float
    z0: float
    x1: float
    y1: float
    z1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1 and self.z0 < self.z1):
            raise ValueError("box min corner must be strictly below max corner")

    @property
    def bounds(self):
        return ((self.x0, self.x1), (self.y0, self.y1), (self.z0, self.z1))


@dataclass(frozen=True)
class Room:
    """Rectangular room: width (x), depth (y), height (z), six face materials."""

    width: float
    depth: float
    height: float
    face_materials: tuple = ()
    obstacles: tuple = ()

    def __post_init__(self):
        if min(self.width, self.depth, self.height) <= 0.0:
            raise ValueError("room dimensions must be positive")
        if len(self.face_materials) != 6:
            raise ValueError("exactly 6 face materials required (use Room.box)")
        dims = (self.width, self.depth, self.height)
        for box in self.obstacles:
            for ax, (lo, hi) in enumerate(box.bounds):
                if not (0.0 < lo and hi < dims[ax]):
                    raise ValueError(f"obstacle {box} must lie strictly inside the room")

    @staticmethod
    def box(width, depth, height, wall=None, floor=None, ceiling=None, obstacles=()):
        """Build a room with one material for the 4 walls, one for floor, one for ceiling."""
        wall = wall or Material("default_wall", 3.2, 0.5)
        floor = floor or wall
        ceiling = ceiling or wall
        mats = (wall, wall, wall, wall, floor, ceiling)
        return Room(width, depth, height, face_materials=mats, obstacles=tuple(obstacles))

    @property
    def dims(self):
        return (self.width, self.depth, self.height)

    def contains(self, p, strict=True):
        dims = self.dims
        if strict:
            return all(0.0 < p[i] < dims[i] for i in range(3))
        return all(0.0 <= p[i] <= dims[i] for i in range(3))

    def face_plane(self, face_id):
        """Return (axis, coordinate value) of a face."""
        axis, at_zero = _FACES[face_id]
        return axis, (0.0 if at_zero else self.dims[axis])


@dataclass(frozen=True)
class RayPath:
    """One specular propagation path between TX and RX.

    ``gain_db``/``phase_rad`` hold the combined (reflection x penetration)
    amplitude and are the authoritative values for file export; for traced
    paths they are derived from ``reflection_gains`` and ``penetration_db``.
    ``vertices`` is None for paths reconstructed from a ray file.
    """

    order: int
    path_length: float
    delay: float
    aoa_az: float
    aoa_el: float
    aod_az: float
    aod_el: float
    reflection_gains: tuple = ()
    surface_ids: tuple = ()
    penetration_db: float = 0.0
    vertices: tuple | None = None
    gain_db: float = field(default=None)  # type: ignore[assignment]
    phase_rad: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.gain_db is None or self.phase_rad is None:
            g = complex(1.0, 0.0)
            for coeff in self.reflection_gains:
                g *= coeff
            gain_db = 20.0 * math.log10(abs(g)) if abs(g) > 0 else -math.inf
            gain_db -= self.penetration_db
            object.__setattr__(self, "gain_db", gain_db)
            object.__setattr__(self, "phase_rad", cmath.phase(g))

    @property
    def gain(self) -> complex:
        """Combined reflection/penetration amplitude as a complex number."""
        return 10.0 ** (self.gain_db / 20.0) * cmath.exp(1j * self.phase_rad)

    @property
    def is_direct(self) -> bool:
        return self.order == 0

    def sort_key(self):
        return (self.delay, self.order, self.surface_ids)


def azimuth_deg(v) -> float:
    """Azimuth of a 3D direction, degrees in [0, 360), measured from +x toward +y."""
    return math.degrees(math.atan2(v[1], v[0])) % 360.0


def elevation_deg(v) -> float:
    """Elevation of a 3D direction, degrees in [-90, 90]."""
    r = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if r == 0.0:
        raise GeometryError("zero-length direction has no elevation")
    return math.degrees(math.asin(max(-1.0, min(1.0, v[2] / r))))


def fresnel_reflection(incidence_angle, material: Material, polarization: str = "TE") -> complex:
    """Fresnel amplitude coefficient for air onto a dielectric half-space.

    ``incidence_angle`` is measured from the surface normal, radians in
    [0, pi/2]. At exactly pi/2 the grazing limit (|gamma| = 1) is returned.
    The sign convention makes both polarizations reduce to
    (1 - sqrt(eps_r)) / (1 + sqrt(eps_r)) at normal incidence.
    """
    if polarization not in ("TE", "TM"):
        raise ValueError(f"polarization must be TE or TM, got {polarization!r}")
    if not (0.0 <= incidence_angle <= math.pi / 2):
        raise ValueError(f"incidence angle out of [0, pi/2]: {incidence_angle}")
    eps_r = material.relative_permittivity
    if incidence_angle == math.pi / 2:
        return complex(-1.0) if polarization == "TE" else complex(1.0)
    if eps_r == 1.0:
        return complex(0.0)
    cos_i = math.cos(incidence_angle)
    root = math.sqrt(max(0.0, eps_r - math.sin(incidence_angle) ** 2))
    if polarization == "TE":
        return complex((cos_i - root) / (cos_i + root))
    return complex((root - eps_r * cos_i) / (root + eps_r * cos_i))


def _segment_crosses_box(p, q, box: Box) -> bool:
    """True iff the open segment p-q passes through the open interior of the box.

    Touching a face, edge or corner without entering does not count, so a
    grazing obstacle never blocks a path.
    """
    t0, t1 = 0.0, 1.0
    for ax, (lo, hi) in enumerate(box.bounds):
        d = q[ax] - p[ax]
        if abs(d) < _EPS:
            if not (lo < p[ax] < hi):
                return False
        else:
            ta = (lo - p[ax]) / d
            tb = (hi - p[ax]) / d
            if ta > tb:
                ta, tb = tb, ta
            if ta > t0:
                t0 = ta
            if tb < t1:
                t1 = tb
            if t0 >= t1:
                return False
    return t1 - t0 > _EPS


def _count_blocking(room: Room, p, q) -> int:
    return sum(1 for box in room.obstacles if _segment_crosses_box(p, q, box))


def is_los(room: Room, tx, rx) -> bool:
    """True iff the open TX-RX segment crosses no obstacle interior."""
    tx = tuple(map(float, tx))
    rx = tuple(map(float, rx))
    if not (room.contains(tx) and room.contains(rx)):
        raise GeometryError("tx and rx must lie strictly inside the room")
    return _count_blocking(room, tx, rx) == 0


def _mirror(p, axis, value):
    q = list(p)
    q[axis] = 2.0 * value - q[axis]
    return tuple(q)


def _dist(p, q):
    return math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 + (p[2] - q[2]) ** 2)


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _make_path(room: Room, vertices, surface_ids, polarization, penetration_db=0.0) -> RayPath:
    tx, rx = vertices[0], vertices[-1]
    length = sum(_dist(vertices[i], vertices[i + 1]) for i in range(len(vertices) - 1))
    gains = []
    for k, face_id in enumerate(surface_ids):
        axis, _ = room.face_plane(face_id)
        seg = _sub(vertices[k + 1], vertices[k])
        seg_len = math.sqrt(seg[0] ** 2 + seg[1] ** 2 + seg[2] ** 2)
        cos_i = min(1.0, abs(seg[axis]) / seg_len)
        angle = math.acos(cos_i)
        mat = room.face_materials[face_id]
        coeff = fresnel_reflection(angle, mat, polarization)
        coeff *= 10.0 ** (-mat.roughness_loss_db / 20.0)
        gains.append(coeff)
    return RayPath(
        order=len(surface_ids),
        path_length=length,
        delay=length / SPEED_OF_LIGHT,
        aoa_az=azimuth_deg(_sub(vertices[-2], rx)),
        aoa_el=elevation_deg(_sub(vertices[-2], rx)),
        aod_az=azimuth_deg(_sub(vertices[1], tx)),
        aod_el=elevation_deg(_sub(vertices[1], tx)),
        reflection_gains=tuple(gains),
        surface_ids=tuple(surface_ids),
        penetration_db=penetration_db,
        vertices=tuple(vertices),
    )


def _on_face(room: Room, face_id, p, tol=1e-9) -> bool:
    axis, value = room.face_plane(face_id)
    if abs(p[axis] - value) > 1e-6:
        return False
    dims = room.dims
    for ax in range(3):
        if ax == axis:
            continue
        if not (-tol <= p[ax] <= dims[ax] + tol):
            return False
    return True


def _plane_hit(a, b, axis, value):
    """Intersection of segment a-b with an axis plane; None unless strictly interior."""
    d = b[axis] - a[axis]
    if abs(d) < _EPS:
        return None
    t = (value - a[axis]) / d
    if not (_EPS < t < 1.0 - _EPS):
        return None
    return tuple(a[i] + t * (b[i] - a[i]) for i in range(3))


def trace(room: Room, tx, rx, max_order: int, polarization: str = "TE",
          direct_penetration_db: float | None = None) -> list:
    """Enumerate direct + specular reflection paths up to ``max_order`` (<= 2).

    The direct path is dropped when an obstacle blocks it, unless
    ``direct_penetration_db`` is given, in which case it is kept attenuated
    by that many dB per crossed obstacle. Blocked reflection paths are
    always dropped. Paths come back sorted by (delay, order, surfaces).
    """
    tx = tuple(map(float, tx))
    rx = tuple(map(float, rx))
    if tx == rx:
        raise GeometryError("tx and rx coincide")
    if not (room.contains(tx) and room.contains(rx)):
        raise GeometryError("tx and rx must lie strictly inside the room")
    if max_order not in (0, 1, 2):
        raise GeometryError(f"unsupported reflection order {max_order} (max 2)")

    paths = []

    n_block = _count_blocking(room, tx, rx)
    if n_block == 0:
        paths.append(_make_path(room, (tx, rx), (), polarization))
    elif direct_penetration_db is not None:
        paths.append(_make_path(room, (tx, rx), (), polarization,
                                penetration_db=n_block * direct_penetration_db))

    if max_order >= 1:
        for face_id in range(6):
            axis, value = room.face_plane(face_id)
            image = _mirror(tx, axis, value)
            hit = _plane_hit(image, rx, axis, value)
            if hit is None or not _on_face(room, face_id, hit):
                continue
            if _count_blocking(room, tx, hit) or _count_blocking(room, hit, rx):
                continue
            paths.append(_make_path(room, (tx, hit, rx), (face_id,), polarization))

    if max_order >= 2:
        for f1 in range(6):
            ax1, v1 = room.face_plane(f1)
            image1 = _mirror(tx, ax1, v1)
            for f2 in range(6):
                if f2 == f1:
                    continue
                ax2, v2 = room.face_plane(f2)
                image2 = _mirror(image1, ax2, v2)
                p2 = _plane_hit(image2, rx, ax2, v2)
                if p2 is None or not _on_face(room, f2, p2):
                    continue
                p1 = _plane_hit(image1, p2, ax1, v1)
                if p1 is None or not _on_face(room, f1, p1):
                    continue
                if _dist(p1, p2) < 1e-9:
                    continue
                if (_count_blocking(room, tx, p1) or _count_blocking(room, p1, p2)
                        or _count_blocking(room, p2, rx)):
                    continue
                paths.append(_make_path(room, (tx, p1, p2, rx), (f1, f2), polarization))

    paths.sort(key=RayPath.sort_key)
    return paths
