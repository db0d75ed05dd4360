"""Ground-truth fixtures: clean baseline motion plus parameterized corruptions.

The baseline is smooth sinusoidal joint motion comfortably inside every
limit, with keypoints derived by forward kinematics and a well-separated
capsule body (the body articulates with the root translation only, so
mesh corruptions stay isolated from the angle-based metrics).  Each
corruption kind performs a localized edit targeting one tier of the
metric hierarchy.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .bundle import DETECTION_CLASSES, MeshFrame, MotionBundle
from .errors import ConfigError, SchemaError, ValidationError
from .kinematics import forward_kinematics_keypoints, split_root_pose
from .skeleton import LimitTable, SkeletonDefinition

CORRUPTION_KINDS = (
    "bone_stretch",
    "rom_violation",
    "velocity_spike",
    "jitter",
    "duplicate_limb_confidence",
    "self_penetration",
)

BASELINE_AMPLITUDE_CAP_DEG = 20.0
BASELINE_ROM_SHARE = 0.4        # amplitude cap as a fraction of the ROM span
BASELINE_LIMIT_SHARE = 0.5      # velocity/acceleration/jerk headroom
_BASELINE_JERK_WINDOW = 5


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    magnitude: float
    frames: tuple[int, ...]
    target: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in CORRUPTION_KINDS:
            raise ConfigError(f"unknown corruption kind '{self.kind}'")
        if self.magnitude < 0:
            raise ConfigError("corruption magnitude must be >= 0")
        object.__setattr__(self, "frames", tuple(int(f) for f in self.frames))


# ---------------------------------------------------------------------------
# capsule body

# (name, axis start, axis end, radius) in root-local coordinates; gaps
# between any two capsule surfaces are at least 0.06 m
_CAPSULES = (
    ("torso", (0.0, 0.10, 0.0), (0.0, 0.55, 0.0), 0.10),
    ("head", (0.0, 0.78, 0.0), (0.0, 0.88, 0.0), 0.07),
    ("arm_r", (0.0, 0.50, 0.24), (0.0, -0.05, 0.30), 0.045),
    ("arm_l", (0.0, 0.50, -0.24), (0.0, -0.05, -0.30), 0.045),
    ("leg_r", (0.0, -0.08, 0.13), (0.0, -0.85, 0.16), 0.06),
    ("leg_l", (0.0, -0.08, -0.13), (0.0, -0.85, -0.16), 0.06),
)

# direction a capsule moves when a penetration corruption targets it
_APPROACH = {
    "head": (0.0, -1.0, 0.0),
    "torso": (0.0, 1.0, 0.0),
    "arm_r": (0.0, 0.0, -1.0),
    "arm_l": (0.0, 0.0, 1.0),
    "leg_r": (0.0, 0.0, -1.0),
    "leg_l": (0.0, 0.0, 1.0),
}

_SECTORS = 8
_CAP_RINGS = 3
_SIDE_RINGS = 1


def _capsule_mesh(p0, p1, radius):
    """Triangulated capsule: hemispherical caps joined by a cylinder."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    axis = p1 - p0
    length = np.linalg.norm(axis)
    u = axis / length
    ref = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(u, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)

    rings = []
    for i in range(1, _CAP_RINGS + 1):        # bottom cap, pole excluded
        phi = -0.5 * np.pi + 0.5 * np.pi * i / _CAP_RINGS
        rings.append((p0 + u * (radius * np.sin(phi)), radius * np.cos(phi)))
    for i in range(1, _SIDE_RINGS + 1):       # cylinder interior rings
        t = i / (_SIDE_RINGS + 1)
        rings.append((p0 + axis * t, radius))
    for i in range(0, _CAP_RINGS):            # top cap, pole excluded
        phi = 0.5 * np.pi * i / _CAP_RINGS
        rings.append((p1 + u * (radius * np.sin(phi)), radius * np.cos(phi)))

    angles = 2.0 * np.pi * np.arange(_SECTORS) / _SECTORS
    circle = np.outer(np.cos(angles), e1) + np.outer(np.sin(angles), e2)

    verts = [p0 - u * radius]                 # bottom pole
    for center, r in rings:
        verts.extend(center + r * circle)
    verts.append(p1 + u * radius)             # top pole
    verts = np.asarray(verts)

    faces = []
    def ring_start(k):
        return 1 + k * _SECTORS

    for s in range(_SECTORS):                 # bottom fan
        faces.append((0, ring_start(0) + (s + 1) % _SECTORS, ring_start(0) + s))
    for k in range(len(rings) - 1):           # quad strips
        a, b = ring_start(k), ring_start(k + 1)
        for s in range(_SECTORS):
            s2 = (s + 1) % _SECTORS
            faces.append((a + s, a + s2, b + s))
            faces.append((a + s2, b + s2, b + s))
    top_pole = len(verts) - 1
    a = ring_start(len(rings) - 1)
    for s in range(_SECTORS):                 # top fan
        faces.append((a + s, a + (s + 1) % _SECTORS, top_pole))
    return verts, np.asarray(faces, dtype=np.int64)


def _body_mesh():
    """The full capsule body plus per-capsule vertex ranges."""
    verts, faces, ranges = [], [], {}
    offset = 0
    for name, p0, p1, radius in _CAPSULES:
        v, f = _capsule_mesh(p0, p1, radius)
        verts.append(v)
        faces.append(f + offset)
        ranges[name] = (offset, offset + v.shape[0])
        offset += v.shape[0]
    return np.concatenate(verts), np.concatenate(faces), ranges


def capsule_vertex_ranges() -> dict:
    """Vertex index range of each capsule inside a generated body mesh."""
    return _body_mesh()[2]


# ---------------------------------------------------------------------------
# baseline generation

def generate_baseline(skeleton: SkeletonDefinition, limits: LimitTable,
                      frame_count: int, fps: float, seed: int,
                      difficulty: str = "medium",
                      intensity: str = "gentle") -> MotionBundle:
    """Deterministic clean motion scoring at the ceiling on every metric.

    Joint angles follow per-DoF sinusoids whose amplitude keeps the angle
    within 40% of the ROM span around mid-range and the velocity,
    acceleration, and windowed jerk energy within half their limits.
    """
    if frame_count < 20:
        raise ValidationError("baseline requires at least 20 frames")
    if fps <= 0:
        raise ConfigError("fps must be positive")

    rng = np.random.default_rng(seed)
    t = np.arange(frame_count) / fps
    dof = limits.dof_arrays(skeleton)
    span = dof["rom_max"] - dof["rom_min"]
    if (span <= 0).any():
        raise ConfigError("limit table has an empty ROM span")
    mid = 0.5 * (dof["rom_max"] + dof["rom_min"])

    n_angular = len(skeleton.angular_dof_names)
    freq = rng.uniform(0.2, 0.5, size=n_angular)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n_angular)
    w = 2.0 * np.pi * freq
    share = BASELINE_LIMIT_SHARE
    amp = np.minimum(BASELINE_ROM_SHARE * span, BASELINE_AMPLITUDE_CAP_DEG)
    amp = np.minimum(amp, share * dof["angular_velocity_max"] / w)
    amp = np.minimum(amp, share * dof["angular_acceleration_max"] / w**2)
    jerk_peak = np.sqrt(share * dof["jerk_energy_max"] / _BASELINE_JERK_WINDOW)
    amp = np.minimum(amp, jerk_peak / w**3)

    # keep the root orientation to a gentle 5-degree sway
    angular_names = skeleton.angular_dof_names
    root_rot = [angular_names.index(d)
                for d in skeleton.root_joint.rotational_dof_names]
    amp[root_rot] = np.minimum(amp[root_rot], 5.0)

    angles = np.zeros((frame_count, skeleton.dof_count))
    cols = skeleton.angular_dof_indices
    angles[:, cols] = mid + amp * np.sin(np.outer(t, w) + phase)

    # gentle root sway in translation
    names = skeleton.dof_names
    sway_phase = rng.uniform(0.0, 2.0 * np.pi, size=3)
    angles[:, names.index("pelvis_tx")] = 0.08 * np.sin(2 * np.pi * 0.25 * t + sway_phase[0])
    angles[:, names.index("pelvis_ty")] = 0.9 + 0.03 * np.sin(2 * np.pi * 0.3 * t + sway_phase[1])
    angles[:, names.index("pelvis_tz")] = 0.05 * np.sin(2 * np.pi * 0.2 * t + sway_phase[2])

    keypoints = np.empty((frame_count, len(skeleton.keypoints), 3))
    for i in range(frame_count):
        free, root = split_root_pose(skeleton, angles[i])
        keypoints[i] = forward_kinematics_keypoints(skeleton, free, root)

    base_verts, faces, _ = _body_mesh()
    tx = names.index("pelvis_tx")
    meshes = tuple(
        MeshFrame(base_verts + angles[i, tx:tx + 3], faces)
        for i in range(frame_count)
    )

    return MotionBundle(
        video_id=f"synthetic-{seed:04d}",
        fps=fps,
        joint_angles=angles,
        keypoints=keypoints,
        valid=np.ones(frame_count, dtype=bool),
        difficulty=difficulty,
        intensity=intensity,
        detections=np.zeros((frame_count, len(DETECTION_CLASSES))),
        mesh_frames=meshes,
    )


# ---------------------------------------------------------------------------
# corruption injection

def _resolve_dofs(skeleton: SkeletonDefinition, target: str | None) -> list[int]:
    """DoF columns for a selector: a DoF name, a joint name, or '*'."""
    names = skeleton.dof_names
    angular = set(skeleton.angular_dof_names)
    if target in (None, "*"):
        return [i for i, n in enumerate(names) if n in angular]
    if target in names:
        if target not in angular:
            raise SchemaError(f"'{target}' is a translation, not an angle")
        return [names.index(target)]
    for joint in skeleton.joints:
        if joint.name == target:
            return [names.index(d) for d in joint.rotational_dof_names]
    raise SchemaError(f"unknown DoF or joint selector '{target}'")


def inject(bundle: MotionBundle, spec: CorruptionSpec,
           skeleton: SkeletonDefinition, limits: LimitTable,
           rom_tol: float = 15.0) -> MotionBundle:
    """Apply one corruption; frames outside ``spec.frames`` stay untouched.

    Zero magnitude returns the input unchanged.
    """
    if spec.magnitude == 0.0:
        return bundle
    T = bundle.frame_count
    if any(not 0 <= f < T for f in spec.frames):
        raise ValidationError("corruption frames outside [0, T)")
    frames = sorted(set(spec.frames))

    if spec.kind == "bone_stretch":
        target = spec.target or skeleton.bones[0].name
        try:
            bone = skeleton.bone(target)
        except KeyError:
            raise SchemaError(f"unknown bone '{target}'") from None
        i, j = bone.keypoints
        moved = skeleton.keypoint_descendants(j)
        keypoints = bundle.keypoints.copy()
        for f in frames:
            delta = spec.magnitude * (keypoints[f, j] - keypoints[f, i])
            keypoints[f, moved] += delta
        return dataclasses.replace(bundle, keypoints=keypoints)

    if spec.kind == "rom_violation":
        dofs = _resolve_dofs(skeleton, spec.target or "hip_flexion_r")
        rows = limits.dof_limits
        names = skeleton.dof_names
        angles = bundle.joint_angles.copy()
        for d in dofs:
            row = rows[names[d]]
            half_span = 0.5 * (row["rom_max"] - row["rom_min"])
            angles[frames, d] = row["rom_max"] + rom_tol + spec.magnitude * half_span
        return dataclasses.replace(bundle, joint_angles=angles)

    if spec.kind == "velocity_spike":
        dofs = _resolve_dofs(skeleton, spec.target)
        rows = limits.dof_limits
        names = skeleton.dof_names
        angles = bundle.joint_angles.copy()
        for d in dofs:
            step = (1.0 + spec.magnitude) * rows[names[d]]["angular_velocity_max"] \
                * 2.0 * bundle.dt
            angles[frames, d] += step
        return dataclasses.replace(bundle, joint_angles=angles)

    if spec.kind == "jitter":
        dofs = _resolve_dofs(skeleton, spec.target)
        angles = bundle.joint_angles.copy()
        signs = np.array([1.0 if k % 2 == 0 else -1.0 for k in range(len(frames))])
        for d in dofs:
            angles[frames, d] += spec.magnitude * signs
        return dataclasses.replace(bundle, joint_angles=angles)

    if spec.kind == "duplicate_limb_confidence":
        target = spec.target or "extra_arm"
        if target not in DETECTION_CLASSES:
            raise SchemaError(f"unknown detection class '{target}'")
        col = DETECTION_CLASSES.index(target)
        if bundle.detections is None:
            detections = np.zeros((T, len(DETECTION_CLASSES)))
        else:
            detections = bundle.detections.copy()
        detections[frames, col] = spec.magnitude
        return dataclasses.replace(bundle, detections=detections)

    # self_penetration
    if bundle.mesh_frames is None:
        raise SchemaError("bundle has no meshes to corrupt")
    target = spec.target or "head"
    ranges = capsule_vertex_ranges()
    if target not in ranges:
        raise SchemaError(f"unknown capsule '{target}'")
    lo, hi = ranges[target]
    direction = np.asarray(_APPROACH[target])
    meshes = list(bundle.mesh_frames)
    for f in frames:
        verts = meshes[f].vertices.copy()
        if hi > verts.shape[0]:
            raise SchemaError("mesh does not match the generated capsule body")
        verts[lo:hi] += spec.magnitude * direction
        meshes[f] = MeshFrame(verts, meshes[f].faces)
    return dataclasses.replace(bundle, mesh_frames=tuple(meshes))
