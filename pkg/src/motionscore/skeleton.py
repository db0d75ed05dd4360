"""Skeleton topology, degree-of-freedom layout, and biomechanical limit tables.

The default skeleton mirrors the joint inventory of musculoskeletal gait
models: a 6-DoF pelvis root, ball-and-socket hips/lumbar/shoulders, pin
knees/ankles/subtalars/toes/elbows/forearms, and universal wrists, for a
total of 37 DoFs over 20 rigid segments.  Limit values (range of motion,
angular velocity, angular acceleration, windowed jerk energy, segment
linear speed) ship as a bundled data file and can be overridden by user
files in the same format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError, ParseError, ValidationError

ROOT_KIND = "root"
JOINT_DOF_COUNT = {"root": 6, "ball": 3, "universal": 2, "pin": 1}


@dataclass(frozen=True)
class JointSpec:
    """One joint: where it attaches and which axes its DoFs rotate about.

    ``offset`` is the joint center expressed in the parent segment frame
    (world frame for the root).  ``axes`` holds one unit vector per
    rotational DoF; rotations compose intrinsically in the declared order.
    For the root joint the first three DoFs are translations along world
    x/y/z and ``axes`` describes the remaining three rotations.
    """

    name: str
    kind: str
    parent_segment: str | None
    child_segment: str
    offset: tuple[float, float, float]
    axes: tuple[tuple[float, float, float], ...]
    dof_names: tuple[str, ...]

    @property
    def rotational_dof_names(self) -> tuple[str, ...]:
        if self.kind == ROOT_KIND:
            return self.dof_names[3:]
        return self.dof_names


@dataclass(frozen=True)
class SegmentSpec:
    name: str
    parent_joint: str
    com_offset: tuple[float, float, float]


@dataclass(frozen=True)
class KeypointSpec:
    """A tracked 3-D point: a fixed offset in one segment's frame.

    ``parent`` names the keypoint one step up the chain; bone-length
    corruptions use it to carry an offset down to all descendants.
    """

    name: str
    segment: str
    offset: tuple[float, float, float]
    parent: str | None = None


@dataclass(frozen=True)
class BoneSpec:
    name: str
    keypoints: tuple[int, int]


@dataclass(frozen=True)
class SkeletonDefinition:
    joints: tuple[JointSpec, ...]
    segments: tuple[SegmentSpec, ...]
    keypoints: tuple[KeypointSpec, ...]
    bones: tuple[BoneSpec, ...]

    def __post_init__(self):
        self._validate()

    # -- layout ----------------------------------------------------------

    @property
    def dof_names(self) -> tuple[str, ...]:
        return tuple(d for j in self.joints for d in j.dof_names)

    @property
    def dof_count(self) -> int:
        return len(self.dof_names)

    @property
    def root_joint(self) -> JointSpec:
        return self.joints[0]

    @property
    def angular_dof_names(self) -> tuple[str, ...]:
        """All rotational DoFs (root translations excluded)."""
        return tuple(d for j in self.joints for d in j.rotational_dof_names)

    @property
    def angular_dof_indices(self) -> np.ndarray:
        names = self.dof_names
        angular = set(self.angular_dof_names)
        return np.array([i for i, n in enumerate(names) if n in angular])

    @property
    def segment_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.segments)

    @property
    def keypoint_names(self) -> tuple[str, ...]:
        return tuple(k.name for k in self.keypoints)

    def dof_index(self, name: str) -> int:
        try:
            return self.dof_names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def joint(self, name: str) -> JointSpec:
        for j in self.joints:
            if j.name == name:
                return j
        raise KeyError(name)

    def bone(self, name: str) -> BoneSpec:
        for b in self.bones:
            if b.name == name:
                return b
        raise KeyError(name)

    def keypoint_index(self, name: str) -> int:
        return self.keypoint_names.index(name)

    def keypoint_descendants(self, index: int) -> list[int]:
        """Indices of keypoints below ``index`` in the chain, inclusive."""
        names = self.keypoint_names
        out = [index]
        frontier = {names[index]}
        changed = True
        while changed:
            changed = False
            for i, kp in enumerate(self.keypoints):
                if i not in out and kp.parent in frontier:
                    out.append(i)
                    frontier.add(kp.name)
                    changed = True
        return sorted(out)

    # -- validation ------------------------------------------------------

    def _validate(self):
        if not self.joints or self.joints[0].kind != ROOT_KIND:
            raise ValidationError("skeleton must declare the root joint first")
        roots = [j for j in self.joints if j.kind == ROOT_KIND]
        if len(roots) != 1:
            raise ValidationError("skeleton must have exactly one root joint")

        seen_dofs = set()
        for j in self.joints:
            if j.kind not in JOINT_DOF_COUNT:
                raise ValidationError(f"unknown joint kind '{j.kind}'")
            if len(j.dof_names) != JOINT_DOF_COUNT[j.kind]:
                raise ValidationError(
                    f"joint '{j.name}' declares {len(j.dof_names)} DoFs, "
                    f"kind '{j.kind}' requires {JOINT_DOF_COUNT[j.kind]}"
                )
            if len(j.axes) != len(j.rotational_dof_names):
                raise ValidationError(f"joint '{j.name}' axis count mismatch")
            for d in j.dof_names:
                if d in seen_dofs:
                    raise ValidationError(f"DoF '{d}' belongs to more than one joint")
                seen_dofs.add(d)

        seg_names = [s.name for s in self.segments]
        if len(set(seg_names)) != len(seg_names):
            raise ValidationError("duplicate segment names")
        joints_by_child = {}
        for j in self.joints:
            if j.child_segment in joints_by_child:
                raise ValidationError(
                    f"segment '{j.child_segment}' has more than one parent joint"
                )
            joints_by_child[j.child_segment] = j
        for s in self.segments:
            if s.name not in joints_by_child:
                raise ValidationError(f"segment '{s.name}' has no parent joint")
            if joints_by_child[s.name].name != s.parent_joint:
                raise ValidationError(f"segment '{s.name}' parent joint mismatch")

        # tree rooted at the pelvis: walk parent links, detect cycles/orphans
        for s in self.segments:
            seen = set()
            cur = s.name
            while True:
                if cur in seen:
                    raise ValidationError("segment graph contains a cycle")
                seen.add(cur)
                parent = joints_by_child[cur].parent_segment
                if parent is None:
                    break
                if parent not in seg_names:
                    raise ValidationError(
                        f"segment '{cur}' hangs off unknown segment '{parent}'"
                    )
                cur = parent

        kp_count = len(self.keypoints)
        kp_names = [k.name for k in self.keypoints]
        if len(set(kp_names)) != kp_count:
            raise ValidationError("duplicate keypoint names")
        for k in self.keypoints:
            if k.segment not in seg_names:
                raise ValidationError(f"keypoint '{k.name}' on unknown segment")
            if k.parent is not None and k.parent not in kp_names:
                raise ValidationError(f"keypoint '{k.name}' has unknown parent")
        for b in self.bones:
            i, j = b.keypoints
            if i == j:
                raise ValidationError(f"bone '{b.name}' references identical keypoints")
            if not (0 <= i < kp_count and 0 <= j < kp_count):
                raise ValidationError(f"bone '{b.name}' keypoint index out of range")

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "joints": [
                {
                    "name": j.name,
                    "kind": j.kind,
                    "parent_segment": j.parent_segment,
                    "child_segment": j.child_segment,
                    "offset": list(j.offset),
                    "axes": [list(a) for a in j.axes],
                    "dof_names": list(j.dof_names),
                }
                for j in self.joints
            ],
            "segments": [
                {
                    "name": s.name,
                    "parent_joint": s.parent_joint,
                    "com_offset": list(s.com_offset),
                }
                for s in self.segments
            ],
            "keypoints": [
                {
                    "name": k.name,
                    "segment": k.segment,
                    "offset": list(k.offset),
                    "parent": k.parent,
                }
                for k in self.keypoints
            ],
            "bones": [
                {"name": b.name, "keypoints": list(b.keypoints)} for b in self.bones
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SkeletonDefinition":
        try:
            joints = tuple(
                JointSpec(
                    name=j["name"],
                    kind=j["kind"],
                    parent_segment=j["parent_segment"],
                    child_segment=j["child_segment"],
                    offset=tuple(j["offset"]),
                    axes=tuple(tuple(a) for a in j["axes"]),
                    dof_names=tuple(j["dof_names"]),
                )
                for j in data["joints"]
            )
            segments = tuple(
                SegmentSpec(s["name"], s["parent_joint"], tuple(s["com_offset"]))
                for s in data["segments"]
            )
            keypoints = tuple(
                KeypointSpec(k["name"], k["segment"], tuple(k["offset"]), k.get("parent"))
                for k in data["keypoints"]
            )
            bones = tuple(
                BoneSpec(b["name"], tuple(b["keypoints"])) for b in data["bones"]
            )
        except KeyError as exc:
            raise ParseError(f"skeleton file missing field {exc}") from None
        return cls(joints, segments, keypoints, bones)

    @classmethod
    def from_file(cls, path) -> "SkeletonDefinition":
        return cls.from_dict(_load_json(path))


@dataclass(frozen=True)
class LimitTable:
    """Per-DoF and per-segment biomechanical limits.

    Angles in degrees, angular velocity in deg/s, angular acceleration in
    deg/s^2, jerk energy in (deg/s^3)^2 * frames (already scaled by the
    default jerk window), linear speed in m/s.  Weights default to 1.
    """

    dof_limits: dict = field(default_factory=dict)
    segment_limits: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, row in self.dof_limits.items():
            if not row["rom_min"] < row["rom_max"]:
                raise ValidationError(f"rom_min >= rom_max for DoF '{name}'")
            for key in ("angular_velocity_max", "angular_acceleration_max", "jerk_energy_max"):
                if row[key] <= 0:
                    raise ValidationError(f"{key} must be positive for DoF '{name}'")
            if row.get("weight", 1.0) < 0:
                raise ValidationError(f"negative weight for DoF '{name}'")
        for name, row in self.segment_limits.items():
            if row["linear_velocity_max"] <= 0:
                raise ValidationError(
                    f"linear_velocity_max must be positive for segment '{name}'"
                )
            if row.get("weight", 1.0) < 0:
                raise ValidationError(f"negative weight for segment '{name}'")
        if self.dof_limits and sum(r.get("weight", 1.0) for r in self.dof_limits.values()) <= 0:
            raise ValidationError("DoF weights must have a positive sum")
        if self.segment_limits and sum(
            r.get("weight", 1.0) for r in self.segment_limits.values()
        ) <= 0:
            raise ValidationError("segment weights must have a positive sum")

    # -- array views aligned with a skeleton ------------------------------

    def dof_arrays(self, skeleton: SkeletonDefinition) -> dict:
        """Limit columns for every angular DoF, in skeleton order."""
        names = skeleton.angular_dof_names
        missing = [n for n in names if n not in self.dof_limits]
        if missing:
            raise ConfigError(f"limit table missing DoFs: {missing}")
        rows = [self.dof_limits[n] for n in names]

        def col(key, default=None):
            return np.array(
                [r[key] if default is None else r.get(key, default) for r in rows],
                dtype=float,
            )

        return {
            "rom_min": col("rom_min"),
            "rom_max": col("rom_max"),
            "angular_velocity_max": col("angular_velocity_max"),
            "angular_acceleration_max": col("angular_acceleration_max"),
            "jerk_energy_max": col("jerk_energy_max"),
            "weight": col("weight", 1.0),
        }

    def segment_arrays(self, skeleton: SkeletonDefinition) -> dict:
        names = skeleton.segment_names
        missing = [n for n in names if n not in self.segment_limits]
        if missing:
            raise ConfigError(f"limit table missing segments: {missing}")
        rows = [self.segment_limits[n] for n in names]
        return {
            "linear_velocity_max": np.array(
                [r["linear_velocity_max"] for r in rows], dtype=float
            ),
            "weight": np.array([r.get("weight", 1.0) for r in rows], dtype=float),
        }

    def scaled(self, scale: float) -> "LimitTable":
        """Strict-to-permissive rescaling for tolerance sweeps.

        Magnitude limits multiply by ``scale``; ROM intervals widen or
        narrow about their center by the same factor.
        """
        if scale <= 0:
            raise ConfigError("limit scale must be positive")
        dofs = {}
        for name, row in self.dof_limits.items():
            center = 0.5 * (row["rom_min"] + row["rom_max"])
            half = 0.5 * (row["rom_max"] - row["rom_min"]) * scale
            dofs[name] = {
                **row,
                "rom_min": center - half,
                "rom_max": center + half,
                "angular_velocity_max": row["angular_velocity_max"] * scale,
                "angular_acceleration_max": row["angular_acceleration_max"] * scale,
                "jerk_energy_max": row["jerk_energy_max"] * scale,
            }
        segs = {
            name: {**row, "linear_velocity_max": row["linear_velocity_max"] * scale}
            for name, row in self.segment_limits.items()
        }
        return LimitTable(dofs, segs)

    def to_dict(self) -> dict:
        return {"dof_limits": self.dof_limits, "segment_limits": self.segment_limits}

    @classmethod
    def from_dict(cls, data: dict) -> "LimitTable":
        try:
            return cls(dict(data["dof_limits"]), dict(data["segment_limits"]))
        except KeyError as exc:
            raise ParseError(f"limit file missing field {exc}") from None

    @classmethod
    def from_file(cls, path) -> "LimitTable":
        return cls.from_dict(_load_json(path))


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _load_packaged(name: str) -> dict:
    with resources.files("motionscore.data").joinpath(name).open("r") as fh:
        return json.load(fh)


def default_skeleton() -> SkeletonDefinition:
    """The bundled 20-segment, 37-DoF skeleton."""
    return SkeletonDefinition.from_dict(_load_packaged("default_skeleton.json"))


def default_limits() -> LimitTable:
    """The bundled limit table (literature-informed defaults)."""
    return LimitTable.from_dict(_load_packaged("default_limits.json"))
