"""Per-video input contract: fitted angles, keypoints, meshes, detections.

A motion bundle is a single self-describing JSON document.  Top-level keys:
``video_id``, ``fps``, ``difficulty``, ``intensity``, ``valid``,
``dof_names``, ``joint_angles`` (row-major, degrees; root translation
columns in meters), ``keypoints`` (meters), ``detections`` (optional,
per-frame confidences for the four duplicate-limb classes), and ``meshes``
(optional, one ``{vertices, faces}`` object per frame).  No NaN/Inf
anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaError, ValidationError
from .skeleton import SkeletonDefinition

DIFFICULTIES = ("easy", "medium", "hard")
INTENSITIES = ("gentle", "intense")
DETECTION_CLASSES = ("extra_hand", "extra_arm", "extra_leg", "extra_foot")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MeshFrame:
    vertices: np.ndarray  # (V, 3) meters
    faces: np.ndarray     # (F, 3) vertex indices

    def __post_init__(self):
        v = _frozen(np.asarray(self.vertices, dtype=float))
        f = _frozen(np.asarray(self.faces, dtype=np.int64))
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValidationError("mesh vertices must be V x 3")
        if f.ndim != 2 or f.shape[1] != 3 or f.shape[0] == 0:
            raise ValidationError("mesh must have at least one F x 3 face")
        if not np.isfinite(v).all():
            raise ValidationError("mesh vertices contain NaN/Inf")
        if f.min() < 0 or f.max() >= v.shape[0]:
            raise ValidationError("face index out of range")
        if (np.sort(f, axis=1)[:, :-1] == np.sort(f, axis=1)[:, 1:]).any():
            raise ValidationError("degenerate face (repeated vertex index)")


@dataclass(frozen=True)
class MotionBundle:
    video_id: str
    fps: float
    joint_angles: np.ndarray           # (T, n_dofs)
    keypoints: np.ndarray              # (T, K, 3)
    valid: np.ndarray                  # (T,) bool
    difficulty: str
    intensity: str
    detections: np.ndarray | None = None   # (T, 4) confidences
    mesh_frames: tuple[MeshFrame, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "joint_angles", _frozen(np.asarray(self.joint_angles, dtype=float)))
        object.__setattr__(self, "keypoints", _frozen(np.asarray(self.keypoints, dtype=float)))
        object.__setattr__(self, "valid", _frozen(np.asarray(self.valid, dtype=bool)))
        if self.detections is not None:
            object.__setattr__(self, "detections", _frozen(np.asarray(self.detections, dtype=float)))
        if self.mesh_frames is not None:
            object.__setattr__(self, "mesh_frames", tuple(self.mesh_frames))
        self._validate()

    @property
    def frame_count(self) -> int:
        return self.joint_angles.shape[0]

    @property
    def dt(self) -> float:
        return 1.0 / self.fps

    def _validate(self):
        if self.fps <= 0:
            raise ValidationError("fps must be positive")
        if self.difficulty not in DIFFICULTIES:
            raise ValidationError(f"difficulty must be one of {DIFFICULTIES}")
        if self.intensity not in INTENSITIES:
            raise ValidationError(f"intensity must be one of {INTENSITIES}")
        T = self.joint_angles.shape[0]
        if T < 2:
            raise ValidationError("bundle must contain at least 2 frames")
        if self.joint_angles.ndim != 2:
            raise ValidationError("joint_angles must be T x n_dofs")
        if self.keypoints.ndim != 3 or self.keypoints.shape[2] != 3:
            raise ValidationError("keypoints must be T x K x 3")
        for name, arr in (("joint_angles", self.joint_angles),
                          ("keypoints", self.keypoints)):
            if arr.shape[0] != T:
                raise ValidationError(f"{name} length differs from frame count")
            if not np.isfinite(arr).all():
                raise ValidationError(f"{name} contains NaN/Inf")
        if self.valid.shape != (T,):
            raise ValidationError("valid mask length differs from frame count")
        if self.detections is not None:
            if self.detections.shape != (T, len(DETECTION_CLASSES)):
                raise ValidationError("detections must be T x 4")
            if not np.isfinite(self.detections).all():
                raise ValidationError("detections contain NaN/Inf")
            if self.detections.min() < 0.0 or self.detections.max() > 1.0:
                raise ValidationError("confidence out of range [0, 1]")
        if self.mesh_frames is not None and len(self.mesh_frames) != T:
            raise ValidationError("mesh sequence length differs from frame count")

    def to_dict(self, skeleton: SkeletonDefinition) -> dict:
        doc = {
            "video_id": self.video_id,
            "fps": self.fps,
            "difficulty": self.difficulty,
            "intensity": self.intensity,
            "dof_names": list(skeleton.dof_names),
            "valid": [bool(v) for v in self.valid],
            "joint_angles": self.joint_angles.tolist(),
            "keypoints": self.keypoints.tolist(),
        }
        if self.detections is not None:
            doc["detections"] = self.detections.tolist()
        if self.mesh_frames is not None:
            doc["meshes"] = [
                {"vertices": m.vertices.tolist(), "faces": m.faces.tolist()}
                for m in self.mesh_frames
            ]
        return doc


def parse_motion_bundle(path, skeleton: SkeletonDefinition) -> MotionBundle:
    """Load and fully validate one bundle file against a skeleton.

    Raises ParseError for malformed files, ValidationError for invariant
    violations, and SchemaError when the declared DoF order or keypoint
    count does not match the skeleton.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None

    def need(key):
        if key not in doc:
            raise ParseError(f"{path}: missing field '{key}'")
        return doc[key]

    dof_names = tuple(need("dof_names"))
    if dof_names != skeleton.dof_names:
        raise SchemaError("bundle DoF order does not match skeleton DoF order")

    angles = np.asarray(need("joint_angles"), dtype=float)
    if angles.ndim != 2 or angles.shape[1] != skeleton.dof_count:
        raise SchemaError(
            f"joint_angles must have {skeleton.dof_count} columns, "
            f"got shape {angles.shape}"
        )
    keypoints = np.asarray(need("keypoints"), dtype=float)
    if keypoints.ndim != 3 or keypoints.shape[1] != len(skeleton.keypoints):
        raise SchemaError(
            f"keypoints must have {len(skeleton.keypoints)} points per frame"
        )

    detections = None
    if doc.get("detections") is not None:
        detections = np.asarray(doc["detections"], dtype=float)
    meshes = None
    if doc.get("meshes") is not None:
        meshes = tuple(
            MeshFrame(np.asarray(m["vertices"], dtype=float),
                      np.asarray(m["faces"], dtype=np.int64))
            for m in doc["meshes"]
        )

    return MotionBundle(
        video_id=need("video_id"),
        fps=float(need("fps")),
        joint_angles=angles,
        keypoints=keypoints,
        valid=np.asarray(need("valid"), dtype=bool),
        difficulty=need("difficulty"),
        intensity=need("intensity"),
        detections=detections,
        mesh_frames=meshes,
    )


def write_motion_bundle(bundle: MotionBundle, skeleton: SkeletonDefinition, path) -> None:
    """Serialize a bundle deterministically (sorted keys, exact floats)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle.to_dict(skeleton), fh, sort_keys=True,
                  separators=(",", ":"), allow_nan=False)
        fh.write("\n")
