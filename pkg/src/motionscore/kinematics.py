"""Numerical kinematics: differentiation and forward kinematics.

Angles are degrees at the API surface; radians appear only transiently
inside the rotation math.  Joint rotations compose parent-to-child,
intrinsically, in each joint's declared axis order.
"""

from __future__ import annotations

import numpy as np

from .bundle import MotionBundle
from .errors import InsufficientDataError, SchemaError
from .skeleton import ROOT_KIND, SkeletonDefinition


def central_difference(series, dt: float) -> np.ndarray:
    """Differentiate along axis 0: central at interior samples, one-sided
    first differences at the two endpoints (output keeps length T).
    """
    x = np.asarray(series, dtype=float)
    if x.shape[0] < 2:
        raise InsufficientDataError("need at least 2 samples to differentiate")
    if dt <= 0:
        raise ValueError("dt must be positive")
    out = np.empty_like(x)
    out[0] = (x[1] - x[0]) / dt
    out[-1] = (x[-1] - x[-2]) / dt
    if x.shape[0] > 2:
        out[1:-1] = (x[2:] - x[:-2]) / (2.0 * dt)
    return out


def _axis_rotation(axis, angle_rad: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    x, y, z = axis
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def _segment_frames(skeleton: SkeletonDefinition, joint_angles, root_pose):
    """World (rotation, origin) for every segment.

    ``joint_angles``: the non-root DoF values (degrees) in skeleton order.
    ``root_pose``: (tx, ty, tz, r1, r2, r3) with translations in meters and
    rotations in degrees about the root joint's declared axes.
    """
    joint_angles = np.asarray(joint_angles, dtype=float)
    root_pose = np.asarray(root_pose, dtype=float)
    n_free = skeleton.dof_count - 6
    if joint_angles.shape != (n_free,):
        raise SchemaError(
            f"expected {n_free} non-root joint angles, got {joint_angles.shape}"
        )
    if root_pose.shape != (6,):
        raise SchemaError("root_pose must hold 6 values")

    root = skeleton.root_joint
    R = np.eye(3)
    for axis, ang in zip(root.axes, np.radians(root_pose[3:])):
        R = R @ _axis_rotation(axis, ang)
    frames = {root.child_segment: (R, root_pose[:3] + np.asarray(root.offset))}

    cursor = 0
    for joint in skeleton.joints[1:]:
        n = len(joint.dof_names)
        angles = np.radians(joint_angles[cursor:cursor + n])
        cursor += n
        parent_R, parent_p = frames[joint.parent_segment]
        origin = parent_p + parent_R @ np.asarray(joint.offset)
        R = parent_R
        for axis, ang in zip(joint.axes, angles):
            R = R @ _axis_rotation(axis, ang)
        frames[joint.child_segment] = (R, origin)
    return frames


def forward_kinematics_com(skeleton: SkeletonDefinition, joint_angles_frame,
                           root_pose) -> np.ndarray:
    """World center-of-mass position of every segment, (n_segments, 3)."""
    frames = _segment_frames(skeleton, joint_angles_frame, root_pose)
    out = np.empty((len(skeleton.segments), 3))
    for i, seg in enumerate(skeleton.segments):
        R, p = frames[seg.name]
        out[i] = p + R @ np.asarray(seg.com_offset)
    return out


def forward_kinematics_keypoints(skeleton: SkeletonDefinition, joint_angles_frame,
                                 root_pose) -> np.ndarray:
    """World position of every keypoint, (K, 3)."""
    frames = _segment_frames(skeleton, joint_angles_frame, root_pose)
    out = np.empty((len(skeleton.keypoints), 3))
    for i, kp in enumerate(skeleton.keypoints):
        R, p = frames[kp.segment]
        out[i] = p + R @ np.asarray(kp.offset)
    return out


def split_root_pose(skeleton: SkeletonDefinition, dof_row):
    """Split a full DoF row into (non-root angles, root pose)."""
    dof_row = np.asarray(dof_row, dtype=float)
    n_root = len(skeleton.root_joint.dof_names)
    return dof_row[n_root:], dof_row[:n_root]


def segment_com_positions(bundle: MotionBundle, skeleton: SkeletonDefinition) -> np.ndarray:
    """Per-frame world COM of every segment, (T, n_segments, 3)."""
    T = bundle.frame_count
    out = np.empty((T, len(skeleton.segments), 3))
    for t in range(T):
        angles, root = split_root_pose(skeleton, bundle.joint_angles[t])
        out[t] = forward_kinematics_com(skeleton, angles, root)
    return out


def segment_com_velocities(bundle: MotionBundle, skeleton: SkeletonDefinition) -> np.ndarray:
    """Per-frame COM speed of every segment in m/s, (T, n_segments)."""
    coms = segment_com_positions(bundle, skeleton)
    vel = central_difference(coms, bundle.dt)
    return np.linalg.norm(vel, axis=2)
