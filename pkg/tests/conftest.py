import numpy as np
import pytest

import motionscore as ms


@pytest.fixture(scope="session")
def skeleton():
    return ms.default_skeleton()


@pytest.fixture(scope="session")
def limits():
    return ms.default_limits()


@pytest.fixture(scope="session")
def config():
    return ms.EngineConfig()


@pytest.fixture(scope="session")
def baseline(skeleton, limits):
    return ms.generate_baseline(skeleton, limits, 30, 30.0, seed=7)


def make_bundle(skeleton, joint_angles, fps=30.0, valid=None, detections=None,
                mesh_frames=None, video_id="test", difficulty="medium",
                intensity="gentle"):
    """Bundle with FK-consistent keypoints for prescribed joint angles."""
    from motionscore.kinematics import forward_kinematics_keypoints, split_root_pose

    joint_angles = np.asarray(joint_angles, dtype=float)
    T = joint_angles.shape[0]
    keypoints = np.empty((T, len(skeleton.keypoints), 3))
    for t in range(T):
        free, root = split_root_pose(skeleton, joint_angles[t])
        keypoints[t] = forward_kinematics_keypoints(skeleton, free, root)
    return ms.MotionBundle(
        video_id=video_id, fps=fps, joint_angles=joint_angles,
        keypoints=keypoints,
        valid=np.ones(T, dtype=bool) if valid is None else valid,
        difficulty=difficulty, intensity=intensity,
        detections=detections, mesh_frames=mesh_frames,
    )
