"""Biomechanics-grounded scoring of fitted human-motion sequences.

Six metrics arranged in a three-tier hierarchy (anatomy, kinematic,
kinetic correctness) score each video on a 0-100 scale, aggregate into
dimension averages and an overall score, and feed leaderboard,
preference-correlation, and robustness-sweep tooling.
"""

from .aggregation import (AggregationWeights, FrameSignals, MetricScore,
                          aggregate_rsp, dimension_and_overall, final_score,
                          longest_abnormal_run)
from .analysis import (LeaderboardEntry, PairwiseComparison, build_leaderboard,
                       difficulty_breakdown, simplex_grid, spearman_rho,
                       ternary_sweep, tolerance_sweep, win_ratios)
from .anatomy_metrics import (BoneLengthConfig, ExtraLimbConfig,
                              bone_length_errors, extra_limb_signals,
                              score_bone_length, score_extra_limbs)
from .bundle import MeshFrame, MotionBundle, parse_motion_bundle, write_motion_bundle
from .config import EngineConfig
from .engine import (VideoScore, VideoSignals, aggregate_video,
                     evaluate_signals, score_bundle, score_record)
from .geometry import Bvh, adjacent_faces, colliding_faces, tri_tri_intersect
from .kinematic_metrics import (CollisionConfig, RomConfig, collision_signals,
                                collision_signals_from_fractions, rom_signals,
                                rom_violation, score_rom, score_self_collision)
from .kinematics import (central_difference, forward_kinematics_com,
                         forward_kinematics_keypoints, segment_com_velocities)
from .kinetic_metrics import (ExtremesConfig, SmoothnessConfig, excess_ratio,
                              extremes_signals, jerk_energy, score_extremes,
                              score_smoothness, smoothness_signals)
from .skeleton import (BoneSpec, JointSpec, KeypointSpec, LimitTable,
                       SegmentSpec, SkeletonDefinition, default_limits,
                       default_skeleton)
from .synthetic import CorruptionSpec, generate_baseline, inject

__version__ = "0.1.0"
