#pragma once

#include "mshand/types.hpp"

#include <Eigen/Geometry>

#include <string_view>

namespace mshand {

struct JointDef {
  std::string name;
  int parent = -1;  // -1 for the root
  Vec3 rest_offset = Vec3::Zero();
  Vec3 limit_lo = Vec3::Constant(-3.14159265358979323846);
  Vec3 limit_hi = Vec3::Constant(3.14159265358979323846);
};

struct FingertipDef {
  int joint = -1;
  Vec3 offset = Vec3::Zero();
};

/// The hand joint hierarchy: 16 joints in topological order (joint 0 is the
/// wrist/root) plus 5 fingertip markers attached to distal finger joints.
struct KinematicTree {
  std::vector<JointDef> joints;
  std::array<FingertipDef, kNumFingertips> fingertips;

  int index_of(std::string_view name) const;
  /// True when `joint` equals `ancestor` or lies below it in the tree.
  bool is_ancestor_or_self(int ancestor, int joint) const;
};

/// Validates and assembles a tree. Errors: joint count != 16, self-parent
/// cycle, non-topological parent order, non-finite or zero-length offsets,
/// bad limits, missing/invalid fingertip mapping.
KinematicTree build_tree(std::vector<JointDef> joints,
                         std::array<FingertipDef, kNumFingertips> fingertips);

using Keypoints = std::array<Vec3, kNumKeypoints>;
using JointTransforms = std::array<Eigen::Isometry3d, kNumJoints>;

/// Rodrigues rotation for an axis-angle vector (angle = norm, radians).
Eigen::Matrix3d axis_angle_matrix(const Vec3& aa);

/// World transform per joint: parent transform * translate(rest_offset) *
/// rotate(axis_angle).
JointTransforms joint_world_transforms(const KinematicTree& tree, const Pose& pose);

/// 21 keypoints in meters: joint origins 0..15 followed by the 5 fingertips
/// transformed by their distal joint frames.
Keypoints forward_kinematics(const KinematicTree& tree, const Pose& pose);

/// n+1 poses linearly interpolated per component in axis-angle coordinates;
/// element 0 == a, element n == b. Intermediate poses are clamped to joint
/// limits when a tree is supplied. n must be >= 1.
std::vector<Pose> interpolate_poses(const Pose& a, const Pose& b, int n,
                                    const KinematicTree* tree = nullptr);

/// Fills velocities by finite differences: central differences at interior
/// samples, one-sided at the endpoints. Requires >= 2 uniformly spaced samples.
Trajectory finite_diff_velocity(const Trajectory& traj);

Pose clamp_to_limits(const KinematicTree& tree, const Pose& pose, bool* changed = nullptr);
bool within_limits(const KinematicTree& tree, const Pose& pose, double tol = 1e-9);

}  // namespace mshand
