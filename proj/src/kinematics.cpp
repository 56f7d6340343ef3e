#include "mshand/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mshand {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_limits(const JointDef& j, int idx) {
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(j.limit_lo[a]) || !std::isfinite(j.limit_hi[a]))
      throw Error("non-finite limits on joint " + std::to_string(idx));
    if (j.limit_lo[a] > j.limit_hi[a])
      throw Error("limits min > max on joint " + std::to_string(idx) + " axis " +
                  std::to_string(a));
    if (j.limit_lo[a] < -kPi - 1e-12 || j.limit_hi[a] > kPi + 1e-12)
      throw Error("limit range outside [-pi, pi] on joint " + std::to_string(idx));
  }
}

}  // namespace

int KinematicTree::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == name) return static_cast<int>(i);
  return -1;
}

bool KinematicTree::is_ancestor_or_self(int ancestor, int joint) const {
  int j = joint;
  while (j >= 0) {
    if (j == ancestor) return true;
    j = joints[static_cast<std::size_t>(j)].parent;
  }
  return false;
}

KinematicTree build_tree(std::vector<JointDef> joints,
                         std::array<FingertipDef, kNumFingertips> fingertips) {
  if (static_cast<int>(joints.size()) != kNumJoints)
    throw Error("joint count must be " + std::to_string(kNumJoints) + ", got " +
                std::to_string(joints.size()));
  for (int i = 0; i < kNumJoints; ++i) {
    const JointDef& j = joints[static_cast<std::size_t>(i)];
    if (i == 0) {
      if (j.parent != -1) throw Error("joint 0 must be the root (parent -1)");
    } else {
      if (j.parent == i) throw Error("self-parent cycle at joint " + std::to_string(i));
      if (j.parent < 0 || j.parent >= i)
        throw Error("parent index of joint " + std::to_string(i) +
                    " must precede it in topological order");
    }
    if (!j.rest_offset.allFinite())
      throw Error("non-finite rest offset on joint " + std::to_string(i));
    if (i > 0 && j.rest_offset.norm() == 0.0)
      throw Error("zero-length rest offset on non-root joint " + std::to_string(i));
    validate_limits(j, i);
  }
  for (int f = 0; f < kNumFingertips; ++f) {
    const FingertipDef& ft = fingertips[static_cast<std::size_t>(f)];
    if (ft.joint < 0 || ft.joint >= kNumJoints)
      throw Error("missing fingertip mapping for fingertip " + std::to_string(f));
    if (!ft.offset.allFinite())
      throw Error("non-finite fingertip offset " + std::to_string(f));
  }
  KinematicTree tree;
  tree.joints = std::move(joints);
  tree.fingertips = fingertips;
  return tree;
}

Eigen::Matrix3d axis_angle_matrix(const Vec3& aa) {
  const double angle = aa.norm();
  if (angle < 1e-14) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
}

JointTransforms joint_world_transforms(const KinematicTree& tree, const Pose& pose) {
  JointTransforms world;
  for (int j = 0; j < kNumJoints; ++j) {
    const JointDef& def = tree.joints[static_cast<std::size_t>(j)];
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.translate(def.rest_offset);
    local.rotate(axis_angle_matrix(pose.r[static_cast<std::size_t>(j)]));
    world[static_cast<std::size_t>(j)] =
        (j == 0) ? local : world[static_cast<std::size_t>(def.parent)] * local;
  }
  return world;
}

Keypoints forward_kinematics(const KinematicTree& tree, const Pose& pose) {
  const JointTransforms world = joint_world_transforms(tree, pose);
  Keypoints kp;
  for (int j = 0; j < kNumJoints; ++j)
    kp[static_cast<std::size_t>(j)] = world[static_cast<std::size_t>(j)].translation();
  for (int f = 0; f < kNumFingertips; ++f) {
    const FingertipDef& ft = tree.fingertips[static_cast<std::size_t>(f)];
    kp[static_cast<std::size_t>(kNumJoints + f)] =
        world[static_cast<std::size_t>(ft.joint)] * ft.offset;
  }
  return kp;
}

std::vector<Pose> interpolate_poses(const Pose& a, const Pose& b, int n,
                                    const KinematicTree* tree) {
  if (n < 1) throw Error("interpolation count must be >= 1");
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    Pose p;
    for (int j = 0; j < kNumJoints; ++j)
      p.r[static_cast<std::size_t>(j)] =
          a.r[static_cast<std::size_t>(j)] +
          s * (b.r[static_cast<std::size_t>(j)] - a.r[static_cast<std::size_t>(j)]);
    if (tree && k > 0 && k < n) p = clamp_to_limits(*tree, p);
    out.push_back(p);
  }
  // exact endpoints
  out.front() = a;
  out.back() = b;
  return out;
}

Trajectory finite_diff_velocity(const Trajectory& traj) {
  if (traj.samples.size() < 2)
    throw Error("finite differences need at least 2 samples, got " +
                std::to_string(traj.samples.size()));
  traj.check_uniform();
  Trajectory out = traj;
  const double dt = traj.dt;
  const int n = static_cast<int>(traj.samples.size());
  auto diff = [&](int hi, int lo, double denom) {
    Velocity v;
    for (int j = 0; j < kNumJoints; ++j)
      v.r[static_cast<std::size_t>(j)] =
          (traj.samples[static_cast<std::size_t>(hi)].pose.r[static_cast<std::size_t>(j)] -
           traj.samples[static_cast<std::size_t>(lo)].pose.r[static_cast<std::size_t>(j)]) /
          denom;
    return v;
  };
  out.samples[0].vel = diff(1, 0, dt);
  for (int i = 1; i < n - 1; ++i)
    out.samples[static_cast<std::size_t>(i)].vel = diff(i + 1, i - 1, 2.0 * dt);
  out.samples[static_cast<std::size_t>(n - 1)].vel = diff(n - 1, n - 2, dt);
  return out;
}

Pose clamp_to_limits(const KinematicTree& tree, const Pose& pose, bool* changed) {
  Pose out = pose;
  bool any = false;
  for (int j = 0; j < kNumJoints; ++j) {
    const JointDef& def = tree.joints[static_cast<std::size_t>(j)];
    for (int a = 0; a < 3; ++a) {
      const double c = std::clamp(out.r[static_cast<std::size_t>(j)][a],
                                  def.limit_lo[a], def.limit_hi[a]);
      if (c != out.r[static_cast<std::size_t>(j)][a]) any = true;
      out.r[static_cast<std::size_t>(j)][a] = c;
    }
  }
  if (changed) *changed = any;
  return out;
}

bool within_limits(const KinematicTree& tree, const Pose& pose, double tol) {
  for (int j = 0; j < kNumJoints; ++j) {
    const JointDef& def = tree.joints[static_cast<std::size_t>(j)];
    for (int a = 0; a < 3; ++a) {
      const double x = pose.r[static_cast<std::size_t>(j)][a];
      if (x < def.limit_lo[a] - tol || x > def.limit_hi[a] + tol) return false;
    }
  }
  return true;
}

}  // namespace mshand
