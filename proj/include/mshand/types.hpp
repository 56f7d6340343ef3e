#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mshand {

using Vec3 = Eigen::Vector3d;

inline constexpr int kNumJoints = 16;
inline constexpr int kNumFingertips = 5;
inline constexpr int kNumKeypoints = kNumJoints + kNumFingertips;  // 21
inline constexpr int kPoseDim = 3 * kNumJoints;                    // 48

/// Thrown by every module on contract violations; the CLI maps it to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-joint axis-angle rotations in radians. Index 0 is the wrist/global
/// rotation; the flattened layout is joint-major (x,y,z per joint), 48 values.
struct Pose {
  std::array<Vec3, kNumJoints> r;

  Pose() {
    for (auto& v : r) v.setZero();
  }

  Eigen::VectorXd flat() const;
  static Pose from_flat(const Eigen::Ref<const Eigen::VectorXd>& f);
  bool is_finite() const;
};

/// Per-joint axis-angle rates in rad/s, same layout as Pose.
struct Velocity {
  std::array<Vec3, kNumJoints> r;

  Velocity() {
    for (auto& v : r) v.setZero();
  }

  Eigen::VectorXd flat() const;
  static Velocity from_flat(const Eigen::Ref<const Eigen::VectorXd>& f);
  bool is_finite() const;
};

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  std::optional<Velocity> vel;
};

/// Uniformly sampled pose sequence; timestamps are strictly increasing with
/// spacing dt.
struct Trajectory {
  double dt = 0.01;
  std::vector<TrajectorySample> samples;

  bool has_velocities() const;
  /// Throws if timestamps are not a uniform dt grid (1e-9 s tolerance).
  void check_uniform() const;
};

using JointTorques = std::array<Vec3, kNumJoints>;

inline JointTorques zero_torques() {
  JointTorques t;
  for (auto& v : t) v.setZero();
  return t;
}

/// Splitmix64-style mixer for deriving independent RNG streams from one seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mshand
