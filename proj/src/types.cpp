#include "mshand/types.hpp"

#include <cmath>

namespace mshand {

Eigen::VectorXd Pose::flat() const {
  Eigen::VectorXd f(kPoseDim);
  for (int j = 0; j < kNumJoints; ++j) f.segment<3>(3 * j) = r[j];
  return f;
}

Pose Pose::from_flat(const Eigen::Ref<const Eigen::VectorXd>& f) {
  if (f.size() != kPoseDim)
    throw Error("pose must have " + std::to_string(kPoseDim) + " components, got " +
                std::to_string(f.size()));
  Pose p;
  for (int j = 0; j < kNumJoints; ++j) p.r[j] = f.segment<3>(3 * j);
  return p;
}

bool Pose::is_finite() const {
  for (const auto& v : r)
    if (!v.allFinite()) return false;
  return true;
}

Eigen::VectorXd Velocity::flat() const {
  Eigen::VectorXd f(kPoseDim);
  for (int j = 0; j < kNumJoints; ++j) f.segment<3>(3 * j) = r[j];
  return f;
}

Velocity Velocity::from_flat(const Eigen::Ref<const Eigen::VectorXd>& f) {
  if (f.size() != kPoseDim)
    throw Error("velocity must have " + std::to_string(kPoseDim) +
                " components, got " + std::to_string(f.size()));
  Velocity v;
  for (int j = 0; j < kNumJoints; ++j) v.r[j] = f.segment<3>(3 * j);
  return v;
}

bool Velocity::is_finite() const {
  for (const auto& v : r)
    if (!v.allFinite()) return false;
  return true;
}

bool Trajectory::has_velocities() const {
  for (const auto& s : samples)
    if (!s.vel) return false;
  return !samples.empty();
}

void Trajectory::check_uniform() const {
  constexpr double tol = 1e-9;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double spacing = samples[i].t - samples[i - 1].t;
    if (std::abs(spacing - dt) > tol)
      throw Error("non-uniform spacing at sample " + std::to_string(i) + ": " +
                  std::to_string(spacing) + " vs dt " + std::to_string(dt));
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

}  // namespace mshand
