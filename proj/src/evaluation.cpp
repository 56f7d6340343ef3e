#include "mshand/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace mshand {

namespace {

void check_pair(const std::vector<Keypoints>& pred, const std::vector<Keypoints>& gt,
                std::size_t min_frames) {
  if (pred.size() != gt.size())
    throw Error("trajectory length mismatch: " + std::to_string(pred.size()) +
                " vs " + std::to_string(gt.size()));
  if (pred.size() < min_frames)
    throw Error("need at least " + std::to_string(min_frames) + " frames, got " +
                std::to_string(pred.size()));
}

Keypoints wrist_relative(const Keypoints& kp) {
  Keypoints out;
  for (int k = 0; k < kNumKeypoints; ++k)
    out[static_cast<std::size_t>(k)] = kp[static_cast<std::size_t>(k)] - kp[0];
  return out;
}

}  // namespace

std::vector<Keypoints> trajectory_keypoints(const KinematicTree& tree,
                                            const Trajectory& traj) {
  std::vector<Keypoints> out;
  out.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples)
    out.push_back(forward_kinematics(tree, s.pose));
  return out;
}

double mpjpe_mm_keypoints(const std::vector<Keypoints>& pred,
                          const std::vector<Keypoints>& gt) {
  check_pair(pred, gt, 1);
  double sum = 0.0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const Keypoints a = wrist_relative(pred[f]);
    const Keypoints b = wrist_relative(gt[f]);
    for (int k = 0; k < kNumKeypoints; ++k)
      sum += (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]).norm();
  }
  return 1000.0 * sum / (static_cast<double>(pred.size()) * kNumKeypoints);
}

double auc_keypoints(const std::vector<Keypoints>& pred,
                     const std::vector<Keypoints>& gt, double t_max_mm) {
  check_pair(pred, gt, 1);
  if (!(t_max_mm > 0.0)) throw Error("auc threshold must be > 0");

  // The wrist keypoint is excluded: its wrist-relative error is identically
  // zero and would put a floor under every PCK value.
  std::vector<double> errors_mm;
  errors_mm.reserve(pred.size() * (kNumKeypoints - 1));
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const Keypoints a = wrist_relative(pred[f]);
    const Keypoints b = wrist_relative(gt[f]);
    for (int k = 1; k < kNumKeypoints; ++k)
      errors_mm.push_back(
          1000.0 *
          (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]).norm());
  }

  constexpr int kThresholds = 100;
  auto pck = [&](double t) {
    std::size_t hits = 0;
    for (double e : errors_mm)
      if (e <= t) ++hits;
    return static_cast<double>(hits) / static_cast<double>(errors_mm.size());
  };
  double integral = 0.0;
  double prev_t = 0.0, prev_p = pck(0.0);
  for (int i = 1; i < kThresholds; ++i) {
    const double t = t_max_mm * static_cast<double>(i) / (kThresholds - 1);
    const double p = pck(t);
    integral += 0.5 * (p + prev_p) * (t - prev_t);
    prev_t = t;
    prev_p = p;
  }
  return integral / t_max_mm;
}

double accel_error_keypoints(const std::vector<Keypoints>& pred,
                             const std::vector<Keypoints>& gt, double dt) {
  check_pair(pred, gt, 3);
  if (!(dt > 0.0)) throw Error("accel error needs dt > 0");

  std::vector<Keypoints> rp, rg;
  rp.reserve(pred.size());
  rg.reserve(gt.size());
  for (std::size_t f = 0; f < pred.size(); ++f) {
    rp.push_back(wrist_relative(pred[f]));
    rg.push_back(wrist_relative(gt[f]));
  }

  const double inv_dt2 = 1.0 / (dt * dt);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 1; f + 1 < rp.size(); ++f) {
    for (int k = 0; k < kNumKeypoints; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      const Vec3 ap = (rp[f + 1][kk] - 2.0 * rp[f][kk] + rp[f - 1][kk]) * inv_dt2;
      const Vec3 ag = (rg[f + 1][kk] - 2.0 * rg[f][kk] + rg[f - 1][kk]) * inv_dt2;
      sum += (ap - ag).norm();
      ++count;
    }
  }
  return 1000.0 * sum / static_cast<double>(count);
}

double mpjpe_mm(const KinematicTree& tree, const Trajectory& pred,
                const Trajectory& gt) {
  return mpjpe_mm_keypoints(trajectory_keypoints(tree, pred),
                            trajectory_keypoints(tree, gt));
}

double auc(const KinematicTree& tree, const Trajectory& pred, const Trajectory& gt,
           double t_max_mm) {
  return auc_keypoints(trajectory_keypoints(tree, pred),
                       trajectory_keypoints(tree, gt), t_max_mm);
}

double accel_error_mm_s2(const KinematicTree& tree, const Trajectory& pred,
                         const Trajectory& gt) {
  if (std::abs(pred.dt - gt.dt) > 1e-12)
    throw Error("accel error needs equal dt");
  return accel_error_keypoints(trajectory_keypoints(tree, pred),
                               trajectory_keypoints(tree, gt), pred.dt);
}

Trajectory temporal_smooth(const Trajectory& traj, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error("smoothing window must be odd and >= 1, got " + std::to_string(window));
  if (window == 1) return traj;

  // The least-squares center of a window (argmin of the summed squared
  // distances) is its mean, so this is a clipped moving average.
  Trajectory out = traj;
  const int n = static_cast<int>(traj.samples.size());
  const int half = window / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    Pose mean;
    for (int j = lo; j <= hi; ++j)
      for (int q = 0; q < kNumJoints; ++q)
        mean.r[static_cast<std::size_t>(q)] +=
            traj.samples[static_cast<std::size_t>(j)].pose.r[static_cast<std::size_t>(q)];
    const double inv = 1.0 / static_cast<double>(hi - lo + 1);
    for (int q = 0; q < kNumJoints; ++q) mean.r[static_cast<std::size_t>(q)] *= inv;
    out.samples[static_cast<std::size_t>(i)].pose = mean;
    out.samples[static_cast<std::size_t>(i)].vel.reset();
  }
  return out;
}

EvalReport evaluate(const KinematicTree& tree, const Trajectory& pred,
                    const Trajectory& gt, double auc_t_max_mm) {
  const std::vector<Keypoints> kp = trajectory_keypoints(tree, pred);
  const std::vector<Keypoints> kg = trajectory_keypoints(tree, gt);
  EvalReport rep;
  rep.frames = static_cast<int>(kp.size());
  rep.mpjpe_mm = mpjpe_mm_keypoints(kp, kg);
  rep.auc = auc_keypoints(kp, kg, auc_t_max_mm);
  if (kp.size() >= 3 && std::abs(pred.dt - gt.dt) <= 1e-12)
    rep.ae_mm_s2 = accel_error_keypoints(kp, kg, pred.dt);
  rep.per_frame_mpjpe_mm.reserve(kp.size());
  for (std::size_t f = 0; f < kp.size(); ++f)
    rep.per_frame_mpjpe_mm.push_back(mpjpe_mm_keypoints({kp[f]}, {kg[f]}));
  return rep;
}

}  // namespace mshand
