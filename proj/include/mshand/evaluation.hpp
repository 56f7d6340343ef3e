#pragma once

#include "mshand/kinematics.hpp"

namespace mshand {

/// FK keypoints for every frame of a trajectory (raw, not wrist-aligned).
std::vector<Keypoints> trajectory_keypoints(const KinematicTree& tree,
                                            const Trajectory& traj);

// Keypoint-space cores. All three align each frame to its own wrist keypoint
// before comparing.

double mpjpe_mm_keypoints(const std::vector<Keypoints>& pred,
                          const std::vector<Keypoints>& gt);
double auc_keypoints(const std::vector<Keypoints>& pred,
                     const std::vector<Keypoints>& gt, double t_max_mm);
double accel_error_keypoints(const std::vector<Keypoints>& pred,
                             const std::vector<Keypoints>& gt, double dt);

/// Mean wrist-relative joint position error over 21 keypoints and all frames,
/// in millimeters.
double mpjpe_mm(const KinematicTree& tree, const Trajectory& pred,
                const Trajectory& gt);

/// Area under the PCK-vs-threshold curve for thresholds in [0, t_max_mm]
/// (100 uniform thresholds, trapezoidal rule, normalized to [0,1]).
double auc(const KinematicTree& tree, const Trajectory& pred, const Trajectory& gt,
           double t_max_mm = 50.0);

/// Mean norm of the difference between second central differences of
/// wrist-relative keypoints, mm/s^2. Requires >= 3 frames and equal dt.
double accel_error_mm_s2(const KinematicTree& tree, const Trajectory& pred,
                         const Trajectory& gt);

/// Window-mean pose smoothing (the least-squares center of each window);
/// window must be odd. Windows are clipped at the trajectory bounds.
/// d == 1 returns the input unchanged; otherwise velocities are dropped.
Trajectory temporal_smooth(const Trajectory& traj, int window);

struct EvalReport {
  double mpjpe_mm = 0.0;
  double auc = 0.0;
  double ae_mm_s2 = 0.0;
  int frames = 0;
  std::vector<double> per_frame_mpjpe_mm;
};

EvalReport evaluate(const KinematicTree& tree, const Trajectory& pred,
                    const Trajectory& gt, double auc_t_max_mm = 50.0);

}  // namespace mshand
