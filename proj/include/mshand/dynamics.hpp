#pragma once

#include "mshand/musculature.hpp"

namespace mshand {

struct SimState {
  Pose pose;
  Velocity velocity;
  std::vector<MuscleState> muscle_states;
  double time = 0.0;
  bool clamp_warning = false;  // last set_state received an out-of-limit pose
};

/// Reduced-coordinate integrator parameters: each joint axis is an independent
/// second-order system with diagonal inertia and viscous damping.
struct DynamicsParams {
  double dt = 0.01;        // control step, s
  double inertia = 1e-4;   // per-joint-axis rotational inertia, kg m^2
  double damping = 5e-3;   // viscous coefficient, N m s / rad
  int substeps = 4;        // integrator substeps per control step
  Vec3 gravity_torque = Vec3::Zero();  // constant torque added per non-wrist joint

  void validate() const;
};

struct PDGains {
  double kp = 2.0;  // N m / rad
  double kd = 0.1;  // N m s / rad
};

/// Component-wise tau = kp*(p_d - p) + kd*(v_d - v); the wrist row is zero.
JointTorques pd_torque(const Pose& p, const Velocity& v, const Pose& p_d,
                       const Velocity& v_d, const PDGains& g);

/// Fresh state at the given pose/velocity with zero-activation muscle states.
SimState make_state(const KinematicTree& tree, const Musculature& musc,
                    const Pose& pose, const Velocity& vel = Velocity{});

/// Overwrites pose/velocity (pose clamped to limits; clamp_warning set when
/// clamping changed it). Activations are preserved; fiber lengths are
/// recomputed from the new pose.
SimState set_state(SimState state, const KinematicTree& tree,
                   const Musculature& musc, const Pose& pose, const Velocity& vel);

/// One control step of semi-implicit Euler over `substeps` substeps:
/// tau = muscle + extra + gravity - damping*v, then v += tau/I*h, p += v*h,
/// with joint-limit clamping that zeroes velocity on the clamped axis.
SimState step(SimState state, const KinematicTree& tree, Musculature& musc,
              const Eigen::VectorXd& excitations, const DynamicsParams& params,
              const JointTorques* extra_torque = nullptr);

/// Applies step once per excitation vector; the returned trajectory has
/// length(sequence)+1 samples (the initial state included) at dt = params.dt.
Trajectory rollout(SimState state, const KinematicTree& tree, Musculature& musc,
                   const std::vector<Eigen::VectorXd>& excitation_sequence,
                   const DynamicsParams& params);

}  // namespace mshand
