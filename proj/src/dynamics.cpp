#include "mshand/dynamics.hpp"

#include <cmath>

namespace mshand {

void DynamicsParams::validate() const {
  if (!(dt > 0.0)) throw Error("dynamics dt must be > 0");
  if (!(inertia > 0.0)) throw Error("dynamics inertia must be > 0");
  if (damping < 0.0) throw Error("dynamics damping must be >= 0");
  if (substeps < 1) throw Error("dynamics substeps must be >= 1");
  if (!gravity_torque.allFinite()) throw Error("non-finite gravity torque");
}

JointTorques pd_torque(const Pose& p, const Velocity& v, const Pose& p_d,
                       const Velocity& v_d, const PDGains& g) {
  if (!(g.kp > 0.0)) throw Error("pd kp must be > 0");
  if (g.kd < 0.0) throw Error("pd kd must be >= 0");
  JointTorques tau = zero_torques();
  for (std::size_t j = 1; j < kNumJoints; ++j)
    tau[j] = g.kp * (p_d.r[j] - p.r[j]) + g.kd * (v_d.r[j] - v.r[j]);
  return tau;
}

SimState make_state(const KinematicTree& tree, const Musculature& musc,
                    const Pose& pose, const Velocity& vel) {
  SimState s;
  s.muscle_states = initial_muscle_states(tree, Pose{}, musc.muscles);
  return set_state(std::move(s), tree, musc, pose, vel);
}

SimState set_state(SimState state, const KinematicTree& tree,
                   const Musculature& musc, const Pose& pose, const Velocity& vel) {
  if (!pose.is_finite() || !vel.is_finite())
    throw Error("set_state: non-finite pose or velocity");
  bool changed = false;
  state.pose = clamp_to_limits(tree, pose, &changed);
  state.clamp_warning = changed;
  state.velocity = vel;

  // Activations persist; fiber lengths follow the injected pose.
  const JointTransforms transforms = joint_world_transforms(tree, state.pose);
  if (state.muscle_states.size() != musc.muscles.size())
    throw Error("set_state: muscle state count mismatch");
  for (std::size_t i = 0; i < musc.muscles.size(); ++i) {
    const PathGeometry geom = muscle_path_geometry(tree, transforms, musc.muscles[i]);
    state.muscle_states[i].fiber_length =
        fiber_length_from_path(musc.muscles[i], geom.total_length);
  }
  return state;
}

SimState step(SimState state, const KinematicTree& tree, Musculature& musc,
              const Eigen::VectorXd& excitations, const DynamicsParams& params,
              const JointTorques* extra_torque) {
  params.validate();
  if (state.muscle_states.size() != musc.muscles.size())
    throw Error("step: muscle state count mismatch");
  musc.states = state.muscle_states;

  const double h = params.dt / params.substeps;
  for (int sub = 0; sub < params.substeps; ++sub) {
    JointTorques tau = muscle_torques(tree, state.pose, musc, excitations, h);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      if (extra_torque) tau[j] += (*extra_torque)[j];
      if (j > 0) tau[j] += params.gravity_torque;
      tau[j] -= params.damping * state.velocity.r[j];
      if (!tau[j].allFinite())
        throw Error("non-finite torque on joint " + std::to_string(j) +
                    " (unstable gains or parameters)");
    }
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const JointDef& def = tree.joints[j];
      for (int a = 0; a < 3; ++a) {
        double vel = state.velocity.r[j][a] + tau[j][a] / params.inertia * h;
        double pos = state.pose.r[j][a] + vel * h;
        if (pos < def.limit_lo[a]) {
          pos = def.limit_lo[a];
          vel = 0.0;
        } else if (pos > def.limit_hi[a]) {
          pos = def.limit_hi[a];
          vel = 0.0;
        }
        state.velocity.r[j][a] = vel;
        state.pose.r[j][a] = pos;
      }
    }
  }
  state.muscle_states = musc.states;
  state.time += params.dt;
  return state;
}

Trajectory rollout(SimState state, const KinematicTree& tree, Musculature& musc,
                   const std::vector<Eigen::VectorXd>& excitation_sequence,
                   const DynamicsParams& params) {
  if (excitation_sequence.empty()) throw Error("rollout: empty excitation sequence");
  Trajectory traj;
  traj.dt = params.dt;
  traj.samples.reserve(excitation_sequence.size() + 1);
  traj.samples.push_back({state.time, state.pose, state.velocity});
  for (const Eigen::VectorXd& exc : excitation_sequence) {
    state = step(std::move(state), tree, musc, exc, params);
    traj.samples.push_back({state.time, state.pose, state.velocity});
  }
  return traj;
}

}  // namespace mshand
