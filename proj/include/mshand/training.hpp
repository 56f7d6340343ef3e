#pragma once

#include "mshand/dynamics.hpp"
#include "mshand/neural.hpp"

#include <random>

namespace mshand {

struct RewardParams {
  double omega_tau = -2.0;  // must be negative: r = exp(omega_tau * |d tau|)
};

/// Desk-scale training configuration. Batch sizes and parallelism are scaled
/// down from the reference large-cluster setup; see the shipped config for the
/// original values.
struct TrainConfig {
  double idnet_lr = 3e-4;
  double refinenet_lr = 1e-3;
  int idnet_batch = 2048;       // transitions per policy update
  int refinenet_batch = 1024;
  int refinenet_iters = 4500;
  double ppo_clip = 0.2;
  double noise_deg = 0.1;       // training-time pose jitter, degrees
  std::uint64_t seed = 0;

  // plumbing
  int idnet_transitions = 49152;  // total sample budget
  double omega_tau = -2.0;        // reward sharpness, matched to the torque scale
  int ppo_epochs = 4;
  int ppo_minibatch = 256;
  double entropy_coef = 1e-3;
  double init_log_std = -1.0;
  int workers = 4;
  double corruption_deg = 3.0;  // refiner data-gen noise (stand-in estimator error)
  int traj_count = 16;
  int traj_len = 120;
  double holdout_frac = 0.2;

  void validate() const;
};

struct TransitionSample {
  Eigen::VectorXd input;       // idnet input, 192
  Eigen::VectorXd zeta;        // pre-sigmoid policy sample
  Eigen::VectorXd excitation;  // sigmoid(zeta)
  double reward = 0.0;
  double log_prob = 0.0;
};

struct TrainLogEntry {
  int update = 0;
  double value = 0.0;  // mean reward (idnet) or loss (refinenet)
  double wall_time_s = 0.0;
};

using TrainLog = std::vector<TrainLogEntry>;

/// Smooth random reaching motions: minimum-jerk interpolation through 3-6
/// random in-limit waypoints at dt = 0.01, velocities filled analytically from
/// the minimum-jerk derivative (exactly zero at the waypoints). The wrist is
/// kept at identity. Deterministic given the seed.
std::vector<Trajectory> gen_trajectories(const KinematicTree& tree, int count,
                                         int length, std::uint64_t seed);

/// Adds i.i.d. Gaussian noise of std sigma_deg (degrees) to every non-wrist
/// component, clamped to joint limits.
Pose perturb_pose(const KinematicTree& tree, const Pose& p, double sigma_deg,
                  std::mt19937_64& rng);

/// r = exp(omega_tau * ||tau_pd - tau_m||_2) over non-wrist components;
/// lies in (0,1] for negative omega_tau.
double torque_reward(const JointTorques& tau_pd, const JointTorques& tau_m,
                     const RewardParams& rp = RewardParams{});

/// Clipped PPO importance ratio, guaranteed inside [1-clip, 1+clip].
double ppo_clipped_ratio(double logp_new, double logp_old, double clip);

struct IDNetTrainResult {
  IDNet net;
  TrainLog log;  // one entry per update: mean sampled reward
};

/// PPO-style trainer over one-step episodes: sample consecutive frame pairs
/// (with pose jitter), compute the muscle torque produced by a sampled
/// excitation and the PD supervision torque for the transition, reward their
/// agreement, and ascend the clipped surrogate with an entropy bonus and a
/// running-mean baseline. Deterministic for a fixed seed (any worker count).
IDNetTrainResult train_idnet(const KinematicTree& tree, const Musculature& musc,
                             const DynamicsParams& params, const PDGains& gains,
                             const std::vector<Trajectory>& trajectories,
                             const TrainConfig& cfg);

struct RefineTrainResult {
  RefineNet net;
  TrainLog log;
  double initial_holdout_loss = 0.0;
  double final_holdout_loss = 0.0;
};

/// Estimator-error stand-in: per-frame Gaussian joint noise, velocities
/// refilled by finite differences.
Trajectory corrupt_trajectory(const KinematicTree& tree, const Trajectory& gt,
                              double sigma_deg, std::uint64_t seed);

/// Supervised refiner training: corrupt ground-truth poses with Gaussian noise
/// to emulate estimator error, produce reference poses with one simulate step
/// per frame driven by the trained inverse-dynamics net, then regress the
/// residual toward ground truth with mini-batch Adam.
RefineTrainResult train_refinenet(const KinematicTree& tree, const Musculature& musc,
                                  const DynamicsParams& params, const IDNet& idnet,
                                  const std::vector<Trajectory>& trajectories,
                                  const TrainConfig& cfg);

}  // namespace mshand
