#include "mshand/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

namespace mshand {

namespace {

constexpr std::uint64_t kTagWaypoints = 0x77617970u;
constexpr std::uint64_t kTagSample = 0x73616d70u;
constexpr std::uint64_t kTagShuffle = 0x73687566u;
constexpr std::uint64_t kTagCorrupt = 0x636f7272u;
constexpr std::uint64_t kTagRefBatch = 0x72656662u;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5*log(2*pi)

double minjerk(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double minjerk_rate(double u) {
  const double w = u * (1.0 - u);
  return 30.0 * w * w;
}

void run_partitioned(int n_items, int workers, const std::function<void(int)>& fn) {
  workers = std::clamp(workers, 1, n_items > 0 ? n_items : 1);
  if (workers == 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n_items) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n_items) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

Eigen::VectorXd stable_sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

double gaussian_log_prob(const Eigen::VectorXd& zeta, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& sigma) {
  const Eigen::ArrayXd z = (zeta - mean).array() / sigma.array();
  return -0.5 * z.square().sum() - sigma.array().log().sum() -
         kHalfLog2Pi * static_cast<double>(zeta.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(idnet_lr > 0.0 && idnet_lr < 1.0)) throw Error("idnet_lr must be in (0,1)");
  if (!(refinenet_lr > 0.0 && refinenet_lr < 1.0))
    throw Error("refinenet_lr must be in (0,1)");
  if (idnet_batch < 1 || refinenet_batch < 1) throw Error("batch sizes must be >= 1");
  if (refinenet_iters < 1) throw Error("refinenet_iters must be >= 1");
  if (!(ppo_clip > 0.0 && ppo_clip < 1.0)) throw Error("ppo_clip must be in (0,1)");
  if (noise_deg < 0.0) throw Error("noise_deg must be >= 0");
  if (idnet_transitions < 1) throw Error("idnet_transitions must be >= 1");
  if (!(omega_tau < 0.0)) throw Error("omega_tau must be negative");
  if (ppo_epochs < 1 || ppo_minibatch < 1) throw Error("ppo loop sizes must be >= 1");
  if (workers < 1) throw Error("workers must be >= 1");
  if (corruption_deg < 0.0) throw Error("corruption_deg must be >= 0");
  if (traj_count < 1 || traj_len < 1) throw Error("trajectory sizes must be >= 1");
  if (!(holdout_frac >= 0.0 && holdout_frac < 1.0))
    throw Error("holdout_frac must be in [0,1)");
}

std::vector<Trajectory> gen_trajectories(const KinematicTree& tree, int count,
                                         int length, std::uint64_t seed) {
  if (count < 1 || length < 1) throw Error("gen_trajectories needs count, length >= 1");
  constexpr double dt = 0.01;

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int ti = 0; ti < count; ++ti) {
    std::mt19937_64 rng(derive_seed(seed, kTagWaypoints, static_cast<std::uint64_t>(ti)));
    std::uniform_int_distribution<int> n_way_dist(3, 6);
    const int n_way = n_way_dist(rng);

    // random in-limit waypoints; the wrist stays at identity
    std::vector<Pose> waypoints(static_cast<std::size_t>(n_way));
    for (Pose& wp : waypoints) {
      for (int j = 1; j < kNumJoints; ++j) {
        const JointDef& def = tree.joints[static_cast<std::size_t>(j)];
        for (int a = 0; a < 3; ++a) {
          std::uniform_real_distribution<double> dist(def.limit_lo[a], def.limit_hi[a]);
          wp.r[static_cast<std::size_t>(j)][a] = dist(rng);
        }
      }
    }

    Trajectory traj;
    traj.dt = dt;
    traj.samples.resize(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
      TrajectorySample& s = traj.samples[static_cast<std::size_t>(i)];
      s.t = dt * i;
      if (length == 1) {
        s.pose = waypoints[0];
        s.vel = Velocity{};
        continue;
      }
      const double global = static_cast<double>(i) / (length - 1) * (n_way - 1);
      const int k = std::min(static_cast<int>(global), n_way - 2);
      const double u = global - k;
      const double shape = minjerk(u);
      const double rate = minjerk_rate(u) * (n_way - 1) / ((length - 1) * dt);
      Velocity vel;
      for (int j = 0; j < kNumJoints; ++j) {
        const Vec3 d = waypoints[static_cast<std::size_t>(k + 1)].r[static_cast<std::size_t>(j)] -
                       waypoints[static_cast<std::size_t>(k)].r[static_cast<std::size_t>(j)];
        s.pose.r[static_cast<std::size_t>(j)] =
            waypoints[static_cast<std::size_t>(k)].r[static_cast<std::size_t>(j)] + shape * d;
        vel.r[static_cast<std::size_t>(j)] = rate * d;
      }
      s.vel = vel;
    }
    out.push_back(std::move(traj));
  }
  return out;
}

Pose perturb_pose(const KinematicTree& tree, const Pose& p, double sigma_deg,
                  std::mt19937_64& rng) {
  if (sigma_deg < 0.0) throw Error("perturb_pose sigma must be >= 0");
  if (sigma_deg == 0.0) return p;
  std::normal_distribution<double> noise(0.0, sigma_deg * kDegToRad);
  Pose out = p;
  for (int j = 1; j < kNumJoints; ++j)
    for (int a = 0; a < 3; ++a) out.r[static_cast<std::size_t>(j)][a] += noise(rng);
  return clamp_to_limits(tree, out);
}

double torque_reward(const JointTorques& tau_pd, const JointTorques& tau_m,
                     const RewardParams& rp) {
  if (!(rp.omega_tau < 0.0)) throw Error("omega_tau must be negative");
  double sq = 0.0;
  for (std::size_t j = 1; j < kNumJoints; ++j)
    sq += (tau_pd[j] - tau_m[j]).squaredNorm();
  return std::exp(rp.omega_tau * std::sqrt(sq));
}

double ppo_clipped_ratio(double logp_new, double logp_old, double clip) {
  return std::clamp(std::exp(logp_new - logp_old), 1.0 - clip, 1.0 + clip);
}

IDNetTrainResult train_idnet(const KinematicTree& tree, const Musculature& musc,
                             const DynamicsParams& params, const PDGains& gains,
                             const std::vector<Trajectory>& trajectories,
                             const TrainConfig& cfg) {
  cfg.validate();
  params.validate();
  validate_musculature(tree, musc);
  if (trajectories.empty()) throw Error("train_idnet: empty trajectory list");
  std::vector<Trajectory> trajs = trajectories;
  for (Trajectory& t : trajs) {
    if (t.samples.size() < 2)
      throw Error("train_idnet: trajectories need at least 2 samples");
    if (!t.has_velocities()) t = finite_diff_velocity(t);
  }

  const int n_muscle = static_cast<int>(musc.muscles.size());
  IDNet net = make_idnet(n_muscle, cfg.seed);
  net.log_std.setConstant(cfg.init_log_std);

  const int batch = cfg.idnet_batch;
  const int n_updates = std::max(1, cfg.idnet_transitions / batch);
  const RewardParams reward_params{cfg.omega_tau};

  MLPAdam mlp_adam;
  AdamState<Eigen::VectorXd> log_std_adam;
  int log_std_t = 0;

  TrainLog log;
  log.reserve(static_cast<std::size_t>(n_updates));
  const auto start = std::chrono::steady_clock::now();

  std::vector<TransitionSample> samples(static_cast<std::size_t>(batch));
  std::vector<Musculature> worker_musc(static_cast<std::size_t>(std::max(1, cfg.workers)),
                                       musc);

  double baseline = 0.0;
  for (int update = 0; update < n_updates; ++update) {
    // --- collect one on-policy batch; per-slot RNG keeps the result
    // independent of the worker count ---
    std::atomic<int> next_worker{0};
    const Eigen::VectorXd sigma =
        net.log_std.array().min(0.0).max(-5.0).exp().matrix();
    auto collect = [&](int slot) {
      thread_local int wid = -1;
      if (wid < 0) wid = next_worker.fetch_add(1) % static_cast<int>(worker_musc.size());
      Musculature& wm = worker_musc[static_cast<std::size_t>(wid)];

      std::mt19937_64 rng(derive_seed(
          cfg.seed, kTagSample,
          static_cast<std::uint64_t>(update) * static_cast<std::uint64_t>(batch) +
              static_cast<std::uint64_t>(slot)));
      std::uniform_int_distribution<std::size_t> traj_dist(0, trajs.size() - 1);
      const Trajectory& tr = trajs[traj_dist(rng)];
      std::uniform_int_distribution<std::size_t> frame_dist(0, tr.samples.size() - 2);
      const std::size_t i = frame_dist(rng);

      const Pose p_i = perturb_pose(tree, tr.samples[i].pose, cfg.noise_deg, rng);
      const Pose p_n = perturb_pose(tree, tr.samples[i + 1].pose, cfg.noise_deg, rng);
      const Velocity& v_i = *tr.samples[i].vel;
      const Velocity& v_n = *tr.samples[i + 1].vel;

      TransitionSample& s = samples[static_cast<std::size_t>(slot)];
      s.input = idnet_input(p_i, v_i, p_n, v_n);

      const MLPCache cache = mlp_forward_cached(net.mlp, s.input);
      const Eigen::VectorXd mean = preoutput(cache);
      std::normal_distribution<double> unit(0.0, 1.0);
      Eigen::VectorXd z(n_muscle);
      for (int k = 0; k < n_muscle; ++k) z[k] = unit(rng);
      s.zeta = mean + sigma.cwiseProduct(z);
      s.excitation = stable_sigmoid(s.zeta);
      s.log_prob = gaussian_log_prob(s.zeta, mean, sigma);

      // torque produced by the sampled excitation over one control step,
      // from a fresh zero-activation state at the start pose
      wm.states = initial_muscle_states(tree, p_i, wm.muscles);
      const JointTorques tau_m = muscle_torques(tree, p_i, wm, s.excitation, params.dt);
      const JointTorques tau_pd = pd_torque(p_i, v_i, p_n, v_n, gains);
      s.reward = torque_reward(tau_pd, tau_m, reward_params);
    };
    run_partitioned(batch, cfg.workers, collect);

    double mean_reward = 0.0;
    for (const TransitionSample& s : samples) mean_reward += s.reward;
    mean_reward /= batch;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.push_back({update, mean_reward, wall});

    if (update == 0) baseline = mean_reward;
    Eigen::VectorXd adv(batch);
    for (int s = 0; s < batch; ++s) adv[s] = samples[static_cast<std::size_t>(s)].reward - baseline;
    const double adv_mean = adv.mean();
    const double adv_std =
        std::sqrt((adv.array() - adv_mean).square().sum() / std::max(1, batch - 1));
    adv = (adv.array() - adv_mean) / (adv_std + 1e-8);
    baseline = 0.9 * baseline + 0.1 * mean_reward;

    // --- clipped-surrogate updates over shuffled minibatches ---
    for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
      std::vector<int> order(static_cast<std::size_t>(batch));
      for (int s = 0; s < batch; ++s) order[static_cast<std::size_t>(s)] = s;
      std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, kTagShuffle,
                                              static_cast<std::uint64_t>(update) * 97 +
                                                  static_cast<std::uint64_t>(epoch)));
      std::shuffle(order.begin(), order.end(), shuffle_rng);

      for (int mb_start = 0; mb_start < batch; mb_start += cfg.ppo_minibatch) {
        const int m = std::min(cfg.ppo_minibatch, batch - mb_start);
        Eigen::MatrixXd X(kIDNetInputDim, m);
        for (int c = 0; c < m; ++c)
          X.col(c) = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(mb_start + c)])].input;

        const MLPCache cache = mlp_forward_cached(net.mlp, X);
        const Eigen::MatrixXd& mean = preoutput(cache);
        const Eigen::VectorXd sig =
            net.log_std.array().min(0.0).max(-5.0).exp().matrix();

        Eigen::MatrixXd d_mean = Eigen::MatrixXd::Zero(n_muscle, m);
        Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(n_muscle);
        double loss = 0.0;
        for (int c = 0; c < m; ++c) {
          const TransitionSample& s =
              samples[static_cast<std::size_t>(order[static_cast<std::size_t>(mb_start + c)])];
          const double a = adv[order[static_cast<std::size_t>(mb_start + c)]];
          const Eigen::ArrayXd zn = (s.zeta - mean.col(c)).array() / sig.array();
          const double logp_new = -0.5 * zn.square().sum() -
                                  sig.array().log().sum() - kHalfLog2Pi * n_muscle;
          const double ratio = std::exp(logp_new - s.log_prob);
          const double clipped = std::clamp(ratio, 1.0 - cfg.ppo_clip, 1.0 + cfg.ppo_clip);
          const double surr = std::min(ratio * a, clipped * a);
          loss -= surr / m;
          if (ratio * a <= clipped * a) {
            // gradient flows through the unclipped branch
            const double coef = -a * ratio / m;
            d_mean.col(c) = coef * (zn / sig.array()).matrix();
            d_log_std += coef * (zn.square() - 1.0).matrix();
          }
        }
        // entropy bonus (maximized): d(-coef*entropy)/dlog_std = -coef
        d_log_std.array() -= cfg.entropy_coef;
        loss -= cfg.entropy_coef *
                (net.log_std.array().min(0.0).max(-5.0).sum() +
                 (0.5 + kHalfLog2Pi) * n_muscle);
        if (!std::isfinite(loss))
          throw Error("train_idnet diverged: non-finite loss at update " +
                      std::to_string(update));

        const MLPGradients grads = mlp_backward_preoutput(net.mlp, cache, d_mean);
        mlp_adam.update(net.mlp, grads, cfg.idnet_lr);
        ++log_std_t;
        log_std_adam.update(net.log_std, d_log_std, cfg.idnet_lr, log_std_t);
        net.log_std = net.log_std.array().min(0.0).max(-5.0).matrix();
      }
    }
    net.mlp.validate();
  }

  return {std::move(net), std::move(log)};
}

Trajectory corrupt_trajectory(const KinematicTree& tree, const Trajectory& gt,
                              double sigma_deg, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, kTagCorrupt));
  Trajectory out = gt;
  for (TrajectorySample& s : out.samples) {
    s.pose = perturb_pose(tree, s.pose, sigma_deg, rng);
    s.vel.reset();
  }
  if (out.samples.size() >= 2) out = finite_diff_velocity(out);
  return out;
}

RefineTrainResult train_refinenet(const KinematicTree& tree, const Musculature& musc,
                                  const DynamicsParams& params, const IDNet& idnet,
                                  const std::vector<Trajectory>& trajectories,
                                  const TrainConfig& cfg) {
  cfg.validate();
  params.validate();
  validate_musculature(tree, musc);
  if (trajectories.empty()) throw Error("train_refinenet: empty trajectory list");
  if (idnet.n_muscle() != static_cast<int>(musc.muscles.size()))
    throw Error("train_refinenet: idnet output does not match muscle count");

  // Build (input, predicted, target) rows: corrupted poses stand in for
  // estimator output, reference poses come from one simulate step per frame.
  struct Row {
    Eigen::VectorXd x;
    Eigen::VectorXd pred;
    Eigen::VectorXd target;
  };
  std::vector<Row> train_rows, holdout_rows;
  const std::size_t n_holdout = std::min(
      trajectories.size() - 1,
      static_cast<std::size_t>(std::lround(cfg.holdout_frac * trajectories.size())));

  Musculature sim_musc = musc;
  for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
    const Trajectory& gt = trajectories[ti];
    if (gt.samples.size() < 2)
      throw Error("train_refinenet: trajectories need at least 2 samples");
    const Trajectory pred = corrupt_trajectory(
        tree, gt, cfg.corruption_deg, derive_seed(cfg.seed, kTagCorrupt, ti));

    SimState state = make_state(tree, sim_musc, pred.samples[0].pose,
                                *pred.samples[0].vel);
    const bool holdout = ti + n_holdout >= trajectories.size();
    for (std::size_t i = 0; i + 1 < pred.samples.size(); ++i) {
      const Eigen::VectorXd exc =
          idnet_infer(idnet, pred.samples[i].pose, *pred.samples[i].vel,
                      pred.samples[i + 1].pose, *pred.samples[i + 1].vel);
      state = set_state(std::move(state), tree, sim_musc, pred.samples[i].pose,
                        *pred.samples[i].vel);
      state = step(std::move(state), tree, sim_musc, exc, params);

      Row row;
      row.pred = pred.samples[i + 1].pose.flat();
      row.x.resize(kRefineNetInputDim);
      row.x.head(kPoseDim) = row.pred;
      row.x.tail(kPoseDim - 3) = state.pose.flat().tail(kPoseDim - 3);
      row.target = gt.samples[i + 1].pose.flat();
      (holdout ? holdout_rows : train_rows).push_back(std::move(row));
    }
  }
  if (train_rows.empty()) throw Error("train_refinenet: no training rows");

  RefineNet net = make_refinenet(cfg.seed);

  auto holdout_loss = [&]() {
    if (holdout_rows.empty()) return 0.0;
    double sum = 0.0;
    for (const Row& r : holdout_rows) {
      const Eigen::VectorXd refined = r.pred + mlp_forward(net.mlp, r.x);
      sum += (refined - r.target).squaredNorm();
    }
    return sum / (static_cast<double>(holdout_rows.size()) * kPoseDim);
  };

  RefineTrainResult result;
  result.initial_holdout_loss = holdout_loss();

  MLPAdam adam;
  std::mt19937_64 batch_rng(derive_seed(cfg.seed, kTagRefBatch));
  std::uniform_int_distribution<std::size_t> row_dist(0, train_rows.size() - 1);
  const auto start = std::chrono::steady_clock::now();

  const int m = std::min<int>(cfg.refinenet_batch, static_cast<int>(train_rows.size()));
  Eigen::MatrixXd X(kRefineNetInputDim, m), P(kPoseDim, m), T(kPoseDim, m);
  for (int iter = 0; iter < cfg.refinenet_iters; ++iter) {
    for (int c = 0; c < m; ++c) {
      const Row& r = train_rows[row_dist(batch_rng)];
      X.col(c) = r.x;
      P.col(c) = r.pred;
      T.col(c) = r.target;
    }
    const MLPCache cache = mlp_forward_cached(net.mlp, X);
    const Eigen::MatrixXd diff = (P + cache.post.back()) - T;
    const double scale = 1.0 / (static_cast<double>(m) * kPoseDim);
    const double loss = diff.squaredNorm() * scale;
    if (!std::isfinite(loss))
      throw Error("train_refinenet diverged: non-finite loss at iter " +
                  std::to_string(iter));
    const MLPGradients grads = mlp_backward(net.mlp, cache, 2.0 * scale * diff);
    adam.update(net.mlp, grads, cfg.refinenet_lr);

    if (iter % 50 == 0 || iter + 1 == cfg.refinenet_iters) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.push_back({iter, loss, wall});
    }
  }

  result.final_holdout_loss = holdout_loss();
  result.net = std::move(net);
  return result;
}

}  // namespace mshand
