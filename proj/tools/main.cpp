// Command-line surface for the musculoskeletal hand engine: attachment
// mapping, rollouts, the two trainers, simulation-in-the-loop refinement,
// metrics, and plot-data extraction.

#include "mshand/defaults.hpp"
#include "mshand/evaluation.hpp"
#include "mshand/io.hpp"
#include "mshand/pipeline.hpp"
#include "mshand/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mshand;
using nlohmann::json;

constexpr std::uint64_t kTagTrajGen = 0x74726a67u;   // training trajectories
constexpr std::uint64_t kTagRefData = 0x72646174u;   // refiner trajectories

AppConfig resolve_config(const std::string& config_flag) {
  if (!config_flag.empty()) return load_app_config(config_flag);
  if (const char* env = std::getenv("MSHAND_CONFIG"); env && *env)
    return load_app_config(env);
  return default_app_config();
}

SystemBundle resolve_system(const AppConfig& cfg, const std::string& tree_path,
                            const std::string& muscles_path) {
  if (tree_path.empty() && muscles_path.empty()) return build_system(cfg);
  SystemBundle sys;
  sys.tree = tree_path.empty() ? default_tree() : load_tree(tree_path);
  if (muscles_path.empty()) {
    sys.musculature = default_musculature(sys.tree);
  } else {
    sys.musculature.muscles = load_muscles(muscles_path, sys.tree);
    sys.musculature.states =
        initial_muscle_states(sys.tree, Pose{}, sys.musculature.muscles);
    validate_musculature(sys.tree, sys.musculature);
  }
  return sys;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error("failed to parse '" + path + "': " + e.what());
  }
}

std::vector<Eigen::VectorXd> load_excitations(const std::string& path,
                                              const Musculature& musc) {
  const json j = parse_json_file(path);
  if (j.value("format", "") != "mshand-exc" || j.value("version", -1) != 1)
    throw Error("'" + path + "' is not a version-1 mshand-exc file");
  const int n = static_cast<int>(musc.muscles.size());

  std::vector<Eigen::VectorXd> seq;
  if (j.contains("sequence")) {
    for (const json& row : j["sequence"]) {
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw Error("excitation rows must have " + std::to_string(n) + " entries");
      Eigen::VectorXd e(n);
      for (int k = 0; k < n; ++k) e[k] = row[static_cast<std::size_t>(k)].get<double>();
      seq.push_back(std::move(e));
    }
  } else if (j.contains("levels") && j.contains("frames")) {
    const int frames = j["frames"].get<int>();
    if (frames < 1) throw Error("excitation frames must be >= 1");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (const auto& [name, level] : j["levels"].items()) {
      int idx = -1;
      for (int k = 0; k < n; ++k)
        if (musc.muscles[static_cast<std::size_t>(k)].name == name) idx = k;
      if (idx < 0) throw Error("unknown muscle '" + name + "' in excitation file");
      e[idx] = level.get<double>();
    }
    seq.assign(static_cast<std::size_t>(frames), e);
  } else {
    throw Error("excitation file needs either 'sequence' or 'frames'+'levels'");
  }
  if (seq.empty()) throw Error("excitation file is empty");
  return seq;
}

void run_map_muscles(const std::string& bones_path, const std::string& att_path,
                     const std::string& override_path, const std::string& tree_path,
                     const std::string& out_path) {
  const KinematicTree tree = tree_path.empty() ? default_tree() : load_tree(tree_path);
  const BoneCentricConfig bones = load_bone_config(bones_path);
  const std::vector<BoneCentricMuscle> attachments = load_attachments(att_path, tree);

  std::map<int, std::vector<std::string>> groups;
  for (const auto& [joint_name, group] : bones.bone_groups) {
    const int joint = tree.index_of(joint_name);
    if (joint < 0) throw Error("bone group for unknown joint '" + joint_name + "'");
    groups[joint] = group;
  }
  const std::map<std::string, int> mapping = derive_bone_mapping(groups);
  std::map<std::string, Vec3> overrides;
  if (!override_path.empty()) overrides = load_override(override_path);

  const std::vector<MuscleDef> mapped =
      map_muscle_set(attachments, bones.bones, groups, mapping, overrides);
  save_muscles(mapped, tree, out_path);
  std::cout << "mapped " << mapped.size() << " muscles -> " << out_path << "\n";
}

void run_simulate(const AppConfig& cfg, const std::string& tree_path,
                  const std::string& muscles_path, const std::string& exc_path,
                  const std::string& init_path, const std::string& out_path) {
  SystemBundle sys = resolve_system(cfg, tree_path, muscles_path);
  const std::vector<Eigen::VectorXd> seq = load_excitations(exc_path, sys.musculature);

  Pose pose;
  Velocity vel;
  if (!init_path.empty()) {
    const json j = parse_json_file(init_path);
    if (j.contains("pose")) {
      const json& p = j["pose"];
      Eigen::VectorXd f(static_cast<Eigen::Index>(p.size()));
      for (std::size_t i = 0; i < p.size(); ++i)
        f[static_cast<Eigen::Index>(i)] = p[i].get<double>();
      pose = Pose::from_flat(f);
    }
    if (j.contains("vel") && !j["vel"].is_null()) {
      const json& v = j["vel"];
      Eigen::VectorXd f(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i)
        f[static_cast<Eigen::Index>(i)] = v[i].get<double>();
      vel = Velocity::from_flat(f);
    }
  }

  SimState state = make_state(sys.tree, sys.musculature, pose, vel);
  const Trajectory traj =
      rollout(std::move(state), sys.tree, sys.musculature, seq, cfg.dynamics);
  save_trajectory(traj, out_path);
  std::cout << "simulated " << seq.size() << " frames -> " << out_path << "\n";
}

void run_train_idnet(const AppConfig& cfg, const std::string& out_path,
                     const std::string& log_path) {
  SystemBundle sys = build_system(cfg);
  const std::vector<Trajectory> trajs =
      gen_trajectories(sys.tree, cfg.training.traj_count, cfg.training.traj_len,
                       derive_seed(cfg.training.seed, kTagTrajGen));
  IDNetTrainResult result = train_idnet(sys.tree, sys.musculature, cfg.dynamics,
                                        cfg.gains, trajs, cfg.training);
  save_idnet(result.net, out_path);
  if (!log_path.empty()) save_log_csv(result.log, log_path, "update", "mean_reward");
  std::cout << "trained idnet over " << result.log.size() << " updates, reward "
            << result.log.front().value << " -> " << result.log.back().value << "\n";
}

void run_train_refine(const AppConfig& cfg, const std::string& idnet_path,
                      const std::string& out_path, const std::string& log_path) {
  SystemBundle sys = build_system(cfg);
  const IDNet idnet = load_idnet(idnet_path);
  const std::vector<Trajectory> trajs =
      gen_trajectories(sys.tree, cfg.training.traj_count, cfg.training.traj_len,
                       derive_seed(cfg.training.seed, kTagRefData));
  RefineTrainResult result = train_refinenet(sys.tree, sys.musculature, cfg.dynamics,
                                             idnet, trajs, cfg.training);
  save_refinenet(result.net, out_path);
  if (!log_path.empty()) save_log_csv(result.log, log_path, "iter", "train_loss");
  std::cout << "trained refinenet, holdout loss " << result.initial_holdout_loss
            << " -> " << result.final_holdout_loss << "\n";
}

void run_refine(const AppConfig& cfg, const std::string& tree_path,
                const std::string& muscles_path, const std::string& pred_path,
                const std::string& idnet_path, const std::string& refine_path,
                const std::string& out_path, const std::string& reference_path) {
  SystemBundle sys = resolve_system(cfg, tree_path, muscles_path);
  const Trajectory pred = load_trajectory(pred_path);
  const IDNet idnet = load_idnet(idnet_path);
  const RefineNet refinenet = load_refinenet(refine_path);
  const PipelineResult result = refine_trajectory(pred, sys.tree, sys.musculature, idnet,
                                             refinenet, cfg.dynamics, cfg.feedback);
  save_trajectory(result.refined, out_path);
  if (!reference_path.empty()) save_trajectory(result.reference, reference_path);
  std::cout << "refined " << result.refined.samples.size() << " frames -> "
            << out_path << "\n";
}

void run_eval(const AppConfig& cfg, const std::string& tree_path,
              const std::string& pred_path, const std::string& gt_path,
              double auc_tmax, const std::string& out_path) {
  const KinematicTree tree =
      tree_path.empty() ? resolve_system(cfg, "", "").tree : load_tree(tree_path);
  const Trajectory pred = load_trajectory(pred_path);
  const Trajectory gt = load_trajectory(gt_path);
  const EvalReport rep = evaluate(tree, pred, gt, auc_tmax);

  json j{{"format", "mshand-eval"}, {"version", 1},
         {"mpjpe_mm", rep.mpjpe_mm},  {"auc", rep.auc},
         {"ae_mm_s2", rep.ae_mm_s2},  {"frames", rep.frames},
         {"per_frame", rep.per_frame_mpjpe_mm}};
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << j.dump(2) << "\n";
  std::cout << "mpjpe_mm " << rep.mpjpe_mm << " auc " << rep.auc << " ae_mm_s2 "
            << rep.ae_mm_s2 << "\n";
}

void run_plot_data(const std::string& traj_path, const std::string& joints_csv,
                   const std::string& tree_path, const std::string& out_path) {
  const KinematicTree tree = tree_path.empty() ? default_tree() : load_tree(tree_path);
  const Trajectory traj = load_trajectory(traj_path);
  if (traj.samples.empty()) throw Error("empty trajectory");

  std::vector<int> joints;
  std::vector<std::string> names;
  std::stringstream ss(joints_csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const int idx = tree.index_of(token);
    if (idx < 0) throw Error("unknown joint '" + token + "'");
    joints.push_back(idx);
    names.push_back(token);
  }
  if (joints.empty()) throw Error("no joints requested");

  // normalized movement: |rotation - rotation at frame 0|, scaled by its max
  const std::size_t n = traj.samples.size();
  std::vector<std::vector<double>> curves(joints.size(), std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < joints.size(); ++c) {
    const Vec3 rest = traj.samples[0].pose.r[static_cast<std::size_t>(joints[c])];
    double peak = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      const double move =
          (traj.samples[f].pose.r[static_cast<std::size_t>(joints[c])] - rest).norm();
      curves[c][f] = move;
      peak = std::max(peak, move);
    }
    if (peak > 1e-12)
      for (double& v : curves[c]) v /= peak;
  }

  std::ostringstream out;
  out << "frame";
  for (const std::string& name : names) out << "," << name;
  out << "\n";
  for (std::size_t f = 0; f < n; ++f) {
    out << f;
    for (std::size_t c = 0; c < joints.size(); ++c)
      out << "," << format_double(curves[c][f]);
    out << "\n";
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error("cannot write '" + out_path + "'");
  file << out.str();
  std::cout << "wrote " << n << " frames x " << joints.size() << " joints -> "
            << out_path << "\n";
}

void run_dump_defaults(const std::string& what, const std::string& out_path) {
  if (what == "tree") {
    save_tree(default_tree(), out_path);
  } else if (what == "muscles") {
    const KinematicTree tree = default_tree();
    save_muscles(default_muscle_defs(tree), tree, out_path);
  } else if (what == "config") {
    save_app_config(default_app_config(), out_path);
  } else {
    throw Error("dump-defaults: what must be tree, muscles or config");
  }
  std::cout << "wrote " << what << " -> " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"musculoskeletal hand dynamics engine"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--seed/--workers may follow the subcommand

  std::string config_path, tree_path, muscles_path;
  std::int64_t seed_flag = -1;
  int workers_flag = 0;
  app.add_option("--config", config_path, "top-level JSON config (or $MSHAND_CONFIG)");
  app.add_option("--seed", seed_flag, "override the config seed");
  app.add_option("--workers", workers_flag, "override the config worker count");

  auto make_config = [&]() {
    AppConfig cfg = resolve_config(config_path);
    if (seed_flag >= 0) cfg.training.seed = static_cast<std::uint64_t>(seed_flag);
    if (workers_flag > 0) cfg.training.workers = workers_flag;
    return cfg;
  };

  // map-muscles
  auto* map_cmd = app.add_subcommand("map-muscles",
                                     "re-express bone-centric attachments per joint");
  std::string bones_path, att_path, override_path, out_path;
  map_cmd->add_option("--bones", bones_path, "bones + bone_groups JSON")->required();
  map_cmd->add_option("--attachments", att_path, "bone-centric muscle JSON")->required();
  map_cmd->add_option("--override", override_path, "per-point offset overrides");
  map_cmd->add_option("--tree", tree_path, "tree config (default: built-in)");
  map_cmd->add_option("-o,--out", out_path, "output muscle config")->required();
  map_cmd->callback(
      [&] { run_map_muscles(bones_path, att_path, override_path, tree_path, out_path); });

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "roll out an excitation sequence");
  std::string exc_path, init_path;
  sim_cmd->add_option("--muscles", muscles_path, "muscle config (default: built-in)");
  sim_cmd->add_option("--tree", tree_path, "tree config (default: built-in)");
  sim_cmd->add_option("--excitations", exc_path, "excitation JSON")->required();
  sim_cmd->add_option("--init", init_path, "initial {pose, vel} JSON");
  sim_cmd->add_option("-o,--out", out_path, "output trajectory")->required();
  sim_cmd->callback([&] {
    run_simulate(make_config(), tree_path, muscles_path, exc_path, init_path, out_path);
  });

  // train-idnet
  auto* tid_cmd = app.add_subcommand("train-idnet", "train the inverse-dynamics net");
  std::string log_path;
  tid_cmd->add_option("-o,--out", out_path, "output checkpoint")->required();
  tid_cmd->add_option("--log", log_path, "training log CSV");
  tid_cmd->callback([&] { run_train_idnet(make_config(), out_path, log_path); });

  // train-refine
  auto* trf_cmd = app.add_subcommand("train-refine", "train the pose refiner");
  std::string idnet_path;
  trf_cmd->add_option("--idnet", idnet_path, "trained idnet checkpoint")->required();
  trf_cmd->add_option("-o,--out", out_path, "output checkpoint")->required();
  trf_cmd->add_option("--log", log_path, "training log CSV");
  trf_cmd->callback(
      [&] { run_train_refine(make_config(), idnet_path, out_path, log_path); });

  // refine
  auto* ref_cmd = app.add_subcommand("refine", "simulation-in-the-loop refinement");
  std::string pred_path, refine_path, reference_path;
  ref_cmd->add_option("--pred", pred_path, "predicted trajectory")->required();
  ref_cmd->add_option("--idnet", idnet_path, "idnet checkpoint")->required();
  ref_cmd->add_option("--refine", refine_path, "refinenet checkpoint")->required();
  ref_cmd->add_option("--muscles", muscles_path, "muscle config (default: built-in)");
  ref_cmd->add_option("--tree", tree_path, "tree config (default: built-in)");
  ref_cmd->add_option("-o,--out", out_path, "refined trajectory")->required();
  ref_cmd->add_option("--emit-reference", reference_path, "also write reference poses");
  ref_cmd->callback([&] {
    run_refine(make_config(), tree_path, muscles_path, pred_path, idnet_path,
               refine_path, out_path, reference_path);
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "pose metrics against ground truth");
  std::string gt_path;
  double auc_tmax = 50.0;
  eval_cmd->add_option("--pred", pred_path, "predicted trajectory")->required();
  eval_cmd->add_option("--gt", gt_path, "ground-truth trajectory")->required();
  eval_cmd->add_option("--tree", tree_path, "tree config (default: built-in)");
  eval_cmd->add_option("--auc-tmax", auc_tmax, "AUC threshold range in mm");
  eval_cmd->add_option("-o,--out", out_path, "report JSON")->required();
  eval_cmd->callback([&] {
    run_eval(make_config(), tree_path, pred_path, gt_path, auc_tmax, out_path);
  });

  // plot-data
  auto* plot_cmd = app.add_subcommand("plot-data", "normalized joint movement CSV");
  std::string traj_path, joints_csv;
  plot_cmd->add_option("--traj", traj_path, "input trajectory")->required();
  plot_cmd->add_option("--joints", joints_csv, "comma-separated joint names")->required();
  plot_cmd->add_option("--tree", tree_path, "tree config (default: built-in)");
  plot_cmd->add_option("-o,--out", out_path, "output CSV")->required();
  plot_cmd->callback([&] { run_plot_data(traj_path, joints_csv, tree_path, out_path); });

  // dump-defaults
  auto* dump_cmd = app.add_subcommand("dump-defaults", "write built-in configs");
  std::string what;
  dump_cmd->add_option("--what", what, "tree | muscles | config")->required();
  dump_cmd->add_option("-o,--out", out_path, "output path")->required();
  dump_cmd->callback([&] { run_dump_defaults(what, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
