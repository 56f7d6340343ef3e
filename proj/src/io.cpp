#include "mshand/io.hpp"

#include "mshand/defaults.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace mshand {

using nlohmann::json;

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error("failed to parse '" + path.string() + "': " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void check_header(const json& j, const std::string& format, int max_version,
                  const std::filesystem::path& path) {
  if (!j.contains("format") || j.at("format") != format)
    throw Error("'" + path.string() + "' is not a " + format + " file");
  const int version = j.value("version", -1);
  if (version < 1 || version > max_version)
    throw Error("'" + path.string() + "': unsupported " + format + " version " +
                std::to_string(version));
}

Vec3 vec3_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(what + " must be a 3-element array");
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    if (!j[static_cast<std::size_t>(a)].is_number())
      throw Error(what + " must contain numbers");
    v[a] = j[static_cast<std::size_t>(a)].get<double>();
  }
  return v;
}

json vec3_to(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

int resolve_joint(const json& j, const KinematicTree& tree, const std::string& what) {
  if (j.is_number_integer()) {
    const int idx = j.get<int>();
    if (idx < 0 || idx >= kNumJoints)
      throw Error(what + ": joint index " + std::to_string(idx) + " out of range");
    return idx;
  }
  if (j.is_string()) {
    const int idx = tree.index_of(j.get<std::string>());
    if (idx < 0) throw Error(what + ": unknown joint '" + j.get<std::string>() + "'");
    return idx;
  }
  throw Error(what + ": joint must be an index or a name");
}

Eigen::VectorXd vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(what + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// --------------------------------------------------------------------------
// Trajectory JSONL

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");

  std::string line;
  int line_no = 0;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
        return true;
    }
    return false;
  };

  if (!next_line()) throw Error("'" + path.string() + "': empty trajectory file");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  check_header(header, "mshand-traj", kTrajFormatVersion, path);
  Trajectory traj;
  if (!header.contains("dt") || !header["dt"].is_number() ||
      !(header["dt"].get<double>() > 0.0))
    throw Error("'" + path.string() + "': header needs a positive dt");
  traj.dt = header["dt"].get<double>();

  while (next_line()) {
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    TrajectorySample s;
    if (!rec.contains("t") || !rec["t"].is_number())
      throw Error(path.string() + ":" + std::to_string(line_no) + ": missing time");
    s.t = rec["t"].get<double>();
    if (!rec.contains("pose"))
      throw Error(path.string() + ":" + std::to_string(line_no) + ": missing pose");
    const Eigen::VectorXd pose = vector_from(rec["pose"], "pose");
    if (pose.size() != kPoseDim)
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": pose must have 48 components, got " + std::to_string(pose.size()));
    s.pose = Pose::from_flat(pose);
    if (rec.contains("vel") && !rec["vel"].is_null()) {
      const Eigen::VectorXd vel = vector_from(rec["vel"], "vel");
      if (vel.size() != kPoseDim)
        throw Error(path.string() + ":" + std::to_string(line_no) +
                    ": vel must have 48 components, got " + std::to_string(vel.size()));
      s.vel = Velocity::from_flat(vel);
    }
    traj.samples.push_back(std::move(s));
  }
  traj.check_uniform();
  return traj;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ostringstream out;
  json header{{"format", "mshand-traj"}, {"version", kTrajFormatVersion}, {"dt", traj.dt}};
  out << header.dump() << "\n";
  for (const TrajectorySample& s : traj.samples) {
    json rec{{"t", s.t}, {"pose", vector_to(s.pose.flat())}};
    rec["vel"] = s.vel ? vector_to(s.vel->flat()) : json();
    out << rec.dump() << "\n";
  }
  write_file(path, out.str());
}

// --------------------------------------------------------------------------
// Tree config

KinematicTree load_tree(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-tree", kConfigFormatVersion, path);
  if (!j.contains("joints") || !j["joints"].is_array())
    throw Error("'" + path.string() + "': missing joints array");

  std::vector<JointDef> joints;
  std::vector<std::string> names;
  for (const json& jj : j["joints"]) {
    JointDef def;
    def.name = jj.value("name", "");
    if (def.name.empty()) throw Error("joint without a name");
    const json& parent = jj.at("parent");
    if (parent.is_null()) {
      def.parent = -1;
    } else if (parent.is_number_integer()) {
      def.parent = parent.get<int>();
    } else if (parent.is_string()) {
      const auto it = std::find(names.begin(), names.end(), parent.get<std::string>());
      if (it == names.end())
        throw Error("joint '" + def.name + "': unknown parent '" +
                    parent.get<std::string>() + "'");
      def.parent = static_cast<int>(it - names.begin());
    } else {
      throw Error("joint '" + def.name + "': parent must be null, index or name");
    }
    def.rest_offset = vec3_from(jj.at("offset"), "joint '" + def.name + "' offset");
    const json& limits = jj.at("limits");
    if (!limits.is_array() || limits.size() != 3)
      throw Error("joint '" + def.name + "': limits must be 3 [lo,hi] pairs");
    for (int a = 0; a < 3; ++a) {
      const json& pair = limits[static_cast<std::size_t>(a)];
      if (!pair.is_array() || pair.size() != 2)
        throw Error("joint '" + def.name + "': limits must be 3 [lo,hi] pairs");
      def.limit_lo[a] = pair[0].get<double>();
      def.limit_hi[a] = pair[1].get<double>();
    }
    names.push_back(def.name);
    joints.push_back(std::move(def));
  }

  if (!j.contains("fingertips") || !j["fingertips"].is_array() ||
      j["fingertips"].size() != kNumFingertips)
    throw Error("'" + path.string() + "': missing fingertip mapping (need 5)");
  std::array<FingertipDef, kNumFingertips> tips{};
  KinematicTree lookup;  // name resolution against the joint list
  lookup.joints = joints;
  for (int f = 0; f < kNumFingertips; ++f) {
    const json& jf = j["fingertips"][static_cast<std::size_t>(f)];
    tips[static_cast<std::size_t>(f)].joint =
        resolve_joint(jf.at("joint"), lookup, "fingertip " + std::to_string(f));
    tips[static_cast<std::size_t>(f)].offset =
        vec3_from(jf.at("offset"), "fingertip offset");
  }
  return build_tree(std::move(joints), tips);
}

void save_tree(const KinematicTree& tree, const std::filesystem::path& path) {
  json j{{"format", "mshand-tree"}, {"version", kConfigFormatVersion}};
  json joints = json::array();
  for (const JointDef& def : tree.joints) {
    json limits = json::array();
    for (int a = 0; a < 3; ++a)
      limits.push_back(json::array({def.limit_lo[a], def.limit_hi[a]}));
    joints.push_back(json{{"name", def.name},
                          {"parent", def.parent < 0 ? json() : json(def.parent)},
                          {"offset", vec3_to(def.rest_offset)},
                          {"limits", limits}});
  }
  j["joints"] = joints;
  json tips = json::array();
  for (const FingertipDef& ft : tree.fingertips)
    tips.push_back(json{{"joint", tree.joints[static_cast<std::size_t>(ft.joint)].name},
                        {"offset", vec3_to(ft.offset)}});
  j["fingertips"] = tips;
  write_file(path, j.dump(2) + "\n");
}

// --------------------------------------------------------------------------
// Muscle config

std::vector<MuscleDef> load_muscles(const std::filesystem::path& path,
                                    const KinematicTree& tree) {
  const json j = parse_file(path);
  check_header(j, "mshand-muscles", kConfigFormatVersion, path);
  if (!j.contains("muscles") || !j["muscles"].is_array())
    throw Error("'" + path.string() + "': missing muscles array");
  std::vector<MuscleDef> out;
  for (const json& jm : j["muscles"]) {
    MuscleDef m;
    m.name = jm.value("name", "");
    if (m.name.empty()) throw Error("muscle without a name");
    for (const json& jp : jm.at("path")) {
      JointCentricAttachment att;
      att.joint = resolve_joint(jp.at("joint"), tree, "muscle '" + m.name + "'");
      att.offset = vec3_from(jp.at("offset"), "muscle '" + m.name + "' offset");
      att.point_id = jp.value("point_id", "");
      m.path.push_back(std::move(att));
    }
    m.f_max = jm.at("f_max").get<double>();
    m.l_opt = jm.at("l_opt").get<double>();
    m.l_slack = jm.at("l_slack").get<double>();
    for (const json& ja : jm.at("actuated_joints"))
      m.actuated_joints.push_back(resolve_joint(ja, tree, "muscle '" + m.name + "'"));
    out.push_back(std::move(m));
  }
  return out;
}

void save_muscles(const std::vector<MuscleDef>& muscles, const KinematicTree& tree,
                  const std::filesystem::path& path) {
  json j{{"format", "mshand-muscles"}, {"version", kConfigFormatVersion}};
  json arr = json::array();
  for (const MuscleDef& m : muscles) {
    json jp = json::array();
    for (const JointCentricAttachment& att : m.path) {
      json point{{"joint", att.joint}, {"offset", vec3_to(att.offset)}};
      if (!att.point_id.empty()) point["point_id"] = att.point_id;
      jp.push_back(point);
    }
    arr.push_back(json{{"name", m.name},
                       {"path", jp},
                       {"f_max", m.f_max},
                       {"l_opt", m.l_opt},
                       {"l_slack", m.l_slack},
                       {"actuated_joints", m.actuated_joints}});
  }
  j["muscles"] = arr;
  (void)tree;
  write_file(path, j.dump(2) + "\n");
}

// --------------------------------------------------------------------------
// Bone-centric inputs

BoneCentricConfig load_bone_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-bones", kConfigFormatVersion, path);
  BoneCentricConfig cfg;
  if (!j.contains("bones") || !j["bones"].is_object())
    throw Error("'" + path.string() + "': missing bones section");
  for (const auto& [name, pos] : j["bones"].items())
    cfg.bones[name] = vec3_from(pos, "bone '" + name + "'");
  if (!j.contains("bone_groups") || !j["bone_groups"].is_object())
    throw Error("'" + path.string() + "': missing bone_groups section");
  for (const auto& [joint, bones] : j["bone_groups"].items()) {
    if (!bones.is_array()) throw Error("bone group '" + joint + "' must be an array");
    for (const json& b : bones)
      cfg.bone_groups[joint].push_back(b.get<std::string>());
  }
  return cfg;
}

std::vector<BoneCentricMuscle> load_attachments(const std::filesystem::path& path,
                                                const KinematicTree& tree) {
  const json j = parse_file(path);
  check_header(j, "mshand-attachments", kConfigFormatVersion, path);
  if (!j.contains("attachments") || !j["attachments"].is_array())
    throw Error("'" + path.string() + "': missing attachments section");
  std::vector<BoneCentricMuscle> out;
  for (const json& jm : j["attachments"]) {
    BoneCentricMuscle m;
    m.name = jm.value("name", "");
    if (m.name.empty()) throw Error("attachment muscle without a name");
    for (const json& jp : jm.at("path")) {
      BoneCentricAttachment att;
      att.point_id = jp.value("point_id", "");
      if (att.point_id.empty())
        att.point_id = m.name + "_p" + std::to_string(m.path.size());
      att.bone = jp.at("bone").get<std::string>();
      att.offset = vec3_from(jp.at("offset"), "attachment '" + att.point_id + "'");
      m.path.push_back(std::move(att));
    }
    m.f_max = jm.at("f_max").get<double>();
    m.l_opt = jm.at("l_opt").get<double>();
    m.l_slack = jm.at("l_slack").get<double>();
    for (const json& ja : jm.at("actuated_joints"))
      m.actuated_joints.push_back(resolve_joint(ja, tree, "muscle '" + m.name + "'"));
    out.push_back(std::move(m));
  }
  return out;
}

std::map<std::string, Vec3> load_override(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-override", kConfigFormatVersion, path);
  std::map<std::string, Vec3> out;
  if (!j.contains("points") || !j["points"].is_object())
    throw Error("'" + path.string() + "': missing points section");
  for (const auto& [id, offset] : j["points"].items())
    out[id] = vec3_from(offset, "override '" + id + "'");
  return out;
}

// --------------------------------------------------------------------------
// Network checkpoints

namespace {

json mlp_to_json(const MLPParams& params) {
  json layers = json::array();
  for (const Layer& layer : params.layers) {
    json w = json::array();
    for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c) w.push_back(layer.W(r, c));
    layers.push_back(json{{"rows", layer.W.rows()},
                          {"cols", layer.W.cols()},
                          {"w", w},
                          {"b", vector_to(layer.b)}});
  }
  return json{{"activation", params.activation == Activation::Tanh ? "tanh" : "relu"},
              {"output", params.output == OutputTransform::Sigmoid ? "sigmoid"
                                                                   : "identity"},
              {"layers", layers}};
}

MLPParams mlp_from_json(const json& j) {
  MLPParams params;
  const std::string act = j.value("activation", "tanh");
  if (act == "tanh")
    params.activation = Activation::Tanh;
  else if (act == "relu")
    params.activation = Activation::Relu;
  else
    throw Error("unknown activation '" + act + "'");
  const std::string out = j.value("output", "identity");
  if (out == "identity")
    params.output = OutputTransform::Identity;
  else if (out == "sigmoid")
    params.output = OutputTransform::Sigmoid;
  else
    throw Error("unknown output transform '" + out + "'");
  for (const json& jl : j.at("layers")) {
    Layer layer;
    const Eigen::Index rows = jl.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = jl.at("cols").get<Eigen::Index>();
    const json& w = jl.at("w");
    if (static_cast<Eigen::Index>(w.size()) != rows * cols)
      throw Error("checkpoint layer has wrong weight count");
    layer.W.resize(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) layer.W(r, c) = w[idx++].get<double>();
    layer.b = vector_from(jl.at("b"), "checkpoint bias");
    if (layer.b.size() != rows) throw Error("checkpoint bias has wrong size");
    params.layers.push_back(std::move(layer));
  }
  params.validate();
  return params;
}

}  // namespace

void save_idnet(const IDNet& net, const std::filesystem::path& path) {
  json j{{"format", "mshand-net"},
         {"version", kNetFormatVersion},
         {"kind", "idnet"},
         {"mlp", mlp_to_json(net.mlp)},
         {"log_std", vector_to(net.log_std)}};
  write_file(path, j.dump() + "\n");
}

IDNet load_idnet(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-net", kNetFormatVersion, path);
  if (j.value("kind", "") != "idnet")
    throw Error("'" + path.string() + "' is not an idnet checkpoint");
  IDNet net;
  net.mlp = mlp_from_json(j.at("mlp"));
  net.log_std = vector_from(j.at("log_std"), "log_std");
  if (net.log_std.size() != net.mlp.output_dim())
    throw Error("checkpoint log_std size does not match output dimension");
  if (net.mlp.input_dim() != kIDNetInputDim)
    throw Error("idnet checkpoint input dimension must be " +
                std::to_string(kIDNetInputDim));
  return net;
}

void save_refinenet(const RefineNet& net, const std::filesystem::path& path) {
  json j{{"format", "mshand-net"},
         {"version", kNetFormatVersion},
         {"kind", "refinenet"},
         {"mlp", mlp_to_json(net.mlp)}};
  write_file(path, j.dump() + "\n");
}

RefineNet load_refinenet(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-net", kNetFormatVersion, path);
  if (j.value("kind", "") != "refinenet")
    throw Error("'" + path.string() + "' is not a refinenet checkpoint");
  RefineNet net;
  net.mlp = mlp_from_json(j.at("mlp"));
  if (net.mlp.input_dim() != kRefineNetInputDim ||
      net.mlp.output_dim() != kPoseDim)
    throw Error("refinenet checkpoint has wrong dimensions");
  return net;
}

// --------------------------------------------------------------------------
// App config

AppConfig default_app_config() { return AppConfig{}; }

AppConfig load_app_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_header(j, "mshand-config", kConfigFormatVersion, path);
  AppConfig cfg;

  if (j.contains("system")) {
    const json& sys = j["system"];
    if (sys.is_string()) {
      cfg.system = sys.get<std::string>();
      if (cfg.system != "default" && cfg.system != "reduced-ring")
        throw Error("unknown system '" + cfg.system + "'");
    } else if (sys.is_object()) {
      cfg.system = "files";
      cfg.tree_path = sys.at("tree").get<std::string>();
      cfg.muscles_path = sys.at("muscles").get<std::string>();
    } else {
      throw Error("config system must be a name or {tree, muscles}");
    }
  }

  if (j.contains("dynamics")) {
    const json& d = j["dynamics"];
    cfg.dynamics.dt = d.value("dt", cfg.dynamics.dt);
    cfg.dynamics.inertia = d.value("inertia", cfg.dynamics.inertia);
    cfg.dynamics.damping = d.value("damping", cfg.dynamics.damping);
    cfg.dynamics.substeps = d.value("substeps", cfg.dynamics.substeps);
    if (d.contains("gravity"))
      cfg.dynamics.gravity_torque = vec3_from(d["gravity"], "gravity");
    cfg.dynamics.validate();
  }
  if (j.contains("pd")) {
    cfg.gains.kp = j["pd"].value("kp", cfg.gains.kp);
    cfg.gains.kd = j["pd"].value("kd", cfg.gains.kd);
  }
  if (j.contains("pipeline")) {
    const std::string fb = j["pipeline"].value("feedback", "refined");
    if (fb == "refined")
      cfg.feedback = FeedbackMode::Refined;
    else if (fb == "predicted")
      cfg.feedback = FeedbackMode::Predicted;
    else
      throw Error("pipeline feedback must be 'refined' or 'predicted'");
  }
  if (j.contains("training")) {
    const json& t = j["training"];
    TrainConfig& tc = cfg.training;
    tc.idnet_lr = t.value("idnet_lr", tc.idnet_lr);
    tc.refinenet_lr = t.value("refinenet_lr", tc.refinenet_lr);
    tc.idnet_batch = t.value("idnet_batch", tc.idnet_batch);
    tc.refinenet_batch = t.value("refinenet_batch", tc.refinenet_batch);
    tc.refinenet_iters = t.value("refinenet_iters", tc.refinenet_iters);
    tc.ppo_clip = t.value("ppo_clip", tc.ppo_clip);
    tc.noise_deg = t.value("noise_deg", tc.noise_deg);
    tc.seed = t.value("seed", tc.seed);
    tc.idnet_transitions = t.value("idnet_transitions", tc.idnet_transitions);
    tc.omega_tau = t.value("omega_tau", tc.omega_tau);
    tc.ppo_epochs = t.value("ppo_epochs", tc.ppo_epochs);
    tc.ppo_minibatch = t.value("ppo_minibatch", tc.ppo_minibatch);
    tc.entropy_coef = t.value("entropy_coef", tc.entropy_coef);
    tc.init_log_std = t.value("init_log_std", tc.init_log_std);
    tc.workers = t.value("workers", tc.workers);
    tc.corruption_deg = t.value("corruption_deg", tc.corruption_deg);
    tc.traj_count = t.value("traj_count", tc.traj_count);
    tc.traj_len = t.value("traj_len", tc.traj_len);
    tc.holdout_frac = t.value("holdout_frac", tc.holdout_frac);
    tc.validate();
  }
  return cfg;
}

void save_app_config(const AppConfig& cfg, const std::filesystem::path& path) {
  json j{{"format", "mshand-config"}, {"version", kConfigFormatVersion}};
  if (cfg.system == "files")
    j["system"] = json{{"tree", cfg.tree_path.string()},
                       {"muscles", cfg.muscles_path.string()}};
  else
    j["system"] = cfg.system;
  j["dynamics"] = json{{"dt", cfg.dynamics.dt},
                       {"inertia", cfg.dynamics.inertia},
                       {"damping", cfg.dynamics.damping},
                       {"substeps", cfg.dynamics.substeps},
                       {"gravity", vec3_to(cfg.dynamics.gravity_torque)}};
  j["pd"] = json{{"kp", cfg.gains.kp}, {"kd", cfg.gains.kd}};
  j["pipeline"] = json{
      {"feedback", cfg.feedback == FeedbackMode::Refined ? "refined" : "predicted"}};
  const TrainConfig& tc = cfg.training;
  j["training"] = json{{"idnet_lr", tc.idnet_lr},
                       {"refinenet_lr", tc.refinenet_lr},
                       {"idnet_batch", tc.idnet_batch},
                       {"refinenet_batch", tc.refinenet_batch},
                       {"refinenet_iters", tc.refinenet_iters},
                       {"ppo_clip", tc.ppo_clip},
                       {"noise_deg", tc.noise_deg},
                       {"seed", tc.seed},
                       {"idnet_transitions", tc.idnet_transitions},
                       {"omega_tau", tc.omega_tau},
                       {"ppo_epochs", tc.ppo_epochs},
                       {"ppo_minibatch", tc.ppo_minibatch},
                       {"entropy_coef", tc.entropy_coef},
                       {"init_log_std", tc.init_log_std},
                       {"workers", tc.workers},
                       {"corruption_deg", tc.corruption_deg},
                       {"traj_count", tc.traj_count},
                       {"traj_len", tc.traj_len},
                       {"holdout_frac", tc.holdout_frac}};
  write_file(path, j.dump(2) + "\n");
}

SystemBundle build_system(const AppConfig& cfg) {
  SystemBundle sys;
  if (cfg.system == "default") {
    sys.tree = default_tree();
    sys.musculature = default_musculature(sys.tree);
  } else if (cfg.system == "reduced-ring") {
    sys.tree = reduced_ring_tree();
    sys.musculature = reduced_ring_musculature(sys.tree);
  } else if (cfg.system == "files") {
    sys.tree = load_tree(cfg.tree_path);
    sys.musculature.muscles = load_muscles(cfg.muscles_path, sys.tree);
    sys.musculature.states =
        initial_muscle_states(sys.tree, Pose{}, sys.musculature.muscles);
    validate_musculature(sys.tree, sys.musculature);
  } else {
    throw Error("unknown system '" + cfg.system + "'");
  }
  return sys;
}

void save_log_csv(const TrainLog& log, const std::filesystem::path& path,
                  const std::string& index_col, const std::string& value_col) {
  std::ostringstream out;
  out << index_col << "," << value_col << ",wall_time_s\n";
  for (const TrainLogEntry& e : log)
    out << e.update << "," << format_double(e.value) << ","
        << format_double(e.wall_time_s) << "\n";
  write_file(path, out.str());
}

}  // namespace mshand
