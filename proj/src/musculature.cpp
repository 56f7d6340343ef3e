#include "mshand/musculature.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mshand {

namespace {

// Segment crossing joint j: the path point immediately distal to j plus its
// predecessor. Returns the point index, or -1 when the muscle has no point at
// or below the joint.
int distal_point_index(const KinematicTree& tree, const MuscleDef& m, int joint) {
  for (std::size_t k = 0; k < m.path.size(); ++k)
    if (tree.is_ancestor_or_self(joint, m.path[k].joint)) return static_cast<int>(k);
  return -1;
}

}  // namespace

JointCentricAttachment map_bone_to_joint(
    const BoneCentricAttachment& att,
    const std::map<std::string, Vec3>& bone_positions,
    const std::map<int, std::vector<std::string>>& bone_groups,
    const std::map<std::string, int>& bone_to_joint) {
  const auto map_it = bone_to_joint.find(att.bone);
  if (map_it == bone_to_joint.end())
    throw Error("unknown bone '" + att.bone + "' in attachment '" + att.point_id + "'");
  const auto pos_it = bone_positions.find(att.bone);
  if (pos_it == bone_positions.end())
    throw Error("no position for bone '" + att.bone + "'");
  const int joint = map_it->second;

  const auto group_it = bone_groups.find(joint);
  if (group_it == bone_groups.end() || group_it->second.empty())
    throw Error("empty bone group for joint " + std::to_string(joint));
  const std::vector<std::string>& group = group_it->second;
  if (std::find(group.begin(), group.end(), att.bone) == group.end())
    throw Error("bone '" + att.bone + "' is not in the group of its joint " +
                std::to_string(joint));

  // Joint center: mean of the group's bone positions.
  Vec3 center = Vec3::Zero();
  for (const std::string& bone : group) {
    const auto it = bone_positions.find(bone);
    if (it == bone_positions.end())
      throw Error("no position for bone '" + bone + "' in group of joint " +
                  std::to_string(joint));
    center += it->second;
  }
  center /= static_cast<double>(group.size());

  // dist(q, m_j) = dist(q, b_k) + dist(b_k, m_j) = q - m_j.
  JointCentricAttachment out;
  out.point_id = att.point_id;
  out.joint = joint;
  out.offset = (pos_it->second + att.offset) - center;
  return out;
}

PathGeometry muscle_path_geometry(const KinematicTree& tree,
                                  const JointTransforms& transforms,
                                  const MuscleDef& m) {
  PathGeometry g;
  g.points.reserve(m.path.size());
  for (const JointCentricAttachment& att : m.path) {
    if (att.joint < 0 || att.joint >= kNumJoints)
      throw Error("muscle '" + m.name + "': attachment joint out of range");
    g.points.push_back(transforms[static_cast<std::size_t>(att.joint)] * att.offset);
  }
  g.segments.reserve(g.points.size() - 1);
  for (std::size_t k = 1; k < g.points.size(); ++k) {
    const Vec3 s = g.points[k] - g.points[k - 1];
    const double len = s.norm();
    if (len < 1e-12)
      throw Error("muscle '" + m.name + "': degenerate segment at point " +
                  std::to_string(k));
    g.segments.push_back(s);
    g.total_length += len;
  }
  return g;
}

PathGeometry muscle_path_geometry(const KinematicTree& tree, const Pose& pose,
                                  const MuscleDef& m) {
  return muscle_path_geometry(tree, joint_world_transforms(tree, pose), m);
}

MuscleState activation_step(MuscleState s, double excitation, double dt) {
  if (excitation < 0.0 || excitation > 1.0)
    throw Error("excitation out of [0,1]: " + std::to_string(excitation));
  if (dt <= 0.0) throw Error("activation step needs dt > 0");
  const double tau = excitation > s.activation ? kTauActivate : kTauDeactivate;
  s.activation = std::clamp(s.activation + dt * (excitation - s.activation) / tau,
                            0.0, 1.0);
  return s;
}

double muscle_force(const MuscleDef& m, const MuscleState& s, double norm_length,
                    double norm_velocity) {
  if (norm_length <= 0.0)
    throw Error("muscle '" + m.name + "': non-positive normalized length");
  const double dl = norm_length - 1.0;
  const double f_len = std::exp(-dl * dl / kForceLengthWidth);

  // Hill hyperbola: concentric branch zero at -1, eccentric branch asymptotic
  // to kEccentricMax with matched slope at v = 0.
  double f_vel;
  if (norm_velocity <= 0.0) {
    f_vel = std::max(0.0, (1.0 + norm_velocity) / (1.0 - norm_velocity / 0.25));
  } else {
    const double c = (kEccentricMax - 1.0) / 5.0;
    f_vel = (kEccentricMax * norm_velocity + c) / (norm_velocity + c);
  }
  f_vel = std::clamp(f_vel, 0.0, kEccentricMax);

  const double f_passive =
      std::min(1.0, std::max(0.0, (std::exp(10.0 * dl) - 1.0) / (std::exp(5.0) - 1.0)));

  return std::max(0.0, m.f_max * (s.activation * f_len * f_vel + f_passive));
}

double fiber_length_from_path(const MuscleDef& m, double path_length) {
  return std::max(path_length - m.l_slack, kMinFiberFraction * m.l_opt);
}

Vec3 segment_torque(double force, const Vec3& lever, const Vec3& segment) {
  const double len = segment.norm();
  if (len < 1e-12) throw Error("degenerate segment in torque computation");
  return force * lever.cross(segment / len);
}

JointTorques muscle_torques(const KinematicTree& tree, const Pose& pose,
                            Musculature& musc, const Eigen::VectorXd& excitations,
                            double dt) {
  if (excitations.size() != static_cast<Eigen::Index>(musc.muscles.size()))
    throw Error("excitation dimension " + std::to_string(excitations.size()) +
                " != muscle count " + std::to_string(musc.muscles.size()));
  if (musc.states.size() != musc.muscles.size())
    throw Error("muscle state list out of sync with muscle list");

  const JointTransforms transforms = joint_world_transforms(tree, pose);
  JointTorques torques = zero_torques();

  for (std::size_t i = 0; i < musc.muscles.size(); ++i) {
    const MuscleDef& m = musc.muscles[i];
    MuscleState& st = musc.states[i];

    st = activation_step(st, excitations[static_cast<Eigen::Index>(i)], dt);

    const PathGeometry geom = muscle_path_geometry(tree, transforms, m);
    const double fiber = fiber_length_from_path(m, geom.total_length);
    const double prev_fiber = st.fiber_length > 0.0 ? st.fiber_length : fiber;
    const double norm_vel = (fiber - prev_fiber) / dt / (kMaxShorteningRate * m.l_opt);
    st.fiber_length = fiber;

    const double force = muscle_force(m, st, fiber / m.l_opt, norm_vel);
    if (force == 0.0) continue;

    for (int joint : m.actuated_joints) {
      const int k = distal_point_index(tree, m, joint);
      if (k < 1)
        throw Error("muscle '" + m.name + "': no segment crosses joint " +
                    std::to_string(joint));
      const Vec3& q = geom.points[static_cast<std::size_t>(k)];
      const Vec3 pull = geom.points[static_cast<std::size_t>(k - 1)] - q;
      const Vec3 lever = q - transforms[static_cast<std::size_t>(joint)].translation();
      torques[static_cast<std::size_t>(joint)] += segment_torque(force, lever, pull);
    }
  }
  return torques;
}

std::map<std::string, int> derive_bone_mapping(
    const std::map<int, std::vector<std::string>>& bone_groups) {
  std::map<std::string, int> mapping;
  for (const auto& [joint, bones] : bone_groups) {
    for (const std::string& bone : bones) {
      const auto [it, inserted] = mapping.emplace(bone, joint);
      if (!inserted && it->second != joint)
        throw Error("bone '" + bone + "' appears in groups of joints " +
                    std::to_string(it->second) + " and " + std::to_string(joint));
    }
  }
  return mapping;
}

std::vector<MuscleDef> map_muscle_set(
    const std::vector<BoneCentricMuscle>& muscles,
    const std::map<std::string, Vec3>& bone_positions,
    const std::map<int, std::vector<std::string>>& bone_groups,
    const std::map<std::string, int>& bone_to_joint,
    const std::map<std::string, Vec3>& overrides) {
  std::set<std::string> used_overrides;
  std::vector<MuscleDef> out;
  out.reserve(muscles.size());
  for (const BoneCentricMuscle& bm : muscles) {
    MuscleDef m;
    m.name = bm.name;
    m.f_max = bm.f_max;
    m.l_opt = bm.l_opt;
    m.l_slack = bm.l_slack;
    m.actuated_joints = bm.actuated_joints;
    m.path.reserve(bm.path.size());
    for (const BoneCentricAttachment& att : bm.path) {
      JointCentricAttachment mapped =
          map_bone_to_joint(att, bone_positions, bone_groups, bone_to_joint);
      const auto ov = overrides.find(mapped.point_id);
      if (ov != overrides.end()) {
        mapped.offset = ov->second;
        used_overrides.insert(ov->first);
      }
      if (mapped.offset.norm() > kMaxAttachmentOffset)
        throw Error("attachment '" + mapped.point_id + "' is " +
                    std::to_string(mapped.offset.norm()) +
                    " m from joint " + std::to_string(mapped.joint) +
                    " (limit 0.03 m)");
      m.path.push_back(std::move(mapped));
    }
    out.push_back(std::move(m));
  }
  for (const auto& [id, offset] : overrides)
    if (used_overrides.count(id) == 0)
      throw Error("override for unknown attachment '" + id + "'");
  return out;
}

void validate_musculature(const KinematicTree& tree, const Musculature& musc) {
  if (musc.states.size() != musc.muscles.size())
    throw Error("muscle state list out of sync with muscle list");
  std::set<std::string> names;
  for (const MuscleDef& m : musc.muscles) {
    if (!names.insert(m.name).second)
      throw Error("duplicate muscle name '" + m.name + "'");
    if (m.path.size() < 2)
      throw Error("muscle '" + m.name + "': path needs at least 2 points");
    if (!(m.f_max > 0.0)) throw Error("muscle '" + m.name + "': f_max must be > 0");
    if (!(m.l_opt > 0.0)) throw Error("muscle '" + m.name + "': l_opt must be > 0");
    if (m.l_slack < 0.0) throw Error("muscle '" + m.name + "': l_slack must be >= 0");
    if (m.actuated_joints.empty())
      throw Error("muscle '" + m.name + "': no actuated joints");
    for (const JointCentricAttachment& att : m.path) {
      if (att.joint < 0 || att.joint >= kNumJoints)
        throw Error("muscle '" + m.name + "': attachment joint out of range");
      if (!att.offset.allFinite())
        throw Error("muscle '" + m.name + "': non-finite attachment offset");
    }
    // Actuated joints must lie on the chain from the origin's joint down to
    // the insertion's joint, with a path point strictly after the origin at or
    // below them (so a crossing segment exists).
    const int origin = m.path.front().joint;
    const int insertion = m.path.back().joint;
    std::set<int> chain;
    int j = insertion;
    while (j >= 0) {
      chain.insert(j);
      if (j == origin) break;
      j = tree.joints[static_cast<std::size_t>(j)].parent;
    }
    if (chain.count(origin) == 0)
      throw Error("muscle '" + m.name +
                  "': origin joint is not an ancestor of the insertion joint");
    for (int actuated : m.actuated_joints) {
      if (chain.count(actuated) == 0)
        throw Error("muscle '" + m.name + "': actuated joint " +
                    std::to_string(actuated) +
                    " is not between origin and insertion");
      if (distal_point_index(tree, m, actuated) < 1)
        throw Error("muscle '" + m.name + "': no segment crosses joint " +
                    std::to_string(actuated));
    }
  }
}

std::vector<MuscleState> initial_muscle_states(const KinematicTree& tree,
                                               const Pose& pose,
                                               const std::vector<MuscleDef>& muscles) {
  const JointTransforms transforms = joint_world_transforms(tree, pose);
  std::vector<MuscleState> states(muscles.size());
  for (std::size_t i = 0; i < muscles.size(); ++i) {
    const PathGeometry geom = muscle_path_geometry(tree, transforms, muscles[i]);
    states[i].activation = 0.0;
    states[i].fiber_length = fiber_length_from_path(muscles[i], geom.total_length);
  }
  return states;
}

}  // namespace mshand
