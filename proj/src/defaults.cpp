#include "mshand/defaults.hpp"

#include <numbers>

namespace mshand {

namespace {

constexpr double kPi = std::numbers::pi;

// Conventions for the built-in right hand: +x distal, +y radial (thumb side),
// +z dorsal. Flexion is a positive rotation about +y (x toward the palm at
// -z); abduction/adduction is rotation about z. Offsets approximate published
// average bone lengths scaled to a 19 cm hand.

JointDef joint(std::string name, int parent, Vec3 offset, Vec3 lo, Vec3 hi) {
  JointDef j;
  j.name = std::move(name);
  j.parent = parent;
  j.rest_offset = offset;
  j.limit_lo = lo;
  j.limit_hi = hi;
  return j;
}

// finger joint limit triples {twist, flexion, abduction}
const Vec3 kMcpLo{-0.10, -0.26, -0.35};
const Vec3 kMcpHi{0.10, 1.57, 0.35};
const Vec3 kPipLo{-0.05, -0.09, -0.05};
const Vec3 kPipHi{0.05, 1.75, 0.05};
const Vec3 kDipLo{-0.05, -0.09, -0.05};
const Vec3 kDipHi{0.05, 1.40, 0.05};

struct FingerLayout {
  int mcp, pip, dip;
  double lane_y;  // wrist-frame y of the finger's metacarpal lane
};

MuscleDef muscle(std::string name, std::vector<JointCentricAttachment> path,
                 double f_max, std::vector<int> actuated) {
  MuscleDef m;
  m.name = std::move(name);
  m.path = std::move(path);
  m.f_max = f_max;
  m.actuated_joints = std::move(actuated);
  for (std::size_t k = 0; k < m.path.size(); ++k)
    if (m.path[k].point_id.empty())
      m.path[k].point_id = m.name + "_p" + std::to_string(k);
  return m;
}

JointCentricAttachment at(int joint, double x, double y, double z) {
  JointCentricAttachment a;
  a.joint = joint;
  a.offset = Vec3(x, y, z);
  return a;
}

// Length parameters from the rest-pose path: slack takes 60% and the
// contractile element 40%, so every muscle sits at optimal length at rest.
void fit_lengths(const KinematicTree& tree, MuscleDef& m) {
  const PathGeometry geom = muscle_path_geometry(tree, Pose{}, m);
  m.l_opt = 0.4 * geom.total_length;
  m.l_slack = 0.6 * geom.total_length;
}

}  // namespace

KinematicTree default_tree() {
  const Vec3 free_lo = Vec3::Constant(-kPi);
  const Vec3 free_hi = Vec3::Constant(kPi);

  std::vector<JointDef> joints;
  joints.push_back(joint("wrist", -1, {0, 0, 0}, free_lo, free_hi));
  // index
  joints.push_back(joint("index1", 0, {0.088, 0.026, 0.0}, kMcpLo, kMcpHi));
  joints.push_back(joint("index2", 1, {0.046, 0.0, 0.0}, kPipLo, kPipHi));
  joints.push_back(joint("index3", 2, {0.027, 0.0, 0.0}, kDipLo, kDipHi));
  // middle
  joints.push_back(joint("middle1", 0, {0.091, 0.002, 0.0}, kMcpLo, kMcpHi));
  joints.push_back(joint("middle2", 4, {0.050, 0.0, 0.0}, kPipLo, kPipHi));
  joints.push_back(joint("middle3", 5, {0.030, 0.0, 0.0}, kDipLo, kDipHi));
  // ring
  joints.push_back(joint("ring1", 0, {0.086, -0.022, 0.0}, kMcpLo, kMcpHi));
  joints.push_back(joint("ring2", 7, {0.047, 0.0, 0.0}, kPipLo, kPipHi));
  joints.push_back(joint("ring3", 8, {0.028, 0.0, 0.0}, kDipLo, kDipHi));
  // little
  joints.push_back(joint("little1", 0, {0.078, -0.044, 0.0}, kMcpLo, kMcpHi));
  joints.push_back(joint("little2", 10, {0.037, 0.0, 0.0}, kPipLo, kPipHi));
  joints.push_back(joint("little3", 11, {0.022, 0.0, 0.0}, kDipLo, kDipHi));
  // thumb: CMC, MCP, IP
  joints.push_back(joint("thumb1", 0, {0.023, 0.036, -0.008}, {-0.30, -0.50, -0.80},
                         {0.30, 1.00, 0.50}));
  joints.push_back(joint("thumb2", 13, {0.047, 0.016, -0.004}, {-0.20, -0.26, -0.20},
                         {0.20, 1.00, 0.20}));
  joints.push_back(
      joint("thumb3", 14, {0.033, 0.007, 0.0}, {-0.10, -0.26, -0.10}, {0.10, 1.40, 0.10}));

  std::array<FingertipDef, kNumFingertips> tips{};
  tips[0] = {3, Vec3(0.024, 0.0, 0.0)};    // index
  tips[1] = {6, Vec3(0.026, 0.0, 0.0)};    // middle
  tips[2] = {9, Vec3(0.025, 0.0, 0.0)};    // ring
  tips[3] = {12, Vec3(0.019, 0.0, 0.0)};   // little
  tips[4] = {15, Vec3(0.028, 0.003, 0.0)};  // thumb

  return build_tree(std::move(joints), tips);
}

std::vector<MuscleDef> default_muscle_defs(const KinematicTree& tree) {
  std::vector<MuscleDef> out;
  out.reserve(31);

  const FingerLayout fingers[4] = {
      {1, 2, 3, 0.026},    // digit 2, index
      {4, 5, 6, 0.002},    // digit 3, middle
      {7, 8, 9, -0.022},   // digit 4, ring
      {10, 11, 12, -0.044}  // digit 5, little
  };
  const double fds_fmax[4] = {75, 85, 70, 50};
  const double fdp_fmax[4] = {90, 100, 85, 60};
  const double edc_fmax[4] = {35, 40, 35, 25};

  for (int f = 0; f < 4; ++f) {
    const FingerLayout& fg = fingers[f];
    const std::string digit = std::to_string(f + 2);
    const double y0 = 0.8 * fg.lane_y;

    // superficial flexor: palmar route, inserts on the middle phalanx
    out.push_back(muscle("FDS" + digit + "_R",
                         {at(0, 0.015, y0, -0.011), at(fg.mcp, 0.0, 0, -0.009),
                          at(fg.pip, 0.0, 0, -0.006), at(fg.pip, 0.022, 0, -0.004)},
                         fds_fmax[f], {fg.mcp, fg.pip}));
    // deep flexor: palmar route, inserts on the distal phalanx
    out.push_back(muscle("FDP" + digit + "_R",
                         {at(0, 0.015, y0, -0.013), at(fg.mcp, 0.0, 0, -0.012),
                          at(fg.pip, 0.0, 0, -0.008), at(fg.dip, 0.0, 0, -0.003),
                          at(fg.dip, 0.016, 0, -0.002)},
                         fdp_fmax[f], {fg.mcp, fg.pip, fg.dip}));
    // common extensor: dorsal route over all three joints
    out.push_back(muscle("EDC" + digit + "_R",
                         {at(0, 0.015, y0, 0.010), at(fg.mcp, 0.0, 0, 0.008),
                          at(fg.pip, 0.0, 0, 0.005), at(fg.dip, 0.0, 0, 0.004),
                          at(fg.dip, 0.014, 0, 0.002)},
                         edc_fmax[f], {fg.mcp, fg.pip, fg.dip}));
    // lumbrical: palmar-radial MCP flexor
    out.push_back(muscle("LUM" + digit + "_R",
                         {at(0, 0.030, 0.9 * fg.lane_y, -0.008),
                          at(fg.mcp, 0.0, 0.003, -0.006),
                          at(fg.mcp, 0.020, 0.002, -0.004)},
                         8, {fg.mcp}));
  }

  // index extensor, dorsal, MCP only
  out.push_back(muscle("EIP_R",
                       {at(0, 0.012, 0.018, 0.009), at(1, 0.0, 0, 0.007),
                        at(2, 0.012, 0, 0.004)},
                       18, {1}));

  // interossei: dorsal abduct away from the middle finger, palmar adduct
  // toward it. side = +1 radial, -1 ulnar.
  struct Interosseus {
    const char* name;
    int mcp;
    double lane_y;
    double side;
    double f_max;
  };
  const Interosseus inter[7] = {
      {"DI1_R", 1, 0.026, +1, 18},  {"DI2_R", 4, 0.002, +1, 15},
      {"DI3_R", 7, -0.022, -1, 15}, {"DI4_R", 10, -0.044, -1, 13},
      {"PI1_R", 1, 0.026, -1, 12},  {"PI2_R", 7, -0.022, +1, 12},
      {"PI3_R", 10, -0.044, +1, 10},
  };
  for (const Interosseus& io : inter) {
    out.push_back(muscle(io.name,
                         {at(0, 0.040, 0.9 * io.lane_y + io.side * 0.006, -0.002),
                          at(io.mcp, 0.0, io.side * 0.007, -0.002),
                          at(io.mcp, 0.018, io.side * 0.005, -0.001)},
                         io.f_max, {io.mcp}));
  }

  // thumb group (CMC = 13, MCP = 14, IP = 15)
  out.push_back(muscle("FPL_R",
                       {at(0, 0.010, 0.020, -0.012), at(13, 0.0, 0.002, -0.009),
                        at(14, 0.0, 0, -0.007), at(15, 0.0, 0, -0.005),
                        at(15, 0.018, 0, -0.003)},
                       70, {13, 14, 15}));
  out.push_back(muscle("FPB_R",
                       {at(0, 0.015, 0.025, -0.008), at(13, 0.0, 0.002, -0.008),
                        at(14, 0.0, 0, -0.005), at(14, 0.012, 0, -0.003)},
                       25, {13, 14}));
  out.push_back(muscle("EPL_R",
                       {at(0, 0.010, 0.015, 0.010), at(13, 0.0, 0, 0.007),
                        at(14, 0.0, 0, 0.005), at(15, 0.0, 0, 0.004),
                        at(15, 0.014, 0, 0.002)},
                       30, {13, 14, 15}));
  out.push_back(muscle("EPB_R",
                       {at(0, 0.012, 0.020, 0.008), at(13, 0.0, 0, 0.006),
                        at(14, 0.0, 0, 0.004), at(14, 0.010, 0, 0.002)},
                       15, {13, 14}));
  out.push_back(muscle("APB_R",
                       {at(0, 0.015, 0.030, -0.004), at(13, 0.0, 0.006, -0.003),
                        at(14, 0.008, 0.004, -0.002)},
                       20, {13}));
  out.push_back(muscle("APL_R",
                       {at(0, 0.008, 0.020, 0.002), at(13, 0.0, 0.007, 0.000),
                        at(13, 0.015, 0.008, 0.000)},
                       40, {13}));
  out.push_back(muscle("ADP_R",
                       {at(0, 0.030, 0.000, -0.006), at(13, 0.0, -0.004, -0.004),
                        at(14, 0.008, -0.005, -0.002)},
                       60, {13}));

  for (MuscleDef& m : out) fit_lengths(tree, m);
  return out;
}

Musculature default_musculature(const KinematicTree& tree) {
  Musculature musc;
  musc.muscles = default_muscle_defs(tree);
  musc.states = initial_muscle_states(tree, Pose{}, musc.muscles);
  validate_musculature(tree, musc);
  return musc;
}

KinematicTree reduced_ring_tree() {
  KinematicTree base = default_tree();
  std::vector<JointDef> joints = base.joints;
  for (std::size_t j = 0; j < joints.size(); ++j) {
    joints[j].limit_lo.setZero();
    joints[j].limit_hi.setZero();
  }
  // ring MCP and PIP stay free as pure flexion hinges
  joints[7].limit_lo = Vec3(0, -0.26, 0);
  joints[7].limit_hi = Vec3(0, 1.57, 0);
  joints[8].limit_lo = Vec3(0, -0.09, 0);
  joints[8].limit_hi = Vec3(0, 1.75, 0);
  return build_tree(std::move(joints), base.fingertips);
}

Musculature reduced_ring_musculature(const KinematicTree& tree) {
  // Both muscles are routed in the ring finger's y = -0.022 plane, so every
  // path point keeps that world y under ring flexion and the torque is a pure
  // y (flexion/extension) moment.
  const double lane = -0.022;
  Musculature musc;
  musc.muscles.push_back(muscle("RING_FLEX",
                                {at(0, 0.015, lane, -0.012), at(7, 0.0, 0, -0.010),
                                 at(8, 0.0, 0, -0.007), at(8, 0.024, 0, -0.004)},
                                60, {7, 8}));
  musc.muscles.push_back(muscle("RING_EXT",
                                {at(0, 0.015, lane, 0.012), at(7, 0.0, 0, 0.008),
                                 at(8, 0.0, 0, 0.006), at(8, 0.024, 0, 0.004)},
                                60, {7, 8}));
  for (MuscleDef& m : musc.muscles) fit_lengths(tree, m);
  musc.states = initial_muscle_states(tree, Pose{}, musc.muscles);
  validate_musculature(tree, musc);
  return musc;
}

}  // namespace mshand
