#pragma once

#include "mshand/kinematics.hpp"

#include <map>

namespace mshand {

/// Attachment expressed relative to a named bone (the raw anatomical form).
struct BoneCentricAttachment {
  std::string point_id;
  std::string bone;
  Vec3 offset = Vec3::Zero();
};

/// Attachment expressed relative to a joint frame of the kinematic tree.
struct JointCentricAttachment {
  std::string point_id;
  int joint = -1;
  Vec3 offset = Vec3::Zero();
};

struct MuscleDef {
  std::string name;
  std::vector<JointCentricAttachment> path;  // first = origin, last = insertion
  double f_max = 0.0;                        // max isometric force, N
  double l_opt = 0.0;                        // optimal contractile length, m
  double l_slack = 0.0;                      // series-elastic slack length, m
  std::vector<int> actuated_joints;
};

struct MuscleState {
  double activation = 0.0;    // dimensionless, [0,1]
  double fiber_length = 0.0;  // m
};

struct Musculature {
  std::vector<MuscleDef> muscles;
  std::vector<MuscleState> states;  // parallel to muscles
};

// Hill-curve constants. The activation time scales are the usual 10/40 ms
// pair; curve shapes follow standard biomechanics parameterizations.
inline constexpr double kTauActivate = 0.010;       // s, excitation > activation
inline constexpr double kTauDeactivate = 0.040;     // s, excitation <= activation
inline constexpr double kForceLengthWidth = 0.45;   // gaussian width of f_L
inline constexpr double kEccentricMax = 1.4;        // f_V clamp
inline constexpr double kMaxShorteningRate = 10.0;  // optimal lengths / s
inline constexpr double kMinFiberFraction = 0.01;   // fiber length floor, in l_opt

/// Re-expresses a bone-centric attachment relative to the joint its bone maps
/// to. The joint center is the mean of the joint's bone-group positions; the
/// returned offset is exactly (world position of the point) - (joint center).
JointCentricAttachment map_bone_to_joint(
    const BoneCentricAttachment& att,
    const std::map<std::string, Vec3>& bone_positions,
    const std::map<int, std::vector<std::string>>& bone_groups,
    const std::map<std::string, int>& bone_to_joint);

struct PathGeometry {
  std::vector<Vec3> points;    // world positions of the attachments
  double total_length = 0.0;   // m
  std::vector<Vec3> segments;  // consecutive point differences
};

PathGeometry muscle_path_geometry(const KinematicTree& tree, const Pose& pose,
                                  const MuscleDef& m);
PathGeometry muscle_path_geometry(const KinematicTree& tree,
                                  const JointTransforms& transforms,
                                  const MuscleDef& m);

/// One explicit-Euler step of first-order activation dynamics
/// da/dt = (u - a)/tau, clamped to [0,1].
MuscleState activation_step(MuscleState s, double excitation, double dt);

/// Hill-type contractile + parallel-elastic force:
/// F = f_max * (a * f_L(l) * f_V(v) + f_PE(l)), never negative.
double muscle_force(const MuscleDef& m, const MuscleState& s, double norm_length,
                    double norm_velocity);

/// Contractile-element length for a given geometric path length
/// (rigid-tendon: path - l_slack, floored at a small positive fraction of l_opt).
double fiber_length_from_path(const MuscleDef& m, double path_length);

/// Torque of a force acting along `segment` at a point `lever` away from the
/// joint center: F * (lever x segment/|segment|). The magnitude is
/// F * moment arm; the direction is the moment axis.
Vec3 segment_torque(double force, const Vec3& lever, const Vec3& segment);

/// Advances all muscle activations by dt, updates fiber lengths from the pose,
/// and accumulates per-joint torque vectors. Each actuated joint is torqued by
/// the path segment crossing it, with the lever taken at the path point
/// immediately distal to the joint and the force along the pull direction.
JointTorques muscle_torques(const KinematicTree& tree, const Pose& pose,
                            Musculature& musc, const Eigen::VectorXd& excitations,
                            double dt);

/// Muscle definition still expressed against named bones (pre-mapping form).
struct BoneCentricMuscle {
  std::string name;
  std::vector<BoneCentricAttachment> path;
  double f_max = 0.0;
  double l_opt = 0.0;
  double l_slack = 0.0;
  std::vector<int> actuated_joints;
};

/// Attachments farther than this from their joint are rejected after mapping.
inline constexpr double kMaxAttachmentOffset = 0.03;  // m

/// Inverts a joint->bones grouping into the bone->joint mapping function.
/// A bone may belong to exactly one group.
std::map<std::string, int> derive_bone_mapping(
    const std::map<int, std::vector<std::string>>& bone_groups);

/// Maps every path point of every muscle to joint-centric form, merges
/// per-point offset overrides (the manual-revision hook), and validates that
/// each final attachment lies within kMaxAttachmentOffset of its joint.
std::vector<MuscleDef> map_muscle_set(
    const std::vector<BoneCentricMuscle>& muscles,
    const std::map<std::string, Vec3>& bone_positions,
    const std::map<int, std::vector<std::string>>& bone_groups,
    const std::map<std::string, int>& bone_to_joint,
    const std::map<std::string, Vec3>& overrides = {});

/// Structural validation: path length >= 2, positive parameters, actuated
/// joints on the origin->insertion chain with a crossing segment.
void validate_musculature(const KinematicTree& tree, const Musculature& musc);

/// Fresh states: zero activation, fiber lengths from the given pose.
std::vector<MuscleState> initial_muscle_states(const KinematicTree& tree,
                                               const Pose& pose,
                                               const std::vector<MuscleDef>& muscles);

}  // namespace mshand
