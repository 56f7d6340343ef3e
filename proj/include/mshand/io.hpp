#pragma once

#include "mshand/dynamics.hpp"
#include "mshand/neural.hpp"
#include "mshand/pipeline.hpp"
#include "mshand/training.hpp"

#include <filesystem>
#include <iosfwd>

namespace mshand {

// All file formats carry {"format": "...", "version": N}; loading an unknown
// format or a higher version fails loudly.

inline constexpr int kTrajFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;
inline constexpr int kNetFormatVersion = 1;

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// Trajectory files: JSON lines. Header {"format":"mshand-traj","version":1,
// "dt":...} followed by one {"t":...,"pose":[48],"vel":[48]|null} per frame.
Trajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);

// Tree config: {"joints":[{name,parent,offset,limits:[[lo,hi]x3]}],
// "fingertips":[{joint,offset}]}. Joints may be referenced by index or name.
KinematicTree load_tree(const std::filesystem::path& path);
void save_tree(const KinematicTree& tree, const std::filesystem::path& path);

// Muscle config: {"muscles":[{name,path:[{joint,offset,point_id?}],f_max,
// l_opt,l_slack,actuated_joints}]}.
std::vector<MuscleDef> load_muscles(const std::filesystem::path& path,
                                    const KinematicTree& tree);
void save_muscles(const std::vector<MuscleDef>& muscles,
                  const KinematicTree& tree, const std::filesystem::path& path);

// Bone-centric inputs for the attachment mapping path.
struct BoneCentricConfig {
  std::map<std::string, Vec3> bones;                         // world positions
  std::map<std::string, std::vector<std::string>> bone_groups;  // joint name -> bones
};

BoneCentricConfig load_bone_config(const std::filesystem::path& path);
std::vector<BoneCentricMuscle> load_attachments(const std::filesystem::path& path,
                                                const KinematicTree& tree);
/// Override file: {"points": {point_id: [x,y,z]}}.
std::map<std::string, Vec3> load_override(const std::filesystem::path& path);

// Network checkpoints: JSON with layer shapes and row-major weights.
void save_idnet(const IDNet& net, const std::filesystem::path& path);
IDNet load_idnet(const std::filesystem::path& path);
void save_refinenet(const RefineNet& net, const std::filesystem::path& path);
RefineNet load_refinenet(const std::filesystem::path& path);

/// Top-level configuration: which system to build plus dynamics, PD,
/// pipeline and training sections. `system` is "default", "reduced-ring" or
/// explicit tree/muscle file paths.
struct AppConfig {
  std::string system = "default";
  std::filesystem::path tree_path;     // used when system == "files"
  std::filesystem::path muscles_path;  // used when system == "files"
  DynamicsParams dynamics;
  PDGains gains;
  FeedbackMode feedback = FeedbackMode::Refined;
  TrainConfig training;
};

AppConfig default_app_config();
/// Parses a config file (JSON, // comments allowed). Missing sections keep
/// their defaults.
AppConfig load_app_config(const std::filesystem::path& path);
void save_app_config(const AppConfig& cfg, const std::filesystem::path& path);

struct SystemBundle {
  KinematicTree tree;
  Musculature musculature;
};

/// Materializes the tree and musculature an AppConfig refers to.
SystemBundle build_system(const AppConfig& cfg);

/// Training log CSV: header "<index_col>,<value_col>,wall_time_s".
void save_log_csv(const TrainLog& log, const std::filesystem::path& path,
                  const std::string& index_col, const std::string& value_col);

}  // namespace mshand
