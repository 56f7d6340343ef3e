#include "mshand/defaults.hpp"
#include "mshand/io.hpp"
#include "mshand/training.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace mshand;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "mshand_io_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("trajectory: exact round trip including odd magnitudes") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-12, 6);

  Trajectory traj;
  traj.dt = 0.01;
  for (int i = 0; i < 9; ++i) {
    TrajectorySample s;
    s.t = i * traj.dt;
    Velocity v;
    for (int j = 0; j < kNumJoints; ++j)
      for (int a = 0; a < 3; ++a) {
        s.pose.r[static_cast<std::size_t>(j)][a] =
            mant(rng) * std::pow(10.0, expo(rng));
        v.r[static_cast<std::size_t>(j)][a] = mant(rng) * std::pow(10.0, expo(rng));
      }
    if (i != 4) s.vel = v;  // one frame without velocities
    traj.samples.push_back(std::move(s));
  }

  const auto path = temp_dir() / "roundtrip.jsonl";
  save_trajectory(traj, path);
  const Trajectory loaded = load_trajectory(path);
  REQUIRE(loaded.samples.size() == traj.samples.size());
  CHECK(loaded.dt == traj.dt);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    CHECK(loaded.samples[i].t == traj.samples[i].t);
    CHECK(loaded.samples[i].pose.flat() == traj.samples[i].pose.flat());
    CHECK(loaded.samples[i].vel.has_value() == traj.samples[i].vel.has_value());
    if (traj.samples[i].vel)
      CHECK(loaded.samples[i].vel->flat() == traj.samples[i].vel->flat());
  }

  // byte-identical re-serialization
  const auto path2 = temp_dir() / "roundtrip2.jsonl";
  save_trajectory(loaded, path2);
  std::ifstream a(path), b(path2);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("trajectory: malformed files carry line numbers") {
  const auto dir = temp_dir();

  SUBCASE("47-component pose") {
    const auto path = dir / "short_pose.jsonl";
    std::string pose47 = "[";
    for (int i = 0; i < 47; ++i) pose47 += (i ? ",0" : "0");
    pose47 += "]";
    write_text(path,
               "{\"format\":\"mshand-traj\",\"version\":1,\"dt\":0.01}\n"
               "{\"t\":0.0,\"pose\":" + pose47 + ",\"vel\":null}\n");
    CHECK_THROWS_WITH_AS(load_trajectory(path), doctest::Contains(":2:"), Error);
    CHECK_THROWS_WITH_AS(load_trajectory(path), doctest::Contains("47"), Error);
  }
  SUBCASE("unknown version") {
    const auto path = dir / "future.jsonl";
    write_text(path, "{\"format\":\"mshand-traj\",\"version\":9,\"dt\":0.01}\n");
    CHECK_THROWS_WITH_AS(load_trajectory(path), doctest::Contains("version"), Error);
  }
  SUBCASE("wrong format tag") {
    const auto path = dir / "other.jsonl";
    write_text(path, "{\"format\":\"something-else\",\"version\":1,\"dt\":0.01}\n");
    CHECK_THROWS_AS(load_trajectory(path), Error);
  }
  SUBCASE("non-uniform spacing") {
    const auto path = dir / "jitter.jsonl";
    std::string pose48 = "[";
    for (int i = 0; i < 48; ++i) pose48 += (i ? ",0" : "0");
    pose48 += "]";
    write_text(path,
               "{\"format\":\"mshand-traj\",\"version\":1,\"dt\":0.01}\n"
               "{\"t\":0.0,\"pose\":" + pose48 + ",\"vel\":null}\n" +
               "{\"t\":0.02,\"pose\":" + pose48 + ",\"vel\":null}\n");
    CHECK_THROWS_WITH_AS(load_trajectory(path), doctest::Contains("non-uniform"),
                         Error);
  }
  SUBCASE("missing velocities load as absent") {
    const auto path = dir / "novel.jsonl";
    std::string pose48 = "[";
    for (int i = 0; i < 48; ++i) pose48 += (i ? ",0.5" : "0.5");
    pose48 += "]";
    write_text(path,
               "{\"format\":\"mshand-traj\",\"version\":1,\"dt\":0.01}\n"
               "{\"t\":0.0,\"pose\":" + pose48 + "}\n");
    const Trajectory t = load_trajectory(path);
    CHECK_FALSE(t.samples[0].vel.has_value());
  }
}

TEST_CASE("tree config round trip") {
  const KinematicTree tree = default_tree();
  const auto path = temp_dir() / "tree.json";
  save_tree(tree, path);
  const KinematicTree loaded = load_tree(path);
  REQUIRE(loaded.joints.size() == tree.joints.size());
  for (std::size_t j = 0; j < tree.joints.size(); ++j) {
    CHECK(loaded.joints[j].name == tree.joints[j].name);
    CHECK(loaded.joints[j].parent == tree.joints[j].parent);
    CHECK(loaded.joints[j].rest_offset == tree.joints[j].rest_offset);
    CHECK(loaded.joints[j].limit_lo == tree.joints[j].limit_lo);
    CHECK(loaded.joints[j].limit_hi == tree.joints[j].limit_hi);
  }
  for (int f = 0; f < kNumFingertips; ++f) {
    CHECK(loaded.fingertips[static_cast<std::size_t>(f)].joint ==
          tree.fingertips[static_cast<std::size_t>(f)].joint);
    CHECK(loaded.fingertips[static_cast<std::size_t>(f)].offset ==
          tree.fingertips[static_cast<std::size_t>(f)].offset);
  }
}

TEST_CASE("muscle config round trip") {
  const KinematicTree tree = default_tree();
  const std::vector<MuscleDef> muscles = default_muscle_defs(tree);
  const auto path = temp_dir() / "muscles.json";
  save_muscles(muscles, tree, path);
  const std::vector<MuscleDef> loaded = load_muscles(path, tree);
  REQUIRE(loaded.size() == muscles.size());
  for (std::size_t m = 0; m < muscles.size(); ++m) {
    CHECK(loaded[m].name == muscles[m].name);
    CHECK(loaded[m].f_max == muscles[m].f_max);
    CHECK(loaded[m].l_opt == muscles[m].l_opt);
    CHECK(loaded[m].l_slack == muscles[m].l_slack);
    CHECK(loaded[m].actuated_joints == muscles[m].actuated_joints);
    REQUIRE(loaded[m].path.size() == muscles[m].path.size());
    for (std::size_t p = 0; p < muscles[m].path.size(); ++p) {
      CHECK(loaded[m].path[p].joint == muscles[m].path[p].joint);
      CHECK(loaded[m].path[p].offset == muscles[m].path[p].offset);
    }
  }
}

TEST_CASE("bone-centric config files drive the mapping path") {
  const auto dir = temp_dir();
  write_text(dir / "bones.json", R"({
    "format": "mshand-bones", "version": 1,
    "bones": {"radius": [0.0, 0.0, 0.0], "ulna": [0.01, 0.0, 0.0],
              "prox4": [0.086, -0.022, 0.0]},
    "bone_groups": {"wrist": ["radius", "ulna"], "ring1": ["prox4"]}
  })");
  write_text(dir / "attachments.json", R"({
    "format": "mshand-attachments", "version": 1,
    "attachments": [{
      "name": "TEST_FLEX",
      "path": [{"point_id": "o", "bone": "radius", "offset": [0.01, 0.0, -0.012]},
               {"point_id": "i", "bone": "prox4", "offset": [0.02, 0.0, -0.006]}],
      "f_max": 50.0, "l_opt": 0.04, "l_slack": 0.06,
      "actuated_joints": ["ring1"]
    }]
  })");
  write_text(dir / "override.json", R"({
    "format": "mshand-override", "version": 1,
    "points": {"i": [0.019, 0.0, -0.005]}
  })");

  const KinematicTree tree = default_tree();
  const BoneCentricConfig bones = load_bone_config(dir / "bones.json");
  CHECK(bones.bones.size() == 3);
  const std::vector<BoneCentricMuscle> atts =
      load_attachments(dir / "attachments.json", tree);
  REQUIRE(atts.size() == 1);
  CHECK(atts[0].actuated_joints == std::vector<int>{7});

  std::map<int, std::vector<std::string>> groups;
  for (const auto& [name, group] : bones.bone_groups)
    groups[tree.index_of(name)] = group;
  const auto mapping = derive_bone_mapping(groups);
  const auto overrides = load_override(dir / "override.json");
  const std::vector<MuscleDef> mapped =
      map_muscle_set(atts, bones.bones, groups, mapping, overrides);
  REQUIRE(mapped.size() == 1);
  CHECK(mapped[0].path[1].offset == Vec3(0.019, 0.0, -0.005));
  // origin offset: q - group mean of {radius, ulna} = (0.01,-0,-0.012)+(0,0,0)-(0.005,0,0)
  CHECK((mapped[0].path[0].offset - Vec3(0.005, 0.0, -0.012)).norm() < 1e-15);
}

TEST_CASE("app config round trip and system bundles") {
  AppConfig cfg;
  cfg.system = "reduced-ring";
  cfg.dynamics.substeps = 2;
  cfg.training.seed = 42;
  cfg.training.idnet_batch = 256;
  cfg.feedback = FeedbackMode::Predicted;
  const auto path = temp_dir() / "config.json";
  save_app_config(cfg, path);
  const AppConfig loaded = load_app_config(path);
  CHECK(loaded.system == "reduced-ring");
  CHECK(loaded.dynamics.substeps == 2);
  CHECK(loaded.training.seed == 42);
  CHECK(loaded.training.idnet_batch == 256);
  CHECK(loaded.feedback == FeedbackMode::Predicted);

  const SystemBundle sys = build_system(loaded);
  CHECK(sys.musculature.muscles.size() == 2);

  SUBCASE("comments are tolerated") {
    write_text(path, "// tuned for the bench\n"
                     "{\"format\":\"mshand-config\",\"version\":1,"
                     "\"system\":\"default\"}\n");
    CHECK(load_app_config(path).system == "default");
  }
  SUBCASE("unknown system is rejected") {
    write_text(path, "{\"format\":\"mshand-config\",\"version\":1,"
                     "\"system\":\"nope\"}\n");
    CHECK_THROWS_AS(load_app_config(path), Error);
  }
}

TEST_CASE("format_double survives a decimal round trip") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    const double v = mant(rng) * std::pow(10.0, expo(rng));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("training log CSV layout") {
  const TrainLog log{{0, 0.25, 0.1}, {1, 0.5, 0.25}};
  const auto path = temp_dir() / "log.csv";
  save_log_csv(log, path, "update", "mean_reward");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "update,mean_reward,wall_time_s");
  std::getline(in, line);
  CHECK(line == "0,0.25,0.1");
}
