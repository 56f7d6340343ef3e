#include "mshand/defaults.hpp"
#include "mshand/kinematics.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace mshand;

namespace {

constexpr double kPi = std::numbers::pi;

// 16 joints in one chain along +x; joint 1 gets unit offsets so the classic
// two-transform cases can be checked by hand.
KinematicTree chain_tree() {
  std::vector<JointDef> joints;
  for (int j = 0; j < kNumJoints; ++j) {
    JointDef def;
    def.name = "j" + std::to_string(j);
    def.parent = j - 1;
    def.rest_offset = j == 0 ? Vec3(0, 0, 0) : (j == 1 ? Vec3(1, 0, 0) : Vec3(0.01, 0, 0));
    def.limit_lo = Vec3::Constant(-kPi);
    def.limit_hi = Vec3::Constant(kPi);
    joints.push_back(def);
  }
  std::array<FingertipDef, kNumFingertips> tips{};
  tips[0] = {1, Vec3(1, 0, 0)};
  for (int f = 1; f < kNumFingertips; ++f) tips[static_cast<std::size_t>(f)] = {15, Vec3(0.01, 0, 0)};
  return build_tree(std::move(joints), tips);
}

Pose random_pose_in_limits(const KinematicTree& tree, std::mt19937_64& rng) {
  Pose p;
  for (int j = 0; j < kNumJoints; ++j) {
    const JointDef& def = tree.joints[static_cast<std::size_t>(j)];
    for (int a = 0; a < 3; ++a) {
      std::uniform_real_distribution<double> dist(def.limit_lo[a], def.limit_hi[a]);
      p.r[static_cast<std::size_t>(j)][a] = dist(rng);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("build_tree: default hand has 16 joints and 21 keypoints") {
  const KinematicTree tree = default_tree();
  CHECK(tree.joints.size() == kNumJoints);
  CHECK(tree.index_of("wrist") == 0);
  CHECK(tree.index_of("ring1") == 7);
  CHECK(tree.index_of("thumb3") == 15);
  const Keypoints kp = forward_kinematics(tree, Pose{});
  CHECK(kp.size() == 21);
  CHECK(kp[0].norm() == 0.0);  // wrist at the origin of the root frame
}

TEST_CASE("build_tree: validation errors") {
  const KinematicTree good = default_tree();

  SUBCASE("joint count") {
    std::vector<JointDef> joints(good.joints.begin(), good.joints.end() - 1);
    CHECK_THROWS_WITH_AS(build_tree(joints, good.fingertips),
                         doctest::Contains("joint count"), Error);
  }
  SUBCASE("self-parent cycle") {
    std::vector<JointDef> joints = good.joints;
    joints[3].parent = 3;
    CHECK_THROWS_WITH_AS(build_tree(joints, good.fingertips),
                         doctest::Contains("self-parent cycle"), Error);
  }
  SUBCASE("non-topological parent") {
    std::vector<JointDef> joints = good.joints;
    joints[3].parent = 5;
    CHECK_THROWS_AS(build_tree(joints, good.fingertips), Error);
  }
  SUBCASE("zero-length offset") {
    std::vector<JointDef> joints = good.joints;
    joints[2].rest_offset.setZero();
    CHECK_THROWS_AS(build_tree(joints, good.fingertips), Error);
  }
  SUBCASE("non-finite offset") {
    std::vector<JointDef> joints = good.joints;
    joints[2].rest_offset[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(build_tree(joints, good.fingertips), Error);
  }
  SUBCASE("limits out of range") {
    std::vector<JointDef> joints = good.joints;
    joints[4].limit_hi[1] = 4.0;
    CHECK_THROWS_AS(build_tree(joints, good.fingertips), Error);
  }
  SUBCASE("missing fingertip mapping") {
    auto tips = good.fingertips;
    tips[2].joint = -1;
    CHECK_THROWS_WITH_AS(build_tree(good.joints, tips),
                         doctest::Contains("fingertip"), Error);
  }
}

TEST_CASE("forward_kinematics: zero pose gives cumulative rest offsets") {
  const KinematicTree tree = default_tree();
  const Keypoints kp = forward_kinematics(tree, Pose{});
  for (int j = 0; j < kNumJoints; ++j) {
    Vec3 expect = Vec3::Zero();
    for (int a = j; a >= 0; a = tree.joints[static_cast<std::size_t>(a)].parent)
      expect += tree.joints[static_cast<std::size_t>(a)].rest_offset;
    CHECK((kp[static_cast<std::size_t>(j)] - expect).norm() == doctest::Approx(0.0));
  }
  for (int f = 0; f < kNumFingertips; ++f) {
    const FingertipDef& ft = tree.fingertips[static_cast<std::size_t>(f)];
    const Vec3 expect = kp[static_cast<std::size_t>(ft.joint)] + ft.offset;
    CHECK((kp[static_cast<std::size_t>(kNumJoints + f)] - expect).norm() ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("forward_kinematics: hand-computed two-segment flexion") {
  // chain: wrist -> joint1 at (1,0,0) -> fingertip offset (1,0,0).
  // Rotating joint1 by -pi/2 about +z maps +x to -y: tip at (1,-1,0).
  const KinematicTree tree = chain_tree();
  Pose pose;
  pose.r[1] = Vec3(0, 0, -kPi / 2);
  Keypoints kp = forward_kinematics(tree, pose);
  CHECK((kp[16] - Vec3(1, -1, 0)).norm() == doctest::Approx(0.0).epsilon(1e-12));

  pose.r[1] = Vec3(0, 0, kPi / 2);
  kp = forward_kinematics(tree, pose);
  CHECK((kp[16] - Vec3(1, 1, 0)).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("forward_kinematics: root rotation is a rigid rotation of all keypoints") {
  const KinematicTree tree = default_tree();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Pose pose = random_pose_in_limits(tree, rng);
    pose.r[0].setZero();
    const Keypoints base = forward_kinematics(tree, pose);

    const Vec3 aa(0.4, -0.25, 0.6);
    const Eigen::Matrix3d R = axis_angle_matrix(aa);
    Pose rotated = pose;
    rotated.r[0] = aa;
    const Keypoints kp = forward_kinematics(tree, rotated);
    for (int k = 0; k < kNumKeypoints; ++k)
      CHECK((kp[static_cast<std::size_t>(k)] - R * base[static_cast<std::size_t>(k)])
                .norm() < 1e-12);
  }
}

TEST_CASE("forward_kinematics: root translation equivariance and wrist-relative invariance") {
  const KinematicTree base_tree = default_tree();
  std::mt19937_64 rng(12);
  const Vec3 t(0.03, -0.07, 0.11);

  std::vector<JointDef> joints = base_tree.joints;
  joints[0].rest_offset += t;
  const KinematicTree moved_tree = build_tree(joints, base_tree.fingertips);

  for (int trial = 0; trial < 20; ++trial) {
    const Pose pose = random_pose_in_limits(base_tree, rng);
    const Keypoints a = forward_kinematics(base_tree, pose);
    const Keypoints b = forward_kinematics(moved_tree, pose);
    for (int k = 0; k < kNumKeypoints; ++k) {
      CHECK((b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)] - t).norm() <
            1e-12);
      // wrist-relative keypoints are translation invariant
      CHECK(((b[static_cast<std::size_t>(k)] - b[0]) -
             (a[static_cast<std::size_t>(k)] - a[0]))
                .norm() < 1e-12);
    }
  }
}

TEST_CASE("interpolate_poses: endpoints, linearity, direct formula") {
  Pose a, b;
  a.r[3] = Vec3(0.1, -0.2, 0.3);
  b.r[3] = Vec3(0.7, 0.4, -0.5);
  b.r[9] = Vec3(1.0, 0, 0);

  SUBCASE("equal endpoints give copies") {
    const std::vector<Pose> seq = interpolate_poses(a, a, 4);
    CHECK(seq.size() == 5);
    for (const Pose& p : seq)
      for (int j = 0; j < kNumJoints; ++j)
        CHECK((p.r[static_cast<std::size_t>(j)] - a.r[static_cast<std::size_t>(j)]).norm() ==
              0.0);
  }
  SUBCASE("midpoint of a one-component step") {
    Pose zero;
    Pose one;
    one.r[5][1] = 1.0;
    const std::vector<Pose> seq = interpolate_poses(zero, one, 2);
    CHECK(seq[1].r[5][1] == doctest::Approx(0.5));
  }
  SUBCASE("a + k/3 (b-a)") {
    const std::vector<Pose> seq = interpolate_poses(a, b, 3);
    for (int k = 0; k <= 3; ++k)
      for (int j = 0; j < kNumJoints; ++j) {
        const Vec3 expect = a.r[static_cast<std::size_t>(j)] +
                            (k / 3.0) * (b.r[static_cast<std::size_t>(j)] -
                                         a.r[static_cast<std::size_t>(j)]);
        CHECK((seq[static_cast<std::size_t>(k)].r[static_cast<std::size_t>(j)] - expect)
                  .norm() < 1e-15);
      }
  }
  SUBCASE("reversal symmetry") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Pose x, y;
    for (int j = 0; j < kNumJoints; ++j)
      for (int axis = 0; axis < 3; ++axis) {
        x.r[static_cast<std::size_t>(j)][axis] = dist(rng);
        y.r[static_cast<std::size_t>(j)][axis] = dist(rng);
      }
    const std::vector<Pose> fwd = interpolate_poses(x, y, 7);
    const std::vector<Pose> bwd = interpolate_poses(y, x, 7);
    for (int k = 0; k <= 7; ++k)
      for (int j = 0; j < kNumJoints; ++j)
        CHECK((fwd[static_cast<std::size_t>(k)].r[static_cast<std::size_t>(j)] -
               bwd[static_cast<std::size_t>(7 - k)].r[static_cast<std::size_t>(j)])
                  .norm() < 1e-12);
  }
  SUBCASE("intermediate clamping with a tree") {
    const KinematicTree tree = default_tree();
    Pose zero;
    Pose big;
    big.r[1][1] = 4.0;  // interpolation passes through out-of-limit values
    // endpoint is exactly b even though it violates limits; midpoint clamps
    const std::vector<Pose> seq = interpolate_poses(zero, big, 2, &tree);
    CHECK(seq[1].r[1][1] == doctest::Approx(1.57));
    CHECK(seq[2].r[1][1] == doctest::Approx(4.0));
  }
  SUBCASE("n = 0 is an error") {
    CHECK_THROWS_AS(interpolate_poses(a, b, 0), Error);
  }
}

TEST_CASE("finite_diff_velocity: constants, linears, quadratics") {
  auto make_traj = [](int n, double dt, auto f) {
    Trajectory traj;
    traj.dt = dt;
    for (int i = 0; i < n; ++i) {
      TrajectorySample s;
      s.t = i * dt;
      s.pose.r[2][1] = f(s.t);
      traj.samples.push_back(s);
    }
    return traj;
  };

  SUBCASE("constant trajectory has zero velocities") {
    const Trajectory out = finite_diff_velocity(make_traj(6, 0.01, [](double) { return 0.4; }));
    for (const TrajectorySample& s : out.samples) CHECK(s.vel->flat().norm() == 0.0);
  }
  SUBCASE("linear component is exact everywhere") {
    const double c = 3.7;
    const Trajectory out =
        finite_diff_velocity(make_traj(8, 0.01, [&](double t) { return c * t; }));
    for (const TrajectorySample& s : out.samples)
      CHECK(s.vel->r[2][1] == doctest::Approx(c).epsilon(1e-10));
  }
  SUBCASE("central difference is exact for quadratics") {
    // p(t) = t^2 at dt = 0.1: dp/dt at t = 0.5 is exactly 1.0
    const Trajectory out =
        finite_diff_velocity(make_traj(11, 0.1, [](double t) { return t * t; }));
    CHECK(std::abs(out.samples[5].vel->r[2][1] - 1.0) < 1e-10);
  }
  SUBCASE("random quadratics are exact at interior samples") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    const double dt = 0.05;
    const Trajectory out = finite_diff_velocity(
        make_traj(9, dt, [&](double t) { return a * t * t + b * t + c; }));
    for (std::size_t i = 1; i + 1 < out.samples.size(); ++i) {
      const double t = out.samples[i].t;
      CHECK(std::abs(out.samples[i].vel->r[2][1] - (2 * a * t + b)) < 1e-10);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(finite_diff_velocity(make_traj(1, 0.01, [](double) { return 0.0; })),
                    Error);
    Trajectory bad = make_traj(4, 0.01, [](double t) { return t; });
    bad.samples[2].t += 1e-5;
    CHECK_THROWS_WITH_AS(finite_diff_velocity(bad),
                         doctest::Contains("non-uniform"), Error);
  }
}

TEST_CASE("clamp_to_limits reports changes") {
  const KinematicTree tree = default_tree();
  Pose p;
  p.r[1][1] = 2.0;
  bool changed = false;
  const Pose c = clamp_to_limits(tree, p, &changed);
  CHECK(changed);
  CHECK(c.r[1][1] == doctest::Approx(1.57));
  CHECK(within_limits(tree, c));

  changed = true;
  clamp_to_limits(tree, Pose{}, &changed);
  CHECK_FALSE(changed);
}
