#include "mshand/defaults.hpp"
#include "mshand/pipeline.hpp"
#include "mshand/training.hpp"

#include <doctest.h>

using namespace mshand;

TEST_CASE("refine_trajectory: identity refiner reproduces the predicted trajectory") {
  const KinematicTree tree = reduced_ring_tree();
  const Musculature musc = reduced_ring_musculature(tree);
  const DynamicsParams params;
  const IDNet idnet = make_idnet(2, 17);       // arbitrary untrained policy
  const RefineNet refinenet = make_refinenet(19);  // residual identity

  const Trajectory pred = gen_trajectories(tree, 1, 50, 23)[0];
  const PipelineResult out = refine_trajectory(pred, tree, musc, idnet, refinenet, params);

  REQUIRE(out.refined.samples.size() == pred.samples.size());
  REQUIRE(out.reference.samples.size() == pred.samples.size());
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    CHECK(out.refined.samples[i].pose.flat() == pred.samples[i].pose.flat());
    CHECK(out.refined.samples[i].vel->flat() == pred.samples[i].vel->flat());
  }

  // the reference trajectory is the simulator's own motion and differs
  double diff = 0.0;
  for (std::size_t i = 1; i < pred.samples.size(); ++i)
    diff += (out.reference.samples[i].pose.flat() - pred.samples[i].pose.flat()).norm();
  CHECK(diff > 0.0);

  // with an identity refiner both feedback modes coincide
  const PipelineResult alt = refine_trajectory(pred, tree, musc, idnet, refinenet, params,
                                          FeedbackMode::Predicted);
  for (std::size_t i = 0; i < pred.samples.size(); ++i)
    CHECK(alt.reference.samples[i].pose.flat() ==
          out.reference.samples[i].pose.flat());
}

TEST_CASE("refine_trajectory: refined poses always satisfy joint limits") {
  const KinematicTree tree = reduced_ring_tree();
  const Musculature musc = reduced_ring_musculature(tree);
  const DynamicsParams params;
  const IDNet idnet = make_idnet(2, 29);

  RefineNet wild = make_refinenet(31);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (Layer& l : wild.mlp.layers)
    for (Eigen::Index r = 0; r < l.W.rows(); ++r)
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = dist(rng);

  const Trajectory pred = gen_trajectories(tree, 1, 40, 41)[0];
  const PipelineResult out = refine_trajectory(pred, tree, musc, idnet, wild, params);
  for (const TrajectorySample& s : out.refined.samples)
    CHECK(within_limits(tree, s.pose, 0.0));
  // reference poses are simulator states, which also respect limits
  for (const TrajectorySample& s : out.reference.samples)
    CHECK(within_limits(tree, s.pose, 1e-9));
}

TEST_CASE("refine_trajectory: deterministic and shape-checked") {
  const KinematicTree tree = reduced_ring_tree();
  const Musculature musc = reduced_ring_musculature(tree);
  const DynamicsParams params;
  const IDNet idnet = make_idnet(2, 43);
  const RefineNet refinenet = make_refinenet(47);
  const Trajectory pred = gen_trajectories(tree, 1, 30, 53)[0];

  const PipelineResult a = refine_trajectory(pred, tree, musc, idnet, refinenet, params);
  const PipelineResult b = refine_trajectory(pred, tree, musc, idnet, refinenet, params);
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    CHECK(a.refined.samples[i].pose.flat() == b.refined.samples[i].pose.flat());
    CHECK(a.reference.samples[i].pose.flat() == b.reference.samples[i].pose.flat());
  }

  SUBCASE("too-short input") {
    Trajectory one;
    one.dt = 0.01;
    one.samples.push_back({0.0, Pose{}, Velocity{}});
    CHECK_THROWS_AS(refine_trajectory(one, tree, musc, idnet, refinenet, params), Error);
  }
  SUBCASE("muscle count mismatch") {
    const IDNet wrong = make_idnet(31, 1);
    CHECK_THROWS_AS(refine_trajectory(pred, tree, musc, wrong, refinenet, params), Error);
  }
}

TEST_CASE("refine_trajectory: velocities are filled when the input lacks them") {
  const KinematicTree tree = reduced_ring_tree();
  const Musculature musc = reduced_ring_musculature(tree);
  const IDNet idnet = make_idnet(2, 3);
  const RefineNet refinenet = make_refinenet(4);

  Trajectory pred = gen_trajectories(tree, 1, 20, 5)[0];
  for (TrajectorySample& s : pred.samples) s.vel.reset();
  const PipelineResult out =
      refine_trajectory(pred, tree, musc, idnet, refinenet, DynamicsParams{});
  CHECK(out.refined.samples.size() == pred.samples.size());
  for (const TrajectorySample& s : out.refined.samples) CHECK(s.vel.has_value());
}
