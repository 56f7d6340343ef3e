#include "mshand/pipeline.hpp"

namespace mshand {

PipelineResult refine_trajectory(const Trajectory& pred, const KinematicTree& tree,
                            Musculature musc, const IDNet& idnet,
                            const RefineNet& refinenet, const DynamicsParams& params,
                            FeedbackMode feedback) {
  params.validate();
  if (pred.samples.size() < 2)
    throw Error("refinement needs at least 2 predicted samples");
  if (idnet.n_muscle() != static_cast<int>(musc.muscles.size()))
    throw Error("idnet output dimension does not match muscle count");

  Trajectory input = pred.has_velocities() ? pred : finite_diff_velocity(pred);

  PipelineResult out;
  out.refined = input;
  out.reference = input;

  SimState state =
      make_state(tree, musc, input.samples[0].pose, *input.samples[0].vel);

  for (std::size_t i = 0; i + 1 < input.samples.size(); ++i) {
    const Pose& p_i = input.samples[i].pose;
    const Velocity& v_i = *input.samples[i].vel;
    const Pose& p_next = input.samples[i + 1].pose;
    const Velocity& v_next = *input.samples[i + 1].vel;

    const Eigen::VectorXd exc = idnet_infer(idnet, p_i, v_i, p_next, v_next);

    const Pose& feedback_pose =
        feedback == FeedbackMode::Refined ? out.refined.samples[i].pose : p_i;
    state = set_state(std::move(state), tree, musc, feedback_pose, v_i);
    state = step(std::move(state), tree, musc, exc, params);

    if (!state.pose.is_finite() || !state.velocity.is_finite())
      throw Error("refinement produced a non-finite simulator state at frame " +
                  std::to_string(i + 1));

    out.reference.samples[i + 1].pose = state.pose;
    out.reference.samples[i + 1].vel = state.velocity;
    // refined samples keep the predicted velocities
    out.refined.samples[i + 1].pose = refine(refinenet, tree, p_next, state.pose);
  }
  return out;
}

}  // namespace mshand
