#pragma once

#include "mshand/dynamics.hpp"
#include "mshand/neural.hpp"

namespace mshand {

/// Which pose is injected into the simulator before simulating each frame:
/// the refined pose of the previous frame when available, or always the
/// predicted pose.
enum class FeedbackMode { Refined, Predicted };

struct PipelineResult {
  Trajectory refined;
  Trajectory reference;
};

/// Simulation-in-the-loop refinement. Per frame i: infer excitations for the
/// predicted transition (p_i, v_i) -> (p_{i+1}, v_{i+1}), inject the feedback
/// pose with v_i into the simulator, advance one control step to get the
/// reference pose, and fuse predicted and reference poses with the refiner.
/// Frame 0 of both outputs copies the predicted frame 0; refined samples keep
/// the predicted velocities, reference samples carry simulated ones.
PipelineResult refine_trajectory(const Trajectory& pred, const KinematicTree& tree,
                            Musculature musc, const IDNet& idnet,
                            const RefineNet& refinenet, const DynamicsParams& params,
                            FeedbackMode feedback = FeedbackMode::Refined);

}  // namespace mshand
