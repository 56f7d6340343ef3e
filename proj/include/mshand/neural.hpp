#pragma once

#include "mshand/kinematics.hpp"

#include <cmath>
#include <cstdint>

namespace mshand {

enum class Activation { Tanh, Relu };
enum class OutputTransform { Identity, Sigmoid };

struct Layer {
  Eigen::MatrixXd W;  // (out x in)
  Eigen::VectorXd b;
};

struct MLPParams {
  std::vector<Layer> layers;
  Activation activation = Activation::Tanh;
  OutputTransform output = OutputTransform::Identity;

  int input_dim() const;
  int output_dim() const;
  void validate() const;  // dimensions chain, entries finite
};

/// dims = {in, hidden..., out}. Weights are uniform in +-1/sqrt(fan_in);
/// zero_init_last zeroes the final layer (residual-style identity start).
MLPParams make_mlp(const std::vector<int>& dims, Activation activation,
                   OutputTransform output, std::uint64_t seed,
                   bool zero_init_last = false);

Eigen::VectorXd mlp_forward(const MLPParams& params, const Eigen::VectorXd& x);
/// Batched forward; columns are samples.
Eigen::MatrixXd mlp_forward_batch(const MLPParams& params, const Eigen::MatrixXd& X);

struct MLPCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;   // affine outputs per layer
  std::vector<Eigen::MatrixXd> post;  // after nonlinearity / output transform
};

MLPCache mlp_forward_cached(const MLPParams& params, const Eigen::MatrixXd& X);

/// Network output before the output transform (pre-sigmoid for a policy head).
const Eigen::MatrixXd& preoutput(const MLPCache& cache);

struct MLPGradients {
  std::vector<Layer> layers;  // dL/dW, dL/db (sums over batch columns)
  Eigen::MatrixXd input;      // dL/dx
};

/// Reverse-mode gradients with `upstream` applied to the transformed output.
MLPGradients mlp_backward(const MLPParams& params, const MLPCache& cache,
                          const Eigen::MatrixXd& upstream);
/// Same, but `upstream` is w.r.t. the pre-transform output.
MLPGradients mlp_backward_preoutput(const MLPParams& params, const MLPCache& cache,
                                    const Eigen::MatrixXd& upstream);
/// Single-sample convenience wrapper over forward+backward.
MLPGradients mlp_gradient(const MLPParams& params, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& upstream);

// ---------------------------------------------------------------------------
// The two task networks.

inline constexpr int kIDNetInputDim = 4 * kPoseDim;  // 192 = 16 x 3 x 4
inline constexpr int kIDNetHidden = 256;
inline constexpr int kRefineNetInputDim = 2 * kPoseDim - 3;  // 93 = 48 + 45
inline constexpr int kRefineNetHidden = 64;

/// Inverse-dynamics network: (p_i, v_i, p_next, v_next) -> excitations.
/// Sigmoid output head plus a learned per-output log-std used only by the
/// stochastic training policy; inference uses the mean.
struct IDNet {
  MLPParams mlp;
  Eigen::VectorXd log_std;

  int n_muscle() const { return mlp.output_dim(); }
};

IDNet make_idnet(int n_muscle = 31, std::uint64_t seed = 0);

/// [p_i | v_i | p_next | v_next] flattened to 192 entries.
Eigen::VectorXd idnet_input(const Pose& p, const Velocity& v, const Pose& p_next,
                            const Velocity& v_next);

/// Deterministic policy mean; every component lies in (0,1).
Eigen::VectorXd idnet_infer(const IDNet& net, const Pose& p, const Velocity& v,
                            const Pose& p_next, const Velocity& v_next);

/// Pose refiner in residual form: output = p_pred + MLP([p_pred | p_ref w/o
/// wrist]). The final layer starts at zero, so an untrained refiner is the
/// identity on p_pred. Output is clamped to joint limits.
struct RefineNet {
  MLPParams mlp;
};

RefineNet make_refinenet(std::uint64_t seed = 0);

Pose refine(const RefineNet& net, const KinematicTree& tree, const Pose& p_pred,
            const Pose& p_ref);

// ---------------------------------------------------------------------------
// Optimizer machinery shared by the trainers.

template <class Mat>
struct AdamState {
  Mat m, v;

  void update(Mat& param, const Mat& grad, double lr, int t) {
    if (m.size() == 0) {
      m = Mat::Zero(param.rows(), param.cols());
      v = Mat::Zero(param.rows(), param.cols());
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

struct MLPAdam {
  std::vector<AdamState<Eigen::MatrixXd>> w;
  std::vector<AdamState<Eigen::VectorXd>> b;
  int t = 0;

  void update(MLPParams& params, const MLPGradients& grads, double lr);
};

}  // namespace mshand
