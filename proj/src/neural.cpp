#include "mshand/neural.hpp"

#include <cmath>
#include <random>

namespace mshand {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::Tanh:
      return z.array().tanh();
    case Activation::Relu:
      return z.cwiseMax(0.0);
  }
  throw Error("unknown activation");
}

// Derivative expressed through the activated value.
Eigen::MatrixXd activation_grad_from_post(const Eigen::MatrixXd& post, Activation act) {
  switch (act) {
    case Activation::Tanh:
      return (1.0 - post.array().square()).matrix();
    case Activation::Relu:
      return (post.array() > 0.0).cast<double>().matrix();
  }
  throw Error("unknown activation");
}

Eigen::MatrixXd apply_output(const Eigen::MatrixXd& z, OutputTransform out) {
  switch (out) {
    case OutputTransform::Identity:
      return z;
    case OutputTransform::Sigmoid:
      // numerically stable logistic
      return z.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
  }
  throw Error("unknown output transform");
}

}  // namespace

int MLPParams::input_dim() const {
  if (layers.empty()) throw Error("mlp has no layers");
  return static_cast<int>(layers.front().W.cols());
}

int MLPParams::output_dim() const {
  if (layers.empty()) throw Error("mlp has no layers");
  return static_cast<int>(layers.back().W.rows());
}

void MLPParams::validate() const {
  if (layers.empty()) throw Error("mlp has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.b.size() != layer.W.rows())
      throw Error("mlp layer " + std::to_string(l) + ": bias/weight shape mismatch");
    if (l > 0 && layers[l - 1].W.rows() != layer.W.cols())
      throw Error("mlp layer " + std::to_string(l) + ": dimensions do not chain");
    if (!layer.W.allFinite() || !layer.b.allFinite())
      throw Error("mlp layer " + std::to_string(l) + ": non-finite parameters");
  }
}

MLPParams make_mlp(const std::vector<int>& dims, Activation activation,
                   OutputTransform output, std::uint64_t seed, bool zero_init_last) {
  if (dims.size() < 2) throw Error("mlp needs at least input and output dims");
  MLPParams params;
  params.activation = activation;
  params.output = output;
  std::mt19937_64 rng(derive_seed(seed, 0x6d6c7031u));
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    if (fan_in < 1 || fan_out < 1) throw Error("mlp dims must be positive");
    Layer layer;
    layer.W.resize(fan_out, fan_in);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    const bool zero = zero_init_last && l + 2 == dims.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.W(r, c) = zero ? 0.0 : dist(rng);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MLPCache mlp_forward_cached(const MLPParams& params, const Eigen::MatrixXd& X) {
  if (X.rows() != params.input_dim())
    throw Error("mlp input dimension " + std::to_string(X.rows()) + " != " +
                std::to_string(params.input_dim()));
  MLPCache cache;
  cache.input = X;
  const Eigen::MatrixXd* cur = &cache.input;
  const std::size_t n_layers = params.layers.size();
  cache.pre.reserve(n_layers);
  cache.post.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = params.layers[l].W * (*cur);
    z.colwise() += params.layers[l].b;
    cache.pre.push_back(std::move(z));
    if (l + 1 < n_layers)
      cache.post.push_back(apply_activation(cache.pre.back(), params.activation));
    else
      cache.post.push_back(apply_output(cache.pre.back(), params.output));
    cur = &cache.post.back();
  }
  return cache;
}

const Eigen::MatrixXd& preoutput(const MLPCache& cache) { return cache.pre.back(); }

Eigen::MatrixXd mlp_forward_batch(const MLPParams& params, const Eigen::MatrixXd& X) {
  return mlp_forward_cached(params, X).post.back();
}

Eigen::VectorXd mlp_forward(const MLPParams& params, const Eigen::VectorXd& x) {
  return mlp_forward_batch(params, x);
}

namespace {

MLPGradients backward_impl(const MLPParams& params, const MLPCache& cache,
                           Eigen::MatrixXd delta) {
  const int n_layers = static_cast<int>(params.layers.size());
  MLPGradients grads;
  grads.layers.resize(static_cast<std::size_t>(n_layers));
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& below =
        (l == 0) ? cache.input : cache.post[static_cast<std::size_t>(l - 1)];
    grads.layers[static_cast<std::size_t>(l)].W = delta * below.transpose();
    grads.layers[static_cast<std::size_t>(l)].b = delta.rowwise().sum();
    Eigen::MatrixXd dbelow = params.layers[static_cast<std::size_t>(l)].W.transpose() * delta;
    if (l == 0) {
      grads.input = std::move(dbelow);
    } else {
      delta = dbelow.cwiseProduct(activation_grad_from_post(
          cache.post[static_cast<std::size_t>(l - 1)], params.activation));
    }
  }
  return grads;
}

}  // namespace

MLPGradients mlp_backward(const MLPParams& params, const MLPCache& cache,
                          const Eigen::MatrixXd& upstream) {
  if (upstream.rows() != params.output_dim() || upstream.cols() != cache.input.cols())
    throw Error("mlp upstream shape mismatch");
  Eigen::MatrixXd delta;
  switch (params.output) {
    case OutputTransform::Identity:
      delta = upstream;
      break;
    case OutputTransform::Sigmoid: {
      const Eigen::MatrixXd& y = cache.post.back();
      delta = upstream.cwiseProduct(
          (y.array() * (1.0 - y.array())).matrix());
      break;
    }
  }
  return backward_impl(params, cache, std::move(delta));
}

MLPGradients mlp_backward_preoutput(const MLPParams& params, const MLPCache& cache,
                                    const Eigen::MatrixXd& upstream) {
  if (upstream.rows() != params.output_dim() || upstream.cols() != cache.input.cols())
    throw Error("mlp upstream shape mismatch");
  return backward_impl(params, cache, upstream);
}

MLPGradients mlp_gradient(const MLPParams& params, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& upstream) {
  const MLPCache cache = mlp_forward_cached(params, x);
  return mlp_backward(params, cache, upstream);
}

// ---------------------------------------------------------------------------

IDNet make_idnet(int n_muscle, std::uint64_t seed) {
  if (n_muscle < 1) throw Error("idnet needs at least one muscle output");
  IDNet net;
  net.mlp = make_mlp({kIDNetInputDim, kIDNetHidden, kIDNetHidden, n_muscle},
                     Activation::Tanh, OutputTransform::Sigmoid,
                     derive_seed(seed, 0x1d4e31u));
  net.log_std = Eigen::VectorXd::Constant(n_muscle, -1.0);
  return net;
}

Eigen::VectorXd idnet_input(const Pose& p, const Velocity& v, const Pose& p_next,
                            const Velocity& v_next) {
  Eigen::VectorXd x(kIDNetInputDim);
  x.segment(0, kPoseDim) = p.flat();
  x.segment(kPoseDim, kPoseDim) = v.flat();
  x.segment(2 * kPoseDim, kPoseDim) = p_next.flat();
  x.segment(3 * kPoseDim, kPoseDim) = v_next.flat();
  return x;
}

Eigen::VectorXd idnet_infer(const IDNet& net, const Pose& p, const Velocity& v,
                            const Pose& p_next, const Velocity& v_next) {
  return mlp_forward(net.mlp, idnet_input(p, v, p_next, v_next));
}

RefineNet make_refinenet(std::uint64_t seed) {
  RefineNet net;
  net.mlp = make_mlp({kRefineNetInputDim, kRefineNetHidden, kPoseDim},
                     Activation::Tanh, OutputTransform::Identity,
                     derive_seed(seed, 0x5e51a3u), /*zero_init_last=*/true);
  return net;
}

Pose refine(const RefineNet& net, const KinematicTree& tree, const Pose& p_pred,
            const Pose& p_ref) {
  Eigen::VectorXd x(kRefineNetInputDim);
  x.segment(0, kPoseDim) = p_pred.flat();
  x.segment(kPoseDim, kPoseDim - 3) = p_ref.flat().tail(kPoseDim - 3);
  const Eigen::VectorXd delta = mlp_forward(net.mlp, x);
  const Pose raw = Pose::from_flat(p_pred.flat() + delta);
  return clamp_to_limits(tree, raw);
}

void MLPAdam::update(MLPParams& params, const MLPGradients& grads, double lr) {
  if (w.empty()) {
    w.resize(params.layers.size());
    b.resize(params.layers.size());
  }
  ++t;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    w[l].update(params.layers[l].W, grads.layers[l].W, lr, t);
    b[l].update(params.layers[l].b, grads.layers[l].b, lr, t);
  }
}

}  // namespace mshand
