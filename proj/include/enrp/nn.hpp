#pragma once

// Dense coordinate networks (sine, ReLU and Fourier-feature ReLU variants)
// with hand-derived reverse-mode gradients and an Adam optimizer.
//
// Internally every activation matrix is feature-major: one column per sample.
// The public forward()/backward() wrappers accept the row-per-sample layout.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "enrp/error.hpp"

namespace enrp {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class Activation { Sine, Relu, FourierRelu };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

struct SubNetworkConfig {
  int depth = 3;   // hidden-to-hidden layers
  int width = 256;
  Activation activation = Activation::Sine;
  double omega0 = 30.0;        // first sine layer frequency
  double hidden_omega = 30.0;  // frequency of deeper sine layers
  int mapping_size = 65;
  double mapping_scale = 10.0;

  void validate() const;
  bool operator==(const SubNetworkConfig&) const = default;
};

template <typename T>
struct DenseLayer {
  Mat<T> weight;  // out x in
  Vec<T> bias;    // out
};

template <typename T>
class BasicSubNetwork {
 public:
  BasicSubNetwork() = default;

  /// Zero-initialized network with the layer shapes implied by `config`.
  BasicSubNetwork(SubNetworkConfig config, int input_dim, int output_dim)
      : config_(config), input_dim_(input_dim), output_dim_(output_dim) {
    config_.validate();
    if (input_dim < 1 || output_dim < 1) throw ShapeError("network dimensions must be >= 1");
    const int first_in = mlp_input_dim();
    const int w = config_.width;
    layers_.reserve(static_cast<std::size_t>(config_.depth) + 2);
    auto add = [&](int out, int in) {
      layers_.push_back({Mat<T>::Zero(out, in), Vec<T>::Zero(out)});
    };
    add(w, first_in);
    for (int k = 0; k < config_.depth; ++k) add(w, w);
    add(output_dim, w);
    if (config_.activation == Activation::FourierRelu)
      fourier_ = Mat<T>::Zero(config_.mapping_size, input_dim);
  }

  const SubNetworkConfig& config() const { return config_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  /// Width of the first dense layer's input (2*mapping_size for Fourier features).
  int mlp_input_dim() const {
    return config_.activation == Activation::FourierRelu ? 2 * config_.mapping_size : input_dim_;
  }

  const std::vector<DenseLayer<T>>& layers() const { return layers_; }
  std::vector<DenseLayer<T>>& layers() { return layers_; }

  bool has_fourier_matrix() const { return config_.activation == Activation::FourierRelu; }
  const Mat<T>& fourier_matrix() const { return fourier_; }
  Mat<T>& fourier_matrix() { return fourier_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  template <typename U>
  BasicSubNetwork<U> cast() const {
    BasicSubNetwork<U> out(config_, input_dim_, output_dim_);
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      out.layers()[k].weight = layers_[k].weight.template cast<U>();
      out.layers()[k].bias = layers_[k].bias.template cast<U>();
    }
    if (has_fourier_matrix()) out.fourier_matrix() = fourier_.template cast<U>();
    return out;
  }

  bool operator==(const BasicSubNetwork& o) const {
    if (!(config_ == o.config_) || input_dim_ != o.input_dim_ || output_dim_ != o.output_dim_ ||
        layers_.size() != o.layers_.size() || fourier_ != o.fourier_)
      return false;
    for (std::size_t k = 0; k < layers_.size(); ++k)
      if (layers_[k].weight != o.layers_[k].weight || layers_[k].bias != o.layers_[k].bias)
        return false;
    return true;
  }

 private:
  SubNetworkConfig config_;
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<DenseLayer<T>> layers_;
  Mat<T> fourier_;  // mapping_size x input_dim, frozen
};

using SubNetwork = BasicSubNetwork<float>;
using SubNetworkD = BasicSubNetwork<double>;

/// Draws initial parameters in double precision from a generator keyed by
/// `seed`, then casts. Float and double networks from one seed agree up to
/// rounding.
SubNetworkD init_subnetwork_double(const SubNetworkConfig& config, int input_dim, int output_dim,
                                   std::uint64_t seed);

template <typename T = float>
BasicSubNetwork<T> init_subnetwork(const SubNetworkConfig& config, int input_dim, int output_dim,
                                   std::uint64_t seed) {
  auto net = init_subnetwork_double(config, input_dim, output_dim, seed);
  if constexpr (std::is_same_v<T, double>)
    return net;
  else
    return net.template cast<T>();
}

/// Gradient set, shaped like the network's dense layers.
template <typename T>
struct Gradients {
  std::vector<DenseLayer<T>> layers;

  static Gradients like(const BasicSubNetwork<T>& net) {
    Gradients g;
    for (const auto& l : net.layers())
      g.layers.push_back({Mat<T>::Zero(l.weight.rows(), l.weight.cols()), Vec<T>::Zero(l.bias.size())});
    return g;
  }
};

/// Reusable buffers for one forward/backward pass.
template <typename T>
struct ForwardCache {
  std::vector<Mat<T>> inputs;  // inputs[k] feeds layer k
  std::vector<Mat<T>> pre;     // pre-activation of layer k
  Mat<T> output;               // output_dim x batch
  Mat<T> delta;
  Mat<T> scratch;
};

namespace detail {

template <typename T>
void check_input(const BasicSubNetwork<T>& net, const Mat<T>& x) {
  if (x.rows() != net.input_dim())
    throw ShapeError("coordinate dimension " + std::to_string(x.rows()) + " does not match network input " +
                     std::to_string(net.input_dim()));
}

}  // namespace detail

/// Feature-major forward pass. `x` is input_dim x batch.
template <typename T>
void forward_features(const BasicSubNetwork<T>& net, const Mat<T>& x, ForwardCache<T>& cache) {
  detail::check_input(net, x);
  const auto& layers = net.layers();
  const std::size_t count = layers.size();
  const auto& cfg = net.config();
  cache.inputs.resize(count);
  cache.pre.resize(count);

  if (cfg.activation == Activation::FourierRelu) {
    const int ms = cfg.mapping_size;
    auto& feat = cache.inputs[0];
    feat.resize(2 * ms, x.cols());
    cache.scratch.noalias() = net.fourier_matrix() * x;
    cache.scratch *= static_cast<T>(2.0 * std::numbers::pi);
    feat.topRows(ms) = cache.scratch.array().cos();
    feat.bottomRows(ms) = cache.scratch.array().sin();
  } else {
    cache.inputs[0] = x;
  }

  for (std::size_t k = 0; k < count; ++k) {
    const auto& layer = layers[k];
    auto& z = cache.pre[k];
    z.noalias() = layer.weight * cache.inputs[k];
    z.colwise() += layer.bias;
    const bool last = k + 1 == count;
    Mat<T>& a = last ? cache.output : cache.inputs[k + 1];
    if (last) {
      a = z;
    } else if (cfg.activation == Activation::Sine) {
      const T omega = static_cast<T>(k == 0 ? cfg.omega0 : cfg.hidden_omega);
      a = (omega * z.array()).sin();
    } else {
      a = z.array().max(T(0));
    }
  }
}

/// Feature-major backward pass for the mean-squared-error loss. Expects
/// `cache` to hold the forward pass of the same inputs. Returns the loss.
template <typename T>
T backward_features(const BasicSubNetwork<T>& net, ForwardCache<T>& cache, const Mat<T>& target,
                    Gradients<T>& grads) {
  const auto& layers = net.layers();
  const std::size_t count = layers.size();
  const auto& cfg = net.config();
  if (target.rows() != net.output_dim() || target.cols() != cache.output.cols())
    throw ShapeError("target shape does not match network output");
  const Eigen::Index batch = target.cols();
  if (batch == 0) throw ShapeError("empty batch");
  if (grads.layers.size() != count) grads = Gradients<T>::like(net);

  const T denom = static_cast<T>(batch * target.rows());
  cache.delta = cache.output - target;
  const T loss = cache.delta.squaredNorm() / denom;
  cache.delta *= T(2) / denom;

  for (std::size_t k = count; k-- > 0;) {
    const auto& layer = layers[k];
    if (k + 1 != count) {
      // delta currently holds dL/da for layer k; turn it into dL/dz
      const auto& z = cache.pre[k];
      if (cfg.activation == Activation::Sine) {
        const T omega = static_cast<T>(k == 0 ? cfg.omega0 : cfg.hidden_omega);
        cache.delta.array() *= omega * (omega * z.array()).cos();
      } else {
        cache.delta.array() *= (z.array() > T(0)).template cast<T>();
      }
    }
    grads.layers[k].weight.noalias() = cache.delta * cache.inputs[k].transpose();
    grads.layers[k].bias = cache.delta.rowwise().sum();
    if (k > 0) {
      cache.scratch.noalias() = layer.weight.transpose() * cache.delta;
      cache.delta.swap(cache.scratch);
    }
  }
  return loss;
}

/// Evaluates the network on row-per-sample coordinates (batch x input_dim).
template <typename T>
Mat<T> forward(const BasicSubNetwork<T>& net, const Mat<std::type_identity_t<T>>& coords) {
  ForwardCache<T> cache;
  const Mat<T> x = coords.transpose();
  forward_features(net, x, cache);
  return cache.output.transpose();
}

template <typename T>
struct LossAndGradients {
  T loss;
  Gradients<T> grads;
};

/// MSE loss over all batch x output_dim entries and its exact gradient.
template <typename T>
LossAndGradients<T> backward(const BasicSubNetwork<T>& net, const Mat<std::type_identity_t<T>>& coords,
                             const Mat<std::type_identity_t<T>>& target) {
  if (coords.rows() == 0) throw ShapeError("empty batch");
  if (target.rows() != coords.rows() || target.cols() != net.output_dim())
    throw ShapeError("target must be batch x output_dim");
  ForwardCache<T> cache;
  const Mat<T> x = coords.transpose();
  forward_features(net, x, cache);
  LossAndGradients<T> out{T(0), Gradients<T>::like(net)};
  const Mat<T> t = target.transpose();
  out.loss = backward_features(net, cache, t, out.grads);
  return out;
}

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamOptions options;
  std::int64_t step = 0;
  std::vector<DenseLayer<T>> first_moment;
  std::vector<DenseLayer<T>> second_moment;

  static AdamState for_network(const BasicSubNetwork<T>& net, AdamOptions options = {}) {
    AdamState s;
    s.options = options;
    s.first_moment = Gradients<T>::like(net).layers;
    s.second_moment = s.first_moment;
    return s;
  }
};

/// One bias-corrected Adam update, in place.
template <typename T>
void adam_step(BasicSubNetwork<T>& net, const Gradients<T>& grads, AdamState<T>& state) {
  auto& layers = net.layers();
  if (grads.layers.size() != layers.size() || state.first_moment.size() != layers.size())
    throw ShapeError("optimizer state does not match network");
  state.step += 1;
  const auto& o = state.options;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(o.beta1);
  const T b2 = static_cast<T>(o.beta2);
  const T step_size = static_cast<T>(o.learning_rate / (1.0 - std::pow(o.beta1, t)));
  const T inv_bc2 = static_cast<T>(1.0 / (1.0 - std::pow(o.beta2, t)));
  const T eps = static_cast<T>(o.epsilon);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (T(1) - b1) * g;
    v.array() = b2 * v.array() + (T(1) - b2) * g.array().square();
    param.array() -= step_size * m.array() / ((v.array() * inv_bc2).sqrt() + eps);
  };
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weight, grads.layers[k].weight, state.first_moment[k].weight, state.second_moment[k].weight);
    update(layers[k].bias, grads.layers[k].bias, state.first_moment[k].bias, state.second_moment[k].bias);
  }
}

}  // namespace enrp
