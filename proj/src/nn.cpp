#include "enrp/nn.hpp"

#include <random>

#include "enrp/parallel.hpp"

namespace enrp {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Sine: return "sine";
    case Activation::Relu: return "relu";
    case Activation::FourierRelu: return "fourier";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "sine" || name == "siren") return Activation::Sine;
  if (name == "relu") return Activation::Relu;
  if (name == "fourier" || name == "ff" || name == "fourier_relu") return Activation::FourierRelu;
  throw Error("unknown activation '" + std::string(name) + "' (expected sine, relu or fourier)");
}

void SubNetworkConfig::validate() const {
  if (depth < 1) throw Error("depth must be >= 1, got " + std::to_string(depth));
  if (width < 1) throw Error("width must be >= 1, got " + std::to_string(width));
  if (activation == Activation::Sine && !(omega0 > 0.0 && hidden_omega > 0.0))
    throw Error("sine frequencies must be positive");
  if (activation == Activation::FourierRelu && (mapping_size < 1 || !(mapping_scale > 0.0)))
    throw Error("Fourier mapping size and scale must be positive");
}

SubNetworkD init_subnetwork_double(const SubNetworkConfig& config, int input_dim, int output_dim,
                                   std::uint64_t seed) {
  SubNetworkD net(config, input_dim, output_dim);
  auto rng = make_rng({seed, 0x5eedu});

  if (net.has_fourier_matrix()) {
    std::normal_distribution<double> gauss(0.0, config.mapping_scale);
    auto& b = net.fourier_matrix();
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = gauss(rng);
  }

  auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& w = layers[k].weight;
    const double fan_in = static_cast<double>(w.cols());
    double bound;
    if (config.activation == Activation::Sine)
      bound = k == 0 ? 1.0 / fan_in : std::sqrt(6.0 / fan_in) / config.hidden_omega;
    else
      bound = std::sqrt(6.0 / fan_in);  // Kaiming uniform, ReLU gain
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uni(rng);
    layers[k].bias.setZero();
  }
  return net;
}

}  // namespace enrp
