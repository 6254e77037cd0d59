#include "enrp/flops.hpp"

#include <cstdio>

namespace enrp {

std::uint64_t flops_per_sample(const SubNetworkConfig& config, int input_dim, int output_dim) {
  config.validate();
  if (input_dim < 1 || output_dim < 1) throw ShapeError("network dimensions must be >= 1");
  const std::uint64_t w = static_cast<std::uint64_t>(config.width);
  const std::uint64_t d = static_cast<std::uint64_t>(config.depth);
  std::uint64_t mlp_in = static_cast<std::uint64_t>(input_dim);
  std::uint64_t extra = 0;
  if (config.activation == Activation::FourierRelu) {
    const std::uint64_t ms = static_cast<std::uint64_t>(config.mapping_size);
    extra = 2 * static_cast<std::uint64_t>(input_dim) * ms + 2 * ms;
    mlp_in = 2 * ms;
  }
  const std::uint64_t macs = mlp_in * w + d * w * w + w * static_cast<std::uint64_t>(output_dim);
  return 2 * macs + extra;
}

FlopCount total_flops(const SubNetworkConfig& config, const GridSpec& grid, int n, int input_dim, int output_dim) {
  grid.check_divides(n);
  std::uint64_t samples = static_cast<std::uint64_t>(n);
  if (grid.rank == 2) samples *= static_cast<std::uint64_t>(n);
  return {flops_per_sample(config, input_dim, output_dim) * samples};
}

std::string format_flops(std::uint64_t flops) {
  const double v = static_cast<double>(flops);
  char buf[64];
  if (v >= 1e9)
    std::snprintf(buf, sizeof buf, "%.2f G", v / 1e9);
  else if (v >= 1e6)
    std::snprintf(buf, sizeof buf, "%.2f M", v / 1e6);
  else if (v >= 1e3)
    std::snprintf(buf, sizeof buf, "%.2f K", v / 1e3);
  else
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(flops));
  return buf;
}

}  // namespace enrp
