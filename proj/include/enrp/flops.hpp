#pragma once

// Analytic forward-pass FLOP model. One multiply-accumulate counts as two
// FLOPs; sine/ReLU activations are free. The Fourier-feature mapping adds its
// own projection MACs plus one FLOP per cos/sin evaluation.

#include <cstdint>
#include <string>

#include "enrp/nn.hpp"
#include "enrp/partition.hpp"

namespace enrp {

struct FlopCount {
  std::uint64_t total = 0;
  bool operator==(const FlopCount&) const = default;
};

std::uint64_t flops_per_sample(const SubNetworkConfig& config, int input_dim, int output_dim);

/// FLOPs for one forward pass over all n^rank samples. Each sample goes
/// through exactly one sub-network, so the grid order only enters through
/// the divisibility check.
FlopCount total_flops(const SubNetworkConfig& config, const GridSpec& grid, int n, int input_dim, int output_dim);

/// "6.48 G", "557.84 M", "12.00 K" or the raw integer below 1000.
std::string format_flops(std::uint64_t flops);

}  // namespace enrp
