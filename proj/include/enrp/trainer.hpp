#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "enrp/flops.hpp"
#include "enrp/nn.hpp"
#include "enrp/partition.hpp"
#include "enrp/signal.hpp"

namespace enrp {

/// PSNR reference: the full range of the [-1, 1] normalization.
inline constexpr double kPsnrPeak = 2.0;
/// Reported in place of +inf on an exact match (and the ceiling for any value).
inline constexpr double kPsnrCap = 200.0;

struct TrainConfig {
  int steps = 500;
  std::uint64_t seed = 0;
  AdamOptions adam;
  int eval_every = 1;
  int workers = 0;  // 0: one per hardware thread

  void validate() const;
};

/// One sub-network per grid cell, all sharing a configuration.
struct EnsembleModel {
  GridSpec grid;
  int n = 0;  // samples per axis of the signal the model represents
  int input_dim = 2;
  int output_dim = 3;
  SourceRange source;
  std::vector<SubNetwork> subnets;  // subnets[m - 1] owns cell m

  const SubNetworkConfig& config() const;
  void validate() const;
  bool operator==(const EnsembleModel&) const = default;
};

struct StepRecord {
  int step = 0;           // completed optimizer updates
  double mse = 0.0;       // of the clamped reconstruction
  double residual_norm_sum = 0.0;  // sum of per-sample residual norms, unclamped
  double psnr_db = 0.0;
};

struct TrainReport {
  std::vector<StepRecord> records;  // strictly increasing step
  SignalTensor reconstruction;      // clamped to [-1, 1]
  FlopCount flops;
  double wall_time_s = 0.0;

  const StepRecord& final_record() const { return records.back(); }
};

struct TrainResult {
  EnsembleModel model;
  TrainReport report;
};

double psnr_from_mse(double mse, double peak = kPsnrPeak);

/// 10 log10(peak^2 / MSE) with peak 2; exact matches report kPsnrCap.
double psnr(const SignalTensor& reconstruction, const SignalTensor& target);

/// Sum over every sample of the Euclidean norm of the model residual. Sub-networks
/// are evaluated in double precision.
double residual_norm_sum(const EnsembleModel& model, const SignalTensor& signal);

/// Unclamped model output on the full sample lattice.
SignalTensor reconstruct(const EnsembleModel& model, int workers = 0);

/// Seed for the sub-network of cell m.
std::uint64_t cell_seed(std::uint64_t seed, int m);

/// Trains each cell's sub-network full-batch on its own samples. Cells are
/// independent, so the result does not depend on the worker count.
TrainResult train_ensemble(const SignalTensor& signal, const GridSpec& grid, const SubNetworkConfig& config,
                           const TrainConfig& train);

struct DivergenceRun {
  int image = 0;
  int width = 0;
  int repeat = 0;
  double psnr_db = 0.0;
};

struct DivergenceRow {
  int width = 0;
  FlopCount flops;
  double mean_psnr_db = 0.0;
  int runs = 0;
};

struct DivergenceTable {
  std::vector<DivergenceRow> rows;
  std::vector<DivergenceRun> runs;
};

/// Mean final PSNR per width over images x repeats at fixed depth and grid.
DivergenceTable divergence_experiment(std::span<const SignalTensor> images, std::span<const int> widths, int depth,
                                      int grid_order, int repeats, const SubNetworkConfig& base,
                                      const TrainConfig& train);

struct ComparisonRow {
  SubNetworkConfig config;
  int grid_order = 1;
  FlopCount flops;
  double psnr_db = 0.0;
};

/// Each configuration trained once as a single network and once as a
/// grid ensemble of the same sub-network (equal FLOPs by construction).
std::vector<ComparisonRow> compare_activations(const SignalTensor& signal, std::span<const SubNetworkConfig> configs,
                                               int grid_order, const TrainConfig& train);

}  // namespace enrp
