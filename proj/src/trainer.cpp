#include "enrp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "enrp/parallel.hpp"

namespace enrp {

void TrainConfig::validate() const {
  if (steps < 1) throw Error("steps must be >= 1");
  if (eval_every < 1 || eval_every > steps) throw Error("eval_every must be in 1..steps");
  if (!(adam.learning_rate > 0.0)) throw Error("learning rate must be positive");
}

const SubNetworkConfig& EnsembleModel::config() const {
  if (subnets.empty()) throw Error("ensemble has no sub-networks");
  return subnets.front().config();
}

void EnsembleModel::validate() const {
  grid.check_divides(n);
  if (static_cast<int>(subnets.size()) != grid.cell_count())
    throw Error("ensemble holds " + std::to_string(subnets.size()) + " sub-networks, grid needs " +
                std::to_string(grid.cell_count()));
  for (const auto& net : subnets)
    if (!(net.config() == subnets.front().config()) || net.input_dim() != input_dim ||
        net.output_dim() != output_dim)
      throw Error("ensemble sub-networks must share one configuration");
}

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double psnr(const SignalTensor& reconstruction, const SignalTensor& target) {
  if (!reconstruction.same_shape(target) || reconstruction.values.size() != target.values.size())
    throw ShapeError("psnr: reconstruction and target shapes differ");
  double sse = 0.0;
  for (std::size_t k = 0; k < target.values.size(); ++k) {
    const double d = reconstruction.values[k] - target.values[k];
    sse += d * d;
  }
  return psnr_from_mse(sse / static_cast<double>(target.values.size()));
}

std::uint64_t cell_seed(std::uint64_t seed, int m) {
  return make_rng({seed, static_cast<std::uint64_t>(m), 0xce11u})();
}

namespace {

struct CellData {
  CellId cell;
  Mat<float> x;       // input_dim x batch (local coordinates)
  Mat<float> target;  // output_dim x batch
};

std::vector<CellData> prepare_cells(const SignalTensor& signal, const GridSpec& grid) {
  auto blocks = partition_signal(signal, grid);
  std::vector<CellData> cells;
  cells.reserve(blocks.size());
  for (auto& b : blocks)
    cells.push_back({b.cell, b.coords.local.transpose().cast<float>(), b.targets.transpose().cast<float>()});
  return cells;
}

void check_signal(const SignalTensor& signal, const GridSpec& grid) {
  signal.validate();
  if (signal.rank != grid.rank) throw ShapeError("signal rank does not match grid rank");
  grid.check_divides(signal.n);
}

struct CellStats {
  std::vector<double> sse;  // clamped squared error per record
  std::vector<double> norm_sum;
  Eigen::MatrixXd output;   // final outputs, batch x channels
};

void accumulate(const Mat<float>& out, const Mat<float>& target, double& sse, double& norm_sum) {
  double s = 0.0, e = 0.0;
  for (Eigen::Index col = 0; col < out.cols(); ++col) {
    double norm2 = 0.0;
    for (Eigen::Index row = 0; row < out.rows(); ++row) {
      const double y = out(row, col);
      const double t = target(row, col);
      const double dc = std::clamp(y, -1.0, 1.0) - t;
      s += dc * dc;
      norm2 += (y - t) * (y - t);
    }
    e += std::sqrt(norm2);
  }
  sse = s;
  norm_sum = e;
}

}  // namespace

SignalTensor reconstruct(const EnsembleModel& model, int workers) {
  model.validate();
  const auto coords_rank = model.grid.rank;
  SignalTensor layout(coords_rank, model.n, model.output_dim);
  auto cells = prepare_cells(layout, model.grid);
  std::vector<CellOutput> outputs(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t k) {
    ForwardCache<float> cache;
    forward_features(model.subnets[k], cells[k].x, cache);
    outputs[k] = {cells[k].cell, cache.output.transpose().cast<double>()};
  });
  SignalTensor out = aggregate_outputs(outputs, model.grid, model.n, model.output_dim);
  out.source = model.source;
  return out;
}

double residual_norm_sum(const EnsembleModel& model, const SignalTensor& signal) {
  model.validate();
  if (signal.n != model.n || signal.rank != model.grid.rank || signal.channels != model.output_dim)
    throw ShapeError("residual_norm_sum: signal does not match model");
  const auto blocks = partition_signal(signal, model.grid);
  double total = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const SubNetworkD net = model.subnets[k].cast<double>();
    const Mat<double> y = forward(net, Mat<double>(blocks[k].coords.local));
    total += (y - blocks[k].targets).rowwise().norm().sum();
  }
  return total;
}

TrainResult train_ensemble(const SignalTensor& signal, const GridSpec& grid, const SubNetworkConfig& config,
                           const TrainConfig& train) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  train.validate();
  check_signal(signal, grid);

  const int input_dim = grid.rank;
  const int output_dim = signal.channels;
  const auto cells = prepare_cells(signal, grid);

  std::vector<int> record_steps;
  for (int s = 0; s < train.steps; s += train.eval_every) record_steps.push_back(s);
  record_steps.push_back(train.steps);
  const std::size_t n_records = record_steps.size();

  EnsembleModel model;
  model.grid = grid;
  model.n = signal.n;
  model.input_dim = input_dim;
  model.output_dim = output_dim;
  model.source = signal.source;
  model.subnets.resize(cells.size());
  std::vector<CellStats> stats(cells.size());

  parallel_for(cells.size(), train.workers, [&](std::size_t k) {
    const CellData& cell = cells[k];
    SubNetwork net = init_subnetwork<float>(config, input_dim, output_dim, cell_seed(train.seed, cell.cell.m));
    auto state = AdamState<float>::for_network(net, train.adam);
    auto grads = Gradients<float>::like(net);
    ForwardCache<float> cache;
    CellStats& st = stats[k];
    st.sse.assign(n_records, 0.0);
    st.norm_sum.assign(n_records, 0.0);

    std::size_t rec = 0;
    for (int step = 1; step <= train.steps; ++step) {
      forward_features(net, cell.x, cache);
      if (rec < n_records && record_steps[rec] == step - 1) {
        accumulate(cache.output, cell.target, st.sse[rec], st.norm_sum[rec]);
        ++rec;
      }
      const float loss = backward_features(net, cache, cell.target, grads);
      if (!std::isfinite(loss)) throw TrainingDiverged(step, cell.cell.m);
      adam_step(net, grads, state);
    }
    forward_features(net, cell.x, cache);
    if (!cache.output.allFinite()) throw TrainingDiverged(train.steps, cell.cell.m);
    accumulate(cache.output, cell.target, st.sse[n_records - 1], st.norm_sum[n_records - 1]);
    st.output = cache.output.transpose().cast<double>();
    model.subnets[k] = std::move(net);
  });

  TrainReport report;
  const double entries = static_cast<double>(signal.values.size());
  report.records.reserve(n_records);
  for (std::size_t r = 0; r < n_records; ++r) {
    double sse = 0.0, norm_sum = 0.0;
    for (const auto& st : stats) {
      sse += st.sse[r];
      norm_sum += st.norm_sum[r];
    }
    const double mse = sse / entries;
    report.records.push_back({record_steps[r], mse, norm_sum, psnr_from_mse(mse)});
  }

  std::vector<CellOutput> outputs;
  outputs.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) outputs.push_back({cells[k].cell, std::move(stats[k].output)});
  report.reconstruction = clamped(aggregate_outputs(outputs, grid, signal.n, output_dim));
  report.reconstruction.source = signal.source;
  report.flops = total_flops(config, grid, signal.n, input_dim, output_dim);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(model), std::move(report)};
}

DivergenceTable divergence_experiment(std::span<const SignalTensor> images, std::span<const int> widths, int depth,
                                      int grid_order, int repeats, const SubNetworkConfig& base,
                                      const TrainConfig& train) {
  if (images.empty() || widths.empty()) throw Error("divergence experiment needs images and widths");
  if (repeats < 1) throw Error("repeats must be >= 1");
  for (const auto& img : images)
    if (img.n != images.front().n || img.rank != images.front().rank)
      throw ShapeError("divergence experiment images must share one size");

  DivergenceTable table;
  const GridSpec grid{grid_order, images.front().rank};
  for (int w : widths) {
    SubNetworkConfig cfg = base;
    cfg.depth = depth;
    cfg.width = w;
    DivergenceRow row;
    row.width = w;
    row.flops = total_flops(cfg, grid, images.front().n, grid.rank, images.front().channels);
    double sum = 0.0;
    for (std::size_t img = 0; img < images.size(); ++img) {
      for (int k = 0; k < repeats; ++k) {
        TrainConfig tc = train;
        tc.seed = make_rng({train.seed, img, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(k)})();
        const auto result = train_ensemble(images[img], grid, cfg, tc);
        const double p = result.report.final_record().psnr_db;
        table.runs.push_back({static_cast<int>(img), w, k, p});
        sum += p;
        ++row.runs;
      }
    }
    row.mean_psnr_db = sum / row.runs;
    table.rows.push_back(row);
  }
  return table;
}

std::vector<ComparisonRow> compare_activations(const SignalTensor& signal, std::span<const SubNetworkConfig> configs,
                                               int grid_order, const TrainConfig& train) {
  std::vector<ComparisonRow> rows;
  for (const auto& cfg : configs) {
    for (int order : {1, grid_order}) {
      const GridSpec grid{order, signal.rank};
      const auto result = train_ensemble(signal, grid, cfg, train);
      rows.push_back({cfg, order, result.report.flops, result.report.final_record().psnr_db});
    }
  }
  return rows;
}

}  // namespace enrp
