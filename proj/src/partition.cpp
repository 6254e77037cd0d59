#include "enrp/partition.hpp"

#include <cstdint>

#include "enrp/error.hpp"

namespace enrp {

void GridSpec::validate() const {
  if (order < 1) throw Error("grid order M must be >= 1, got " + std::to_string(order));
  if (rank != 1 && rank != 2) throw Error("grid rank must be 1 or 2");
}

void GridSpec::check_divides(int n) const {
  validate();
  if (n < 2) throw ShapeError("signal needs at least 2 samples per axis");
  if (n % order != 0) throw DivisibilityError(n, order);
}

std::string to_string(const CellId& cell) {
  return "m=" + std::to_string(cell.m) + " (i=" + std::to_string(cell.i) + ", j=" + std::to_string(cell.j) + ")";
}

CellId cell_from_linear(const GridSpec& grid, int m) {
  grid.validate();
  if (m < 1 || m > grid.cell_count())
    throw Error("cell index m=" + std::to_string(m) + " out of range 1.." + std::to_string(grid.cell_count()));
  if (grid.rank == 1) return {m, m, 1};
  return {m, (m - 1) / grid.order + 1, (m - 1) % grid.order + 1};
}

double lattice_coordinate(int n, int r) {
  return 2.0 * static_cast<double>(r - 1) / static_cast<double>(n - 1) - 1.0;
}

CoordinateBatch global_coords(int n, int rank) {
  if (n < 2) throw ShapeError("global_coords needs N >= 2");
  if (rank != 1 && rank != 2) throw ShapeError("rank must be 1 or 2");
  CoordinateBatch b;
  b.n = n;
  b.rank = rank;
  const Eigen::Index count = rank == 2 ? Eigen::Index(n) * n : n;
  b.global.resize(count, rank);
  b.samples.reserve(static_cast<std::size_t>(count));
  Eigen::Index row = 0;
  for (int r = 1; r <= n; ++r) {
    if (rank == 1) {
      b.global(row++, 0) = lattice_coordinate(n, r);
      b.samples.push_back({r, 1});
      continue;
    }
    for (int c = 1; c <= n; ++c) {
      b.global(row, 0) = lattice_coordinate(n, r);
      b.global(row, 1) = lattice_coordinate(n, c);
      b.samples.push_back({r, c});
      ++row;
    }
  }
  b.local = b.global;
  return b;
}

namespace {

// Cell along one axis whose half-open extent holds lattice index r. The
// comparison (r-1)/(n-1) >= (i-1)/M is done in exact integer arithmetic.
int axis_cell(int order, int n, int r) {
  const std::int64_t k = (static_cast<std::int64_t>(r - 1) * order) / (n - 1);
  return static_cast<int>(std::min<std::int64_t>(k + 1, order));
}

// Sample indices owned by `cell`, row-major.
std::vector<SampleIndex> cell_samples(const CellId& cell, const GridSpec& grid, int n) {
  const int q = n / grid.order;
  std::vector<SampleIndex> out;
  if (grid.rank == 1) {
    out.reserve(static_cast<std::size_t>(q));
    for (int r = (cell.i - 1) * q + 1; r <= cell.i * q; ++r) out.push_back({r, 1});
    return out;
  }
  out.reserve(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
  for (int r = (cell.i - 1) * q + 1; r <= cell.i * q; ++r)
    for (int c = (cell.j - 1) * q + 1; c <= cell.j * q; ++c) out.push_back({r, c});
  return out;
}

}  // namespace

CellId cell_of_index(const GridSpec& grid, int n, int r, int c) {
  grid.check_divides(n);
  if (r < 1 || r > n) throw Error("sample row r=" + std::to_string(r) + " out of range 1.." + std::to_string(n));
  if (grid.rank == 1) {
    const int i = axis_cell(grid.order, n, r);
    return {i, i, 1};
  }
  if (c < 1 || c > n) throw Error("sample column c=" + std::to_string(c) + " out of range 1.." + std::to_string(n));
  const int i = axis_cell(grid.order, n, r);
  const int j = axis_cell(grid.order, n, c);
  return {grid.order * (i - 1) + j, i, j};
}

double to_local(double x, int cell, int order) {
  return order * x - (2.0 * cell - 1.0 - order);
}

CoordinateBatch to_local_coords(const CellId& cell, const GridSpec& grid, CoordinateBatch batch) {
  grid.check_divides(batch.n);
  if (batch.rank != grid.rank) throw ShapeError("coordinate rank does not match grid rank");
  batch.local.resize(batch.global.rows(), batch.global.cols());
  for (Eigen::Index row = 0; row < batch.global.rows(); ++row) {
    const auto& s = batch.samples[static_cast<std::size_t>(row)];
    const CellId owner = cell_of_index(grid, batch.n, s.r, s.c);
    if (owner != cell)
      throw Error("sample (" + std::to_string(s.r) + ", " + std::to_string(s.c) + ") lies in cell " +
                  to_string(owner) + ", not " + to_string(cell));
    batch.local(row, 0) = to_local(batch.global(row, 0), cell.i, grid.order);
    if (grid.rank == 2) batch.local(row, 1) = to_local(batch.global(row, 1), cell.j, grid.order);
  }
  return batch;
}

std::vector<CellBlock> partition_signal(const SignalTensor& signal, const GridSpec& grid) {
  if (signal.rank != grid.rank) throw ShapeError("signal rank does not match grid rank");
  grid.check_divides(signal.n);
  const int n = signal.n;
  std::vector<CellBlock> cells;
  cells.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int m = 1; m <= grid.cell_count(); ++m) {
    const CellId id = cell_from_linear(grid, m);
    CoordinateBatch batch;
    batch.n = n;
    batch.rank = grid.rank;
    batch.samples = cell_samples(id, grid, n);
    const auto count = static_cast<Eigen::Index>(batch.samples.size());
    batch.global.resize(count, grid.rank);
    Eigen::MatrixXd targets(count, signal.channels);
    for (Eigen::Index row = 0; row < count; ++row) {
      const auto& s = batch.samples[static_cast<std::size_t>(row)];
      batch.global(row, 0) = lattice_coordinate(n, s.r);
      if (grid.rank == 2) batch.global(row, 1) = lattice_coordinate(n, s.c);
      const std::size_t idx = signal.sample_index(s.r - 1, s.c - 1);
      for (int ch = 0; ch < signal.channels; ++ch) targets(row, ch) = signal.at(idx, ch);
    }
    cells.push_back({id, to_local_coords(id, grid, std::move(batch)), std::move(targets)});
  }
  return cells;
}

SignalTensor aggregate_outputs(std::span<const CellOutput> outputs, const GridSpec& grid, int n, int channels) {
  grid.check_divides(n);
  SignalTensor out(grid.rank, n, channels);
  std::vector<bool> seen(static_cast<std::size_t>(grid.cell_count()), false);
  for (const auto& block : outputs) {
    const CellId expected = cell_from_linear(grid, block.cell.m);
    if (expected != block.cell) throw Error("inconsistent cell id " + to_string(block.cell));
    auto flag = seen[static_cast<std::size_t>(block.cell.m - 1)];
    if (flag) throw Error("duplicate output for cell " + to_string(block.cell));
    seen[static_cast<std::size_t>(block.cell.m - 1)] = true;
    const auto samples = cell_samples(block.cell, grid, n);
    if (block.values.rows() != static_cast<Eigen::Index>(samples.size()) || block.values.cols() != channels)
      throw ShapeError("output block for cell " + to_string(block.cell) + " has the wrong shape");
    for (std::size_t row = 0; row < samples.size(); ++row) {
      const std::size_t idx = out.sample_index(samples[row].r - 1, samples[row].c - 1);
      for (int ch = 0; ch < channels; ++ch) out.at(idx, ch) = block.values(static_cast<Eigen::Index>(row), ch);
    }
  }
  for (int m = 1; m <= grid.cell_count(); ++m)
    if (!seen[static_cast<std::size_t>(m - 1)])
      throw Error("missing output for cell " + to_string(cell_from_linear(grid, m)));
  return out;
}

}  // namespace enrp
