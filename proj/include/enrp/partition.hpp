#pragma once

// Uniform grid decomposition of a signal domain into M^rank cells, each with
// its own local [-1, 1] coordinate frame.
//
// Index conventions: sample indices r, c and cell indices m, i, j are 1-based
// everywhere in this API. Cells are half-open [lo, hi) per axis with the last
// cell closed, so every lattice sample belongs to exactly one cell.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enrp/signal.hpp"

namespace enrp {

struct GridSpec {
  int order = 1;  // M, cells per axis
  int rank = 2;

  int cell_count() const { return rank == 2 ? order * order : order; }
  /// Throws DivisibilityError unless n % order == 0.
  void check_divides(int n) const;
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct CellId {
  int m = 1;  // linear index, 1..M^rank
  int i = 1;  // grid row (rank 2) or position (rank 1)
  int j = 1;  // grid column; always 1 for rank 1

  bool operator==(const CellId&) const = default;
};

std::string to_string(const CellId& cell);

/// Cell from its linear index using i = floor((m-1)/M)+1, j = mod(m-1, M)+1.
CellId cell_from_linear(const GridSpec& grid, int m);

struct SampleIndex {
  int r = 1;
  int c = 1;  // 1 for rank 1
  bool operator==(const SampleIndex&) const = default;
};

struct CoordinateBatch {
  int n = 0;
  int rank = 2;
  Eigen::MatrixXd global;  // batch x rank
  Eigen::MatrixXd local;   // batch x rank
  std::vector<SampleIndex> samples;

  Eigen::Index size() const { return global.rows(); }
};

/// Lattice coordinate of 1-based index r on an axis of n samples: 2(r-1)/(n-1) - 1.
double lattice_coordinate(int n, int r);

/// All lattice coordinates in row-major order; local coords equal global.
CoordinateBatch global_coords(int n, int rank);

CellId cell_of_index(const GridSpec& grid, int n, int r, int c = 1);

/// Local coordinate of global coordinate x on an axis where the owning cell
/// has 1-based position `cell` out of `order`: order * x - (2 cell - 1 - order).
double to_local(double x, int cell, int order);

/// Affine map of each row from the cell extent [2(i-1)/M - 1, 2i/M - 1] onto
/// [-1, 1], written into `local`. Throws if a row lies outside the cell.
CoordinateBatch to_local_coords(const CellId& cell, const GridSpec& grid, CoordinateBatch batch);

struct CellBlock {
  CellId cell;
  CoordinateBatch coords;
  Eigen::MatrixXd targets;  // batch x channels
};

/// Splits the signal into its M^rank cells, ordered by m. Rows within a cell
/// are in row-major sample order.
std::vector<CellBlock> partition_signal(const SignalTensor& signal, const GridSpec& grid);

struct CellOutput {
  CellId cell;
  Eigen::MatrixXd values;  // batch x channels, same row order as partition_signal
};

/// Places per-cell outputs back on the sample lattice. Throws naming the
/// cell on a missing, duplicate or mis-sized block.
SignalTensor aggregate_outputs(std::span<const CellOutput> outputs, const GridSpec& grid, int n, int channels);

}  // namespace enrp
