#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "enrp/error.hpp"
#include "enrp/partition.hpp"

using namespace enrp;

namespace {

SignalTensor random_signal(int rank, int n, int channels, unsigned seed) {
  SignalTensor s(rank, n, channels);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : s.values) v = u(rng);
  return s;
}

std::vector<int> valid_orders(int n) {
  std::vector<int> out;
  for (int m = 1; m <= n / 2; ++m)
    if (n % m == 0) out.push_back(m);
  return out;
}

// Indicator of cell position `cell` on one axis, by exact integer comparison of
// (r-1)/(n-1) against [(cell-1)/M, cell/M), last cell closed.
bool in_axis_cell(int n, int order, int r, int cell) {
  const long lhs = static_cast<long>(r - 1) * order;
  const long lo = static_cast<long>(cell - 1) * (n - 1);
  const long hi = static_cast<long>(cell) * (n - 1);
  return lo <= lhs && (lhs < hi || (cell == order && lhs == hi));
}

std::vector<CellOutput> as_outputs(const std::vector<CellBlock>& blocks) {
  std::vector<CellOutput> out;
  for (const auto& b : blocks) out.push_back({b.cell, b.targets});
  return out;
}

}  // namespace

TEST_CASE("global coordinates: lattice examples") {
  const auto two = global_coords(2, 1);
  CHECK(two.global(0, 0) == -1.0);
  CHECK(two.global(1, 0) == 1.0);

  const auto three = global_coords(3, 1);
  CHECK(three.global(0, 0) == -1.0);
  CHECK(three.global(1, 0) == 0.0);
  CHECK(three.global(2, 0) == 1.0);

  CHECK(lattice_coordinate(128, 1) == -1.0);
  CHECK(lattice_coordinate(128, 128) == 1.0);
  CHECK(lattice_coordinate(128, 64) == doctest::Approx(-1.0 / 127.0).epsilon(1e-14));
  CHECK(lattice_coordinate(128, 64) == doctest::Approx(-0.00787).epsilon(1e-3));
}

TEST_CASE("global coordinates: rank 2 is row-major over (r, c)") {
  const auto b = global_coords(4, 2);
  REQUIRE(b.size() == 16);
  CHECK(b.samples[1] == SampleIndex{1, 2});
  CHECK(b.samples[4] == SampleIndex{2, 1});
  CHECK(b.global(1, 0) == -1.0);
  CHECK(b.global(1, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(b.local == b.global);
}

TEST_CASE("cell ids: linear index formulas") {
  const GridSpec g{4, 2};
  CHECK(cell_from_linear(g, 6) == CellId{6, 2, 2});
  CHECK(cell_from_linear(g, 1) == CellId{1, 1, 1});
  CHECK(cell_from_linear(g, 16) == CellId{16, 4, 4});
  CHECK(cell_from_linear(GridSpec{4, 1}, 3) == CellId{3, 3, 1});
  CHECK_THROWS(cell_from_linear(g, 17));
  CHECK_THROWS(cell_from_linear(g, 0));
}

TEST_CASE("cell_of_index: degenerate grid maps everything to cell 1") {
  for (int r = 1; r <= 16; ++r)
    for (int c = 1; c <= 16; ++c) CHECK(cell_of_index(GridSpec{1, 2}, 16, r, c).m == 1);
}

TEST_CASE("cell_of_index: M=2, N=128 brute force") {
  const GridSpec g{2, 2};
  CHECK(cell_of_index(g, 128, 1, 1) == CellId{1, 1, 1});
  CHECK(cell_of_index(g, 128, 128, 128) == CellId{4, 2, 2});
  std::vector<int> counts(4, 0);
  for (int r = 1; r <= 128; ++r)
    for (int c = 1; c <= 128; ++c) ++counts[static_cast<std::size_t>(cell_of_index(g, 128, r, c).m - 1)];
  CHECK(counts == std::vector<int>{4096, 4096, 4096, 4096});
}

TEST_CASE("cell_of_index: out-of-range indices are rejected") {
  const GridSpec g{2, 2};
  CHECK_THROWS(cell_of_index(g, 128, 0, 1));
  CHECK_THROWS(cell_of_index(g, 128, 129, 1));
  CHECK_THROWS(cell_of_index(g, 128, 1, 0));
}

TEST_CASE("partition of unity on the sample lattice") {
  for (int n : {16, 64, 128}) {
    for (int order : valid_orders(n)) {
      const GridSpec g{order, 2};
      for (int r = 1; r <= n; ++r) {
        int fired = 0, owner = 0;
        for (int i = 1; i <= order; ++i) {
          if (!in_axis_cell(n, order, r, i)) continue;
          ++fired;
          owner = i;
        }
        REQUIRE(fired == 1);
        CHECK(cell_of_index(g, n, r, r) == CellId{(owner - 1) * order + owner, owner, owner});
      }
    }
  }
}

TEST_CASE("local coordinates: affine examples") {
  auto b = global_coords(8, 2);
  const auto same = to_local_coords(CellId{1, 1, 1}, GridSpec{1, 2}, b);
  CHECK(same.local == same.global);

  CHECK(to_local(-1.0, 1, 2) == -1.0);
  CHECK(to_local(-1e-12, 1, 2) == doctest::Approx(1.0).epsilon(1e-10));

  // 2-point affine fit sending [lo, hi] to [-1, 1].
  auto oracle = [](double x, int cell, int order) {
    const double lo = 2.0 * (cell - 1) / order - 1.0;
    const double hi = 2.0 * cell / order - 1.0;
    const double a = 2.0 / (hi - lo);
    const double b0 = -1.0 - a * lo;
    return a * x + b0;
  };
  CHECK(to_local(-0.4, 2, 4) == doctest::Approx(oracle(-0.4, 2, 4)).epsilon(1e-12));
  CHECK(to_local(0.1, 3, 4) == doctest::Approx(oracle(0.1, 3, 4)).epsilon(1e-12));
  CHECK(to_local(-0.4, 2, 4) == doctest::Approx(-0.6));
  CHECK(to_local(0.1, 3, 4) == doctest::Approx(-0.6));
}

TEST_CASE("local coordinates: rows outside the cell are rejected") {
  const auto all = global_coords(8, 2);
  CHECK_THROWS(to_local_coords(CellId{1, 1, 1}, GridSpec{2, 2}, all));
}

TEST_CASE("partition: N=128, M=32 gives 1024 cells of 16") {
  const auto s = random_signal(2, 128, 3, 1);
  const auto blocks = partition_signal(s, GridSpec{32, 2});
  REQUIRE(blocks.size() == 1024);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    CHECK(blocks[k].cell.m == static_cast<int>(k) + 1);
    CHECK(blocks[k].coords.size() == 16);
    CHECK(blocks[k].targets.rows() == 16);
    CHECK(blocks[k].targets.cols() == 3);
  }
}

TEST_CASE("partition: M=1 holds the whole signal") {
  const auto s = random_signal(2, 16, 3, 2);
  const auto blocks = partition_signal(s, GridSpec{1, 2});
  REQUIRE(blocks.size() == 1);
  REQUIRE(blocks[0].targets.rows() == 256);
  for (Eigen::Index row = 0; row < 256; ++row)
    for (int ch = 0; ch < 3; ++ch) CHECK(blocks[0].targets(row, ch) == s.at(static_cast<std::size_t>(row), ch));
}

TEST_CASE("partition: target multiset equals the signal multiset") {
  const auto s = random_signal(2, 16, 1, 3);
  std::vector<double> expected = s.values;
  std::sort(expected.begin(), expected.end());
  for (int order : {2, 4, 8}) {
    std::vector<double> got;
    for (const auto& b : partition_signal(s, GridSpec{order, 2}))
      for (Eigen::Index row = 0; row < b.targets.rows(); ++row) got.push_back(b.targets(row, 0));
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
  }
}

TEST_CASE("partition: divisibility violation names N and M") {
  const auto s = random_signal(2, 10, 1, 4);
  try {
    partition_signal(s, GridSpec{4, 2});
    FAIL("expected DivisibilityError");
  } catch (const DivisibilityError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("10") != std::string::npos);
    CHECK(msg.find("4") != std::string::npos);
  }
}

TEST_CASE("properties: cell counts, local range and round trip for all valid M") {
  for (int n : {16, 64, 128}) {
    for (int rank : {1, 2}) {
      const auto s = random_signal(rank, n, rank == 2 ? 3 : 1, static_cast<unsigned>(n + rank));
      for (int order : valid_orders(n)) {
        const GridSpec g{order, rank};
        const auto blocks = partition_signal(s, g);
        REQUIRE(blocks.size() == static_cast<std::size_t>(g.cell_count()));
        const Eigen::Index per_cell = rank == 2 ? (n / order) * (n / order) : n / order;
        for (const auto& b : blocks) {
          CHECK(b.coords.size() == per_cell);
          CHECK(b.coords.local.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
          for (std::size_t row = 0; row < b.coords.samples.size(); ++row) {
            const auto& si = b.coords.samples[row];
            CHECK(cell_of_index(g, n, si.r, si.c) == b.cell);
          }
        }
        const auto back = aggregate_outputs(as_outputs(blocks), g, n, s.channels);
        CHECK(back.values == s.values);
      }
    }
  }
}

TEST_CASE("aggregate: missing and duplicate cells are errors") {
  const auto s = random_signal(2, 8, 1, 5);
  const GridSpec g{2, 2};
  auto outs = as_outputs(partition_signal(s, g));

  auto missing = outs;
  missing.erase(missing.begin() + 2);
  try {
    aggregate_outputs(missing, g, 8, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(to_string(CellId{3, 2, 1})) != std::string::npos);
  }

  auto duplicate = outs;
  duplicate[3] = duplicate[0];
  CHECK_THROWS_AS(aggregate_outputs(duplicate, g, 8, 1), Error);

  auto wrong_size = outs;
  wrong_size[1].values.resize(3, 1);
  CHECK_THROWS_AS(aggregate_outputs(wrong_size, g, 8, 1), Error);
}

TEST_CASE("aggregate: per-cell constants give a blocky raster") {
  const int n = 16, order = 4, q = n / order;
  const GridSpec g{order, 2};
  std::vector<CellOutput> outs;
  for (const auto& b : partition_signal(SignalTensor(2, n, 1), g))
    outs.push_back({b.cell, Eigen::MatrixXd::Constant(b.targets.rows(), 1, double(b.cell.m) / (order * order))});
  const auto img = aggregate_outputs(outs, g, n, 1);
  std::set<double> distinct;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int m = (r / q) * order + c / q + 1;
      const double v = img.at(img.sample_index(r, c), 0);
      CHECK(v == double(m) / (order * order));
      distinct.insert(v);
    }
  }
  CHECK(distinct.size() == static_cast<std::size_t>(order * order));
}
