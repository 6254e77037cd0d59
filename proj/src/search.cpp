#include "enrp/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "enrp/parallel.hpp"

namespace enrp {

namespace {

void check_increasing(const std::vector<int>& v, const char* what) {
  if (v.empty()) throw Error(std::string(what) + " search set is empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 1) throw Error(std::string(what) + " search set must hold positive values");
    if (k > 0 && v[k] <= v[k - 1]) throw Error(std::string(what) + " search set must be strictly increasing");
  }
}

}  // namespace

void SearchSpace::validate() const {
  check_increasing(depths, "depth");
  check_increasing(widths, "width");
}

void SearchConfig::validate() const {
  if (iter_max < 1) throw Error("iter_max must be >= 1");
  if (repeats < 1) throw Error("repeats must be >= 1");
  if (alpha < 0.0) throw Error("alpha must be non-negative");
  if (grid_order < 1) throw Error("grid order must be >= 1");
  if (initial_depth < 1 || initial_width < 1) throw Error("initial depth and width must be >= 1");
  train.validate();
}

std::string_view to_string(SearchPhase p) { return p == SearchPhase::Width ? "width" : "depth"; }
std::string_view to_string(Termination t) { return t == Termination::Converged ? "converged" : "iter_max"; }

double objective_score(double mean_psnr_db, FlopCount fc, double alpha) {
  if (fc.total == 0) throw Error("objective_score needs a positive FLOP count");
  return mean_psnr_db - alpha * std::log10(static_cast<double>(fc.total));
}

CandidateScorer::CandidateScorer(const SearchConfig& cfg, int n, int input_dim, int output_dim,
                                 CandidateEvaluator evaluator)
    : cfg_(cfg), n_(n), input_dim_(input_dim), output_dim_(output_dim), evaluator_(std::move(evaluator)) {
  cfg_.validate();
}

SubNetworkConfig CandidateScorer::config_for(int depth, int width) const {
  SubNetworkConfig c = cfg_.base;
  c.depth = depth;
  c.width = width;
  return c;
}

FlopCount CandidateScorer::flops(int depth, int width) const {
  return total_flops(config_for(depth, width), GridSpec{cfg_.grid_order, input_dim_}, n_, input_dim_, output_dim_);
}

void CandidateScorer::score(std::vector<CandidateRecord>& candidates) {
  std::vector<std::pair<int, int>> pending;
  for (const auto& c : candidates) {
    const std::pair<int, int> key{c.depth, c.width};
    if (!cache_.contains(key) && std::find(pending.begin(), pending.end(), key) == pending.end())
      pending.push_back(key);
  }
  const auto repeats = static_cast<std::size_t>(cfg_.repeats);
  std::vector<double> results(pending.size() * repeats);
  parallel_for(results.size(), cfg_.train.workers, [&](std::size_t t) {
    const auto& [d, w] = pending[t / repeats];
    results[t] = evaluator_(config_for(d, w), static_cast<int>(t % repeats));
  });
  for (std::size_t k = 0; k < pending.size(); ++k)
    cache_[pending[k]] = std::vector<double>(results.begin() + static_cast<std::ptrdiff_t>(k * repeats),
                                             results.begin() + static_cast<std::ptrdiff_t>((k + 1) * repeats));

  for (auto& c : candidates) {
    c.psnr_runs = cache_.at({c.depth, c.width});
    c.mean_psnr_db = std::accumulate(c.psnr_runs.begin(), c.psnr_runs.end(), 0.0) / c.psnr_runs.size();
    c.flops = flops(c.depth, c.width);
    c.score = objective_score(c.mean_psnr_db, c.flops, cfg_.alpha);
  }
}

namespace {

// Score first, then smaller FLOPs, then the smaller searched value.
bool better(const CandidateRecord& a, const CandidateRecord& b, SearchPhase phase) {
  if (a.score != b.score) return a.score > b.score;
  if (a.flops.total != b.flops.total) return a.flops.total < b.flops.total;
  return phase == SearchPhase::Width ? a.width < b.width : a.depth < b.depth;
}

PhaseResult run_phase(SearchPhase phase, int fixed, const std::vector<int>& values, CandidateScorer& scorer,
                      int iteration) {
  PhaseResult result;
  for (int v : values) {
    const int d = phase == SearchPhase::Width ? fixed : v;
    const int w = phase == SearchPhase::Width ? v : fixed;
    if (!scorer.feasible(d, w)) continue;
    CandidateRecord rec;
    rec.iteration = iteration;
    rec.phase = phase;
    rec.depth = d;
    rec.width = w;
    result.candidates.push_back(rec);
  }
  if (result.candidates.empty())
    throw BudgetInfeasibleError(std::string("no ") + std::string(to_string(phase)) + " candidate fits the FLOP budget at " +
                                (phase == SearchPhase::Width ? "depth " : "width ") + std::to_string(fixed));
  scorer.score(result.candidates);
  std::size_t best = 0;
  for (std::size_t k = 1; k < result.candidates.size(); ++k)
    if (better(result.candidates[k], result.candidates[best], phase)) best = k;
  result.candidates[best].accepted = true;
  result.chosen = phase == SearchPhase::Width ? result.candidates[best].width : result.candidates[best].depth;
  return result;
}

}  // namespace

PhaseResult argmax_width(int depth, const SearchSpace& space, const SearchConfig&, CandidateScorer& scorer,
                         int iteration) {
  space.validate();
  return run_phase(SearchPhase::Width, depth, space.widths, scorer, iteration);
}

PhaseResult argmax_depth(int width, const SearchSpace& space, const SearchConfig&, CandidateScorer& scorer,
                         int iteration) {
  space.validate();
  return run_phase(SearchPhase::Depth, width, space.depths, scorer, iteration);
}

SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg, CandidateScorer& scorer) {
  space.validate();
  cfg.validate();
  SearchTrace trace;
  int d = cfg.initial_depth;
  int w = cfg.initial_width;
  const int cheapest_width = space.widths.front();
  while (!scorer.feasible(d, cheapest_width)) {
    const auto lower = std::find_if(space.depths.rbegin(), space.depths.rend(), [&](int v) { return v < d; });
    if (lower == space.depths.rend())
      throw BudgetInfeasibleError("no (depth, width) in the search space fits the FLOP budget of " +
                                  std::to_string(cfg.f_max));
    d = *lower;
  }
  trace.start_depth = d;
  for (int it = 1; it <= cfg.iter_max; ++it) {
    auto wp = argmax_width(d, space, cfg, scorer, it);
    auto dp = argmax_depth(wp.chosen, space, cfg, scorer, it);
    const int w_next = wp.chosen;
    const int d_next = dp.chosen;
    const auto& chosen = *std::find_if(dp.candidates.begin(), dp.candidates.end(),
                                       [](const CandidateRecord& c) { return c.accepted; });
    trace.iterations.push_back({it, d_next, w_next, chosen.mean_psnr_db, chosen.flops, chosen.score});
    for (auto& c : wp.candidates) trace.candidates.push_back(std::move(c));
    for (auto& c : dp.candidates) trace.candidates.push_back(std::move(c));
    const bool fixed_point = w_next == w && d_next == d;
    d = d_next;
    w = w_next;
    if (fixed_point) {
      trace.termination = Termination::Converged;
      break;
    }
  }
  trace.final_depth = d;
  trace.final_width = w;
  return {scorer.config_for(d, w), std::move(trace)};
}

CandidateEvaluator training_evaluator(const SearchConfig& cfg, const SignalTensor& signal) {
  const GridSpec grid{cfg.grid_order, signal.rank};
  const TrainConfig base = cfg.train;
  // holds a reference to signal
  return [grid, base, &signal](const SubNetworkConfig& config, int repeat) {
    TrainConfig tc = base;
    tc.workers = 1;
    tc.seed = make_rng({base.seed, static_cast<std::uint64_t>(config.depth), static_cast<std::uint64_t>(config.width),
                        static_cast<std::uint64_t>(repeat)})();
    return train_ensemble(signal, grid, config, tc).report.final_record().psnr_db;
  };
}

SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg, const SignalTensor& signal) {
  GridSpec{cfg.grid_order, signal.rank}.check_divides(signal.n);
  CandidateScorer scorer(cfg, signal.n, signal.rank, signal.channels, training_evaluator(cfg, signal));
  return run_search(space, cfg, scorer);
}

}  // namespace enrp
