#pragma once

// Alternating width/depth coordinate search for the best sub-network under a
// FLOP budget. Each candidate (d, w) is scored by
//
//   mean PSNR over repeats - alpha * log10(FLOPs)
//
// and only budget-feasible candidates are trained.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "enrp/flops.hpp"
#include "enrp/nn.hpp"
#include "enrp/signal.hpp"
#include "enrp/trainer.hpp"

namespace enrp {

struct SearchSpace {
  std::vector<int> depths{1, 2, 3, 4, 5};
  std::vector<int> widths{16, 32, 64, 128, 256, 512};

  void validate() const;
};

struct SearchConfig {
  int iter_max = 5;
  std::uint64_t f_max = 1'000'000'000;
  double alpha = 7.0;
  int repeats = 5;
  int grid_order = 1;
  int initial_depth = 3;
  int initial_width = 256;
  SubNetworkConfig base;  // activation and encoding; depth/width are searched
  TrainConfig train;

  void validate() const;
};

enum class SearchPhase { Width, Depth };
std::string_view to_string(SearchPhase p);

struct CandidateRecord {
  int iteration = 0;
  SearchPhase phase = SearchPhase::Width;
  int depth = 0;
  int width = 0;
  std::vector<double> psnr_runs;
  double mean_psnr_db = 0.0;
  FlopCount flops;
  double score = 0.0;
  bool accepted = false;
};

struct IterationRecord {
  int iteration = 0;
  int depth = 0;
  int width = 0;
  double mean_psnr_db = 0.0;
  FlopCount flops;
  double score = 0.0;
};

enum class Termination { Converged, IterMax };
std::string_view to_string(Termination t);

struct SearchTrace {
  int start_depth = 0;  // initial depth, lowered if no width fits the budget there
  std::vector<CandidateRecord> candidates;
  std::vector<IterationRecord> iterations;
  int final_depth = 0;
  int final_width = 0;
  Termination termination = Termination::IterMax;
};

/// Trains one candidate configuration once and returns its final PSNR.
/// `repeat` selects the run; evaluations must be pure functions of
/// (config, repeat).
using CandidateEvaluator = std::function<double(const SubNetworkConfig& config, int repeat)>;

double objective_score(double mean_psnr_db, FlopCount fc, double alpha);

/// Evaluates (config, repeat) pairs once each and caches mean PSNR per (d, w).
class CandidateScorer {
 public:
  CandidateScorer(const SearchConfig& cfg, int n, int input_dim, int output_dim, CandidateEvaluator evaluator);

  FlopCount flops(int depth, int width) const;
  bool feasible(int depth, int width) const { return flops(depth, width).total <= cfg_.f_max; }

  /// Fills psnr_runs, mean, flops and score of each candidate. Uncached
  /// runs of all candidates are evaluated in parallel.
  void score(std::vector<CandidateRecord>& candidates);

  SubNetworkConfig config_for(int depth, int width) const;

 private:
  SearchConfig cfg_;
  int n_;
  int input_dim_;
  int output_dim_;
  CandidateEvaluator evaluator_;
  std::map<std::pair<int, int>, std::vector<double>> cache_;
};

struct PhaseResult {
  int chosen = 0;
  std::vector<CandidateRecord> candidates;
};

/// Best feasible width at fixed depth. Ties go to smaller FLOPs, then smaller width.
PhaseResult argmax_width(int depth, const SearchSpace& space, const SearchConfig& cfg, CandidateScorer& scorer,
                         int iteration = 1);
/// Best feasible depth at fixed width. Ties go to smaller FLOPs, then smaller depth.
PhaseResult argmax_depth(int width, const SearchSpace& space, const SearchConfig& cfg, CandidateScorer& scorer,
                         int iteration = 1);

struct SearchResult {
  SubNetworkConfig config;
  SearchTrace trace;
};

SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg, CandidateScorer& scorer);

/// Search on a real signal: candidates are trained with train_ensemble, the
/// run for (d, w, repeat) seeded from (cfg.train.seed, d, w, repeat).
SearchResult run_search(const SearchSpace& space, const SearchConfig& cfg, const SignalTensor& signal);

/// The evaluator used by the signal overload.
CandidateEvaluator training_evaluator(const SearchConfig& cfg, const SignalTensor& signal);

}  // namespace enrp
