#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seedscope/model_pool.hpp"
#include "seedscope/trimming.hpp"

namespace seedscope {

/// `count` evenly spaced levels lo + (hi - lo) * k / (count - 1).
std::vector<double> alpha_grid_range(double lo, double hi, std::size_t count);

/// {0, 0.005, ..., 0.25}: 51 levels.
std::vector<double> default_alpha_grid();

struct AlphaConfig {
  std::vector<double> alpha_grid = default_alpha_grid();
  std::size_t n_bootstrap = 100;
  double epsilon_a = 0.05;
  std::uint64_t rng_seed = 0;
  /// Indices drawn per side and replicate; 0 means floor(n_test / 2).
  std::size_t resample_size = 0;
  SplitMode split = SplitMode::bootstrap;
  /// Permit the candidate to be one of the reference members (warns).
  bool allow_candidate_in_reference = false;
  EvaluationGrid grid = EvaluationGrid::pooled_points;
  /// 0 means default_thread_count().
  std::size_t threads = 0;

  /// Throws std::invalid_argument on an empty, unsorted or out-of-range
  /// grid, B = 0 or eps_a outside (0, 1).
  void validate() const;
};

struct ReplicateOutcome {
  double alpha = 0.0;      // first accepting level, or the top level when saturated
  bool accepted = false;
  double statistic = 0.0;  // trimmed KS at `alpha`
};

struct AlphaEstimate {
  std::string candidate;
  double alpha_hat = 0.0;
  std::vector<ReplicateOutcome> per_replicate;
  std::size_t saturated_count = 0;
  std::size_t resample_size = 0;
  double threshold = 0.0;
  std::vector<std::string> warnings;
};

/// Bootstrap estimate of the smallest trimming level at which the robust
/// test accepts, for one pool member against a reference set of members.
AlphaEstimate estimate_alpha(const ModelPool& pool, std::span<const std::string> reference_ids,
                             const std::string& candidate_id, const AlphaConfig& cfg);

/// Same as estimate_alpha for many candidates at once (pool members or
/// derived vectors such as ensembles). Every candidate sees the same index
/// draws, so each replicate's reference is built once and shared.
std::vector<AlphaEstimate> estimate_alpha_batch(const ModelPool& pool,
                                                std::span<const std::string> reference_ids,
                                                std::span<const ScoreVector> candidates,
                                                const AlphaConfig& cfg);

/// Row-major square matrix over `ids`.
struct AlphaMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::vector<std::size_t> saturated;

  double at(std::size_t reference, std::size_t candidate) const {
    return values[reference * ids.size() + candidate];
  }
};

/// Entry (i, j) is the estimate with reference {ids[i]} and candidate
/// ids[j]; the diagonal is the self-test of each model.
AlphaMatrix pairwise_alpha(const ModelPool& pool, std::span<const std::string> ids,
                           const AlphaConfig& cfg);

/// Each id against the reference built from all other ids.
std::vector<AlphaEstimate> leave_one_out_alpha(const ModelPool& pool,
                                               std::span<const std::string> ids,
                                               const AlphaConfig& cfg);

}  // namespace seedscope
