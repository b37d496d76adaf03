#include "seedscope/alpha_estimator.hpp"

#include <algorithm>
#include <stdexcept>

#include "seedscope/bounds.hpp"
#include "seedscope/ecdf.hpp"
#include "seedscope/parallel.hpp"

namespace seedscope {
namespace {

bool contains(std::span<const std::string> ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

ReplicateOutcome sweep_grid(const TrimmedKs& problem, std::span<const double> grid,
                            double threshold) {
  // trimmed_ks is nonincreasing in alpha, so the first accept is the minimum.
  ReplicateOutcome outcome;
  for (double alpha : grid) {
    outcome.alpha = alpha;
    outcome.statistic = problem.statistic(alpha);
    if (outcome.statistic <= threshold) {
      outcome.accepted = true;
      return outcome;
    }
  }
  return outcome;
}

}  // namespace

std::vector<double> alpha_grid_range(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("alpha grid needs at least one level");
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double denom = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / denom;
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> default_alpha_grid() { return alpha_grid_range(0.0, 0.25, 51); }

void AlphaConfig::validate() const {
  if (alpha_grid.empty()) throw std::invalid_argument("alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    const double a = alpha_grid[i];
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("alpha grid levels must lie in [0, 1)");
    if (i > 0 && !(a > alpha_grid[i - 1])) {
      throw std::invalid_argument("alpha grid must be strictly increasing");
    }
  }
  if (n_bootstrap == 0) throw std::invalid_argument("bootstrap count must be positive");
  if (!(epsilon_a > 0.0 && epsilon_a < 1.0)) {
    throw std::invalid_argument("epsilon_a must lie in (0, 1)");
  }
}

std::vector<AlphaEstimate> estimate_alpha_batch(const ModelPool& pool,
                                                std::span<const std::string> reference_ids,
                                                std::span<const ScoreVector> candidates,
                                                const AlphaConfig& cfg) {
  cfg.validate();
  if (reference_ids.empty()) {
    throw PoolError(PoolError::Kind::invalid_argument, "reference set is empty");
  }
  for (const auto& id : reference_ids) pool.at(id);

  std::vector<AlphaEstimate> estimates(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const ScoreVector& candidate = candidates[c];
    if (candidate.gaps.size() != pool.n_test()) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      "candidate '" + candidate.model_id + "' does not match the test set size");
    }
    estimates[c].candidate = candidate.model_id;
    estimates[c].per_replicate.resize(cfg.n_bootstrap);
    if (contains(reference_ids, candidate.model_id)) {
      if (!cfg.allow_candidate_in_reference) {
        throw PoolError(PoolError::Kind::invalid_argument,
                        "candidate '" + candidate.model_id + "' is a reference member");
      }
      estimates[c].warnings.push_back("candidate '" + candidate.model_id +
                                      "' is also a reference member");
    }
  }

  const std::vector<std::string> members(reference_ids.begin(), reference_ids.end());
  std::vector<char> degenerate(cfg.n_bootstrap, 0);
  std::vector<std::size_t> sizes(cfg.n_bootstrap, 0);

  parallel_for(
      cfg.n_bootstrap,
      [&](std::size_t b) {
        const SplitPlan plan =
            make_split(pool.n_test(), cfg.split, cfg.rng_seed, b, cfg.resample_size);
        const InterpolatedCdf reference =
            interpolate(reference_of(pool, members, plan.reference_indices));
        degenerate[b] = reference.degenerate() ? 1 : 0;
        const std::size_t n = plan.candidate_indices.size();
        sizes[b] = n;
        const double threshold =
            bounds::two_sample_threshold(n, cfg.epsilon_a) + 1.0 / static_cast<double>(n);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const Ecdf sample = ecdf_of(gather(candidates[c].gaps, plan.candidate_indices));
          const TrimmedKs problem(sample, reference, cfg.grid);
          estimates[c].per_replicate[b] = sweep_grid(problem, cfg.alpha_grid, threshold);
        }
      },
      cfg.threads);

  const std::size_t n = sizes.front();
  const double threshold =
      bounds::two_sample_threshold(n, cfg.epsilon_a) + 1.0 / static_cast<double>(n);
  const bool any_degenerate = std::find(degenerate.begin(), degenerate.end(), 1) != degenerate.end();
  for (auto& estimate : estimates) {
    double total = 0.0;
    for (const auto& outcome : estimate.per_replicate) {
      total += outcome.alpha;
      if (!outcome.accepted) ++estimate.saturated_count;
    }
    estimate.alpha_hat = total / static_cast<double>(cfg.n_bootstrap);
    estimate.resample_size = n;
    estimate.threshold = threshold;
    if (any_degenerate) {
      estimate.warnings.push_back("reference collapsed to a single value in some replicates");
    }
    if (estimate.saturated_count > 0) {
      estimate.warnings.push_back(std::to_string(estimate.saturated_count) +
                                  " replicate(s) saturated at the top grid level");
    }
  }
  return estimates;
}

AlphaEstimate estimate_alpha(const ModelPool& pool, std::span<const std::string> reference_ids,
                             const std::string& candidate_id, const AlphaConfig& cfg) {
  const ScoreVector& candidate = pool.at(candidate_id);
  return estimate_alpha_batch(pool, reference_ids, std::span(&candidate, 1), cfg).front();
}

AlphaMatrix pairwise_alpha(const ModelPool& pool, std::span<const std::string> ids,
                           const AlphaConfig& cfg) {
  if (ids.size() < 2) throw PoolError(PoolError::Kind::invalid_argument, "need at least two ids");
  std::vector<ScoreVector> candidates;
  candidates.reserve(ids.size());
  for (const auto& id : ids) candidates.push_back(pool.at(id));

  AlphaConfig self_test = cfg;
  self_test.allow_candidate_in_reference = true;

  AlphaMatrix matrix;
  matrix.ids.assign(ids.begin(), ids.end());
  matrix.values.resize(ids.size() * ids.size());
  matrix.saturated.resize(ids.size() * ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = estimate_alpha_batch(pool, ids.subspan(i, 1), candidates, self_test);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      matrix.values[i * ids.size() + j] = row[j].alpha_hat;
      matrix.saturated[i * ids.size() + j] = row[j].saturated_count;
    }
  }
  return matrix;
}

std::vector<AlphaEstimate> leave_one_out_alpha(const ModelPool& pool,
                                               std::span<const std::string> ids,
                                               const AlphaConfig& cfg) {
  if (ids.size() < 2) throw PoolError(PoolError::Kind::invalid_argument, "need at least two ids");
  std::vector<AlphaEstimate> estimates;
  estimates.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> rest;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j != i) rest.push_back(ids[j]);
    }
    estimates.push_back(estimate_alpha(pool, rest, ids[i], cfg));
  }
  return estimates;
}

}  // namespace seedscope
