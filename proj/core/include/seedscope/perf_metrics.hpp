#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seedscope/model_pool.hpp"

namespace seedscope {

inline constexpr std::size_t kDefaultEceBins = 15;

/// sign of the gap, with 0 mapped to +1.
int predict(double gap) noexcept;

/// Binary softmax probability of the predicted class, 1 / (1 + exp(-|gap|)).
double confidence(double gap) noexcept;

/// Fraction of points with predict(gap_j) == label_j. Throws
/// std::invalid_argument on empty or misaligned input.
double accuracy(std::span<const double> gaps, std::span<const int> labels);
double accuracy(const ScoreVector& model, std::span<const int> labels);

/// Number of points on which the two predictions differ.
std::size_t churn(std::span<const double> a, std::span<const double> b);
std::size_t churn(const ScoreVector& a, const ScoreVector& b);

struct BinStats {
  std::size_t bin = 0;
  std::size_t count = 0;
  double accuracy = 0.0;    // 0 for an empty bin
  double confidence = 0.0;  // 0 for an empty bin
};

/// R equal-width bins over [0.5, 1], right-closed, the first one also
/// holding 0.5.
std::size_t confidence_bin(double conf, std::size_t bins) noexcept;
std::vector<BinStats> calibration_bins(std::span<const double> gaps, std::span<const int> labels,
                                       std::size_t bins = kDefaultEceBins);

/// sum_r |B_r| / N * |acc(B_r) - conf(B_r)|.
double ece(std::span<const double> gaps, std::span<const int> labels,
           std::size_t bins = kDefaultEceBins);
double ece(const ScoreVector& model, std::span<const int> labels,
           std::size_t bins = kDefaultEceBins);

struct MetricsRecord {
  std::string model_id;
  double accuracy = 0.0;
  std::size_t churn_vs_ensemble = 0;
  double churn_vs_ensemble_fraction = 0.0;
  double avg_pairwise_churn = 0.0;           // mean count over all other models
  double avg_pairwise_churn_fraction = 0.0;
  double ece = 0.0;
};

/// One record per pool model, in pool order. The ensemble is the gap mean
/// over `ensemble_ids` (every model when empty).
std::vector<MetricsRecord> metrics_report(const ModelPool& pool,
                                          std::span<const std::string> ensemble_ids,
                                          std::size_t bins = kDefaultEceBins);

}  // namespace seedscope
