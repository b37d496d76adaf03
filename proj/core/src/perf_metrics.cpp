#include "seedscope/perf_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seedscope {
namespace {

void require_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a == 0) throw std::invalid_argument(std::string(what) + ": empty input");
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

std::vector<signed char> predictions(std::span<const double> gaps) {
  std::vector<signed char> out(gaps.size());
  for (std::size_t j = 0; j < gaps.size(); ++j) out[j] = static_cast<signed char>(predict(gaps[j]));
  return out;
}

std::size_t disagreements(const std::vector<signed char>& a, const std::vector<signed char>& b) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < a.size(); ++j) count += a[j] != b[j] ? 1 : 0;
  return count;
}

}  // namespace

int predict(double gap) noexcept { return gap >= 0.0 ? 1 : -1; }

double confidence(double gap) noexcept { return 1.0 / (1.0 + std::exp(-std::abs(gap))); }

double accuracy(std::span<const double> gaps, std::span<const int> labels) {
  require_aligned(gaps.size(), labels.size(), "accuracy");
  std::size_t correct = 0;
  for (std::size_t j = 0; j < gaps.size(); ++j) correct += predict(gaps[j]) == labels[j] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(gaps.size());
}

double accuracy(const ScoreVector& model, std::span<const int> labels) {
  return accuracy(model.gaps, labels);
}

std::size_t churn(std::span<const double> a, std::span<const double> b) {
  require_aligned(a.size(), b.size(), "churn");
  std::size_t count = 0;
  for (std::size_t j = 0; j < a.size(); ++j) count += predict(a[j]) != predict(b[j]) ? 1 : 0;
  return count;
}

std::size_t churn(const ScoreVector& a, const ScoreVector& b) { return churn(a.gaps, b.gaps); }

std::size_t confidence_bin(double conf, std::size_t bins) noexcept {
  const double scaled = std::ceil((conf - 0.5) * 2.0 * static_cast<double>(bins));
  if (!(scaled > 1.0)) return 0;
  return std::min(static_cast<std::size_t>(scaled) - 1, bins - 1);
}

std::vector<BinStats> calibration_bins(std::span<const double> gaps, std::span<const int> labels,
                                       std::size_t bins) {
  require_aligned(gaps.size(), labels.size(), "calibration_bins");
  if (bins == 0) throw std::invalid_argument("calibration_bins: need at least one bin");
  std::vector<BinStats> stats(bins);
  std::vector<std::size_t> correct(bins, 0);
  std::vector<double> conf_sum(bins, 0.0);
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    const double conf = confidence(gaps[j]);
    const std::size_t r = confidence_bin(conf, bins);
    ++stats[r].count;
    correct[r] += predict(gaps[j]) == labels[j] ? 1 : 0;
    conf_sum[r] += conf;
  }
  for (std::size_t r = 0; r < bins; ++r) {
    stats[r].bin = r;
    if (stats[r].count == 0) continue;
    const double n = static_cast<double>(stats[r].count);
    stats[r].accuracy = static_cast<double>(correct[r]) / n;
    stats[r].confidence = conf_sum[r] / n;
  }
  return stats;
}

double ece(std::span<const double> gaps, std::span<const int> labels, std::size_t bins) {
  const auto stats = calibration_bins(gaps, labels, bins);
  const double n = static_cast<double>(gaps.size());
  double total = 0.0;
  for (const auto& bin : stats) {
    if (bin.count == 0) continue;
    total += static_cast<double>(bin.count) / n * std::abs(bin.accuracy - bin.confidence);
  }
  return total;
}

double ece(const ScoreVector& model, std::span<const int> labels, std::size_t bins) {
  return ece(model.gaps, labels, bins);
}

std::vector<MetricsRecord> metrics_report(const ModelPool& pool,
                                          std::span<const std::string> ensemble_ids,
                                          std::size_t bins) {
  const std::vector<std::string> all_ids = pool.ids();
  const ScoreVector ensemble =
      ensemble_gaps(pool, ensemble_ids.empty() ? std::span<const std::string>(all_ids) : ensemble_ids);
  const auto ensemble_pred = predictions(ensemble.gaps);

  const auto& models = pool.models();
  std::vector<std::vector<signed char>> preds;
  preds.reserve(models.size());
  for (const auto& model : models) preds.push_back(predictions(model.gaps));

  const std::size_t m = models.size();
  std::vector<std::size_t> pair_total(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t c = disagreements(preds[a], preds[b]);
      pair_total[a] += c;
      pair_total[b] += c;
    }
  }

  const double n = static_cast<double>(pool.n_test());
  std::vector<MetricsRecord> records(m);
  for (std::size_t k = 0; k < m; ++k) {
    MetricsRecord& r = records[k];
    r.model_id = models[k].model_id;
    r.accuracy = accuracy(models[k], pool.labels());
    r.churn_vs_ensemble = disagreements(preds[k], ensemble_pred);
    r.churn_vs_ensemble_fraction = static_cast<double>(r.churn_vs_ensemble) / n;
    if (m > 1) {
      r.avg_pairwise_churn = static_cast<double>(pair_total[k]) / static_cast<double>(m - 1);
      r.avg_pairwise_churn_fraction = r.avg_pairwise_churn / n;
    }
    r.ece = ece(models[k], pool.labels(), bins);
  }
  return records;
}

}  // namespace seedscope
