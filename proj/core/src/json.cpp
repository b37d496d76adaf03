#include "seedscope/json.hpp"

#include <cmath>

namespace seedscope {
namespace {

// JSON has no infinities; witnesses at the +-inf anchors become strings.
Json finite_or_label(double value) {
  if (std::isfinite(value)) return value;
  return value > 0 ? "+inf" : "-inf";
}

}  // namespace

std::string dump_json(const Json& value) { return value.dump(2) + "\n"; }

std::string_view to_string(EvaluationGrid grid) noexcept {
  return grid == EvaluationGrid::pooled_points ? "pooled" : "pooled-with-left-limits";
}

Json to_json(const AlphaConfig& cfg) {
  Json j;
  j["alpha_grid"] = cfg.alpha_grid;
  j["B"] = cfg.n_bootstrap;
  j["epsilon_a"] = cfg.epsilon_a;
  j["seed"] = cfg.rng_seed;
  j["resample_size"] = cfg.resample_size;
  j["split"] = std::string(to_string(cfg.split));
  j["allow_candidate_in_reference"] = cfg.allow_candidate_in_reference;
  j["evaluation_grid"] = std::string(to_string(cfg.grid));
  return j;
}

Json to_json(const AlphaEstimate& estimate, const AlphaConfig& cfg) {
  Json j;
  j["candidate"] = estimate.candidate;
  j["alpha_hat"] = estimate.alpha_hat;
  j["B"] = cfg.n_bootstrap;
  j["grid"] = cfg.alpha_grid;
  j["saturated"] = estimate.saturated_count;
  Json reps = Json::array();
  for (const auto& r : estimate.per_replicate) {
    reps.push_back({{"alpha", r.alpha}, {"accepted", r.accepted}, {"statistic", r.statistic}});
  }
  j["per_replicate"] = std::move(reps);
  j["resample_size"] = estimate.resample_size;
  j["threshold"] = estimate.threshold;
  j["warnings"] = estimate.warnings;
  return j;
}

Json to_json(const AlphaMatrix& matrix) {
  const std::size_t n = matrix.ids.size();
  Json values = Json::array();
  Json saturated = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    Json sat = Json::array();
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(matrix.values[i * n + k]);
      sat.push_back(matrix.saturated[i * n + k]);
    }
    values.push_back(std::move(row));
    saturated.push_back(std::move(sat));
  }
  return {{"ids", matrix.ids}, {"alpha_hat", std::move(values)}, {"saturated", std::move(saturated)}};
}

Json to_json(const RobustTestResult& result) {
  Json j;
  j["statistic"] = result.statistic;
  j["threshold"] = result.threshold;
  j["accept"] = result.accept;
  j["alpha"] = result.alpha;
  j["witness_abscissa"] = finite_or_label(result.witness_abscissa);
  j["witness_level"] = result.witness_level;
  j["degenerate_reference"] = result.degenerate_reference;
  return j;
}

Json to_json(const MetricsRecord& r) {
  Json j;
  j["model_id"] = r.model_id;
  j["accuracy"] = r.accuracy;
  j["churn_vs_ensemble"] = r.churn_vs_ensemble;
  j["churn_vs_ensemble_fraction"] = r.churn_vs_ensemble_fraction;
  j["avg_pairwise_churn"] = r.avg_pairwise_churn;
  j["avg_pairwise_churn_fraction"] = r.avg_pairwise_churn_fraction;
  j["ece"] = r.ece;
  return j;
}

Json to_json(const BinStats& bin) {
  return {{"bin", bin.bin},
          {"count", bin.count},
          {"accuracy", bin.accuracy},
          {"confidence", bin.confidence}};
}

Json to_json(const SynthSpec& s) {
  Json j;
  j["family"] = std::string(to_string(s.family));
  j["n_models"] = s.n_models;
  j["n_test"] = s.n_test;
  j["seed"] = s.rng_seed;
  j["s_max"] = s.s_max;
  j["positive_fraction"] = s.positive_fraction;
  if (s.family == GeneratorFamily::gaussian_mixture) {
    j["separation"] = s.separation;
    j["spread"] = s.spread;
    j["label_noise"] = s.label_noise;
    j["mean_jitter"] = s.mean_jitter;
  } else {
    j["features"] = s.features;
    j["teacher_scale"] = s.teacher_scale;
    j["weight_jitter"] = s.weight_jitter;
  }
  j["scale_jitter"] = s.scale_jitter;
  j["shift_jitter"] = s.shift_jitter;
  j["point_jitter"] = s.point_jitter;
  return j;
}

Json to_json(const Table1Row& row) {
  Json j;
  j["size"] = row.size;
  j["count"] = row.count;
  j["pct_alpha_at_most_cut"] = row.pct_alpha_at_most_cut;
  j["accuracy_mean"] = row.accuracy_mean;
  j["accuracy_std"] = row.accuracy_std;
  j["churn_mean"] = row.churn_mean;
  j["churn_std"] = row.churn_std;
  j["ece_mean"] = row.ece_mean;
  j["ece_std"] = row.ece_std;
  j["median_alpha_hat"] = row.median_alpha_hat;
  j["median_sup_distance"] = row.median_sup_distance;
  return j;
}

Json to_json(const SweepResult& result, double alpha_cut) {
  Json j;
  j["sizes"] = result.config.sizes;
  j["repetitions"] = result.config.repetitions;
  j["member_seed"] = result.config.seed;
  j["members_with_replacement"] = result.config.members_with_replacement;
  j["ece_bins"] = result.config.ece_bins;
  j["alpha"] = to_json(result.config.alpha);
  j["reference_ids"] = result.reference_ids;
  j["candidate_ids"] = result.candidate_ids;
  j["resample_size"] = result.resample_size;
  j["threshold"] = result.threshold;
  j["alpha_cut"] = alpha_cut;
  Json rows = Json::array();
  for (const auto& row : table1_summary(result, alpha_cut)) rows.push_back(to_json(row));
  j["summary"] = std::move(rows);
  return j;
}

}  // namespace seedscope
