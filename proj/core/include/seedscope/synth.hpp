#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedscope/alpha_estimator.hpp"
#include "seedscope/model_pool.hpp"

namespace seedscope {

enum class GeneratorFamily { gaussian_mixture, logistic_teacher };

std::string_view to_string(GeneratorFamily family) noexcept;
std::optional<GeneratorFamily> parse_family(std::string_view text) noexcept;

/// Synthetic pool of models that share a test set and differ only through
/// per-model jitter.
///
/// gaussian_mixture: point j has class y_j and a shared latent z_j; model k
/// emits c_k * (y_j * mu_k + spread * z_j) + b_k + point_jitter * e_jk with
/// mu_k = separation * (1 + mean_jitter * N), log c_k = scale_jitter * N and
/// b_k = shift_jitter * N.
///
/// logistic_teacher: x_j ~ N(0, I_d), teacher w with |w| = teacher_scale,
/// labels drawn from sigmoid(<w, x_j>); model k emits
/// c_k * <w + weight_jitter * teacher_scale * N(0, I_d / d), x_j> + b_k
/// + point_jitter * e_jk.
///
/// With every jitter at zero all models are identical.
struct SynthSpec {
  std::size_t n_models = 200;
  std::size_t n_test = 4000;
  GeneratorFamily family = GeneratorFamily::gaussian_mixture;
  std::uint64_t rng_seed = 0;
  double s_max = ModelPool::kDefaultSupportHalfwidth;

  double positive_fraction = 0.5;
  double separation = 2.0;
  double spread = 1.5;
  /// Probability that a gaussian_mixture label disagrees with its class.
  double label_noise = 0.0;

  std::size_t features = 16;
  double teacher_scale = 4.0;
  double weight_jitter = 0.0;

  double mean_jitter = 0.0;
  double scale_jitter = 0.0;
  double shift_jitter = 0.0;
  double point_jitter = 0.0;

  void validate() const;
};

/// Named specs: "paper-cnn-analogue" (200 x 4000 gaussian mixture with
/// moderate jitter), "identical" (no jitter), "logistic" (logistic teacher).
std::optional<SynthSpec> synth_preset(std::string_view name);
std::vector<std::string> synth_preset_names();

/// Deterministic in the spec; the result is clipped to s_max.
ModelPool generate_pool(const SynthSpec& spec);

struct SweepConfig {
  std::vector<std::size_t> sizes = {3, 5, 10, 30};
  std::size_t repetitions = 100;
  AlphaConfig alpha;
  /// Seed of the member draws.
  std::uint64_t seed = 0;
  /// Members are distinct within one ensemble unless set.
  bool members_with_replacement = false;
  std::size_t ece_bins = 15;
};

struct SweepRecord {
  std::size_t size = 0;
  std::size_t rep = 0;
  std::vector<std::string> members;
  double sup_distance = 0.0;
  double alpha_hat = 0.0;
  std::size_t saturated = 0;
  double accuracy = 0.0;
  std::size_t churn = 0;  // vs the ensemble of the whole candidate half
  double churn_fraction = 0.0;
  double ece = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<std::string> reference_ids;
  std::vector<std::string> candidate_ids;
  std::size_t resample_size = 0;
  double threshold = 0.0;
  /// Size-major: records[size_index * repetitions + rep].
  std::vector<SweepRecord> records;

  const SweepRecord& at(std::size_t size_index, std::size_t rep) const {
    return records[size_index * config.repetitions + rep];
  }
};

/// The first half of the pool (in pool order) forms the reference; each
/// ensemble draws its members from the second half and is compared against
/// the reference by sup distance on the full test set and by estimate_alpha.
SweepResult ensemble_sweep(const ModelPool& pool, const SweepConfig& config);

struct Table1Row {
  std::size_t size = 0;
  std::size_t count = 0;
  double pct_alpha_at_most_cut = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double churn_mean = 0.0;
  double churn_std = 0.0;
  double ece_mean = 0.0;
  double ece_std = 0.0;
  double median_alpha_hat = 0.0;
  double median_sup_distance = 0.0;
};

/// Standard deviations use the n - 1 denominator (0 for a single record).
std::vector<Table1Row> table1_summary(const SweepResult& result, double alpha_cut = 0.05);

/// Long-form `size,rep,metric,value` rows.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

double median(std::vector<double> values);

}  // namespace seedscope
