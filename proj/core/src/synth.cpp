#include "seedscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "seedscope/ecdf.hpp"
#include "seedscope/perf_metrics.hpp"
#include "seedscope/rng.hpp"

namespace seedscope {
namespace {

void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("SynthSpec: ") + name + " must be >= 0");
  }
}

std::string model_name(std::size_t k, std::size_t count) {
  int width = 3;
  for (std::size_t limit = 1000; limit < count; limit *= 10) ++width;
  std::string digits = std::to_string(k);
  if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), '0');
  return "m" + digits;
}

std::string format_double(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double std_of(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

struct Latents {
  std::vector<int> labels;
  std::vector<double> base;      // gaussian_mixture: class y_j
  std::vector<double> shared;    // gaussian_mixture: z_j
  std::vector<double> features;  // logistic_teacher: n_test x d, row-major
  std::vector<double> teacher;
};

Latents draw_latents(const SynthSpec& spec) {
  RandomStream rng(spec.rng_seed, StreamDomain::synth, 0);
  Latents out;
  out.labels.resize(spec.n_test);
  if (spec.family == GeneratorFamily::gaussian_mixture) {
    out.base.resize(spec.n_test);
    out.shared.resize(spec.n_test);
    for (std::size_t j = 0; j < spec.n_test; ++j) {
      const double y = rng.uniform() < spec.positive_fraction ? 1.0 : -1.0;
      out.base[j] = y;
      out.shared[j] = rng.normal();
      const bool flip = rng.uniform() < spec.label_noise;
      out.labels[j] = (y > 0.0) != flip ? 1 : -1;
    }
    return out;
  }

  const std::size_t d = spec.features;
  out.teacher.resize(d);
  double norm = 0.0;
  for (double& w : out.teacher) {
    w = rng.normal();
    norm += w * w;
  }
  norm = std::sqrt(norm);
  for (double& w : out.teacher) w *= spec.teacher_scale / norm;

  out.features.resize(spec.n_test * d);
  for (std::size_t j = 0; j < spec.n_test; ++j) {
    double logit = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double x = rng.normal();
      out.features[j * d + i] = x;
      logit += out.teacher[i] * x;
    }
    const double p = 1.0 / (1.0 + std::exp(-logit));
    out.labels[j] = rng.uniform() < p ? 1 : -1;
  }
  return out;
}

std::vector<double> model_gaps(const SynthSpec& spec, const Latents& latents, std::size_t k) {
  RandomStream rng(spec.rng_seed, StreamDomain::synth, 1 + k);
  std::vector<double> gaps(spec.n_test);
  const double scale = std::exp(spec.scale_jitter * rng.normal());
  const double shift = spec.shift_jitter * rng.normal();

  if (spec.family == GeneratorFamily::gaussian_mixture) {
    const double mu = spec.separation * (1.0 + spec.mean_jitter * rng.normal());
    for (std::size_t j = 0; j < spec.n_test; ++j) {
      gaps[j] = scale * (latents.base[j] * mu + spec.spread * latents.shared[j]) + shift;
    }
  } else {
    const std::size_t d = spec.features;
    const double spread = spec.weight_jitter * spec.teacher_scale / std::sqrt(static_cast<double>(d));
    std::vector<double> w(latents.teacher);
    for (double& wi : w) wi += spread * rng.normal();
    for (std::size_t j = 0; j < spec.n_test; ++j) {
      double logit = 0.0;
      for (std::size_t i = 0; i < d; ++i) logit += w[i] * latents.features[j * d + i];
      gaps[j] = scale * logit + shift;
    }
  }
  if (spec.point_jitter > 0.0) {
    for (double& gap : gaps) gap += spec.point_jitter * rng.normal();
  }
  return gaps;
}

}  // namespace

std::string_view to_string(GeneratorFamily family) noexcept {
  return family == GeneratorFamily::gaussian_mixture ? "gaussian-mixture" : "logistic-teacher";
}

std::optional<GeneratorFamily> parse_family(std::string_view text) noexcept {
  if (text == "gaussian-mixture") return GeneratorFamily::gaussian_mixture;
  if (text == "logistic-teacher") return GeneratorFamily::logistic_teacher;
  return std::nullopt;
}

void SynthSpec::validate() const {
  if (n_models == 0 || n_test == 0) throw std::invalid_argument("SynthSpec: sizes must be positive");
  if (family == GeneratorFamily::logistic_teacher && features == 0) {
    throw std::invalid_argument("SynthSpec: features must be positive");
  }
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    throw std::invalid_argument("SynthSpec: positive_fraction must lie in [0, 1]");
  }
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
    throw std::invalid_argument("SynthSpec: label_noise must lie in [0, 1]");
  }
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw std::invalid_argument("SynthSpec: s_max > 0");
  require_nonnegative(separation, "separation");
  require_nonnegative(spread, "spread");
  require_nonnegative(teacher_scale, "teacher_scale");
  require_nonnegative(weight_jitter, "weight_jitter");
  require_nonnegative(mean_jitter, "mean_jitter");
  require_nonnegative(scale_jitter, "scale_jitter");
  require_nonnegative(shift_jitter, "shift_jitter");
  require_nonnegative(point_jitter, "point_jitter");
}

std::vector<std::string> synth_preset_names() { return {"paper-cnn-analogue", "identical", "logistic"}; }

std::optional<SynthSpec> synth_preset(std::string_view name) {
  SynthSpec spec;
  if (name == "paper-cnn-analogue") {
    spec.mean_jitter = 0.15;
    spec.scale_jitter = 0.05;
    spec.shift_jitter = 0.25;
    spec.point_jitter = 0.3;
    spec.label_noise = 0.05;
    return spec;
  }
  if (name == "identical") return spec;
  if (name == "logistic") {
    spec.family = GeneratorFamily::logistic_teacher;
    spec.weight_jitter = 0.2;
    spec.scale_jitter = 0.05;
    spec.shift_jitter = 0.1;
    return spec;
  }
  return std::nullopt;
}

ModelPool generate_pool(const SynthSpec& spec) {
  spec.validate();
  const Latents latents = draw_latents(spec);
  std::vector<ScoreVector> models(spec.n_models);
  for (std::size_t k = 0; k < spec.n_models; ++k) {
    models[k].model_id = model_name(k, spec.n_models);
    models[k].gaps = model_gaps(spec, latents, k);
  }
  ModelPool pool(std::move(models), latents.labels, spec.s_max,
                 "synth:" + std::string(to_string(spec.family)) + ":seed=" +
                     std::to_string(spec.rng_seed));
  return clip_pool(pool, spec.s_max);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SweepResult ensemble_sweep(const ModelPool& pool, const SweepConfig& config) {
  if (pool.n_models() < 2) {
    throw PoolError(PoolError::Kind::invalid_argument, "sweep needs at least two models");
  }
  if (config.sizes.empty() || config.repetitions == 0) {
    throw std::invalid_argument("sweep needs at least one size and one repetition");
  }
  SweepResult result;
  result.config = config;
  const auto ids = pool.ids();
  const std::size_t half = ids.size() / 2;
  result.reference_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(half));
  result.candidate_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(half), ids.end());
  const std::size_t available = result.candidate_ids.size();
  for (std::size_t size : config.sizes) {
    if (size == 0) throw std::invalid_argument("ensemble sizes must be positive");
    if (!config.members_with_replacement && size > available) {
      throw std::invalid_argument("ensemble size " + std::to_string(size) +
                                  " exceeds the candidate half (" + std::to_string(available) +
                                  " models)");
    }
  }

  std::vector<std::size_t> all(pool.n_test());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Ecdf reference = reference_of(pool, result.reference_ids, all);
  const ScoreVector full = ensemble_gaps(pool, result.candidate_ids, "candidate-half");

  const std::size_t reps = config.repetitions;
  std::vector<ScoreVector> ensembles;
  ensembles.reserve(config.sizes.size() * reps);
  result.records.resize(config.sizes.size() * reps);
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const std::size_t size = config.sizes[s];
    for (std::size_t rep = 0; rep < reps; ++rep) {
      RandomStream rng(config.seed, StreamDomain::sweep, s * reps + rep);
      std::vector<std::string> members;
      members.reserve(size);
      if (config.members_with_replacement) {
        for (std::size_t i = 0; i < size; ++i) members.push_back(result.candidate_ids[rng.index(available)]);
      } else {
        std::vector<std::size_t> order(available);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < size; ++i) {
          std::swap(order[i], order[i + rng.index(available - i)]);
          members.push_back(result.candidate_ids[order[i]]);
        }
      }
      ScoreVector ensemble = ensemble_gaps(
          pool, members, "ensemble-" + std::to_string(size) + "-" + std::to_string(rep));

      SweepRecord& record = result.records[s * reps + rep];
      record.size = size;
      record.rep = rep;
      record.members = std::move(members);
      record.sup_distance = sup_distance(ecdf_of(ensemble), reference);
      record.accuracy = accuracy(ensemble, pool.labels());
      record.churn = churn(ensemble, full);
      record.churn_fraction =
          static_cast<double>(record.churn) / static_cast<double>(pool.n_test());
      record.ece = ece(ensemble, pool.labels(), config.ece_bins);
      ensembles.push_back(std::move(ensemble));
    }
  }

  const auto estimates = estimate_alpha_batch(pool, result.reference_ids, ensembles, config.alpha);
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    result.records[i].alpha_hat = estimates[i].alpha_hat;
    result.records[i].saturated = estimates[i].saturated_count;
  }
  result.resample_size = estimates.front().resample_size;
  result.threshold = estimates.front().threshold;
  return result;
}

std::vector<Table1Row> table1_summary(const SweepResult& result, double alpha_cut) {
  const std::size_t reps = result.config.repetitions;
  std::vector<Table1Row> rows;
  for (std::size_t s = 0; s < result.config.sizes.size(); ++s) {
    std::vector<double> acc, ch, ec, alpha, sup;
    std::size_t within = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const SweepRecord& r = result.at(s, rep);
      acc.push_back(r.accuracy);
      ch.push_back(static_cast<double>(r.churn));
      ec.push_back(r.ece);
      alpha.push_back(r.alpha_hat);
      sup.push_back(r.sup_distance);
      within += r.alpha_hat <= alpha_cut ? 1 : 0;
    }
    Table1Row row;
    row.size = result.config.sizes[s];
    row.count = reps;
    row.pct_alpha_at_most_cut = 100.0 * static_cast<double>(within) / static_cast<double>(reps);
    row.accuracy_mean = mean_of(acc);
    row.accuracy_std = std_of(acc);
    row.churn_mean = mean_of(ch);
    row.churn_std = std_of(ch);
    row.ece_mean = mean_of(ec);
    row.ece_std = std_of(ec);
    row.median_alpha_hat = median(alpha);
    row.median_sup_distance = median(sup);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "size,rep,metric,value\n";
  for (const SweepRecord& r : result.records) {
    const std::string prefix = std::to_string(r.size) + "," + std::to_string(r.rep) + ",";
    out << prefix << "sup_distance," << format_double(r.sup_distance) << '\n';
    out << prefix << "alpha_hat," << format_double(r.alpha_hat) << '\n';
    out << prefix << "saturated," << r.saturated << '\n';
    out << prefix << "accuracy," << format_double(r.accuracy) << '\n';
    out << prefix << "churn," << r.churn << '\n';
    out << prefix << "churn_fraction," << format_double(r.churn_fraction) << '\n';
    out << prefix << "ece," << format_double(r.ece) << '\n';
  }
}

}  // namespace seedscope
