#include "seedscope/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seedscope::bounds {
namespace {

Probability clamped(double raw) { return {raw, std::clamp(raw, 0.0, 1.0)}; }

void require_samples(std::size_t n, const char* what) {
  if (n < 1) throw std::domain_error(std::string(what) + ": N must be >= 1");
}

void require_open_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(what) + ": epsilon must lie in (0, 1)");
  }
}

void require_positive(double x, const char* what, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": " + name + " must be positive");
  }
}

}  // namespace

double two_sample_constant(std::size_t n_samples) noexcept {
  return n_samples >= kTwoSampleConstantSwitch ? 2.0 : std::numbers::e;
}

double one_sample_radius(std::size_t n_samples, double epsilon) {
  require_samples(n_samples, "one_sample_radius");
  require_open_probability(epsilon, "one_sample_radius");
  return std::sqrt(std::log(2.0 / epsilon) / (2.0 * static_cast<double>(n_samples)));
}

Probability one_sample_tail(std::size_t n_samples, double delta) {
  require_samples(n_samples, "one_sample_tail");
  require_positive(delta, "one_sample_tail", "delta");
  return clamped(2.0 * std::exp(-2.0 * static_cast<double>(n_samples) * delta * delta));
}

double two_sample_threshold(std::size_t n_samples, double epsilon_a) {
  require_samples(n_samples, "two_sample_threshold");
  require_open_probability(epsilon_a, "two_sample_threshold");
  const double c = two_sample_constant(n_samples);
  return std::sqrt(std::log(c / epsilon_a) / static_cast<double>(n_samples));
}

double two_sample_threshold(const DkwConfig& config) {
  return two_sample_threshold(config.n_samples, config.epsilon);
}

Probability reference_deviation_epsilon(std::size_t n_models, std::size_t n_samples,
                                        double delta_b) {
  if (n_models < 1) throw std::domain_error("reference_deviation_epsilon: M must be >= 1");
  require_samples(n_samples, "reference_deviation_epsilon");
  require_positive(delta_b, "reference_deviation_epsilon", "delta_b");
  const double n = static_cast<double>(n_samples);
  return clamped(2.0 * static_cast<double>(n_models) * std::exp(-2.0 * n * delta_b * delta_b));
}

Probability candidate_deviation_confidence(std::size_t n_models, std::size_t n_samples,
                                           double delta_a, double delta_b) {
  if (n_models < 1) throw std::domain_error("candidate_deviation_confidence: M must be >= 1");
  if (n_samples < kTwoSampleConstantSwitch) {
    throw std::domain_error("candidate_deviation_confidence: requires N >= 458");
  }
  require_positive(delta_a, "candidate_deviation_confidence", "delta_a");
  require_positive(delta_b, "candidate_deviation_confidence", "delta_b");
  const double n = static_cast<double>(n_samples);
  const double raw = 1.0 -
                     2.0 * static_cast<double>(n_models) * std::exp(-2.0 * n * delta_b * delta_b) -
                     2.0 * std::exp(-n * delta_a * delta_a);
  return clamped(raw);
}

L1Bound l1_bound(const L1BoundInputs& in, std::size_t n_samples, std::size_t n_models) {
  if (!(in.alpha >= 0.0 && in.alpha < 1.0)) throw std::domain_error("l1_bound: alpha in [0, 1)");
  if (!(in.gamma >= 0.0) || !(in.delta_b >= 0.0) || !(in.delta_c >= 0.0)) {
    throw std::domain_error("l1_bound: gamma and deltas must be nonnegative");
  }
  require_positive(in.support_length, "l1_bound", "support_length");
  require_samples(n_samples, "l1_bound");
  if (n_models < 1) throw std::domain_error("l1_bound: M must be >= 1");

  const double n = static_cast<double>(n_samples);
  const double nu = in.alpha + in.support_length * (in.gamma + in.delta_b + in.delta_c);
  const double failure = 2.0 * std::exp(-2.0 * n * in.delta_c * in.delta_c) +
                         2.0 * static_cast<double>(n_models) *
                             std::exp(-2.0 * n * in.delta_b * in.delta_b);
  return {nu, clamped(failure)};
}

}  // namespace seedscope::bounds
