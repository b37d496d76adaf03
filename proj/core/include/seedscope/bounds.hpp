#pragma once

#include <cstddef>

namespace seedscope::bounds {

/// A probability as computed from the closed form, and the same value
/// clamped into [0, 1] for reporting.
struct Probability {
  double raw;
  double reported;
};

/// Two-sample DKW constant: 2 from N = 458 on, e below.
inline constexpr std::size_t kTwoSampleConstantSwitch = 458;
double two_sample_constant(std::size_t n_samples) noexcept;

struct DkwConfig {
  std::size_t n_samples = 1;
  std::size_t n_models = 1;
  double epsilon = 0.05;

  double constant() const noexcept { return two_sample_constant(n_samples); }
};

/// One-sample DKW radius sqrt(ln(2/eps) / (2N)).
double one_sample_radius(std::size_t n_samples, double epsilon);
/// P(||F - F_N|| > delta) <= 2 exp(-2 N delta^2).
Probability one_sample_tail(std::size_t n_samples, double delta);

/// delta_a = sqrt(ln(C/eps_a) / N).
double two_sample_threshold(std::size_t n_samples, double epsilon_a);
double two_sample_threshold(const DkwConfig& config);

/// eps_b = 2 M exp(-2 N delta_b^2): failure probability of the reference
/// function being within delta_b of the averaged population CDF.
Probability reference_deviation_epsilon(std::size_t n_models, std::size_t n_samples,
                                        double delta_b);

/// 1 - 2 M exp(-2 N delta_b^2) - 2 exp(-N delta_a^2); requires N >= 458.
Probability candidate_deviation_confidence(std::size_t n_models, std::size_t n_samples,
                                           double delta_a, double delta_b);

struct L1BoundInputs {
  double alpha = 0.0;
  double gamma = 0.0;
  double delta_b = 0.0;
  double delta_c = 0.0;
  double support_length = 1.0;
};

struct L1Bound {
  double nu;
  Probability failure;
};

/// nu = alpha + |S| (gamma + delta_b + delta_c), failing with probability at
/// most 2 exp(-2 N delta_c^2) + 2 M exp(-2 N delta_b^2).
L1Bound l1_bound(const L1BoundInputs& inputs, std::size_t n_samples, std::size_t n_models);

}  // namespace seedscope::bounds
