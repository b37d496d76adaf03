#include "seedscope/trimming.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "seedscope/bounds.hpp"

namespace seedscope {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMembershipSlack = 1e-12;

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("trimming level alpha must lie in [0, 1)");
  }
}

// 1/(1 - alpha): the largest admissible slope of a trimming function.
double max_slope(double alpha) { return 1.0 / (1.0 - alpha); }

std::vector<double> pooled_abscissae(const Ecdf& candidate, const InterpolatedCdf& reference) {
  std::vector<double> points;
  points.reserve(candidate.size() + reference.size());
  std::merge(candidate.support().begin(), candidate.support().end(), reference.knots().begin(),
             reference.knots().end(), std::back_inserter(points));
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

std::string format_double(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

}  // namespace

double TrimmingEnvelope::statistic() const noexcept {
  double sup = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sup = std::max(sup, std::abs(h_alpha[i] - gamma[i]));
  return sup;
}

std::size_t TrimmingEnvelope::witness() const noexcept {
  std::size_t best = 0;
  double sup = -1.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double gap = std::abs(h_alpha[i] - gamma[i]);
    if (gap > sup) {
      sup = gap;
      best = i;
    }
  }
  return best;
}

std::vector<double> TrimmingEnvelope::trimmed_masses() const {
  std::vector<double> masses;
  for (std::size_t i = 1; i < size(); ++i) {
    if (u[i] != u[i - 1]) masses.push_back(h_alpha[i] - h_alpha[i - 1]);
  }
  return masses;
}

std::vector<double> TrimmingEnvelope::candidate_masses() const {
  std::vector<double> masses;
  for (std::size_t i = 1; i < size(); ++i) {
    if (u[i] != u[i - 1]) masses.push_back(u[i] - u[i - 1]);
  }
  return masses;
}

std::vector<double> TrimmingEnvelope::point_weights() const {
  const auto trimmed = trimmed_masses();
  const auto original = candidate_masses();
  std::vector<double> weights(trimmed.size());
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = trimmed[k] / original[k];
  return weights;
}

TrimmingEnvelope build_envelope(const Ecdf& candidate, const InterpolatedCdf& reference,
                                double alpha, EvaluationGrid grid) {
  require_alpha(alpha);
  TrimmingEnvelope env;
  env.alpha = alpha;
  env.grid = grid;
  env.degenerate_reference = reference.degenerate();

  const auto points = pooled_abscissae(candidate, reference);
  const std::size_t per_point = grid == EvaluationGrid::pooled_with_left_limits ? 2 : 1;
  const std::size_t n = points.size() * per_point + 2;
  env.abscissa.reserve(n);
  env.left_limit.reserve(n);
  env.u.reserve(n);
  env.gamma.reserve(n);

  auto push = [&env](double z, bool is_left, double u, double gamma) {
    env.abscissa.push_back(z);
    env.left_limit.push_back(is_left ? 1 : 0);
    env.u.push_back(u);
    env.gamma.push_back(gamma);
  };
  push(-kInf, false, 0.0, 0.0);
  for (double z : points) {
    if (per_point == 2) push(z, true, candidate.left_limit(z), reference.left_limit(z));
    push(z, false, candidate(z), reference(z));
  }
  push(kInf, false, 1.0, 1.0);

  const double slope = max_slope(alpha);
  const double floor = 1.0 - slope;  // B at the (1, 1) anchor: -alpha / (1 - alpha)
  env.b.resize(n);
  env.upper.resize(n);
  env.lower.resize(n);
  env.h_tilde.resize(n);
  env.h_alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) env.b[i] = env.gamma[i] - env.u[i] * slope;
  env.upper[n - 1] = env.b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) env.upper[i] = std::max(env.b[i], env.upper[i + 1]);
  env.lower[0] = env.b[0];
  for (std::size_t i = 1; i < n; ++i) env.lower[i] = std::min(env.b[i], env.lower[i - 1]);
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = 0.5 * (env.upper[i] + env.lower[i]);
    env.h_tilde[i] = std::max(std::min(mid, 0.0), floor);
    env.h_alpha[i] = env.h_tilde[i] + env.u[i] * slope;
  }
  return env;
}

void write_envelope_csv(const TrimmingEnvelope& env, std::ostream& out) {
  out << "abscissa,left_limit,u,gamma,B,U,L,h_tilde,h_alpha\n";
  for (std::size_t i = 0; i < env.size(); ++i) {
    out << format_double(env.abscissa[i]) << ',' << int(env.left_limit[i]) << ','
        << format_double(env.u[i]) << ',' << format_double(env.gamma[i]) << ','
        << format_double(env.b[i]) << ',' << format_double(env.upper[i]) << ','
        << format_double(env.lower[i]) << ',' << format_double(env.h_tilde[i]) << ','
        << format_double(env.h_alpha[i]) << '\n';
  }
}

TrimmedKs::TrimmedKs(const Ecdf& candidate, const InterpolatedCdf& reference,
                     EvaluationGrid grid)
    : degenerate_reference_(reference.degenerate()) {
  const auto xs = candidate.support();
  const auto cum = candidate.cum();
  const auto knots = reference.knots();
  const std::size_t m = xs.size();
  const bool with_limits = grid == EvaluationGrid::pooled_with_left_limits;

  level_.resize(m + 1);
  gamma_min_.resize(m + 1);
  gamma_max_.resize(m + 1);
  at_min_.resize(m + 1);
  at_max_.resize(m + 1);

  // Block k covers [x_k, x_{k+1}) at candidate level cum[k-1]; block 0 is
  // everything below x_1 and block m everything from x_m on.
  for (std::size_t k = 0; k <= m; ++k) {
    const double left = k == 0 ? -kInf : xs[k - 1];
    const double right = k == m ? kInf : xs[k];
    level_[k] = k == 0 ? 0.0 : cum[k - 1];
    gamma_min_[k] = k == 0 ? 0.0 : reference(left);
    at_min_[k] = left;

    if (k == m) {
      gamma_max_[k] = 1.0;
      at_max_[k] = kInf;
      continue;
    }
    double top = gamma_min_[k];
    double top_at = left;
    // Largest reference knot strictly below `right` (pooled points in the block).
    const auto it = std::lower_bound(knots.begin(), knots.end(), right);
    if (it != knots.begin()) {
      const double knot = *(it - 1);
      if (knot > left) {
        const double value = reference(knot);
        if (value > top) {
          top = value;
          top_at = knot;
        }
      }
    }
    if (with_limits) {
      const double value = reference.left_limit(right);
      if (value > top) {
        top = value;
        top_at = right;
      }
    }
    gamma_max_[k] = top;
    at_max_[k] = top_at;
  }
}

TrimmedKs::Solution TrimmedKs::solve(double alpha) const {
  require_alpha(alpha);
  const double slope = max_slope(alpha);
  const double floor = 1.0 - slope;
  const std::size_t n = level_.size();

  // upper: suffix max of B over each block's top; lower: prefix min over its bottom.
  std::vector<double> upper(n);
  upper[n - 1] = gamma_max_[n - 1] - level_[n - 1] * slope;
  for (std::size_t k = n - 1; k-- > 0;) {
    upper[k] = std::max(gamma_max_[k] - level_[k] * slope, upper[k + 1]);
  }

  Solution best;
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    lower = std::min(lower, gamma_min_[k] - level_[k] * slope);
    const double mid = 0.5 * (upper[k] + lower);
    const double h = std::max(std::min(mid, 0.0), floor) + level_[k] * slope;
    const double below = std::abs(h - gamma_min_[k]);
    const double above = std::abs(h - gamma_max_[k]);
    if (below > best.statistic) best = {below, at_min_[k], level_[k]};
    if (above > best.statistic) best = {above, at_max_[k], level_[k]};
  }
  return best;
}

double trimmed_ks(const Ecdf& candidate, const InterpolatedCdf& reference, double alpha,
                  EvaluationGrid grid) {
  return TrimmedKs(candidate, reference, grid).statistic(alpha);
}

RobustTestResult robust_test(const Ecdf& candidate, const Ecdf& reference, double alpha,
                             double epsilon_a, std::size_t n_samples, EvaluationGrid grid) {
  if (candidate.sample_count() != 0 && candidate.sample_count() != n_samples) {
    throw std::invalid_argument("robust_test: N does not match the candidate sample count");
  }
  const InterpolatedCdf interpolated = interpolate(reference);
  const TrimmedKs problem(candidate, interpolated, grid);
  const auto solution = problem.solve(alpha);

  RobustTestResult result;
  result.statistic = solution.statistic;
  result.threshold = bounds::two_sample_threshold(n_samples, epsilon_a) +
                     1.0 / static_cast<double>(n_samples);
  result.accept = result.statistic <= result.threshold;
  result.alpha = alpha;
  result.witness_abscissa = solution.witness_abscissa;
  result.witness_level = solution.witness_level;
  result.degenerate_reference = problem.degenerate_reference();
  return result;
}

bool trimming_membership(std::span<const double> weights, double alpha, std::size_t n) {
  if (n < 1) throw std::invalid_argument("trimming_membership: n must be >= 1");
  require_alpha(alpha);
  if (weights.size() != n) return false;
  const double cap = max_slope(alpha);
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= -kMembershipSlack) || w > cap + kMembershipSlack) return false;
    total += w;
  }
  return std::abs(total / static_cast<double>(n) - 1.0) <= kMembershipSlack;
}

}  // namespace seedscope
