#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "seedscope/ecdf.hpp"

namespace seedscope {

/// Where |trimmed candidate - reference| is evaluated.
///
/// pooled_points: at every pooled breakpoint z (candidate support and
/// reference knots), the max-over-z rule of the robust two-sample test.
/// pooled_with_left_limits: additionally at the left limit of every pooled
/// breakpoint, which makes the statistic the exact sup over the real line.
enum class EvaluationGrid { pooled_points, pooled_with_left_limits };

/// The optimal trimming function h_alpha for one (candidate, reference, alpha)
/// triple, tabulated on the evaluation grid.
///
/// Entry i pairs a candidate level u_i = G0(z_i) with the reference level
/// gamma_i = R(z_i) (i.e. Gamma = R o G0^{-1} at that abscissa). The grid is
/// bracketed by the anchors (-inf, 0, 0) and (+inf, 1, 1), so u is
/// nondecreasing, may repeat, and h_alpha is constant across repeats.
struct TrimmingEnvelope {
  double alpha = 0.0;
  EvaluationGrid grid = EvaluationGrid::pooled_points;
  bool degenerate_reference = false;

  std::vector<double> abscissa;
  std::vector<char> left_limit;
  std::vector<double> u;
  std::vector<double> gamma;
  std::vector<double> b;        // gamma - u / (1 - alpha)
  std::vector<double> upper;    // suffix max of b
  std::vector<double> lower;    // prefix min of b
  std::vector<double> h_tilde;  // clamp((upper + lower) / 2, 1 - 1/(1 - alpha), 0)
  std::vector<double> h_alpha;  // h_tilde + u / (1 - alpha)

  std::size_t size() const noexcept { return u.size(); }
  double statistic() const noexcept;
  std::size_t witness() const noexcept;

  /// Per-distinct-candidate-point reweighting factors w_k = dh/du; multiply a
  /// sample's 1/n mass by w_k of its point to get the trimmed measure.
  std::vector<double> point_weights() const;
  /// Trimmed masses per distinct candidate point (increments of h_alpha).
  std::vector<double> trimmed_masses() const;
  /// Candidate masses per distinct point (increments of u).
  std::vector<double> candidate_masses() const;
};

TrimmingEnvelope build_envelope(const Ecdf& candidate, const InterpolatedCdf& reference,
                                double alpha,
                                EvaluationGrid grid = EvaluationGrid::pooled_points);

/// CSV dump `abscissa,left_limit,u,gamma,B,U,L,h_tilde,h_alpha`.
void write_envelope_csv(const TrimmingEnvelope& envelope, std::ostream& out);

/// The trimmed KS problem for one (candidate, reference) pair, compressed to
/// one block per candidate level holding the smallest and largest reference
/// level seen at that level. Only those extremes can bind, so solving for many
/// alphas costs O(#candidate points) each and matches build_envelope exactly.
class TrimmedKs {
 public:
  TrimmedKs(const Ecdf& candidate, const InterpolatedCdf& reference,
            EvaluationGrid grid = EvaluationGrid::pooled_points);

  struct Solution {
    double statistic = 0.0;
    double witness_abscissa = 0.0;
    double witness_level = 0.0;
  };

  /// min over alpha-trimmings F of the sup distance to the reference.
  Solution solve(double alpha) const;
  double statistic(double alpha) const { return solve(alpha).statistic; }

  bool degenerate_reference() const noexcept { return degenerate_reference_; }
  std::size_t blocks() const noexcept { return level_.size(); }

 private:
  std::vector<double> level_;
  std::vector<double> gamma_min_;
  std::vector<double> gamma_max_;
  std::vector<double> at_min_;
  std::vector<double> at_max_;
  bool degenerate_reference_ = false;
};

double trimmed_ks(const Ecdf& candidate, const InterpolatedCdf& reference, double alpha,
                  EvaluationGrid grid = EvaluationGrid::pooled_points);

struct RobustTestResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool accept = false;
  double alpha = 0.0;
  double witness_abscissa = 0.0;
  double witness_level = 0.0;
  bool degenerate_reference = false;
};

/// Accept when trimmed_ks <= two_sample_threshold(N, eps_a) + 1/N; the 1/N
/// covers the gap between the reference eCDF and its interpolation.
RobustTestResult robust_test(const Ecdf& candidate, const Ecdf& reference, double alpha,
                             double epsilon_a, std::size_t n_samples,
                             EvaluationGrid grid = EvaluationGrid::pooled_points);

/// 0 <= w_i <= 1/(1 - alpha) and (1/n) sum w_i = 1, each within 1e-12.
bool trimming_membership(std::span<const double> weights, double alpha, std::size_t n);

}  // namespace seedscope
