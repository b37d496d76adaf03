#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "seedscope/model_pool.hpp"

namespace seedscope {

/// Right-continuous step CDF with finitely many jumps.
///
/// `support` is strictly increasing; `cum[i]` is the value on
/// [support[i], support[i+1]) and the value below support[0] is 0. The last
/// cumulative value is exactly 1.
class Ecdf {
 public:
  /// Validates and renormalises: a final value within 1e-12 of 1 is set to 1.
  Ecdf(std::vector<double> support, std::vector<double> cum, std::size_t sample_count = 0);

  double operator()(double t) const noexcept;
  double left_limit(double t) const noexcept;

  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> cum() const noexcept { return cum_; }
  std::size_t size() const noexcept { return support_.size(); }

  /// Number of (equally weighted) values the eCDF was built from, or 0 when
  /// constructed from explicit breakpoints.
  std::size_t sample_count() const noexcept { return sample_count_; }

  double jump(std::size_t i) const noexcept { return i == 0 ? cum_[0] : cum_[i] - cum_[i - 1]; }
  double max_jump() const noexcept;

 private:
  std::vector<double> support_;
  std::vector<double> cum_;
  std::size_t sample_count_;
};

/// Continuous-between-knots CDF: 0 below the first knot, values[i] at
/// knots[i], linear in between, 1 from the last knot on. The only possible
/// discontinuity is the jump of size values[0] at the first knot.
class InterpolatedCdf {
 public:
  InterpolatedCdf(std::vector<double> knots, std::vector<double> values);

  double operator()(double t) const noexcept;
  double left_limit(double t) const noexcept;

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return knots_.size(); }

  /// A single knot leaves a plain step from 0 to 1.
  bool degenerate() const noexcept { return knots_.size() == 1; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// cum_i = #{values <= t_i} / N over sorted distinct values. Throws
/// std::invalid_argument on an empty or non-finite sample.
Ecdf ecdf_of(std::span<const double> sample);
Ecdf ecdf_of(const ScoreVector& sample);

/// Equal-weight average of the members' eCDFs restricted to `indices`,
/// stored as one pooled eCDF with mass 1/(M*N) per value.
Ecdf reference_of(const ModelPool& pool, std::span<const std::string> member_ids,
                  std::span<const std::size_t> indices);

InterpolatedCdf interpolate(const Ecdf& ref);

/// Exact sup over the real line of |a - b|.
double sup_distance(const Ecdf& a, const Ecdf& b);
double sup_distance(const Ecdf& a, const InterpolatedCdf& b);

/// `t,value` rows with a header line, 17 significant digits.
void write_cdf_csv(const Ecdf& cdf, std::ostream& out);
void write_cdf_csv(const InterpolatedCdf& cdf, std::ostream& out);

}  // namespace seedscope
