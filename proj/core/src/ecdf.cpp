#include "seedscope/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace seedscope {
namespace {

constexpr double kNormalisationSlack = 1e-12;

void check_cdf_arrays(std::span<const double> points, std::span<const double> values,
                      const char* what) {
  if (points.empty()) throw std::invalid_argument(std::string(what) + ": no breakpoints");
  if (points.size() != values.size()) {
    throw std::invalid_argument(std::string(what) + ": breakpoint/value length mismatch");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw std::invalid_argument(std::string(what) + ": non-finite breakpoint");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw std::invalid_argument(std::string(what) + ": breakpoints must be strictly increasing");
    }
    if (!(values[i] >= 0.0) || values[i] > 1.0 + kNormalisationSlack) {
      throw std::invalid_argument(std::string(what) + ": values must lie in [0, 1]");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw std::invalid_argument(std::string(what) + ": values must be nondecreasing");
    }
  }
  if (std::abs(values.back() - 1.0) > kNormalisationSlack) {
    throw std::invalid_argument(std::string(what) + ": final value must be 1");
  }
}

std::string format_double(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

}  // namespace

Ecdf::Ecdf(std::vector<double> support, std::vector<double> cum, std::size_t sample_count)
    : support_(std::move(support)), cum_(std::move(cum)), sample_count_(sample_count) {
  check_cdf_arrays(support_, cum_, "Ecdf");
  cum_.back() = 1.0;
}

double Ecdf::operator()(double t) const noexcept {
  const auto it = std::upper_bound(support_.begin(), support_.end(), t);
  if (it == support_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double Ecdf::left_limit(double t) const noexcept {
  const auto it = std::lower_bound(support_.begin(), support_.end(), t);
  if (it == support_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double Ecdf::max_jump() const noexcept {
  double largest = 0.0;
  for (std::size_t i = 0; i < cum_.size(); ++i) largest = std::max(largest, jump(i));
  return largest;
}

InterpolatedCdf::InterpolatedCdf(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  check_cdf_arrays(knots_, values_, "InterpolatedCdf");
  values_.back() = 1.0;
}

double InterpolatedCdf::operator()(double t) const noexcept {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return 0.0;
  if (it == knots_.end()) return 1.0;
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (t == knots_[i]) return values_[i];
  const double fraction = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  // The cap keeps rounding from overshooting the next knot, so the function
  // stays monotone in floating point.
  return std::min(values_[i] + (values_[i + 1] - values_[i]) * fraction, values_[i + 1]);
}

double InterpolatedCdf::left_limit(double t) const noexcept {
  if (t <= knots_.front()) return 0.0;
  return (*this)(t);
}

Ecdf ecdf_of(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("ecdf_of: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double value : sorted) {
    if (!std::isfinite(value)) throw std::invalid_argument("ecdf_of: non-finite value");
  }
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  std::vector<double> support;
  std::vector<double> cum;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    support.push_back(sorted[i]);
    cum.push_back(static_cast<double>(i + 1) / n);
  }
  return Ecdf(std::move(support), std::move(cum), sorted.size());
}

Ecdf ecdf_of(const ScoreVector& sample) { return ecdf_of(std::span<const double>(sample.gaps)); }

Ecdf reference_of(const ModelPool& pool, std::span<const std::string> member_ids,
                  std::span<const std::size_t> indices) {
  if (member_ids.empty()) throw PoolError(PoolError::Kind::invalid_argument, "no reference members");
  if (indices.empty()) throw PoolError(PoolError::Kind::invalid_argument, "no test indices");
  std::vector<double> pooled;
  pooled.reserve(member_ids.size() * indices.size());
  for (const auto& id : member_ids) {
    const ScoreVector& member = pool.at(id);
    for (std::size_t index : indices) {
      if (index >= member.gaps.size()) {
        throw PoolError(PoolError::Kind::invalid_argument, "test index out of range");
      }
      pooled.push_back(member.gaps[index]);
    }
  }
  return ecdf_of(pooled);
}

InterpolatedCdf interpolate(const Ecdf& ref) {
  return InterpolatedCdf(std::vector<double>(ref.support().begin(), ref.support().end()),
                         std::vector<double>(ref.cum().begin(), ref.cum().end()));
}

double sup_distance(const Ecdf& a, const Ecdf& b) {
  // Both are constant between consecutive union points, so the left limit at
  // each union point equals the value at the previous one; a single merge
  // covers values and left limits.
  const auto sa = a.support();
  const auto sb = b.support();
  const auto ca = a.cum();
  const auto cb = b.cum();
  std::size_t i = 0;
  std::size_t j = 0;
  double va = 0.0;
  double vb = 0.0;
  double sup = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double t = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    if (i < sa.size() && sa[i] == t) va = ca[i++];
    if (j < sb.size() && sb[j] == t) vb = cb[j++];
    sup = std::max(sup, std::abs(va - vb));
  }
  return sup;
}

double sup_distance(const Ecdf& a, const InterpolatedCdf& b) {
  // a is constant and b monotone between union points, so the sup is attained
  // at a union point or as a left limit there.
  std::vector<double> points(a.support().begin(), a.support().end());
  points.insert(points.end(), b.knots().begin(), b.knots().end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double sup = 0.0;
  for (double t : points) {
    sup = std::max(sup, std::abs(a(t) - b(t)));
    sup = std::max(sup, std::abs(a.left_limit(t) - b.left_limit(t)));
  }
  return sup;
}

void write_cdf_csv(const Ecdf& cdf, std::ostream& out) {
  out << "t,value\n";
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    out << format_double(cdf.support()[i]) << ',' << format_double(cdf.cum()[i]) << '\n';
  }
}

void write_cdf_csv(const InterpolatedCdf& cdf, std::ostream& out) {
  out << "t,value\n";
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    out << format_double(cdf.knots()[i]) << ',' << format_double(cdf.values()[i]) << '\n';
  }
}

}  // namespace seedscope
