#pragma once

// Univariate Chebyshev technology: grids, value/coefficient transforms,
// adaptive interpolation, Clenshaw evaluation and Clenshaw-Curtis quadrature.
//
// Grids are the Chebyshev extreme points in ascending order,
//   x_i = -cos(pi i / N),  i = 0..N,
// mapped affinely onto the domain. Transforms are direct cosine sums over a
// cosine table; their cost is O(N * degree).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "mercer/errors.hpp"

namespace mercer {

class Interval {
 public:
  constexpr Interval() = default;

  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      std::ostringstream msg;
      msg << "invalid interval [" << lo << ", " << hi << "]";
      throw InvalidArgument(msg.str());
    }
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return hi_ - lo_; }
  double half_width() const noexcept { return 0.5 * (hi_ - lo_); }
  double midpoint() const noexcept { return 0.5 * (lo_ + hi_); }

  /// Membership with a rounding allowance of a few ulps of the interval scale.
  bool contains(double x) const noexcept {
    const double slack = 64 * std::numeric_limits<double>::epsilon() *
                         std::max({std::abs(lo_), std::abs(hi_), width()});
    return x >= lo_ - slack && x <= hi_ + slack;
  }

  /// Affine map onto [-1, 1].
  double to_unit(double x) const noexcept {
    return std::clamp((2.0 * x - lo_ - hi_) / (hi_ - lo_), -1.0, 1.0);
  }

  /// Affine map from [-1, 1]; exact at both endpoints.
  double from_unit(double t) const noexcept {
    return 0.5 * (lo_ * (1.0 - t) + hi_ * (1.0 + t));
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = -1.0;
  double hi_ = 1.0;
};

/// Chebyshev-T expansion on an interval. Immutable.
class ChebSeries {
 public:
  ChebSeries(std::vector<double> coeffs, Interval domain)
      : coeffs_(std::move(coeffs)), domain_(domain) {
    if (coeffs_.empty()) throw InvalidArgument("ChebSeries needs at least one coefficient");
    for (double c : coeffs_) {
      if (!std::isfinite(c)) throw InvalidArgument("ChebSeries coefficient is not finite");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  const Interval& domain() const noexcept { return domain_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  double operator()(double x) const;

 private:
  std::vector<double> coeffs_;
  Interval domain_;
};

/// Result of adaptive interpolation. `resolved` is false when the degree cap
/// was reached before the coefficients decayed to the requested tolerance.
struct Interpolant {
  ChebSeries series;
  bool resolved = false;
};

namespace detail {

/// cos(pi r / N) for r = 0..2N-1, computed through sines of small arguments
/// so that the table is exactly symmetric.
inline std::vector<double> cosine_table(std::size_t N) {
  std::vector<double> tab(2 * N);
  const double n2 = 2.0 * static_cast<double>(N);
  for (std::size_t r = 0; r <= N; ++r) {
    tab[r] = std::sin(std::numbers::pi * (static_cast<double>(N) - 2.0 * static_cast<double>(r)) / n2);
  }
  for (std::size_t r = N + 1; r < 2 * N; ++r) tab[r] = tab[2 * N - r];
  return tab;
}

inline double clenshaw_unit(std::span<const double> c, double t) noexcept {
  double b1 = 0.0, b2 = 0.0;
  const double two_t = 2.0 * t;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = c[k] + two_t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

inline std::size_t wrap(std::size_t idx, std::size_t period) noexcept {
  return idx >= period ? idx - period : idx;
}

}  // namespace detail

/// n Chebyshev extreme points on `domain`, ascending. For n = 1, the midpoint.
inline std::vector<double> cheb_points(std::size_t n, const Interval& domain = {}) {
  if (n == 0) throw InvalidArgument("cheb_points: n must be positive");
  if (n == 1) return {domain.midpoint()};
  const std::size_t N = n - 1;
  std::vector<double> x(n);
  const double n2 = 2.0 * static_cast<double>(N);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::sin(std::numbers::pi * (2.0 * static_cast<double>(i) - static_cast<double>(N)) / n2);
    x[i] = domain.from_unit(t);
  }
  x.front() = domain.lo();
  x.back() = domain.hi();
  return x;
}

/// Coefficients of the degree n-1 interpolant through values at cheb_points(n).
inline std::vector<double> values_to_coeffs(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw InvalidArgument("values_to_coeffs: empty input");
  if (n == 1) return {values[0]};
  const std::size_t N = n - 1;
  const std::size_t half = N / 2;
  const auto tab = detail::cosine_table(N);
  const std::size_t period = 2 * N;

  // Fold the symmetric pairs (i, N-i); the sum then runs over i <= N/2.
  std::vector<double> plus(half + 1), minus(half + 1);
  for (std::size_t i = 0; i <= half; ++i) {
    const std::size_t j = N - i;
    if (i == j) {
      plus[i] = values[i];
      minus[i] = 0.0;
    } else {
      plus[i] = values[i] + values[j];
      minus[i] = values[i] - values[j];
    }
  }
  plus[0] *= 0.5;
  minus[0] *= 0.5;

  std::vector<double> c(n);
  for (std::size_t k = 0; k <= N; ++k) {
    const double* g = (k % 2 == 0) ? plus.data() : minus.data();
    double acc = 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i <= half; ++i) {
      acc += g[i] * tab[idx];
      idx = detail::wrap(idx + k % period, period);
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c[k] = sign * 2.0 * acc / static_cast<double>(N);
  }
  c[0] *= 0.5;
  c[N] *= 0.5;
  return c;
}

/// Values of the series with coefficients `coeffs` at cheb_points(n).
inline std::vector<double> coeffs_to_values(std::span<const double> coeffs, std::size_t n) {
  if (n == 0) throw InvalidArgument("coeffs_to_values: n must be positive");
  if (coeffs.empty()) return std::vector<double>(n, 0.0);
  if (n == 1) return {detail::clenshaw_unit(coeffs, 0.0)};
  const std::size_t N = n - 1;
  const std::size_t half = N / 2;
  const auto tab = detail::cosine_table(N);
  const std::size_t period = 2 * N;
  const std::size_t d = coeffs.size();

  std::vector<double> f(n);
  for (std::size_t i = 0; i <= half; ++i) {
    double even = 0.0, odd = 0.0;
    std::size_t idx = 0;
    const std::size_t step = i % period;
    std::size_t k = 0;
    for (; k + 1 < d; k += 2) {
      even += coeffs[k] * tab[idx];
      idx = detail::wrap(idx + step, period);
      odd += coeffs[k + 1] * tab[idx];
      idx = detail::wrap(idx + step, period);
    }
    if (k < d) even += coeffs[k] * tab[idx];
    // T_k(x_i) = (-1)^k cos(pi k i / N) and T_k(x_{N-i}) = cos(pi k i / N).
    f[i] = even - odd;
    f[N - i] = even + odd;
  }
  return f;
}

/// Clenshaw-Curtis weights for n points on [-1, 1] (cached, thread-safe).
inline std::shared_ptr<const std::vector<double>> clenshaw_curtis_unit_weights(std::size_t n) {
  if (n == 0) throw InvalidArgument("clenshaw_curtis_weights: n must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }

  auto w = std::make_shared<std::vector<double>>(n);
  if (n == 1) {
    (*w)[0] = 2.0;
  } else {
    const std::size_t N = n - 1;
    const auto tab = detail::cosine_table(N);
    const std::size_t period = 2 * N;
    const double Nd = static_cast<double>(N);
    const bool even = N % 2 == 0;
    const double end = even ? 1.0 / (Nd * Nd - 1.0) : 1.0 / (Nd * Nd);
    (*w)[0] = (*w)[N] = end;
    const std::size_t kmax = even ? N / 2 - 1 : (N - 1) / 2;
    for (std::size_t i = 1; i <= N / 2; ++i) {
      double v = 1.0;
      std::size_t idx = 0;
      const std::size_t step = (2 * i) % period;
      for (std::size_t k = 1; k <= kmax; ++k) {
        idx = detail::wrap(idx + step, period);
        const double kd = static_cast<double>(k);
        v -= 2.0 * tab[idx] / (4.0 * kd * kd - 1.0);
      }
      if (even) v -= tab[(N * i) % period] / (Nd * Nd - 1.0);
      (*w)[i] = (*w)[N - i] = 2.0 * v / Nd;
    }
  }

  std::lock_guard lock(mutex);
  return cache.emplace(n, std::move(w)).first->second;
}

inline std::vector<double> clenshaw_curtis_weights(std::size_t n, const Interval& domain = {}) {
  auto unit = clenshaw_curtis_unit_weights(n);
  std::vector<double> w(*unit);
  for (double& wi : w) wi *= domain.half_width();
  return w;
}

/// Drops the tail beyond the last coefficient exceeding tol * max|c|.
inline std::vector<double> chop(std::vector<double> coeffs, double tol) {
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  const double cutoff = tol * cmax;
  std::size_t keep = 1;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    if (std::abs(coeffs[k]) > cutoff) {
      keep = k + 1;
      break;
    }
  }
  coeffs.resize(std::max<std::size_t>(keep, 1));
  return coeffs;
}

/// Grid-sampled adaptive interpolation. `sample(n)` must return the function
/// values at cheb_points(n, domain). Grids have 2^j + 1 points, j = 4, 5, ...
/// Refinement stops once the two trailing coefficients are at most
/// tol * max|c|, and the tail is then chopped.
template <class GridSampler>
Interpolant adapt_interpolate_grid(GridSampler&& sample, const Interval& domain, double tol,
                                   std::size_t max_degree = 8192) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("adapt_interpolate: tol must lie in (0, 1)");
  if (max_degree == 0) throw InvalidArgument("adapt_interpolate: max_degree must be positive");

  std::size_t n = std::min<std::size_t>(17, max_degree + 1);
  std::vector<double> best;
  for (;;) {
    std::vector<double> values = sample(n);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        const auto xs = cheb_points(n, domain);
        std::ostringstream msg;
        msg << "non-finite sample at x = " << xs[i];
        throw EvaluationError(msg.str(), xs[i]);
      }
    }
    std::vector<double> c = values_to_coeffs(values);
    double cmax = 0.0;
    for (double ck : c) cmax = std::max(cmax, std::abs(ck));
    const std::size_t m = c.size();
    const bool tail_small = m >= 2 && std::abs(c[m - 1]) <= tol * cmax &&
                            std::abs(c[m - 2]) <= tol * cmax;
    if (tail_small || (m == 1 && cmax == 0.0)) {
      return {ChebSeries(chop(std::move(c), tol), domain), true};
    }
    best = std::move(c);
    const std::size_t next = 2 * (n - 1) + 1;
    if (next - 1 > max_degree) break;
    n = next;
  }
  return {ChebSeries(chop(std::move(best), tol), domain), false};
}

/// Pointwise adaptive interpolation; samples from the previous grid are reused.
template <class Function>
Interpolant adapt_interpolate(Function&& f, const Interval& domain, double tol,
                              std::size_t max_degree = 8192) {
  std::vector<double> prev;
  auto sampler = [&](std::size_t n) {
    const auto xs = cheb_points(n, domain);
    std::vector<double> v(n);
    const bool nested = !prev.empty() && (n - 1) == 2 * (prev.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (nested && i % 2 == 0) {
        v[i] = prev[i / 2];
        continue;
      }
      v[i] = f(xs[i]);
      if (!std::isfinite(v[i])) {
        std::ostringstream msg;
        msg << "non-finite sample at x = " << xs[i];
        throw EvaluationError(msg.str(), xs[i]);
      }
    }
    prev = v;
    return v;
  };
  return adapt_interpolate_grid(sampler, domain, tol, max_degree);
}

/// Clenshaw evaluation at x.
inline double evaluate(const ChebSeries& s, double x) {
  if (!s.domain().contains(x)) {
    std::ostringstream msg;
    msg << "evaluate: x = " << x << " outside [" << s.domain().lo() << ", " << s.domain().hi() << "]";
    throw DomainError(msg.str());
  }
  return detail::clenshaw_unit(s.coeffs(), s.domain().to_unit(x));
}

inline double ChebSeries::operator()(double x) const { return evaluate(*this, x); }

/// Values of `s` at cheb_points(n, s.domain()).
inline std::vector<double> values_on_grid(const ChebSeries& s, std::size_t n) {
  return coeffs_to_values(s.coeffs(), n);
}

inline ChebSeries interpolate_values(std::span<const double> values, const Interval& domain) {
  return ChebSeries(values_to_coeffs(values), domain);
}

/// The same coefficients reinterpreted on another interval.
inline ChebSeries transplant(const ChebSeries& s, const Interval& domain) {
  return ChebSeries(std::vector<double>(s.coeffs().begin(), s.coeffs().end()), domain);
}

/// L2 inner product over the common domain, by Clenshaw-Curtis quadrature
/// exact for the product polynomial.
inline double inner_product(const ChebSeries& f, const ChebSeries& g) {
  if (!(f.domain() == g.domain())) throw InvalidArgument("inner_product: domain mismatch");
  const std::size_t N = f.degree() + g.degree();
  if (N == 0) return f.coeffs()[0] * g.coeffs()[0] * f.domain().width();
  const std::size_t n = N + 1;
  const auto fv = values_on_grid(f, n);
  const auto gv = values_on_grid(g, n);
  const auto w = clenshaw_curtis_unit_weights(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (*w)[i] * fv[i] * gv[i];
  return acc * f.domain().half_width();
}

inline double l2_norm(const ChebSeries& s) { return std::sqrt(std::max(0.0, inner_product(s, s))); }

/// max |s| over cheb_points(grid_size); a lower bound on the sup-norm.
inline double linf_norm(const ChebSeries& s, std::size_t grid_size) {
  if (grid_size < 2) throw InvalidArgument("linf_norm: grid_size must be at least 2");
  double m = 0.0;
  for (double v : values_on_grid(s, grid_size)) m = std::max(m, std::abs(v));
  return m;
}

/// max |f| over cheb_points(grid_size, domain) for an arbitrary function.
template <class Function>
double sup_on_grid(Function&& f, const Interval& domain, std::size_t grid_size) {
  if (grid_size < 2) throw InvalidArgument("sup_on_grid: grid_size must be at least 2");
  double m = 0.0;
  for (double x : cheb_points(grid_size, domain)) m = std::max(m, std::abs(f(x)));
  return m;
}

}  // namespace mercer
