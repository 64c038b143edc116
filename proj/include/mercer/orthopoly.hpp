#pragma once

// Normalized Legendre polynomials P~_n = sqrt(n + 1/2) P_n and the weighted
// second-kind Chebyshev functions U~_n = sqrt(2/pi) (1 - x^2)^(1/4) U_n.
// Both families are orthonormal in L2([-1, 1]).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "mercer/chebapprox.hpp"
#include "mercer/errors.hpp"

namespace mercer {

enum class OrthoFamily { LegendreNormalized, ChebUWeighted };

namespace detail {

inline void require_unit(double x, const char* who) {
  if (!(std::abs(x) <= 1.0)) {
    std::ostringstream msg;
    msg << who << ": |x| > 1 (x = " << x << ")";
    throw DomainError(msg.str());
  }
}

inline double chebu_weight(double x) {
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(std::sqrt((1.0 - x) * (1.0 + x)));
}

}  // namespace detail

/// P~_0(x), ..., P~_{n_max}(x) by the three-term recurrence.
inline std::vector<double> legendre_normalized_all(std::size_t n_max, double x) {
  detail::require_unit(x, "legendre_normalized");
  std::vector<double> p(n_max + 1);
  double pkm1 = 1.0, pk = x;
  p[0] = 1.0;
  if (n_max >= 1) p[1] = x;
  for (std::size_t k = 1; k < n_max; ++k) {
    const double kd = static_cast<double>(k);
    const double next = ((2.0 * kd + 1.0) * x * pk - kd * pkm1) / (kd + 1.0);
    pkm1 = pk;
    pk = next;
    p[k + 1] = next;
  }
  for (std::size_t k = 0; k <= n_max; ++k) p[k] *= std::sqrt(static_cast<double>(k) + 0.5);
  return p;
}

inline double legendre_normalized(std::size_t n, double x) {
  detail::require_unit(x, "legendre_normalized");
  double pkm1 = 1.0, pk = x;
  if (n == 0) return std::sqrt(0.5);
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double next = ((2.0 * kd + 1.0) * x * pk - kd * pkm1) / (kd + 1.0);
    pkm1 = pk;
    pk = next;
  }
  return pk * std::sqrt(static_cast<double>(n) + 0.5);
}

/// U~_0(x), ..., U~_{n_max}(x). Exactly zero at x = +-1.
inline std::vector<double> chebu_weighted_all(std::size_t n_max, double x) {
  detail::require_unit(x, "chebU_weighted");
  std::vector<double> u(n_max + 1, 0.0);
  if (std::abs(x) == 1.0) return u;
  const double w = detail::chebu_weight(x);
  double ukm1 = 1.0, uk = 2.0 * x;
  u[0] = w;
  if (n_max >= 1) u[1] = w * uk;
  for (std::size_t k = 1; k < n_max; ++k) {
    const double next = 2.0 * x * uk - ukm1;
    ukm1 = uk;
    uk = next;
    u[k + 1] = w * next;
  }
  return u;
}

inline double chebU_weighted(std::size_t n, double x) {
  detail::require_unit(x, "chebU_weighted");
  if (std::abs(x) == 1.0) return 0.0;
  double ukm1 = 1.0, uk = 2.0 * x;
  if (n == 0) return detail::chebu_weight(x);
  for (std::size_t k = 1; k < n; ++k) {
    const double next = 2.0 * x * uk - ukm1;
    ukm1 = uk;
    uk = next;
  }
  return detail::chebu_weight(x) * uk;
}

inline double evaluate(OrthoFamily family, std::size_t n, double x) {
  return family == OrthoFamily::LegendreNormalized ? legendre_normalized(n, x) : chebU_weighted(n, x);
}

/// Chebyshev coefficients of P~_n (exact up to rounding).
inline ChebSeries legendre_series(std::size_t n) {
  std::vector<double> values;
  for (double x : cheb_points(n + 1)) values.push_back(legendre_normalized(n, x));
  return ChebSeries(values_to_coeffs(values), Interval{});
}

/// Legendre coefficients a_n = <s, P~_n> for n = 0..count-1 (default: deg(s)+1),
/// by Clenshaw-Curtis quadrature exact for every product s * P~_n.
inline std::vector<double> legendre_coeffs(const ChebSeries& s, std::size_t count = 0) {
  if (!(s.domain() == Interval{})) {
    throw InvalidArgument("legendre_coeffs: series must live on [-1, 1]; transplant it first");
  }
  if (count == 0) count = s.degree() + 1;
  const std::size_t n = s.degree() + count;  // N = deg(s) + count - 1
  const auto xs = cheb_points(n);
  const auto fv = values_on_grid(s, n);
  const auto w = clenshaw_curtis_unit_weights(n);
  std::vector<double> a(count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double wf = (*w)[i] * fv[i];
    if (wf == 0.0) continue;
    const auto p = legendre_normalized_all(count - 1, xs[i]);
    for (std::size_t k = 0; k < count; ++k) a[k] += wf * p[k];
  }
  return a;
}

}  // namespace mercer
