#pragma once

// Kernel gallery: smooth and bounded-variation test kernels, and the
// counterexample kernels whose expansions fail to converge pointwise,
// absolutely, or uniformly.
//
// New kernels need no registration: construct a KernelSpec with any pure
// bivariate callable and pass it to gecp_approximate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mercer/chebapprox.hpp"
#include "mercer/errors.hpp"
#include "mercer/orthopoly.hpp"

namespace mercer {

struct KernelSpec {
  std::string name;
  std::function<double(double, double)> evaluator;
  Interval x_domain;
  Interval y_domain;
  bool symmetric = false;
  bool analytic = false;
  /// Smoothness class r: derivatives up to order r-1 continuous, r-th of bounded variation.
  std::optional<int> smoothness_r;
  /// Variation bound V of the r-th derivative, uniform in the other variable.
  std::optional<double> variation_V;
  std::string description;

  double operator()(double x, double y) const { return evaluator(x, y); }
};

/// Partition of [-1, 1) into I_1, I_2, ... with length(I_n) = 12 / (pi^2 n^2),
/// truncated after M intervals. Immutable.
class IntervalPartition {
 public:
  explicit IntervalPartition(std::size_t M = 100000) : ends_(M + 1) {
    if (M == 0) throw InvalidArgument("IntervalPartition: M must be positive");
    const long double c = 12.0L / (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
    long double sum = 0.0L;
    ends_[0] = -1.0;
    for (std::size_t j = 1; j <= M; ++j) {
      const long double jd = static_cast<long double>(j);
      sum += 1.0L / (jd * jd);
      ends_[j] = static_cast<double>(-1.0L + c * sum);
    }
  }

  std::size_t cap() const noexcept { return ends_.size() - 1; }

  /// Right endpoint of I_n; endpoint(0) = -1.
  double endpoint(std::size_t n) const { return ends_.at(n); }

  static double length(std::size_t n) {
    const double nd = static_cast<double>(n);
    return 12.0 / (std::numbers::pi * std::numbers::pi * nd * nd);
  }

  /// Length of [endpoint(M), 1], the part not covered by the cached intervals.
  double tail_length() const noexcept { return 1.0 - ends_.back(); }

  /// The m with x in I_m, or nullopt when x lies beyond endpoint(M).
  std::optional<std::size_t> locate(double x) const {
    if (x < -1.0 || x > 1.0) throw DomainError("IntervalPartition::locate: x outside [-1, 1]");
    if (x >= ends_.back()) return std::nullopt;
    const auto it = std::upper_bound(ends_.begin(), ends_.end(), x);
    return static_cast<std::size_t>(it - ends_.begin());
  }

  /// Affine bijection i_m : I_m -> [-1, 1].
  double to_unit(std::size_t m, double x) const {
    const double a = ends_.at(m - 1), b = ends_.at(m);
    return std::clamp((2.0 * x - a - b) / (b - a), -1.0, 1.0);
  }

  Interval interval(std::size_t m) const { return Interval(ends_.at(m - 1), ends_.at(m)); }

 private:
  std::vector<double> ends_;
};

/// A partition-based kernel value; `truncated` marks points beyond the cap.
struct PartitionValue {
  double value = 0.0;
  bool truncated = false;
};

/// v_n from the localized orthonormal family: supported on I_m with m = ceil(n/2),
///   v_{2m-1} = -(m pi / sqrt 6) U~_{2m}(i_m(x)),  v_{2m} = (m pi / sqrt 6) U~_{2m+2}(i_m(x)).
inline double v_function(std::size_t n, double x, const IntervalPartition& partition) {
  if (n == 0) throw InvalidArgument("v_function: n starts at 1");
  const std::size_t m = (n + 1) / 2;
  const auto where = partition.locate(x);
  if (!where || *where != m) return 0.0;
  const double amp = static_cast<double>(m) * std::numbers::pi / std::sqrt(6.0);
  const double t = partition.to_unit(m, x);
  return n % 2 == 1 ? -amp * chebU_weighted(2 * m, t) : amp * chebU_weighted(2 * m + 2, t);
}

/// Pair-averaged partial sum of sum_n (-1)^n / n^2 P~_{2n}(x) P~_{2n}(y): the mean of
/// S_N and S_{N+1}. `error` is |S_{N+1} - S_N| / 2.
struct SeriesValue {
  double value = 0.0;
  double error = 0.0;
};

inline SeriesValue k_abs_eval(double x, double y, std::size_t n_terms) {
  if (n_terms < 2) throw InvalidArgument("k_abs_eval: n_terms must be at least 2");
  detail::require_unit(x, "k_abs_eval");
  detail::require_unit(y, "k_abs_eval");
  // Unnormalized Legendre recurrences for x and y run in lockstep.
  double px0 = 1.0, px1 = x, py0 = 1.0, py1 = y;
  double sum = 0.0, last = 0.0;
  for (std::size_t k = 1; k <= 2 * (n_terms + 1) - 1; ++k) {
    const double kd = static_cast<double>(k);
    const double px2 = ((2.0 * kd + 1.0) * x * px1 - kd * px0) / (kd + 1.0);
    const double py2 = ((2.0 * kd + 1.0) * y * py1 - kd * py0) / (kd + 1.0);
    px0 = px1;
    px1 = px2;
    py0 = py1;
    py1 = py2;
    if ((k + 1) % 2 != 0) continue;
    const std::size_t n = (k + 1) / 2;  // px1 = P_{2n}(x)
    const double nd = static_cast<double>(n);
    const double term = ((n % 2 == 0) ? 1.0 : -1.0) / (nd * nd) * (2.0 * nd + 0.5) * (px1 * py1);
    if (n <= n_terms) {
      sum += term;
    } else {
      last = term;
    }
  }
  return {sum + 0.5 * last, 0.5 * std::abs(last)};
}

/// K_uni by its exact two-term form on I_m x I_m; zero off the diagonal blocks.
inline PartitionValue k_uni_eval(double x, double y, const IntervalPartition& partition) {
  const auto mx = partition.locate(x);
  const auto my = partition.locate(y);
  if (!mx) return {0.0, true};
  if (!my || *my != *mx) return {0.0, false};
  const std::size_t m = *mx;
  const auto ux = chebu_weighted_all(2 * m + 2, partition.to_unit(m, x));
  const auto uy = chebu_weighted_all(2 * m + 2, partition.to_unit(m, y));
  const double md = static_cast<double>(m);
  const double factor = std::numbers::pi * std::numbers::pi / (6.0 * md);
  return {factor * (ux[2 * m + 2] * uy[2 * m + 2] - ux[2 * m] * uy[2 * m]), false};
}

/// K_as = sum_n (2 ceil(n/2))^{-2} u_n(x) v_n(y) with u_n = U~_{2n}; only n = 2m-1, 2m
/// contribute, where y lies in I_m.
inline PartitionValue k_as_eval(double x, double y, const IntervalPartition& partition) {
  detail::require_unit(x, "k_as_eval");
  const auto my = partition.locate(y);
  if (!my) return {0.0, true};
  const std::size_t m = *my;
  const double md = static_cast<double>(m);
  const auto ux = chebu_weighted_all(4 * m, x);
  const double v_odd = v_function(2 * m - 1, y, partition);
  const double v_even = v_function(2 * m, y, partition);
  return {(ux[4 * m - 2] * v_odd + ux[4 * m] * v_even) / (4.0 * md * md), false};
}

/// Even extension of sum_{n <= n_blocks} sin((2^{n^3} + 1) t / 2) / n^2.
inline double fejer_f(double t, int n_blocks) {
  if (n_blocks < 1) throw InvalidArgument("fejer_f: n_blocks must be at least 1");
  if (n_blocks > 3) throw UnsupportedScale("fejer_f: 2^(n^3) overflows for n > 3");
  const double at = std::abs(t);
  double f = 0.0;
  for (int n = 1; n <= n_blocks; ++n) {
    const double freq = std::ldexp(1.0, n * n * n) + 1.0;
    f += std::sin(freq * at / 2.0) / static_cast<double>(n * n);
  }
  return f;
}

/// Wraps a difference into [-pi, pi] using 2 pi periodicity.
inline double wrap_to_pi(double d) {
  const double two_pi = 2.0 * std::numbers::pi;
  while (d > std::numbers::pi) d -= two_pi;
  while (d < -std::numbers::pi) d += two_pi;
  return d;
}

using KernelParams = std::map<std::string, double>;

struct GalleryEntry {
  std::string name;
  std::string description;
  std::vector<std::string> params;
};

inline const std::vector<GalleryEntry>& gallery_entries() {
  static const std::vector<GalleryEntry> entries = {
      {"tanh", "tanh(scale*x*y + 1) on [-1,1]^2", {"scale"}},
      {"pyramid", "max(0, 1 - |x| - |y|) on [-1,1]^2", {}},
      {"modulated_pyramid", "exp(-(x^2+y^2)/200) * max(0, 1 - |x| - |y|) on [-1,1]^2", {}},
      {"exp_xy", "exp(x*y) on [-1,1]^2", {}},
      {"k_abs", "sum (-1)^n/n^2 P~_2n(x) P~_2n(y), pair-averaged at n_terms", {"n_terms"}},
      {"k_uni", "two-term block kernel on the 12/(pi^2 n^2) partition, capped at M", {"M"}},
      {"k_as", "asymmetric block kernel sum (2 ceil(n/2))^-2 U~_2n(x) v_n(y), capped at M", {"M"}},
      {"k_pt", "f(x - y) with the even Fejer block sum f, on [-pi,pi]^2", {"n_blocks"}},
      {"separable", "exp(x) * sin(y) on [-1,1]^2", {}},
      {"zero", "identically zero on [-1,1]^2", {}},
  };
  return entries;
}

namespace detail {

inline double param_or(const KernelParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

inline std::size_t count_param(const KernelParams& params, const std::string& key, double fallback) {
  const double v = param_or(params, key, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) throw InvalidArgument(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Builds a gallery kernel. Unknown names or parameter keys are rejected.
inline KernelSpec make_builtin(const std::string& name, const KernelParams& params = {}) {
  const auto& entries = gallery_entries();
  const auto entry = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == name; });
  if (entry == entries.end()) throw InvalidArgument("unknown kernel '" + name + "'");
  for (const auto& [key, value] : params) {
    if (std::find(entry->params.begin(), entry->params.end(), key) == entry->params.end()) {
      throw InvalidArgument("kernel '" + name + "' has no parameter '" + key + "'");
    }
  }

  KernelSpec k;
  k.name = name;
  k.description = entry->description;
  const Interval unit(-1.0, 1.0);
  k.x_domain = k.y_domain = unit;

  if (name == "tanh") {
    const double scale = detail::param_or(params, "scale", 100.0);
    k.evaluator = [scale](double x, double y) { return std::tanh(scale * x * y + 1.0); };
    k.symmetric = true;
    k.analytic = true;
  } else if (name == "pyramid") {
    k.evaluator = [](double x, double y) { return std::max(0.0, 1.0 - std::abs(x) - std::abs(y)); };
    k.symmetric = true;
    k.smoothness_r = 1;
    k.variation_V = 2.0;
  } else if (name == "modulated_pyramid") {
    k.evaluator = [](double x, double y) {
      return std::exp(-(x * x + y * y) / 200.0) * std::max(0.0, 1.0 - std::abs(x) - std::abs(y));
    };
    k.symmetric = true;
    k.smoothness_r = 1;
    k.variation_V = 2.0;
  } else if (name == "exp_xy") {
    k.evaluator = [](double x, double y) { return std::exp(x * y); };
    k.symmetric = true;
    k.analytic = true;
  } else if (name == "k_abs") {
    const std::size_t n_terms = detail::count_param(params, "n_terms", 2000);
    if (n_terms < 2) throw InvalidArgument("n_terms must be at least 2");
    k.evaluator = [n_terms](double x, double y) { return k_abs_eval(x, y, n_terms).value; };
    k.symmetric = true;
  } else if (name == "k_uni") {
    auto partition = std::make_shared<const IntervalPartition>(detail::count_param(params, "M", 100000));
    k.evaluator = [partition](double x, double y) { return k_uni_eval(x, y, *partition).value; };
    k.symmetric = true;
  } else if (name == "k_as") {
    auto partition = std::make_shared<const IntervalPartition>(detail::count_param(params, "M", 100000));
    k.evaluator = [partition](double x, double y) { return k_as_eval(x, y, *partition).value; };
  } else if (name == "k_pt") {
    const double nb = detail::param_or(params, "n_blocks", 2.0);
    if (nb != std::floor(nb)) throw InvalidArgument("n_blocks must be an integer");
    const int n_blocks = static_cast<int>(nb);
    fejer_f(0.0, n_blocks);  // validates the block count
    k.evaluator = [n_blocks](double x, double y) { return fejer_f(wrap_to_pi(x - y), n_blocks); };
    k.x_domain = k.y_domain = Interval(-std::numbers::pi, std::numbers::pi);
    k.symmetric = true;
  } else if (name == "separable") {
    k.evaluator = [](double x, double y) { return std::exp(x) * std::sin(y); };
    k.analytic = true;
  } else {  // zero
    k.evaluator = [](double, double) { return 0.0; };
    k.symmetric = true;
    k.analytic = true;
  }
  return k;
}

}  // namespace mercer
