#pragma once

// Decay bounds for kernels whose r-th derivative has bounded variation V:
//
//   ||f - f_{k-1}||_2  <= sqrt(2) V / (sqrt(pi (r + 1/2)) (k - r - 1)^(r + 1/2))
//   sigma_{2k}        <= 2 V (pi (r + 1/2))^(-1/2) / (sqrt(k) (k - r - 1)^(r + 1/2))
//
// and the comparison table of computed SVE tails against truncated Legendre
// expansions of the kernel's x-slices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "mercer/chebapprox.hpp"
#include "mercer/errors.hpp"
#include "mercer/gallery.hpp"
#include "mercer/orthopoly.hpp"
#include "mercer/parallel.hpp"
#include "mercer/skeleton.hpp"
#include "mercer/sve.hpp"

namespace mercer {

struct DecayParams {
  double V = 1.0;
  int r = 0;
  /// Decay exponent reported alongside the bounds; not used in them.
  std::optional<double> alpha;

  DecayParams() = default;
  DecayParams(double V_, int r_, std::optional<double> alpha_ = std::nullopt) : V(V_), r(r_), alpha(alpha_) {
    if (!(V > 0.0) || !std::isfinite(V)) throw InvalidArgument("DecayParams: V must be positive");
    if (r < 0) throw InvalidArgument("DecayParams: r must be nonnegative");
    if (alpha && !(*alpha > 0.5)) throw InvalidArgument("DecayParams: alpha must exceed 1/2");
  }
};

namespace detail {

inline void require_valid_k(const DecayParams& p, long long k, const char* who) {
  if (k <= static_cast<long long>(p.r) + 1) {
    std::ostringstream msg;
    msg << who << ": bound holds only for k > r + 1 (k = " << k << ", r = " << p.r << ")";
    throw OutOfValidity(msg.str());
  }
}

inline double rate_factor(const DecayParams& p, long long k) {
  const double rh = static_cast<double>(p.r) + 0.5;
  return std::sqrt(std::numbers::pi * rh) * std::pow(static_cast<double>(k - p.r - 1), rh);
}

}  // namespace detail

/// Bound on the L2 error of the degree k-1 Legendre truncation.
inline double legendre_truncation_bound(const DecayParams& p, long long k) {
  detail::require_valid_k(p, k, "legendre_truncation_bound");
  return std::numbers::sqrt2 * p.V / detail::rate_factor(p, k);
}

/// Bound on sigma_{2k}.
inline double singular_value_bound(const DecayParams& p, long long k) {
  detail::require_valid_k(p, k, "singular_value_bound");
  return 2.0 * p.V / (std::sqrt(static_cast<double>(k)) * detail::rate_factor(p, k));
}

/// Bound on the rank-k SVE tail: sqrt(2) times the Legendre truncation bound.
inline double sve_tail_bound(const DecayParams& p, long long k) {
  return std::numbers::sqrt2 * legendre_truncation_bound(p, k);
}

struct Figure1Row {
  std::size_t k = 0;
  /// sqrt(sum_{n > k} sigma_n^2) over the computed spectrum.
  double sve_tail = 0.0;
  /// max over the y grid of sqrt(2) * sqrt(sum_{n >= k} a_n(y)^2).
  double legendre_bound = 0.0;
  std::optional<double> analytic_bound;
  /// sve_tail <= legendre_bound * (1 + 1e-6).
  bool chain_holds = false;
  /// legendre_bound <= analytic_bound * (1 + 1e-6) where the bound is valid.
  bool analytic_holds = true;
};

struct Figure1Options {
  std::size_t k_max = 60;
  std::size_t y_grid = 129;
  /// Piece resolution threshold, relative to the kernel's sampled maximum.
  double slice_tol = 1e-14;
  /// Interpolation degree of each piece; an unresolved piece is bisected.
  std::size_t slice_piece_degree = 128;
  /// Bisection depth limit, so pieces are no narrower than 2^-slice_max_depth of the domain.
  int slice_max_depth = 40;
};

struct Figure1Table {
  std::vector<Figure1Row> rows;
  std::size_t y_grid = 0;
  bool chain_holds = true;
};

namespace detail {

inline constexpr std::size_t kMaxSlicePieces = 1 << 14;

/// Degree slice_piece_degree interpolants on a bisection of `dom`: a piece is
/// kept once the upper half of its coefficients is below `abs_tol`.
inline void slice_pieces(const std::function<double(double)>& f, const Interval& dom, const Figure1Options& opt,
                         double abs_tol, int depth, std::vector<ChebSeries>& out) {
  const std::size_t n = opt.slice_piece_degree + 1;
  std::vector<double> v(n);
  const auto xs = cheb_points(n, dom);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = f(xs[i]);
    if (!std::isfinite(v[i])) throw EvaluationError("non-finite kernel value in slice", xs[i]);
  }
  auto c = values_to_coeffs(v);
  double tail = 0.0;
  for (std::size_t k = n / 2; k < n; ++k) tail = std::max(tail, std::abs(c[k]));
  if (tail <= abs_tol || depth >= opt.slice_max_depth || out.size() >= kMaxSlicePieces) {
    out.emplace_back(std::move(c), dom);
    return;
  }
  const double mid = dom.midpoint();
  slice_pieces(f, Interval(dom.lo(), mid), opt, abs_tol, depth + 1, out);
  slice_pieces(f, Interval(mid, dom.hi()), opt, abs_tol, depth + 1, out);
}

}  // namespace detail

/// Legendre tails sqrt(sum_{n >= k} a_n(y)^2), k = 0..k_max, of the slice K(., y).
/// The slice is interpolated piecewise, bisecting wherever a piece is not
/// resolved to slice_tol times the kernel's sampled maximum, so kinks end up in
/// short pieces. The kernel scale rather than the slice scale sets the
/// threshold because slice values carry rounding relative to the kernel. Parseval turns the tail into
/// ||s||^2 - sum_{n<k} a_n^2; both terms are integrated exactly piece by piece
/// with Clenshaw-Curtis rules.
inline std::vector<double> legendre_slice_tails(const KernelSpec& K, double y, const Figure1Options& opt) {
  if (!(K.x_domain == Interval{})) throw InvalidArgument("legendre_slice_tails: x domain must be [-1, 1]");
  if (opt.slice_piece_degree < 2) throw InvalidArgument("legendre_slice_tails: slice_piece_degree must be at least 2");
  if (!(opt.slice_tol > 0.0)) throw InvalidArgument("legendre_slice_tails: slice_tol must be positive");
  const auto f = [&](double x) { return K(x, y); };
  double scale = 0.0;
  const auto coarse = cheb_points(33);
  for (double yy : coarse) {
    for (double x : coarse) scale = std::max(scale, std::abs(K(x, yy)));
  }
  std::vector<ChebSeries> pieces;
  detail::slice_pieces(f, K.x_domain, opt, opt.slice_tol * scale, 0, pieces);

  double norm2 = 0.0;
  std::vector<double> a(opt.k_max + 1, 0.0);
  for (const auto& p : pieces) {
    norm2 += inner_product(p, p);
    const std::size_t n = p.degree() + opt.k_max + 2;
    const auto xs = cheb_points(n, p.domain());
    const auto w = clenshaw_curtis_weights(n, p.domain());
    const auto v = values_on_grid(p, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      const auto P = legendre_normalized_all(opt.k_max, xs[i]);
      for (std::size_t k = 0; k <= opt.k_max; ++k) a[k] += w[i] * v[i] * P[k];
    }
  }
  std::vector<double> tails(opt.k_max + 1);
  double head = 0.0;
  for (std::size_t k = 0; k <= opt.k_max; ++k) {
    tails[k] = std::sqrt(std::max(0.0, norm2 - head));
    head += a[k] * a[k];
  }
  return tails;
}

/// Table of SVE tails against Legendre-slice and analytic bounds.
inline Figure1Table figure1_data(const KernelSpec& K, const SVE& e, const Figure1Options& opt = {}) {
  if (opt.k_max < 2) throw InvalidArgument("figure1_data: k_max must be at least 2");
  if (opt.y_grid < 2) throw InvalidArgument("figure1_data: y_grid must be at least 2");
  if (!(K.x_domain == Interval{}) || !(K.y_domain == Interval{})) {
    throw InvalidArgument("figure1_data: kernel must live on [-1, 1]^2");
  }
  const auto ys = cheb_points(opt.y_grid, K.y_domain);
  std::vector<std::vector<double>> tails(ys.size());
  parallel_for(0, ys.size(), [&](std::size_t j) { tails[j] = legendre_slice_tails(K, ys[j], opt); });

  std::optional<DecayParams> params;
  if (K.variation_V && K.smoothness_r) params = DecayParams(*K.variation_V, *K.smoothness_r);

  Figure1Table table;
  table.y_grid = opt.y_grid;
  for (std::size_t k = 0; k <= opt.k_max; ++k) {
    Figure1Row row;
    row.k = k;
    row.sve_tail = tail_l2(e, static_cast<std::ptrdiff_t>(std::min(k, e.size())));
    double worst = 0.0;
    for (const auto& t : tails) worst = std::max(worst, t[k]);
    row.legendre_bound = std::numbers::sqrt2 * worst;
    if (params && static_cast<long long>(k) > params->r + 1) {
      row.analytic_bound = sve_tail_bound(*params, static_cast<long long>(k));
      row.analytic_holds = row.legendre_bound <= *row.analytic_bound * (1.0 + 1e-6);
    }
    row.chain_holds = row.sve_tail <= row.legendre_bound * (1.0 + 1e-6);
    table.chain_holds = table.chain_holds && row.chain_holds;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace mercer
