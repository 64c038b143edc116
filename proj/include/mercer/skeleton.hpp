#pragma once

// Pseudo-skeleton approximation by Gaussian elimination with complete pivoting
// on a bivariate kernel:
//
//   K_R(x, y) = sum_j c_j phi_j(x) psi_j(y),   c_j = 1 / e_{j-1}(x_j, y_j),
//
// where phi_j = e_{j-1}(., y_j) and psi_j = e_{j-1}(x_j, .) are residual slices
// through the j-th pivot. Pivots are the absolute maxima of the residual on a
// Chebyshev tensor grid; the slices are adaptive Chebyshev interpolants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mercer/chebapprox.hpp"
#include "mercer/errors.hpp"
#include "mercer/gallery.hpp"
#include "mercer/parallel.hpp"

namespace mercer {

struct GecpOptions {
  /// Stopping tolerance relative to `scale` (max |K| on the initial grid).
  double tol = 1e-10;
  std::size_t max_rank = 1000;
  /// Initial pivot grid has 2^grid_start + 1 points per axis.
  unsigned grid_start = 4;
  /// Pivot grid never exceeds 2^grid_cap + 1 points per axis.
  unsigned grid_cap = 10;
  /// Degree cap for the slice interpolants.
  std::size_t max_degree = 8192;
  /// A step whose slices exceed this multiple of |pivot| means the pivot grid
  /// no longer sees the residual; the grid is refined or the iteration stops.
  double max_growth = 1e3;
};

struct Skeleton {
  Interval x_domain;
  Interval y_domain;
  std::vector<std::pair<double, double>> pivots;
  /// e_{j-1}(x_j, y_j) for each step j.
  std::vector<double> pivot_values;
  /// Reciprocal pivot values.
  std::vector<double> c;
  std::vector<ChebSeries> cols;
  std::vector<ChebSeries> rows;
  /// Whether both slices of step j reached the requested tolerance.
  std::vector<bool> slices_resolved;
  /// Grid residual maximum just before each step, plus the final one.
  std::vector<double> grid_residuals;
  double scale = 0.0;
  double tol = 0.0;
  /// Final absolute residual maximum on the pivot grid.
  double achieved_error = 0.0;
  std::size_t final_grid = 0;
  bool converged = false;
  /// The iteration stopped early because pivot growth exceeded the limit on
  /// the finest allowed grid.
  bool stalled = false;

  std::size_t rank() const noexcept { return c.size(); }

  /// The approximant formed by the first r elimination steps.
  Skeleton truncated(std::size_t r) const {
    if (r > rank()) throw InvalidArgument("Skeleton::truncated: r exceeds rank");
    Skeleton s = *this;
    s.pivots.resize(r);
    s.pivot_values.resize(r);
    s.c.resize(r);
    s.cols.erase(s.cols.begin() + static_cast<std::ptrdiff_t>(r), s.cols.end());
    s.rows.erase(s.rows.begin() + static_cast<std::ptrdiff_t>(r), s.rows.end());
    s.slices_resolved.resize(r);
    s.grid_residuals.resize(std::min(s.grid_residuals.size(), r + 1));
    s.converged = r == rank() && converged;
    return s;
  }
};

namespace detail {

inline std::size_t grid_size_for_level(unsigned level) { return (std::size_t{1} << level) + 1; }

/// sum_j weight_j * coeffs(series_j), padded to the longest series.
inline std::vector<double> combine_coeffs(const std::vector<ChebSeries>& series, std::span<const double> weights) {
  std::size_t len = 1;
  for (const auto& s : series) len = std::max(len, s.size());
  std::vector<double> out(len, 0.0);
  for (std::size_t j = 0; j < series.size(); ++j) {
    const auto c = series[j].coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) out[k] += weights[j] * c[k];
  }
  return out;
}

inline void require_finite_sample(double v, double x, double y) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "kernel is not finite at (" << x << ", " << y << ")";
    throw EvaluationError(msg.str(), x);
  }
}

/// Tolerance to which kernel lines are resolved: tighter than the stopping
/// tolerance because slowly decaying coefficient tails sum to many times the
/// last retained coefficient.
inline double line_tolerance(double tol) { return std::max(tol * 1e-2, 1e-15); }

/// Residual slice e(t) = line(t) - correction(t) on `domain`. Resolution is
/// judged on the kernel line itself: grids of 2^j + 1 points are refined until
/// the line's two trailing coefficients fall below line_tolerance * max|c|.
/// The correction is an exact Chebyshev series and is subtracted coefficient-wise.
template <class Line>
Interpolant residual_slice(Line&& line, double fixed, bool line_in_x, const std::vector<double>& correction,
                           const Interval& domain, const GecpOptions& opt) {
  const double tol = line_tolerance(opt.tol);
  std::size_t n = std::min<std::size_t>(17, opt.max_degree + 1);
  while (n < correction.size() && 2 * (n - 1) <= opt.max_degree) n = 2 * (n - 1) + 1;
  for (;;) {
    const auto pts = cheb_points(n, domain);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = line(pts[i]);
      if (line_in_x) {
        require_finite_sample(v[i], pts[i], fixed);
      } else {
        require_finite_sample(v[i], fixed, pts[i]);
      }
    }
    auto kc = values_to_coeffs(v);
    double cmax = 0.0;
    for (double c : kc) cmax = std::max(cmax, std::abs(c));
    const std::size_t m = kc.size();
    const bool resolved = cmax == 0.0 || (m >= 2 && std::abs(kc[m - 1]) <= tol * cmax &&
                                          std::abs(kc[m - 2]) <= tol * cmax);
    const bool last = 2 * (n - 1) > opt.max_degree;
    if (resolved || last) {
      const std::size_t len = std::max(chop(kc, tol).size(), correction.size());
      kc.resize(std::max(len, kc.size()), 0.0);
      for (std::size_t k = 0; k < correction.size(); ++k) kc[k] -= correction[k];
      kc.resize(len);
      return {ChebSeries(std::move(kc), domain), resolved};
    }
    n = 2 * (n - 1) + 1;
  }
}

/// Residual K - K_R sampled on the tensor grid xs x ys (rows follow x).
inline Eigen::MatrixXd residual_on_grid(const KernelSpec& K, const Skeleton& s, const std::vector<double>& xs,
                                        const std::vector<double>& ys) {
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd g(nx, ny);
  parallel_for(0, static_cast<std::size_t>(ny), [&](std::size_t j) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(nx); ++i) {
      const double v = K(xs[i], ys[j]);
      require_finite_sample(v, xs[i], ys[j]);
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  });
  if (s.rank() == 0) return g;
  const auto r = static_cast<Eigen::Index>(s.rank());
  Eigen::MatrixXd phi(nx, r), psi(ny, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto pv = values_on_grid(s.cols[static_cast<std::size_t>(k)], xs.size());
    const auto qv = values_on_grid(s.rows[static_cast<std::size_t>(k)], ys.size());
    phi.col(k) = Eigen::Map<const Eigen::VectorXd>(pv.data(), nx) * s.c[static_cast<std::size_t>(k)];
    psi.col(k) = Eigen::Map<const Eigen::VectorXd>(qv.data(), ny);
  }
  g.noalias() -= phi * psi.transpose();
  return g;
}

}  // namespace detail

inline double skeleton_eval(const Skeleton& s, double x, double y) {
  if (!s.x_domain.contains(x) || !s.y_domain.contains(y)) {
    std::ostringstream msg;
    msg << "skeleton_eval: (" << x << ", " << y << ") outside the domain";
    throw DomainError(msg.str());
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < s.rank(); ++j) acc += s.c[j] * evaluate(s.cols[j], x) * evaluate(s.rows[j], y);
  return acc;
}

/// max |K - K_R| over the grid_per_axis^2 Chebyshev tensor grid.
inline double residual_max(const KernelSpec& K, const Skeleton& s, std::size_t grid_per_axis) {
  if (grid_per_axis < 2) throw InvalidArgument("residual_max: grid must have at least 2 points per axis");
  const auto g = detail::residual_on_grid(K, s, cheb_points(grid_per_axis, K.x_domain),
                                          cheb_points(grid_per_axis, K.y_domain));
  return g.cwiseAbs().maxCoeff();
}

inline Skeleton gecp_approximate(const KernelSpec& K, const GecpOptions& opt = {}) {
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) throw InvalidArgument("gecp_approximate: tol must lie in (0, 1)");
  if (opt.max_rank < 1) throw InvalidArgument("gecp_approximate: max_rank must be at least 1");
  if (opt.grid_start < 3) throw InvalidArgument("gecp_approximate: grid_start must be at least 3");
  if (opt.grid_cap < opt.grid_start) throw InvalidArgument("gecp_approximate: grid_cap below grid_start");

  Skeleton s;
  s.x_domain = K.x_domain;
  s.y_domain = K.y_domain;
  s.tol = opt.tol;

  unsigned level = opt.grid_start;
  std::size_t n = detail::grid_size_for_level(level);
  auto xs = cheb_points(n, K.x_domain);
  auto ys = cheb_points(n, K.y_domain);
  Eigen::MatrixXd grid = detail::residual_on_grid(K, s, xs, ys);
  s.scale = grid.cwiseAbs().maxCoeff();
  if (s.scale == 0.0) {
    s.converged = true;
    s.final_grid = n;
    s.grid_residuals.push_back(0.0);
    return s;
  }
  const double threshold = opt.tol * s.scale;

  // Smallest pivot-grid level whose point count covers every slice's length.
  auto level_for = [&](std::size_t len) {
    unsigned l = level;
    while (l < opt.grid_cap && detail::grid_size_for_level(l) < len) ++l;
    return l;
  };
  auto rebuild = [&](unsigned new_level) {
    level = new_level;
    n = detail::grid_size_for_level(level);
    xs = cheb_points(n, K.x_domain);
    ys = cheb_points(n, K.y_domain);
    grid = detail::residual_on_grid(K, s, xs, ys);
  };

  std::size_t longest_slice = 0;
  for (;;) {
    Eigen::Index pi = 0, pj = 0;
    double pmax = -1.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      for (Eigen::Index j = 0; j < grid.cols(); ++j) {
        const double a = std::abs(grid(i, j));
        if (a > pmax) {
          pmax = a;
          pi = i;
          pj = j;
        }
      }
    }

    if (pmax <= threshold) {
      const unsigned wanted = level_for(longest_slice);
      if (wanted > level) {
        rebuild(wanted);
        continue;
      }
      s.converged = true;
      s.achieved_error = pmax;
      s.grid_residuals.push_back(pmax);
      break;
    }
    if (s.rank() == opt.max_rank) {
      s.achieved_error = pmax;
      s.grid_residuals.push_back(pmax);
      break;
    }

    const double xp = xs[static_cast<std::size_t>(pi)];
    const double yp = ys[static_cast<std::size_t>(pj)];

    // Current expansion restricted to the pivot lines.
    std::vector<double> wx(s.rank()), wy(s.rank());
    double approx_at_pivot = 0.0;
    for (std::size_t k = 0; k < s.rank(); ++k) {
      const double phx = evaluate(s.cols[k], xp);
      const double psy = evaluate(s.rows[k], yp);
      wx[k] = s.c[k] * psy;  // multiplies phi_k(x) on the line y = yp
      wy[k] = s.c[k] * phx;  // multiplies psi_k(y) on the line x = xp
      approx_at_pivot += s.c[k] * phx * psy;
    }
    const double kp = K(xp, yp);
    detail::require_finite_sample(kp, xp, yp);
    const double pivot = kp - approx_at_pivot;
    if (pivot == 0.0) {
      s.achieved_error = pmax;
      s.grid_residuals.push_back(pmax);
      break;
    }

    auto col = detail::residual_slice([&](double t) { return K(t, yp); }, yp, true,
                                      detail::combine_coeffs(s.cols, wx), K.x_domain, opt);
    auto row = detail::residual_slice([&](double t) { return K(xp, t); }, xp, false,
                                      detail::combine_coeffs(s.rows, wy), K.y_domain, opt);

    const double growth = std::max(linf_norm(col.series, std::max<std::size_t>(col.series.size(), 2)),
                                   linf_norm(row.series, std::max<std::size_t>(row.series.size(), 2))) /
                          std::abs(pivot);
    if (growth > opt.max_growth) {
      const unsigned wanted = std::max(level_for(longest_slice), std::min(level + 1, opt.grid_cap));
      if (wanted > level) {
        rebuild(wanted);
        continue;
      }
      s.stalled = true;
      s.achieved_error = pmax;
      s.grid_residuals.push_back(pmax);
      break;
    }

    s.grid_residuals.push_back(pmax);
    s.pivots.emplace_back(xp, yp);
    s.pivot_values.push_back(pivot);
    s.c.push_back(1.0 / pivot);
    s.slices_resolved.push_back(col.resolved && row.resolved);
    longest_slice = std::max({longest_slice, col.series.size(), row.series.size()});

    const auto cv = values_on_grid(col.series, n);
    const auto rv = values_on_grid(row.series, n);
    s.cols.push_back(std::move(col.series));
    s.rows.push_back(std::move(row.series));

    const unsigned wanted = level_for(longest_slice);
    if (wanted > level) {
      rebuild(wanted);
    } else {
      const auto ni = static_cast<Eigen::Index>(n);
      grid.noalias() -= (s.c.back() * Eigen::Map<const Eigen::VectorXd>(cv.data(), ni)) *
                        Eigen::Map<const Eigen::VectorXd>(rv.data(), ni).transpose();
    }
  }
  s.final_grid = n;
  return s;
}

/// ||K - K_r||_{L2} for r = 0..R, by tensor Clenshaw-Curtis quadrature on
/// quad_points^2 nodes.
inline std::vector<double> l2_error_by_rank(const KernelSpec& K, const Skeleton& s, std::size_t quad_points) {
  if (quad_points < 2) throw InvalidArgument("l2_error_by_rank: need at least 2 quadrature points");
  const auto xs = cheb_points(quad_points, K.x_domain);
  const auto ys = cheb_points(quad_points, K.y_domain);
  const auto wx = clenshaw_curtis_weights(quad_points, K.x_domain);
  const auto wy = clenshaw_curtis_weights(quad_points, K.y_domain);
  const auto n = static_cast<Eigen::Index>(quad_points);

  Skeleton empty = s.truncated(0);
  Eigen::MatrixXd e = detail::residual_on_grid(K, empty, xs, ys);
  const Eigen::VectorXd sx = Eigen::Map<const Eigen::VectorXd>(wx.data(), n).cwiseSqrt();
  const Eigen::VectorXd sy = Eigen::Map<const Eigen::VectorXd>(wy.data(), n).cwiseSqrt();
  e = sx.asDiagonal() * e * sy.asDiagonal();

  std::vector<double> out;
  out.reserve(s.rank() + 1);
  out.push_back(e.norm());
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const auto pv = values_on_grid(s.cols[j], quad_points);
    const auto qv = values_on_grid(s.rows[j], quad_points);
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(pv.data(), n).cwiseProduct(sx) * s.c[j];
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(qv.data(), n).cwiseProduct(sy);
    e.noalias() -= a * b.transpose();
    out.push_back(e.norm());
  }
  return out;
}

}  // namespace mercer
