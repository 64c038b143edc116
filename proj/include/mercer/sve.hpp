#pragma once

// Singular value expansion from a pseudo-skeleton: quasimatrix QR of the
// column and row factors, an R x R dense SVD of R1 C R2^T, and assembly of the
// singular functions as combinations of the orthonormal Q columns. Also the
// dense-grid SVD used as an independent reference.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mercer/chebapprox.hpp"
#include "mercer/errors.hpp"
#include "mercer/gallery.hpp"
#include "mercer/parallel.hpp"
#include "mercer/skeleton.hpp"

namespace mercer {

/// A matrix whose columns are Chebyshev series on one interval.
class Quasimatrix {
 public:
  Quasimatrix() = default;
  explicit Quasimatrix(Interval domain) : domain_(domain) {}
  Quasimatrix(Interval domain, std::vector<ChebSeries> columns) : domain_(domain), columns_(std::move(columns)) {
    for (const auto& c : columns_) {
      if (!(c.domain() == domain_)) throw InvalidArgument("Quasimatrix: columns must share the domain");
    }
  }

  const Interval& domain() const noexcept { return domain_; }
  const std::vector<ChebSeries>& columns() const noexcept { return columns_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const ChebSeries& operator[](std::size_t j) const { return columns_.at(j); }

  std::size_t max_degree() const noexcept {
    std::size_t d = 0;
    for (const auto& c : columns_) d = std::max(d, c.degree());
    return d;
  }

 private:
  Interval domain_;
  std::vector<ChebSeries> columns_;
};

struct QRResult {
  Quasimatrix Q;
  Eigen::MatrixXd R;
  /// True when some |R_jj| <= 1e-12 * max_k |R_kk|.
  bool rank_deficient = false;
};

struct SveProvenance {
  std::string kernel;
  double tol = 0.0;
  std::size_t skeleton_rank = 0;
};

struct SVE {
  std::vector<double> sigma;
  Quasimatrix U;
  Quasimatrix V;
  SveProvenance provenance;

  std::size_t size() const noexcept { return sigma.size(); }
};

namespace detail {

/// T_k(x_i) for the n ascending Chebyshev points and k < ncoef.
inline Eigen::MatrixXd cheb_vandermonde(std::size_t n, std::size_t ncoef) {
  Eigen::MatrixXd T(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ncoef));
  if (n == 1) {
    for (std::size_t k = 0; k < ncoef; ++k) T(0, static_cast<Eigen::Index>(k)) = (k % 4 == 0) ? 1.0 : (k % 2 ? 0.0 : -1.0);
    return T;
  }
  const std::size_t N = n - 1;
  const auto tab = cosine_table(N);
  const std::size_t period = 2 * N;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < ncoef; ++k) {
      // T_k(x_i) = (-1)^k cos(pi k i / N)
      const double c = tab[(k % period) * i % period];
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (k % 2 == 0) ? c : -c;
    }
  }
  return T;
}

/// Coefficient matrix (ncoef rows) of a set of columns, zero-padded.
inline Eigen::MatrixXd coeff_matrix(const std::vector<ChebSeries>& cols, std::size_t ncoef) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ncoef), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto c = cols[j].coeffs();
    for (std::size_t k = 0; k < c.size() && k < ncoef; ++k) {
      C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = c[k];
    }
  }
  return C;
}

inline std::vector<ChebSeries> columns_from_coeffs(const Eigen::MatrixXd& C, const Interval& domain) {
  std::vector<ChebSeries> out;
  out.reserve(static_cast<std::size_t>(C.cols()));
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    std::vector<double> c(C.col(j).data(), C.col(j).data() + C.rows());
    if (c.empty()) c.push_back(0.0);
    out.emplace_back(std::move(c), domain);
  }
  return out;
}

/// Samples of every column at m Chebyshev points, scaled by sqrt(CC weights).
inline Eigen::MatrixXd weighted_samples(const Quasimatrix& A, std::size_t m, std::size_t ncoef) {
  const Eigen::MatrixXd C = coeff_matrix(A.columns(), ncoef);
  const auto w = clenshaw_curtis_weights(m, A.domain());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), C.cols());
  // Row blocks of the Vandermonde matrix keep memory at O(block * ncoef).
  constexpr std::size_t block = 256;
  const std::size_t N = m - 1;
  const auto tab = m > 1 ? cosine_table(N) : std::vector<double>{};
  for (std::size_t r0 = 0; r0 < m; r0 += block) {
    const std::size_t rows = std::min(block, m - r0);
    Eigen::MatrixXd T(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(ncoef));
    if (m == 1) {
      T = cheb_vandermonde(1, ncoef);
    } else {
      for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t step = (r0 + i) % (2 * N);
        std::size_t idx = 0;
        for (std::size_t k = 0; k < ncoef; ++k) {
          T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (k % 2 == 0) ? tab[idx] : -tab[idx];
          idx = wrap(idx + step, 2 * N);
        }
      }
    }
    out.middleRows(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(rows)).noalias() = T * C;
    for (std::size_t i = 0; i < rows; ++i) out.row(static_cast<Eigen::Index>(r0 + i)) *= std::sqrt(w[r0 + i]);
  }
  return out;
}

}  // namespace detail

/// Gram matrix <A_i, A_j> by Clenshaw-Curtis quadrature exact for the products.
inline Eigen::MatrixXd gram(const Quasimatrix& A) {
  const auto r = static_cast<Eigen::Index>(A.cols());
  if (r == 0) return Eigen::MatrixXd(0, 0);
  const std::size_t d = A.max_degree();
  const Eigen::MatrixXd S = detail::weighted_samples(A, 2 * d + 1, d + 1);
  return S.transpose() * S;
}

/// max |Gram(A) - I| entry; 0 for an empty quasimatrix.
inline double orthonormality_error(const Quasimatrix& A) {
  if (A.cols() == 0) return 0.0;
  const Eigen::MatrixXd G = gram(A);
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

/// A = Q R with L2-orthonormal Q columns and nonnegative diag(R).
inline QRResult qr(const Quasimatrix& A) {
  QRResult out{Quasimatrix(A.domain()), Eigen::MatrixXd(0, 0), false};
  const auto r = static_cast<Eigen::Index>(A.cols());
  if (r == 0) return out;

  // m = 2d + 1 points integrate products of degree-d columns exactly, and the
  // even-indexed subset is the (d + 1)-point grid used to re-interpolate Q.
  const std::size_t d = std::max<std::size_t>(A.max_degree(), static_cast<std::size_t>(r) - 1);
  const std::size_t m = 2 * d + 1;
  const Eigen::MatrixXd S = detail::weighted_samples(A, m, d + 1);

  Eigen::HouseholderQR<Eigen::MatrixXd> hqr(S);
  Eigen::MatrixXd Qs = hqr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), r);
  Eigen::MatrixXd R = hqr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (R(j, j) < 0.0) {
      R.row(j) *= -1.0;
      Qs.col(j) *= -1.0;
    }
  }

  const auto w = clenshaw_curtis_weights(m, A.domain());
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(d + 1), r);
  for (std::size_t i = 0; i <= d; ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = Qs.row(static_cast<Eigen::Index>(2 * i)) / std::sqrt(w[2 * i]);
  }
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(d + 1), r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const std::vector<double> vals(sub.col(j).data(), sub.col(j).data() + sub.rows());
    const auto c = values_to_coeffs(vals);
    coeffs.col(j) = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  }
  out.Q = Quasimatrix(A.domain(), detail::columns_from_coeffs(coeffs, A.domain()));

  const double dmax = R.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (std::abs(R(j, j)) <= 1e-12 * dmax) out.rank_deficient = true;
  }
  out.R = std::move(R);
  return out;
}

/// Relative threshold below which singular values are treated as zero.
inline constexpr double kSigmaDropRatio = 1e-15;

inline SVE sve_from_skeleton(const Skeleton& s, std::string kernel_name = {}) {
  SVE e;
  e.U = Quasimatrix(s.x_domain);
  e.V = Quasimatrix(s.y_domain);
  e.provenance = {std::move(kernel_name), s.tol, s.rank()};
  const auto r = static_cast<Eigen::Index>(s.rank());
  if (r == 0) return e;

  const auto left = qr(Quasimatrix(s.x_domain, s.cols));
  const auto right = qr(Quasimatrix(s.y_domain, s.rows));
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(s.c.data(), r);
  const Eigen::MatrixXd M = left.R * c.asDiagonal() * right.R.transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return e;
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) > kSigmaDropRatio * sv(0)) ++keep;

  const std::size_t du = left.Q.max_degree() + 1, dv = right.Q.max_degree() + 1;
  Eigen::MatrixXd cu = detail::coeff_matrix(left.Q.columns(), du) * svd.matrixU().leftCols(keep);
  Eigen::MatrixXd cv = detail::coeff_matrix(right.Q.columns(), dv) * svd.matrixV().leftCols(keep);

  // Largest-magnitude Chebyshev coefficient of each u_n is made positive.
  for (Eigen::Index j = 0; j < keep; ++j) {
    Eigen::Index at = 0;
    cu.col(j).cwiseAbs().maxCoeff(&at);
    if (cu(at, j) < 0.0) {
      cu.col(j) *= -1.0;
      cv.col(j) *= -1.0;
    }
  }
  e.sigma.assign(sv.data(), sv.data() + keep);
  e.U = Quasimatrix(s.x_domain, detail::columns_from_coeffs(cu, s.x_domain));
  e.V = Quasimatrix(s.y_domain, detail::columns_from_coeffs(cv, s.y_domain));
  return e;
}

inline double sve_eval(const SVE& e, double x, double y) {
  if (!e.U.domain().contains(x) || !e.V.domain().contains(y)) {
    std::ostringstream msg;
    msg << "sve_eval: (" << x << ", " << y << ") outside the domain";
    throw DomainError(msg.str());
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) acc += e.sigma[j] * evaluate(e.U[j], x) * evaluate(e.V[j], y);
  return acc;
}

/// The first k singular triples.
inline SVE truncate(const SVE& e, std::ptrdiff_t k) {
  if (k < 0 || static_cast<std::size_t>(k) > e.size()) throw InvalidArgument("truncate: k must lie in [0, size]");
  const auto n = static_cast<std::size_t>(k);
  SVE out;
  out.sigma.assign(e.sigma.begin(), e.sigma.begin() + k);
  out.U = Quasimatrix(e.U.domain(), {e.U.columns().begin(), e.U.columns().begin() + static_cast<std::ptrdiff_t>(n)});
  out.V = Quasimatrix(e.V.domain(), {e.V.columns().begin(), e.V.columns().begin() + static_cast<std::ptrdiff_t>(n)});
  out.provenance = e.provenance;
  return out;
}

/// sqrt(sum_{n > k} sigma_n^2) over the stored spectrum.
inline double tail_l2(const SVE& e, std::ptrdiff_t k) {
  if (k < 0 || static_cast<std::size_t>(k) > e.size()) throw InvalidArgument("tail_l2: k must lie in [0, size]");
  double acc = 0.0;
  for (std::size_t j = e.size(); j-- > static_cast<std::size_t>(k);) acc += e.sigma[j] * e.sigma[j];
  return std::sqrt(acc);
}

/// Throws IntegrityError unless sigma is positive and nonincreasing, the
/// counts agree and both factors are orthonormal to gram_tol.
inline void validate(const SVE& e, double gram_tol = 1e-10) {
  if (e.U.cols() != e.sigma.size() || e.V.cols() != e.sigma.size()) {
    throw IntegrityError("SVE: sigma, u and v counts differ");
  }
  for (std::size_t j = 0; j < e.sigma.size(); ++j) {
    if (!(e.sigma[j] > 0.0) || !std::isfinite(e.sigma[j])) throw IntegrityError("SVE: sigma must be positive");
    if (j > 0 && e.sigma[j] > e.sigma[j - 1]) throw IntegrityError("SVE: sigma must be nonincreasing");
  }
  if (orthonormality_error(e.U) > gram_tol) throw IntegrityError("SVE: u functions are not orthonormal");
  if (orthonormality_error(e.V) > gram_tol) throw IntegrityError("SVE: v functions are not orthonormal");
}

/// Singular values of [sqrt(w_i) K(x_i, y_j) sqrt(w_j)] on an n x n
/// Chebyshev grid with Clenshaw-Curtis weights w.
inline std::vector<double> dense_svd_oracle(const KernelSpec& K, std::size_t n) {
  if (n < 2) throw InvalidArgument("dense_svd_oracle: n must be at least 2");
  const auto xs = cheb_points(n, K.x_domain);
  const auto ys = cheb_points(n, K.y_domain);
  const auto wx = clenshaw_curtis_weights(n, K.x_domain);
  const auto wy = clenshaw_curtis_weights(n, K.y_domain);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd A(ni, ni);
  parallel_for(0, n, [&](std::size_t j) {
    const double sj = std::sqrt(wy[j]);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = K(xs[i], ys[j]);
      detail::require_finite_sample(v, xs[i], ys[j]);
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sqrt(wx[i]) * v * sj;
    }
  });
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

}  // namespace mercer
