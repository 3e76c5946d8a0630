#include "remest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "remest/errors.hpp"

namespace remest::linalg {

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_square(const Mat& a, const char* op) {
  if (!a.is_square()) {
    throw DimensionError(std::string(op) + ": expected a square matrix, got " + shape(a));
  }
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
  }
}

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols) : Mat(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) {
    throw DimensionError("Mat: rows and cols must be positive");
  }
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Mat: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                         std::to_string(data_.size()));
  }
  check_finite();
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) {
    throw DimensionError("Mat: rows and cols must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw DimensionError("Mat: ragged initializer list");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
  check_finite();
}

void Mat::check_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw DomainError("Mat: non-finite entry");
    }
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> diag) {
  Mat m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  m.check_finite();
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat& Mat::operator+=(const Mat& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  check_finite();
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  check_finite();
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  check_finite();
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat mat_mul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("mat_mul: " + shape(a) + " times " + shape(b));
  }
  std::vector<double> out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[i * b.cols() + j] += aik * b(k, j);
    }
  }
  return Mat(a.rows(), b.cols(), std::move(out));
}

std::vector<double> mat_vec(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw DimensionError("mat_vec: " + shape(a) + " times vector of length " + std::to_string(x.size()));
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double trace(const Mat& a) {
  require_square(a, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return m;
}

bool is_symmetric(const Mat& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

Mat symmetrize(const Mat& a) {
  require_square(a, "symmetrize");
  Mat s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s(i, j) = s(j, i) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

double spectral_radius_sq(const Mat& a, const EigenOptions& opts) {
  require_square(a, "spectral_radius_sq");
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0) * a(0, 0);
  if (n == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = tr * tr / 4.0 - det;
    if (disc < 0.0) return det;  // complex pair, |λ|² = λ λ̄ = det
    const double root = std::sqrt(disc);
    const double rho = std::max(std::abs(tr / 2.0 + root), std::abs(tr / 2.0 - root));
    return rho * rho;
  }

  // Deterministic start vector with no special alignment.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * static_cast<double>(i) + 0.011 * static_cast<double>(i * i);
  double nv = norm2(v);
  for (double& x : v) x /= nv;

  double mu_prev = -1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<double> w = mat_vec(a, v);
    const double mu = norm2(w);
    if (mu == 0.0) return 0.0;
    for (double& x : w) x /= mu;
    // Direction converges up to sign for a real dominant eigenvalue.
    double same = 0.0, flipped = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      same = std::max(same, std::abs(w[i] - v[i]));
      flipped = std::max(flipped, std::abs(w[i] + v[i]));
    }
    const double dir_change = std::min(same, flipped);
    const bool value_done = std::abs(mu - mu_prev) <= opts.tol * std::max(1.0, mu);
    v = std::move(w);
    if (value_done && dir_change <= std::sqrt(opts.tol)) return mu * mu;
    mu_prev = mu;
  }
  throw ConvergenceError(
      "spectral_radius_sq: power iteration did not converge (complex or repeated dominant eigenvalue?)",
      opts.max_iter, mu_prev);
}

std::vector<double> symmetric_eigenvalues(const Mat& a, const EigenOptions& opts) {
  require_square(a, "symmetric_eigenvalues");
  if (!is_symmetric(a, 1e-9 * std::max(1.0, max_abs(a)))) {
    throw DomainError("symmetric_eigenvalues: matrix is not symmetric");
  }
  const std::size_t n = a.rows();
  Mat m = symmetrize(a);
  const double scale = std::max(1.0, max_abs(a));
  for (int sweep = 0; sweep < opts.max_iter; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (std::sqrt(off) <= opts.tol * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

Mat cholesky_psd(const Mat& a, double tol) {
  require_square(a, "cholesky_psd");
  const std::size_t n = a.rows();
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, std::abs(a(i, i)));
  const double floor = tol * std::max(diag_max, 1e-300);
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d < -std::max(floor, 1e-12 * diag_max)) {
      throw DomainError("cholesky_psd: matrix is not positive semi-definite");
    }
    if (d <= floor) continue;  // zero column
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Mat spd_inverse(const Mat& a, double sym_tol) {
  require_square(a, "spd_inverse");
  if (!is_symmetric(a, sym_tol * std::max(1.0, max_abs(a)))) {
    throw DomainError("spd_inverse: matrix is not symmetric");
  }
  const std::size_t n = a.rows();
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, std::abs(a(i, i)));
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-14 * diag_max)) {
      throw DomainError("spd_inverse: matrix is not positive definite");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  // Solve L Lᵀ X = I column by column.
  Mat inv(n, n);
  std::vector<double> y(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
      y[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, col);
      inv(i, col) = s / l(i, i);
    }
  }
  return symmetrize(inv);
}

std::vector<double> lu_solve(Mat a, std::vector<double> b, double singular_tol) {
  require_square(a, "lu_solve");
  const std::size_t n = a.rows();
  if (b.size() != n) {
    throw DimensionError("lu_solve: right-hand side has length " + std::to_string(b.size()) +
                         ", expected " + std::to_string(n));
  }
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= singular_tol * scale) {
      throw DomainError("lu_solve: matrix is singular to working precision");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double factor = a(i, col) / a(col, col);
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
      b[i] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace remest::linalg
