#pragma once

// Small dense real matrices for control-sized systems (n up to ~8).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace remest::linalg {

/// Row-major dense matrix. Every entry is finite; construction rejects
/// NaN/Inf and empty shapes.
class Mat {
 public:
  /// rows x cols zero matrix.
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> entries() const noexcept { return data_; }

  Mat transpose() const;

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  void check_finite() const;

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);

/// Standard matrix product; throws DimensionError unless a.cols() == b.rows().
Mat mat_mul(const Mat& a, const Mat& b);
inline Mat operator*(const Mat& a, const Mat& b) { return mat_mul(a, b); }

/// y = a x.
std::vector<double> mat_vec(const Mat& a, std::span<const double> x);

double trace(const Mat& a);

double max_abs(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);
bool is_symmetric(const Mat& a, double tol = 1e-9);

/// (a + aᵀ)/2.
Mat symmetrize(const Mat& a);

struct EigenOptions {
  int max_iter = 10'000;
  double tol = 1e-12;
};

/// Square of the largest-magnitude eigenvalue ρ²(a).
///
/// 1x1 and 2x2 use the characteristic polynomial (complex pairs give
/// |λ|² = det). Larger matrices use power iteration on `a` itself; a complex
/// or non-unique dominant eigenvalue makes the iteration stall and raises
/// ConvergenceError.
double spectral_radius_sq(const Mat& a, const EigenOptions& opts = {});

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(const Mat& a, const EigenOptions& opts = {});

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Throws DomainError for non-symmetric, indefinite or numerically singular input.
Mat spd_inverse(const Mat& a, double sym_tol = 1e-9);

/// Lower-triangular L with L Lᵀ = a for symmetric PSD `a`; pivots below
/// `tol * max diag` are treated as zero so singular covariances are allowed.
Mat cholesky_psd(const Mat& a, double tol = 1e-12);

/// Solves a x = b by LU with partial pivoting. Throws DomainError when a
/// pivot falls below `singular_tol` relative to the largest entry.
std::vector<double> lu_solve(Mat a, std::vector<double> b, double singular_tol = 1e-13);

}  // namespace remest::linalg
