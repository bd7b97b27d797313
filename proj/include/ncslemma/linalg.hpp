#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ncslemma {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kDefaultStrictTol = 1e-6;
inline constexpr double kSymmetryTol = 1e-12;

/// Dense row-major real matrix. Houses every non-symmetric object
/// (shuffles, projections, factors, hereditary variables).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  void add_block(std::size_t r0, std::size_t c0, const Matrix& b, double scale = 1.0);

  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);

/// Frobenius inner product.
double inner(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
double quad_form(const Matrix& a, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Matrix outer(std::span<const double> u, std::span<const double> v);

/// Kronecker product; throws DimensionTooLarge when the result would not fit.
Matrix kron(const Matrix& a, const Matrix& b);

/// Symmetric matrix. Symmetry holds exactly: the checked constructor
/// averages violations up to the tolerance and rejects anything larger.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}

  static SymMatrix checked(Matrix m, double tol = kSymmetryTol);
  /// Averages with the transpose, no rejection. For internally computed
  /// products that are symmetric up to roundoff.
  static SymMatrix symmetrized(const Matrix& m);
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// Eigenvalues sorted descending, eigenvectors as matching columns.
struct EigDecomp {
  std::vector<double> values;
  Matrix vectors;

  double min() const { return values.back(); }
  double max() const { return values.front(); }
  std::vector<double> vector(std::size_t k) const;
  /// Unit eigenvector of the smallest eigenvalue; among eigenvalues within
  /// 1e-10 of the minimum the one with the lowest sorted index wins.
  std::vector<double> bottom_vector() const;
};

/// Cyclic Jacobi eigendecomposition.
EigDecomp sym_eig(const SymMatrix& s);
double lambda_min(const SymMatrix& s);

/// True iff lambda_min(s) >= -tol * (1 + ||s||_F).
bool is_psd(const SymMatrix& s, double tol = kDefaultTol);

SymMatrix psd_project(const SymMatrix& s);

/// Euclidean projection of v onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Euclidean projection onto {M >= 0, tr M = 1}.
SymMatrix spectraplex_project(const SymMatrix& s);

/// V with S = V V^T; one column per eigenvalue above tol * (1 + ||S||_F).
Matrix psd_factor(const SymMatrix& s, double tol = kDefaultTol);

}  // namespace ncslemma
