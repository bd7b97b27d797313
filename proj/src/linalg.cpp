#include "ncslemma/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ncslemma/error.hpp"

namespace ncslemma {

namespace {

constexpr std::size_t kMaxEntries = std::size_t{1} << 30;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::ShapeMismatch,
          std::string(op) + ": " + shape(a) + " vs " + shape(b));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, ErrorCode::ShapeMismatch,
          "matrix data length " + std::to_string(data_.size()) + " for shape " +
              std::to_string(rows) + "x" + std::to_string(cols));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    require(row.size() == cols_, ErrorCode::ShapeMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, ErrorCode::ShapeMismatch,
          "block out of range of " + shape(*this));
  Matrix b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    std::copy_n(&data_[(r0 + r) * cols_ + c0], nc, &b.data_[r * nc]);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, ErrorCode::ShapeMismatch,
          "set_block: " + shape(b) + " does not fit into " + shape(*this));
  for (std::size_t r = 0; r < b.rows_; ++r)
    std::copy_n(&b.data_[r * b.cols_], b.cols_, &data_[(r0 + r) * cols_ + c0]);
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& b, double scale) {
  require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, ErrorCode::ShapeMismatch,
          "add_block: " + shape(b) + " does not fit into " + shape(*this));
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c)
      data_[(r0 + r) * cols_ + c0 + c] += scale * b.data_[r * b.cols_ + c];
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const { return std::sqrt(dot(data_, data_)); }

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::ShapeMismatch,
          "matmul: " + shape(a) + " * " + shape(b));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner");
  return dot(a.data(), b.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::ShapeMismatch, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::ShapeMismatch, "matvec: " + shape(a));
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double quad_form(const Matrix& a, std::span<const double> x) {
  const auto ax = matvec(a, x);
  return dot(x, ax);
}

Matrix outer(std::span<const double> u, std::span<const double> v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const auto checked_mul = [](std::size_t x, std::size_t y) {
    if (x != 0 && y > std::numeric_limits<std::size_t>::max() / x)
      fail(ErrorCode::DimensionTooLarge, "kron dimension overflows");
    return x * y;
  };
  const std::size_t rows = checked_mul(a.rows(), b.rows());
  const std::size_t cols = checked_mul(a.cols(), b.cols());
  if (rows != 0 && checked_mul(rows, cols) > kMaxEntries)
    fail(ErrorCode::DimensionTooLarge,
         "kron result " + std::to_string(rows) + "x" + std::to_string(cols));
  Matrix k(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

// ---------------------------------------------------------------------------

SymMatrix SymMatrix::checked(Matrix m, double tol) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "symmetric matrix must be square");
  require(m.all_finite(), ErrorCode::InvalidInput, "non-finite matrix entry");
  const double scale = 1.0 + m.max_abs();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double gap = std::abs(m(i, j) - m(j, i));
      require(gap <= tol * scale, ErrorCode::InvalidInput,
              "matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) +
                  "), gap " + std::to_string(gap));
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "symmetric matrix must be square");
  Matrix s = m;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  return SymMatrix(Matrix::diagonal(diag));
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  m_ += o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  m_ -= o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

// ---------------------------------------------------------------------------

std::vector<double> EigDecomp::vector(std::size_t k) const {
  std::vector<double> v(vectors.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
  return v;
}

std::vector<double> EigDecomp::bottom_vector() const {
  const double lo = min();
  std::size_t k = values.size() - 1;
  while (k > 0 && values[k - 1] - lo <= 1e-10) --k;
  return vector(k);
}

EigDecomp sym_eig(const SymMatrix& s) {
  const Matrix& in = s.matrix();
  require(in.all_finite(), ErrorCode::InvalidInput, "sym_eig: non-finite entries");
  const std::size_t n = s.dim();
  Matrix a = in;
  Matrix v = Matrix::identity(n);

  const double total = in.frobenius_norm();
  const double target = std::numeric_limits<double>::epsilon() * total;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= target || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigDecomp out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double lambda_min(const SymMatrix& s) { return sym_eig(s).min(); }

bool is_psd(const SymMatrix& s, double tol) {
  require(tol >= 0.0, ErrorCode::InvalidInput, "is_psd: negative tolerance");
  return lambda_min(s) >= -tol * (1.0 + s.frobenius_norm());
}

namespace {

SymMatrix reconstruct(const EigDecomp& e, std::span<const double> values) {
  const std::size_t n = e.vectors.rows();
  Matrix m(n, n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lk = values[k];
    if (lk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = lk * e.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) m(i, j) += vik * e.vectors(j, k);
    }
  }
  return SymMatrix::symmetrized(m);
}

}  // namespace

SymMatrix psd_project(const SymMatrix& s) {
  const EigDecomp e = sym_eig(s);
  std::vector<double> clipped(e.values);
  for (double& v : clipped) v = std::max(v, 0.0);
  return reconstruct(e, clipped);
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  require(!v.empty(), ErrorCode::InvalidInput, "simplex projection of empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - shift, 0.0);
  return out;
}

SymMatrix spectraplex_project(const SymMatrix& s) {
  const EigDecomp e = sym_eig(s);
  const std::vector<double> w = project_to_simplex(e.values);
  SymMatrix out = reconstruct(e, w);
  // Roundoff in the reconstruction can move the trace by a few ulps.
  const double tr = out.trace();
  if (tr > 0.0) out *= 1.0 / tr;
  return out;
}

Matrix psd_factor(const SymMatrix& s, double tol) {
  const EigDecomp e = sym_eig(s);
  const double scale = 1.0 + s.frobenius_norm();
  require(e.min() >= -tol * scale, ErrorCode::NotPSD,
          "psd_factor: lambda_min = " + std::to_string(e.min()));
  std::size_t r = 0;
  while (r < e.values.size() && e.values[r] > tol * scale) ++r;
  Matrix v(s.dim(), r);
  for (std::size_t k = 0; k < r; ++k) {
    const double root = std::sqrt(e.values[k]);
    for (std::size_t i = 0; i < s.dim(); ++i) v(i, k) = root * e.vectors(i, k);
  }
  return v;
}

}  // namespace ncslemma
