#include "ncslemma/ncpoly.hpp"

#include <cmath>
#include <string>

#include "ncslemma/error.hpp"

namespace ncslemma {

namespace {

std::string idx(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void require_same_shape(const NCQuadPoly& a, const NCQuadPoly& b) {
  require(a.m() == b.m() && a.q() == b.q(), ErrorCode::ShapeMismatch,
          "polynomials differ in (m, q)");
}

}  // namespace

NCQuadPoly NCQuadPoly::create(std::size_t m, std::size_t q, std::vector<Matrix> blocks) {
  require(m >= 1 && q >= 1, ErrorCode::ShapeMismatch, "m and q must be positive");
  require(blocks.size() == m * m, ErrorCode::ShapeMismatch,
          "expected " + std::to_string(m * m) + " coefficient blocks, got " +
              std::to_string(blocks.size()));
  double scale = 1.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    require(b.rows() == q && b.cols() == q, ErrorCode::ShapeMismatch,
            "block " + idx(k / m, k % m) + " is not " + std::to_string(q) + "x" +
                std::to_string(q));
    require(b.all_finite(), ErrorCode::InvalidInput, "non-finite coefficient");
    scale = std::max(scale, 1.0 + b.max_abs());
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      Matrix& aij = blocks[i * m + j];
      Matrix& aji = blocks[j * m + i];
      for (std::size_t r = 0; r < q; ++r)
        for (std::size_t c = 0; c < q; ++c) {
          if (i == j && c < r) continue;
          double& x = aij(r, c);
          double& y = aji(c, r);
          const double gap = std::abs(x - y);
          if (gap > kSymmetryTol * scale)
            fail(ErrorCode::AsymmetricCoefficients,
                 "A" + idx(i, j) + " != A" + idx(j, i) + "^T at entry " + idx(r, c));
          const double avg = 0.5 * (x + y);
          x = avg;
          y = avg;
        }
    }
  return NCQuadPoly(m, q, std::move(blocks));
}

NCQuadPoly NCQuadPoly::zero(std::size_t m, std::size_t q) {
  return create(m, q, std::vector<Matrix>(m * m, Matrix(q, q)));
}

NCQuadPoly NCQuadPoly::from_coefficient_matrix(std::size_t m, std::size_t q,
                                               const SymMatrix& a) {
  require(a.dim() == m * q, ErrorCode::ShapeMismatch, "coefficient matrix must be mq x mq");
  std::vector<Matrix> blocks;
  blocks.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) blocks.push_back(a.matrix().block(i * q, j * q, q, q));
  return create(m, q, std::move(blocks));
}

SymMatrix NCQuadPoly::coefficient_matrix() const {
  Matrix a(m_ * q_, m_ * q_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j) a.set_block(i * q_, j * q_, block(i, j));
  return SymMatrix::checked(std::move(a));
}

NCQuadPoly operator+(const NCQuadPoly& a, const NCQuadPoly& b) {
  require_same_shape(a, b);
  std::vector<Matrix> blocks = a.blocks_;
  for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k] += b.blocks_[k];
  return NCQuadPoly(a.m_, a.q_, std::move(blocks));
}

NCQuadPoly operator-(const NCQuadPoly& a, const NCQuadPoly& b) { return a + (-1.0) * b; }

NCQuadPoly operator*(double s, const NCQuadPoly& p) {
  std::vector<Matrix> blocks = p.blocks_;
  for (auto& b : blocks) b *= s;
  return NCQuadPoly(p.m_, p.q_, std::move(blocks));
}

// ---------------------------------------------------------------------------

MatTuple MatTuple::create(std::size_t n, TupleKind kind, std::vector<Matrix> mats) {
  require(n >= 1, ErrorCode::ShapeMismatch, "tuple matrix dimension must be positive");
  require(!mats.empty(), ErrorCode::ShapeMismatch, "empty tuple");
  for (std::size_t i = 0; i < mats.size(); ++i) {
    require(mats[i].rows() == n && mats[i].cols() == n, ErrorCode::ShapeMismatch,
            "tuple entry " + std::to_string(i) + " is not " + std::to_string(n) + "x" +
                std::to_string(n));
    if (kind == TupleKind::Symmetric) mats[i] = SymMatrix::checked(std::move(mats[i])).matrix();
    else
      require(mats[i].all_finite(), ErrorCode::InvalidInput, "non-finite tuple entry");
  }
  return MatTuple(n, kind, std::move(mats));
}

namespace {

SymMatrix evaluate_products(const NCQuadPoly& p, const MatTuple& x, bool transpose_right) {
  require(x.m() == p.m(), ErrorCode::ShapeMismatch,
          "tuple has " + std::to_string(x.m()) + " matrices, polynomial has " +
              std::to_string(p.m()) + " variables");
  const std::size_t n = x.n();
  const std::size_t q = p.q();
  std::vector<Matrix> right(x.m());
  for (std::size_t j = 0; j < x.m(); ++j) right[j] = transpose_right ? x[j].transpose() : x[j];

  Matrix out(q * n, q * n);
  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.m(); ++j) {
      const Matrix& a = p.block(i, j);
      if (a.max_abs() == 0.0) continue;
      out += kron(a, x[i] * right[j]);
    }
  return SymMatrix::symmetrized(out);
}

}  // namespace

SymMatrix evaluate(const NCQuadPoly& p, const MatTuple& x) {
  require(x.kind() == TupleKind::Symmetric, ErrorCode::InvalidInput,
          "evaluate needs a symmetric tuple; use evaluate_hereditary for general tuples");
  return evaluate_products(p, x, false);
}

SymMatrix evaluate_hereditary(const NCQuadPoly& p, const MatTuple& x) {
  return evaluate_products(p, x, true);
}

SymMatrix evaluate_compressed(const NCQuadPoly& p, const MatTuple& x, const Matrix& q) {
  require(q.rows() == x.n(), ErrorCode::ShapeMismatch,
          "compression matrix needs " + std::to_string(x.n()) + " rows");
  const SymMatrix full =
      x.kind() == TupleKind::Symmetric ? evaluate(p, x) : evaluate_hereditary(p, x);
  const Matrix lift = kron(Matrix::identity(p.q()), q);
  return SymMatrix::symmetrized(lift.transpose() * full.matrix() * lift);
}

NCQuadPoly direct_sum_repeat(const NCQuadPoly& p, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidInput, "direct sum needs k >= 1");
  const Matrix id = Matrix::identity(k);
  std::vector<Matrix> blocks;
  blocks.reserve(p.blocks().size());
  for (const auto& b : p.blocks()) blocks.push_back(kron(id, b));
  return NCQuadPoly::create(p.m(), k * p.q(), std::move(blocks));
}

NCQuadPoly pad_coefficients(const NCQuadPoly& p, std::size_t q_new) {
  require(q_new >= p.q(), ErrorCode::InvalidInput,
          "cannot pad q=" + std::to_string(p.q()) + " down to " + std::to_string(q_new));
  std::vector<Matrix> blocks;
  blocks.reserve(p.blocks().size());
  for (const auto& b : p.blocks()) {
    Matrix padded(q_new, q_new);
    padded.set_block(0, 0, b);
    blocks.push_back(std::move(padded));
  }
  return NCQuadPoly::create(p.m(), q_new, std::move(blocks));
}

NCQuadPoly scalar_to_nc(const ScalarQuad& s) {
  const std::size_t m = s.m();
  std::vector<Matrix> blocks;
  blocks.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) blocks.push_back(Matrix{{s.A(i, j)}});
  return NCQuadPoly::create(m, 1, std::move(blocks));
}

}  // namespace ncslemma
