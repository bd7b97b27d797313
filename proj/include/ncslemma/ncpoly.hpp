#pragma once

#include <cstddef>
#include <vector>

#include "ncslemma/linalg.hpp"

namespace ncslemma {

/// Symmetric quadratic homogeneous matrix-valued NC polynomial
///   f(x) = sum_{i,j} A_ij x_i x_j,   A_ij = A_ji^T,  A_ij in R^{q x q}.
/// Blocks are stored unassembled; the mq x mq coefficient matrix is built on
/// demand.
class NCQuadPoly {
 public:
  NCQuadPoly() = default;
  /// blocks[i * m + j] = A_ij. Symmetry violations up to 1e-12 (relative)
  /// are averaged away, larger ones throw AsymmetricCoefficients.
  static NCQuadPoly create(std::size_t m, std::size_t q, std::vector<Matrix> blocks);
  static NCQuadPoly zero(std::size_t m, std::size_t q);
  /// Splits an mq x mq symmetric matrix into q x q blocks.
  static NCQuadPoly from_coefficient_matrix(std::size_t m, std::size_t q, const SymMatrix& a);

  std::size_t m() const noexcept { return m_; }
  std::size_t q() const noexcept { return q_; }
  const Matrix& block(std::size_t i, std::size_t j) const { return blocks_[i * m_ + j]; }
  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }

  SymMatrix coefficient_matrix() const;

  friend NCQuadPoly operator+(const NCQuadPoly& a, const NCQuadPoly& b);
  friend NCQuadPoly operator-(const NCQuadPoly& a, const NCQuadPoly& b);
  friend NCQuadPoly operator*(double s, const NCQuadPoly& p);

 private:
  NCQuadPoly(std::size_t m, std::size_t q, std::vector<Matrix> blocks)
      : m_(m), q_(q), blocks_(std::move(blocks)) {}

  std::size_t m_ = 0;
  std::size_t q_ = 0;
  std::vector<Matrix> blocks_;
};

enum class TupleKind { Symmetric, General };

/// An m-tuple of n x n matrices, the evaluation point of a polynomial.
class MatTuple {
 public:
  MatTuple() = default;
  static MatTuple create(std::size_t n, TupleKind kind, std::vector<Matrix> mats);

  std::size_t m() const noexcept { return mats_.size(); }
  std::size_t n() const noexcept { return n_; }
  TupleKind kind() const noexcept { return kind_; }
  const Matrix& operator[](std::size_t i) const { return mats_[i]; }
  const std::vector<Matrix>& mats() const noexcept { return mats_; }

 private:
  MatTuple(std::size_t n, TupleKind kind, std::vector<Matrix> mats)
      : n_(n), kind_(kind), mats_(std::move(mats)) {}

  std::size_t n_ = 0;
  TupleKind kind_ = TupleKind::Symmetric;
  std::vector<Matrix> mats_;
};

/// Commutative quadratic x^T A x (+ a^T x + a0 for the nonhomogeneous form).
struct ScalarQuad {
  SymMatrix A;
  std::vector<double> a;
  double a0 = 0.0;

  std::size_t m() const { return A.dim(); }
};

/// sum A_ij (x) X_i X_j. Requires a symmetric tuple.
SymMatrix evaluate(const NCQuadPoly& p, const MatTuple& x);

/// sum A_ij (x) X_i X_j^T. Accepts either tuple kind.
SymMatrix evaluate_hereditary(const NCQuadPoly& p, const MatTuple& x);

/// (Id_q (x) Q^T) p(X) (Id_q (x) Q); the hereditary evaluation is used for
/// general tuples.
SymMatrix evaluate_compressed(const NCQuadPoly& p, const MatTuple& x, const Matrix& q);

/// The k-fold direct sum: blocks become diag(A_ij, ..., A_ij), q -> kq.
NCQuadPoly direct_sum_repeat(const NCQuadPoly& p, std::size_t k);

/// Embeds each block top-left in a q_new x q_new zero matrix.
NCQuadPoly pad_coefficients(const NCQuadPoly& p, std::size_t q_new);

NCQuadPoly scalar_to_nc(const ScalarQuad& s);

}  // namespace ncslemma
