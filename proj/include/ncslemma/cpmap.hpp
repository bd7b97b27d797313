#pragma once

#include <cstddef>
#include <functional>

#include "ncslemma/linalg.hpp"
#include "ncslemma/ncpoly.hpp"

namespace ncslemma {

/// Choi matrix of a linear map phi: R^{s x s} -> R^{t x t},
///   J = sum_ab phi(E_ab) (x) E_ab,
/// i.e. a t x t grid of s x s blocks with J_cd[a][b] = phi(E_ab)_cd.
/// Only symmetric Choi matrices are representable.
class ChoiMatrix {
 public:
  ChoiMatrix() = default;
  static ChoiMatrix create(std::size_t s, std::size_t t, SymMatrix j);

  std::size_t s() const noexcept { return s_; }
  std::size_t t() const noexcept { return t_; }
  const SymMatrix& J() const noexcept { return j_; }

 private:
  ChoiMatrix(std::size_t s, std::size_t t, SymMatrix j) : s_(s), t_(t), j_(std::move(j)) {}

  std::size_t s_ = 0;
  std::size_t t_ = 0;
  SymMatrix j_;
};

/// Builds J from the action on matrix units. Rejects maps whose Choi matrix
/// is not symmetric (InvalidInput).
ChoiMatrix choi_from_map(std::size_t s, std::size_t t,
                         const std::function<Matrix(const Matrix&)>& phi);

ChoiMatrix identity_choi(std::size_t q);

/// phi(M) with phi(M)_cd = <J_cd, M>. Works for non-symmetric M.
Matrix apply_map(const ChoiMatrix& j, const Matrix& m);
SymMatrix apply_map(const ChoiMatrix& j, const SymMatrix& m);

bool is_completely_positive(const ChoiMatrix& j, double tol = kDefaultTol);

/// Where the map acts inside a block matrix.
///   Inner: a k x k grid of s x s blocks, each block replaced by phi(block);
///          realizes (1_k (x) phi), e.g. on coefficient matrices.
///   Outer: an s x s grid of k x k blocks, realizes (phi (x) 1_k), e.g. on
///          evaluations f(X) or Gram matrices.
enum class BlockLayout { Inner, Outer };

Matrix apply_map_blockwise(const ChoiMatrix& j, const Matrix& b, BlockLayout layout);

/// The polynomial sum phi(B_ij) x_i x_j. Throws SymmetryBroken when
/// phi(B_ij) != phi(B_ji)^T beyond 1e-10.
NCQuadPoly apply_map_to_poly(const ChoiMatrix& j, const NCQuadPoly& g);

/// (qm) x (qm) permutation with u[j*m + i][i*q + j] = 1.
Matrix shuffle(std::size_t q, std::size_t m);

/// Rearranged coefficient matrix: the Choi matrix (s = m, t = q) of the map
/// psi_f(N) = sum_ij N_ij A_ij. Equals u A u^T for u = shuffle(q, m).
ChoiMatrix rearrange(const NCQuadPoly& p);

/// mn x mn block matrix of products X_i X_j (X_i X_j^T for general tuples).
SymMatrix gram(const MatTuple& x);

/// (1_m (x) phi_K) B for a q^2 x q^2 Choi matrix K and the coefficient
/// matrix B of g. K need not be PSD.
SymMatrix map_coefficients(const SymMatrix& k, const NCQuadPoly& g);

/// Adjoint of K -> map_coefficients(K, g): W -> sum_ij W_ij (x) B_ij, for W
/// an mq x mq symmetric matrix with q x q blocks W_ij.
SymMatrix map_coefficients_adjoint(const SymMatrix& w, const NCQuadPoly& g);

}  // namespace ncslemma
