#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ncslemma/linalg.hpp"
#include "ncslemma/ncpoly.hpp"

namespace ncslemma {

struct PositivityReport {
  bool psd = false;
  std::vector<double> eigenvalues;  // of the coefficient matrix, descending
  // Present when psd is false: the point X0 (n = m + 1) and a unit vector w
  // with w^T f(X0) w = witness_value < 0.
  std::optional<MatTuple> witness_point;
  std::vector<double> witness_vector;
  double witness_value = 0.0;
};

/// The (m+1) x (m+1) symmetric matrices with ones at (0, i) and (i, 0).
MatTuple positivity_probe(std::size_t m);

/// f is PSD on every symmetric tuple iff its coefficient matrix is PSD. The
/// negative case comes with an explicit, re-evaluated witness.
PositivityReport is_globally_psd(const NCQuadPoly& f, double tol = kDefaultTol);

/// f(x) = L(x)^T L(x) with L(x) = sum_i W_i x_i, each W_i of size r x q.
struct SosFactor {
  std::size_t m = 0;
  std::size_t q = 0;
  std::size_t rank = 0;
  std::vector<Matrix> W;
};

SosFactor sos_factor(const NCQuadPoly& f, double tol = kDefaultTol);

/// L(X) = sum_i W_i (x) X_i^T (rn x qn); X_i^T = X_i for symmetric tuples,
/// and the transpose makes L(X)^T L(X) the hereditary evaluation otherwise.
Matrix evaluate_linear(const SosFactor& l, const MatTuple& x);

// ---------------------------------------------------------------------------
// Scalar S-lemma: x^T B x >= 0 implies x^T A x >= 0.

struct ScalarOptions {
  double tol = kDefaultTol;
  double tol_strict = kDefaultStrictTol;
  std::size_t budget = 5000;
  std::uint64_t seed = 42;
};

enum class ScalarOutcome { Certificate, Counterexample, Inconclusive };

struct ScalarSLemmaResult {
  ScalarOutcome outcome = ScalarOutcome::Inconclusive;
  double lambda = 0.0;        // multiplier at the best point found
  double best_value = 0.0;    // max over lambda >= 0 of lambda_min(A - lambda B)
  double bracket_hi = 0.0;    // search interval was [0, bracket_hi]
  std::vector<double> x;      // unit counterexample vector
  double x_a = 0.0;           // x^T A x
  double x_b = 0.0;           // x^T B x
};

/// Requires slater^T B slater > tol_strict (SlaterViolated otherwise).
/// Certificates need best_value >= -tol (1 + ||A||_F); counterexamples need
/// best_value <= -tol_strict (1 + ||A||_F); in between the answer is
/// Inconclusive.
ScalarSLemmaResult scalar_slemma(const SymMatrix& a, const SymMatrix& b,
                                 std::span<const double> slater,
                                 const ScalarOptions& options = {});

/// Given S >= 0 with <S, A> <= -tol_strict and <S, B> >= -tol, returns a
/// unit x with x^T A x < 0 and x^T B x >= -tol. Splits S into rank-one
/// terms of equal B-value by pairwise rotations, falling back to a seeded
/// search over sign combinations of the factor columns.
/// Throws PreconditionViolated or SplitFailed.
std::vector<double> rank_one_split(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                                   double tol = kDefaultTol,
                                   double tol_strict = kDefaultStrictTol,
                                   std::uint64_t seed = 42);

}  // namespace ncslemma
