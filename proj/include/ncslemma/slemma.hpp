#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncslemma/cpmap.hpp"
#include "ncslemma/linalg.hpp"
#include "ncslemma/ncpoly.hpp"

namespace ncslemma {

struct SolverOptions {
  double tol = kDefaultTol;
  double tol_strict = kDefaultStrictTol;
  std::size_t budget = 5000;  // supergradient iterations per search
  std::uint64_t seed = 42;
  std::size_t threads = 1;    // >= 2 runs the two searches of decide concurrently
  // Upper bound on tr K for the Choi matrix K of a certificate. decide
  // derives a valid one from the Slater point; standalone certify falls
  // back to a scale heuristic when unset.
  std::optional<double> trace_cap;
};

/// f - (phi (x) 1) g is globally PSD with phi = scale * phi_J, J trace one.
struct CpCertificate {
  ChoiMatrix J;
  double scale = 0.0;
  SymMatrix residual;  // A - (1_m (x) phi) B
  double residual_lambda_min = 0.0;
};

struct CertifyResult {
  std::optional<CpCertificate> certificate;
  double best_value = 0.0;   // best lambda_min of the residual seen
  double upper_bound = 0.0;  // barrier bound on that value within the trace cap
  double trace_cap = 0.0;
  std::size_t iterations = 0;
};

/// Searches K >= 0, tr K <= cap, for lambda_min(A - (1 (x) phi_K) B) >= 0.
/// Requires f.m == g.m and f.q == g.q (reconcile first).
CertifyResult certify(const NCQuadPoly& f, const NCQuadPoly& g, const SolverOptions& options = {});

struct SeparatorResult {
  std::optional<SymMatrix> M;  // trace one, PSD
  double best_value = 0.0;     // min(lambda_min(sum M_ij (x) B_ij), -<A, M>/c)
  double upper_bound = 0.0;
  double coupling = 0.0;       // <A, M>
  double adjoint_lambda_min = 0.0;
  std::size_t iterations = 0;
};

/// Searches trace-one M >= 0 with sum M_ij (x) B_ij >= 0 and <A, M> < 0.
SeparatorResult find_separator(const NCQuadPoly& f, const NCQuadPoly& g,
                               const SolverOptions& options = {});

struct Counterexample {
  SymMatrix M;                // separator actually used, M = V V^T
  std::size_t rank = 0;
  MatTuple X;                 // n = rank + q
  Matrix P;                   // diag(0_rank, Id_q)
  std::vector<double> E;      // sum_a e_a (x) p_{rank + a}, length q n
  double violation = 0.0;     // E^T (Id (x) P) f(X) (Id (x) P) E
  double compressed_g_lambda_min = 0.0;
  double block_error = 0.0;   // max_ij ||P X_i X_j P - M_ij||
};

/// Bordered construction from a separator. Throws VerificationFailed unless
/// the compressed g is PSD, the violation is <= -tol_strict and the blocks
/// of M are reproduced.
Counterexample build_counterexample(const NCQuadPoly& f, const NCQuadPoly& g,
                                    const SymMatrix& m, const SolverOptions& options = {});

struct HereditaryCounterexample {
  SymMatrix M;
  std::size_t rank = 0;
  MatTuple X;                 // general tuple, n = max(rank, q)
  std::vector<double> E;      // sum_a e_a (x) f_a, length q n
  double violation = 0.0;
  double g_lambda_min = 0.0;
};

HereditaryCounterexample build_hereditary_counterexample(const NCQuadPoly& f,
                                                         const NCQuadPoly& g,
                                                         const SymMatrix& m,
                                                         const SolverOptions& options = {});

/// Coefficient sizes made equal: f padded with zeros, g replaced by the
/// k-fold direct sum when f is larger.
struct Reconciled {
  NCQuadPoly f;
  NCQuadPoly g;
  std::size_t k = 1;
};

Reconciled reconcile_dimensions(const NCQuadPoly& f, const NCQuadPoly& g);

enum class Verdict { Certificate, Counterexample, Inconclusive };

struct Decision {
  Verdict verdict = Verdict::Inconclusive;
  Reconciled problem;  // the instance the outputs refer to
  double slater_lambda_min = 0.0;
  std::optional<CpCertificate> certificate;
  std::optional<Counterexample> counterexample;
  std::optional<HereditaryCounterexample> hereditary;
  CertifyResult certify_log;
  SeparatorResult separator_log;
  std::string note;
};

/// Requires lambda_min(g(slater)) > tol_strict (SlaterViolated otherwise).
Decision decide(const NCQuadPoly& f, const NCQuadPoly& g, const MatTuple& slater,
                const SolverOptions& options = {});

/// Hereditary variant: slater may be a general tuple, the counterexample
/// needs no projection.
Decision decide_hereditary(const NCQuadPoly& f, const NCQuadPoly& g, const MatTuple& slater,
                           const SolverOptions& options = {});

/// Independent re-check: J PSD with unit trace, scale > 0, recomputed
/// residual PSD, and f(X) - (phi (x) 1) g(X) >= 0 on seeded random tuples.
/// Reconciles dimensions the same way decide does.
bool verify_certificate(const CpCertificate& cert, const NCQuadPoly& f, const NCQuadPoly& g,
                        const SolverOptions& options = {}, std::string* reason = nullptr);

// ---------------------------------------------------------------------------
// Homogenization of f(x) = sum A_ij x_i x_j + sum A_i x_i + A_0.

struct AffinePoly {
  NCQuadPoly quadratic;
  std::vector<Matrix> linear;  // A_i, symmetric
  Matrix constant;             // A_0, symmetric

  static AffinePoly create(NCQuadPoly quadratic, std::vector<Matrix> linear, Matrix constant);
};

/// sum A_ij (x) X_i X_j + sum A_i (x) X_i + A_0 (x) Id.
SymMatrix evaluate_affine(const AffinePoly& f, const MatTuple& x);

struct HomogenizationResult {
  bool success = false;
  std::vector<Matrix> H;  // H_i0; the x_0 x_i coefficient is H_i0^T
  NCQuadPoly h;           // variables ordered (x_0, x_1, ..., x_m)
  double lambda_min = 0.0;
};

/// Chooses H_i0 = A_i / 2 + K_i with K_i skew to make the coefficient
/// matrix of h PSD. success is false when the best lambda_min found is
/// below -tol (1 + ||H||_F).
HomogenizationResult homogenize(const AffinePoly& f, const SolverOptions& options = {});

}  // namespace ncslemma
