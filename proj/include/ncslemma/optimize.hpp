#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ncslemma/linalg.hpp"

namespace ncslemma {

// ---------------------------------------------------------------------------
// First-order search over the spectraplex {M >= 0, tr M = 1}.

struct SpectralEvaluation {
  double value = 0.0;
  SymMatrix supergradient;
};

/// Concave objective on the spectraplex: value plus one supergradient.
using SpectralObjective = std::function<SpectralEvaluation(const SymMatrix&)>;

struct SpectralSearchOptions {
  std::size_t budget = 5000;
  double step = 1.0;        // step length at iteration k is step / sqrt(k)
  double tol = 1e-12;       // supergradients below this norm count as zero
  std::uint64_t seed = 42;  // perturbation of the maximally mixed start
  std::optional<double> stop_at;
};

struct SpectralSearchResult {
  SymMatrix point;  // best iterate
  double value = 0.0;
  std::size_t iterations = 0;
  bool budget_exhausted = false;
};

/// Projected supergradient ascent with diminishing normalized steps and
/// best-iterate tracking. Deterministic for a fixed seed.
SpectralSearchResult maximize_spectral(const SpectralObjective& objective, std::size_t dim,
                                       const SpectralSearchOptions& options = {});

/// Supergradient of M -> lambda_min(M): w w^T for the bottom eigenvector w.
SpectralEvaluation lambda_min_objective(const SymMatrix& m);

// ---------------------------------------------------------------------------
// Log-barrier interior-point method for small dense linear matrix
// inequality programs:
//
//   maximize  c^T y   subject to  F_b(y) = F_b0 + sum_i y_i F_bi  > 0  (all b)

struct LmiBlock {
  SymMatrix constant;
  std::vector<SymMatrix> coefficients;  // one per variable
};

struct LmiProblem {
  std::vector<double> objective;
  std::vector<LmiBlock> blocks;

  std::size_t num_variables() const { return objective.size(); }
  /// Sum of block sizes; the barrier's self-concordance parameter.
  std::size_t barrier_parameter() const;
  std::vector<SymMatrix> evaluate(std::span<const double> y) const;
};

struct LmiOptions {
  double gap_tol = 1e-10;      // absolute duality-gap target
  double initial_gap = 1.0;    // guess of the initial suboptimality, sets tau_0
  double growth = 8.0;         // tau multiplier between centerings
  std::size_t max_newton = 600;
  std::optional<double> stop_above;  // return as soon as c^T y reaches this
  std::optional<double> stop_below;  // return once the gap bound proves c^T y < this
};

struct LmiSolution {
  std::vector<double> y;
  double value = 0.0;
  double upper_bound = 0.0;  // value + nu / tau at the last centered point
  std::size_t newton_steps = 0;
  bool converged = false;    // gap_tol reached
};

/// Requires a strictly feasible start (every block positive definite).
LmiSolution maximize_lmi(const LmiProblem& problem, std::span<const double> start,
                         const LmiOptions& options = {});

}  // namespace ncslemma
