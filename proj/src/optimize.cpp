#include "ncslemma/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ncslemma/error.hpp"

namespace ncslemma {

SpectralEvaluation lambda_min_objective(const SymMatrix& m) {
  const EigDecomp e = sym_eig(m);
  const auto w = e.bottom_vector();
  return {e.min(), SymMatrix::symmetrized(outer(w, w))};
}

SpectralSearchResult maximize_spectral(const SpectralObjective& objective, std::size_t dim,
                                       const SpectralSearchOptions& options) {
  require(dim >= 1, ErrorCode::InvalidInput, "maximize_spectral: dim must be positive");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix start = Matrix::identity(dim) * (1.0 / static_cast<double>(dim));
  const double jitter = 0.1 / static_cast<double>(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const double z = jitter * normal(rng);
      start(i, j) += z;
      if (i != j) start(j, i) += z;
    }

  SymMatrix point = spectraplex_project(SymMatrix::symmetrized(start));
  SpectralEvaluation current = objective(point);
  SpectralSearchResult best{point, current.value, 0, false};

  std::size_t k = 1;
  for (; k <= options.budget; ++k) {
    if (options.stop_at && best.value >= *options.stop_at) break;
    const double gnorm = current.supergradient.frobenius_norm();
    if (!(gnorm > options.tol)) break;
    const double step = options.step / std::sqrt(static_cast<double>(k)) / gnorm;
    point = spectraplex_project(point + step * current.supergradient);
    current = objective(point);
    best.iterations = k;
    if (current.value > best.value) {
      best.point = point;
      best.value = current.value;
    }
  }
  best.budget_exhausted = k > options.budget;
  return best;
}

// ---------------------------------------------------------------------------

std::size_t LmiProblem::barrier_parameter() const {
  std::size_t nu = 0;
  for (const auto& b : blocks) nu += b.constant.dim();
  return nu;
}

std::vector<SymMatrix> LmiProblem::evaluate(std::span<const double> y) const {
  require(y.size() == num_variables(), ErrorCode::ShapeMismatch, "LMI variable count");
  std::vector<SymMatrix> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    Matrix f = b.constant.matrix();
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] != 0.0) f += y[i] * b.coefficients[i].matrix();
    out.push_back(SymMatrix::symmetrized(f));
  }
  return out;
}

namespace {

struct Entry {
  std::size_t r, c;
  double v;
};

// Per-variable coefficient in the representation that is cheaper to
// congruence-transform: triplets when sparse, dense otherwise.
struct Coefficient {
  bool zero = true;
  bool dense = false;
  std::vector<Entry> entries;
  const Matrix* matrix = nullptr;
};

struct PreparedBlock {
  std::size_t dim = 0;
  const Matrix* constant = nullptr;
  std::vector<Coefficient> coefficients;
};

bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
  }
  return true;
}

Matrix lower_inverse(const Matrix& l) {
  const std::size_t n = l.rows();
  Matrix w(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    w(col, col) = 1.0 / l(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = col; k < i; ++k) s -= l(i, k) * w(k, col);
      w(i, col) = s / l(i, i);
    }
  }
  return w;
}

std::vector<double> solve_spd(Matrix h, std::vector<double> rhs) {
  const std::size_t n = h.rows();
  double ridge = 0.0;
  const double scale = std::max(h.trace() / static_cast<double>(std::max<std::size_t>(n, 1)), 1e-300);
  Matrix l;
  for (int attempt = 0; attempt < 12; ++attempt) {
    l = h;
    for (std::size_t i = 0; i < n; ++i) l(i, i) += ridge;
    if (cholesky(l)) break;
    ridge = ridge == 0.0 ? 1e-14 * scale : ridge * 100.0;
    if (attempt == 11) return {};
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * rhs[k];
    rhs[i] = s / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * rhs[k];
    rhs[i] = s / l(i, i);
  }
  return rhs;
}

class BarrierSolver {
 public:
  explicit BarrierSolver(const LmiProblem& p) : problem_(p) {
    for (const auto& b : p.blocks) {
      require(b.coefficients.size() == p.num_variables(), ErrorCode::ShapeMismatch,
              "LMI block coefficient count");
      PreparedBlock pb;
      pb.dim = b.constant.dim();
      pb.constant = &b.constant.matrix();
      for (const auto& c : b.coefficients) {
        require(c.dim() == pb.dim, ErrorCode::ShapeMismatch, "LMI coefficient dimension");
        Coefficient coef;
        const Matrix& m = c.matrix();
        for (std::size_t r = 0; r < pb.dim; ++r)
          for (std::size_t col = 0; col < pb.dim; ++col)
            if (m(r, col) != 0.0) coef.entries.push_back({r, col, m(r, col)});
        coef.zero = coef.entries.empty();
        coef.dense = coef.entries.size() > 2 * pb.dim;
        if (coef.dense) {
          coef.entries.clear();
          coef.matrix = &m;
        }
        pb.coefficients.push_back(std::move(coef));
      }
      blocks_.push_back(std::move(pb));
    }
  }

  // Cholesky factors of every block at y, or nullopt if y is infeasible.
  std::optional<std::vector<Matrix>> factor(std::span<const double> y) const {
    std::vector<Matrix> out;
    out.reserve(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Matrix f = *blocks_[b].constant;
      const auto& coefs = blocks_[b].coefficients;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i];
        if (yi == 0.0 || coefs[i].zero) continue;
        if (coefs[i].dense) {
          f += yi * *coefs[i].matrix;
        } else {
          for (const auto& e : coefs[i].entries) f(e.r, e.c) += yi * e.v;
        }
      }
      if (!cholesky(f)) return std::nullopt;
      out.push_back(std::move(f));
    }
    return out;
  }

  static double log_det(const std::vector<Matrix>& factors) {
    double s = 0.0;
    for (const auto& l : factors)
      for (std::size_t i = 0; i < l.rows(); ++i) s += 2.0 * std::log(l(i, i));
    return s;
  }

  double value(std::span<const double> y) const { return dot(problem_.objective, y); }

  // Centering objective tau * (-c^T y) - log det F(y); infinity outside.
  double merit(std::span<const double> y, double tau) const {
    const auto f = factor(y);
    if (!f) return std::numeric_limits<double>::infinity();
    return -tau * value(y) - log_det(*f);
  }

  // Gradient and Hessian of the centering objective.
  void derivatives(const std::vector<Matrix>& factors, double tau, std::vector<double>& grad,
                   Matrix& hess) const {
    const std::size_t d = problem_.num_variables();
    grad.assign(d, 0.0);
    hess = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) grad[i] = -tau * problem_.objective[i];

    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& pb = blocks_[b];
      const std::size_t k = pb.dim;
      const Matrix w = lower_inverse(factors[b]);
      const Matrix wt = w.transpose();
      std::vector<Matrix> g(d);
      std::vector<std::size_t> active;
      for (std::size_t i = 0; i < d; ++i) {
        const auto& coef = pb.coefficients[i];
        if (coef.zero) continue;
        active.push_back(i);
        if (coef.dense) {
          g[i] = (w * *coef.matrix) * wt;
        } else {
          Matrix gi(k, k);
          for (const auto& e : coef.entries)
            for (std::size_t a = 0; a < k; ++a) {
              const double war = e.v * w(a, e.r);
              if (war == 0.0) continue;
              for (std::size_t c = 0; c < k; ++c) gi(a, c) += war * w(c, e.c);
            }
          g[i] = std::move(gi);
        }
        grad[i] -= g[i].trace();
      }
      for (std::size_t ii = 0; ii < active.size(); ++ii) {
        const std::size_t i = active[ii];
        for (std::size_t jj = ii; jj < active.size(); ++jj) {
          const std::size_t j = active[jj];
          const double h = dot(g[i].data(), g[j].data());
          hess(i, j) += h;
          if (i != j) hess(j, i) += h;
        }
      }
    }
  }

 private:
  const LmiProblem& problem_;
  std::vector<PreparedBlock> blocks_;
};

}  // namespace

LmiSolution maximize_lmi(const LmiProblem& problem, std::span<const double> start,
                         const LmiOptions& options) {
  const std::size_t d = problem.num_variables();
  require(start.size() == d, ErrorCode::ShapeMismatch, "maximize_lmi: start has wrong length");
  require(!problem.blocks.empty(), ErrorCode::InvalidInput, "maximize_lmi: no constraints");
  BarrierSolver solver(problem);
  require(solver.factor(start).has_value(), ErrorCode::InvalidInput,
          "maximize_lmi: start point is not strictly feasible");

  const double nu = static_cast<double>(problem.barrier_parameter());
  double tau = nu / std::max(options.initial_gap, 1e-300);
  LmiSolution sol;
  sol.y.assign(start.begin(), start.end());
  sol.value = solver.value(sol.y);
  sol.upper_bound = std::numeric_limits<double>::infinity();

  std::vector<double> grad;
  Matrix hess;
  while (true) {
    // Newton centering at the current tau.
    for (int inner = 0; inner < 200 && sol.newton_steps < options.max_newton; ++inner) {
      const auto factors = solver.factor(sol.y);
      if (!factors) break;
      solver.derivatives(*factors, tau, grad, hess);
      std::vector<double> neg(grad);
      for (double& v : neg) v = -v;
      const auto step = solve_spd(hess, neg);
      if (step.empty()) break;
      const double decrement = -dot(grad, step);
      ++sol.newton_steps;
      if (!(decrement > 1e-12)) break;

      const double base = solver.merit(sol.y, tau);
      double s = 1.0;
      std::vector<double> trial(d);
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
        for (std::size_t i = 0; i < d; ++i) trial[i] = sol.y[i] + s * step[i];
        const double m = solver.merit(trial, tau);
        if (m <= base - 0.25 * s * decrement) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      sol.y = trial;
      sol.value = solver.value(sol.y);
      if (options.stop_above && sol.value >= *options.stop_above) return sol;
      if (decrement < 1e-9) break;
    }

    sol.upper_bound = sol.value + nu / tau;
    if (options.stop_above && sol.value >= *options.stop_above) return sol;
    if (options.stop_below && sol.upper_bound < *options.stop_below) return sol;
    if (nu / tau <= options.gap_tol) {
      sol.converged = true;
      return sol;
    }
    if (sol.newton_steps >= options.max_newton) return sol;
    tau *= options.growth;
  }
}

}  // namespace ncslemma
