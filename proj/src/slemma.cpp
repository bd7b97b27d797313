#include "ncslemma/slemma.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "ncslemma/error.hpp"
#include "ncslemma/optimize.hpp"

namespace ncslemma {

namespace {

// Basis of the symmetric n x n matrices: E_aa, and E_ab + E_ba for a < b.
class SymBasis {
 public:
  explicit SymBasis(std::size_t n) : n_(n) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) pairs_.emplace_back(a, b);
  }

  std::size_t size() const { return pairs_.size(); }

  SymMatrix element(std::size_t k) const {
    const auto [a, b] = pairs_[k];
    Matrix m(n_, n_);
    m(a, b) = 1.0;
    m(b, a) = 1.0;
    return SymMatrix::symmetrized(m);
  }

  SymMatrix assemble(std::span<const double> y) const {
    Matrix m(n_, n_);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto [a, b] = pairs_[k];
      m(a, b) = y[k];
      m(b, a) = y[k];
    }
    return SymMatrix::symmetrized(m);
  }

  std::vector<double> coordinates(const SymMatrix& s) const {
    std::vector<double> y(pairs_.size());
    for (std::size_t k = 0; k < pairs_.size(); ++k) y[k] = s(pairs_[k].first, pairs_[k].second);
    return y;
  }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

// Trace-zero symmetric basis: E_ab + E_ba (a < b), E_kk - E_{n-1,n-1}.
class TraceFreeBasis {
 public:
  explicit TraceFreeBasis(std::size_t n) : n_(n) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) pairs_.emplace_back(a, b);
  }

  std::size_t size() const { return pairs_.size() + n_ - 1; }

  SymMatrix element(std::size_t k) const {
    Matrix m(n_, n_);
    if (k < pairs_.size()) {
      m(pairs_[k].first, pairs_[k].second) = 1.0;
      m(pairs_[k].second, pairs_[k].first) = 1.0;
    } else {
      const std::size_t d = k - pairs_.size();
      m(d, d) = 1.0;
      m(n_ - 1, n_ - 1) = -1.0;
    }
    return SymMatrix::symmetrized(m);
  }

  SymMatrix center() const { return (1.0 / static_cast<double>(n_)) * SymMatrix::identity(n_); }

  // Point with trace one.
  SymMatrix assemble(std::span<const double> y) const {
    Matrix m = center().matrix();
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      m(pairs_[k].first, pairs_[k].second) += y[k];
      m(pairs_[k].second, pairs_[k].first) += y[k];
    }
    for (std::size_t d = 0; d + 1 < n_; ++d) {
      const double v = y[pairs_.size() + d];
      m(d, d) += v;
      m(n_ - 1, n_ - 1) -= v;
    }
    return SymMatrix::symmetrized(m);
  }

  std::vector<double> coordinates(const SymMatrix& s) const {
    std::vector<double> y(size());
    for (std::size_t k = 0; k < pairs_.size(); ++k) y[k] = s(pairs_[k].first, pairs_[k].second);
    for (std::size_t d = 0; d + 1 < n_; ++d)
      y[pairs_.size() + d] = s(d, d) - 1.0 / static_cast<double>(n_);
    return y;
  }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

SymMatrix scalar_block(double v) { return SymMatrix::diagonal(std::vector<double>{v}); }

SymMatrix top_left(const SymMatrix& z, std::size_t k) {
  return SymMatrix::symmetrized(z.matrix().block(0, 0, k, k));
}

SymMatrix embed(const SymMatrix& s, std::size_t dim) {
  Matrix m(dim, dim);
  m.set_block(0, 0, s);
  return SymMatrix::symmetrized(m);
}

void require_same_shape(const NCQuadPoly& f, const NCQuadPoly& g) {
  require(f.m() == g.m(), ErrorCode::ShapeMismatch, "f and g have different variable counts");
  require(f.q() == g.q(), ErrorCode::ShapeMismatch,
          "f and g have different coefficient sizes; reconcile them first");
}

double heuristic_trace_cap(const SymMatrix& a, const NCQuadPoly& g) {
  const double nb = g.coefficient_matrix().frobenius_norm();
  if (!(nb > 0.0)) return 1.0;
  return std::max(1.0, static_cast<double>(g.q()) * (1.0 + a.frobenius_norm()) / nb);
}

std::optional<CpCertificate> accept_choi(const SymMatrix& k, const SymMatrix& a,
                                         const NCQuadPoly& g, double tol) {
  const double tr = k.trace();
  if (!(tr > 0.0) || !is_psd(k, tol)) return std::nullopt;
  const SymMatrix clipped = psd_project(k);
  const double scale = clipped.trace();
  if (!(scale > 0.0)) return std::nullopt;
  SymMatrix residual = a - map_coefficients(clipped, g);
  const double lmin = lambda_min(residual);
  if (lmin < -tol * (1.0 + residual.frobenius_norm())) return std::nullopt;
  const std::size_t q = g.q();
  return CpCertificate{ChoiMatrix::create(q, q, (1.0 / scale) * clipped), scale,
                       std::move(residual), lmin};
}

}  // namespace

// ---------------------------------------------------------------------------

CertifyResult certify(const NCQuadPoly& f, const NCQuadPoly& g, const SolverOptions& options) {
  require_same_shape(f, g);
  const std::size_t q = g.q(), qq = q * q, mq = g.m() * q;
  const SymMatrix a = f.coefficient_matrix();
  const double scale_a = 1.0 + a.frobenius_norm();

  CertifyResult out;
  out.trace_cap = options.trace_cap.value_or(heuristic_trace_cap(a, g));
  const double cap = out.trace_cap;
  require(cap > 0.0 && std::isfinite(cap), ErrorCode::InvalidInput, "trace cap must be positive");

  // Phase 1: supergradient ascent over the lifted spectraplex diag(K/cap, slack).
  auto objective = [&](const SymMatrix& z) {
    const SymMatrix k = cap * top_left(z, qq);
    const SymMatrix r = a - map_coefficients(k, g);
    const EigDecomp e = sym_eig(r);
    const auto w = e.bottom_vector();
    const SymMatrix grad = (-cap) * map_coefficients_adjoint(SymMatrix::symmetrized(outer(w, w)), g);
    return SpectralEvaluation{e.min(), embed(grad, qq + 1)};
  };
  SpectralSearchOptions search;
  search.budget = options.budget;
  search.seed = options.seed;
  search.stop_at = 0.0;
  const auto phase1 = maximize_spectral(objective, qq + 1, search);
  out.iterations = phase1.iterations;
  out.best_value = phase1.value;
  out.upper_bound = std::numeric_limits<double>::infinity();
  const SymMatrix k1 = cap * top_left(phase1.point, qq);
  if (phase1.value >= 0.0) {
    out.certificate = accept_choi(k1, a, g, options.tol);
    if (out.certificate) return out;
  }

  // Phase 2: barrier method on  max t  s.t.  A - L(K) - t I > 0, K > 0, tr K < cap.
  const SymBasis basis(qq);
  const std::size_t nk = basis.size();
  LmiProblem lmi;
  lmi.objective.assign(nk + 1, 0.0);
  lmi.objective[nk] = 1.0;
  LmiBlock residual{a, {}}, cone{SymMatrix(qq), {}}, trace{scalar_block(cap), {}};
  for (std::size_t k = 0; k < nk; ++k) {
    const SymMatrix e = basis.element(k);
    residual.coefficients.push_back(-1.0 * map_coefficients(e, g));
    cone.coefficients.push_back(e);
    trace.coefficients.push_back(scalar_block(-e.trace()));
  }
  residual.coefficients.push_back(-1.0 * SymMatrix::identity(mq));
  cone.coefficients.push_back(SymMatrix(qq));
  trace.coefficients.push_back(scalar_block(0.0));
  lmi.blocks = {std::move(residual), std::move(cone), std::move(trace)};

  const SymMatrix k0 = 0.9 * psd_project(k1) +
                       (0.05 * cap / static_cast<double>(qq)) * SymMatrix::identity(qq);
  const double t0 = lambda_min(a - map_coefficients(k0, g));
  std::vector<double> start = basis.coordinates(k0);
  start.push_back(t0 - 0.5 * (1.0 + std::abs(t0)));

  LmiOptions lo;
  lo.initial_gap = scale_a;
  lo.gap_tol = 0.01 * options.tol;
  lo.stop_above = 0.0;
  lo.stop_below = -options.tol_strict * scale_a;
  const LmiSolution sol = maximize_lmi(lmi, start, lo);
  out.iterations += sol.newton_steps;
  out.best_value = std::max(out.best_value, sol.value);
  out.upper_bound = sol.upper_bound;
  const SymMatrix kstar = basis.assemble(std::span<const double>(sol.y).first(nk));
  out.certificate = accept_choi(kstar, a, g, options.tol);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct SeparatorCheck {
  double coupling = 0.0;
  double adjoint_min = 0.0;
};

SeparatorCheck check_separator(const SymMatrix& m, const SymMatrix& a, const NCQuadPoly& g) {
  return {inner(a, m), lambda_min(map_coefficients_adjoint(m, g))};
}

// max t  s.t.  L*(M) - (w t - s) I > 0,  -<A,M>/c - t > 0,  M > 0,  tr M = 1.
LmiSolution separator_barrier(const SymMatrix& a, const NCQuadPoly& g, double c, double weight,
                              double shift, const SymMatrix& warm, double target) {
  const std::size_t n = a.dim(), qq = g.q() * g.q();
  const TraceFreeBasis basis(n);
  const std::size_t nm = basis.size();
  LmiProblem lmi;
  lmi.objective.assign(nm + 1, 0.0);
  lmi.objective[nm] = 1.0;
  const SymMatrix center = basis.center();
  LmiBlock adj{map_coefficients_adjoint(center, g) + shift * SymMatrix::identity(qq), {}};
  LmiBlock coupling{scalar_block(-inner(a, center) / c), {}};
  LmiBlock cone{center, {}};
  for (std::size_t k = 0; k < nm; ++k) {
    const SymMatrix e = basis.element(k);
    adj.coefficients.push_back(map_coefficients_adjoint(e, g));
    coupling.coefficients.push_back(scalar_block(-inner(a, e) / c));
    cone.coefficients.push_back(e);
  }
  adj.coefficients.push_back((-weight) * SymMatrix::identity(qq));
  coupling.coefficients.push_back(scalar_block(-1.0));
  cone.coefficients.push_back(SymMatrix(n));
  lmi.blocks = {std::move(adj), std::move(coupling), std::move(cone)};

  const SymMatrix m0 = 0.9 * spectraplex_project(warm) + 0.1 * center;
  const auto chk = check_separator(m0, a, g);
  const double t0 = std::min((chk.adjoint_min + shift) / weight, -chk.coupling / c);
  std::vector<double> start = basis.coordinates(m0);
  start.push_back(t0 - 0.5 * (1.0 + std::abs(t0)));

  LmiOptions lo;
  lo.initial_gap = 1.0;
  lo.gap_tol = 1e-3 * target;
  lo.stop_above = 1.1 * target;
  lo.stop_below = target;
  return maximize_lmi(lmi, start, lo);
}

SymMatrix separator_point(const LmiSolution& sol, std::size_t n) {
  const TraceFreeBasis basis(n);
  return basis.assemble(std::span<const double>(sol.y).first(basis.size()));
}

}  // namespace

SeparatorResult find_separator(const NCQuadPoly& f, const NCQuadPoly& g,
                               const SolverOptions& options) {
  require_same_shape(f, g);
  const SymMatrix a = f.coefficient_matrix();
  const std::size_t n = a.dim();
  const double c = 1.0 + a.frobenius_norm();
  const double target = options.tol_strict / c;

  SeparatorResult out;
  auto record = [&](const SymMatrix& m) {
    const auto chk = check_separator(m, a, g);
    out.M = m;
    out.coupling = chk.coupling;
    out.adjoint_lambda_min = chk.adjoint_min;
  };

  auto objective = [&](const SymMatrix& m) {
    const SymMatrix adj = map_coefficients_adjoint(m, g);
    const EigDecomp e = sym_eig(adj);
    const double va = -inner(a, m) / c;
    if (e.min() <= va) {
      const auto w = e.bottom_vector();
      return SpectralEvaluation{e.min(), map_coefficients(SymMatrix::symmetrized(outer(w, w)), g)};
    }
    return SpectralEvaluation{va, (-1.0 / c) * a};
  };
  SpectralSearchOptions search;
  search.budget = options.budget;
  search.seed = options.seed ^ 0x5eedULL;
  search.stop_at = 1.1 * target;
  const auto phase1 = maximize_spectral(objective, n, search);
  out.iterations = phase1.iterations;
  out.best_value = phase1.value;
  out.upper_bound = std::numeric_limits<double>::infinity();
  if (phase1.value >= target) {
    record(phase1.point);
    return out;
  }

  const LmiSolution strict = separator_barrier(a, g, c, 1.0, 0.0, phase1.point, target);
  out.iterations += strict.newton_steps;
  out.best_value = std::max(out.best_value, strict.value);
  out.upper_bound = strict.upper_bound;
  {
    const SymMatrix m = separator_point(strict, n);
    const auto chk = check_separator(m, a, g);
    if (lambda_min(m) >= 0.0 && chk.adjoint_min >= target && -chk.coupling >= options.tol_strict) {
      record(m);
      return out;
    }
  }

  // Relaxed margin on the adjoint side, L*(M) >= -eps I, for instances where
  // every L*(M) is singular.
  const double eps = 0.5 * options.tol;
  const LmiSolution relaxed =
      separator_barrier(a, g, c, eps / target, 2.0 * eps, separator_point(strict, n), target);
  out.iterations += relaxed.newton_steps;
  const SymMatrix m = separator_point(relaxed, n);
  const auto chk = check_separator(m, a, g);
  if (lambda_min(m) >= 0.0 && chk.adjoint_min >= -eps && -chk.coupling >= options.tol_strict)
    record(m);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Columns sqrt(lambda_k) v_k for eigenvalues above the cutoff, rescaled so
// that V V^T has trace one.
Matrix separator_factor(const SymMatrix& m, double cutoff) {
  const EigDecomp e = sym_eig(m);
  std::vector<std::size_t> keep;
  double total = 0.0;
  for (std::size_t k = 0; k < e.values.size(); ++k)
    if (e.values[k] > cutoff) {
      keep.push_back(k);
      total += e.values[k];
    }
  require(!keep.empty(), ErrorCode::VerificationFailed, "separator has no eigenvalue above cutoff");
  Matrix v(m.dim(), keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double s = std::sqrt(e.values[keep[c]] / total);
    for (std::size_t r = 0; r < m.dim(); ++r) v(r, c) = s * e.vectors(r, keep[c]);
  }
  return v;
}

double block_error(const MatTuple& x, const SymMatrix& m, std::size_t q, std::size_t offset,
                   bool hereditary, const Matrix* p) {
  double err = 0.0;
  for (std::size_t i = 0; i < x.m(); ++i)
    for (std::size_t j = 0; j < x.m(); ++j) {
      Matrix prod = x[i] * (hereditary ? x[j].transpose() : x[j]);
      if (p) prod = *p * prod * *p;
      Matrix expected(prod.rows(), prod.cols());
      expected.set_block(offset, offset, m.matrix().block(i * q, j * q, q, q));
      err = std::max(err, (prod - expected).max_abs());
    }
  return err;
}

template <typename Build>
auto with_cutoff_retry(const SymMatrix& m, Build build) {
  const double cutoff = 1e-8 * (1.0 + m.frobenius_norm());
  try {
    return build(separator_factor(m, cutoff));
  } catch (const Error& first) {
    if (first.code() != ErrorCode::VerificationFailed) throw;
    return build(separator_factor(m, 0.1 * cutoff));
  }
}

}  // namespace

Counterexample build_counterexample(const NCQuadPoly& f, const NCQuadPoly& g,
                                    const SymMatrix& m, const SolverOptions& options) {
  require_same_shape(f, g);
  const std::size_t q = g.q(), mm = g.m();
  require(m.dim() == mm * q, ErrorCode::ShapeMismatch, "separator must be mq x mq");

  return with_cutoff_retry(m, [&](const Matrix& v) {
    const std::size_t r = v.cols(), n = r + q;
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < mm; ++i) {
      Matrix x(n, n);
      for (std::size_t a = 0; a < q; ++a)
        for (std::size_t k = 0; k < r; ++k) {
          x(r + a, k) = v(i * q + a, k);
          x(k, r + a) = v(i * q + a, k);
        }
      mats.push_back(std::move(x));
    }
    Counterexample ce;
    ce.M = SymMatrix::symmetrized(v * v.transpose());
    ce.rank = r;
    ce.X = MatTuple::create(n, TupleKind::Symmetric, std::move(mats));
    ce.P = Matrix(n, n);
    for (std::size_t a = 0; a < q; ++a) ce.P(r + a, r + a) = 1.0;
    ce.E.assign(q * n, 0.0);
    for (std::size_t a = 0; a < q; ++a) ce.E[a * n + r + a] = 1.0;

    const SymMatrix fc = evaluate_compressed(f, ce.X, ce.P);
    const SymMatrix gc = evaluate_compressed(g, ce.X, ce.P);
    ce.violation = quad_form(fc, ce.E);
    ce.compressed_g_lambda_min = lambda_min(gc);
    ce.block_error = block_error(ce.X, ce.M, q, r, false, &ce.P);

    const bool g_ok = ce.compressed_g_lambda_min >= -options.tol * (1.0 + gc.frobenius_norm());
    const bool f_ok = ce.violation <= -options.tol_strict;
    if (!g_ok || !f_ok || ce.block_error > 1e-8) {
      std::ostringstream msg;
      msg << "counterexample checks failed: lambda_min(compressed g) = "
          << ce.compressed_g_lambda_min << ", violation = " << ce.violation
          << ", lambda_min(compressed f) = " << lambda_min(fc)
          << ", block error = " << ce.block_error;
      fail(ErrorCode::VerificationFailed, msg.str());
    }
    return ce;
  });
}

HereditaryCounterexample build_hereditary_counterexample(const NCQuadPoly& f,
                                                         const NCQuadPoly& g,
                                                         const SymMatrix& m,
                                                         const SolverOptions& options) {
  require_same_shape(f, g);
  const std::size_t q = g.q(), mm = g.m();
  require(m.dim() == mm * q, ErrorCode::ShapeMismatch, "separator must be mq x mq");

  return with_cutoff_retry(m, [&](const Matrix& v) {
    const std::size_t r = v.cols(), n = std::max(r, q);
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < mm; ++i) {
      Matrix x(n, n);
      for (std::size_t a = 0; a < q; ++a)
        for (std::size_t k = 0; k < r; ++k) x(a, k) = v(i * q + a, k);
      mats.push_back(std::move(x));
    }
    HereditaryCounterexample ce;
    ce.M = SymMatrix::symmetrized(v * v.transpose());
    ce.rank = r;
    ce.X = MatTuple::create(n, TupleKind::General, std::move(mats));
    ce.E.assign(q * n, 0.0);
    for (std::size_t a = 0; a < q; ++a) ce.E[a * n + a] = 1.0;

    const SymMatrix fx = evaluate_hereditary(f, ce.X);
    const SymMatrix gx = evaluate_hereditary(g, ce.X);
    ce.violation = quad_form(fx, ce.E);
    ce.g_lambda_min = lambda_min(gx);
    const double err = block_error(ce.X, ce.M, q, 0, true, nullptr);

    const bool g_ok = ce.g_lambda_min >= -options.tol * (1.0 + gx.frobenius_norm());
    const bool f_ok = ce.violation <= -options.tol_strict;
    if (!g_ok || !f_ok || err > 1e-8) {
      std::ostringstream msg;
      msg << "hereditary counterexample checks failed: lambda_min(g(X)) = " << ce.g_lambda_min
          << ", violation = " << ce.violation << ", lambda_min(f(X)) = " << lambda_min(fx)
          << ", block error = " << err;
      fail(ErrorCode::VerificationFailed, msg.str());
    }
    return ce;
  });
}

// ---------------------------------------------------------------------------

Reconciled reconcile_dimensions(const NCQuadPoly& f, const NCQuadPoly& g) {
  require(f.m() == g.m(), ErrorCode::ShapeMismatch, "f and g have different variable counts");
  if (f.q() == g.q()) return {f, g, 1};
  if (f.q() < g.q()) return {pad_coefficients(f, g.q()), g, 1};
  const std::size_t k = (f.q() + g.q() - 1) / g.q();
  return {pad_coefficients(f, k * g.q()), direct_sum_repeat(g, k), k};
}

namespace {

Decision decide_impl(const NCQuadPoly& f, const NCQuadPoly& g, const MatTuple& slater,
                     const SolverOptions& options, bool hereditary) {
  require(f.m() == g.m(), ErrorCode::ShapeMismatch, "f and g have different variable counts");
  require(slater.m() == g.m(), ErrorCode::ShapeMismatch,
          "Slater point has " + std::to_string(slater.m()) + " matrices, expected " +
              std::to_string(g.m()));
  auto eval = [&](const NCQuadPoly& p) {
    return hereditary ? evaluate_hereditary(p, slater) : evaluate(p, slater);
  };

  Decision d;
  d.slater_lambda_min = lambda_min(eval(g));
  if (!(d.slater_lambda_min > options.tol_strict))
    fail(ErrorCode::SlaterViolated,
         "lambda_min(g(slater)) = " + std::to_string(d.slater_lambda_min));
  d.problem = reconcile_dimensions(f, g);
  const NCQuadPoly& ff = d.problem.f;
  const NCQuadPoly& gg = d.problem.g;

  // tr f(X) >= tr (phi (x) 1) g(X) >= sigma n tr K at the Slater point.
  const double cap =
      eval(ff).trace() / (d.slater_lambda_min * static_cast<double>(slater.n()));
  SolverOptions opts = options;
  const bool can_certify = cap > 0.0;
  if (can_certify) opts.trace_cap = cap * (1.0 + 1e-9);

  auto run_certify = [&] {
    if (!can_certify) {
      CertifyResult none;
      none.trace_cap = std::max(cap, 0.0);
      none.best_value = -std::numeric_limits<double>::infinity();
      none.upper_bound = none.best_value;
      return none;
    }
    return certify(ff, gg, opts);
  };
  auto run_separator = [&] { return find_separator(ff, gg, opts); };

  if (options.threads >= 2) {
    auto cert = std::async(std::launch::async, run_certify);
    auto sep = std::async(std::launch::async, run_separator);
    d.certify_log = cert.get();
    d.separator_log = sep.get();
  } else {
    d.certify_log = run_certify();
    if (!d.certify_log.certificate) d.separator_log = run_separator();
  }
  if (!can_certify) d.note = "tr f(slater) <= 0 rules out every nonzero CP multiplier";

  if (d.certify_log.certificate) {
    d.verdict = Verdict::Certificate;
    d.certificate = d.certify_log.certificate;
    return d;
  }
  if (d.separator_log.M) {
    try {
      if (hereditary)
        d.hereditary = build_hereditary_counterexample(ff, gg, *d.separator_log.M, opts);
      else
        d.counterexample = build_counterexample(ff, gg, *d.separator_log.M, opts);
      d.verdict = Verdict::Counterexample;
      return d;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::VerificationFailed) throw;
      d.note = e.what();
    }
  }
  return d;
}

}  // namespace

Decision decide(const NCQuadPoly& f, const NCQuadPoly& g, const MatTuple& slater,
                const SolverOptions& options) {
  require(slater.kind() == TupleKind::Symmetric, ErrorCode::InvalidInput,
          "decide needs a symmetric Slater tuple");
  return decide_impl(f, g, slater, options, false);
}

Decision decide_hereditary(const NCQuadPoly& f, const NCQuadPoly& g, const MatTuple& slater,
                           const SolverOptions& options) {
  return decide_impl(f, g, slater, options, true);
}

bool verify_certificate(const CpCertificate& cert, const NCQuadPoly& f, const NCQuadPoly& g,
                        const SolverOptions& options, std::string* reason) {
  auto reject = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (f.m() != g.m()) return reject("f and g have different variable counts");
  const Reconciled rec = reconcile_dimensions(f, g);
  const std::size_t q = rec.g.q();
  const ChoiMatrix& j = cert.J;
  if (j.s() != q || j.t() != q)
    return reject("Choi matrix dimensions do not match the coefficient size " + std::to_string(q));
  if (!(cert.scale > 0.0) || !std::isfinite(cert.scale)) return reject("scale must be positive");
  if (!j.J().matrix().all_finite()) return reject("Choi matrix has non-finite entries");
  if (std::abs(j.J().trace() - 1.0) > 1e-9) return reject("Choi matrix trace is not one");
  if (!is_completely_positive(j, options.tol)) return reject("Choi matrix is not PSD");

  const SymMatrix k = cert.scale * j.J();
  const SymMatrix residual = rec.f.coefficient_matrix() - map_coefficients(k, rec.g);
  const double lmin = lambda_min(residual);
  if (lmin < -options.tol * (1.0 + residual.frobenius_norm()))
    return reject("residual coefficient matrix has lambda_min " + std::to_string(lmin));

  const ChoiMatrix phi = ChoiMatrix::create(q, q, k);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < f.m(); ++i) {
      Matrix x(n, n);
      for (auto& v : x.data()) v = gauss(rng) / std::sqrt(static_cast<double>(n));
      mats.push_back(SymMatrix::symmetrized(x).matrix());
    }
    const MatTuple xs = MatTuple::create(n, TupleKind::Symmetric, std::move(mats));
    // also under a random rectangular compression Q (n x k)
    const std::size_t k = 1 + static_cast<std::size_t>(trial % static_cast<int>(n));
    Matrix cq(n, k);
    for (auto& v : cq.data()) v = gauss(rng);
    for (const Matrix& comp : {Matrix::identity(n), cq}) {
      const Matrix mapped =
          apply_map_blockwise(phi, evaluate_compressed(rec.g, xs, comp), BlockLayout::Outer);
      const SymMatrix diff =
          SymMatrix::symmetrized(evaluate_compressed(rec.f, xs, comp).matrix() - mapped);
      const double dmin = lambda_min(diff);
      if (dmin < -options.tol * (1.0 + diff.frobenius_norm()))
        return reject("f(X) - (phi (x) 1) g(X) has lambda_min " + std::to_string(dmin) +
                      " at a sampled tuple");
    }
  }
  if (reason) reason->clear();
  return true;
}

// ---------------------------------------------------------------------------

AffinePoly AffinePoly::create(NCQuadPoly quadratic, std::vector<Matrix> linear, Matrix constant) {
  const std::size_t m = quadratic.m(), q = quadratic.q();
  require(linear.size() == m, ErrorCode::ShapeMismatch,
          "expected " + std::to_string(m) + " linear coefficients");
  for (auto& a : linear) {
    require(a.rows() == q && a.cols() == q, ErrorCode::ShapeMismatch,
            "linear coefficient is not q x q");
    a = SymMatrix::checked(std::move(a)).matrix();
  }
  require(constant.rows() == q && constant.cols() == q, ErrorCode::ShapeMismatch,
          "constant coefficient is not q x q");
  constant = SymMatrix::checked(std::move(constant)).matrix();
  return AffinePoly{std::move(quadratic), std::move(linear), std::move(constant)};
}

SymMatrix evaluate_affine(const AffinePoly& f, const MatTuple& x) {
  Matrix out = evaluate(f.quadratic, x).matrix();
  for (std::size_t i = 0; i < f.linear.size(); ++i) out += kron(f.linear[i], x[i]);
  out += kron(f.constant, Matrix::identity(x.n()));
  return SymMatrix::symmetrized(out);
}

namespace {

NCQuadPoly homogenized(const AffinePoly& f, const std::vector<Matrix>& h) {
  const std::size_t m = f.quadratic.m(), q = f.quadratic.q();
  std::vector<Matrix> blocks;
  blocks.reserve((m + 1) * (m + 1));
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) blocks.push_back(f.constant);
      else if (j == 0) blocks.push_back(h[i - 1]);
      else if (i == 0) blocks.push_back(h[j - 1].transpose());
      else blocks.push_back(f.quadratic.block(i - 1, j - 1));
    }
  return NCQuadPoly::create(m + 1, q, std::move(blocks));
}

}  // namespace

HomogenizationResult homogenize(const AffinePoly& f, const SolverOptions& options) {
  const std::size_t m = f.quadratic.m(), q = f.quadratic.q();
  std::vector<Matrix> h;
  for (const auto& a : f.linear) h.push_back(0.5 * a);

  auto finish = [&](std::vector<Matrix> hs) {
    HomogenizationResult r;
    r.h = homogenized(f, hs);
    r.H = std::move(hs);
    const SymMatrix c = r.h.coefficient_matrix();
    r.lambda_min = lambda_min(c);
    r.success = r.lambda_min >= -options.tol * (1.0 + c.frobenius_norm());
    return r;
  };

  HomogenizationResult symmetric_split = finish(h);
  if (symmetric_split.success || q == 1) return symmetric_split;

  // Skew freedom: H_i0 = A_i / 2 + sum y (E_ab - E_ba), a < b.
  std::vector<std::pair<std::size_t, std::size_t>> skew;
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b) skew.emplace_back(a, b);
  const std::size_t per = skew.size(), nv = m * per, dim = (m + 1) * q;

  const SymMatrix base = symmetric_split.h.coefficient_matrix();
  LmiProblem lmi;
  lmi.objective.assign(nv + 1, 0.0);
  lmi.objective[nv] = 1.0;
  LmiBlock block{base, {}};
  for (std::size_t i = 1; i <= m; ++i)
    for (const auto& [a, b] : skew) {
      Matrix e(dim, dim);
      e(i * q + a, b) = 1.0;
      e(i * q + b, a) = -1.0;
      e(b, i * q + a) = 1.0;
      e(a, i * q + b) = -1.0;
      block.coefficients.push_back(SymMatrix::checked(std::move(e)));
    }
  block.coefficients.push_back(-1.0 * SymMatrix::identity(dim));
  lmi.blocks = {std::move(block)};

  std::vector<double> start(nv + 1, 0.0);
  start[nv] = symmetric_split.lambda_min - 0.5 * (1.0 + std::abs(symmetric_split.lambda_min));
  const double scale = 1.0 + base.frobenius_norm();
  LmiOptions lo;
  lo.initial_gap = scale;
  lo.gap_tol = 0.01 * options.tol;
  lo.stop_above = 0.0;
  lo.stop_below = -options.tol_strict * scale;
  const LmiSolution sol = maximize_lmi(lmi, start, lo);

  std::vector<Matrix> best = h;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < per; ++k) {
      const auto [a, b] = skew[k];
      const double y = sol.y[i * per + k];
      best[i](a, b) += y;
      best[i](b, a) -= y;
    }
  HomogenizationResult r = finish(std::move(best));
  return r.lambda_min >= symmetric_split.lambda_min ? r : symmetric_split;
}

}  // namespace ncslemma
