#include "ncslemma/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ncslemma/error.hpp"
#include "ncslemma/optimize.hpp"

namespace ncslemma {

MatTuple positivity_probe(std::size_t m) {
  std::vector<Matrix> mats;
  mats.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) {
    Matrix x(m + 1, m + 1);
    x(0, i) = 1.0;
    x(i, 0) = 1.0;
    mats.push_back(std::move(x));
  }
  return MatTuple::create(m + 1, TupleKind::Symmetric, std::move(mats));
}

PositivityReport is_globally_psd(const NCQuadPoly& f, double tol) {
  const SymMatrix a = f.coefficient_matrix();
  const EigDecomp eig = sym_eig(a);
  const double scale = 1.0 + a.frobenius_norm();

  PositivityReport report;
  report.eigenvalues = eig.values;
  report.psd = eig.min() >= -tol * scale;
  if (report.psd) return report;

  // X0_i X0_j = delta_ij e0 e0^T + e_i e_j^T, so in the coordinates
  // (a, k) -> a (m+1) + k of f(X0) the rows k >= 1 carry a shuffled copy of
  // the coefficient matrix. Feed it the bottom eigenvector.
  const std::size_t m = f.m(), q = f.q();
  const std::vector<double> v = eig.bottom_vector();
  std::vector<double> w(q * (m + 1), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < q; ++r) w[r * (m + 1) + i + 1] = v[i * q + r];

  MatTuple probe = positivity_probe(m);
  const double value = quad_form(evaluate(f, probe), w);
  if (!(value < 0.0) || std::abs(value - eig.min()) > 1e-9 * scale)
    fail(ErrorCode::WitnessConstructionFailed,
         "w^T f(X0) w = " + std::to_string(value) + " but lambda_min = " +
             std::to_string(eig.min()));
  report.witness_point = std::move(probe);
  report.witness_vector = std::move(w);
  report.witness_value = value;
  return report;
}

SosFactor sos_factor(const NCQuadPoly& f, double tol) {
  const SymMatrix a = f.coefficient_matrix();
  if (lambda_min(a) < -tol * (1.0 + a.frobenius_norm()))
    fail(ErrorCode::NotGloballyPSD, "coefficient matrix has a negative eigenvalue");
  const Matrix v = psd_factor(a, tol);
  SosFactor out;
  out.m = f.m();
  out.q = f.q();
  out.rank = v.cols();
  for (std::size_t i = 0; i < f.m(); ++i)
    out.W.push_back(v.block(i * f.q(), 0, f.q(), v.cols()).transpose());
  return out;
}

Matrix evaluate_linear(const SosFactor& l, const MatTuple& x) {
  require(x.m() == l.m, ErrorCode::ShapeMismatch, "tuple size differs from the factor's m");
  const std::size_t n = x.n();
  Matrix out(l.rank * n, l.q * n);
  for (std::size_t i = 0; i < l.m; ++i) out += kron(l.W[i], x[i].transpose());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Pencil {
  const SymMatrix& a;
  const SymMatrix& b;

  SymMatrix at(double lambda) const { return a - lambda * b; }
  double value(double lambda) const { return lambda_min(at(lambda)); }
};

struct Maximum {
  double lambda = 0.0;
  double value = 0.0;
  double hi = 0.0;
};

// lambda -> lambda_min(A - lambda B) is concave, so it is unimodal on
// [0, inf). Grow the bracket until the right end stops increasing.
Maximum golden_section(const Pencil& p, std::size_t budget) {
  double hi = 1.0;
  double h_hi = p.value(hi);
  const double limit = std::ldexp(1.0, 60);
  while (hi < limit) {
    const double h_next = p.value(2.0 * hi);
    if (h_next <= h_hi) {
      hi *= 2.0;
      break;
    }
    hi *= 2.0;
    h_hi = h_next;
  }

  Maximum best{0.0, p.value(0.0), hi};
  auto consider = [&](double lambda, double value) {
    if (value > best.value) {
      best.lambda = lambda;
      best.value = value;
    }
  };
  consider(hi, p.value(hi));

  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, up = hi;
  double x1 = up - ratio * (up - lo), x2 = lo + ratio * (up - lo);
  double f1 = p.value(x1), f2 = p.value(x2);
  consider(x1, f1);
  consider(x2, f2);
  const std::size_t iterations = std::min<std::size_t>(budget, 400);
  for (std::size_t k = 0; k < iterations && up - lo > 1e-15 * (1.0 + up); ++k) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (up - lo);
      f2 = p.value(x2);
      consider(x2, f2);
    } else {
      up = x2;
      x2 = x1;
      f2 = f1;
      x1 = up - ratio * (up - lo);
      f1 = p.value(x1);
      consider(x1, f1);
    }
  }
  return best;
}

bool good_counterexample(const std::vector<double>& x, const SymMatrix& a, const SymMatrix& b,
                         const ScalarOptions& o, double& xa, double& xb) {
  xa = quad_form(a, x);
  xb = quad_form(b, x);
  return xb >= -o.tol && xa <= -o.tol_strict;
}

std::vector<double> unit(std::vector<double> v) {
  const double n = norm2(v);
  for (auto& x : v) x /= n;
  return v;
}

// Separator candidates from the near-bottom eigenspace of A - lambda B: a
// combination of two eigenspace vectors whose B-values straddle zero.
std::optional<SymMatrix> eigenspace_separator(const Pencil& p, const Maximum& best,
                                              double delta) {
  const EigDecomp e = sym_eig(p.at(best.lambda));
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < e.values.size(); ++k)
    if (e.values[k] <= e.min() + delta) keep.push_back(k);
  const std::size_t d = keep.size(), n = p.a.dim();
  Matrix basis(n, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < n; ++r) basis(r, c) = e.vectors(r, keep[c]);

  const EigDecomp restricted =
      sym_eig(SymMatrix::symmetrized(basis.transpose() * p.b.matrix() * basis));
  const double c_hi = restricted.max(), c_lo = restricted.min();
  if (c_hi < 0.0) return std::nullopt;
  const auto lift = [&](std::vector<double> y) { return matvec(basis, y); };
  const std::vector<double> up = lift(restricted.vector(0));
  const std::vector<double> down = lift(restricted.vector(d - 1));
  if (best.lambda == 0.0) return SymMatrix::symmetrized(outer(up, up));
  if (c_lo >= 0.0) return SymMatrix::symmetrized(outer(down, down));
  const double beta = -c_lo / (c_hi - c_lo);
  return SymMatrix::symmetrized(beta * outer(up, up) + (1.0 - beta) * outer(down, down));
}

}  // namespace

ScalarSLemmaResult scalar_slemma(const SymMatrix& a, const SymMatrix& b,
                                 std::span<const double> slater, const ScalarOptions& options) {
  require(a.dim() == b.dim(), ErrorCode::ShapeMismatch, "A and B differ in size");
  require(slater.size() == a.dim(), ErrorCode::ShapeMismatch,
          "Slater point must have " + std::to_string(a.dim()) + " entries");
  const double slater_value = quad_form(b, slater);
  require(slater_value > options.tol_strict, ErrorCode::SlaterViolated,
          "g at the Slater point is " + std::to_string(slater_value));

  const Pencil pencil{a, b};
  const Maximum best = golden_section(pencil, options.budget);
  const double scale = 1.0 + a.frobenius_norm();

  ScalarSLemmaResult result;
  result.lambda = best.lambda;
  result.best_value = best.value;
  result.bracket_hi = best.hi;

  if (best.value >= -options.tol * scale) {
    result.outcome = ScalarOutcome::Certificate;
    return result;
  }
  if (best.value > -options.tol_strict * scale) return result;  // dead zone

  auto accept = [&](const SymMatrix& s) {
    try {
      std::vector<double> x =
          rank_one_split(s, a, b, options.tol, options.tol_strict, options.seed);
      double xa = 0.0, xb = 0.0;
      if (!good_counterexample(x, a, b, options, xa, xb)) return false;
      result.outcome = ScalarOutcome::Counterexample;
      result.x = std::move(x);
      result.x_a = xa;
      result.x_b = xb;
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  const double gap = -best.value - options.tol_strict;
  for (double delta = 1e-10 * scale; delta < gap; delta *= 100.0) {
    if (auto s = eigenspace_separator(pencil, best, delta); s && accept(*s)) return result;
  }

  // Fallback: search the spectraplex for S with <B,S> >= 0 > <A,S>.
  const double sb = 1.0 + b.frobenius_norm();
  auto objective = [&](const SymMatrix& s) {
    const double vb = inner(b, s) / sb, va = -inner(a, s) / scale;
    return vb <= va ? SpectralEvaluation{vb, (1.0 / sb) * b}
                    : SpectralEvaluation{va, (-1.0 / scale) * a};
  };
  SpectralSearchOptions search;
  search.budget = options.budget;
  search.seed = options.seed;
  search.stop_at = options.tol_strict;
  const auto found = maximize_spectral(objective, a.dim(), search);
  if (found.value > 0.0) accept(found.point);
  return result;
}

// ---------------------------------------------------------------------------

std::vector<double> rank_one_split(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                                   double tol, double tol_strict, std::uint64_t seed) {
  require(s.dim() == a.dim() && s.dim() == b.dim(), ErrorCode::ShapeMismatch,
          "S, A and B differ in size");
  const double sa = inner(s, a), sb = inner(s, b);
  if (!is_psd(s, tol) || sa > -tol_strict || sb < -tol)
    fail(ErrorCode::PreconditionViolated,
         "need S >= 0, <S,A> <= -tol_strict, <S,B> >= -tol; got <S,A> = " + std::to_string(sa) +
             ", <S,B> = " + std::to_string(sb));

  const Matrix factor = psd_factor(s, tol);
  const std::size_t r = factor.cols(), n = s.dim();
  std::vector<std::vector<double>> cols(r, std::vector<double>(n));
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < n; ++i) cols[k][i] = factor(i, k);

  auto verified = [&](const std::vector<double>& x) {
    const double nx = norm2(x);
    if (!(nx > 0.0)) return false;
    return quad_form(a, x) / (nx * nx) < 0.0 && quad_form(b, x) / (nx * nx) >= -tol;
  };

  // Equalize B-values: every merged column ends with y^T B y = tau.
  if (r > 0) {
    const double tau = std::max(sb, 0.0) / static_cast<double>(r);
    std::vector<double> bv(r);
    for (std::size_t k = 0; k < r; ++k) bv[k] = quad_form(b, cols[k]);
    const double eps = 1e-14 * (1.0 + b.frobenius_norm()) * (1.0 + s.trace());
    for (std::size_t round = 0; round < r; ++round) {
      std::size_t i = r, j = r;
      for (std::size_t k = 0; k < r; ++k) {
        if (bv[k] > tau + eps && (i == r || bv[k] > bv[i])) i = k;
        if (bv[k] < tau - eps && (j == r || bv[k] < bv[j])) j = k;
      }
      if (i == r || j == r) break;
      const double c = dot(cols[i], matvec(b, cols[j]));
      // (b_j - tau) g^2 + 2 c g + (b_i - tau) = 0 has a real root since the
      // outer coefficients have opposite signs.
      const double qa = bv[j] - tau, qb = 2.0 * c, qc = bv[i] - tau;
      const double disc = std::sqrt(std::max(qb * qb - 4.0 * qa * qc, 0.0));
      const double g = qb >= 0.0 ? (2.0 * qc) / (-qb - disc) : (-qb + disc) / (2.0 * qa);
      const double norm = std::sqrt(1.0 + g * g);
      std::vector<double> y(n), z(n);
      for (std::size_t t = 0; t < n; ++t) {
        y[t] = (cols[i][t] + g * cols[j][t]) / norm;
        z[t] = (cols[j][t] - g * cols[i][t]) / norm;
      }
      cols[i] = std::move(y);
      cols[j] = std::move(z);
      bv[i] = quad_form(b, cols[i]);
      bv[j] = quad_form(b, cols[j]);
    }
  }

  // Most A-negative candidate among the split columns.
  const std::vector<double>* pick = nullptr;
  double pick_score = 0.0;
  for (const auto& c : cols) {
    const double nc = dot(c, c);
    if (nc <= 0.0 || !verified(c)) continue;
    const double score = -quad_form(a, c) / nc;
    if (!pick || score > pick_score) {
      pick = &c;
      pick_score = score;
    }
  }
  if (pick) return unit(*pick);

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  for (int attempt = 0; attempt < 2000 && r > 0; ++attempt) {
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < r; ++k) {
      const double sign = coin(rng) ? 1.0 : -1.0;
      for (std::size_t t = 0; t < n; ++t) x[t] += sign * factor(t, k);
    }
    if (verified(x)) return unit(std::move(x));
  }
  fail(ErrorCode::SplitFailed, "no rank-one term of S separates; <S,A> = " + std::to_string(sa) +
                                   ", <S,B> = " + std::to_string(sb));
}

}  // namespace ncslemma
