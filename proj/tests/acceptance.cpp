// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "test_support.hpp"

#include "ncslemma/cpmap.hpp"
#include "ncslemma/error.hpp"
#include "ncslemma/positivity.hpp"
#include "ncslemma/slemma.hpp"

using namespace ncslemma;
using nlohmann::json;
using testing::kron_oracle;
using testing::lambda_min_bisection;

namespace {

const std::string data = NCS_DATA_DIR;
int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << "criterion " << id << " [" << (pass ? "PASS" : "FAIL") << "] " << name << ": "
            << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(NCS_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Matrix from_json(const json& j) {
  Matrix m(j.size(), j.empty() ? 0 : j[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// --- oracles built from the definitions only ---------------------------------

// phi(M)_cd = sum_ab J[c s + a][d s + b] M_ab
Matrix choi_apply(const Matrix& j, std::size_t s, std::size_t t, const Matrix& m) {
  Matrix out(t, t);
  for (std::size_t c = 0; c < t; ++c)
    for (std::size_t d = 0; d < t; ++d)
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) out(c, d) += j(c * s + a, d * s + b) * m(a, b);
  return out;
}

// A - [phi(B_ij)]_ij
SymMatrix residual_oracle(const NCQuadPoly& f, const NCQuadPoly& g, const Matrix& k) {
  const std::size_t q = g.q(), m = g.m();
  Matrix r(m * q, m * q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      r.set_block(i * q, j * q, f.block(i, j) - choi_apply(k, q, q, g.block(i, j)));
  return SymMatrix::symmetrized(r);
}

// sum A_ij (x) X_i X_j
Matrix eval_oracle(const NCQuadPoly& p, const MatTuple& x) {
  Matrix out(p.q() * x.n(), p.q() * x.n());
  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.m(); ++j) out += kron_oracle(p.block(i, j), x[i] * x[j]);
  return out;
}

Matrix compress_oracle(const Matrix& full, std::size_t q, const Matrix& proj) {
  const Matrix lift = kron_oracle(Matrix::identity(q), proj);
  return lift.transpose() * full * lift;
}

// largest |entry| outside (r, c), and the entry at (r, c)
std::pair<double, double> single_entry(const Matrix& m, std::size_t r, std::size_t c) {
  double off = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != r || j != c) off = std::max(off, std::abs(m(i, j)));
  return {off, m(r, c)};
}

NCQuadPoly swap_f() {
  return NCQuadPoly::create(2, 2,
                            {Matrix{{1, 0}, {0, 1}}, Matrix(2, 2), Matrix(2, 2), Matrix{{0, 0}, {0, -1}}});
}

NCQuadPoly swap_g() {
  return NCQuadPoly::create(2, 2,
                            {Matrix{{1, 0}, {0, 1}}, Matrix(2, 2), Matrix(2, 2), Matrix{{-1, 0}, {0, 0}}});
}

MatTuple scalars(std::vector<double> xs) {
  std::vector<Matrix> mats;
  for (double x : xs) mats.push_back(Matrix{{x}});
  return MatTuple::create(1, TupleKind::Symmetric, std::move(mats));
}

// --- criteria ------------------------------------------------------------------

void swap_instance() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cert_path = "acceptance_swap_certificate.json";
  const Run r = cli("slemma -o " + cert_path + " " + data + "/swap.json");
  const double elapsed = seconds_since(t0);
  bool pass = r.code == 0;
  std::string detail = "exit " + std::to_string(r.code);
  if (pass) {
    const json cert = json::parse(r.out);
    const Matrix k = cert["scale"].get<double>() * from_json(cert["J"]["J"]);
    const double lmin = lambda_min_bisection(residual_oracle(swap_f(), swap_g(), k));
    const double j_min = lambda_min_bisection(SymMatrix::symmetrized(k));
    pass = cert["type"] == "cp-certificate" && lmin >= -1e-6 && j_min >= -1e-9;
    detail += ", residual lambda_min " + fmt(lmin) + ", Choi lambda_min " + fmt(j_min);
    const Run v = cli("verify " + cert_path + " " + data + "/swap.json");
    pass = pass && v.code == 0;
  }
  const auto x = scalars({1, 2});
  const std::vector<double> v{0, 1};
  const double vg = quad_form(eval_oracle(swap_g(), x), v);
  const double vf = quad_form(eval_oracle(swap_f(), x), v);
  pass = pass && std::abs(vg - 1.0) <= 1e-12 && std::abs(vf + 3.0) <= 1e-12 && elapsed < 5.0;
  detail += ", v^T g v = " + fmt(vg) + ", v^T f v = " + fmt(vf) + ", " + fmt(elapsed) + " s";
  report(1, "swap-map certificate and refuted vector domination", pass, detail);
}

void commutator_instance() {
  auto e = [](std::size_t a, std::size_t b, double v = 1.0) {
    Matrix m(4, 4);
    m(a, b) = v;
    return m;
  };
  const Matrix z(4, 4);
  const auto f = NCQuadPoly::create(2, 4, {z, e(0, 0), e(0, 0), e(0, 0, -1)});
  const Matrix b12 = e(1, 1) + e(2, 3) + e(3, 2, -1);
  const auto g = NCQuadPoly::create(2, 4, {e(0, 0), b12, b12.transpose(), e(0, 0, -1)});
  Matrix x1(6, 6), x2(6, 6), p(6, 6);
  x1(1, 2) = x1(2, 1) = std::numbers::sqrt2;
  x2(0, 2) = x2(2, 0) = 1.0;
  for (std::size_t k = 2; k < 6; ++k) p(k, k) = 1.0;
  const auto x = MatTuple::create(6, TupleKind::Symmetric, {x1, x2});

  const SymMatrix gc = evaluate_compressed(g, x, p);
  const SymMatrix fc = evaluate_compressed(f, x, p);
  const double lib_vs_oracle =
      std::max(testing::max_diff(gc, compress_oracle(eval_oracle(g, x), 4, p)),
               testing::max_diff(fc, compress_oracle(eval_oracle(f, x), 4, p)));
  const auto [g_off, g_entry] = single_entry(gc, 2, 2);
  const auto [f_off, f_entry] = single_entry(fc, 2, 2);
  const double g_min = lambda_min_bisection(gc);
  const bool pass = g_off <= 1e-12 && std::abs(g_entry - 1.0) <= 1e-12 && f_off <= 1e-12 &&
                    std::abs(f_entry + 1.0) <= 1e-12 && g_min >= -1e-12 && lib_vs_oracle <= 1e-12;
  report(2, "compressed commutator evaluations", pass,
         "g entry " + fmt(g_entry) + " (others <= " + fmt(g_off) + ", lambda_min " + fmt(g_min) +
             "), f entry " + fmt(f_entry) + " (others <= " + fmt(f_off) + ")");
}

void homogenization() {
  const auto t0 = std::chrono::steady_clock::now();
  const Run h1 = cli("check-positivity " + data + "/h1.json");
  const Run h2 = cli("check-positivity " + data + "/h2.json");
  const Run hom = cli("homogenize " + data + "/homogenize.json");
  const double elapsed = seconds_since(t0);
  bool pass = h1.code == 0 && h2.code == 10 && hom.code == 0;
  std::string detail = "exit codes " + std::to_string(h1.code) + "/" + std::to_string(h2.code) +
                       "/" + std::to_string(hom.code);
  if (pass) {
    const double h2_min = json::parse(h2.out)["lambda_min"].get<double>();
    const Matrix h2_matrix{{0, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 0}};
    const double h2_oracle = lambda_min_bisection(SymMatrix::checked(h2_matrix));
    const Matrix coeff = from_json(json::parse(hom.out)["coefficient_matrix"]);
    const double hom_min = lambda_min_bisection(SymMatrix::symmetrized(coeff));
    pass = std::abs(h2_min + 1.0) <= 1e-9 && std::abs(h2_oracle + 1.0) <= 1e-9 &&
           hom_min >= -1e-8;
    detail += ", second split lambda_min " + fmt(h2_min) + ", homogenized lambda_min " +
              fmt(hom_min);
  }
  pass = pass && elapsed < 5.0;
  report(3, "homogenization example", pass, detail + ", " + fmt(elapsed) + " s");
}

void positivity_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4001);
  int disagreements = 0, psd_count = 0, bad_evals = 0;
  const int total = 240;
  for (int trial = 0; trial < total; ++trial) {
    const std::size_t m = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    const NCQuadPoly f =
        trial % 2 == 0 ? testing::random_poly(rng, m, q)
                       : NCQuadPoly::from_coefficient_matrix(
                             m, q, testing::random_psd(rng, m * q, 1 + trial % (m * q)));
    const PositivityReport rep = is_globally_psd(f);
    const SymMatrix a = f.coefficient_matrix();
    const double scale = 1.0 + a.frobenius_norm();
    // f at the probe point is a permutation of diag(sum A_ii, A)
    const double probe_min =
        lambda_min_bisection(SymMatrix::symmetrized(eval_oracle(f, positivity_probe(m))));
    const bool oracle_psd = probe_min >= -1e-8 * scale;
    if (oracle_psd != rep.psd) ++disagreements;
    if (!rep.psd) continue;
    ++psd_count;
    for (int k = 0; k < 100; ++k) {
      const auto x = testing::random_sym_tuple(rng, m, 1 + k % 4);
      if (lambda_min_bisection(SymMatrix::symmetrized(eval_oracle(f, x))) < -1e-8 * scale)
        ++bad_evals;
    }
  }
  const double elapsed = seconds_since(t0);
  report(4, "global PSD test against the probe eigen-test",
         disagreements == 0 && bad_evals == 0 && elapsed < 60.0,
         std::to_string(total) + " polynomials, " + std::to_string(disagreements) +
             " disagreements, " + std::to_string(psd_count) + " PSD with " +
             std::to_string(bad_evals) + " negative evaluations, " + fmt(elapsed) + " s");
}

void sos_factorization() {
  std::mt19937_64 rng(5001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    const auto f = NCQuadPoly::from_coefficient_matrix(
        m, q, testing::random_psd(rng, m * q, 1 + trial % (m * q)));
    const SosFactor l = sos_factor(f);
    for (int k = 0; k < 20; ++k) {
      const auto x = testing::random_sym_tuple(rng, m, 1 + k % 4);
      const Matrix fx = eval_oracle(f, x);
      const Matrix lx = evaluate_linear(l, x);
      const double err = (fx - lx.transpose() * lx).frobenius_norm();
      worst = std::max(worst, err / (1.0 + fx.frobenius_norm()));
    }
  }
  report(5, "SOS factorization residual", worst <= 1e-8,
         "worst relative residual " + fmt(worst) + " over 100 x 20 evaluations");
}

void planted_certificates() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(6001);
  int recovered = 0;
  double worst = 0.0;
  const std::size_t shapes[][2] = {{1, 2}, {2, 2}, {3, 2}, {2, 3}, {3, 3}, {1, 4}, {2, 4},
                                   {3, 4}, {4, 3}, {6, 2}};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = shapes[trial % 10][0], q = shapes[trial % 10][1];
    const auto g = testing::random_poly(rng, m, q);
    SymMatrix j0 = testing::random_psd(rng, q * q, 1 + trial % (q * q));
    j0 = (1.0 / j0.trace()) * j0;
    const SymMatrix noise = 0.1 * testing::random_psd(rng, m * q, 1 + trial % 3);
    const auto f = NCQuadPoly::from_coefficient_matrix(m, q, map_coefficients(j0, g) + noise);
    const CertifyResult r = certify(f, g);
    if (!r.certificate || !verify_certificate(*r.certificate, f, g)) continue;
    const Matrix k = r.certificate->scale * r.certificate->J.J().matrix();
    const SymMatrix res = residual_oracle(f, g, k);
    const double lmin = lambda_min_bisection(res);
    const double jmin = lambda_min_bisection(SymMatrix::symmetrized(k));
    worst = std::min(worst, lmin / (1.0 + res.frobenius_norm()));
    if (lmin >= -1e-8 * (1.0 + res.frobenius_norm()) && jmin >= -1e-9) ++recovered;
  }
  const double elapsed = seconds_since(t0);
  report(6, "planted certificate recovery", recovered == 50 && elapsed < 120.0,
         std::to_string(recovered) + "/50 verified, worst relative residual lambda_min " +
             fmt(worst) + ", " + fmt(elapsed) + " s");
}

void counterexamples() {
  std::mt19937_64 rng(7001);
  int built = 0, verified = 0, scalar = 0, attempts = 0;
  double worst_block = 0.0;
  while (built < 50 && attempts < 400) {
    ++attempts;
    NCQuadPoly f, g;
    if (attempts % 3 == 1) {
      // the scalar pair 2 x1 x2 against x1^2, in rotated coordinates
      const double th = std::uniform_real_distribution<double>(0, std::numbers::pi)(rng);
      const Matrix rot{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
      const Matrix a = rot.transpose() * Matrix{{0, 1}, {1, 0}} * rot;
      const Matrix b = rot.transpose() * Matrix{{1, 0}, {0, 0}} * rot;
      f = NCQuadPoly::from_coefficient_matrix(2, 1, SymMatrix::symmetrized(a));
      g = NCQuadPoly::from_coefficient_matrix(2, 1, SymMatrix::symmetrized(b));
    } else {
      const std::size_t m = 1 + attempts % 2, q = 1 + (attempts / 2) % 2;
      f = testing::random_poly(rng, m, q);
      g = testing::random_poly(rng, m, q);
    }
    const SeparatorResult s = find_separator(f, g);
    if (!s.M) continue;
    ++built;
    if (f.q() == 1 && f.m() == 2 && attempts % 3 == 1) ++scalar;
    Counterexample ce;
    try {
      ce = build_counterexample(f, g, *s.M);
    } catch (const Error&) {
      continue;
    }
    const std::size_t q = g.q();
    const Matrix gc = compress_oracle(eval_oracle(g, ce.X), q, ce.P);
    const Matrix fc = compress_oracle(eval_oracle(f, ce.X), q, ce.P);
    const double g_min = lambda_min_bisection(SymMatrix::symmetrized(gc));
    const double viol = quad_form(fc, ce.E);
    double block = 0.0;
    for (std::size_t i = 0; i < g.m(); ++i)
      for (std::size_t j = 0; j < g.m(); ++j) {
        const Matrix prod = ce.P * ce.X[i] * ce.X[j] * ce.P;
        const Matrix want = ce.M.matrix().block(i * q, j * q, q, q);
        block = std::max(block, testing::max_diff(prod.block(ce.rank, ce.rank, q, q), want));
        // nothing outside the last q coordinates
        Matrix rest = prod;
        rest.set_block(ce.rank, ce.rank, Matrix(q, q));
        block = std::max(block, rest.max_abs());
      }
    worst_block = std::max(worst_block, block);
    if (g_min >= -1e-8 * (1.0 + gc.frobenius_norm()) && viol <= -1e-6 && block <= 1e-8)
      ++verified;
  }
  report(7, "counterexample construction", built == 50 && verified == 50 && scalar > 0,
         std::to_string(verified) + "/" + std::to_string(built) + " verified (" +
             std::to_string(scalar) + " scalar embeddings), worst block error " +
             fmt(worst_block));
}

void mutual_exclusion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8001);
  int both = 0, both_loose = 0, certs = 0, seps = 0;
  const int total = 200;
  for (int trial = 0; trial < total; ++trial) {
    const std::size_t m = 1 + trial % 2, q = 1 + (trial / 2) % 2;
    const auto g = testing::random_poly(rng, m, q);
    NCQuadPoly f;
    if (trial % 4 == 0) {
      f = testing::random_poly(rng, m, q);
    } else {
      // near the boundary of the certifiable set
      SymMatrix j0 = testing::random_psd(rng, q * q, 1 + trial % (q * q));
      j0 = (1.0 / j0.trace()) * j0;
      const double eps = std::ldexp(1.0, -static_cast<int>(trial % 20)) * (trial % 8 < 4 ? 1 : -1);
      f = NCQuadPoly::from_coefficient_matrix(
          m, q, map_coefficients(j0, g) + eps * SymMatrix::identity(m * q));
    }
    const CertifyResult c = certify(f, g);
    const SeparatorResult s = find_separator(f, g);
    const bool cert = c.certificate && verify_certificate(*c.certificate, f, g);
    const bool sep_strict = s.M && s.coupling <= -1e-6 && s.adjoint_lambda_min >= 1e-6;
    const bool sep_any = s.M.has_value();
    certs += cert;
    seps += sep_any;
    both += cert && sep_strict;
    both_loose += cert && sep_any;
  }
  const double elapsed = seconds_since(t0);
  report(8, "certificate and separator mutually exclusive", both == 0 && both_loose == 0,
         std::to_string(total) + " instances, " + std::to_string(certs) + " certified, " +
             std::to_string(seps) + " separated, " + std::to_string(both) + " with both (" +
             std::to_string(both_loose) + " counting relaxed separators), " + fmt(elapsed) +
             " s");
}

// lambda_min of a 2 x 2 symmetric matrix in closed form
double lmin2(double a, double b, double d) {
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

void scalar_brute_force() {
  std::mt19937_64 rng(9001);
  std::normal_distribution<double> gauss;
  int matched = 0, compared = 0, dead = 0, oracle_inconsistent = 0;
  const double tol = 1e-8, tol_strict = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    SymMatrix a, b;
    std::vector<double> slater;
    for (;;) {
      a = testing::random_sym(rng, 2);
      b = testing::random_sym(rng, 2);
      slater = {gauss(rng), gauss(rng)};
      if (quad_form(b, slater) > tol_strict) break;
    }
    auto h = [&](double lam) { return lmin2(a(0, 0) - lam * b(0, 0), a(0, 1) - lam * b(0, 1), a(1, 1) - lam * b(1, 1)); };
    // grid over [0, 2^10] with step 2^-10, then golden refinement around the best node
    const double step = std::ldexp(1.0, -10);
    double best = h(0.0), best_lam = 0.0;
    for (long k = 1; k <= (1L << 20); ++k) {
      const double v = h(k * step);
      if (v > best) best = v, best_lam = k * step;
    }
    double lo = std::max(0.0, best_lam - step), hi = best_lam + step;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) * 0.381966, m2 = hi - (hi - lo) * 0.381966;
      if (h(m1) < h(m2)) lo = m1;
      else hi = m2;
    }
    best = std::max(best, h(0.5 * (lo + hi)));

    const double s = 1.0 + a.frobenius_norm();
    if (best < -tol * s && best > -tol_strict * s) {
      ++dead;
      continue;
    }
    const bool expect_cert = best >= -tol * s;
    if (!expect_cert) {
      // the refutation must be visible on the unit circle
      bool seen = false;
      for (int k = 0; k < 200000 && !seen; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 200000.0;
        const std::vector<double> x{std::cos(t), std::sin(t)};
        seen = quad_form(b, x) >= 0.0 && quad_form(a, x) < 0.0;
      }
      if (!seen) ++oracle_inconsistent;
    }
    ++compared;
    const auto r = scalar_slemma(a, b, slater);
    if (expect_cert && r.outcome == ScalarOutcome::Certificate) {
      ++matched;
    } else if (!expect_cert && r.outcome == ScalarOutcome::Counterexample) {
      const double xa = quad_form(a, r.x), xb = quad_form(b, r.x);
      if (xb >= -tol && xa <= -tol_strict) ++matched;
    }
  }
  report(9, "scalar S-lemma against grid search", matched == compared && oracle_inconsistent == 0,
         std::to_string(matched) + "/" + std::to_string(compared) + " outcomes match, " +
             std::to_string(dead) + " in the dead zone, " +
             std::to_string(oracle_inconsistent) + " oracle inconsistencies");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{
      swap_instance,  commutator_instance, homogenization,   positivity_equivalence,
      sos_factorization, planted_certificates, counterexamples, mutual_exclusion,
      scalar_brute_force};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), "exception", false, e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
