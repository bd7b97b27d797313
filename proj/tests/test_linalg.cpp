#include "doctest.h"
#include "test_support.hpp"

#include <numeric>

#include "ncslemma/error.hpp"

using namespace ncslemma;
using testing::max_diff;

TEST_CASE("kron agrees with the entrywise definition") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = testing::random_matrix(rng, 1 + trial % 3, 2 + trial % 2);
    const Matrix b = testing::random_matrix(rng, 3, 1 + trial % 4);
    CHECK(max_diff(kron(a, b), testing::kron_oracle(a, b)) == 0.0);
  }
}

TEST_CASE("kron mixed product rule") {
  std::mt19937_64 rng(2);
  const Matrix a = testing::random_matrix(rng, 2, 3), c = testing::random_matrix(rng, 3, 2);
  const Matrix b = testing::random_matrix(rng, 4, 2), d = testing::random_matrix(rng, 2, 3);
  CHECK(max_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
}

TEST_CASE("kron refuses absurd sizes") {
  const Matrix big(1 << 16, 1);
  CHECK_THROWS_AS(kron(big, Matrix(1 << 16, 1)), Error);
}

TEST_CASE("checked symmetric construction") {
  CHECK_NOTHROW(SymMatrix::checked(Matrix{{1, 2}, {2 + 1e-14, 3}}));
  CHECK_THROWS_AS(SymMatrix::checked(Matrix{{1, 2}, {2.1, 3}}), Error);
  CHECK_THROWS_AS(SymMatrix::checked(Matrix{{1, NAN}, {NAN, 3}}), Error);
  const auto s = SymMatrix::checked(Matrix{{1, 2}, {2 + 1e-14, 3}});
  CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("Jacobi eigen decomposition reconstructs and matches bisection") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 5u, 9u, 16u}) {
    const SymMatrix s = testing::random_sym(rng, n);
    const EigDecomp e = sym_eig(s);
    Matrix rebuilt(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = e.vector(k);
      rebuilt += e.values[k] * outer(v, v);
    }
    CHECK(max_diff(rebuilt, s) < 1e-10);
    const Matrix gram = e.vectors.transpose() * e.vectors;
    CHECK(max_diff(gram, Matrix::identity(n)) < 1e-10);
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    CHECK(e.min() == doctest::Approx(testing::lambda_min_bisection(s)).epsilon(1e-9));
  }
}

TEST_CASE("bottom vector breaks ties by sorted index") {
  const auto s = SymMatrix::diagonal(std::vector<double>{0.0, 0.0, 2.0});
  const auto v = sym_eig(s).bottom_vector();
  CHECK(norm2(v) == doctest::Approx(1.0));
  CHECK(quad_form(s, v) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("psd test and projection") {
  std::mt19937_64 rng(4);
  const SymMatrix p = testing::random_psd(rng, 6, 3);
  CHECK(is_psd(p));
  CHECK_FALSE(is_psd(p - 1e-3 * SymMatrix::identity(6)));
  const SymMatrix s = testing::random_sym(rng, 6);
  const SymMatrix proj = psd_project(s);
  CHECK(lambda_min(proj) > -1e-12);
  // projecting twice is the identity on the cone
  CHECK(max_diff(psd_project(proj), proj) < 1e-10);
}

TEST_CASE("simplex projection") {
  const std::vector<double> v{0.5, 0.5, 0.5};
  const auto p = project_to_simplex(v);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));

  const std::vector<double> w{3.0, -1.0, 0.2};
  const auto pw = project_to_simplex(w);
  CHECK(pw[0] == doctest::Approx(1.0));
  CHECK(pw[1] == 0.0);
  CHECK(pw[2] == 0.0);

  // optimality: <v - p, y - p> <= 0 for every vertex y
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> r(7);
  for (auto& x : r) x = g(rng);
  const auto pr = project_to_simplex(r);
  CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) == doctest::Approx(1.0));
  for (std::size_t k = 0; k < r.size(); ++k) {
    double ip = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) ip += (r[i] - pr[i]) * ((i == k) - pr[i]);
    CHECK(ip <= 1e-12);
  }
}

TEST_CASE("spectraplex projection lands on trace one PSD") {
  std::mt19937_64 rng(6);
  const SymMatrix s = testing::random_sym(rng, 5);
  const SymMatrix p = spectraplex_project(s);
  CHECK(p.trace() == doctest::Approx(1.0));
  CHECK(lambda_min(p) > -1e-12);
}

TEST_CASE("psd factor") {
  std::mt19937_64 rng(7);
  const SymMatrix p = testing::random_psd(rng, 6, 2);
  const Matrix v = psd_factor(p);
  CHECK(v.cols() == 2);
  CHECK(max_diff(v * v.transpose(), p) < 1e-10);
  CHECK_THROWS_AS(psd_factor(SymMatrix::diagonal(std::vector<double>{1.0, -1.0})), Error);
}
