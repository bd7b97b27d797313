#include "doctest.h"
#include "test_support.hpp"

#include "ncslemma/cpmap.hpp"
#include "ncslemma/error.hpp"

using namespace ncslemma;
using testing::max_diff;

namespace {

Matrix swap_entries(const Matrix& m) {
  // [[a,b],[c,d]] -> [[d,0],[0,a]]
  return Matrix{{m(1, 1), 0.0}, {0.0, m(0, 0)}};
}

NCQuadPoly example_f() {
  return NCQuadPoly::create(2, 2,
                            {Matrix{{1, 0}, {0, 1}}, Matrix(2, 2), Matrix(2, 2), Matrix{{0, 0}, {0, -1}}});
}

NCQuadPoly example_g() {
  return NCQuadPoly::create(2, 2,
                            {Matrix{{1, 0}, {0, 1}}, Matrix(2, 2), Matrix(2, 2), Matrix{{-1, 0}, {0, 0}}});
}

// Matrix units sum_ab E_ab (x) E_ab: PSD of rank one.
Matrix max_entangled(std::size_t s) {
  Matrix out(s * s, s * s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) out(a * s + a, b * s + b) = 1.0;
  return out;
}

}  // namespace

TEST_CASE("identity map reproduces its input") {
  std::mt19937_64 rng(31);
  const auto id = identity_choi(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = testing::random_matrix(rng, 3, 3);
    CHECK(max_diff(apply_map(id, m), m) == 0.0);
  }
  CHECK(is_completely_positive(id));
}

TEST_CASE("the diagonal swap map is completely positive") {
  const auto j = choi_from_map(2, 2, swap_entries);
  const Matrix expected{{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}};
  CHECK(max_diff(j.J(), expected) == 0.0);
  CHECK(is_completely_positive(j));
  const Matrix m{{1, 2}, {3, 4}};
  CHECK(max_diff(apply_map(j, m), swap_entries(m)) == 0.0);
}

TEST_CASE("transpose map is positive but not completely positive") {
  const auto j = choi_from_map(2, 2, [](const Matrix& m) { return m.transpose(); });
  CHECK(lambda_min(j.J()) == doctest::Approx(-1.0));
  CHECK_FALSE(is_completely_positive(j));
  // the violation is visible on the PSD matrix sum E_ab (x) E_ab, whose
  // image under phi (x) 1 is J itself
  const Matrix image = apply_map_blockwise(j, max_entangled(2), BlockLayout::Outer);
  CHECK(max_diff(image, j.J()) == 0.0);
}

TEST_CASE("non-symmetric Choi matrices are rejected") {
  CHECK_THROWS_AS(choi_from_map(2, 2, [](const Matrix& m) { return Matrix{{m(0, 1), 0}, {0, 0}}; }),
                  Error);
}

TEST_CASE("Choi correspondence round trip on random linear maps") {
  std::mt19937_64 rng(32);
  // phi(M) = sum_k s_k (C_k M C_k^T) with signs: symmetric Choi, not always CP
  const std::size_t s = 3, t = 2;
  std::vector<Matrix> cs;
  for (int k = 0; k < 3; ++k) cs.push_back(testing::random_matrix(rng, t, s));
  auto phi = [&](const Matrix& m) {
    Matrix out(t, t);
    for (int k = 0; k < 3; ++k) out += (k == 2 ? -1.0 : 1.0) * (cs[k] * m * cs[k].transpose());
    return out;
  };
  const auto j = choi_from_map(s, t, phi);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = testing::random_matrix(rng, s, s);
    CHECK(max_diff(apply_map(j, m), phi(m)) < 1e-12 * (1 + phi(m).max_abs()));
  }
}

TEST_CASE("CP maps send PSD inputs to PSD outputs, blockwise too") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto j = ChoiMatrix::create(3, 3, testing::random_psd(rng, 9, 2));
    REQUIRE(is_completely_positive(j));
    for (int k = 0; k < 10; ++k) {
      const SymMatrix p = testing::random_psd(rng, 3, 1 + k % 3);
      CHECK(lambda_min(apply_map(j, p)) >= -1e-10);
      const SymMatrix big = testing::random_psd(rng, 12, 2);
      CHECK(lambda_min(SymMatrix::symmetrized(apply_map_blockwise(j, big, BlockLayout::Inner))) >=
            -1e-9);
      CHECK(lambda_min(SymMatrix::symmetrized(apply_map_blockwise(j, big, BlockLayout::Outer))) >=
            -1e-9);
    }
  }
}

TEST_CASE("a negative Choi eigenvalue yields a violating PSD input") {
  std::mt19937_64 rng(34);
  const SymMatrix jm = testing::random_sym(rng, 4);
  REQUIRE(lambda_min(jm) < -1e-6);
  const auto j = ChoiMatrix::create(2, 2, jm);
  const auto z = sym_eig(jm).bottom_vector();
  const Matrix image = apply_map_blockwise(j, max_entangled(2), BlockLayout::Outer);
  CHECK(quad_form(image, z) < -1e-6);
}

TEST_CASE("mapping Example g by the swap map gives f") {
  const auto j = choi_from_map(2, 2, swap_entries);
  const auto mapped = apply_map_to_poly(j, example_g());
  CHECK(max_diff(mapped.coefficient_matrix(), example_f().coefficient_matrix()) == 0.0);
  const auto blockwise =
      apply_map_blockwise(j, example_g().coefficient_matrix(), BlockLayout::Inner);
  CHECK(max_diff(example_f().coefficient_matrix().matrix() - blockwise, Matrix(4, 4)) == 0.0);
  CHECK(max_diff(map_coefficients(j.J(), example_g()), blockwise) == 0.0);
}

TEST_CASE("trace map turns a matrix polynomial into a scalar one") {
  std::mt19937_64 rng(35);
  const auto g = testing::random_poly(rng, 3, 2);
  const auto tr = choi_from_map(2, 1, [](const Matrix& m) { return Matrix{{m.trace()}}; });
  const auto s = apply_map_to_poly(tr, g);
  CHECK(s.q() == 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(s.block(i, k)(0, 0) == doctest::Approx(g.block(i, k).trace()));
}

TEST_CASE("shuffle permutation") {
  CHECK(shuffle(1, 4) == Matrix::identity(4));
  CHECK(shuffle(3, 1) == Matrix::identity(3));
  const Matrix expected{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  CHECK(shuffle(2, 2) == expected);
  for (std::size_t q = 1; q <= 4; ++q)
    for (std::size_t m = 1; m <= 4; ++m) {
      const Matrix u = shuffle(q, m);
      CHECK(u.transpose() * u == Matrix::identity(q * m));
    }
}

TEST_CASE("rearrangement is the shuffle conjugation and keeps the spectrum") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    const auto p = testing::random_poly(rng, m, q);
    const Matrix u = shuffle(q, m);
    const auto r = rearrange(p);
    CHECK(r.J().matrix() == u * p.coefficient_matrix().matrix() * u.transpose());
    const auto ea = sym_eig(p.coefficient_matrix()), er = sym_eig(r.J());
    for (std::size_t k = 0; k < ea.values.size(); ++k)
      CHECK(ea.values[k] == doctest::Approx(er.values[k]).epsilon(1e-10));
  }
  const auto f = example_f();
  CHECK(rearrange(NCQuadPoly::create(2, 1, {Matrix{{1}}, Matrix{{2}}, Matrix{{2}}, Matrix{{3}}}))
            .J()
            .matrix() == Matrix{{1, 2}, {2, 3}});
  CHECK(sym_eig(rearrange(f).J()).min() == doctest::Approx(-1.0));
}

TEST_CASE("Gram identity: f(X) = (psi_f (x) 1)(Gram(X))") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + trial % 4, q = 1 + (trial / 4) % 4, n = 1 + (trial / 2) % 4;
    const auto p = testing::random_poly(rng, m, q);
    const auto psi = rearrange(p);
    const auto xs = testing::random_sym_tuple(rng, m, n);
    const SymMatrix gs = gram(xs);
    CHECK(lambda_min(gs) >= -1e-9 * (1 + gs.frobenius_norm()));
    const SymMatrix fx = evaluate(p, xs);
    CHECK(max_diff(apply_map_blockwise(psi, gs, BlockLayout::Outer), fx) <=
          1e-9 * (1 + fx.frobenius_norm()));
    const auto xg = testing::random_general_tuple(rng, m, n);
    const SymMatrix fh = evaluate_hereditary(p, xg);
    CHECK(max_diff(apply_map_blockwise(psi, gram(xg), BlockLayout::Outer), fh) <=
          1e-9 * (1 + fh.frobenius_norm()));
  }
}

TEST_CASE("map_coefficients_adjoint is the adjoint") {
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + trial % 3, q = 1 + trial % 4;
    const auto g = testing::random_poly(rng, m, q);
    const SymMatrix k = testing::random_sym(rng, q * q);
    const SymMatrix w = testing::random_sym(rng, m * q);
    const double lhs = inner(map_coefficients(k, g), w);
    const double rhs = inner(k, map_coefficients_adjoint(w, g));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("blockwise application checks shapes") {
  CHECK_THROWS_AS(apply_map_blockwise(identity_choi(2), Matrix(3, 3), BlockLayout::Inner), Error);
  CHECK_THROWS_AS(apply_map(identity_choi(2), Matrix(3, 3)), Error);
}
