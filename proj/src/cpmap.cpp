#include "ncslemma/cpmap.hpp"

#include <cmath>
#include <string>

#include "ncslemma/error.hpp"

namespace ncslemma {

ChoiMatrix ChoiMatrix::create(std::size_t s, std::size_t t, SymMatrix j) {
  require(s >= 1 && t >= 1, ErrorCode::ShapeMismatch, "Choi dimensions must be positive");
  require(j.dim() == s * t, ErrorCode::ShapeMismatch,
          "Choi matrix must be " + std::to_string(s * t) + "x" + std::to_string(s * t));
  return ChoiMatrix(s, t, std::move(j));
}

ChoiMatrix choi_from_map(std::size_t s, std::size_t t,
                         const std::function<Matrix(const Matrix&)>& phi) {
  Matrix j(s * t, s * t);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      Matrix unit(s, s);
      unit(a, b) = 1.0;
      const Matrix image = phi(unit);
      require(image.rows() == t && image.cols() == t, ErrorCode::ShapeMismatch,
              "map output is not " + std::to_string(t) + "x" + std::to_string(t));
      for (std::size_t c = 0; c < t; ++c)
        for (std::size_t d = 0; d < t; ++d) j(c * s + a, d * s + b) = image(c, d);
    }
  return ChoiMatrix::create(s, t, SymMatrix::checked(std::move(j), 1e-10));
}

ChoiMatrix identity_choi(std::size_t q) {
  return choi_from_map(q, q, [](const Matrix& m) { return m; });
}

Matrix apply_map(const ChoiMatrix& j, const Matrix& m) {
  const std::size_t s = j.s(), t = j.t();
  require(m.rows() == s && m.cols() == s, ErrorCode::ShapeMismatch,
          "map input must be " + std::to_string(s) + "x" + std::to_string(s));
  const Matrix& jm = j.J();
  Matrix out(t, t);
  for (std::size_t c = 0; c < t; ++c)
    for (std::size_t d = 0; d < t; ++d) {
      double acc = 0.0;
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) acc += jm(c * s + a, d * s + b) * m(a, b);
      out(c, d) = acc;
    }
  return out;
}

SymMatrix apply_map(const ChoiMatrix& j, const SymMatrix& m) {
  return SymMatrix::symmetrized(apply_map(j, m.matrix()));
}

bool is_completely_positive(const ChoiMatrix& j, double tol) { return is_psd(j.J(), tol); }

Matrix apply_map_blockwise(const ChoiMatrix& j, const Matrix& b, BlockLayout layout) {
  const std::size_t s = j.s(), t = j.t();
  require(b.is_square() && b.rows() % s == 0, ErrorCode::ShapeMismatch,
          "block matrix size is not a multiple of " + std::to_string(s));
  const std::size_t k = b.rows() / s;
  Matrix out(t * k, t * k);
  if (layout == BlockLayout::Inner) {
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t r = 0; r < k; ++r)
        out.set_block(p * t, r * t, apply_map(j, b.block(p * s, r * s, s, s)));
    return out;
  }
  const Matrix& jm = j.J();
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t bb = 0; bb < s; ++bb) {
      const Matrix blk = b.block(a * k, bb * k, k, k);
      for (std::size_t c = 0; c < t; ++c)
        for (std::size_t d = 0; d < t; ++d) {
          const double w = jm(c * s + a, d * s + bb);
          if (w != 0.0) out.add_block(c * k, d * k, blk, w);
        }
    }
  return out;
}

NCQuadPoly apply_map_to_poly(const ChoiMatrix& j, const NCQuadPoly& g) {
  require(j.s() == g.q(), ErrorCode::ShapeMismatch, "map input dimension differs from g's q");
  const std::size_t m = g.m();
  std::vector<Matrix> blocks;
  blocks.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) blocks.push_back(apply_map(j, g.block(i, k)));
  double scale = 1.0;
  for (const auto& b : blocks) scale = std::max(scale, b.max_abs());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const Matrix diff = blocks[i * m + k] - blocks[k * m + i].transpose();
      require(diff.max_abs() <= 1e-10 * scale, ErrorCode::SymmetryBroken,
              "mapped blocks (" + std::to_string(i) + "," + std::to_string(k) +
                  ") lost symmetry");
      if (k < i) blocks[i * m + k] = blocks[k * m + i].transpose();
    }
  return NCQuadPoly::create(m, j.t(), std::move(blocks));
}

Matrix shuffle(std::size_t q, std::size_t m) {
  Matrix u(q * m, q * m);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < m; ++i) u(j * m + i, i * q + j) = 1.0;
  return u;
}

ChoiMatrix rearrange(const NCQuadPoly& p) {
  const std::size_t m = p.m(), q = p.q();
  Matrix a(m * q, m * q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const Matrix& blk = p.block(i, k);
      for (std::size_t r = 0; r < q; ++r)
        for (std::size_t c = 0; c < q; ++c) a(r * m + i, c * m + k) = blk(r, c);
    }
  return ChoiMatrix::create(m, q, SymMatrix::checked(std::move(a)));
}

SymMatrix gram(const MatTuple& x) {
  const std::size_t m = x.m(), n = x.n();
  const bool hereditary = x.kind() == TupleKind::General;
  Matrix out(m * n, m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      out.set_block(i * n, k * n, x[i] * (hereditary ? x[k].transpose() : x[k]));
  return SymMatrix::symmetrized(out);
}

SymMatrix map_coefficients(const SymMatrix& k, const NCQuadPoly& g) {
  const std::size_t q = g.q(), m = g.m();
  require(k.dim() == q * q, ErrorCode::ShapeMismatch, "Choi matrix must be q^2 x q^2");
  const ChoiMatrix choi = ChoiMatrix::create(q, q, k);
  Matrix out(m * q, m * q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const Matrix img = apply_map(choi, g.block(i, j));
      out.set_block(i * q, j * q, img);
      if (j != i) out.set_block(j * q, i * q, img.transpose());
    }
  return SymMatrix::symmetrized(out);
}

SymMatrix map_coefficients_adjoint(const SymMatrix& w, const NCQuadPoly& g) {
  const std::size_t q = g.q(), m = g.m();
  require(w.dim() == m * q, ErrorCode::ShapeMismatch, "dual variable must be mq x mq");
  Matrix out(q * q, q * q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Matrix& b = g.block(i, j);
      for (std::size_t c = 0; c < q; ++c)
        for (std::size_t d = 0; d < q; ++d) {
          const double wcd = w(i * q + c, j * q + d);
          if (wcd != 0.0) out.add_block(c * q, d * q, b, wcd);
        }
    }
  return SymMatrix::symmetrized(out);
}

}  // namespace ncslemma
