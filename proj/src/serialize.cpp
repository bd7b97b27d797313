#include "ncslemma/serialize.hpp"

#include <cmath>

#include "ncslemma/error.hpp"

namespace ncslemma::io {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing field \"" + key + "\"");
  return *it;
}

std::size_t size_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    bad(where + ": \"" + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(what + " is not finite");
  return d;
}

InstanceKind kind_from_string(const std::string& s) {
  if (s == "positivity") return InstanceKind::Positivity;
  if (s == "slemma") return InstanceKind::SLemma;
  if (s == "slemma-hereditary") return InstanceKind::SLemmaHereditary;
  if (s == "scalar-slemma") return InstanceKind::ScalarSLemma;
  if (s == "homogenize") return InstanceKind::Homogenize;
  bad("unknown instance kind \"" + s + "\"");
}

SymMatrix sym_from_json(const json& j, const std::string& what) {
  Matrix m = matrix_from_json(j, what);
  require(m.is_square(), ErrorCode::ShapeMismatch, what + " must be square");
  const double tol = kSymmetryTol * (1.0 + m.max_abs());
  try {
    return SymMatrix::checked(std::move(m), tol);
  } catch (const Error&) {
    fail(ErrorCode::AsymmetricCoefficients, what + " is not symmetric");
  }
}

}  // namespace

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const SymMatrix& m) { return to_json(m.matrix()); }

json to_json(const std::vector<double>& v) { return json(v); }

json to_json(const NCQuadPoly& p) {
  json blocks = json::array();
  for (std::size_t i = 0; i < p.m(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < p.m(); ++j) row.push_back(to_json(p.block(i, j)));
    blocks.push_back(std::move(row));
  }
  return {{"m", p.m()}, {"q", p.q()}, {"blocks", std::move(blocks)}};
}

json to_json(const MatTuple& x) {
  json mats = json::array();
  for (const auto& m : x.mats()) mats.push_back(to_json(m));
  return {{"n", x.n()},
          {"kind", x.kind() == TupleKind::Symmetric ? "symmetric" : "general"},
          {"mats", std::move(mats)}};
}

json to_json(const ChoiMatrix& j) { return {{"s", j.s()}, {"t", j.t()}, {"J", to_json(j.J())}}; }

json to_json(const SolverOptions& o) {
  return {{"tol", o.tol}, {"tol_strict", o.tol_strict}, {"budget", o.budget}, {"seed", o.seed}};
}

json to_json(const CpCertificate& c, const SolverOptions& o, std::size_t reconcile_k) {
  return {{"format", kFormat},
          {"type", "cp-certificate"},
          {"J", to_json(c.J)},
          {"scale", c.scale},
          {"residual_lambda_min", c.residual_lambda_min},
          {"reconcile_k", reconcile_k},
          {"options", to_json(o)}};
}

json to_json(const Counterexample& c, const SolverOptions& o) {
  return {{"format", kFormat},
          {"type", "counterexample"},
          {"M", to_json(c.M)},
          {"rank", c.rank},
          {"X", to_json(c.X)},
          {"P", to_json(c.P)},
          {"E", to_json(c.E)},
          {"violation", c.violation},
          {"compressed_g_lambda_min", c.compressed_g_lambda_min},
          {"block_error", c.block_error},
          {"options", to_json(o)}};
}

json to_json(const HereditaryCounterexample& c, const SolverOptions& o) {
  return {{"format", kFormat},
          {"type", "hereditary-counterexample"},
          {"M", to_json(c.M)},
          {"rank", c.rank},
          {"X", to_json(c.X)},
          {"E", to_json(c.E)},
          {"violation", c.violation},
          {"g_lambda_min", c.g_lambda_min},
          {"options", to_json(o)}};
}

json to_json(const SosFactor& s) {
  json w = json::array();
  for (const auto& m : s.W) w.push_back(to_json(m));
  return {{"m", s.m}, {"q", s.q}, {"rank", s.rank}, {"W", std::move(w)}};
}

// ---------------------------------------------------------------------------

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  if (rows > 0) {
    if (!j[0].is_array()) bad(what + " must be an array of rows");
    cols = j[0].size();
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(what + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = number(j[r][c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

std::vector<double> vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  std::vector<double> v;
  for (std::size_t k = 0; k < j.size(); ++k) v.push_back(number(j[k], what));
  return v;
}

NCQuadPoly poly_from_json(const json& j) {
  const std::size_t m = size_field(j, "m", "polynomial");
  const std::size_t q = size_field(j, "q", "polynomial");
  if (m == 0 || q == 0) bad("polynomial: m and q must be positive");
  if (j.contains("A")) {
    const SymMatrix a = sym_from_json(j["A"], "coefficient matrix");
    require(a.dim() == m * q, ErrorCode::ShapeMismatch,
            "coefficient matrix must be " + std::to_string(m * q) + " x " + std::to_string(m * q));
    return NCQuadPoly::from_coefficient_matrix(m, q, a);
  }
  const json& b = field(j, "blocks", "polynomial");
  if (!b.is_array() || b.size() != m) bad("polynomial: blocks must be an m x m array of matrices");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < m; ++i) {
    if (!b[i].is_array() || b[i].size() != m)
      bad("polynomial: blocks must be an m x m array of matrices");
    for (std::size_t k = 0; k < m; ++k)
      blocks.push_back(
          matrix_from_json(b[i][k], "block (" + std::to_string(i) + "," + std::to_string(k) + ")"));
  }
  return NCQuadPoly::create(m, q, std::move(blocks));
}

MatTuple tuple_from_json(const json& j) {
  const std::size_t n = size_field(j, "n", "tuple");
  TupleKind kind = TupleKind::Symmetric;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("tuple: kind must be a string");
    const auto k = j["kind"].get<std::string>();
    if (k == "general") kind = TupleKind::General;
    else if (k != "symmetric") bad("tuple: kind must be \"symmetric\" or \"general\"");
  }
  const json& mats = field(j, "mats", "tuple");
  if (!mats.is_array()) bad("tuple: mats must be an array");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < mats.size(); ++i)
    out.push_back(matrix_from_json(mats[i], "tuple matrix " + std::to_string(i)));
  return MatTuple::create(n, kind, std::move(out));
}

ChoiMatrix choi_from_json(const json& j) {
  const std::size_t s = size_field(j, "s", "Choi matrix");
  const std::size_t t = size_field(j, "t", "Choi matrix");
  return ChoiMatrix::create(s, t, sym_from_json(field(j, "J", "Choi matrix"), "J"));
}

SolverOptions options_from_json(const json& j) {
  SolverOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) bad("options must be an object");
  if (j.contains("tol")) o.tol = number(j["tol"], "tol");
  if (j.contains("tol_strict")) o.tol_strict = number(j["tol_strict"], "tol_strict");
  if (j.contains("budget")) o.budget = size_field(j, "budget", "options");
  if (j.contains("seed")) o.seed = size_field(j, "seed", "options");
  if (!(o.tol > 0.0) || !(o.tol_strict > 0.0)) bad("tolerances must be positive");
  return o;
}

CpCertificate certificate_from_json(const json& j) {
  const json& type = field(j, "type", "certificate");
  if (!type.is_string() || type.get<std::string>() != "cp-certificate")
    bad("certificate: type must be \"cp-certificate\"");
  CpCertificate c;
  c.J = choi_from_json(field(j, "J", "certificate"));
  c.scale = number(field(j, "scale", "certificate"), "scale");
  if (j.contains("residual_lambda_min"))
    c.residual_lambda_min = number(j["residual_lambda_min"], "residual_lambda_min");
  return c;
}

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::Positivity: return "positivity";
    case InstanceKind::SLemma: return "slemma";
    case InstanceKind::SLemmaHereditary: return "slemma-hereditary";
    case InstanceKind::ScalarSLemma: return "scalar-slemma";
    case InstanceKind::Homogenize: return "homogenize";
  }
  return "unknown";
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) bad("instance must be a JSON object");
  if (j.contains("format") && j["format"] != kFormat)
    bad("unsupported format, expected \"" + std::string(kFormat) + "\"");
  const json& kind = field(j, "kind", "instance");
  if (!kind.is_string()) bad("instance: kind must be a string");

  Instance in;
  in.kind = kind_from_string(kind.get<std::string>());
  in.options = options_from_json(j.value("options", json()));

  switch (in.kind) {
    case InstanceKind::Positivity:
      in.f = poly_from_json(field(j, "f", "instance"));
      break;
    case InstanceKind::SLemma:
    case InstanceKind::SLemmaHereditary: {
      in.f = poly_from_json(field(j, "f", "instance"));
      in.g = poly_from_json(field(j, "g", "instance"));
      require(in.f.m() == in.g.m(), ErrorCode::ShapeMismatch,
              "f has " + std::to_string(in.f.m()) + " variables, g has " +
                  std::to_string(in.g.m()));
      // optional here so that evaluate works without one; slemma insists
      if (j.contains("slater")) {
        in.slater = tuple_from_json(j["slater"]);
        require(in.slater->m() == in.g.m(), ErrorCode::ShapeMismatch,
                "slater point has " + std::to_string(in.slater->m()) + " matrices, expected " +
                    std::to_string(in.g.m()));
        if (in.kind == InstanceKind::SLemma && in.slater->kind() != TupleKind::Symmetric)
          bad("slemma needs a symmetric slater tuple");
      }
      break;
    }
    case InstanceKind::ScalarSLemma: {
      in.scalar_a = sym_from_json(field(field(j, "f", "instance"), "A", "f"), "f.A");
      in.scalar_b = sym_from_json(field(field(j, "g", "instance"), "A", "g"), "g.A");
      in.scalar_slater = vector_from_json(field(j, "slater", "instance"), "slater");
      require(in.scalar_a.dim() == in.scalar_b.dim() &&
                  in.scalar_slater.size() == in.scalar_a.dim(),
              ErrorCode::ShapeMismatch, "scalar instance dimensions disagree");
      break;
    }
    case InstanceKind::Homogenize: {
      const json& f = field(j, "f", "instance");
      in.f = poly_from_json(f);
      const json& lin = field(f, "linear", "f");
      if (!lin.is_array()) bad("f.linear must be an array of matrices");
      std::vector<Matrix> linear;
      for (std::size_t i = 0; i < lin.size(); ++i)
        linear.push_back(matrix_from_json(lin[i], "linear coefficient " + std::to_string(i)));
      Matrix constant = matrix_from_json(field(f, "constant", "f"), "constant coefficient");
      in.affine = AffinePoly::create(in.f, std::move(linear), std::move(constant));
      break;
    }
  }
  return in;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace ncslemma::io
