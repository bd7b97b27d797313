#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ncslemma/cpmap.hpp"
#include "ncslemma/linalg.hpp"
#include "ncslemma/ncpoly.hpp"
#include "ncslemma/positivity.hpp"
#include "ncslemma/slemma.hpp"

namespace ncslemma::io {

using json = nlohmann::json;

inline constexpr const char* kFormat = "ncslemma/1";

// All parse failures throw Error(ParseError); shape problems ShapeMismatch.

json to_json(const Matrix& m);
json to_json(const SymMatrix& m);
json to_json(const std::vector<double>& v);
json to_json(const NCQuadPoly& p);
json to_json(const MatTuple& x);
json to_json(const ChoiMatrix& j);
json to_json(const SolverOptions& o);
json to_json(const CpCertificate& c, const SolverOptions& o, std::size_t reconcile_k);
json to_json(const Counterexample& c, const SolverOptions& o);
json to_json(const HereditaryCounterexample& c, const SolverOptions& o);
json to_json(const SosFactor& s);

Matrix matrix_from_json(const json& j, const std::string& what);
std::vector<double> vector_from_json(const json& j, const std::string& what);
/// {"m", "q", "blocks": [[A_11, ..., A_1m], ...]} or {"m", "q", "A": mq x mq}.
NCQuadPoly poly_from_json(const json& j);
/// {"n", "kind": "symmetric" | "general", "mats": [...]}.
MatTuple tuple_from_json(const json& j);
ChoiMatrix choi_from_json(const json& j);
/// Missing fields keep their defaults.
SolverOptions options_from_json(const json& j);
CpCertificate certificate_from_json(const json& j);

enum class InstanceKind { Positivity, SLemma, SLemmaHereditary, ScalarSLemma, Homogenize };

std::string to_string(InstanceKind k);

struct Instance {
  InstanceKind kind = InstanceKind::Positivity;
  NCQuadPoly f;  // homogeneous part for Homogenize
  NCQuadPoly g;
  std::optional<MatTuple> slater;
  std::optional<AffinePoly> affine;     // Homogenize
  SymMatrix scalar_a, scalar_b;         // ScalarSLemma
  std::vector<double> scalar_slater;
  SolverOptions options;
};

Instance instance_from_json(const json& j);

/// Parses text, mapping nlohmann errors to ParseError.
json parse(const std::string& text);

}  // namespace ncslemma::io
