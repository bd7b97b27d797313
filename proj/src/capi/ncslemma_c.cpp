#include "ncslemma/ncslemma.h"

#include <new>
#include <string>

#include "ncslemma/commands.hpp"
#include "ncslemma/error.hpp"
#include "ncslemma/positivity.hpp"

using namespace ncslemma;

struct ncs_poly {
  NCQuadPoly p;
};

struct ncs_tuple {
  MatTuple x;
};

struct ncs_instance {
  io::Instance in;
  std::string kind;
};

struct ncs_result {
  CommandResult r;
  std::string text;
};

namespace {

thread_local std::string last_error;

ncs_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return NCS_ERR_INVALID_INPUT;
    case ErrorCode::ParseError: return NCS_ERR_PARSE;
    case ErrorCode::ShapeMismatch: return NCS_ERR_SHAPE;
    case ErrorCode::DimensionTooLarge: return NCS_ERR_DIMENSION_TOO_LARGE;
    case ErrorCode::AsymmetricCoefficients: return NCS_ERR_ASYMMETRIC;
    case ErrorCode::SymmetryBroken: return NCS_ERR_SYMMETRY_BROKEN;
    case ErrorCode::NotPSD: return NCS_ERR_NOT_PSD;
    case ErrorCode::NotGloballyPSD: return NCS_ERR_NOT_GLOBALLY_PSD;
    case ErrorCode::SlaterViolated: return NCS_ERR_SLATER;
    case ErrorCode::PreconditionViolated: return NCS_ERR_PRECONDITION;
    case ErrorCode::SplitFailed: return NCS_ERR_SPLIT_FAILED;
    case ErrorCode::VerificationFailed: return NCS_ERR_VERIFICATION_FAILED;
    case ErrorCode::WitnessConstructionFailed: return NCS_ERR_WITNESS;
  }
  return NCS_ERR_INTERNAL;
}

template <typename F>
ncs_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return NCS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NCS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NCS_ERR_INTERNAL;
  }
}

ncs_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return NCS_ERR_NULL_ARGUMENT;
}

SolverOptions solver_options(const ncs_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.tol = o->tol;
  s.tol_strict = o->tol_strict;
  s.budget = static_cast<std::size_t>(o->budget);
  s.seed = o->seed;
  s.threads = o->threads;
  require(s.tol > 0.0 && s.tol_strict > 0.0, ErrorCode::InvalidInput,
          "tolerances must be positive");
  return s;
}

Outcome to_outcome(ncs_outcome o) { return static_cast<Outcome>(o); }

ncs_outcome from_outcome(Outcome o) {
  switch (o) {
    case Outcome::Psd: return NCS_PSD;
    case Outcome::NotPsd: return NCS_NOT_PSD;
    case Outcome::Certificate: return NCS_CERTIFICATE;
    case Outcome::Counterexample: return NCS_COUNTEREXAMPLE;
    case Outcome::Inconclusive: return NCS_INCONCLUSIVE;
    case Outcome::Infeasible: return NCS_INFEASIBLE;
    case Outcome::Verified: return NCS_VERIFIED;
    case Outcome::Rejected: return NCS_REJECTED;
    case Outcome::Evaluated: return NCS_EVALUATED;
  }
  return NCS_INCONCLUSIVE;
}

template <typename F>
ncs_status run_command(ncs_result** out, F&& command) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new ncs_result{command(), {}}; });
}

}  // namespace

extern "C" {

const char* ncs_version(void) { return "1.0.0"; }

const char* ncs_last_error(void) { return last_error.c_str(); }

const char* ncs_status_name(ncs_status s) {
  switch (s) {
    case NCS_OK: return "ok";
    case NCS_ERR_NULL_ARGUMENT: return "null argument";
    case NCS_ERR_INVALID_INPUT: return "invalid input";
    case NCS_ERR_PARSE: return "parse error";
    case NCS_ERR_SHAPE: return "shape mismatch";
    case NCS_ERR_DIMENSION_TOO_LARGE: return "dimension too large";
    case NCS_ERR_ASYMMETRIC: return "asymmetric coefficients";
    case NCS_ERR_SYMMETRY_BROKEN: return "symmetry broken";
    case NCS_ERR_NOT_PSD: return "not PSD";
    case NCS_ERR_NOT_GLOBALLY_PSD: return "not globally PSD";
    case NCS_ERR_SLATER: return "Slater condition violated";
    case NCS_ERR_PRECONDITION: return "precondition violated";
    case NCS_ERR_SPLIT_FAILED: return "rank-one split failed";
    case NCS_ERR_VERIFICATION_FAILED: return "verification failed";
    case NCS_ERR_WITNESS: return "witness construction failed";
    case NCS_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void ncs_options_default(ncs_options* out) {
  if (!out) return;
  const SolverOptions d;
  *out = ncs_options{d.tol, d.tol_strict, d.budget, d.seed, 1};
}

int ncs_exit_code(ncs_status status, ncs_outcome outcome) {
  switch (status) {
    case NCS_OK:
      switch (to_outcome(outcome)) {
        case Outcome::NotPsd: return 10;
        case Outcome::Counterexample: return 11;
        case Outcome::Inconclusive: return 12;
        case Outcome::Infeasible: return 13;
        case Outcome::Rejected: return 5;
        default: return 0;
      }
    case NCS_ERR_NULL_ARGUMENT:
    case NCS_ERR_INVALID_INPUT:
    case NCS_ERR_PARSE:
    case NCS_ERR_ASYMMETRIC:
      return 2;
    case NCS_ERR_SHAPE:
    case NCS_ERR_DIMENSION_TOO_LARGE:
      return 3;
    case NCS_ERR_SLATER:
      return 4;
    case NCS_ERR_VERIFICATION_FAILED:
      return 5;
    default:
      return 1;
  }
}

ncs_status ncs_poly_create(size_t m, size_t q, const double* coefficients, ncs_poly** out) {
  if (!coefficients) return null_arg("coefficients");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    require(m > 0 && q > 0, ErrorCode::InvalidInput, "m and q must be positive");
    const std::size_t d = m * q;
    Matrix a(d, d, std::vector<double>(coefficients, coefficients + d * d));
    const double tol = kSymmetryTol * (1.0 + a.max_abs());
    SymMatrix s;
    try {
      s = SymMatrix::checked(std::move(a), tol);
    } catch (const Error&) {
      fail(ErrorCode::AsymmetricCoefficients, "coefficient matrix is not symmetric");
    }
    *out = new ncs_poly{NCQuadPoly::from_coefficient_matrix(m, q, s)};
  });
}

ncs_status ncs_poly_from_json(const char* text, ncs_poly** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new ncs_poly{io::poly_from_json(io::parse(text))}; });
}

void ncs_poly_free(ncs_poly* p) { delete p; }

ncs_status ncs_poly_dims(const ncs_poly* p, size_t* m, size_t* q) {
  if (!p) return null_arg("p");
  if (m) *m = p->p.m();
  if (q) *q = p->p.q();
  return NCS_OK;
}

ncs_status ncs_poly_coefficients(const ncs_poly* p, double* out) {
  if (!p) return null_arg("p");
  if (!out) return null_arg("out");
  return guarded([&] {
    const SymMatrix a = p->p.coefficient_matrix();
    std::copy(a.matrix().data().begin(), a.matrix().data().end(), out);
  });
}

ncs_status ncs_tuple_create(size_t m, size_t n, int general, const double* data, ncs_tuple** out) {
  if (!data && m * n > 0) return null_arg("data");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < m; ++i)
      mats.emplace_back(n, n, std::vector<double>(data + i * n * n, data + (i + 1) * n * n));
    *out = new ncs_tuple{
        MatTuple::create(n, general ? TupleKind::General : TupleKind::Symmetric, std::move(mats))};
  });
}

void ncs_tuple_free(ncs_tuple* x) { delete x; }

ncs_status ncs_evaluate(const ncs_poly* p, const ncs_tuple* x, double* out) {
  if (!p) return null_arg("p");
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] {
    const SymMatrix v = x->x.kind() == TupleKind::Symmetric ? evaluate(p->p, x->x)
                                                            : evaluate_hereditary(p->p, x->x);
    std::copy(v.matrix().data().begin(), v.matrix().data().end(), out);
  });
}

ncs_status ncs_is_globally_psd(const ncs_poly* p, double tol, int* psd, double* lambda_min) {
  if (!p) return null_arg("p");
  if (!psd) return null_arg("psd");
  return guarded([&] {
    const PositivityReport r = is_globally_psd(p->p, tol);
    *psd = r.psd ? 1 : 0;
    if (lambda_min) *lambda_min = r.eigenvalues.empty() ? 0.0 : r.eigenvalues.back();
  });
}

ncs_status ncs_instance_parse(const char* text, ncs_instance** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    io::Instance in = io::instance_from_json(io::parse(text));
    std::string kind = io::to_string(in.kind);
    *out = new ncs_instance{std::move(in), std::move(kind)};
  });
}

void ncs_instance_free(ncs_instance* in) { delete in; }

const char* ncs_instance_kind(const ncs_instance* in) { return in ? in->kind.c_str() : ""; }

ncs_status ncs_instance_options(const ncs_instance* in, ncs_options* out) {
  if (!in) return null_arg("in");
  if (!out) return null_arg("out");
  const SolverOptions& s = in->in.options;
  *out = ncs_options{s.tol, s.tol_strict, s.budget, s.seed, static_cast<uint32_t>(s.threads)};
  return NCS_OK;
}

ncs_status ncs_check_positivity(const ncs_instance* in, const ncs_options* o, int want_sos,
                                ncs_result** out) {
  if (!in) return null_arg("in");
  return run_command(out, [&] {
    return run_check_positivity(in->in, solver_options(o), want_sos != 0);
  });
}

ncs_status ncs_slemma(const ncs_instance* in, const ncs_options* o, int hereditary,
                      ncs_result** out) {
  if (!in) return null_arg("in");
  return run_command(out, [&] { return run_slemma(in->in, solver_options(o), hereditary != 0); });
}

ncs_status ncs_scalar_slemma(const ncs_instance* in, const ncs_options* o, ncs_result** out) {
  if (!in) return null_arg("in");
  return run_command(out, [&] { return run_scalar_slemma(in->in, solver_options(o)); });
}

ncs_status ncs_homogenize(const ncs_instance* in, const ncs_options* o, ncs_result** out) {
  if (!in) return null_arg("in");
  return run_command(out, [&] { return run_homogenize(in->in, solver_options(o)); });
}

ncs_status ncs_verify(const char* certificate_text, const ncs_instance* in, const ncs_options* o,
                      ncs_result** out) {
  if (!certificate_text) return null_arg("certificate_text");
  if (!in) return null_arg("in");
  return run_command(out, [&] {
    return run_verify(io::parse(certificate_text), in->in, solver_options(o));
  });
}

ncs_status ncs_evaluate_instance(const ncs_instance* in, const ncs_options* o,
                                 const char* tuple_text, int project, ncs_result** out) {
  if (!in) return null_arg("in");
  if (!tuple_text) return null_arg("tuple_text");
  return run_command(out, [&] {
    return run_evaluate(in->in, io::parse(tuple_text), project != 0, solver_options(o));
  });
}

ncs_outcome ncs_result_outcome(const ncs_result* r) {
  return r ? from_outcome(r->r.outcome) : NCS_INCONCLUSIVE;
}

const char* ncs_result_json(ncs_result* r, int indent) {
  if (!r) return "";
  r->text = r->r.output.dump(indent);
  return r->text.c_str();
}

const char* ncs_result_report(const ncs_result* r) { return r ? r->r.report.c_str() : ""; }

void ncs_result_free(ncs_result* r) { delete r; }

}  // extern "C"
