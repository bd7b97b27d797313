#include "ncslemma/commands.hpp"

#include <sstream>

#include "ncslemma/error.hpp"
#include "ncslemma/positivity.hpp"

namespace ncslemma {

namespace {

using io::json;
using io::to_json;

const NCQuadPoly& primary_poly(const io::Instance& in, NCQuadPoly& scratch) {
  if (in.kind == io::InstanceKind::ScalarSLemma) {
    scratch = NCQuadPoly::from_coefficient_matrix(in.scalar_a.dim(), 1, in.scalar_a);
    return scratch;
  }
  return in.f;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

json base(const char* type, const SolverOptions& o) {
  return {{"format", io::kFormat}, {"type", type}, {"options", to_json(o)}};
}

}  // namespace

CommandResult run_check_positivity(const io::Instance& in, const SolverOptions& o, bool want_sos) {
  NCQuadPoly scratch;
  const NCQuadPoly& f = primary_poly(in, scratch);
  const PositivityReport rep = is_globally_psd(f, o.tol);

  CommandResult r;
  r.output = base("positivity", o);
  r.output["eigenvalues"] = to_json(rep.eigenvalues);
  r.output["lambda_min"] = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.back();
  if (rep.psd) {
    r.outcome = Outcome::Psd;
    r.output["verdict"] = "psd";
    r.report = "coefficient matrix is PSD (lambda_min " + fmt(r.output["lambda_min"]) +
               "): f(X) >= 0 for every symmetric tuple";
    if (want_sos) {
      r.output["sos"] = to_json(sos_factor(f, o.tol));
      r.report += "\nSOS factor of rank " + std::to_string(r.output["sos"]["rank"].get<int>());
    }
  } else {
    r.outcome = Outcome::NotPsd;
    r.output["verdict"] = "not-psd";
    r.output["witness"] = {{"X", to_json(*rep.witness_point)},
                           {"v", to_json(rep.witness_vector)},
                           {"value", rep.witness_value}};
    r.report = "not PSD: v^T f(X) v = " + fmt(rep.witness_value) + " at a " +
               std::to_string(rep.witness_point->n()) + " x " +
               std::to_string(rep.witness_point->n()) + " witness tuple";
  }
  return r;
}

CommandResult run_slemma(const io::Instance& in, const SolverOptions& o, bool hereditary) {
  if (in.kind != io::InstanceKind::SLemma && in.kind != io::InstanceKind::SLemmaHereditary)
    fail(ErrorCode::ParseError, "instance kind " + io::to_string(in.kind) + " has no f, g pair");
  if (!in.slater) fail(ErrorCode::ParseError, "instance has no slater point");
  if (!hereditary && in.slater->kind() != TupleKind::Symmetric)
    fail(ErrorCode::ParseError, "slemma needs a symmetric slater tuple");

  const Decision d = hereditary ? decide_hereditary(in.f, in.g, *in.slater, o)
                                : decide(in.f, in.g, *in.slater, o);
  CommandResult r;
  std::ostringstream rep;
  rep << "lambda_min(g(slater)) = " << fmt(d.slater_lambda_min);
  if (d.problem.k > 1) rep << "; g replaced by its " << d.problem.k << "-fold direct sum";
  rep << '\n';

  switch (d.verdict) {
    case Verdict::Certificate:
      r.outcome = Outcome::Certificate;
      r.output = to_json(*d.certificate, o, d.problem.k);
      rep << "CP certificate: f - (phi (x) 1) g is globally PSD, Choi trace "
          << fmt(d.certificate->scale) << ", residual lambda_min "
          << fmt(d.certificate->residual_lambda_min);
      break;
    case Verdict::Counterexample:
      r.outcome = Outcome::Counterexample;
      if (hereditary) {
        r.output = to_json(*d.hereditary, o);
        rep << "counterexample: g(X) >= 0 (lambda_min " << fmt(d.hereditary->g_lambda_min)
            << ") but E^T f(X) E = " << fmt(d.hereditary->violation) << ", n = "
            << d.hereditary->X.n();
      } else {
        r.output = to_json(*d.counterexample, o);
        rep << "counterexample: compressed g(X) >= 0 (lambda_min "
            << fmt(d.counterexample->compressed_g_lambda_min)
            << ") but E^T (Id (x) P) f(X) (Id (x) P) E = " << fmt(d.counterexample->violation)
            << ", n = " << d.counterexample->X.n();
      }
      break;
    case Verdict::Inconclusive:
      r.outcome = Outcome::Inconclusive;
      r.output = base("inconclusive", o);
      r.output["certify"] = {{"best_value", d.certify_log.best_value},
                             {"upper_bound", d.certify_log.upper_bound},
                             {"trace_cap", d.certify_log.trace_cap},
                             {"iterations", d.certify_log.iterations}};
      r.output["separator"] = {{"best_value", d.separator_log.best_value},
                               {"upper_bound", d.separator_log.upper_bound},
                               {"iterations", d.separator_log.iterations}};
      if (!d.note.empty()) r.output["note"] = d.note;
      rep << "inconclusive: best residual lambda_min " << fmt(d.certify_log.best_value)
          << ", best separator margin " << fmt(d.separator_log.best_value);
      if (!d.note.empty()) rep << "\n" << d.note;
      break;
  }
  r.output["verdict"] = d.verdict == Verdict::Certificate       ? "certificate"
                        : d.verdict == Verdict::Counterexample ? "counterexample"
                                                               : "inconclusive";
  r.output["slater_lambda_min"] = d.slater_lambda_min;
  r.report = rep.str();
  return r;
}

CommandResult run_scalar_slemma(const io::Instance& in, const SolverOptions& o) {
  if (in.kind != io::InstanceKind::ScalarSLemma)
    fail(ErrorCode::ParseError, "scalar-slemma needs a scalar-slemma instance");
  const ScalarOptions so{o.tol, o.tol_strict, o.budget, o.seed};
  const auto s = scalar_slemma(in.scalar_a, in.scalar_b, in.scalar_slater, so);

  CommandResult r;
  switch (s.outcome) {
    case ScalarOutcome::Certificate:
      r.outcome = Outcome::Certificate;
      r.output = base("scalar-certificate", o);
      r.output["verdict"] = "certificate";
      r.output["lambda"] = s.lambda;
      r.output["lambda_min"] = s.best_value;
      r.report = "A - lambda B >= 0 with lambda = " + fmt(s.lambda) + " (lambda_min " +
                 fmt(s.best_value) + ")";
      break;
    case ScalarOutcome::Counterexample:
      r.outcome = Outcome::Counterexample;
      r.output = base("scalar-counterexample", o);
      r.output["verdict"] = "counterexample";
      r.output["x"] = to_json(s.x);
      r.output["xAx"] = s.x_a;
      r.output["xBx"] = s.x_b;
      r.report = "x^T B x = " + fmt(s.x_b) + " but x^T A x = " + fmt(s.x_a);
      break;
    case ScalarOutcome::Inconclusive:
      r.outcome = Outcome::Inconclusive;
      r.output = base("inconclusive", o);
      r.output["verdict"] = "inconclusive";
      r.output["best_value"] = s.best_value;
      r.output["bracket_hi"] = s.bracket_hi;
      r.report = "inconclusive: max over lambda of lambda_min(A - lambda B) = " +
                 fmt(s.best_value) + " lies between the two thresholds";
      break;
  }
  return r;
}

CommandResult run_homogenize(const io::Instance& in, const SolverOptions& o) {
  if (!in.affine) fail(ErrorCode::ParseError, "homogenize needs f with linear and constant terms");
  const HomogenizationResult h = homogenize(*in.affine, o);

  CommandResult r;
  r.output = base("homogenization", o);
  json hs = json::array();
  for (const auto& m : h.H) hs.push_back(to_json(m));
  r.output["H"] = std::move(hs);
  r.output["h"] = to_json(h.h);
  r.output["coefficient_matrix"] = to_json(h.h.coefficient_matrix());
  r.output["lambda_min"] = h.lambda_min;
  r.output["success"] = h.success;
  r.output["verdict"] = h.success ? "psd" : "infeasible";
  r.outcome = h.success ? Outcome::Psd : Outcome::Infeasible;
  r.report = h.success ? "homogenized polynomial has a PSD coefficient matrix (lambda_min " +
                             fmt(h.lambda_min) + ")"
                       : "no homogenization with PSD coefficient matrix found (best lambda_min " +
                             fmt(h.lambda_min) + ")";
  return r;
}

CommandResult run_verify(const json& certificate, const io::Instance& in, const SolverOptions& o) {
  if (in.kind != io::InstanceKind::SLemma && in.kind != io::InstanceKind::SLemmaHereditary)
    fail(ErrorCode::ParseError, "verify needs an slemma instance");
  const CpCertificate cert = io::certificate_from_json(certificate);
  std::string why;
  const bool ok = verify_certificate(cert, in.f, in.g, o, &why);

  CommandResult r;
  r.outcome = ok ? Outcome::Verified : Outcome::Rejected;
  r.output = base("verification", o);
  r.output["valid"] = ok;
  r.output["verdict"] = ok ? "verified" : "rejected";
  if (!ok) r.output["reason"] = why;
  r.report = ok ? "certificate verified" : "certificate rejected: " + why;
  return r;
}

CommandResult run_evaluate(const io::Instance& in, const json& tuple, bool project,
                           const SolverOptions& o) {
  if (in.kind == io::InstanceKind::ScalarSLemma)
    fail(ErrorCode::ParseError, "evaluate needs a matrix polynomial instance");
  const MatTuple x = io::tuple_from_json(tuple);
  require(x.m() == in.f.m(), ErrorCode::ShapeMismatch,
          "tuple has " + std::to_string(x.m()) + " matrices, f has " + std::to_string(in.f.m()) +
              " variables");
  std::optional<Matrix> q;
  if (project) {
    if (!tuple.contains("Q")) fail(ErrorCode::ParseError, "--project needs a \"Q\" matrix");
    q = io::matrix_from_json(tuple["Q"], "Q");
    require(q->rows() == x.n(), ErrorCode::ShapeMismatch, "Q must have n rows");
  }

  auto eval = [&](const NCQuadPoly& p) -> SymMatrix {
    if (q) return evaluate_compressed(p, x, *q);
    return x.kind() == TupleKind::Symmetric ? evaluate(p, x) : evaluate_hereditary(p, x);
  };

  CommandResult r;
  r.outcome = Outcome::Evaluated;
  r.output = base("evaluation", o);
  r.output["projected"] = project;
  std::ostringstream rep;
  if (in.kind == io::InstanceKind::Homogenize) {
    Matrix fx = evaluate_affine(*in.affine, x);
    if (q) {
      const Matrix lift = kron(Matrix::identity(in.f.q()), *q);
      fx = lift.transpose() * fx * lift;
    }
    const SymMatrix s = SymMatrix::symmetrized(fx);
    r.output["f"] = to_json(s);
    r.output["f_lambda_min"] = lambda_min(s);
    rep << "lambda_min(f(X)) = " << fmt(lambda_min(s));
  } else {
    const SymMatrix fx = eval(in.f);
    r.output["f"] = to_json(fx);
    r.output["f_lambda_min"] = lambda_min(fx);
    rep << "lambda_min(f(X)) = " << fmt(lambda_min(fx));
    if (in.kind == io::InstanceKind::SLemma || in.kind == io::InstanceKind::SLemmaHereditary) {
      const SymMatrix gx = eval(in.g);
      r.output["g"] = to_json(gx);
      r.output["g_lambda_min"] = lambda_min(gx);
      rep << ", lambda_min(g(X)) = " << fmt(lambda_min(gx));
    }
  }
  r.report = rep.str();
  return r;
}

}  // namespace ncslemma
