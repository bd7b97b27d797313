#pragma once

#include <string>

#include "ncslemma/serialize.hpp"

namespace ncslemma {

enum class Outcome {
  Psd,
  NotPsd,
  Certificate,
  Counterexample,
  Inconclusive,
  Infeasible,  // homogenization found no PSD coefficient matrix
  Verified,
  Rejected,
  Evaluated,
};

/// Machine-readable output plus a short human report.
struct CommandResult {
  Outcome outcome = Outcome::Inconclusive;
  io::json output;
  std::string report;
};

CommandResult run_check_positivity(const io::Instance& in, const SolverOptions& o, bool want_sos);
CommandResult run_slemma(const io::Instance& in, const SolverOptions& o, bool hereditary);
CommandResult run_scalar_slemma(const io::Instance& in, const SolverOptions& o);
CommandResult run_homogenize(const io::Instance& in, const SolverOptions& o);
CommandResult run_verify(const io::json& certificate, const io::Instance& in, const SolverOptions& o);
/// f (and g) at the tuple; with project set the tuple's "Q" compresses the
/// evaluation to (Id (x) Q^T) f(X) (Id (x) Q).
CommandResult run_evaluate(const io::Instance& in, const io::json& tuple, bool project,
                           const SolverOptions& o);

}  // namespace ncslemma
