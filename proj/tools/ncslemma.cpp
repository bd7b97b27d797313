#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ncslemma/ncslemma.h"

namespace {

struct Flags {
  std::optional<double> tol, tol_strict;
  std::optional<std::uint64_t> budget, seed;
  bool sos = false;
  bool project = false;
  std::string out;
  std::vector<std::string> paths;
};

struct InstanceDeleter {
  void operator()(ncs_instance* p) const { ncs_instance_free(p); }
};
struct ResultDeleter {
  void operator()(ncs_result* p) const { ncs_result_free(p); }
};
using InstancePtr = std::unique_ptr<ncs_instance, InstanceDeleter>;
using ResultPtr = std::unique_ptr<ncs_result, ResultDeleter>;

std::string json_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '"': o += "\\\""; break;
      case '\\': o += "\\\\"; break;
      case '\n': o += "\\n"; break;
      case '\t': o += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) o += ' ';
        else o += c;
    }
  }
  return o;
}

// Errors still produce JSON on stdout.
int report_error(ncs_status status, const std::string& message) {
  const int code = ncs_exit_code(status, NCS_INCONCLUSIVE);
  std::cout << "{\"format\":\"ncslemma/1\",\"type\":\"error\",\"status\":\""
            << json_escape(ncs_status_name(status)) << "\",\"message\":\"" << json_escape(message)
            << "\",\"exit_code\":" << code << "}\n";
  std::cerr << "error: " << message << "\n";
  return code;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ncs_options merged_options(const ncs_instance* in, const Flags& f) {
  ncs_options o;
  ncs_options_default(&o);
  if (in) ncs_instance_options(in, &o);
  if (f.tol) o.tol = *f.tol;
  if (f.tol_strict) o.tol_strict = *f.tol_strict;
  if (f.budget) o.budget = *f.budget;
  if (f.seed) o.seed = *f.seed;
  o.threads = 1;
  if (const char* env = std::getenv("NCSLEMMA_THREADS")) {
    const long t = std::strtol(env, nullptr, 10);
    if (t > 0) o.threads = static_cast<std::uint32_t>(t);
  }
  return o;
}

int finish(ncs_status status, ncs_result* raw, const Flags& f) {
  ResultPtr r(raw);
  if (status != NCS_OK) return report_error(status, ncs_last_error());
  const std::string text = ncs_result_json(r.get(), 2);
  std::cout << text << "\n";
  if (!f.out.empty()) {
    std::ofstream out(f.out);
    if (!out || !(out << text << "\n"))
      return report_error(NCS_ERR_INVALID_INPUT, "cannot write " + f.out);
  }
  std::cerr << ncs_result_report(r.get()) << "\n";
  return ncs_exit_code(NCS_OK, ncs_result_outcome(r.get()));
}

int with_instance(const std::string& path, const Flags& f,
                  const std::function<ncs_status(const ncs_instance*, const ncs_options*,
                                                 ncs_result**)>& run) {
  const auto text = slurp(path);
  if (!text) return report_error(NCS_ERR_PARSE, "cannot read " + path);
  ncs_instance* raw = nullptr;
  const ncs_status st = ncs_instance_parse(text->c_str(), &raw);
  InstancePtr in(raw);
  if (st != NCS_OK) return report_error(st, path + ": " + ncs_last_error());
  const ncs_options o = merged_options(in.get(), f);
  ncs_result* res = nullptr;
  const ncs_status rs = run(in.get(), &o, &res);
  return finish(rs, res, f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global positivity and S-lemma certificates for quadratic matrix polynomials"};
  app.require_subcommand(1);
  Flags f;
  auto add_common = [&](CLI::App* sub, const std::string& paths_help, std::size_t npaths) {
    sub->add_option("--tol", f.tol, "certificate acceptance tolerance (default 1e-8)");
    sub->add_option("--tol-strict", f.tol_strict, "counterexample strictness (default 1e-6)");
    sub->add_option("--budget", f.budget, "iterations per search (default 5000)");
    sub->add_option("--seed", f.seed, "random seed (default 42)");
    sub->add_option("-o,--output", f.out, "also write the JSON result here");
    sub->add_option("paths", f.paths, paths_help)->required()->expected(static_cast<int>(npaths));
  };

  auto* pos = app.add_subcommand("check-positivity", "decide global PSD-ness of f");
  add_common(pos, "instance file", 1);
  pos->add_flag("--sos", f.sos, "emit an SOS factor when f is PSD");
  auto* sl = app.add_subcommand("slemma", "CP certificate or counterexample for g >= 0 => f >= 0");
  add_common(sl, "instance file", 1);
  auto* her = app.add_subcommand("slemma-hereditary", "hereditary variant of slemma");
  add_common(her, "instance file", 1);
  auto* sc = app.add_subcommand("scalar-slemma", "commutative S-lemma");
  add_common(sc, "instance file", 1);
  auto* hom = app.add_subcommand("homogenize", "homogenize f with a PSD coefficient matrix");
  add_common(hom, "instance file", 1);
  auto* ver = app.add_subcommand("verify", "re-check a certificate against an instance");
  add_common(ver, "certificate file, instance file", 2);
  auto* ev = app.add_subcommand("evaluate", "evaluate f (and g) at a tuple");
  add_common(ev, "instance file, tuple file", 2);
  ev->add_flag("--project", f.project, "compress with the tuple's Q");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error(NCS_ERR_PARSE, e.what());
  }

  if (pos->parsed())
    return with_instance(f.paths[0], f, [&](auto in, auto o, auto out) {
      return ncs_check_positivity(in, o, f.sos ? 1 : 0, out);
    });
  if (sl->parsed() || her->parsed()) {
    const int hereditary = her->parsed() ? 1 : 0;
    return with_instance(f.paths[0], f, [&](auto in, auto o, auto out) {
      return ncs_slemma(in, o, hereditary, out);
    });
  }
  if (sc->parsed()) return with_instance(f.paths[0], f, ncs_scalar_slemma);
  if (hom->parsed()) return with_instance(f.paths[0], f, ncs_homogenize);
  if (ver->parsed()) {
    const auto cert = slurp(f.paths[0]);
    if (!cert) return report_error(NCS_ERR_PARSE, "cannot read " + f.paths[0]);
    return with_instance(f.paths[1], f, [&](auto in, auto o, auto out) {
      return ncs_verify(cert->c_str(), in, o, out);
    });
  }
  const auto tuple = slurp(f.paths[1]);
  if (!tuple) return report_error(NCS_ERR_PARSE, "cannot read " + f.paths[1]);
  return with_instance(f.paths[0], f, [&](auto in, auto o, auto out) {
    return ncs_evaluate_instance(in, o, tuple->c_str(), f.project ? 1 : 0, out);
  });
}
