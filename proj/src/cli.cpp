#include "algebroid/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>

#include "algebroid/algebroid.hpp"
#include "algebroid/correspondence.hpp"
#include "algebroid/fixtures.hpp"
#include "algebroid/io.hpp"

namespace algebroid::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct Report {
  std::string command;
  bool passed = false;
  bool inconclusive = false;
  std::map<std::string, double> residuals;
  std::vector<std::string> artifacts;
  unsigned long long seed = 0;
  json details = json::object();

  int exit_code() const { return passed ? kPass : inconclusive ? kInconclusive : kFail; }

  json to_json() const {
    json j = {{"command", command}, {"passed", passed},       {"inconclusive", inconclusive},
              {"residuals", residuals}, {"artifacts", artifacts}, {"seed", seed}};
    if (!details.empty()) j["details"] = details;
    return j;
  }
};

json counts_json(const VerdictCounts& c) { return {{"inner", c.inner}, {"outer", c.outer}, {"undecided", c.undecided}}; }

json check_json(const CheckReport& r) {
  return {{"passed", r.passed}, {"inconclusive", r.inconclusive}, {"residuals", r.residuals},
          {"verdicts", counts_json(r.verdicts)}, {"note", r.note}};
}

fs::path fixture_dir() {
  if (const char* env = std::getenv("ALGEBROID_FIXTURE_DIR"); env && *env) return env;
  return "fixtures";
}

double max_inner_residual(const DeltaReport& d) {
  double m = 0.0;
  for (const auto& e : d.entries) m = std::max(m, e.max_inner_residual);
  return m;
}

void delta_into(Report& r, const DeltaReport& d) {
  r.passed = d.passed;
  r.inconclusive = !d.passed && d.undecided && d.totals().outer == 0;
  r.residuals["max_inner_residual"] = max_inner_residual(d);
  json entries = json::array();
  for (const auto& e : d.entries)
    entries.push_back({{"overlap", e.id}, {"max_inner_residual", e.max_inner_residual}, {"verdicts", counts_json(e.counts)}});
  r.details["verdicts"] = counts_json(d.totals());
  r.details["overlaps"] = std::move(entries);
}

/// Writes one named fixture; returns the file path.
fs::path emit_fixture(const std::string& name, const fs::path& dir) {
  const auto& algs = algebra_fixture_names();
  const auto& mans = manifold_fixture_names();
  const auto& buns = bundle_fixture_names();
  const auto& cons = connection_fixture_names();
  auto has = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), name) != v.end(); };
  const fs::path path = dir / (name + ".json");
  if (has(algs)) {
    const auto g = fixture_algebra(name);
    if (!validate_algebra(g).passed) throw InputError("fixture algebra failed validation: " + name);
    io::write_file(path, io::to_json(g));
  } else if (has(mans)) {
    io::write_file(path, io::to_json(fixture_manifold(name)));
  } else if (has(buns)) {
    io::write_file(path, io::to_json(fixture_bundle(name)));
  } else if (has(cons)) {
    io::write_file(path, io::to_json(fixture_connection(name)));
  } else {
    throw InputError("unknown fixture: " + name);
  }
  return path;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Couplings of Lie algebra bundles with tangent bundles"};
  app.fallthrough();
  app.require_subcommand(1);

  Tolerances tol;
  unsigned long long seed = 1;
  int trials = 5;
  double sharpness = 1.0;
  std::string manifold_ref;
  app.add_option("--alg-tol", tol.alg, "algebraic identity tolerance");
  app.add_option("--acc-tol", tol.acc, "accordance / coupling tolerance");
  app.add_option("--trans-tol", tol.trans, "parallel transport tolerance");
  app.add_option("--inner-tol", tol.inner, "inner automorphism tolerance");
  app.add_option("--manifold", manifold_ref, "manifold file or fixture name");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--trials", trials, "random trials")->check(CLI::PositiveNumber);
  app.add_option("--sharpness", sharpness, "bump sharpness of the partition of unity")->check(CLI::PositiveNumber);

  std::string algebra_ref, bundle_ref, connection_ref, out_path, emit;
  std::optional<double> sub_tol;
  bool list = false;

  auto* va = app.add_subcommand("validate-algebra", "check antisymmetry and Jacobi of an algebra file");
  va->add_option("--algebra", algebra_ref, "algebra file or fixture name")->required();
  auto* vl = app.add_subcommand("validate-lab", "automorphism and cocycle checks of a bundle");
  vl->add_option("--bundle", bundle_ref, "bundle file or fixture name");
  vl->add_option("--algebra", algebra_ref, "with --manifold: check the trivial bundle");
  vl->add_option("--tol", sub_tol, "overrides --alg-tol");
  auto* cd = app.add_subcommand("check-delta", "Aut^delta continuity of the transitions");
  cd->add_option("--bundle", bundle_ref, "bundle file or fixture name")->required();
  cd->add_option("--tol", sub_tol, "overrides --inner-tol");
  auto* cc = app.add_subcommand("check-coupling", "accordance R = ad(Omega) of a connection");
  cc->add_option("--connection", connection_ref, "connection file or fixture name")->required();
  auto* fm = app.add_subcommand("f-map", "trivialization by parallel transport along rays");
  fm->add_option("--connection", connection_ref, "connection file or fixture name")->required();
  fm->add_option("--out", out_path, "bundle file to write");
  auto* gm = app.add_subcommand("g-map", "connection glued from a trivialization");
  gm->add_option("--bundle", bundle_ref, "bundle file or fixture name")->required();
  gm->add_option("--out", out_path, "connection file to write");
  auto* rt = app.add_subcommand("roundtrip", "f and g inverse to each other");
  auto* rt_b = rt->add_option("--bundle", bundle_ref, "bundle file or fixture name");
  auto* rt_c = rt->add_option("--connection", connection_ref, "connection file or fixture name");
  rt_b->excludes(rt_c);
  auto* ax = app.add_subcommand("axioms", "algebroid axioms on random sections");
  ax->add_option("--connection", connection_ref, "connection file or fixture name")->required();
  auto* fx = app.add_subcommand("fixtures", "list or write shipped fixtures");
  fx->add_flag("--list", list, "print fixture names");
  fx->add_option("--emit", emit, "fixture name, or 'all'");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kInputError;
  }

  Report r;
  r.seed = seed;
  try {
    if (*va) {
      r.command = "validate-algebra";
      const auto g = io::load_algebra(algebra_ref);
      const auto v = validate_algebra(g, tol.alg);
      r.passed = v.passed;
      r.residuals["antisymmetry"] = v.antisymmetry_residual;
      r.residuals["jacobi"] = v.jacobi_residual;
      r.details = {{"dim", g.dim()}, {"worst_index", v.worst_index}};
      if (v.passed) {
        r.details["derivations_dim"] = derivations_basis(g, tol.alg).size();
        r.details["center_dim"] = center_basis(g, tol.alg).size();
      }
    } else if (*vl) {
      r.command = "validate-lab";
      if (sub_tol) tol.alg = *sub_tol;
      Trivialization t;
      if (!bundle_ref.empty()) {
        t = io::load_bundle(bundle_ref);
      } else if (!algebra_ref.empty() && !manifold_ref.empty()) {
        t = trivial_bundle(io::load_algebra(algebra_ref), io::load_manifold(manifold_ref));
      } else {
        throw InputError("validate-lab needs --bundle, or --algebra with --manifold");
      }
      const auto v = validate_lab(t, tol);
      r.passed = v.passed;
      r.residuals = v.residuals;
      if (!v.worst.empty()) r.details["worst"] = v.worst;
    } else if (*cd) {
      r.command = "check-delta";
      if (sub_tol) tol.inner = *sub_tol;
      delta_into(r, check_delta_continuity(io::load_bundle(bundle_ref), tol));
    } else if (*cc) {
      r.command = "check-coupling";
      const auto c = io::load_connection(connection_ref);
      const auto v = validate_connection(c, tol);
      const auto a = accordance(c, tol);
      r.passed = v.passed && a.passed;
      r.residuals["derivation"] = v.residuals.at("derivation");
      r.residuals["gauge"] = v.residuals.at("gauge");
      r.residuals["accordance"] = a.max_residual;
      r.residuals["curvature_max"] = a.max_curvature;
      r.residuals["omega_max"] = a.max_omega2;
      r.residuals["omega_mean"] = a.mean_omega2;
      r.residuals["bianchi"] = a.passed ? bianchi_residual(c, a, seed) : 0.0;
      r.details["accordance"] = a.passed;
      if (!v.worst.empty()) r.details["worst"] = v.worst;
    } else if (*fm) {
      r.command = "f-map";
      const auto c = io::load_connection(connection_ref);
      try {
        const auto f = f_map(c, FMapOptions{64, {}, tol});
        r.passed = f.theorem_holds;
        r.inconclusive = !f.theorem_holds && f.automorphism.passed && f.delta.undecided && f.delta.totals().outer == 0;
        r.residuals["accordance"] = f.accordance_residual;
        r.residuals["automorphism"] = f.automorphism.residuals.at("automorphism");
        r.residuals["cocycle"] = f.automorphism.residuals.at("cocycle");
        r.residuals["max_inner_residual"] = max_inner_residual(f.delta);
        r.details["verdicts"] = counts_json(f.delta.totals());
        if (!out_path.empty()) {
          io::write_file(out_path, io::to_json(f.bundle));
          r.artifacts.push_back(out_path);
        }
      } catch (const PreconditionError& e) {
        r.details["note"] = e.what();
      }
    } else if (*gm) {
      r.command = "g-map";
      const auto t = io::load_bundle(bundle_ref);
      try {
        const auto c = g_map(t, partition_of_unity(t.manifold, {sharpness}), tol);
        const auto v = validate_connection(c, tol);
        const auto a = accordance(c, tol);
        r.passed = v.passed && a.passed;
        r.residuals["derivation"] = v.residuals.at("derivation");
        r.residuals["gauge"] = v.residuals.at("gauge");
        r.residuals["accordance"] = a.max_residual;
        if (!out_path.empty()) {
          io::write_file(out_path, io::to_json(c));
          r.artifacts.push_back(out_path);
        }
      } catch (const PreconditionError& e) {
        r.details["note"] = e.what();
        r.inconclusive = std::string(e.what()).find("undecided") != std::string::npos;
      }
    } else if (*rt) {
      r.command = "roundtrip";
      RoundTripReport rr;
      if (!bundle_ref.empty()) {
        const auto t = io::load_bundle(bundle_ref);
        rr = verify_inverse(t, partition_of_unity(t.manifold, {sharpness}), tol);
      } else if (!connection_ref.empty()) {
        const auto c = io::load_connection(connection_ref);
        rr = verify_inverse(c, partition_of_unity(c.bundle.manifold, {sharpness}), tol);
      } else {
        throw InputError("roundtrip needs --bundle or --connection");
      }
      r.passed = rr.passed;
      r.inconclusive = rr.inconclusive;
      for (const auto& [k, v] : rr.couplings.residuals) r.residuals["g_of_f." + k] = v;
      for (const auto& [k, v] : rr.trivializations.residuals) r.residuals["f_of_g." + k] = v;
      r.details = {{"direction", rr.direction},
                   {"g_of_f", check_json(rr.couplings)},
                   {"f_of_g", check_json(rr.trivializations)},
                   {"undecided", rr.couplings.verdicts.undecided + rr.trivializations.verdicts.undecided}};
      if (!rr.note.empty()) r.details["note"] = rr.note;
    } else if (*ax) {
      r.command = "axioms";
      const auto c = io::load_connection(connection_ref);
      const auto a = accordance(c, tol);
      if (!a.passed) {
        r.details["note"] = "not a coupling";
        r.residuals["accordance"] = a.max_residual;
      } else {
        const auto rep = axiom_report(c, a, trials, seed);
        r.residuals["skew"] = rep.skew;
        r.residuals["leibniz"] = rep.leibniz;
        r.residuals["jacobi"] = rep.jacobi;
        r.residuals["jacobi_interior"] = rep.jacobi_interior;
        r.details["trials"] = rep.trials;
        r.passed = rep.skew == 0.0 && rep.leibniz <= tol.fd;
      }
    } else if (*fx) {
      r.command = "fixtures";
      if (list) {
        r.details = {{"algebras", algebra_fixture_names()},
                     {"manifolds", manifold_fixture_names()},
                     {"bundles", bundle_fixture_names()},
                     {"connections", connection_fixture_names()}};
      }
      if (!emit.empty()) {
        const fs::path dir = fixture_dir();
        std::vector<std::string> names;
        if (emit == "all") {
          for (const auto& group : {algebra_fixture_names(), manifold_fixture_names(), bundle_fixture_names(),
                                     connection_fixture_names()})
            names.insert(names.end(), group.begin(), group.end());
        } else {
          names.push_back(emit);
        }
        for (const auto& n : names) r.artifacts.push_back(emit_fixture(n, dir).string());
      }
      if (!list && emit.empty()) throw InputError("fixtures needs --list or --emit");
      r.passed = true;
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    out << json{{"command", r.command}, {"passed", false}, {"inconclusive", false}, {"error", e.what()}}.dump(1) << "\n";
    return kInputError;
  } catch (const CoverageError& e) {
    err << "input error: " << e.what() << "\n";
    out << json{{"command", r.command}, {"passed", false}, {"inconclusive", false}, {"error", e.what()}}.dump(1) << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    r.passed = false;
    r.details["note"] = e.what();
  }

  out << r.to_json().dump(1) << "\n";
  if (r.details.contains("note")) err << r.command << ": " << r.details["note"].get<std::string>() << "\n";
  return r.exit_code();
}

}  // namespace algebroid::cli
