// gluekit command line front end: parse the structured text formats, dispatch
// the gluing operations, run the fixture catalog, and emit certificates.
//
// Exit codes: 0 certified success, 2 certified negative, 3 inconclusive,
// 64 parse error, 1 internal failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gluekit/parse.hpp"
#include "gluekit/report.hpp"

using namespace gluekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitParse = 64;

struct RunConfig {
  int prec = 8;
  unsigned degree_bound = 6;
  std::string profile = "Zp(5)";
  std::string format = "text";
};

BasePair profile_base(const std::string& profile) {
  if (profile == "Qt") return BasePair::geometric_base();
  if (profile.rfind("Zp(", 0) == 0 && profile.back() == ')') {
    long p = std::stol(profile.substr(3, profile.size() - 4));
    return BasePair::arithmetic_base(p);
  }
  raise(ErrorKind::ParseError, "profile must be Zp(<prime>) or Qt");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::ParseError, "cannot open input file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

AffineGluingTriple load_triple(const std::string& input, const RunConfig& cfg,
                               std::string* name = nullptr) {
  BasePair base = profile_base(cfg.profile);
  if (input == "two-disks") {
    if (name) *name = "two-disks";
    if (base.profile != Profile::arithmetic)
      raise(ErrorKind::ParseError, "the two-disks fixture needs an arithmetic profile");
    return two_disks_triple(base.p);
  }
  if (input == "unit-circle") {
    if (name) *name = "unit-circle";
    if (base.profile != Profile::arithmetic)
      raise(ErrorKind::ParseError, "the unit-circle fixture needs an arithmetic profile");
    return unit_circle_triple(base.p);
  }
  ParsedTriple t = parse_triple(read_file(input));
  if (name) *name = t.name;
  return std::move(t.triple);
}

void emit(const Report& rep, const RunConfig& cfg) {
  if (cfg.format == "report") {
    std::cout << rep.str();
    return;
  }
  for (const auto& [k, v] : rep.lines()) {
    if (k == "gluekit-report") continue;
    std::cout << k << ": " << v << "\n";
  }
}

int error_exit(const GlueError& e, const RunConfig& cfg, const std::string& command) {
  Report rep(command);
  rep.add("error", error_kind_name(e.kind()));
  rep.add("detail", e.what());
  emit(rep, cfg);
  switch (e.kind()) {
    case ErrorKind::ParseError:
      return kExitParse;
    case ErrorKind::DegreeBoundInconclusive:
    case ErrorKind::SearchExhausted:
    case ErrorKind::CapExceeded:
      return kExitInconclusive;
    case ErrorKind::VerificationFailed:
    case ErrorKind::IncompatibleDatum:
    case ErrorKind::NotIntegral:
      return kExitNegative;
    default:
      return 1;
  }
}

int cmd_glue_ring(const std::string& input, const RunConfig& cfg) {
  Report rep("glue-ring");
  try {
    std::string name;
    AffineGluingTriple T = load_triple(input, cfg, &name);
    rep.add("triple", name);
    ClassifyResult cls = classify_triple(T, std::min(cfg.prec, 3), cfg.degree_bound);
    if (cls.cls == TripleClass::not_affine) {
      rep.add("result", "not-affine");
      rep.add("reason", cls.reason == "d" ? "dense-image" : "triple-data");
      rep.add("witness", cls.witness);
      emit(rep, cfg);
      return kExitNegative;
    }
    GluedRingResult res = pullback_ring(T, cfg.degree_bound, cfg.prec);
    VerifyCertificate cert = verify_glued(res, T, cfg.prec);
    rep.add("result", "affine");
    rep.add("generators", static_cast<long>(res.gens.size()));
    for (const auto& g : res.gens) rep.add("generator " + g.name, g.a.str());
    rep.add("relations", static_cast<long>(res.relations().size()));
    for (std::size_t i = 0; i < res.relations().size(); ++i)
      rep.add("relation " + std::to_string(i), res.relations()[i].str());
    for (const auto& c : cert.checks) rep.add("verified", c);
    emit(rep, cfg);
    return kExitOk;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "glue-ring");
  }
}

int cmd_check_dense(const std::string& input, const RunConfig& cfg) {
  Report rep("check-dense");
  try {
    std::string name;
    AffineGluingTriple T = load_triple(input, cfg, &name);
    rep.add("triple", name);
    DenseImageResult d = dense_image_check(T, cfg.prec, cfg.degree_bound);
    rep.add("dense", d.dense);
    if (!d.dense) {
      rep.add("level", static_cast<long>(d.level));
      rep.add("witness", d.witness);
    }
    emit(rep, cfg);
    return d.dense ? kExitOk : kExitNegative;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "check-dense");
  }
}

int cmd_classify(const std::string& input, const RunConfig& cfg) {
  Report rep("classify");
  try {
    std::string name;
    AffineGluingTriple T = load_triple(input, cfg, &name);
    rep.add("triple", name);
    ClassifyResult r = classify_triple(T, cfg.prec, cfg.degree_bound);
    switch (r.cls) {
      case TripleClass::affine:
        rep.add("class", "affine");
        emit(rep, cfg);
        return kExitOk;
      case TripleClass::not_affine:
        rep.add("class", "not-affine");
        rep.add("reason", r.reason == "d" ? "dense-image" : "triple-data");
        rep.add("witness", r.witness);
        emit(rep, cfg);
        return kExitNegative;
      case TripleClass::inconclusive:
        break;
    }
    rep.add("class", "inconclusive");
    rep.add("reason", r.reason);
    emit(rep, cfg);
    return kExitInconclusive;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "classify");
  }
}

void report_presentation(Report& rep, const std::string& tag, const ModulePresentation& M) {
  rep.add(tag + " gens", static_cast<long>(M.n_gens));
  rep.add(tag + " rels", static_cast<long>(M.rels.size()));
  for (std::size_t j = 0; j < M.rels.size(); ++j) {
    std::string col = "[";
    for (std::size_t i = 0; i < M.n_gens; ++i)
      col += (i ? ", " : "") + M.rels[j][i].str();
    rep.add(tag + " rel " + std::to_string(j), col + "]");
  }
}

int cmd_glue_module(const std::string& input, const RunConfig& cfg) {
  Report rep("glue-module");
  try {
    ParsedModuleFile file = parse_module_file(read_file(input));
    rep.add("algebra", file.algebra_name);
    ModuleGluingDatum datum = [&] {
      if (file.datum) {
        rep.add("datum", file.datum_name);
        return *file.datum;
      }
      if (!file.module) raise(ErrorKind::ParseError, "no module or datum block in input");
      rep.add("module", file.module_name);
      return triple_of_module(*file.module, file.prec);
    }();
    check_datum(datum);
    GluedModule g = glue_module(datum);
    report_presentation(rep, "glued", g.M);
    if (g.M.ring.vars().empty()) {
      ModuleInvariants inv = smith_invariants(g.M);
      rep.add("free rank", inv.free_rank);
      std::string tor = "[";
      for (std::size_t i = 0; i < inv.torsion.size(); ++i)
        tor += (i ? ", " : "") + std::to_string(inv.torsion[i]);
      rep.add("torsion exponents", tor + "]");
    }
    if (file.module) {
      // self check: gluing the triple of M reproduces M up to isomorphism
      std::vector<std::vector<Polynomial>> S(file.module->n_gens), Tm(g.M.n_gens);
      bool scaled = false;
      for (const auto& s : g.F_gen_scale)
        if (s != 0) scaled = true;
      bool round_trip = false;
      if (!scaled) {
        for (std::size_t i = 0; i < file.module->n_gens; ++i)
          for (std::size_t s = 0; s < g.M.n_gens; ++s)
            S[i].push_back(g.gen_F[s][i].with_regime(Regime::R()));
        for (std::size_t s = 0; s < g.M.n_gens; ++s)
          for (std::size_t i = 0; i < file.module->n_gens; ++i)
            Tm[s].push_back(g.F_gen_lift[i][s]);
        round_trip = certify_isomorphism(g.M, *file.module, S, Tm, 4);
      }
      rep.add("round-trip", round_trip);
      if (!round_trip)
        raise(ErrorKind::VerificationFailed, "round-trip certificate not established");
    }
    emit(rep, cfg);
    return kExitOk;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "glue-module");
  }
}

int cmd_specialize(const std::string& input, const RunConfig& cfg) {
  Report rep("specialize");
  try {
    BasePair demo_base = profile_base(cfg.profile);
    Scalar one = Scalar::one(demo_base.profile);
    ParsedPoint pt = input == "iwahori-demo"
                         ? ParsedPoint{"iwahori-demo", demo_base,
                                       {{one, Scalar::pi(demo_base)}, {one, one}}}
                         : parse_point(read_file(input));
    rep.add("point", pt.name);
    if (pt.matrix.size() != 2)
      raise(ErrorKind::ParseError, "specialize expects a 2x2 matrix point");
    rep.add("iwahori", iwahori_membership(pt.base, pt.matrix));
    Scalar det = pt.matrix[0][0] * pt.matrix[1][1] - pt.matrix[0][1] * pt.matrix[1][0];
    if (!(det.valuation(pt.base) == Valuation::of(0)))
      raise(ErrorKind::NotIntegral, "matrix determinant is not a unit");
    IntegralPoint p = make_integral_point(
        gl2_model(pt.base), {pt.matrix[0][0], pt.matrix[0][1], pt.matrix[1][0], pt.matrix[1][1],
                             Scalar::one(pt.base.profile) / det});
    std::vector<Scalar> r = specialize_point(p);
    rep.add("reduction", "[[" + r[0].str() + ", " + r[1].str() + "], [" + r[2].str() + ", " +
                             r[3].str() + "]]");
    emit(rep, cfg);
    return kExitOk;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "specialize");
  }
}

int cmd_groebner(const std::string& input, const RunConfig& cfg) {
  Report rep("groebner");
  try {
    ParsedModuleFile file = parse_module_file(read_file(input));
    rep.add("algebra", file.algebra_name);
    IdealPresentation gb = groebner_basis(file.ring.relations());
    rep.add("basis size", static_cast<long>(gb.gens.size()));
    for (std::size_t i = 0; i < gb.gens.size(); ++i)
      rep.add("basis " + std::to_string(i), gb.gens[i].str());
    emit(rep, cfg);
    return kExitOk;
  } catch (const GlueError& e) {
    return error_exit(e, cfg, "groebner");
  }
}

int cmd_verify_examples(const RunConfig& cfg) {
  Report rep("verify-examples");
  bool all_ok = true;
  auto run = [&](const std::string& name, auto&& body) {
    auto start = std::chrono::steady_clock::now();
    std::string status = "pass";
    try {
      body();
    } catch (const GlueError& e) {
      status = std::string("fail (") + e.what() + ")";
      all_ok = false;
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    rep.add(name, status + " [" + std::to_string(ms) + " ms]");
  };
  BasePair base = profile_base(cfg.profile);
  long p = base.profile == Profile::arithmetic ? base.p : 5;
  Scalar one = Scalar::one(base.profile);
  Scalar pi = Scalar::pi(base);
  run("iwahori-demo", [&] {
    if (!iwahori_membership(base, {{one, pi}, {one, one}}))
      raise(ErrorKind::VerificationFailed, "iwahori matrix rejected");
    if (iwahori_membership(base, {{one, one}, {pi, one}}))
      raise(ErrorKind::VerificationFailed, "non-iwahori matrix accepted");
  });
  run("neron-gm", [&] {
    if (!neron_iso_test(neron_gm_triple(1), neron_gm_triple(1)) ||
        neron_iso_test(neron_gm_triple(1), neron_gm_triple(mpq_class(1, 2))))
      raise(ErrorKind::VerificationFailed, "component comparison wrong");
  });
  run("two-disks", [&] {
    AffineGluingTriple T = two_disks_triple(p);
    GluedRingResult res = pullback_ring(T, cfg.degree_bound, cfg.prec);
    verify_glued(res, T, cfg.prec);
  });
  run("unit-circle", [&] {
    ClassifyResult r = classify_triple(unit_circle_triple(p), std::min(cfg.prec, 2),
                                       cfg.degree_bound);
    if (r.cls != TripleClass::not_affine || r.witness != "xb")
      raise(ErrorKind::VerificationFailed, "expected a certified non-affine witness");
  });
  emit(rep, cfg);
  return all_ok ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gluekit: gluing of modules and affine algebras from generic-fiber and "
               "formal-completion data"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--prec", cfg.prec, "working pi-adic precision")->check(CLI::PositiveNumber);
  app.add_option("--degree-bound", cfg.degree_bound, "search degree bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--profile", cfg.profile, "base profile: Zp(<prime>) or Qt");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "report"}));

  std::string input;
  auto* glue_ring = app.add_subcommand("glue-ring", "glue an affine triple into a ring");
  glue_ring->fallthrough();
  glue_ring->add_option("input", input, "triple file or fixture name")->required();
  auto* glue_module = app.add_subcommand("glue-module", "glue a module datum");
  glue_module->fallthrough();
  glue_module->add_option("input", input, "module file")->required();
  auto* check_dense = app.add_subcommand("check-dense", "check density of the pullback in B");
  check_dense->fallthrough();
  check_dense->add_option("input", input, "triple file or fixture name")->required();
  auto* classify = app.add_subcommand("classify", "classify a triple");
  classify->fallthrough();
  classify->add_option("input", input, "triple file or fixture name")->required();
  auto* specialize = app.add_subcommand("specialize", "reduce an integral point mod pi");
  specialize->fallthrough();
  specialize->add_option("input", input, "point file or 'iwahori-demo'")->required();
  auto* groebner = app.add_subcommand("groebner", "print a Groebner basis");
  groebner->fallthrough();
  groebner->add_option("input", input, "algebra file")->required();
  app.add_subcommand("verify-examples", "run the fixture catalog")->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (glue_ring->parsed()) return cmd_glue_ring(input, cfg);
    if (glue_module->parsed()) return cmd_glue_module(input, cfg);
    if (check_dense->parsed()) return cmd_check_dense(input, cfg);
    if (classify->parsed()) return cmd_classify(input, cfg);
    if (specialize->parsed()) return cmd_specialize(input, cfg);
    if (groebner->parsed()) return cmd_groebner(input, cfg);
    return cmd_verify_examples(cfg);
  } catch (const GlueError& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError ? kExitParse : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
