#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gluekit/parse.hpp"
#include "gluekit/report.hpp"
#include "test_util.hpp"

using namespace gluekit;

namespace {

BasePair Z5 = BasePair::arithmetic_base(5);

Polynomial var(const PolyContext& ctx, std::size_t i) { return Polynomial::variable(ctx, i); }

// run the command line tool (path from GLUEKIT_CLI) and return its exit code
struct CliResult {
  int code = -1;
  std::string output;
};

const char* cli_path() { return std::getenv("GLUEKIT_CLI"); }

CliResult run_cli(const std::string& args) {
  std::string out = "/tmp/gluekit_cli_out.txt";
  std::string cmd = std::string(cli_path()) + " " + args + " > " + out + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::ostringstream os;
  os << in.rdbuf();
  r.output = os.str();
  return r;
}

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("GLUEKIT_FIXTURES");
  REQUIRE(dir != nullptr);
  return std::string(dir) + "/" + name;
}

}  // namespace

TEST_CASE("polynomial expression grammar") {
  PolyContext ctx{Z5, Regime::R_inv_pi(), {"x", "y"}};
  SUBCASE("documented example") {
    Polynomial f = parse_polynomial("3/2*x^2*y - 5*x + 1", ctx);
    Polynomial want = var(ctx, 0).pow(2) * var(ctx, 1) * Scalar::rational(mpq_class(3, 2)) -
                      var(ctx, 0) * Scalar::rational(5) +
                      Polynomial::constant(ctx, Scalar::rational(1));
    CHECK(f == want);
  }
  SUBCASE("pi literal and denominators") {
    CHECK(parse_polynomial("p^2*x", ctx) == var(ctx, 0) * Scalar::rational(25));
    CHECK(parse_polynomial("x/p", ctx) == var(ctx, 0) * Scalar::rational(mpq_class(1, 5)));
    CHECK(parse_polynomial("(1 - p*x)^2", ctx) ==
          (Polynomial::constant(ctx, Scalar::rational(1)) - var(ctx, 0) * Scalar::rational(5))
              .pow(2));
  }
  SUBCASE("geometric profile uses t") {
    BasePair qt = BasePair::geometric_base();
    PolyContext gctx{qt, Regime::R_inv_pi(), {"x"}};
    Polynomial f = parse_polynomial("t*x - 1", gctx);
    CHECK(f == var(gctx, 0) * Scalar::pi(qt) -
                   Polynomial::constant(gctx, Scalar::one(qt.profile)));
  }
  SUBCASE("errors carry position") {
    CHECK_THROWS_AS(parse_polynomial("x + z", ctx), GlueError);
    try {
      parse_polynomial("x +\n  z", ctx);
    } catch (const GlueError& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_polynomial("x x x ,", ctx), GlueError);
    CHECK_THROWS_AS(parse_polynomial("x / y", ctx), GlueError);
  }
}

TEST_CASE("triple block grammar matches the built-in fixture") {
  std::string text =
      "triple T { base Zp(5); A vars x rels ; "
      "B { factor d0: vars u; factor d1: vars v; }; "
      "j x -> (u | v + 1/p); "
      "domain |p*x| <= 1 on d0, |p*x - 1| <= 1 on d1; }";
  ParsedTriple t = parse_triple(text);
  CHECK(t.name == "T");
  CHECK_FALSE(t.triple.validate().has_value());
  AffineGluingTriple ref = two_disks_triple(5);
  CHECK(t.triple.factor_count() == 2);
  CHECK(t.triple.factor(0).name == "d0");
  CHECK(t.triple.jstar()[0][0] == ref.jstar()[0][0]);
  CHECK(t.triple.jstar()[0][1] == ref.jstar()[0][1]);
  CHECK(t.triple.subdomain().size() == 2);
  CHECK(membership(t.triple, parse_polynomial("p*x", t.triple.A().ctx())).member);
}

TEST_CASE("triple block grammar rejects malformed input") {
  CHECK_THROWS_AS(parse_triple("triple T { base Zp(5); }"), GlueError);
  // missing j clause
  CHECK_THROWS_AS(
      parse_triple("triple T { base Zp(5); A vars x rels ; B { factor d0: vars u; }; }"),
      GlueError);
  // j clause for unknown generator
  CHECK_THROWS_AS(parse_triple("triple T { base Zp(5); A vars x rels ; "
                               "B { factor d0: vars u; }; j y -> (u); }"),
                  GlueError);
  // domain bound on unknown factor
  CHECK_THROWS_AS(parse_triple("triple T { base Zp(5); A vars x rels ; "
                               "B { factor d0: vars u; }; j x -> (u); "
                               "domain |x| <= 1 on d9; }"),
                  GlueError);
}

TEST_CASE("module file grammar") {
  SUBCASE("module block") {
    ParsedModuleFile f = parse_module_file(
        "algebra A over Zp(5) { factor main: vars x; } "
        "module M over A { gens 2; rel [x, -1]; rel [0, p^2]; }");
    CHECK(f.algebra_name == "A");
    REQUIRE(f.module.has_value());
    CHECK(f.module->n_gens == 2);
    CHECK(f.module->rels.size() == 2);
    CHECK(f.module->ring.vars() == std::vector<std::string>{"x"});
  }
  SUBCASE("datum block round-trips through the gluing") {
    ParsedModuleFile f = parse_module_file(
        "algebra A over Zp(5) prec 6 { factor main: vars ; } "
        "datum D over A { F gens 1; N gens 1; iota [[1]]; iota_inv [[1]]; }");
    REQUIRE(f.datum.has_value());
    CHECK(f.prec == 6);
    check_datum(*f.datum);
    GluedModule g = glue_module(*f.datum);
    CHECK(smith_invariants(g.M).free_rank == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_module_file("algebra A over Zp(5) { factor a: vars ; factor b: vars ; }"),
                    GlueError);
    CHECK_THROWS_AS(parse_module_file("algebra A over Zp(5) { factor main: vars x; } "
                                      "module M over B { gens 1; }"),
                    GlueError);
    CHECK_THROWS_AS(parse_module_file("algebra A over Zp(5) { factor main: vars x; } "
                                      "module M over A { gens 2; rel [x]; }"),
                    GlueError);
  }
}

TEST_CASE("point block grammar") {
  ParsedPoint pt = parse_point("point P over Zp(5) { matrix [[1, 5], [1, 1]]; }");
  CHECK(pt.name == "P");
  CHECK(pt.matrix.size() == 2);
  CHECK(pt.matrix[0][1] == Scalar::rational(5));
  CHECK_THROWS_AS(parse_point("point P over Zp(5) { matrix [[1, 5], [1]]; }"), GlueError);
}

TEST_CASE("reports are versioned and deterministic") {
  auto build = [] {
    Report r("classify");
    r.add("class", "affine");
    r.add("level", 3L);
    r.add("dense", true);
    return r.str();
  };
  std::string a = build(), b = build();
  CHECK(a == b);
  CHECK(a.rfind("gluekit-report: 1\ncommand: classify\n", 0) == 0);
  CHECK(a.find("level: 3\n") != std::string::npos);
  CHECK(a.find("dense: true\n") != std::string::npos);
}

TEST_CASE("command line exit-code contract") {
  if (!cli_path()) {
    MESSAGE("GLUEKIT_CLI not set; skipping the command-line contract checks");
    return;
  }
  SUBCASE("certified success is 0") {
    CliResult r = run_cli("glue-ring two-disks --prec 3");
    CHECK(r.code == 0);
    CHECK(r.output.find("result: affine") != std::string::npos);
    CHECK(r.output.find("relations: 3") != std::string::npos);
  }
  SUBCASE("certified negative is 2") {
    CliResult r = run_cli("classify " + fixture("unit_circle.triple") + " --prec 1");
    CHECK(r.code == 2);
    CHECK(r.output.find("witness: xb") != std::string::npos);
    CHECK(run_cli("glue-ring unit-circle --prec 1").code == 2);
    CHECK(run_cli("glue-module " + fixture("bad_datum.mod")).code == 2);
  }
  SUBCASE("parse failures are 64") {
    CHECK(run_cli("classify " + fixture("malformed.triple")).code == 64);
    CHECK(run_cli("classify /nonexistent/file.triple").code == 64);
  }
  SUBCASE("module gluing outputs") {
    CliResult free = run_cli("glue-module " + fixture("free_module.mod"));
    CHECK(free.code == 0);
    CHECK(free.output.find("free rank: 1") != std::string::npos);
    CliResult tor = run_cli("glue-module " + fixture("torsion_module.mod"));
    CHECK(tor.code == 0);
    CHECK(tor.output.find("torsion exponents: [2]") != std::string::npos);
  }
  SUBCASE("machine-readable reports are byte-identical across runs") {
    std::string args = "classify " + fixture("unit_circle.triple") + " --prec 1 --format report";
    CliResult a = run_cli(args), b = run_cli(args);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("gluekit-report: 1\n", 0) == 0);
  }
  SUBCASE("fixture catalog") {
    CliResult r = run_cli("verify-examples --prec 4");
    CHECK(r.code == 0);
    CHECK(r.output.find("two-disks: pass") != std::string::npos);
    CHECK(r.output.find("unit-circle: pass") != std::string::npos);
  }
}
