#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gluekit/models.hpp"
#include "test_util.hpp"

using namespace gluekit;

namespace {

Polynomial var(const PolyContext& ctx, std::size_t i) { return Polynomial::variable(ctx, i); }

Polynomial cst(const PolyContext& ctx, long n) {
  return Polynomial::constant(ctx, Scalar::integer(n, ctx.base.profile));
}

// the reference generators of the two-disks ring: gamma = p x,
// alpha = x (1 - p x)^2, beta = p x^2 (1 - p x)
struct TwoDisksRefs {
  Polynomial alpha, beta, gamma;
};

TwoDisksRefs two_disks_refs(const AffineGluingTriple& T, long p) {
  const PolyContext& ctx = T.A().ctx();
  Polynomial x = var(ctx, 0);
  Polynomial one_minus_px = cst(ctx, 1) - x * Scalar::rational(p);
  return TwoDisksRefs{x * one_minus_px * one_minus_px,
                      x * x * one_minus_px * Scalar::rational(p), x * Scalar::rational(p)};
}

AffineGluingTriple single_disk_triple(long p) {
  BasePair base = BasePair::arithmetic_base(p);
  AffineAlgebra A(base, Regime::R_inv_pi(), {"x"});
  AlgebraFactor disk{"disk", {"x"}, {}};
  PolyContext fctx{base, Regime::R_inv_pi(), {"x"}};
  return AffineGluingTriple(std::move(A), {disk}, {{var(fctx, 0)}}, {});
}

// jstar images of an element and its claimed exact lifts agree in C
void check_element_consistency(const AffineGluingTriple& T, const DElement& g) {
  std::vector<Polynomial> img = T.jstar_apply(g.a);
  for (std::size_t i = 0; i < T.factor_count(); ++i) {
    Polynomial diff = img[i] - g.b[i].with_regime(Regime::R_inv_pi());
    CHECK(detail::factor_class_zero(T, i, diff));
  }
}

}  // namespace

TEST_CASE("two-disks data validates and the membership oracle matches the worked values") {
  AffineGluingTriple T = two_disks_triple(5);
  CHECK_FALSE(T.validate().has_value());
  TwoDisksRefs refs = two_disks_refs(T, 5);
  Polynomial x = var(T.A().ctx(), 0);
  CHECK(membership(T, refs.gamma).member);
  CHECK(membership(T, refs.alpha).member);
  CHECK(membership(T, refs.beta).member);
  CHECK(membership(T, T.A().one()).member);
  MembershipResult bad = membership(T, x);
  CHECK_FALSE(bad.member);
  CHECK_FALSE(bad.witness.empty());
  CHECK_FALSE(membership(T, x * x).member);
  // gamma^2 - gamma = -p(alpha + beta) stays inside
  CHECK(membership(T, refs.gamma * refs.gamma - refs.gamma).member);
}

TEST_CASE("membership is closed under ring operations") {
  AffineGluingTriple T = two_disks_triple(5);
  TwoDisksRefs refs = two_disks_refs(T, 5);
  std::vector<Polynomial> members{T.A().one(), refs.alpha, refs.beta, refs.gamma};
  for (int trial = 0; trial < 12; ++trial) {
    std::size_t i = testutil::rand_int(0, 3), j = testutil::rand_int(0, 3);
    Scalar c = Scalar::rational(static_cast<long>(testutil::rand_int(0, 20)) - 10);
    Polynomial sum = members[i] + members[j] * c;
    Polynomial prod = members[i] * members[j];
    CHECK(membership(T, sum).member);
    CHECK(membership(T, prod).member);
    if (trial < 4) members.push_back(prod);
  }
}

TEST_CASE("jstar precision tracking for integral elements") {
  AffineGluingTriple T = two_disks_triple(5);
  TwoDisksRefs refs = two_disks_refs(T, 5);
  PrecisionElement e = jstar_precision(T, refs.gamma, 3);
  CHECK(e.precision() == 3);
  // gamma restricts to 5u on the first disk and 5v + 1 on the second
  AffineAlgebra q0 = e.algebra()->factor_algebra(0);
  CHECK(q0.equal(e.component(0), var(q0.ctx(), 0) * Scalar::rational(5)));
  AffineAlgebra q1 = e.algebra()->factor_algebra(1);
  CHECK(q1.equal(e.component(1),
                 var(q1.ctx(), 0) * Scalar::rational(5) + cst(q1.ctx(), 1)));
  CHECK_THROWS_AS(jstar_precision(T, var(T.A().ctx(), 0), 3), GlueError);
}

TEST_CASE("dense image check certifies the unit-circle failure") {
  for (long p : {5L, 3L}) {
    AffineGluingTriple T = unit_circle_triple(p);
    CHECK_FALSE(T.validate().has_value());
    DenseImageResult d = dense_image_check(T, 2);
    CHECK_FALSE(d.dense);
    CHECK(d.level == 1);
    CHECK(d.witness == "xb");
  }
}

TEST_CASE("dense image check passes on dense fixtures") {
  CHECK(dense_image_check(single_disk_triple(5), 3).dense);
  CHECK(dense_image_check(two_disks_triple(7), 3).dense);
}

TEST_CASE("generator search produces consistent elements of D") {
  SUBCASE("single disk: the coordinate itself") {
    AffineGluingTriple T = single_disk_triple(5);
    std::vector<DElement> gens = generator_search(T, 4, 4);
    REQUIRE(gens.size() == 1);
    CHECK(gens[0].a == var(T.A().ctx(), 0));
    CHECK(gens[0].b[0] == var(gens[0].b[0].ctx(), 0));
  }
  SUBCASE("two disks: scaled coordinate plus cubic disk generators") {
    AffineGluingTriple T = two_disks_triple(5);
    std::vector<DElement> gens = generator_search(T, 6, 4);
    REQUIRE(gens.size() == 3);
    CHECK(gens[0].a == var(T.A().ctx(), 0) * Scalar::rational(5));
    for (const auto& g : gens) {
      CHECK(membership(T, g.a).member);
      check_element_consistency(T, g);
    }
    // the disk generators reduce to (u | 0) and (0 | v) modulo 5
    for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
      std::size_t f = k - 1;
      AffineAlgebra lv(T.base(), Regime::R_mod_piN(1), T.factor(f).vars, {});
      Polynomial red = gens[k].b[f].with_regime(Regime::R_mod_piN(1));
      CHECK(lv.equal(red, var(lv.ctx(), 0)));
      AffineAlgebra other(T.base(), Regime::R_mod_piN(1), T.factor(1 - f).vars, {});
      CHECK(other.is_zero_elem(gens[k].b[1 - f].with_regime(Regime::R_mod_piN(1))));
    }
  }
  SUBCASE("torsion factor contributes a generator with zero generic fiber") {
    BasePair Z5 = BasePair::arithmetic_base(5);
    PolyContext rctx{Z5, Regime::R(), {"x"}};
    AffineAlgebra X(Z5, Regime::R(), {"x"}, {var(rctx, 0) * Scalar::rational(5)});
    AffineGluingTriple T = canonical_triple(X);
    std::vector<DElement> gens = generator_search(T, 4, 4);
    bool has_torsion = false;
    for (const auto& g : gens)
      if (g.a.is_zero() && !g.b[0].is_zero()) has_torsion = true;
    CHECK(has_torsion);
  }
  SUBCASE("unit circle: the antipodal coordinate is unreachable") {
    CHECK_THROWS_AS(generator_search(unit_circle_triple(5), 4, 4), GlueError);
  }
}

TEST_CASE("pullback ring of the two disks carries the worked relations") {
  AffineGluingTriple T = two_disks_triple(5);
  GluedRingResult res = pullback_ring(T, 6, 3);
  REQUIRE(res.gens.size() == 3);
  TwoDisksRefs refs = two_disks_refs(T, 5);
  std::vector<Polynomial> asides;
  std::vector<std::string> names;
  for (const auto& g : res.gens) {
    asides.push_back(g.a);
    names.push_back(g.name);
  }
  auto qa = express_in_subalgebra(T.A(), asides, names, refs.alpha, 3);
  auto qb = express_in_subalgebra(T.A(), asides, names, refs.beta, 3);
  auto qg = express_in_subalgebra(T.A(), asides, names, refs.gamma, 3);
  REQUIRE(qa.has_value());
  REQUIRE(qb.has_value());
  REQUIRE(qg.has_value());
  const PolyContext& d = res.dctx;
  Polynomial one = cst(d, 1);
  // p alpha = gamma (1 - gamma)^2, p beta = gamma^2 (1 - gamma),
  // gamma alpha = (1 - gamma) beta
  Polynomial r1 = *qa * Scalar::rational(5) - *qg * (one - *qg) * (one - *qg);
  Polynomial r2 = *qb * Scalar::rational(5) - *qg * *qg * (one - *qg);
  Polynomial r3 = *qg * *qa - (one - *qg) * *qb;
  CHECK(ideal_membership(r1, res.relation_ideal));
  CHECK(ideal_membership(r2, res.relation_ideal));
  CHECK(ideal_membership(r3, res.relation_ideal));
  // and conversely the generated subalgebras agree degree by degree
  CHECK(same_subalgebra_degreewise(T.A(), asides, {refs.alpha, refs.beta, refs.gamma}, 3));
}

TEST_CASE("verification certifies the two-disks gluing and rejects corrupted data") {
  AffineGluingTriple T = two_disks_triple(5);
  GluedRingResult res = pullback_ring(T, 6, 3);
  VerifyCertificate cert = verify_glued(res, T, 3);
  CHECK(cert.ok);
  CHECK_FALSE(cert.checks.empty());
  // dropping the scaled-coordinate generator breaks surjectivity onto A
  std::vector<DElement> crippled(res.gens.begin() + 1, res.gens.end());
  GluedRingResult broken = pullback_from_generators(T, crippled, 6, 3);
  CHECK_THROWS_AS(verify_glued(broken, T, 3), GlueError);
  try {
    verify_glued(broken, T, 3);
  } catch (const GlueError& e) {
    CHECK(e.kind() == ErrorKind::VerificationFailed);
  }
}

TEST_CASE("pullback of a single disk has no relations") {
  AffineGluingTriple T = single_disk_triple(5);
  GluedRingResult res = pullback_ring(T, 4, 3);
  CHECK(res.gens.size() == 1);
  CHECK(res.relations().empty());
  CHECK(verify_glued(res, T, 3).ok);
}

TEST_CASE("global sections are reconstructed for the worked algebras") {
  BasePair Z5 = BasePair::arithmetic_base(5);
  SUBCASE("polynomial ring") {
    AffineAlgebra X(Z5, Regime::R(), {"x"});
    ReconstructionCertificate c = reconstruct_global_sections(X, 4);
    CHECK(c.ok);
    CHECK(c.result.relations().empty());
  }
  SUBCASE("node: R[x,y]/(xy - p)") {
    PolyContext ctx{Z5, Regime::R(), {"x", "y"}};
    Polynomial rel = var(ctx, 0) * var(ctx, 1) - cst(ctx, 5);
    AffineAlgebra X(Z5, Regime::R(), {"x", "y"}, {rel});
    ReconstructionCertificate c = reconstruct_global_sections(X, 4);
    CHECK(c.ok);
    CHECK_FALSE(c.result.relations().empty());
  }
  SUBCASE("torsion line: R[x]/(px)") {
    PolyContext ctx{Z5, Regime::R(), {"x"}};
    AffineAlgebra X(Z5, Regime::R(), {"x"}, {var(ctx, 0) * Scalar::rational(5)});
    ReconstructionCertificate c = reconstruct_global_sections(X, 4);
    CHECK(c.ok);
  }
}

TEST_CASE("classification of the worked triples") {
  SUBCASE("two disks glue to an affine scheme") {
    ClassifyResult r = classify_triple(two_disks_triple(5), 3);
    CHECK(r.cls == TripleClass::affine);
  }
  SUBCASE("unit circle is certified non-affine with witness") {
    ClassifyResult r = classify_triple(unit_circle_triple(5), 2);
    CHECK(r.cls == TripleClass::not_affine);
    CHECK(r.reason == "d");
    CHECK(r.witness == "xb");
  }
  SUBCASE("inconsistent data is rejected before any search") {
    BasePair Z5 = BasePair::arithmetic_base(5);
    AffineAlgebra A(Z5, Regime::R_inv_pi(), {"x"});
    AlgebraFactor d0{"d0", {"u"}, {}};
    PolyContext c0{Z5, Regime::R_inv_pi(), {"u"}};
    // claims |x| <= 1 although x restricts to u + 1/5
    Polynomial img = var(c0, 0) + Polynomial::constant(c0, Scalar::pi_power(Z5, -1));
    AffineGluingTriple bad(A, {d0}, {{img}}, {SubdomainInequality{var(A.ctx(), 0), 0}});
    ClassifyResult r = classify_triple(bad, 2);
    CHECK(r.cls == TripleClass::not_affine);
    CHECK(r.reason == "c-data");
    CHECK_FALSE(r.witness.empty());
  }
}
