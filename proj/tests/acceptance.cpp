// Acceptance gate: one certified check per criterion, one line of output
// each. Exits nonzero if any criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gluekit/completion.hpp"
#include "gluekit/models.hpp"
#include "test_util.hpp"

using namespace gluekit;

namespace {

int failures = 0;

void criterion(int number, const std::string& what, const std::function<bool()>& body) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = body();
  } catch (const std::exception& e) {
    detail = std::string(" (") + e.what() + ")";
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  if (!ok) ++failures;
  std::cout << "criterion " << number << " [" << what << "]: " << (ok ? "pass" : "FAIL") << detail
            << " [" << ms << " ms]" << std::endl;
}

Polynomial cst(const PolyContext& ctx, long n) {
  return Polynomial::constant(ctx, Scalar::integer(n, ctx.base.profile));
}

struct Refs {
  Polynomial alpha, beta, gamma;
};

Refs reference_generators(const AffineGluingTriple& T, long p) {
  const PolyContext& ctx = T.A().ctx();
  Polynomial x = Polynomial::variable(ctx, 0);
  Polynomial w = cst(ctx, 1) - x * Scalar::rational(p);
  return Refs{x * w * w, x * x * w * Scalar::rational(p), x * Scalar::rational(p)};
}

bool two_disks_presentation(long p) {
  AffineGluingTriple T = two_disks_triple(p);
  GluedRingResult res = pullback_ring(T, 6, 8);
  Refs refs = reference_generators(T, p);
  std::vector<Polynomial> asides;
  std::vector<std::string> names;
  for (const auto& g : res.gens) {
    asides.push_back(g.a);
    names.push_back(g.name);
  }
  if (!same_subalgebra_degreewise(T.A(), asides, {refs.alpha, refs.beta, refs.gamma}, 6))
    return false;
  auto qa = express_in_subalgebra(T.A(), asides, names, refs.alpha, 3);
  auto qb = express_in_subalgebra(T.A(), asides, names, refs.beta, 3);
  auto qg = express_in_subalgebra(T.A(), asides, names, refs.gamma, 3);
  if (!qa || !qb || !qg) return false;
  Polynomial one = cst(res.dctx, 1);
  Polynomial r1 = *qa * Scalar::rational(p) - *qg * (one - *qg) * (one - *qg);
  Polynomial r2 = *qb * Scalar::rational(p) - *qg * *qg * (one - *qg);
  Polynomial r3 = *qg * *qa - (one - *qg) * *qb;
  return ideal_membership(r1, res.relation_ideal) && ideal_membership(r2, res.relation_ideal) &&
         ideal_membership(r3, res.relation_ideal);
}

ModulePresentation random_module(const AffineAlgebra& ring, std::size_t max_gens, int max_deg,
                                 std::size_t max_rels) {
  std::size_t n = static_cast<std::size_t>(testutil::rand_int(1, static_cast<long>(max_gens)));
  std::size_t r = static_cast<std::size_t>(testutil::rand_int(0, static_cast<long>(max_rels)));
  std::vector<std::vector<Polynomial>> cols;
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<Polynomial> col;
    for (std::size_t i = 0; i < n; ++i)
      col.push_back(testutil::rand_poly(ring.ctx(), max_deg, 25, 3));
    cols.push_back(std::move(col));
  }
  return ModulePresentation(ring, n, std::move(cols));
}

bool module_round_trip_at(const ModulePresentation& M, int prec, unsigned glue_deg,
                          unsigned cert_deg) {
  GluedModule g = glue_module(triple_of_module(M, prec), glue_deg);
  for (long s : g.F_gen_scale)
    if (s != 0) return false;
  std::vector<std::vector<Polynomial>> S(M.n_gens), T(g.M.n_gens);
  for (std::size_t i = 0; i < M.n_gens; ++i)
    for (std::size_t s = 0; s < g.M.n_gens; ++s)
      S[i].push_back(g.gen_F[s][i].with_regime(Regime::R()));
  for (std::size_t s = 0; s < g.M.n_gens; ++s)
    for (std::size_t i = 0; i < M.n_gens; ++i) T[s].push_back(g.F_gen_lift[i][s]);
  return certify_isomorphism(g.M, M, S, T, cert_deg);
}

// the syzygy degree bound controls completeness of the glued presentation:
// annihilators of 3x3 degree-2 relation matrices can need coefficient degree
// up to 6, so escalate the budget when the cheap one does not certify
bool module_round_trip(const ModulePresentation& M, int prec) {
  return module_round_trip_at(M, prec, 4, 4) || module_round_trip_at(M, prec, 6, 8);
}

// every relation of one run lies in the other's relation ideal modulo pi^8
bool relations_agree_mod(const GluedRingResult& a, const GluedRingResult& b, int level) {
  std::vector<Polynomial> rels;
  for (const auto& r : b.relations()) rels.push_back(r.with_regime(Regime::R_mod_piN(level)));
  AffineAlgebra quo(b.dctx.base, Regime::R_mod_piN(level), b.dctx.vars, std::move(rels));
  for (const auto& r : a.relations())
    if (!quo.is_zero_elem(r.with_regime(Regime::R_mod_piN(level)))) return false;
  return true;
}

}  // namespace

int main() {
  criterion(1, "two-disks presentation, p in {2,3,5,7}", [] {
    for (long p : {2L, 3L, 5L, 7L})
      if (!two_disks_presentation(p)) return false;
    return true;
  });

  criterion(2, "verification D[1/pi] = A and D-hat = B at N <= 4", [] {
    AffineGluingTriple T = two_disks_triple(5);
    GluedRingResult res = pullback_ring(T, 6, 4);
    return verify_glued(res, T, 4).ok;
  });

  criterion(3, "unit-circle certified non-affine with witness", [] {
    for (long p : {3L, 5L}) {
      ClassifyResult r = classify_triple(unit_circle_triple(p), 1);
      if (r.cls != TripleClass::not_affine || r.reason != "d" || r.witness != "xb") return false;
    }
    return true;
  });

  criterion(4, "200 random module gluing round trips per base ring", [] {
    BasePair Z5 = BasePair::arithmetic_base(5);
    AffineAlgebra scalars(Z5, Regime::R(), {});
    AffineAlgebra line(Z5, Regime::R(), {"x"});
    for (int t = 0; t < 200; ++t)
      if (!module_round_trip(random_module(scalars, 3, 0, 3), 8)) return false;
    for (int t = 0; t < 200; ++t)
      if (!module_round_trip(random_module(line, 3, 2, 3), 5)) return false;
    return true;
  });

  criterion(5, "torsion split reconstruction, N0 in {0,1,2}", [] {
    BasePair Z5 = BasePair::arithmetic_base(5);
    PolyContext ctx{Z5, Regime::R(), {"y"}};
    for (long k = 0; k <= 2; ++k) {
      std::vector<Polynomial> rels;
      if (k > 0)
        rels.push_back(Polynomial::variable(ctx, 0) * Scalar::pi_power(Z5, k));
      CompletionModel m(AffineAlgebra(Z5, Regime::R(), {"y"}, rels));
      if (torsion_bound(m, 6) != k) return false;
      int prec = static_cast<int>(2 * k + 4);
      TorsionSplit s = torsion_split(m, prec);
      if (s.N0 != k || s.verified_precision != prec) return false;
    }
    return true;
  });

  criterion(6, "global-sections reconstruction for the three worked algebras", [] {
    BasePair Z5 = BasePair::arithmetic_base(5);
    PolyContext c1{Z5, Regime::R(), {"x"}};
    PolyContext c2{Z5, Regime::R(), {"x", "y"}};
    AffineAlgebra poly(Z5, Regime::R(), {"x"});
    AffineAlgebra node(Z5, Regime::R(), {"x", "y"},
                       {Polynomial::variable(c2, 0) * Polynomial::variable(c2, 1) - cst(c2, 5)});
    AffineAlgebra tline(Z5, Regime::R(), {"x"},
                        {Polynomial::variable(c1, 0) * Scalar::rational(5)});
    return reconstruct_global_sections(poly, 4, 6).ok &&
           reconstruct_global_sections(node, 4, 6).ok &&
           reconstruct_global_sections(tline, 4, 6).ok;
  });

  criterion(7, "Neron component criterion, 20-case table", [] {
    mpq_class vals[] = {1, mpq_class(1, 2), 2, mpq_class(3, 2), mpq_class(1, 3)};
    if (!neron_iso_test(neron_gm_triple(1), neron_gm_triple(1))) return false;
    if (neron_iso_test(neron_gm_triple(1), neron_gm_triple(mpq_class(1, 2)))) return false;
    int cases = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) {
        if (neron_iso_test(neron_gm_triple(vals[i]), neron_gm_triple(vals[j])) != (i == j))
          return false;
        ++cases;
      }
    return cases == 20;
  });

  criterion(8, "precision stability: prec 12 agrees with prec 8 modulo pi^8", [] {
    AffineGluingTriple T = two_disks_triple(5);
    GluedRingResult lo = pullback_ring(T, 6, 8);
    GluedRingResult hi = pullback_ring(T, 6, 12);
    if (lo.gens.size() != hi.gens.size()) return false;
    for (std::size_t i = 0; i < lo.gens.size(); ++i) {
      if (!(lo.gens[i].a == hi.gens[i].a)) return false;
      for (std::size_t f = 0; f < T.factor_count(); ++f) {
        AffineAlgebra q(T.base(), Regime::R_mod_piN(8), T.factor(f).vars, {});
        if (!q.equal(lo.gens[i].b[f].with_regime(Regime::R_mod_piN(8)),
                     hi.gens[i].b[f].with_regime(Regime::R_mod_piN(8))))
          return false;
      }
    }
    if (!relations_agree_mod(lo, hi, 8) || !relations_agree_mod(hi, lo, 8)) return false;
    if (!verify_glued(hi, T, 8).ok) return false;
    // the module pipeline agrees as well: invariants below pi^8 coincide
    BasePair Z5 = BasePair::arithmetic_base(5);
    PolyContext ctx{Z5, Regime::R(), {}};
    ModulePresentation M(AffineAlgebra(Z5, Regime::R(), {}), 2,
                         {{cst(ctx, 25), cst(ctx, 0)}, {cst(ctx, 0), cst(ctx, 5)}});
    ModuleInvariants i8 = smith_invariants(glue_module(triple_of_module(M, 8)).M);
    ModuleInvariants i12 = smith_invariants(glue_module(triple_of_module(M, 12)).M);
    return i8 == i12;
  });

  std::cout << (failures == 0 ? "acceptance: all criteria pass" : "acceptance: FAILURES")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
