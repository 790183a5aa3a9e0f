#pragma once

// Truncated formal completions of finite-type R-algebras, and the pi-torsion
// analysis: the torsion bound N0 (smallest N with B[pi^N] = B[pi^infinity],
// certified by stabilization of the colon chain) and the torsion split
// B ~ B' x_{B'''} B'' with B' = B/B[pi^infinity], B'' = B/pi^N0 B,
// B''' = B'/pi^N0.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/precision.hpp"

namespace gluekit {

struct TorsionCertificate {
  long N0 = 0;
  // stabilization witness: (I : pi^N0) == (I : pi^(N0+1)) == (I : pi^infinity)
  std::vector<Polynomial> torsion_ideal_gens;  // generators of (I : pi^N0)
  std::string summary;
};

// The completion D^ of a finite-type R-algebra, represented by its tower of
// pi^N-truncations. Truncations are memoized per level; each is the literal
// quotient of the source presentation, so the tower surjections are the
// identity on representatives.
class CompletionModel {
 public:
  explicit CompletionModel(AffineAlgebra source) : source_(std::move(source)) {
    if (source_.regime() != Regime::R())
      raise(ErrorKind::RegimeMismatch, "completion needs a source algebra over R");
  }

  const AffineAlgebra& source() const { return source_; }

  const TruncatedAlgebra& truncation(int N) const {
    auto it = truncations_.find(N);
    if (it != truncations_.end()) return it->second;
    AlgebraFactor f{"main", source_.vars(), source_.relations().gens};
    auto [pos, _] = truncations_.emplace(N, TruncatedAlgebra(source_.base(), N, {f}));
    return pos->second;
  }

  bool has_torsion_bound() const { return cert_.has_value(); }
  const TorsionCertificate& torsion_certificate() const {
    if (!cert_) raise(ErrorKind::Internal, "torsion bound not computed");
    return *cert_;
  }

  friend long torsion_bound(CompletionModel& model, long cap);

 private:
  AffineAlgebra source_;
  mutable std::map<int, TruncatedAlgebra> truncations_;
  std::optional<TorsionCertificate> cert_;
};

// The pi^N-truncation of an algebra over R, as a single-factor TruncatedAlgebra.
inline TruncatedAlgebra complete(const AffineAlgebra& algebra, int N) {
  if (algebra.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "complete needs an algebra over R");
  AlgebraFactor f{"main", algebra.vars(), algebra.relations().gens};
  return TruncatedAlgebra(algebra.base(), N, {f});
}

// Smallest N0 <= cap with (I : pi^N0) = (I : pi^infinity), i.e. with the
// pi-torsion of B = R[x]/I stabilized: B[pi^infinity] = B[pi^N0].
inline long torsion_bound(CompletionModel& model, long cap) {
  if (cap < 1) raise(ErrorKind::Internal, "torsion bound cap must be >= 1");
  if (model.cert_) {
    if (model.cert_->N0 <= cap) return model.cert_->N0;
    raise(ErrorKind::CapExceeded, "certified torsion bound exceeds the requested cap");
  }
  const IdealPresentation& I = model.source().relations();
  IdealPresentation sat = pi_saturation(I);
  for (long N = 0; N <= cap; ++N) {
    IdealPresentation colon = N == 0 ? I : colon_pi_power(I, N);
    if (ideal_equal(colon, sat)) {
      TorsionCertificate cert;
      cert.N0 = N;
      cert.torsion_ideal_gens = groebner_basis(sat).basis;
      cert.summary = "(I : pi^" + std::to_string(N) + ") = (I : pi^inf); torsion ideal has " +
                     std::to_string(cert.torsion_ideal_gens.size()) + " reduced generators";
      model.cert_ = std::move(cert);
      return N;
    }
  }
  raise(ErrorKind::CapExceeded,
        "pi-torsion did not stabilize by pi^" + std::to_string(cap) +
            "; raise the precision cap");
}

struct TorsionSplit {
  AffineAlgebra B_prime;          // B/B[pi^infinity] = R[x]/sat(I), over R
  TruncatedAlgebra B_dblprime;    // B/pi^N0 (level-0 trivial ring when N0 = 0)
  TruncatedAlgebra B_triple;      // B'/pi^N0
  long N0 = 0;
  int verified_precision = 0;     // reconstruction checked modulo pi^this
};

namespace detail {

// Injectivity of B -> B' x B'' modulo pi^prec: an element lying in both
// (sat(I) + pi^prec) and (I + pi^N0) must lie in I + pi^prec. Checked by
// ideal computations over R.
inline bool split_injectivity(const IdealPresentation& I, const IdealPresentation& sat, long N0,
                              int prec) {
  const PolyContext& ctx = I.ctx;
  Polynomial piPrec = Polynomial::constant(ctx, Scalar::pi_power(ctx.base, prec));
  Polynomial piN0 = Polynomial::constant(ctx, Scalar::pi_power(ctx.base, N0));
  IdealPresentation J1 = sat;
  J1.gens.push_back(piPrec);
  IdealPresentation J2 = I;
  J2.gens.push_back(piN0);
  IdealPresentation inter = ideal_intersection(IdealPresentation(ctx, J1.gens),
                                               IdealPresentation(ctx, J2.gens));
  IdealPresentation target(ctx, I.gens);
  target.gens.push_back(piPrec);
  return ideal_contains(target, inter);
}

// Surjectivity spot check on a generating family of the fiber product: pairs
// (m, m) for monomials m, (pi^N0 m, 0), and (0, g m) for torsion-ideal
// generators g, each verified to be the image of an explicit element of B.
inline bool split_surjectivity(const AffineAlgebra& B, const AffineAlgebra& Bp, long N0, int prec,
                               const std::vector<Polynomial>& sat_gens, unsigned degree_bound) {
  const PolyContext& ctx = B.ctx();
  AffineAlgebra Bp_prec = Bp.with_regime(Regime::R_mod_piN(prec));
  std::optional<AffineAlgebra> B_N0;
  if (N0 > 0) B_N0 = B.with_regime(Regime::R_mod_piN(static_cast<int>(N0)));
  auto pair_hit_by = [&](const Polynomial& b, const Polynomial& u, const Polynomial& w) {
    bool ok1 = Bp_prec.equal(b.with_regime(Regime::R_mod_piN(prec)),
                             u.with_regime(Regime::R_mod_piN(prec)));
    bool ok2 = !B_N0 || B_N0->equal(b.with_regime(B_N0->regime()), w.with_regime(B_N0->regime()));
    return ok1 && ok2;
  };
  for (const auto& e : detail::monomials_up_to(ctx.vars.size(), degree_bound)) {
    Polynomial m(ctx);
    m.add_term(e, Scalar::one(ctx.base.profile));
    // (m, m) is hit by m itself
    if (!pair_hit_by(m, m, m)) return false;
    // (pi^N0 m, 0): hit by pi^N0 m
    Polynomial pm = m * Scalar::pi_power(ctx.base, N0);
    if (!pair_hit_by(pm, pm, Polynomial(ctx))) return false;
    // (0, g m) for each torsion generator g: hit by g m, which dies in B'
    for (const auto& g : sat_gens) {
      Polynomial gm = B.nf(g * m);
      if (!pair_hit_by(gm, Polynomial(ctx), gm)) return false;
    }
  }
  return true;
}

}  // namespace detail

// The Step-3 torsion split, with the reconstruction B ~ B' x_{B'''} B''
// verified modulo pi^prec (injectivity by ideal arithmetic, surjectivity on a
// generating family of the fiber product).
inline TorsionSplit torsion_split(CompletionModel& model, int prec, long cap = 8,
                                  unsigned degree_bound = 3) {
  long N0 = torsion_bound(model, cap);
  const AffineAlgebra& B = model.source();
  const PolyContext& ctx = B.ctx();
  IdealPresentation sat = pi_saturation(B.relations());
  AffineAlgebra Bp(ctx.base, Regime::R(), ctx.vars, sat.gens);
  int n0 = static_cast<int>(N0);
  AlgebraFactor fB{"main", ctx.vars, B.relations().gens};
  AlgebraFactor fBp{"main", ctx.vars, sat.gens};
  TorsionSplit out{Bp, TruncatedAlgebra(ctx.base, n0, {fB}), TruncatedAlgebra(ctx.base, n0, {fBp}),
                   N0, 0};
  if (prec < 1) raise(ErrorKind::Internal, "torsion_split precision must be >= 1");
  if (!detail::split_injectivity(B.relations(), sat, N0, prec))
    raise(ErrorKind::VerificationFailed, "torsion split reconstruction is not injective mod pi^" +
                                             std::to_string(prec));
  std::vector<Polynomial> torsion_gens;
  for (const auto& g : sat.gens)
    if (!ideal_membership(g, groebner_basis(B.relations()))) torsion_gens.push_back(g);
  if (!detail::split_surjectivity(B, Bp, N0, prec, torsion_gens, degree_bound))
    raise(ErrorKind::VerificationFailed, "torsion split reconstruction is not surjective mod pi^" +
                                             std::to_string(prec));
  out.verified_precision = prec;
  return out;
}

}  // namespace gluekit
