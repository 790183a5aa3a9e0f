#pragma once

// Finite-type algebras over R, R[1/pi], or R/pi^N: ambient variables plus a
// relation ideal with cached Groebner data. Elements are ambient polynomials;
// equality is equality of normal forms.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/groebner.hpp"

namespace gluekit {

class AffineAlgebra {
 public:
  AffineAlgebra(BasePair base, Regime regime, std::vector<std::string> vars,
                std::vector<Polynomial> relations = {})
      : ctx_{std::move(base), regime, std::move(vars)},
        relations_(std::make_shared<IdealPresentation>(ctx_, std::move(relations))) {}

  const PolyContext& ctx() const { return ctx_; }
  const BasePair& base() const { return ctx_.base; }
  const Regime& regime() const { return ctx_.regime; }
  const std::vector<std::string>& vars() const { return ctx_.vars; }
  const IdealPresentation& relations() const { return *relations_; }

  Polynomial zero() const { return Polynomial(ctx_); }
  Polynomial one() const { return Polynomial::constant(ctx_, Scalar::one(ctx_.base.profile)); }
  Polynomial var(std::size_t i) const { return Polynomial::variable(ctx_, i); }
  Polynomial constant(const Scalar& c) const { return Polynomial::constant(ctx_, c); }

  Polynomial nf(const Polynomial& f) const {
    if (relations_->gens.empty()) return f;
    ensure_basis();
    return normal_form(f, *relations_);
  }

  bool equal(const Polynomial& a, const Polynomial& b) const { return nf(a - b).is_zero(); }
  bool is_zero_elem(const Polynomial& f) const { return nf(f).is_zero(); }

  // the same presentation with another coefficient regime
  AffineAlgebra with_regime(const Regime& r) const {
    std::vector<Polynomial> rels;
    for (const auto& g : relations_->gens) rels.push_back(g.with_regime(r));
    return AffineAlgebra(ctx_.base, r, ctx_.vars, std::move(rels));
  }

  bool same_presentation(const AffineAlgebra& o) const {
    return ctx_ == o.ctx_ && relations_->gens == o.relations_->gens;
  }

 private:
  void ensure_basis() const { ensure_groebner(*relations_); }

  PolyContext ctx_;
  // shared so the Groebner cache is filled at most once per ideal; the fill is
  // idempotent (same reduced basis regardless of which caller wins)
  std::shared_ptr<IdealPresentation> relations_;
};

}  // namespace gluekit
