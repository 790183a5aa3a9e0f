#pragma once

// pi-adic precision-tracked arithmetic: elements of completed rings known only
// modulo pi^N. A TruncatedAlgebra is a finite product of factors, each a
// restricted-power-series algebra in standard form: finitely many variables
// modulo finitely many polynomial relations with coefficients in R, realized at
// every precision level N by the polynomial quotient over R/pi^N.
//
// Precision propagation is deliberately conservative: the min rule only, no
// automatic precision gain from valuation. Refinement is explicit, through the
// exact source expression an element was produced from.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/algebra.hpp"
#include "gluekit/linalg.hpp"

namespace gluekit {

// one factor of a truncated algebra, kept at exact (over_R) precision so the
// same presentation can be materialized at any level N
struct AlgebraFactor {
  std::string name;
  std::vector<std::string> vars;
  std::vector<Polynomial> rels;  // over_R polynomials in `vars`
};

class TruncatedAlgebra {
 public:
  TruncatedAlgebra(BasePair base, int N, std::vector<AlgebraFactor> factors)
      : base_(std::move(base)), N_(N), factors_(std::move(factors)) {
    if (N_ < 0) raise(ErrorKind::Internal, "negative precision level");
    for (const auto& f : factors_)
      for (const auto& r : f.rels) {
        if (r.ctx().base != base_ || r.ctx().regime != Regime::R() || r.ctx().vars != f.vars)
          raise(ErrorKind::RegimeMismatch, "factor relation context mismatch");
      }
  }

  const BasePair& base() const { return base_; }
  int level() const { return N_; }
  std::size_t factor_count() const { return factors_.size(); }
  const std::vector<AlgebraFactor>& factors() const { return factors_; }
  const AlgebraFactor& factor(std::size_t i) const { return factors_.at(i); }
  bool is_trivial() const { return N_ == 0; }

  // the i-th factor as a quotient algebra over R/pi^M
  AffineAlgebra factor_algebra(std::size_t i, int M) const {
    if (M < 1) raise(ErrorKind::UnsupportedRegime, "factor_algebra needs level >= 1");
    const AlgebraFactor& f = factors_.at(i);
    std::vector<Polynomial> rels;
    for (const auto& r : f.rels) rels.push_back(r.with_regime(Regime::R_mod_piN(M)));
    return AffineAlgebra(base_, Regime::R_mod_piN(M), f.vars, std::move(rels));
  }
  AffineAlgebra factor_algebra(std::size_t i) const { return factor_algebra(i, N_); }

  // the i-th factor at exact (over_R) precision
  AffineAlgebra factor_algebra_exact(std::size_t i) const {
    const AlgebraFactor& f = factors_.at(i);
    return AffineAlgebra(base_, Regime::R(), f.vars, f.rels);
  }

  TruncatedAlgebra at_level(int M) const { return TruncatedAlgebra(base_, M, factors_); }

  // same underlying presentation, precision levels aside
  bool same_family(const TruncatedAlgebra& o) const {
    if (base_ != o.base_ || factors_.size() != o.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].vars != o.factors_[i].vars || factors_[i].rels != o.factors_[i].rels)
        return false;
    return true;
  }
  bool same_tag(const TruncatedAlgebra& o) const { return N_ == o.N_ && same_family(o); }

  std::string str() const {
    std::string s = "B over " + base_.str() + " prec " + std::to_string(N_) + " {";
    for (const auto& f : factors_) {
      s += " factor " + f.name + ": vars";
      for (const auto& v : f.vars) s += " " + v;
      s += "; rels";
      for (const auto& r : f.rels) s += " " + r.str();
      s += ";";
    }
    return s + " }";
  }

 private:
  BasePair base_;
  int N_;
  std::vector<AlgebraFactor> factors_;
};

// An element of a truncated algebra asserted only modulo pi^precision, one
// component per factor, stored in normal form modulo (relations + pi^precision).
// Elements built from exact data carry their exact representatives so they can
// be re-evaluated at higher precision.
class PrecisionElement {
 public:
  PrecisionElement(std::shared_ptr<const TruncatedAlgebra> alg, int precision,
                   std::vector<Polynomial> components,
                   std::optional<std::vector<Polynomial>> exact_source = std::nullopt)
      : alg_(std::move(alg)), precision_(precision) {
    if (!alg_) raise(ErrorKind::Internal, "precision element without algebra");
    if (precision_ < 1) raise(ErrorKind::Internal, "precision must be >= 1");
    if (components.size() != alg_->factor_count())
      raise(ErrorKind::AlgebraMismatch, "component count mismatch");
    for (std::size_t i = 0; i < components.size(); ++i) {
      AffineAlgebra fa = alg_->factor_algebra(i, precision_);
      components_.push_back(fa.nf(components[i].with_regime(Regime::R_mod_piN(precision_))));
    }
    if (exact_source) {
      if (exact_source->size() != alg_->factor_count())
        raise(ErrorKind::AlgebraMismatch, "exact source component count mismatch");
      exact_ = std::move(exact_source);
    }
  }

  // build from exact over_R representatives, remembering them as the source
  static PrecisionElement from_exact(std::shared_ptr<const TruncatedAlgebra> alg, int precision,
                                     std::vector<Polynomial> exact) {
    std::vector<Polynomial> comps = exact;
    return PrecisionElement(std::move(alg), precision, std::move(comps), std::move(exact));
  }

  static PrecisionElement zero(std::shared_ptr<const TruncatedAlgebra> alg, int precision) {
    std::vector<Polynomial> ex;
    for (std::size_t i = 0; i < alg->factor_count(); ++i)
      ex.push_back(Polynomial(PolyContext{alg->base(), Regime::R(), alg->factor(i).vars}));
    return from_exact(std::move(alg), precision, std::move(ex));
  }
  static PrecisionElement one(std::shared_ptr<const TruncatedAlgebra> alg, int precision) {
    std::vector<Polynomial> ex;
    for (std::size_t i = 0; i < alg->factor_count(); ++i)
      ex.push_back(Polynomial::constant(PolyContext{alg->base(), Regime::R(), alg->factor(i).vars},
                                        Scalar::one(alg->base().profile)));
    return from_exact(std::move(alg), precision, std::move(ex));
  }

  const std::shared_ptr<const TruncatedAlgebra>& algebra() const { return alg_; }
  int precision() const { return precision_; }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& component(std::size_t i) const { return components_.at(i); }
  bool has_exact_source() const { return exact_.has_value(); }
  const std::vector<Polynomial>& exact_source() const {
    if (!exact_) raise(ErrorKind::NoExactSource, "element has no exact source");
    return *exact_;
  }

  bool is_zero() const {
    for (const auto& c : components_)
      if (!c.is_zero()) return false;
    return true;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) s += " | ";
      s += components_[i].str();
    }
    return "(" + s + ") mod pi^" + std::to_string(precision_);
  }

 private:
  std::shared_ptr<const TruncatedAlgebra> alg_;
  int precision_;
  std::vector<Polynomial> components_;
  std::optional<std::vector<Polynomial>> exact_;
};

namespace detail {

inline void check_same_algebra(const PrecisionElement& a, const PrecisionElement& b) {
  if (!a.algebra()->same_family(*b.algebra()))
    raise(ErrorKind::AlgebraMismatch, "precision elements live in different algebras");
}

}  // namespace detail

// equality at precision M: requires M <= both precisions; compares normal forms
// of the difference mod pi^M
inline bool prec_equal_at(const PrecisionElement& a, const PrecisionElement& b, int M) {
  detail::check_same_algebra(a, b);
  if (M > a.precision() || M > b.precision() || M < 1)
    raise(ErrorKind::PrecisionLoss, "comparison precision exceeds element precision");
  for (std::size_t i = 0; i < a.components().size(); ++i) {
    AffineAlgebra fa = a.algebra()->factor_algebra(i, M);
    Polynomial d = a.component(i).with_regime(Regime::R_mod_piN(M)) -
                   b.component(i).with_regime(Regime::R_mod_piN(M));
    if (!fa.is_zero_elem(d)) return false;
  }
  return true;
}

inline PrecisionElement prec_add(const PrecisionElement& a, const PrecisionElement& b) {
  detail::check_same_algebra(a, b);
  int m = std::min(a.precision(), b.precision());
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < a.components().size(); ++i)
    comps.push_back(a.component(i).with_regime(Regime::R_mod_piN(m)) +
                    b.component(i).with_regime(Regime::R_mod_piN(m)));
  std::optional<std::vector<Polynomial>> src;
  if (a.has_exact_source() && b.has_exact_source()) {
    std::vector<Polynomial> s;
    for (std::size_t i = 0; i < a.components().size(); ++i)
      s.push_back(a.exact_source()[i] + b.exact_source()[i]);
    src = std::move(s);
  }
  return PrecisionElement(a.algebra(), m, std::move(comps), std::move(src));
}

inline PrecisionElement prec_neg(const PrecisionElement& a) {
  std::vector<Polynomial> comps;
  for (const auto& c : a.components()) comps.push_back(-c);
  std::optional<std::vector<Polynomial>> src;
  if (a.has_exact_source()) {
    std::vector<Polynomial> s;
    for (const auto& c : a.exact_source()) s.push_back(-c);
    src = std::move(s);
  }
  return PrecisionElement(a.algebra(), a.precision(), std::move(comps), std::move(src));
}

inline PrecisionElement prec_sub(const PrecisionElement& a, const PrecisionElement& b) {
  return prec_add(a, prec_neg(b));
}

// min-rule multiplication; valuation gain is intentionally not exploited
inline PrecisionElement prec_mul(const PrecisionElement& a, const PrecisionElement& b) {
  detail::check_same_algebra(a, b);
  int m = std::min(a.precision(), b.precision());
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < a.components().size(); ++i)
    comps.push_back(a.component(i).with_regime(Regime::R_mod_piN(m)) *
                    b.component(i).with_regime(Regime::R_mod_piN(m)));
  std::optional<std::vector<Polynomial>> src;
  if (a.has_exact_source() && b.has_exact_source()) {
    std::vector<Polynomial> s;
    for (std::size_t i = 0; i < a.components().size(); ++i)
      s.push_back(a.exact_source()[i] * b.exact_source()[i]);
    src = std::move(s);
  }
  return PrecisionElement(a.algebra(), m, std::move(comps), std::move(src));
}

namespace detail {

// All residue-class monomials of the factor's variables with total degree <= d,
// in a fixed deterministic order.
inline std::vector<Exps> monomials_up_to(std::size_t nvars, unsigned d) {
  std::vector<Exps> out{Exps(nvars, 0)};
  std::size_t lo = 0;
  for (unsigned deg = 1; deg <= d; ++deg) {
    std::size_t hi = out.size();
    for (std::size_t k = lo; k < hi; ++k)
      for (std::size_t v = 0; v < nvars; ++v) {
        Exps e = out[k];
        e[v] += 1;
        // avoid duplicates: only increment variables >= the last incremented one
        bool canonical = true;
        for (std::size_t w = v + 1; w < nvars; ++w)
          if (out[k][w] > 0) canonical = false;
        if (canonical) out.push_back(e);
      }
    lo = hi;
  }
  std::sort(out.begin(), out.end(), [](const Exps& a, const Exps& b) {
    return mono_less(a, b, MonomialOrder::deglex);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Solve g * x == 1 in the factor algebra mod pi, with x supported on monomials
// of degree <= d, by linear algebra. Returns nullopt when no such x exists in
// the searched degree range.
inline std::optional<Polynomial> invert_mod_pi(const AffineAlgebra& fa1, const Polynomial& g,
                                               unsigned d) {
  const PolyContext& ctx = fa1.ctx();
  std::vector<Exps> cols = monomials_up_to(ctx.vars.size(), d);
  // row space: monomials appearing in any nf(g * m)
  std::vector<Polynomial> images;
  std::vector<Exps> rows;
  for (const auto& e : cols) {
    Polynomial m(ctx);
    m.add_term(e, Scalar::one(ctx.base.profile));
    Polynomial im = fa1.nf(g * m);
    images.push_back(im);
    for (const auto& [me, mc] : im.terms())
      if (std::find(rows.begin(), rows.end(), me) == rows.end()) rows.push_back(me);
  }
  Exps unit_mono(ctx.vars.size(), 0);
  if (std::find(rows.begin(), rows.end(), unit_mono) == rows.end()) rows.push_back(unit_mono);
  std::sort(rows.begin(), rows.end(), [](const Exps& a, const Exps& b) {
    return mono_less(a, b, MonomialOrder::deglex);
  });
  Mat A(rows.size(), Vec(cols.size(), Scalar::zero(ctx.base.profile)));
  Vec b(rows.size(), Scalar::zero(ctx.base.profile));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) A[i][j] = images[j].coeff(rows[i]);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] == unit_mono) b[i] = Scalar::one(ctx.base.profile);
  auto sol = solve_integral_mod(ctx.base, A, b, 1);
  if (!sol) return std::nullopt;
  Polynomial x(ctx);
  for (std::size_t j = 0; j < cols.size(); ++j) x.add_term(cols[j], (*sol)[j]);
  return fa1.nf(x);
}

}  // namespace detail

// Multiplicative inverse at the element's precision, factor by factor: a seed
// inverse modulo pi found by bounded-degree linear search in the residue
// algebra, then lifted by Newton iteration x <- x(2 - a x) mod pi^N.
inline PrecisionElement prec_invert(const PrecisionElement& a, unsigned degree_bound = 6) {
  int N = a.precision();
  Profile pr = a.algebra()->base().profile;
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < a.components().size(); ++i) {
    AffineAlgebra fa1 = a.algebra()->factor_algebra(i, 1);
    Polynomial g1 = a.component(i).with_regime(Regime::R_mod_piN(1));
    auto seed = detail::invert_mod_pi(fa1, g1, degree_bound);
    if (!seed)
      raise(ErrorKind::NotAUnit, "no inverse modulo pi in factor " + a.algebra()->factor(i).name +
                                     " (searched degree <= " + std::to_string(degree_bound) + ")");
    AffineAlgebra fa = a.algebra()->factor_algebra(i, N);
    Polynomial x = seed->with_regime(Regime::R_mod_piN(N));
    Polynomial g = a.component(i);
    Polynomial two = Polynomial::constant(fa.ctx(), Scalar::integer(2, pr));
    int k = 1;
    while (k < N) {
      x = fa.nf(x * (two - g * x));
      k *= 2;
    }
    if (!fa.equal(g * x, fa.one()))
      raise(ErrorKind::NotAUnit, "Newton lift failed to certify an inverse");
    comps.push_back(x);
  }
  return PrecisionElement(a.algebra(), N, std::move(comps));
}

// Re-evaluate an element's exact source at a (strictly larger) precision.
inline PrecisionElement refine(const PrecisionElement& a, int new_precision) {
  if (!a.has_exact_source())
    raise(ErrorKind::NoExactSource, "cannot refine an approximate-only element");
  if (new_precision <= a.precision())
    raise(ErrorKind::PrecisionLoss, "refine requires a strictly larger precision");
  return PrecisionElement::from_exact(a.algebra(), new_precision, a.exact_source());
}

}  // namespace gluekit
