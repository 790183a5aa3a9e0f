#pragma once

// Groebner engine for the three coefficient regimes.
//
//   over_R_inv_pi : classical Buchberger over the fraction field.
//   over_R        : Buchberger over the valuation ring (reduction allowed when
//                   the divisor's leading coefficient has valuation <= the
//                   target coefficient's; S-pair coefficient pi^max(va,vb)).
//   over_R_mod_piN: the same, plus annihilator pairs pi^(N-v) * g for basis
//                   elements with non-unit leading coefficient.
//
// Reduced bases normalize leading coefficients to 1 (field) or pi^v (ring
// regimes) and fully tail-reduce, which makes normal forms canonical.

#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "gluekit/polynomial.hpp"

namespace gluekit {

struct IdealPresentation {
  PolyContext ctx;
  std::vector<Polynomial> gens;
  // cached reduced Groebner basis + its monomial order
  std::optional<MonomialOrder> basis_order;
  std::vector<Polynomial> basis;

  explicit IdealPresentation(PolyContext c) : ctx(std::move(c)) {}
  IdealPresentation(PolyContext c, std::vector<Polynomial> g)
      : ctx(std::move(c)), gens(std::move(g)) {
    for (const auto& p : gens)
      if (p.ctx() != ctx) raise(ErrorKind::RegimeMismatch, "generator context mismatch");
  }
};

namespace detail {

// one reduction step: can (and how) the term (e, c) be cancelled by g?
inline bool coeff_divides(const Scalar& lead, const Scalar& c, const PolyContext& ctx, Scalar& q) {
  switch (ctx.regime.kind) {
    case RegimeKind::over_R_inv_pi:
      q = c / lead;
      return true;
    case RegimeKind::over_R:
    case RegimeKind::over_R_mod_piN:
      return Scalar::divide_dvr(c, lead, ctx.base, q);
  }
  return false;
}

}  // namespace detail

// full multivariate division: the remainder of f modulo the list G
inline Polynomial reduce_by(const Polynomial& f, const std::vector<Polynomial>& G,
                            MonomialOrder order) {
  const PolyContext& ctx = f.ctx();
  Polynomial rem(ctx);
  Polynomial cur = f;
  while (!cur.is_zero()) {
    auto [e, c] = cur.leading_term(order);
    bool reduced = false;
    for (const auto& g : G) {
      if (g.is_zero()) continue;
      auto [ge, gc] = g.leading_term(order);
      if (!mono_divides(ge, e)) continue;
      Scalar q;
      if (!detail::coeff_divides(gc, c, ctx, q)) continue;
      // cur -= q * x^(e-ge) * g
      Polynomial sub(ctx);
      Exps shift = mono_div(e, ge);
      for (const auto& [te, tc] : g.terms()) sub.add_term(mono_mul(te, shift), tc * q);
      cur = cur - sub;
      reduced = true;
      break;
    }
    if (!reduced) {
      rem.add_term(e, c);
      Polynomial head(ctx);
      head.add_term(e, c);
      cur = cur - head;
    }
  }
  return rem;
}

namespace detail {

// normalize the leading coefficient: monic over the field, pi^v otherwise
inline Polynomial normalize_lead(const Polynomial& f, MonomialOrder order) {
  if (f.is_zero()) return f;
  const PolyContext& ctx = f.ctx();
  auto [e, c] = f.leading_term(order);
  if (ctx.regime.kind == RegimeKind::over_R_inv_pi) return f * (Scalar::one(ctx.base.profile) / c);
  long v = c.valuation(ctx.base).v;
  Scalar unit = c / Scalar::pi_power(ctx.base, v);  // unit part of the lead coefficient
  Scalar inv = Scalar::one(ctx.base.profile) / unit;
  if (ctx.regime.kind == RegimeKind::over_R_mod_piN)
    inv = inv.reduce_mod_piN(ctx.base, ctx.regime.N);
  return f * inv;
}

inline Polynomial spair(const Polynomial& f, const Polynomial& g, MonomialOrder order) {
  const PolyContext& ctx = f.ctx();
  auto [fe, fc] = f.leading_term(order);
  auto [ge, gc] = g.leading_term(order);
  Exps m = mono_lcm(fe, ge);
  Scalar cf, cg;
  if (ctx.regime.kind == RegimeKind::over_R_inv_pi) {
    cf = Scalar::one(ctx.base.profile) / fc;
    cg = Scalar::one(ctx.base.profile) / gc;
  } else {
    long vf = fc.valuation(ctx.base).v, vg = gc.valuation(ctx.base).v;
    Scalar L = Scalar::pi_power(ctx.base, std::max(vf, vg));
    cf = L / fc;
    cg = L / gc;
  }
  Polynomial a(ctx), b(ctx);
  Exps sf = mono_div(m, fe), sg = mono_div(m, ge);
  for (const auto& [e, c] : f.terms()) a.add_term(mono_mul(e, sf), c * cf);
  for (const auto& [e, c] : g.terms()) b.add_term(mono_mul(e, sg), c * cg);
  return a - b;
}

}  // namespace detail

// Buchberger. Returns the reduced basis for the ideal under `order`.
inline std::vector<Polynomial> buchberger(const PolyContext& ctx,
                                          const std::vector<Polynomial>& gens,
                                          MonomialOrder order) {
  if (ctx.regime.kind == RegimeKind::over_R_mod_piN && ctx.regime.N < 1)
    raise(ErrorKind::UnsupportedRegime, "mod-pi^N regime needs N >= 1");
  std::vector<Polynomial> G;
  std::deque<Polynomial> queue;
  for (const auto& g : gens)
    if (!g.is_zero()) queue.push_back(g);

  auto enqueue_pairs_with = [&](const Polynomial& h) {
    for (const auto& g : G) queue.push_back(detail::spair(g, h, order));
    if (ctx.regime.kind == RegimeKind::over_R_mod_piN) {
      long v = h.leading_term(order).second.valuation(ctx.base).v;
      if (v > 0 && v < ctx.regime.N)
        queue.push_back(h * Scalar::pi_power(ctx.base, ctx.regime.N - v));
    }
  };

  std::size_t guard = 0;
  while (!queue.empty()) {
    if (++guard > 200000) raise(ErrorKind::Internal, "buchberger did not terminate");
    Polynomial h = reduce_by(queue.front(), G, order);
    queue.pop_front();
    if (h.is_zero()) continue;
    h = detail::normalize_lead(h, order);
    enqueue_pairs_with(h);
    G.push_back(h);
  }

  // minimalize: drop elements whose leading term is reducible by another's
  std::vector<Polynomial> min_basis;
  for (std::size_t i = 0; i < G.size(); ++i) {
    auto [ei, ci] = G[i].leading_term(order);
    bool redundant = false;
    for (std::size_t j = 0; j < G.size() && !redundant; ++j) {
      if (i == j) continue;
      auto [ej, cj] = G[j].leading_term(order);
      if (!mono_divides(ej, ei)) continue;
      Scalar q;
      if (!detail::coeff_divides(cj, ci, ctx, q)) continue;
      if (ej == ei && cj == ci && j > i) continue;  // keep the first of equals
      redundant = true;
    }
    if (!redundant) min_basis.push_back(G[i]);
  }

  // tail-reduce to the canonical reduced basis
  std::vector<Polynomial> reduced;
  for (std::size_t i = 0; i < min_basis.size(); ++i) {
    std::vector<Polynomial> others;
    for (std::size_t j = 0; j < min_basis.size(); ++j)
      if (j != i) others.push_back(min_basis[j]);
    Polynomial r = reduce_by(min_basis[i], others, order);
    if (!r.is_zero()) reduced.push_back(detail::normalize_lead(r, order));
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Polynomial& a, const Polynomial& b) {
    return mono_less(a.leading_term(order).first, b.leading_term(order).first, order);
  });
  return reduced;
}

// Ensure a cached reduced Groebner basis; idempotent.
inline void ensure_groebner(IdealPresentation& ideal, MonomialOrder order = MonomialOrder::deglex) {
  if (ideal.basis_order && *ideal.basis_order == order) return;
  ideal.basis = buchberger(ideal.ctx, ideal.gens, order);
  ideal.basis_order = order;
}

inline IdealPresentation groebner_basis(const IdealPresentation& ideal,
                                        MonomialOrder order = MonomialOrder::deglex) {
  IdealPresentation out = ideal;
  ensure_groebner(out, order);
  return out;
}

inline Polynomial normal_form(const Polynomial& f, const IdealPresentation& ideal) {
  if (f.ctx() != ideal.ctx) raise(ErrorKind::RegimeMismatch, "normal_form: context mismatch");
  if (!ideal.basis_order) {
    IdealPresentation tmp = groebner_basis(ideal);
    return reduce_by(f, tmp.basis, *tmp.basis_order);
  }
  return reduce_by(f, ideal.basis, *ideal.basis_order);
}

inline bool ideal_membership(const Polynomial& f, const IdealPresentation& ideal) {
  return normal_form(f, ideal).is_zero();
}

inline bool ideal_contains(IdealPresentation& big, const IdealPresentation& small) {
  ensure_groebner(big);
  for (const auto& g : small.gens)
    if (!ideal_membership(g, big)) return false;
  return true;
}

inline bool ideal_equal(IdealPresentation a, const IdealPresentation& b) {
  IdealPresentation bb = b;
  return ideal_contains(a, bb) && ideal_contains(bb, a);
}

namespace detail {

// Map an ideal into a context with one auxiliary variable prepended, compute a
// lex basis (aux variable greatest), and return the basis elements free of the
// auxiliary variable, mapped back to the original context.
inline std::vector<Polynomial> eliminate_aux(const PolyContext& ctx,
                                             const std::vector<Polynomial>& aux_gens,
                                             const PolyContext& aux_ctx) {
  std::vector<Polynomial> basis = buchberger(aux_ctx, aux_gens, MonomialOrder::lex);
  std::vector<Polynomial> out;
  for (const auto& g : basis) {
    bool has_aux = false;
    for (const auto& [e, c] : g.terms())
      if (e[0] > 0) has_aux = true;
    if (has_aux) continue;
    Polynomial back(ctx);
    for (const auto& [e, c] : g.terms()) back.add_term(Exps(e.begin() + 1, e.end()), c);
    out.push_back(back);
  }
  return out;
}

inline PolyContext with_aux_var(const PolyContext& ctx, const std::string& name) {
  PolyContext c = ctx;
  c.vars.insert(c.vars.begin(), name);
  return c;
}

inline Polynomial lift_to_aux(const Polynomial& f, const PolyContext& aux_ctx) {
  Polynomial out(aux_ctx);
  for (const auto& [e, c] : f.terms()) {
    Exps ee(e.size() + 1, 0);
    std::copy(e.begin(), e.end(), ee.begin() + 1);
    out.add_term(ee, c);
  }
  return out;
}

}  // namespace detail

// (ideal : pi^k) over R, via the intersection with (pi^k) computed by
// elimination, then coefficientwise division by pi^k.
inline IdealPresentation colon_pi_power(const IdealPresentation& ideal, long k) {
  if (ideal.ctx.regime.kind != RegimeKind::over_R)
    raise(ErrorKind::RegimeMismatch, "colon_pi_power needs the over_R regime");
  if (k <= 0) return ideal;
  PolyContext aux_ctx = detail::with_aux_var(ideal.ctx, "_t");
  std::vector<Polynomial> ag;
  Polynomial t = Polynomial::variable(aux_ctx, 0);
  Polynomial one = Polynomial::constant(aux_ctx, Scalar::one(aux_ctx.base.profile));
  Scalar pik = Scalar::pi_power(ideal.ctx.base, k);
  for (const auto& g : ideal.gens) ag.push_back(t * detail::lift_to_aux(g, aux_ctx));
  ag.push_back((one - t) * pik);
  std::vector<Polynomial> inter = detail::eliminate_aux(ideal.ctx, ag, aux_ctx);
  std::vector<Polynomial> out;
  Scalar inv = Scalar::one(ideal.ctx.base.profile) / pik;
  for (const auto& h : inter) {
    Polynomial scaled = h.with_regime(Regime::R_inv_pi()) * inv;
    out.push_back(scaled.with_regime(Regime::R()));
  }
  return IdealPresentation(ideal.ctx, out);
}

// (ideal : pi^infinity) via elimination of s from ideal + (1 - s*pi).
// Extensive, monotone, and idempotent; the result always contains the input.
inline IdealPresentation pi_saturation(const IdealPresentation& ideal) {
  if (ideal.ctx.regime.kind != RegimeKind::over_R)
    raise(ErrorKind::RegimeMismatch, "pi_saturation needs the over_R regime");
  PolyContext aux_ctx = detail::with_aux_var(ideal.ctx, "_s");
  std::vector<Polynomial> ag;
  Polynomial s = Polynomial::variable(aux_ctx, 0);
  Polynomial one = Polynomial::constant(aux_ctx, Scalar::one(aux_ctx.base.profile));
  for (const auto& g : ideal.gens) ag.push_back(detail::lift_to_aux(g, aux_ctx));
  ag.push_back(one - s * Polynomial::constant(aux_ctx, Scalar::pi(ideal.ctx.base)));
  std::vector<Polynomial> sat = detail::eliminate_aux(ideal.ctx, ag, aux_ctx);
  // ensure the input generators appear (drop ones already in the span)
  IdealPresentation out(ideal.ctx, sat);
  ensure_groebner(out);
  for (const auto& g : ideal.gens)
    if (!ideal_membership(g, out)) out.gens.push_back(g);
  return IdealPresentation(ideal.ctx, out.gens);
}

inline IdealPresentation ideal_sum(const IdealPresentation& a, const IdealPresentation& b) {
  if (a.ctx != b.ctx) raise(ErrorKind::RegimeMismatch, "ideal_sum: context mismatch");
  std::vector<Polynomial> gens = a.gens;
  gens.insert(gens.end(), b.gens.begin(), b.gens.end());
  return IdealPresentation(a.ctx, gens);
}

// I cap J over R, by eliminating t from t*I + (1-t)*J
inline IdealPresentation ideal_intersection(const IdealPresentation& a, const IdealPresentation& b) {
  if (a.ctx != b.ctx) raise(ErrorKind::RegimeMismatch, "ideal_intersection: context mismatch");
  PolyContext aux_ctx = detail::with_aux_var(a.ctx, "_t");
  Polynomial t = Polynomial::variable(aux_ctx, 0);
  Polynomial one = Polynomial::constant(aux_ctx, Scalar::one(aux_ctx.base.profile));
  std::vector<Polynomial> ag;
  for (const auto& g : a.gens) ag.push_back(t * detail::lift_to_aux(g, aux_ctx));
  for (const auto& g : b.gens) ag.push_back((one - t) * detail::lift_to_aux(g, aux_ctx));
  return IdealPresentation(a.ctx, detail::eliminate_aux(a.ctx, ag, aux_ctx));
}

// coefficientwise min of pi-adic valuations (the Gauss valuation)
inline Valuation gauss_valuation(const Polynomial& f) { return f.gauss_valuation(); }

}  // namespace gluekit
