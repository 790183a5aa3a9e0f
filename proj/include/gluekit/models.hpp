#pragma once

// Catalog of worked examples as executable constructors: the two-disks cover
// of the affine line, the unit-circle inclusion, Neron-type component triples
// for G_m, and the Iwahori model of GL_2 with its point-level reduction map.

#include <string>
#include <utility>
#include <vector>

#include "gluekit/triple.hpp"

namespace gluekit {

// A = {f in Z_(p)[x] : f(x + 1/p) in Z_(p)[x]}, presented by its gluing data:
// the generic fiber is the affine line over R[1/pi] and B is a pair of closed
// unit disks, glued along x -> (u | v + 1/p)
inline AffineGluingTriple two_disks_triple(long p) {
  BasePair base = BasePair::arithmetic_base(p);
  AffineAlgebra A(base, Regime::R_inv_pi(), {"x"});
  AlgebraFactor d0{"d0", {"u"}, {}};
  AlgebraFactor d1{"d1", {"v"}, {}};
  PolyContext c0{base, Regime::R_inv_pi(), {"u"}};
  PolyContext c1{base, Regime::R_inv_pi(), {"v"}};
  Polynomial img0 = Polynomial::variable(c0, 0);
  Polynomial img1 = Polynomial::variable(c1, 0) +
                    Polynomial::constant(c1, Scalar::pi_power(base, -1));
  Polynomial px = Polynomial::variable(A.ctx(), 0) * Scalar::pi(base);
  Polynomial px1 = px - Polynomial::constant(A.ctx(), Scalar::one(base.profile));
  return AffineGluingTriple(std::move(A), {d0, d1}, {{img0, img1}},
                            {SubdomainInequality{px, 0}, SubdomainInequality{px1, 1}});
}

// the unit circle Spf Z_p<x, xb>/(x xb - 1) inside the closed unit disk; its
// pullback is not dense in B (xb is not approximable by integral polynomials
// in x), so the triple is not glued from an affine scheme
inline AffineGluingTriple unit_circle_triple(long p) {
  BasePair base = BasePair::arithmetic_base(p);
  AffineAlgebra A(base, Regime::R_inv_pi(), {"x"});
  PolyContext rctx{base, Regime::R(), {"x", "xb"}};
  Polynomial rel = Polynomial::variable(rctx, 0) * Polynomial::variable(rctx, 1) -
                   Polynomial::constant(rctx, Scalar::one(base.profile));
  AlgebraFactor circle{"circle", {"x", "xb"}, {rel}};
  PolyContext fctx{base, Regime::R_inv_pi(), {"x", "xb"}};
  Polynomial img = Polynomial::variable(fctx, 0);
  Polynomial x = Polynomial::variable(A.ctx(), 0);
  return AffineGluingTriple(std::move(A), {circle}, {{img}}, {SubdomainInequality{x, 0}});
}

// ---- Neron component triples for G_m ----

// only the discrete invariant v(omega) of the comparison map is carried; the
// isomorphism criterion depends on nothing else
struct ComponentTriple {
  mpq_class base_valuation;       // v(omega) > 0, normalized so v(pi) = 1
  std::string index_description;  // tag for the component set
  std::string label;
};

inline ComponentTriple neron_gm_triple(const mpq_class& v) {
  if (v <= 0) raise(ErrorKind::IncompatibleDatum, "component valuation must be positive");
  return ComponentTriple{v, "Z", "Gm-components"};
}

// two component triples are isomorphic iff the normalized valuations agree
inline bool neron_iso_test(const ComponentTriple& t1, const ComponentTriple& t2) {
  return t1.base_valuation == t2.base_valuation;
}

// ---- integral points, reduction, and the Iwahori model ----

struct IntegralPoint {
  std::vector<Scalar> coordinates;  // one per model variable, valuation >= 0
  AffineAlgebra model;              // finite-type over R
};

inline IntegralPoint make_integral_point(AffineAlgebra model, std::vector<Scalar> coords) {
  if (model.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "integral points live on models over R");
  if (coords.size() != model.vars().size())
    raise(ErrorKind::AlgebraMismatch, "one coordinate per model variable required");
  const BasePair& base = model.base();
  for (const auto& c : coords)
    if (!c.is_integral(base)) raise(ErrorKind::NotIntegral, "coordinate has negative valuation");
  for (const auto& r : model.relations().gens) {
    Scalar v = Scalar::zero(base.profile);
    for (const auto& [e, coef] : r.terms()) {
      Scalar m = coef;
      for (std::size_t i = 0; i < coords.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) m = m * coords[i];
      v = v + m;
    }
    if (!v.is_zero()) raise(ErrorKind::IncompatibleDatum, "point does not satisfy the model relations");
  }
  return IntegralPoint{std::move(coords), std::move(model)};
}

// coordinatewise reduction modulo pi: the residue point of the special fiber
inline std::vector<Scalar> specialize_point(const IntegralPoint& pt) {
  const BasePair& base = pt.model.base();
  std::vector<Scalar> out;
  for (const auto& c : pt.coordinates) {
    if (!c.is_integral(base)) raise(ErrorKind::NotIntegral, "coordinate has negative valuation");
    out.push_back(c.reduce_mod_piN(base, 1));
  }
  return out;
}

namespace detail {

inline Scalar matrix_determinant(const BasePair& base, Mat m) {
  std::size_t n = m.size();
  Scalar det = Scalar::one(base.profile);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return Scalar::zero(base.profile);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det = det * m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      Scalar f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[col][c];
    }
  }
  return det;
}

}  // namespace detail

// the Iwahori subgroup of GL_n(K): entries integral, entries strictly above
// the diagonal divisible by pi, determinant a unit
inline bool iwahori_membership(const BasePair& base, const Mat& m) {
  std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) raise(ErrorKind::AlgebraMismatch, "matrix must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Valuation v = m[i][j].valuation(base);
      if (!(v >= Valuation::of(0))) return false;
      if (i < j && !(v >= Valuation::of(1))) return false;
    }
  Scalar det = detail::matrix_determinant(base, m);
  return det.valuation(base) == Valuation::of(0);
}

// the GL_2 model over R: variables a, b, c, d, e with relation (ad - bc) e = 1
inline AffineAlgebra gl2_model(const BasePair& base) {
  PolyContext ctx{base, Regime::R(), {"a", "b", "c", "d", "e"}};
  Polynomial det = Polynomial::variable(ctx, 0) * Polynomial::variable(ctx, 3) -
                   Polynomial::variable(ctx, 1) * Polynomial::variable(ctx, 2);
  Polynomial rel = det * Polynomial::variable(ctx, 4) -
                   Polynomial::constant(ctx, Scalar::one(base.profile));
  return AffineAlgebra(base, Regime::R(), {"a", "b", "c", "d", "e"}, {rel});
}

}  // namespace gluekit
