#pragma once

// Affine gluing triples (A over R[1/pi], a truncated product algebra B with
// exact polynomial relation lifts, jstar: A -> C = B[1/pi]) and the pullback
// ring D = A x_C B: the membership oracle for D, the lattice of pi-integral
// A-elements, dense-image checking, generator search, relation extraction by
// bounded syzygy search, and the verification D[1/pi] = A, D-hat = B.
//
// All searches are bounded-degree and certified: a negative answer is either
// exact (membership, relation checks) or reported as SearchExhausted /
// DegreeBoundInconclusive rather than silently weakened.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/module.hpp"

namespace gluekit {

// |g| <= 1 declared on one factor of B
struct SubdomainInequality {
  Polynomial g;        // element of A (field regime, A's context)
  std::size_t factor;  // which factor of B the bound refers to
};

class AffineGluingTriple {
 public:
  // jstar[g][f]: the image of the g-th A-variable on the f-th factor, as a
  // polynomial in the factor variables with coefficients allowed to carry
  // negative pi-valuation (1/pi is the only permitted denominator source)
  AffineGluingTriple(AffineAlgebra A, std::vector<AlgebraFactor> factors,
                     std::vector<std::vector<Polynomial>> jstar,
                     std::vector<SubdomainInequality> subdomain = {})
      : A_(std::move(A)), factors_(std::move(factors)), jstar_(std::move(jstar)),
        subdomain_(std::move(subdomain)) {
    if (A_.regime() != Regime::R_inv_pi())
      raise(ErrorKind::RegimeMismatch, "the generic-fiber algebra must live over R[1/pi]");
    if (jstar_.size() != A_.vars().size())
      raise(ErrorKind::AlgebraMismatch, "one jstar row per A-variable required");
    for (const auto& row : jstar_) {
      if (row.size() != factors_.size())
        raise(ErrorKind::AlgebraMismatch, "one jstar image per B-factor required");
      for (std::size_t f = 0; f < row.size(); ++f)
        if (row[f].ctx() != factor_ctx(f))
          raise(ErrorKind::RegimeMismatch, "jstar image context mismatch");
    }
    for (const auto& f : factors_)
      for (const auto& r : f.rels)
        if (r.ctx().regime != Regime::R())
          raise(ErrorKind::RegimeMismatch, "B-factor relations must be exact over R");
    for (const auto& s : subdomain_) {
      if (s.g.ctx() != A_.ctx()) raise(ErrorKind::RegimeMismatch, "subdomain element context");
      if (s.factor >= factors_.size()) raise(ErrorKind::AlgebraMismatch, "subdomain factor index");
    }
    field_cache_.resize(factors_.size());
    exact_cache_.resize(factors_.size());
    sat_cache_.resize(factors_.size());
  }

  const AffineAlgebra& A() const { return A_; }
  const BasePair& base() const { return A_.base(); }
  std::size_t factor_count() const { return factors_.size(); }
  const AlgebraFactor& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<AlgebraFactor>& factors() const { return factors_; }
  const std::vector<std::vector<Polynomial>>& jstar() const { return jstar_; }
  const std::vector<SubdomainInequality>& subdomain() const { return subdomain_; }

  PolyContext factor_ctx(std::size_t i) const {
    return PolyContext{A_.base(), Regime::R_inv_pi(), factors_.at(i).vars};
  }

  const AffineAlgebra& factor_field(std::size_t i) const {
    if (!field_cache_[i]) {
      std::vector<Polynomial> rels;
      for (const auto& r : factors_[i].rels) rels.push_back(r.with_regime(Regime::R_inv_pi()));
      field_cache_[i] = std::make_shared<AffineAlgebra>(A_.base(), Regime::R_inv_pi(),
                                                        factors_[i].vars, std::move(rels));
    }
    return *field_cache_[i];
  }

  const AffineAlgebra& factor_exact(std::size_t i) const {
    if (!exact_cache_[i])
      exact_cache_[i] = std::make_shared<AffineAlgebra>(A_.base(), Regime::R(), factors_[i].vars,
                                                        factors_[i].rels);
    return *exact_cache_[i];
  }

  // pi-saturation of the factor's exact relation ideal; I_sat * C = I * C
  const IdealPresentation& factor_saturation(std::size_t i) const {
    if (!sat_cache_[i]) {
      PolyContext ctx{A_.base(), Regime::R(), factors_[i].vars};
      sat_cache_[i] = std::make_shared<IdealPresentation>(
          groebner_basis(pi_saturation(IdealPresentation(ctx, factors_[i].rels))));
    }
    return *sat_cache_[i];
  }

  std::shared_ptr<TruncatedAlgebra> truncated(int N) const {
    return std::make_shared<TruncatedAlgebra>(A_.base(), N, factors_);
  }

  // the image of f in C, one normal-form component per factor (field regime)
  std::vector<Polynomial> jstar_apply(const Polynomial& f) const {
    if (f.ctx() != A_.ctx()) raise(ErrorKind::RegimeMismatch, "jstar argument context");
    std::vector<Polynomial> out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      std::vector<Polynomial> images;
      for (std::size_t g = 0; g < jstar_.size(); ++g) images.push_back(jstar_[g][i]);
      out.push_back(factor_field(i).nf(f.substitute(images, factor_ctx(i))));
    }
    return out;
  }

  // A-relations map to zero in C, and declared subdomain elements are
  // pi-integral on their factors; returns a description of the first failure
  std::optional<std::string> validate() const;

 private:
  AffineAlgebra A_;
  std::vector<AlgebraFactor> factors_;
  std::vector<std::vector<Polynomial>> jstar_;
  std::vector<SubdomainInequality> subdomain_;
  mutable std::vector<std::shared_ptr<AffineAlgebra>> field_cache_;
  mutable std::vector<std::shared_ptr<AffineAlgebra>> exact_cache_;
  mutable std::vector<std::shared_ptr<IdealPresentation>> sat_cache_;
};

namespace detail {

// Is the class of w (field regime, factor i) representable by a pi-integral
// element? With s the denominator exponent, this is pi^s * w falling into
// I_sat + pi^s * R[vars], decided exactly at level s.
inline bool factor_class_integral(const AffineGluingTriple& T, std::size_t i, const Polynomial& w,
                                  std::string* witness = nullptr) {
  Valuation v = w.gauss_valuation();
  if (v >= Valuation::of(0)) return true;
  long s = -v.v;
  Polynomial g = w * Scalar::pi_power(T.base(), s);
  std::vector<Polynomial> lev;
  for (const auto& r : T.factor_saturation(i).gens)
    lev.push_back(r.with_regime(Regime::R_mod_piN(s)));
  AffineAlgebra level(T.base(), Regime::R_mod_piN(s), T.factor(i).vars, std::move(lev));
  Polynomial res = level.nf(g.with_regime(Regime::R_mod_piN(s)));
  if (res.is_zero()) return true;
  if (witness)
    *witness = "factor " + T.factor(i).name + ": (" + res.str() + ") / pi^" + std::to_string(s);
  return false;
}

// the class of w is zero in C, i.e. pi^s * w lies in the saturated ideal
inline bool factor_class_zero(const AffineGluingTriple& T, std::size_t i, const Polynomial& w) {
  if (w.is_zero()) return true;
  Valuation v = w.gauss_valuation();
  long s = v.infinite ? 0 : std::max<long>(0, -v.v);
  Polynomial g = (w * Scalar::pi_power(T.base(), s)).with_regime(Regime::R());
  return ideal_membership(g, T.factor_saturation(i));
}

}  // namespace detail

inline std::optional<std::string> AffineGluingTriple::validate() const {
  for (const auto& r : A_.relations().gens) {
    std::vector<Polynomial> img = jstar_apply(r);
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (!detail::factor_class_zero(*this, i, img[i]))
        return "relation " + r.str() + " does not vanish on factor " + factors_[i].name;
  }
  for (const auto& s : subdomain_) {
    std::vector<Polynomial> img = jstar_apply(s.g);
    std::string w;
    if (!detail::factor_class_integral(*this, s.factor, img[s.factor], &w))
      return "subdomain bound |" + s.g.str() + "| <= 1 inconsistent: " + w;
  }
  return std::nullopt;
}

// ---- membership oracle for D ----

struct MembershipResult {
  bool member = false;
  std::string witness;  // for a rejection: the offending factor and residue
};

// f is in D iff jstar(f) is pi-integral on every factor; exact for exact data
inline MembershipResult membership(const AffineGluingTriple& T, const Polynomial& f) {
  std::vector<Polynomial> img = T.jstar_apply(f);
  for (std::size_t i = 0; i < T.factor_count(); ++i) {
    std::string w;
    if (!detail::factor_class_integral(T, i, img[i], &w)) return MembershipResult{false, w};
  }
  return MembershipResult{true, ""};
}

// jstar(f) as a precision-tracked element of B at level prec; requires f in D
inline PrecisionElement jstar_precision(const AffineGluingTriple& T, const Polynomial& f,
                                        int prec) {
  std::vector<Polynomial> img = T.jstar_apply(f);
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < T.factor_count(); ++i) {
    std::string w;
    if (!detail::factor_class_integral(T, i, img[i], &w))
      raise(ErrorKind::NotIntegral, "jstar image is not pi-integral: " + w);
    // integral coefficients can be reinterpreted directly; a class that is
    // only integral modulo the ideal keeps its residue representative
    Polynomial rep = img[i];
    if (!(rep.gauss_valuation() >= Valuation::of(0)))
      raise(ErrorKind::NotIntegral, "no integral representative at this degree bound");
    comps.push_back(rep.with_regime(Regime::R_mod_piN(prec)));
  }
  return PrecisionElement(T.truncated(prec), prec, std::move(comps));
}

// ---- the lattice of pi-integral A-elements of bounded degree ----

struct IntegralLattice {
  std::vector<Exps> amonos;           // monomial coordinates on A-elements
  std::vector<Vec> basis;             // lattice basis, coefficient vectors over amonos
  std::vector<modx::RowKey> rows;     // B-side coordinates (side = factor index)
  Mat images;                         // rows x basis entries, all pi-integral
  PolyContext actx;

  Polynomial element(std::size_t k) const {
    Polynomial p(actx);
    for (std::size_t j = 0; j < amonos.size(); ++j)
      if (!basis[k][j].is_zero()) p.add_term(amonos[j], basis[k][j]);
    return p;
  }
};

// basis of {f in A : deg f <= deg, jstar(f) pi-integral on every factor},
// computed from the Smith form of the monomial expansion of jstar
inline IntegralLattice integral_element_lattice(const AffineGluingTriple& T, unsigned deg) {
  const BasePair& base = T.base();
  Profile pr = base.profile;
  IntegralLattice lat;
  lat.actx = T.A().ctx();
  lat.amonos = detail::monomials_up_to(lat.actx.vars.size(), deg);
  std::vector<modx::SparseCol> cols;
  for (const auto& m : lat.amonos) {
    Polynomial f(lat.actx);
    f.add_term(m, Scalar::one(pr));
    std::vector<Polynomial> img = T.jstar_apply(T.A().nf(f));
    modx::SparseCol c;
    for (std::size_t i = 0; i < img.size(); ++i)
      for (const auto& [e, s] : img[i].terms()) c[modx::RowKey{static_cast<int>(i), 0, e}] = s;
    cols.push_back(std::move(c));
  }
  for (const auto& c : cols)
    for (const auto& [k, s] : c) lat.rows.push_back(k);
  std::sort(lat.rows.begin(), lat.rows.end());
  lat.rows.erase(std::unique(lat.rows.begin(), lat.rows.end()), lat.rows.end());
  std::size_t m = cols.size();
  Mat M(lat.rows.size(), Vec(m, Scalar::zero(pr)));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t r = 0; r < lat.rows.size(); ++r) {
      auto it = cols[j].find(lat.rows[r]);
      if (it != cols[j].end()) M[r][j] = it->second;
    }
  if (lat.rows.empty()) {
    Mat id = mat_identity(m, pr);
    for (std::size_t k = 0; k < m; ++k) lat.basis.push_back(id[k]);
    lat.images = Mat(0, Vec(m, Scalar::zero(pr)));
    return lat;
  }
  SmithResult s = smith_valuation(base, M);
  for (std::size_t k = 0; k < m; ++k) {
    Vec c(m, Scalar::zero(pr));
    Scalar scale = k < s.rank ? Scalar::pi_power(base, -s.pivot_val[k]) : Scalar::one(pr);
    for (std::size_t i = 0; i < m; ++i) c[i] = s.V[i][k] * scale;
    lat.basis.push_back(std::move(c));
  }
  lat.images = Mat(lat.rows.size(), Vec(m, Scalar::zero(pr)));
  for (std::size_t r = 0; r < lat.rows.size(); ++r)
    for (std::size_t k = 0; k < m; ++k) {
      Scalar acc = Scalar::zero(pr);
      for (std::size_t j = 0; j < m; ++j) acc = acc + M[r][j] * lat.basis[k][j];
      lat.images[r][k] = acc;
    }
  return lat;
}

// ---- dense-image check ----

struct DenseImageResult {
  bool dense = false;
  int level = 0;        // first failing level when not dense
  std::string witness;  // residue class not hit
};

namespace detail {

struct SpanFailure {
  int level;
  std::size_t factor;
  Exps mono;
};

inline std::optional<SpanFailure> spanning_failure(const AffineGluingTriple& T,
                                                   const IntegralLattice& lat, int prec,
                                                   unsigned target_degree) {
  const BasePair& base = T.base();
  Profile pr = base.profile;
  std::size_t nb = lat.basis.size();
  for (int N = 1; N <= prec; ++N) {
    // reduce the lattice images by the factor relations at this level, so
    // that matching happens against level normal forms, not raw coefficients
    std::vector<AffineAlgebra> level;
    std::vector<std::vector<Polynomial>> redimg(T.factor_count());
    for (std::size_t f = 0; f < T.factor_count(); ++f) {
      std::vector<Polynomial> rl;
      for (const auto& r : T.factor(f).rels) rl.push_back(r.with_regime(Regime::R_mod_piN(N)));
      level.emplace_back(base, Regime::R_mod_piN(N), T.factor(f).vars, std::move(rl));
      for (std::size_t k = 0; k < nb; ++k) {
        Polynomial p(level[f].ctx());
        for (std::size_t r = 0; r < lat.rows.size(); ++r)
          if (lat.rows[r].side == static_cast<int>(f) && !lat.images[r][k].is_zero())
            p.add_term(lat.rows[r].mono, lat.images[r][k]);
        redimg[f].push_back(level[f].nf(p));
      }
    }
    for (std::size_t i = 0; i < T.factor_count(); ++i)
      for (const auto& m : monomials_up_to(T.factor(i).vars.size(), target_degree)) {
        Polynomial t(level[i].ctx());
        t.add_term(m, Scalar::one(pr));
        t = level[i].nf(t);
        std::vector<modx::RowKey> rows;
        for (std::size_t f = 0; f < T.factor_count(); ++f)
          for (std::size_t k = 0; k < nb; ++k)
            for (const auto& [e, s] : redimg[f][k].terms())
              rows.push_back(modx::RowKey{static_cast<int>(f), 0, e});
        for (const auto& [e, s] : t.terms())
          rows.push_back(modx::RowKey{static_cast<int>(i), 0, e});
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        Mat img(rows.size(), Vec(nb, Scalar::zero(pr)));
        Vec b(rows.size(), Scalar::zero(pr));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          std::size_t f = static_cast<std::size_t>(rows[r].side);
          for (std::size_t k = 0; k < nb; ++k) img[r][k] = redimg[f][k].coeff(rows[r].mono);
          if (f == i) b[r] = t.coeff(rows[r].mono);
        }
        if (solve_integral_mod(base, img, b, N)) continue;
        return SpanFailure{N, i, m};
      }
  }
  return std::nullopt;
}

inline std::string mono_witness(const AffineGluingTriple& T, const SpanFailure& f) {
  PolyContext ctx{T.base(), Regime::R(), T.factor(f.factor).vars};
  Polynomial p(ctx);
  p.add_term(f.mono, Scalar::one(T.base().profile));
  return p.str();
}

}  // namespace detail

// Does the image of the degree-bounded integral lattice span B/pi^N for every
// N <= prec, tested against the residue monomials of degree <= target_degree?
// A span found at any candidate degree within the retry schedule is a valid
// positive certificate (approximants legitimately need degree growing with
// the level), so the bound escalates before concluding. A failure that is
// stable across the whole schedule is reported with its witness; a failure
// whose witness keeps moving raises DegreeBoundInconclusive.
inline DenseImageResult dense_image_check(const AffineGluingTriple& T, int prec,
                                          unsigned degree_bound = 6, unsigned target_degree = 1) {
  unsigned cap = degree_bound + 2 * static_cast<unsigned>(std::max(prec, 1)) + 6;
  std::optional<detail::SpanFailure> last;
  bool stable = true;
  for (unsigned db = degree_bound; db <= cap; db += 2) {
    IntegralLattice lat = integral_element_lattice(T, db);
    auto fail = detail::spanning_failure(T, lat, prec, target_degree);
    if (!fail) return DenseImageResult{true, 0, ""};
    if (last && (last->level != fail->level || last->factor != fail->factor ||
                 last->mono != fail->mono))
      stable = false;
    last = fail;
  }
  if (!stable)
    raise(ErrorKind::DegreeBoundInconclusive,
          "spanning failure keeps receding as the degree bound grows; last witness " +
              detail::mono_witness(T, *last) + " at level " + std::to_string(last->level));
  return DenseImageResult{false, last->level, detail::mono_witness(T, *last)};
}

// ---- generator search ----

// an element of D, carried as its A-image together with exact B-lifts
struct DElement {
  std::string name;
  Polynomial a;                  // over A (field regime)
  std::vector<Polynomial> b;     // one exact (over_R) polynomial per factor
};

namespace detail {

// an exact integral representative of the class of w on factor i
inline std::optional<Polynomial> integral_representative(const AffineGluingTriple& T,
                                                         std::size_t i, const Polynomial& w,
                                                         unsigned deg) {
  const BasePair& base = T.base();
  Profile pr = base.profile;
  PolyContext rctx{base, Regime::R(), T.factor(i).vars};
  if (w.gauss_valuation() >= Valuation::of(0)) {
    Polynomial out(rctx);
    for (const auto& [e, c] : w.terms()) out.add_term(e, c);
    return out;
  }
  long s = -w.gauss_valuation().v;
  Polynomial g = w * Scalar::pi_power(base, s);  // integral coefficients
  // g = pi^s h + (saturated-ideal combination): solve over R
  auto monos = monomials_up_to(rctx.vars.size(), deg);
  std::vector<modx::SparseCol> cols;
  std::vector<bool> is_h;
  Scalar piS = Scalar::pi_power(base, s);
  for (const auto& m : monos) {
    modx::SparseCol c;
    c[modx::RowKey{0, 0, m}] = piS;
    cols.push_back(std::move(c));
    is_h.push_back(true);
  }
  for (const auto& r : T.factor_saturation(i).gens)
    for (const auto& m : monos) {
      Polynomial mono(rctx);
      mono.add_term(m, Scalar::one(pr));
      Polynomial prod = r * mono;
      modx::SparseCol c;
      for (const auto& [e, cc] : prod.terms()) c[modx::RowKey{0, 0, e}] = cc;
      cols.push_back(std::move(c));
      is_h.push_back(false);
    }
  modx::SparseCol target;
  for (const auto& [e, c] : g.terms()) target[modx::RowKey{0, 0, e}] = c;
  std::vector<modx::RowKey> rows;
  for (const auto& c : cols)
    for (const auto& [k, v] : c) rows.push_back(k);
  for (const auto& [k, v] : target) rows.push_back(k);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Mat A(rows.size(), Vec(cols.size(), Scalar::zero(pr)));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto it = cols[j].find(rows[r]);
      if (it != cols[j].end()) A[r][j] = it->second;
    }
  Vec b = modx::materialize(target, rows, pr);
  auto sol = solve_integral(base, A, b);
  if (!sol) return std::nullopt;
  Polynomial h(rctx);
  for (std::size_t j = 0; j < monos.size(); ++j)
    if (is_h[j] && !(*sol)[j].is_zero()) h.add_term(monos[j], (*sol)[j]);
  return h;
}

inline std::vector<Polynomial> exact_b_lifts(const AffineGluingTriple& T, const Polynomial& a,
                                             unsigned deg) {
  std::vector<Polynomial> img = T.jstar_apply(a);
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < T.factor_count(); ++i) {
    auto rep = integral_representative(T, i, img[i], deg);
    if (!rep)
      raise(ErrorKind::SearchExhausted,
            "no integral representative on factor " + T.factor(i).name +
                " within the degree bound");
    out.push_back(std::move(*rep));
  }
  return out;
}

}  // namespace detail

// Elements of D covering the three mechanisms: pi^N-scaled A-generators,
// perturbed topological generators of each B-factor (found through the
// integral lattice), and pi-torsion generators of B mapping to zero in A.
inline std::vector<DElement> generator_search(const AffineGluingTriple& T,
                                              unsigned degree_bound = 6, int prec = 8) {
  const BasePair& base = T.base();
  std::vector<DElement> out;
  auto push_unique = [&](DElement d) {
    for (const auto& e : out)
      if (e.a == d.a && e.b == d.b) return;
    out.push_back(std::move(d));
  };
  // (1) pi^N-scaled generators of A, N minimal with pi^N y in D
  for (std::size_t j = 0; j < T.A().vars().size(); ++j) {
    bool found = false;
    for (int N = 0; N <= prec && !found; ++N) {
      Polynomial f = Polynomial::variable(T.A().ctx(), j) * Scalar::pi_power(base, N);
      if (!membership(T, f).member) continue;
      push_unique(DElement{"y_" + T.A().vars()[j], f, detail::exact_b_lifts(T, f, degree_bound)});
      found = true;
    }
    if (!found)
      raise(ErrorKind::SearchExhausted, "no pi-power scaling of generator " + T.A().vars()[j] +
                                            " lands in D below the precision cap");
  }
  // (4) pi-torsion generators of B mapping to zero in A; collected before
  // the topological-generator search, which may combine them with lattice
  // elements
  std::vector<DElement> torsion;
  for (std::size_t i = 0; i < T.factor_count(); ++i) {
    PolyContext rctx{base, Regime::R(), T.factor(i).vars};
    IdealPresentation I = groebner_basis(IdealPresentation(rctx, T.factor(i).rels));
    std::size_t idx = 0;
    for (const auto& g : T.factor_saturation(i).gens) {
      if (ideal_membership(g, I)) continue;
      std::vector<Polynomial> b;
      for (std::size_t k = 0; k < T.factor_count(); ++k)
        b.push_back(k == i ? g : Polynomial(PolyContext{base, Regime::R(), T.factor(k).vars}));
      torsion.push_back(DElement{"w_" + T.factor(i).name + "_" + std::to_string(idx++),
                                 Polynomial(T.A().ctx()), std::move(b)});
    }
  }
  for (const auto& t : torsion) push_unique(t);
  // (2) perturbed topological generators: for each factor variable z, the
  // minimal-degree combination of a lattice element and torsion elements
  // congruent to z (and 0 elsewhere) mod pi
  std::map<unsigned, IntegralLattice> lats;
  auto lattice_at = [&](unsigned d) -> const IntegralLattice& {
    auto it = lats.find(d);
    if (it == lats.end()) it = lats.emplace(d, integral_element_lattice(T, d)).first;
    return it->second;
  };
  for (std::size_t i = 0; i < T.factor_count(); ++i)
    for (std::size_t v = 0; v < T.factor(i).vars.size(); ++v) {
      Exps target_mono(T.factor(i).vars.size(), 0);
      target_mono[v] = 1;
      modx::RowKey key{static_cast<int>(i), 0, target_mono};
      bool found = false;
      for (unsigned dc = 1; dc <= degree_bound && !found; ++dc) {
        const IntegralLattice& lat = lattice_at(dc);
        std::vector<modx::RowKey> rows = lat.rows;
        rows.push_back(key);
        for (const auto& t : torsion)
          for (std::size_t k = 0; k < t.b.size(); ++k)
            for (const auto& [e, c] : t.b[k].terms())
              rows.push_back(modx::RowKey{static_cast<int>(k), 0, e});
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        std::size_t nl = lat.basis.size();
        Mat img(rows.size(), Vec(nl + torsion.size(), Scalar::zero(base.profile)));
        Vec b(rows.size(), Scalar::zero(base.profile));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          auto it = std::lower_bound(lat.rows.begin(), lat.rows.end(), rows[r]);
          if (it != lat.rows.end() && *it == rows[r]) {
            const Vec& src = lat.images[static_cast<std::size_t>(it - lat.rows.begin())];
            for (std::size_t k = 0; k < nl; ++k) img[r][k] = src[k];
          }
          for (std::size_t t = 0; t < torsion.size(); ++t)
            img[r][nl + t] = torsion[t].b[static_cast<std::size_t>(rows[r].side)].coeff(rows[r].mono);
          if (rows[r] == key) b[r] = Scalar::one(base.profile);
        }
        auto sol = solve_integral_mod(base, img, b, 1);
        if (!sol) continue;
        Polynomial a(T.A().ctx());
        for (std::size_t k = 0; k < nl; ++k)
          if (!(*sol)[k].is_zero()) a = a + lat.element(k) * (*sol)[k];
        std::vector<Polynomial> bl = detail::exact_b_lifts(T, a, degree_bound);
        bool any = !a.is_zero();
        for (std::size_t t = 0; t < torsion.size(); ++t)
          if (!(*sol)[nl + t].is_zero()) {
            any = true;
            for (std::size_t k = 0; k < bl.size(); ++k)
              bl[k] = bl[k] + torsion[t].b[k] * (*sol)[nl + t];
          }
        if (!any) continue;
        push_unique(DElement{"z_" + T.factor(i).name + "_" + T.factor(i).vars[v], a,
                             std::move(bl)});
        found = true;
      }
      if (!found)
        raise(ErrorKind::SearchExhausted,
              "no bounded-degree element of D reduces to topological generator " +
                  T.factor(i).vars[v] + " modulo pi");
    }
  return out;
}

// ---- pullback ring ----

struct GluedRingResult {
  std::vector<DElement> gens;
  PolyContext dctx;                 // over R, one variable per generator
  IdealPresentation relation_ideal; // kernel of R[X] -> A x B at the bounds
  int prec = 8;
  unsigned degree_bound = 6;
  unsigned rel_degree = 3;

  const std::vector<Polynomial>& relations() const { return relation_ideal.gens; }
};

namespace detail {

// evaluations of the monomials in the D-generators on the A-side and B-side
struct DEvaluations {
  std::vector<Exps> dmonos;
  std::vector<Polynomial> aevals;                 // over A (field regime, nf)
  std::vector<std::vector<Polynomial>> bevals;    // [mono][factor], exact over R (nf)
};

inline DEvaluations evaluate_monomials(const AffineGluingTriple& T,
                                       const std::vector<DElement>& gens, unsigned rel_degree) {
  DEvaluations ev;
  ev.dmonos = monomials_up_to(gens.size(), rel_degree);
  for (const auto& e : ev.dmonos) {
    Polynomial a = Polynomial::constant(T.A().ctx(), Scalar::one(T.base().profile));
    for (std::size_t g = 0; g < gens.size(); ++g)
      if (e[g] > 0) a = a * gens[g].a.pow(e[g]);
    ev.aevals.push_back(T.A().nf(a));
    std::vector<Polynomial> bs;
    for (std::size_t i = 0; i < T.factor_count(); ++i) {
      Polynomial b = Polynomial::constant(PolyContext{T.base(), Regime::R(), T.factor(i).vars},
                                          Scalar::one(T.base().profile));
      for (std::size_t g = 0; g < gens.size(); ++g)
        if (e[g] > 0) b = b * gens[g].b[i].pow(e[g]);
      bs.push_back(T.factor_exact(i).nf(b));
    }
    ev.bevals.push_back(std::move(bs));
  }
  return ev;
}

}  // namespace detail

// Relation extraction for a given generator set: the lattice of integral
// polynomials P of degree <= rel_degree with P(gens) = 0 in A exactly and
// P(gens) = 0 in B modulo pi^prec (levelwise exact by the witness columns).
inline GluedRingResult pullback_from_generators(const AffineGluingTriple& T,
                                                std::vector<DElement> gens,
                                                unsigned degree_bound = 6, int prec = 8,
                                                unsigned rel_degree = 3) {
  const BasePair& base = T.base();
  Profile pr = base.profile;
  std::vector<std::string> names;
  for (const auto& g : gens) names.push_back(g.name);
  PolyContext dctx{base, Regime::R(), names};
  detail::DEvaluations ev = detail::evaluate_monomials(T, gens, rel_degree);
  std::size_t nq = ev.dmonos.size();

  // sparse expansion: A rows carry side -1, factor i rows carry side i
  std::vector<modx::SparseCol> qcols(nq);
  int adeg = 0;
  std::vector<int> bdeg(T.factor_count(), 0);
  for (std::size_t k = 0; k < nq; ++k) {
    for (const auto& [e, c] : ev.aevals[k].terms()) qcols[k][modx::RowKey{-1, 0, e}] = c;
    adeg = std::max(adeg, ev.aevals[k].degree());
    for (std::size_t i = 0; i < T.factor_count(); ++i) {
      for (const auto& [e, c] : ev.bevals[k][i].terms())
        qcols[k][modx::RowKey{static_cast<int>(i), 0, e}] = c;
      bdeg[i] = std::max(bdeg[i], ev.bevals[k][i].degree());
    }
  }
  // A-side witnesses: multiples of A's relation ideal, field coefficients
  std::vector<modx::SparseCol> awit;
  for (const auto& r : T.A().relations().gens) {
    int mdeg = std::max(0, adeg - std::max(0, r.degree()));
    for (const auto& m : detail::monomials_up_to(T.A().vars().size(),
                                                 static_cast<unsigned>(mdeg))) {
      Polynomial mono(T.A().ctx());
      mono.add_term(m, Scalar::one(pr));
      Polynomial prod = r * mono;
      modx::SparseCol c;
      for (const auto& [e, cc] : prod.terms()) c[modx::RowKey{-1, 0, e}] = cc;
      awit.push_back(std::move(c));
    }
  }
  // B-side witnesses: multiples of each factor's exact relations, integral
  std::vector<modx::SparseCol> bwit;
  for (std::size_t i = 0; i < T.factor_count(); ++i)
    for (const auto& r : T.factor(i).rels) {
      int mdeg = std::max(0, bdeg[i] - std::max(0, r.degree()));
      for (const auto& m : detail::monomials_up_to(T.factor(i).vars.size(),
                                                   static_cast<unsigned>(mdeg))) {
        Polynomial mono(r.ctx());
        mono.add_term(m, Scalar::one(pr));
        Polynomial prod = r * mono;
        modx::SparseCol c;
        for (const auto& [e, cc] : prod.terms()) c[modx::RowKey{static_cast<int>(i), 0, e}] = cc;
        bwit.push_back(std::move(c));
      }
    }
  std::vector<modx::RowKey> rows;
  auto add_rows = [&](const std::vector<modx::SparseCol>& cs) {
    for (const auto& c : cs)
      for (const auto& [k, v] : c) rows.push_back(k);
  };
  add_rows(qcols);
  add_rows(awit);
  add_rows(bwit);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<modx::RowKey> arows, brows;
  for (const auto& r : rows) (r.side < 0 ? arows : brows).push_back(r);
  auto materialize_block = [&](const std::vector<modx::SparseCol>& cs,
                               const std::vector<modx::RowKey>& rr) {
    Mat M(rr.size(), Vec(cs.size(), Scalar::zero(pr)));
    for (std::size_t j = 0; j < cs.size(); ++j)
      for (std::size_t r = 0; r < rr.size(); ++r) {
        auto it = cs[j].find(rr[r]);
        if (it != cs[j].end()) M[r][j] = it->second;
      }
    return M;
  };
  Mat qA = materialize_block(qcols, arows);
  Mat qB = materialize_block(qcols, brows);
  Mat wA = materialize_block(awit, arows);
  Mat wB = materialize_block(bwit, brows);
  // project the exact A-side conditions through the left kernel of the
  // A-witness block: L q c = 0 iff q c lies in the ideal's field span
  std::vector<Vec> L;
  if (mat_cols(wA) == 0 || arows.empty()) {
    Mat id = mat_identity(arows.size(), pr);
    L.assign(id.begin(), id.end());
  } else {
    L = left_kernel(base, wA);
  }
  std::size_t nw = mat_cols(wB), ns = brows.size();
  Mat sys(L.size() + ns, Vec(nq + nw + ns, Scalar::zero(pr)));
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = 0; j < nq; ++j) {
      Scalar s = Scalar::zero(pr);
      for (std::size_t t = 0; t < arows.size(); ++t) s = s + L[i][t] * qA[t][j];
      sys[i][j] = s;
    }
  Scalar piPrec = Scalar::pi_power(base, prec);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nq; ++j) sys[L.size() + i][j] = qB[i][j];
    for (std::size_t j = 0; j < nw; ++j) sys[L.size() + i][nq + j] = wB[i][j];
    sys[L.size() + i][nq + nw + i] = piPrec;
  }
  std::vector<Vec> ker = integral_kernel(base, sys);
  std::vector<Polynomial> rels;
  for (const auto& k : ker) {
    Polynomial p(dctx);
    for (std::size_t j = 0; j < nq; ++j)
      if (!k[j].is_zero()) p.add_term(ev.dmonos[j], k[j]);
    if (!p.is_zero()) rels.push_back(std::move(p));
  }
  // minimal generating pass: drop relations already in the ideal of the rest
  std::sort(rels.begin(), rels.end(), [](const Polynomial& x, const Polynomial& y) {
    if (x.degree() != y.degree()) return x.degree() < y.degree();
    return x.str() < y.str();
  });
  std::vector<Polynomial> kept;
  for (const auto& r : rels) {
    if (!kept.empty() && ideal_membership(r, groebner_basis(IdealPresentation(dctx, kept))))
      continue;
    kept.push_back(r);
  }
  GluedRingResult out{std::move(gens), dctx,
                      groebner_basis(IdealPresentation(dctx, std::move(kept))), prec,
                      degree_bound, rel_degree};
  return out;
}

inline GluedRingResult pullback_ring(const AffineGluingTriple& T, unsigned degree_bound = 6,
                                     int prec = 8, unsigned rel_degree = 3) {
  return pullback_from_generators(T, generator_search(T, degree_bound, prec), degree_bound, prec,
                                  rel_degree);
}

// ---- subalgebra comparison and expression search ----

namespace detail {

// multi-indices e over gens with sum(e_i * deg(gen_i)) <= limit
inline std::vector<Exps> product_indices(const std::vector<Polynomial>& gens, unsigned limit) {
  std::vector<unsigned> degs;
  for (const auto& g : gens) degs.push_back(static_cast<unsigned>(std::max(1, g.degree())));
  std::vector<Exps> out;
  Exps cur(gens.size(), 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned budget) {
    if (i == gens.size()) {
      out.push_back(cur);
      return;
    }
    for (unsigned k = 0;; ++k) {
      unsigned cost = k * degs[i];
      if (cost > budget) break;
      cur[i] = k;
      rec(i + 1, budget - cost);
    }
    cur[i] = 0;
  };
  rec(0, limit);
  std::sort(out.begin(), out.end(),
            [](const Exps& a, const Exps& b) { return mono_less(b, a, MonomialOrder::deglex); });
  return out;
}

}  // namespace detail

// target = integral combination of products of gens (A-elements), with the
// product x-degree capped by limit; returns the combination over a context
// with one variable per generator
inline std::optional<Polynomial> express_in_subalgebra(const AffineAlgebra& A,
                                                       const std::vector<Polynomial>& gens,
                                                       const std::vector<std::string>& names,
                                                       const Polynomial& target, unsigned limit) {
  const BasePair& base = A.base();
  Profile pr = base.profile;
  auto idx = detail::product_indices(gens, limit);
  std::vector<Polynomial> prods;
  for (const auto& e : idx) {
    Polynomial p = Polynomial::constant(A.ctx(), Scalar::one(pr));
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (e[i] > 0) p = p * gens[i].pow(e[i]);
    prods.push_back(A.nf(p));
  }
  Polynomial t = A.nf(target);
  std::vector<Exps> rows;
  for (const auto& p : prods)
    for (const auto& [e, c] : p.terms()) rows.push_back(e);
  for (const auto& [e, c] : t.terms()) rows.push_back(e);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Mat M(rows.size(), Vec(prods.size(), Scalar::zero(pr)));
  for (std::size_t j = 0; j < prods.size(); ++j)
    for (std::size_t r = 0; r < rows.size(); ++r) M[r][j] = prods[j].coeff(rows[r]);
  Vec b(rows.size(), Scalar::zero(pr));
  for (std::size_t r = 0; r < rows.size(); ++r) b[r] = t.coeff(rows[r]);
  auto sol = solve_integral(base, M, b);
  if (!sol) return std::nullopt;
  PolyContext qctx{base, Regime::R(), names};
  Polynomial q(qctx);
  for (std::size_t j = 0; j < idx.size(); ++j)
    if (!(*sol)[j].is_zero()) q.add_term(idx[j], (*sol)[j]);
  return q;
}

// degreewise equality of the R-subalgebras generated inside A: every product
// of one side with x-degree <= limit lies in the integral span of the other
inline bool same_subalgebra_degreewise(const AffineAlgebra& A, const std::vector<Polynomial>& g1,
                                       const std::vector<Polynomial>& g2, unsigned limit) {
  std::vector<std::string> n1, n2;
  for (std::size_t i = 0; i < g1.size(); ++i) n1.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < g2.size(); ++i) n2.push_back("b" + std::to_string(i));
  auto contains = [&](const std::vector<Polynomial>& big, const std::vector<std::string>& names,
                      const std::vector<Polynomial>& small) {
    auto idx = detail::product_indices(small, limit);
    for (const auto& e : idx) {
      Polynomial p = Polynomial::constant(A.ctx(), Scalar::one(A.base().profile));
      for (std::size_t i = 0; i < small.size(); ++i)
        if (e[i] > 0) p = p * small[i].pow(e[i]);
      if (!express_in_subalgebra(A, big, names, p, limit)) return false;
    }
    return true;
  };
  return contains(g2, n2, g1) && contains(g1, n1, g2);
}

// ---- verification D[1/pi] = A and D-hat = B ----

struct VerifyCertificate {
  bool ok = true;
  std::vector<std::string> checks;
};

inline VerifyCertificate verify_glued(const GluedRingResult& res, const AffineGluingTriple& T,
                                      int prec) {
  const BasePair& base = T.base();
  Profile pr = base.profile;
  VerifyCertificate cert;
  auto fail = [&](const std::string& what) {
    raise(ErrorKind::VerificationFailed, what);
  };
  std::vector<Polynomial> asides;
  for (const auto& g : res.gens) asides.push_back(g.a);
  // (i) injectivity of D[1/pi] -> A: every relation vanishes in A exactly
  for (const auto& r : res.relations()) {
    Polynomial ra(r.ctx());
    for (const auto& [e, c] : r.terms()) ra.add_term(e, c);
    Polynomial ev = ra.with_regime(Regime::R_inv_pi()).substitute(asides, T.A().ctx());
    if (!T.A().is_zero_elem(ev)) fail("relation " + r.str() + " does not vanish in A");
    for (std::size_t i = 0; i < T.factor_count(); ++i) {
      std::vector<Polynomial> bs;
      for (const auto& g : res.gens) bs.push_back(g.b[i]);
      Polynomial bev = r.substitute(bs, PolyContext{base, Regime::R(), T.factor(i).vars});
      std::vector<Polynomial> lev;
      for (const auto& rr : T.factor(i).rels) lev.push_back(rr.with_regime(Regime::R_mod_piN(prec)));
      AffineAlgebra lv(base, Regime::R_mod_piN(prec), T.factor(i).vars, std::move(lev));
      if (!lv.is_zero_elem(bev.with_regime(Regime::R_mod_piN(prec))))
        fail("relation " + r.str() + " does not vanish in B at precision");
    }
  }
  cert.checks.push_back("relations vanish in A exactly and in B at precision " +
                        std::to_string(prec));
  // (i) surjectivity of D[1/pi] -> A: pi-power-scaled A-generators are
  // integral combinations of generator products
  for (std::size_t j = 0; j < T.A().vars().size(); ++j) {
    bool hit = false;
    for (int s = 0; s <= prec && !hit; ++s) {
      Polynomial target = Polynomial::variable(T.A().ctx(), j) * Scalar::pi_power(base, s);
      std::vector<std::string> names;
      for (const auto& g : res.gens) names.push_back(g.name);
      if (express_in_subalgebra(T.A(), asides, names, target,
                                static_cast<unsigned>(std::max(1, target.degree())) *
                                    res.rel_degree))
        hit = true;
    }
    if (!hit) fail("A-generator " + T.A().vars()[j] + " is not reached from D[1/pi]");
  }
  cert.checks.push_back("D[1/pi] -> A surjective on generators");
  // (ii) levelwise D/pi^N -> B/pi^N
  detail::DEvaluations ev = detail::evaluate_monomials(T, res.gens, res.rel_degree);
  for (int N = 1; N <= prec; ++N) {
    for (std::size_t i = 0; i < T.factor_count(); ++i) {
      std::vector<Polynomial> lev;
      for (const auto& rr : T.factor(i).rels) lev.push_back(rr.with_regime(Regime::R_mod_piN(N)));
      AffineAlgebra lv(base, Regime::R_mod_piN(N), T.factor(i).vars, lev);
      // columns: generator products reduced at level N
      std::vector<Polynomial> cols;
      for (const auto& bs : ev.bevals)
        cols.push_back(lv.nf(bs[i].with_regime(Regime::R_mod_piN(N))));
      std::vector<Exps> rows;
      for (const auto& c : cols)
        for (const auto& [e, s] : c.terms()) rows.push_back(e);
      auto targets = detail::monomials_up_to(T.factor(i).vars.size(), 1);
      std::vector<Polynomial> tnf;
      for (const auto& m : targets) {
        Polynomial t(lv.ctx());
        t.add_term(m, Scalar::one(pr));
        t = lv.nf(t);
        for (const auto& [e, s] : t.terms()) rows.push_back(e);
        tnf.push_back(std::move(t));
      }
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      Mat M(rows.size(), Vec(cols.size(), Scalar::zero(pr)));
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t r = 0; r < rows.size(); ++r) M[r][j] = cols[j].coeff(rows[r]);
      for (std::size_t tix = 0; tix < tnf.size(); ++tix) {
        Vec b(rows.size(), Scalar::zero(pr));
        for (std::size_t r = 0; r < rows.size(); ++r) b[r] = tnf[tix].coeff(rows[r]);
        if (!solve_integral_mod(base, M, b, N))
          fail("D-hat -> B not surjective at level " + std::to_string(N) + ": witness " +
               detail::mono_witness(T, detail::SpanFailure{N, i, targets[tix]}) + " on factor " +
               T.factor(i).name);
      }
      // injectivity at level N: every bounded combination vanishing mod pi^N
      // is exactly divisible, i.e. lies in I + pi^N R[vars]
      Mat aug(rows.size(), Vec(cols.size() + rows.size(), Scalar::zero(pr)));
      Scalar piN = Scalar::pi_power(base, N);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) aug[r][j] = M[r][j];
        aug[r][cols.size() + r] = piN;
      }
      std::vector<Vec> ker = integral_kernel(base, aug);
      for (const auto& k : ker) {
        Polynomial combo(PolyContext{base, Regime::R(), T.factor(i).vars});
        bool any = false;
        for (std::size_t j = 0; j < cols.size(); ++j)
          if (!k[j].is_zero()) {
            combo = combo + ev.bevals[j][i] * k[j];
            any = true;
          }
        if (!any) continue;
        if (!lv.is_zero_elem(combo.with_regime(Regime::R_mod_piN(N))))
          fail("kernel element at level " + std::to_string(N) + " is not divisible by pi^" +
               std::to_string(N));
      }
    }
    cert.checks.push_back("D/pi^" + std::to_string(N) + " = B/pi^" + std::to_string(N) +
                          " (surjective, kernel pi^" + std::to_string(N) + "-divisible)");
  }
  return cert;
}

// ---- global sections reconstruction ----

inline AffineGluingTriple canonical_triple(const AffineAlgebra& X) {
  if (X.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "canonical triple needs a finite-type algebra over R");
  AffineAlgebra A = X.with_regime(Regime::R_inv_pi());
  AlgebraFactor f{"formal", X.vars(), X.relations().gens};
  PolyContext fctx{X.base(), Regime::R_inv_pi(), X.vars()};
  std::vector<std::vector<Polynomial>> jstar;
  std::vector<SubdomainInequality> dom;
  for (std::size_t i = 0; i < X.vars().size(); ++i) {
    jstar.push_back({Polynomial::variable(fctx, i)});
    dom.push_back(SubdomainInequality{Polynomial::variable(A.ctx(), i), 0});
  }
  return AffineGluingTriple(std::move(A), {std::move(f)}, std::move(jstar), std::move(dom));
}

struct ReconstructionCertificate {
  bool ok = false;
  GluedRingResult result;
  std::vector<std::string> checks;
};

// Certify the canonical isomorphism X -> D = A x_C B for the triple t(X)
inline ReconstructionCertificate reconstruct_global_sections(const AffineAlgebra& X, int prec,
                                                             unsigned degree_bound = 6) {
  AffineGluingTriple T = canonical_triple(X);
  GluedRingResult res = pullback_ring(T, degree_bound, prec);
  VerifyCertificate v = verify_glued(res, T, prec);
  ReconstructionCertificate cert{false, res, v.checks};
  // psi: D -> X sends each generator to its exact B-lift (single factor)
  std::vector<Polynomial> psi;
  for (const auto& g : res.gens) psi.push_back(X.nf(g.b[0]));
  // D-relations vanish in X exactly
  for (const auto& r : res.relations()) {
    if (!X.is_zero_elem(r.substitute(psi, X.ctx())))
      raise(ErrorKind::VerificationFailed,
            "relation " + r.str() + " does not vanish under D -> X");
  }
  cert.checks.push_back("D -> X well defined on relations");
  // phi: X -> D expresses each X-generator as an integral combination of
  // generator products (through their B-lifts, exactly over R)
  std::vector<std::string> names;
  for (const auto& g : res.gens) names.push_back(g.name);
  std::vector<Polynomial> phi;
  for (std::size_t j = 0; j < X.vars().size(); ++j) {
    auto q = express_in_subalgebra(X, psi, names, Polynomial::variable(X.ctx(), j),
                                   degree_bound);
    if (!q)
      raise(ErrorKind::VerificationFailed,
            "generator " + X.vars()[j] + " of X is not reconstructed from D");
    phi.push_back(q->with_regime(Regime::R()));
  }
  cert.checks.push_back("X -> D surjects onto the glued generators' algebra");
  // X-relations map into the relation ideal of D
  for (const auto& r : X.relations().gens) {
    Polynomial img = r.substitute(phi, res.dctx);
    if (!ideal_membership(img, res.relation_ideal))
      raise(ErrorKind::VerificationFailed,
            "relation " + r.str() + " of X is not a relation of D");
  }
  cert.checks.push_back("X -> D well defined on relations");
  // phi . psi = id_D modulo the relation ideal
  for (std::size_t k = 0; k < res.gens.size(); ++k) {
    Polynomial back = psi[k].substitute(phi, res.dctx);
    Polynomial diff = Polynomial::variable(res.dctx, k) - back;
    if (!ideal_membership(diff, res.relation_ideal))
      raise(ErrorKind::VerificationFailed,
            "generator " + res.gens[k].name + " does not round-trip through X");
  }
  // psi . phi = id_X modulo X's relations
  for (std::size_t j = 0; j < X.vars().size(); ++j) {
    Polynomial back = phi[j].with_regime(Regime::R()).substitute(psi, X.ctx());
    if (!X.equal(back, Polynomial::variable(X.ctx(), j)))
      raise(ErrorKind::VerificationFailed,
            "generator " + X.vars()[j] + " does not round-trip through D");
  }
  cert.checks.push_back("round trips X -> D -> X and D -> X -> D are the identity");
  cert.ok = true;
  return cert;
}

// ---- classification ----

enum class TripleClass { affine, not_affine, inconclusive };

struct ClassifyResult {
  TripleClass cls = TripleClass::inconclusive;
  std::string reason;   // failed condition tag: "c-data" or "d"
  std::string witness;

  bool is_affine() const { return cls == TripleClass::affine; }
};

inline ClassifyResult classify_triple(const AffineGluingTriple& T, int prec,
                                      unsigned degree_bound = 6) {
  if (auto bad = T.validate()) return ClassifyResult{TripleClass::not_affine, "c-data", *bad};
  try {
    DenseImageResult d = dense_image_check(T, prec, degree_bound);
    if (!d.dense) return ClassifyResult{TripleClass::not_affine, "d", d.witness};
  } catch (const GlueError& e) {
    if (e.kind() == ErrorKind::DegreeBoundInconclusive)
      return ClassifyResult{TripleClass::inconclusive, "degree-bound", e.what()};
    throw;
  }
  return ClassifyResult{TripleClass::affine, "", ""};
}

}  // namespace gluekit
