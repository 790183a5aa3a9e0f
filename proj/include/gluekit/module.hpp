#pragma once

// Finitely presented modules and the affine Beauville-Laszlo equivalence:
// decompose a module M over A into its gluing triple t(M) = (M[1/pi], M^, id)
// and glue a datum (F, N, iota) back into a finitely presented A-module.
//
// All module conditions (membership in a submodule span, syzygies, torsion)
// are decided by bounded-degree coefficient search: unknown coefficients are
// polynomials of degree <= a configured bound, conditions expand over the
// monomial basis into exact linear algebra over the fraction field of R with
// pi-valuation bookkeeping (see linalg.hpp).

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gluekit/completion.hpp"
#include "gluekit/precision.hpp"

namespace gluekit {

// A module over `ring` with n_gens generators and the given relation columns
// (each column is a vector of ring elements of length n_gens).
struct ModulePresentation {
  AffineAlgebra ring;
  std::size_t n_gens = 0;
  std::vector<std::vector<Polynomial>> rels;  // columns

  ModulePresentation(AffineAlgebra r, std::size_t n, std::vector<std::vector<Polynomial>> cols = {})
      : ring(std::move(r)), n_gens(n) {
    for (auto& c : cols) {
      if (c.size() != n_gens) raise(ErrorKind::Internal, "relation column arity mismatch");
      std::vector<Polynomial> nfc;
      for (auto& e : c) nfc.push_back(ring.nf(e));
      bool zero = true;
      for (auto& e : nfc)
        if (!e.is_zero()) zero = false;
      if (!zero) rels.push_back(std::move(nfc));
    }
  }

  static ModulePresentation free_module(AffineAlgebra r, std::size_t n) {
    return ModulePresentation(std::move(r), n);
  }

  ModulePresentation with_regime(const Regime& reg) const {
    AffineAlgebra r2 = ring.with_regime(reg);
    std::vector<std::vector<Polynomial>> cols;
    for (const auto& c : rels) {
      std::vector<Polynomial> cc;
      for (const auto& e : c) cc.push_back(e.with_regime(reg));
      cols.push_back(std::move(cc));
    }
    return ModulePresentation(std::move(r2), n_gens, std::move(cols));
  }
};

inline ModulePresentation direct_sum(const ModulePresentation& a, const ModulePresentation& b) {
  if (!a.ring.same_presentation(b.ring))
    raise(ErrorKind::AlgebraMismatch, "direct sum over different rings");
  std::vector<std::vector<Polynomial>> cols;
  Polynomial z(a.ring.ctx());
  for (const auto& c : a.rels) {
    std::vector<Polynomial> cc = c;
    cc.resize(a.n_gens + b.n_gens, z);
    cols.push_back(std::move(cc));
  }
  for (const auto& c : b.rels) {
    std::vector<Polynomial> cc(a.n_gens, z);
    cc.insert(cc.end(), c.begin(), c.end());
    cols.push_back(std::move(cc));
  }
  return ModulePresentation(a.ring, a.n_gens + b.n_gens, std::move(cols));
}

// ---- monomial-expansion bridge: module conditions -> scalar linear algebra --

namespace modx {

struct RowKey {
  int side = 0;  // distinguishes stacked coordinate spaces (e.g. F-part vs N-part)
  std::size_t coord = 0;
  Exps mono;
  bool operator<(const RowKey& o) const {
    if (side != o.side) return side < o.side;
    if (coord != o.coord) return coord < o.coord;
    return mono < o.mono;
  }
  bool operator==(const RowKey& o) const {
    return side == o.side && coord == o.coord && mono == o.mono;
  }
};

using SparseCol = std::map<RowKey, Scalar>;

inline SparseCol expand_vector(const AffineAlgebra& ring, const std::vector<Polynomial>& v,
                               int side) {
  SparseCol c;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Polynomial nf = ring.nf(v[i]);
    for (const auto& [e, s] : nf.terms()) c[RowKey{side, i, e}] = s;
  }
  return c;
}

// column origin bookkeeping: which generator and coefficient monomial produced it
struct ColOrigin {
  std::size_t gen = 0;
  Exps mono;
};

struct ExpandedBlock {
  std::vector<SparseCol> cols;
  std::vector<ColOrigin> origin;
};

// gens[j] scaled by every coefficient monomial of degree <= d
inline ExpandedBlock expand_block(const AffineAlgebra& ring,
                                  const std::vector<std::vector<Polynomial>>& gens, unsigned d,
                                  int side) {
  ExpandedBlock out;
  auto monos = detail::monomials_up_to(ring.ctx().vars.size(), d);
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (const auto& m : monos) {
      Polynomial mono(ring.ctx());
      mono.add_term(m, Scalar::one(ring.base().profile));
      std::vector<Polynomial> scaled;
      for (const auto& e : gens[j]) scaled.push_back(e * mono);
      out.cols.push_back(expand_vector(ring, scaled, side));
      out.origin.push_back(ColOrigin{j, m});
    }
  return out;
}

inline std::vector<RowKey> collect_rows(const std::vector<const ExpandedBlock*>& blocks,
                                        const std::vector<const SparseCol*>& extra) {
  std::vector<RowKey> rows;
  auto add = [&](const SparseCol& c) {
    for (const auto& [k, s] : c) rows.push_back(k);
  };
  for (const auto* b : blocks)
    for (const auto& c : b->cols) add(c);
  for (const auto* c : extra) add(*c);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

inline Vec materialize(const SparseCol& c, const std::vector<RowKey>& rows, Profile pr) {
  Vec v(rows.size(), Scalar::zero(pr));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto it = c.find(rows[i]);
    if (it != c.end()) v[i] = it->second;
  }
  return v;
}

inline Mat materialize_cols(const std::vector<const ExpandedBlock*>& blocks,
                            const std::vector<RowKey>& rows, Profile pr) {
  std::size_t total = 0;
  for (const auto* b : blocks) total += b->cols.size();
  Mat A(rows.size(), Vec(total, Scalar::zero(pr)));
  std::size_t col = 0;
  for (const auto* b : blocks)
    for (const auto& c : b->cols) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        auto it = c.find(rows[i]);
        if (it != c.end()) A[i][col] = it->second;
      }
      ++col;
    }
  return A;
}

// reconstruct polynomial coefficients (one per generator) from a flat solution
inline std::vector<Polynomial> coefficients_from(const ExpandedBlock& block, const Vec& sol,
                                                 std::size_t n_gens, const PolyContext& ctx) {
  std::vector<Polynomial> out(n_gens, Polynomial(ctx));
  for (std::size_t c = 0; c < block.cols.size(); ++c)
    if (!sol[c].is_zero()) out[block.origin[c].gen].add_term(block.origin[c].mono, sol[c]);
  return out;
}

}  // namespace modx

// Is `target` in the span of `cols` over the module's ring, with coefficient
// polynomials of degree <= d? Field-regime rings use field coefficients;
// mod-pi^N rings get the pi^N slack automatically; over_R uses integral ones.
// Returns the coefficients on success.
inline std::optional<std::vector<Polynomial>> submodule_solve(
    const AffineAlgebra& ring, const std::vector<std::vector<Polynomial>>& cols,
    const std::vector<Polynomial>& target, unsigned d) {
  Profile pr = ring.base().profile;
  modx::ExpandedBlock block = modx::expand_block(ring, cols, d, 0);
  modx::SparseCol t = modx::expand_vector(ring, target, 0);
  std::vector<modx::RowKey> rows = modx::collect_rows({&block}, {&t});
  if (rows.empty()) return std::vector<Polynomial>(cols.size(), Polynomial(ring.ctx()));
  Mat A = modx::materialize_cols({&block}, rows, pr);
  Vec b = modx::materialize(t, rows, pr);
  std::optional<Vec> sol;
  switch (ring.regime().kind) {
    case RegimeKind::over_R_inv_pi: sol = solve_field(ring.base(), A, b); break;
    case RegimeKind::over_R: sol = solve_integral(ring.base(), A, b); break;
    case RegimeKind::over_R_mod_piN:
      sol = solve_integral_mod(ring.base(), A, b, ring.regime().N);
      break;
  }
  if (!sol) return std::nullopt;
  return modx::coefficients_from(block, *sol, cols.size(), ring.ctx());
}

// ---- gluing data ----

struct ModuleGluingDatum {
  AffineAlgebra base_ring;   // A over R: common exact home of all the data
  ModulePresentation F;      // over A[1/pi]
  ModulePresentation Nmod;   // over B at precision (regime R/pi^prec)
  // iota: F-generators -> N-coordinates, entries over A[1/pi]; with approximate inverse
  std::vector<std::vector<Polynomial>> iota;      // n_N rows x n_F cols
  std::vector<std::vector<Polynomial>> iota_inv;  // n_F rows x n_N cols
  int prec = 8;
};

inline ModuleGluingDatum triple_of_module(const ModulePresentation& M, int prec) {
  if (M.ring.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "triple_of_module expects a module over A over R");
  ModulePresentation F = M.with_regime(Regime::R_inv_pi());
  ModulePresentation N = M.with_regime(Regime::R_mod_piN(prec));
  PolyContext fctx = F.ring.ctx();
  std::vector<std::vector<Polynomial>> id(M.n_gens,
                                          std::vector<Polynomial>(M.n_gens, Polynomial(fctx)));
  for (std::size_t i = 0; i < M.n_gens; ++i)
    id[i][i] = Polynomial::constant(fctx, Scalar::one(fctx.base.profile));
  return ModuleGluingDatum{M.ring, std::move(F), std::move(N), id, id, prec};
}

inline ModuleGluingDatum datum_direct_sum(const ModuleGluingDatum& a, const ModuleGluingDatum& b) {
  if (!a.base_ring.same_presentation(b.base_ring) || a.prec != b.prec)
    raise(ErrorKind::AlgebraMismatch, "direct sum of data over different bases");
  const PolyContext& fctx = a.F.ring.ctx();
  auto block = [&](const std::vector<std::vector<Polynomial>>& m1,
                   const std::vector<std::vector<Polynomial>>& m2, std::size_t c1,
                   std::size_t c2) {
    std::size_t r1 = m1.size(), r2 = m2.size();
    std::vector<std::vector<Polynomial>> out(r1 + r2,
                                             std::vector<Polynomial>(c1 + c2, Polynomial(fctx)));
    for (std::size_t i = 0; i < r1; ++i)
      for (std::size_t j = 0; j < c1; ++j) out[i][j] = m1[i][j];
    for (std::size_t i = 0; i < r2; ++i)
      for (std::size_t j = 0; j < c2; ++j) out[r1 + i][c1 + j] = m2[i][j];
    return out;
  };
  return ModuleGluingDatum{a.base_ring,
                           direct_sum(a.F, b.F),
                           direct_sum(a.Nmod, b.Nmod),
                           block(a.iota, b.iota, a.F.n_gens, b.F.n_gens),
                           block(a.iota_inv, b.iota_inv, a.Nmod.n_gens, b.Nmod.n_gens),
                           a.prec};
}

namespace detail {

// iota applied to an F-coordinate vector (entries over A[1/pi])
inline std::vector<Polynomial> apply_matrix(const std::vector<std::vector<Polynomial>>& m,
                                            const std::vector<Polynomial>& v,
                                            const PolyContext& ctx) {
  std::vector<Polynomial> out(m.size(), Polynomial(ctx));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] = out[i] + m[i][j] * v[j];
  return out;
}

inline Valuation vector_valuation(const std::vector<Polynomial>& v) {
  Valuation r = Valuation::inf();
  for (const auto& e : v) r = min(r, e.gauss_valuation());
  return r;
}

// Does the (possibly non-integral) N-coordinate vector w vanish in N[1/pi] at
// the datum's precision? Scale by the minimal pi power making it integral,
// then test membership in span(R_N) mod pi^prec.
inline bool vanishes_in_N_localized(const ModuleGluingDatum& d, const std::vector<Polynomial>& w,
                                    unsigned deg) {
  Valuation v = vector_valuation(w);
  if (v.infinite) return true;
  long s = std::max<long>(0, -v.v);
  if (s >= d.prec) return false;  // nothing certifiable remains
  std::vector<Polynomial> scaled;
  for (const auto& e : w)
    scaled.push_back((e * Scalar::pi_power(d.base_ring.base(), s))
                         .with_regime(Regime::R_mod_piN(d.prec)));
  std::vector<std::vector<Polynomial>> reln;
  for (const auto& c : d.Nmod.rels) reln.push_back(c);
  return submodule_solve(d.Nmod.ring, reln, scaled, deg).has_value();
}

}  // namespace detail

// Validity of a datum: iota and iota_inv compose to the identity at precision,
// and iota carries F-relations into N-relations at precision.
inline void check_datum(const ModuleGluingDatum& d, unsigned deg = 4) {
  const PolyContext& fctx = d.F.ring.ctx();
  // composite iota_inv . iota = id on F-generators (exact over A[1/pi], up to
  // relations of F)
  for (std::size_t j = 0; j < d.F.n_gens; ++j) {
    std::vector<Polynomial> e(d.F.n_gens, Polynomial(fctx));
    e[j] = Polynomial::constant(fctx, Scalar::one(fctx.base.profile));
    std::vector<Polynomial> round =
        detail::apply_matrix(d.iota_inv, detail::apply_matrix(d.iota, e, fctx), fctx);
    for (std::size_t i = 0; i < d.F.n_gens; ++i) round[i] = round[i] - e[i];
    if (!submodule_solve(d.F.ring, d.F.rels, round, deg))
      raise(ErrorKind::IncompatibleDatum, "iota_inv . iota is not the identity");
  }
  // intertwining: iota(R_F columns) vanish in N[1/pi] at precision
  for (const auto& r : d.F.rels) {
    std::vector<Polynomial> img = detail::apply_matrix(d.iota, r, fctx);
    if (!detail::vanishes_in_N_localized(d, img, deg))
      raise(ErrorKind::IncompatibleDatum, "iota does not intertwine the relation matrices");
  }
}

// ---- glue_module ----

struct GluedModule {
  ModulePresentation M;  // over A (regime over_R)
  // generator certificates: images of the M-generators in F and in N
  std::vector<std::vector<Polynomial>> gen_F;  // over A[1/pi]
  std::vector<std::vector<Polynomial>> gen_N;  // over B at precision
  // for each F-generator i: pi^(F_gen_scale[i]) e_i expressed in the glued
  // generators (coefficients over A), the backbone of round-trip certificates
  std::vector<long> F_gen_scale;
  std::vector<std::vector<Polynomial>> F_gen_lift;
};

namespace detail {

// membership of a pair (f, n) in the submodule of F x N generated by `pairs`,
// with integral coefficient polynomials of degree <= d; returns the
// coefficients (one per pair) on success
inline std::optional<std::vector<Polynomial>> pair_in_span(
    const ModuleGluingDatum& d, const std::vector<std::vector<Polynomial>>& pairs_F,
    const std::vector<std::vector<Polynomial>>& pairs_N, const std::vector<Polynomial>& f,
    const std::vector<Polynomial>& n, unsigned deg) {
  const BasePair& base = d.base_ring.base();
  Profile pr = base.profile;
  // q-columns act on both sides; R_F columns absorb the F-side with field
  // coefficients; R_N and pi^prec absorb the N-side with integral ones
  std::vector<std::vector<Polynomial>> qpairsF = pairs_F, qpairsN = pairs_N;
  modx::ExpandedBlock qF = modx::expand_block(d.F.ring, qpairsF, deg, 0);
  modx::ExpandedBlock qN = modx::expand_block(d.Nmod.ring, qpairsN, deg, 1);
  if (qF.cols.size() != qN.cols.size()) raise(ErrorKind::Internal, "pair block mismatch");
  modx::ExpandedBlock q;
  for (std::size_t c = 0; c < qF.cols.size(); ++c) {
    modx::SparseCol merged = qF.cols[c];
    merged.insert(qN.cols[c].begin(), qN.cols[c].end());
    q.cols.push_back(std::move(merged));
    q.origin.push_back(qF.origin[c]);
  }
  modx::ExpandedBlock rf = modx::expand_block(d.F.ring, d.F.rels, deg, 0);
  modx::ExpandedBlock rn = modx::expand_block(d.Nmod.ring, d.Nmod.rels, deg, 1);
  modx::SparseCol tF = modx::expand_vector(d.F.ring, f, 0);
  modx::SparseCol tN = modx::expand_vector(d.Nmod.ring, n, 1);
  modx::SparseCol target = tF;
  target.insert(tN.begin(), tN.end());
  std::vector<modx::RowKey> rows = modx::collect_rows({&q, &rf, &rn}, {&target});
  PolyContext rctx = d.base_ring.ctx();
  if (rows.empty()) return std::vector<Polynomial>(pairs_F.size(), Polynomial(rctx));
  // pi^prec slack on the N-side rows only
  modx::ExpandedBlock slack;
  for (const auto& r : rows)
    if (r.side == 1) {
      modx::SparseCol c;
      c[r] = Scalar::pi_power(base, d.prec);
      slack.cols.push_back(std::move(c));
      slack.origin.push_back(modx::ColOrigin{});
    }
  Mat Aint = modx::materialize_cols({&q, &rn, &slack}, rows, pr);
  Mat Afield = modx::materialize_cols({&rf}, rows, pr);
  Vec b = modx::materialize(target, rows, pr);
  auto sol = solve_mixed(base, Aint, Afield, b);
  if (!sol) return std::nullopt;
  Vec qpart(sol->begin(), sol->begin() + static_cast<long>(q.cols.size()));
  return modx::coefficients_from(q, qpart, pairs_F.size(), rctx);
}

}  // namespace detail

// Glue a datum into a finitely presented A-module: generators are explicit
// pairs (f, n) with iota(f) = n in N[1/pi] at precision, relations are the
// integral syzygy lattice of the pairs at bounded coefficient degree.
inline GluedModule glue_module(const ModuleGluingDatum& d, unsigned degree_bound = 4) {
  check_datum(d, degree_bound);
  const BasePair& base = d.base_ring.base();
  Profile pr = base.profile;
  const PolyContext& fctx = d.F.ring.ctx();
  const PolyContext& nctx = d.Nmod.ring.ctx();

  std::vector<std::vector<Polynomial>> pairs_F, pairs_N;
  auto push_pair = [&](std::vector<Polynomial> f, std::vector<Polynomial> n) {
    if (detail::pair_in_span(d, pairs_F, pairs_N, f, n, degree_bound)) return;
    pairs_F.push_back(std::move(f));
    pairs_N.push_back(std::move(n));
  };
  std::vector<long> gen_scale(d.F.n_gens, 0);

  // (1) pi-scaled F-generators: pi^k e_i with k minimal making iota(e_i) integral
  for (std::size_t i = 0; i < d.F.n_gens; ++i) {
    std::vector<Polynomial> e(d.F.n_gens, Polynomial(fctx));
    e[i] = Polynomial::constant(fctx, Scalar::one(pr));
    std::vector<Polynomial> img = detail::apply_matrix(d.iota, e, fctx);
    Valuation v = detail::vector_valuation(img);
    long k = v.infinite ? 0 : std::max<long>(0, -v.v);
    gen_scale[i] = k;
    Scalar pik = Scalar::pi_power(base, k);
    std::vector<Polynomial> f, n;
    for (auto& x : e) f.push_back(x * pik);
    for (auto& x : img) n.push_back((x * pik).with_regime(Regime::R_mod_piN(d.prec)));
    push_pair(std::move(f), std::move(n));
  }

  // (2) N-generator preimages and (3) torsion generators, found uniformly: for
  // each N-generator u_j, the smallest s with iota(f') = pi^s u_j solvable in N
  // at precision (f' integral coefficients) yields the pair (f'/pi^s, u_j).
  for (std::size_t j = 0; j < d.Nmod.n_gens; ++j) {
    std::vector<Polynomial> u(d.Nmod.n_gens, Polynomial(nctx));
    u[j] = Polynomial::constant(nctx, Scalar::one(pr));
    bool found = false;
    for (long s = 0; s <= d.prec && !found; ++s) {
      // unknowns: f' coefficients (integral); iota columns expanded, then R_N
      // and pi^prec absorb the quotient structure
      std::vector<std::vector<Polynomial>> iota_cols;
      for (std::size_t i = 0; i < d.F.n_gens; ++i) {
        std::vector<Polynomial> e(d.F.n_gens, Polynomial(fctx));
        e[i] = Polynomial::constant(fctx, Scalar::one(pr));
        std::vector<Polynomial> img = detail::apply_matrix(d.iota, e, fctx);
        // only integral columns can take integral unknowns; scale pi^s onto the rhs instead
        iota_cols.push_back(img);
      }
      bool integral_cols = true;
      for (const auto& c : iota_cols)
        if (!detail::vector_valuation(c).infinite && detail::vector_valuation(c) < Valuation::of(0))
          integral_cols = false;
      if (!integral_cols && s == 0) continue;  // revisit with pi^s scaling below
      std::vector<std::vector<Polynomial>> cols;
      long shift = 0;
      if (!integral_cols) {
        // scale columns to integrality and compensate in the rhs exponent
        Valuation vmin = Valuation::inf();
        for (const auto& c : iota_cols) vmin = min(vmin, detail::vector_valuation(c));
        shift = vmin.infinite ? 0 : std::max<long>(0, -vmin.v);
        if (shift > s) continue;
      }
      for (const auto& c : iota_cols) {
        std::vector<Polynomial> cc;
        for (const auto& e : c)
          cc.push_back((e * Scalar::pi_power(base, shift)).with_regime(Regime::R_mod_piN(d.prec)));
        cols.push_back(std::move(cc));
      }
      std::vector<Polynomial> rhs;
      for (const auto& e : u) rhs.push_back(e * Scalar::pi_power(base, s));
      for (const auto& c : d.Nmod.rels) cols.push_back(c);
      auto sol = submodule_solve(d.Nmod.ring, cols, rhs, degree_bound);
      if (!sol) continue;
      // reconstruct f = pi^(shift - s) * f'
      std::vector<Polynomial> f(d.F.n_gens, Polynomial(fctx));
      for (std::size_t i = 0; i < d.F.n_gens; ++i) {
        Polynomial fi = (*sol)[i].with_regime(Regime::R_inv_pi());
        f[i] = fi * Scalar::pi_power(base, shift - s);
      }
      std::vector<Polynomial> n = u;
      push_pair(std::move(f), std::move(n));
      found = true;
    }
    if (!found)
      raise(ErrorKind::PrecisionLoss,
            "no preimage for an N-generator at the configured precision/degree bound");
  }

  // (4) relations: integral syzygies of the pairs. F-side field witnesses are
  // projected out by a left kernel; N-side witnesses and pi^prec slack stay
  // integral.
  modx::ExpandedBlock qF = modx::expand_block(d.F.ring, pairs_F, degree_bound, 0);
  modx::ExpandedBlock qN = modx::expand_block(d.Nmod.ring, pairs_N, degree_bound, 1);
  modx::ExpandedBlock q;
  for (std::size_t c = 0; c < qF.cols.size(); ++c) {
    modx::SparseCol merged = qF.cols[c];
    merged.insert(qN.cols[c].begin(), qN.cols[c].end());
    q.cols.push_back(std::move(merged));
    q.origin.push_back(qF.origin[c]);
  }
  modx::ExpandedBlock rf = modx::expand_block(d.F.ring, d.F.rels, degree_bound, 0);
  modx::ExpandedBlock rn = modx::expand_block(d.Nmod.ring, d.Nmod.rels, degree_bound, 1);
  std::vector<modx::RowKey> rows = modx::collect_rows({&q, &rf, &rn}, {});
  std::vector<modx::RowKey> frows, nrows;
  for (const auto& r : rows) (r.side == 0 ? frows : nrows).push_back(r);
  // project the F-side equations through the left kernel of the R_F block
  Mat rfF = modx::materialize_cols({&rf}, frows, pr);
  std::vector<Vec> L;
  if (mat_cols(rfF) == 0 || frows.empty()) {
    Mat id = mat_identity(frows.size(), pr);
    L.assign(id.begin(), id.end());
  } else {
    L = left_kernel(base, rfF);
  }
  Mat qFmat = modx::materialize_cols({&q}, frows, pr);
  Mat qNmat = modx::materialize_cols({&q}, nrows, pr);
  Mat rnN = modx::materialize_cols({&rn}, nrows, pr);
  std::size_t nq = q.cols.size(), nw = rn.cols.size(), ns = nrows.size();
  Mat sys(L.size() + ns, Vec(nq + nw + ns, Scalar::zero(pr)));
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t jq = 0; jq < nq; ++jq) {
      Scalar s = Scalar::zero(pr);
      for (std::size_t t = 0; t < frows.size(); ++t) s = s + L[i][t] * qFmat[t][jq];
      sys[i][jq] = s;
    }
  Scalar piPrec = Scalar::pi_power(base, d.prec);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t jq = 0; jq < nq; ++jq) sys[L.size() + i][jq] = qNmat[i][jq];
    for (std::size_t jw = 0; jw < nw; ++jw) sys[L.size() + i][nq + jw] = rnN[i][jw];
    sys[L.size() + i][nq + nw + i] = piPrec;
  }
  std::vector<Vec> ker = integral_kernel(base, sys);
  PolyContext rctx = d.base_ring.ctx();
  std::vector<std::vector<Polynomial>> rel_cols;
  for (const auto& k : ker) {
    Vec qpart(k.begin(), k.begin() + static_cast<long>(nq));
    std::vector<Polynomial> col =
        modx::coefficients_from(q, qpart, pairs_F.size(), rctx);
    bool zero = true;
    for (const auto& e : col)
      if (!e.is_zero()) zero = false;
    if (!zero) rel_cols.push_back(std::move(col));
  }
  // prune relation columns lying in the span of the others
  AffineAlgebra A0 = d.base_ring;
  std::vector<std::vector<Polynomial>> pruned;
  for (std::size_t i = 0; i < rel_cols.size(); ++i) {
    std::vector<std::vector<Polynomial>> others = pruned;
    for (std::size_t j = i + 1; j < rel_cols.size(); ++j) others.push_back(rel_cols[j]);
    if (!submodule_solve(A0, others, rel_cols[i], degree_bound)) pruned.push_back(rel_cols[i]);
  }
  // lift certificates: each scaled F-generator expressed in the glued generators
  std::vector<std::vector<Polynomial>> lifts;
  for (std::size_t i = 0; i < d.F.n_gens; ++i) {
    std::vector<Polynomial> e(d.F.n_gens, Polynomial(fctx));
    e[i] = Polynomial::constant(fctx, Scalar::one(pr));
    std::vector<Polynomial> img = detail::apply_matrix(d.iota, e, fctx);
    Scalar pik = Scalar::pi_power(base, gen_scale[i]);
    std::vector<Polynomial> f, n;
    for (auto& x : e) f.push_back(x * pik);
    for (auto& x : img) n.push_back((x * pik).with_regime(Regime::R_mod_piN(d.prec)));
    auto lift = detail::pair_in_span(d, pairs_F, pairs_N, f, n, degree_bound);
    if (!lift)
      raise(ErrorKind::PrecisionLoss, "generator lift certificate missing after pruning");
    lifts.push_back(std::move(*lift));
  }
  GluedModule out{ModulePresentation(A0, pairs_F.size(), pruned), pairs_F, pairs_N,
                  gen_scale, lifts};
  return out;
}

// ---- isomorphism testing ----

struct ModuleInvariants {
  long free_rank = 0;
  std::vector<long> torsion;  // pi-exponents of the cyclic torsion factors, sorted

  bool operator==(const ModuleInvariants& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
};

// Invariant factors of a module over a zero-variable ring (R, R[1/pi], or
// R/pi^N), via Smith diagonalization of the scalar relation matrix.
inline ModuleInvariants smith_invariants(const ModulePresentation& M) {
  if (!M.ring.vars().empty())
    raise(ErrorKind::UnsupportedRegime, "smith_invariants needs a zero-variable ring");
  const BasePair& base = M.ring.base();
  Profile pr = base.profile;
  Exps none;
  std::vector<std::vector<Polynomial>> cols = M.rels;
  int N = M.ring.regime().kind == RegimeKind::over_R_mod_piN ? M.ring.regime().N : -1;
  Mat A(M.n_gens, Vec(0, Scalar::zero(pr)));
  for (auto& row : A) row.reserve(cols.size());
  for (const auto& c : cols)
    for (std::size_t i = 0; i < M.n_gens; ++i) A[i].push_back(c[i].coeff(none));
  if (N >= 0) {
    // implicit pi^N relations of the chain-ring regime
    for (std::size_t i = 0; i < M.n_gens; ++i)
      for (std::size_t k = 0; k < M.n_gens; ++k)
        A[k].push_back(k == i ? Scalar::pi_power(base, N) : Scalar::zero(pr));
  }
  ModuleInvariants inv;
  if (M.n_gens == 0) return inv;
  if (mat_cols(A) == 0) {
    inv.free_rank = static_cast<long>(M.n_gens);
    return inv;
  }
  SmithResult s = smith_valuation(base, A);
  inv.free_rank = static_cast<long>(M.n_gens - s.rank);
  for (std::size_t k = 0; k < s.rank; ++k) {
    long v = s.pivot_val[k];
    if (M.ring.regime().kind == RegimeKind::over_R_inv_pi) continue;  // units over the field
    if (v <= 0) continue;                                             // killed generator
    if (N >= 0 && v >= N) {
      inv.free_rank += 1;  // pi^N is zero in the ring: that factor is free
      continue;
    }
    inv.torsion.push_back(v);
  }
  std::sort(inv.torsion.begin(), inv.torsion.end());
  return inv;
}

inline bool modules_isomorphic_scalar(const ModulePresentation& a, const ModulePresentation& b) {
  return smith_invariants(a) == smith_invariants(b);
}

// Certificate checker for general rings: S maps the generators of M1 into M2
// (column i = image of generator i), T maps back; both must respect relations
// and compose to the identity modulo relations.
inline bool certify_isomorphism(const ModulePresentation& M1, const ModulePresentation& M2,
                                const std::vector<std::vector<Polynomial>>& S,
                                const std::vector<std::vector<Polynomial>>& T,
                                unsigned degree_bound = 4) {
  const PolyContext& c1 = M1.ring.ctx();
  const PolyContext& c2 = M2.ring.ctx();
  auto col_of = [](const std::vector<std::vector<Polynomial>>& m, std::size_t j,
                   const PolyContext& ctx) {
    std::vector<Polynomial> col;
    for (const auto& row : m) col.push_back(row[j]);
    return col;
  };
  // well-definedness: images of relations are relations
  for (const auto& r : M1.rels) {
    std::vector<Polynomial> img = detail::apply_matrix(S, r, c2);
    if (!submodule_solve(M2.ring, M2.rels, img, degree_bound)) return false;
  }
  for (const auto& r : M2.rels) {
    std::vector<Polynomial> img = detail::apply_matrix(T, r, c1);
    if (!submodule_solve(M1.ring, M1.rels, img, degree_bound)) return false;
  }
  // T S = id mod relations of M1; S T = id mod relations of M2
  for (std::size_t j = 0; j < M1.n_gens; ++j) {
    std::vector<Polynomial> e = col_of(S, j, c2);
    std::vector<Polynomial> back = detail::apply_matrix(T, e, c1);
    back[j] = back[j] - Polynomial::constant(c1, Scalar::one(c1.base.profile));
    if (!submodule_solve(M1.ring, M1.rels, back, degree_bound)) return false;
  }
  for (std::size_t j = 0; j < M2.n_gens; ++j) {
    std::vector<Polynomial> e = col_of(T, j, c1);
    std::vector<Polynomial> fwd = detail::apply_matrix(S, e, c2);
    fwd[j] = fwd[j] - Polynomial::constant(c2, Scalar::one(c2.base.profile));
    if (!submodule_solve(M2.ring, M2.rels, fwd, degree_bound)) return false;
  }
  return true;
}

// Same generators, possibly different relation lists: mutual containment of
// the relation spans certifies equality of the presented modules.
inline bool same_module_same_generators(const ModulePresentation& a, const ModulePresentation& b,
                                        unsigned degree_bound = 4) {
  if (a.n_gens != b.n_gens || !a.ring.same_presentation(b.ring)) return false;
  for (const auto& r : a.rels)
    if (!submodule_solve(b.ring, b.rels, r, degree_bound)) return false;
  for (const auto& r : b.rels)
    if (!submodule_solve(a.ring, a.rels, r, degree_bound)) return false;
  return true;
}

// ---- torsion over A (for check_glueable and the torsion correspondence) ----

// lattice basis of {v : pi^t v in span(rels)} with coordinate polynomials of
// degree <= d, as coordinate vectors over the ring
inline std::vector<std::vector<Polynomial>> pi_power_kernel(const ModulePresentation& M, long t,
                                                            unsigned d) {
  if (M.ring.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "pi_power_kernel needs the over_R regime");
  const BasePair& base = M.ring.base();
  Profile pr = base.profile;
  const PolyContext& ctx = M.ring.ctx();
  std::vector<std::vector<Polynomial>> unit_cols;
  for (std::size_t i = 0; i < M.n_gens; ++i) {
    std::vector<Polynomial> e(M.n_gens, Polynomial(ctx));
    e[i] = Polynomial::constant(ctx, Scalar::one(pr));
    unit_cols.push_back(std::move(e));
  }
  modx::ExpandedBlock vblock = modx::expand_block(M.ring, unit_cols, d, 0);
  for (auto& c : vblock.cols)
    for (auto& [k, s] : c) s = s * Scalar::pi_power(base, t);
  modx::ExpandedBlock rblock = modx::expand_block(M.ring, M.rels, d, 0);
  for (auto& c : rblock.cols)
    for (auto& [k, s] : c) s = -s;
  std::vector<modx::RowKey> rows = modx::collect_rows({&vblock, &rblock}, {});
  Mat A = modx::materialize_cols({&vblock, &rblock}, rows, pr);
  std::vector<Vec> ker = integral_kernel(base, A);
  std::vector<std::vector<Polynomial>> out;
  for (const auto& k : ker) {
    Vec vpart(k.begin(), k.begin() + static_cast<long>(vblock.cols.size()));
    std::vector<Polynomial> col = modx::coefficients_from(vblock, vpart, M.n_gens, ctx);
    bool zero = true;
    for (const auto& e : col)
      if (!e.is_zero()) zero = false;
    if (!zero) out.push_back(std::move(col));
  }
  return out;
}

inline bool same_lattice(const AffineAlgebra& ring,
                         const std::vector<std::vector<Polynomial>>& a,
                         const std::vector<std::vector<Polynomial>>& b, unsigned d) {
  for (const auto& v : a)
    if (!submodule_solve(ring, b, v, d)) return false;
  for (const auto& v : b)
    if (!submodule_solve(ring, a, v, d)) return false;
  return true;
}

struct GlueabilityReport {
  bool tower_ok = false;
  long torsion_N0 = 0;
  bool torsion_matched = false;
  std::string summary;
  bool ok() const { return tower_ok && torsion_matched; }
};

// Checks the completion-compatibility facts behind the equivalence: the
// truncation tower of M is levelwise consistent, and the pi-torsion computed
// over A maps onto the torsion computed at truncation level.
inline GlueabilityReport check_glueable(const ModulePresentation& M, int prec, long cap = 8,
                                        unsigned degree_bound = 3) {
  if (M.ring.regime() != Regime::R())
    raise(ErrorKind::RegimeMismatch, "check_glueable expects a module over A over R");
  GlueabilityReport rep;
  // tower: relation columns at level N' reduce to relation columns at level N
  rep.tower_ok = true;
  for (int N = 1; N < prec; ++N) {
    ModulePresentation lo = M.with_regime(Regime::R_mod_piN(N));
    ModulePresentation hi = M.with_regime(Regime::R_mod_piN(N + 1));
    for (const auto& c : hi.rels) {
      std::vector<Polynomial> red;
      for (const auto& e : c) red.push_back(e.with_regime(Regime::R_mod_piN(N)));
      if (!submodule_solve(lo.ring, lo.rels, red, degree_bound)) rep.tower_ok = false;
    }
  }
  // torsion stabilization over A
  std::vector<std::vector<Polynomial>> prev = pi_power_kernel(M, 0, degree_bound);
  long N0 = -1;
  for (long t = 0; t < cap; ++t) {
    std::vector<std::vector<Polynomial>> next = pi_power_kernel(M, t + 1, degree_bound);
    if (same_lattice(M.ring, prev, next, degree_bound)) {
      N0 = t;
      break;
    }
    prev = std::move(next);
  }
  if (N0 < 0)
    raise(ErrorKind::CapExceeded, "module pi-torsion did not stabilize within the cap");
  rep.torsion_N0 = N0;
  // torsion correspondence at truncation: every element of the exact torsion
  // lattice is a torsion element at level prec, and conversely each level-prec
  // torsion class of bounded degree is congruent to an exact one
  rep.torsion_matched = true;
  ModulePresentation Mp = M.with_regime(Regime::R_mod_piN(prec));
  for (const auto& v : prev) {
    std::vector<Polynomial> red;
    for (const auto& e : v) red.push_back(e.with_regime(Regime::R_mod_piN(prec)));
    // pi^N0 * v must vanish at level prec
    std::vector<Polynomial> scaled;
    for (const auto& e : red) scaled.push_back(e * Scalar::pi_power(M.ring.base(), N0));
    if (!submodule_solve(Mp.ring, Mp.rels, scaled, degree_bound)) rep.torsion_matched = false;
  }
  rep.summary = "tower " + std::string(rep.tower_ok ? "ok" : "FAILED") + "; torsion N0 = " +
                std::to_string(N0) + "; correspondence " +
                std::string(rep.torsion_matched ? "ok" : "FAILED");
  return rep;
}

// ---- vector bundle detection ----

enum class BundleStatus { bundle, not_bundle, inconclusive };

namespace detail {

inline Polynomial poly_det(const std::vector<std::vector<Polynomial>>& m, const PolyContext& ctx) {
  std::size_t n = m.size();
  if (n == 0) return Polynomial::constant(ctx, Scalar::one(ctx.base.profile));
  if (n == 1) return m[0][0];
  Polynomial det(ctx);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    Polynomial term = m[0][j] * poly_det(minor, ctx);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// ideal of k x k minors of the presentation matrix (rows = generator coords)
inline std::vector<Polynomial> minor_ideal(const ModulePresentation& M, std::size_t k) {
  const PolyContext& ctx = M.ring.ctx();
  std::vector<Polynomial> out;
  if (k == 0) {
    out.push_back(Polynomial::constant(ctx, Scalar::one(ctx.base.profile)));
    return out;
  }
  std::size_t nrows = M.n_gens, ncols = M.rels.size();
  if (k > nrows || k > ncols) return out;  // empty: zero ideal
  std::vector<std::vector<std::size_t>> row_sets, col_sets;
  auto gen_subsets = [&](std::size_t n, std::vector<std::vector<std::size_t>>& sets) {
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    for (;;) {
      sets.push_back(s);
      long i = static_cast<long>(k) - 1;
      while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + static_cast<std::size_t>(i)) --i;
      if (i < 0) break;
      ++s[static_cast<std::size_t>(i)];
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
  };
  gen_subsets(nrows, row_sets);
  gen_subsets(ncols, col_sets);
  for (const auto& rs : row_sets)
    for (const auto& cs : col_sets) {
      std::vector<std::vector<Polynomial>> sub;
      for (std::size_t a : rs) {
        std::vector<Polynomial> row;
        for (std::size_t b : cs) row.push_back(M.rels[b][a]);
        sub.push_back(std::move(row));
      }
      Polynomial dmn = M.ring.nf(poly_det(sub, ctx));
      if (!dmn.is_zero()) out.push_back(dmn);
    }
  return out;
}

}  // namespace detail

// Fitting-ideal projectivity test over A[1/pi]: projective of rank r iff
// Fitt_r = (1) and Fitt_(r-1) = 0, i.e. all (n-r+1)-minors vanish and the
// (n-r)-minors generate the unit ideal.
inline BundleStatus fitting_projective(const ModulePresentation& F) {
  const PolyContext& ctx = F.ring.ctx();
  Polynomial one = Polynomial::constant(ctx, Scalar::one(ctx.base.profile));
  for (std::size_t r = 0; r <= F.n_gens; ++r) {
    std::vector<Polynomial> fitt_r = detail::minor_ideal(F, F.n_gens - r);
    std::vector<Polynomial> gens_r;
    for (const auto& g : fitt_r) gens_r.push_back(g);
    for (const auto& rel : F.ring.relations().gens) gens_r.push_back(rel);
    IdealPresentation Ir(ctx, gens_r);
    bool unit_r = ideal_membership(one, groebner_basis(Ir));
    if (!unit_r) continue;
    std::vector<Polynomial> fitt_rm1 =
        r == 0 ? std::vector<Polynomial>{} : detail::minor_ideal(F, F.n_gens - r + 1);
    bool zero_rm1 = true;
    for (const auto& g : fitt_rm1)
      if (!F.ring.is_zero_elem(g)) zero_rm1 = false;
    if (r == 0 || zero_rm1) return BundleStatus::bundle;
    return BundleStatus::not_bundle;  // unit Fitting ideal but jumping rank
  }
  return BundleStatus::not_bundle;  // no level reaches the unit ideal
}

inline BundleStatus is_vector_bundle_glued(const ModuleGluingDatum& d, unsigned degree_bound = 4) {
  check_datum(d, degree_bound);
  BundleStatus fstat = fitting_projective(d.F);
  if (fstat != BundleStatus::bundle) return fstat;
  // N-side: free after the torsion check
  if (d.Nmod.ring.vars().empty()) {
    ModuleInvariants inv = smith_invariants(d.Nmod);
    return inv.torsion.empty() ? BundleStatus::bundle : BundleStatus::not_bundle;
  }
  // polynomial-coefficient N-side: certify freeness only when the relation
  // columns all vanish at precision; otherwise stay honest
  bool all_zero = true;
  for (const auto& c : d.Nmod.rels)
    for (const auto& e : c)
      if (!e.is_zero()) all_zero = false;
  return all_zero ? BundleStatus::bundle : BundleStatus::inconclusive;
}

}  // namespace gluekit
