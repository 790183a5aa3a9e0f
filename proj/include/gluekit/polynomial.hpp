#pragma once

// Exact multivariate polynomials over the three coefficient regimes
// R, R[1/pi], and R/pi^N. Terms are stored sparsely; zero coefficients are
// never stored, and in the mod-pi^N regime coefficients are kept as canonical
// residue representatives.

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gluekit/scalar.hpp"

namespace gluekit {

enum class RegimeKind { over_R, over_R_inv_pi, over_R_mod_piN };

struct Regime {
  RegimeKind kind = RegimeKind::over_R;
  int N = 0;  // precision level, mod-pi^N regime only

  static Regime R() { return Regime{RegimeKind::over_R, 0}; }
  static Regime R_inv_pi() { return Regime{RegimeKind::over_R_inv_pi, 0}; }
  static Regime R_mod_piN(int n) { return Regime{RegimeKind::over_R_mod_piN, n}; }

  bool operator==(const Regime& o) const {
    return kind == o.kind && (kind != RegimeKind::over_R_mod_piN || N == o.N);
  }
  bool operator!=(const Regime& o) const { return !(*this == o); }

  std::string str() const {
    switch (kind) {
      case RegimeKind::over_R: return "R";
      case RegimeKind::over_R_inv_pi: return "R[1/pi]";
      case RegimeKind::over_R_mod_piN: return "R/pi^" + std::to_string(N);
    }
    return "?";
  }
};

struct PolyContext {
  BasePair base;
  Regime regime;
  std::vector<std::string> vars;

  bool operator==(const PolyContext& o) const {
    return base == o.base && regime == o.regime && vars == o.vars;
  }
  bool operator!=(const PolyContext& o) const { return !(*this == o); }
};

using Exps = std::vector<unsigned>;

inline unsigned total_degree(const Exps& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

enum class MonomialOrder { deglex, lex };

inline const char* order_name(MonomialOrder o) {
  return o == MonomialOrder::deglex ? "deglex" : "lex";
}

// strict order: a < b. Variable 0 is the greatest variable.
inline bool mono_less(const Exps& a, const Exps& b, MonomialOrder order) {
  if (order == MonomialOrder::deglex) {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

inline bool mono_divides(const Exps& a, const Exps& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Exps mono_mul(const Exps& a, const Exps& b) {
  Exps r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Exps mono_div(const Exps& a, const Exps& b) {
  Exps r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Exps mono_lcm(const Exps& a, const Exps& b) {
  Exps r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(PolyContext ctx) : ctx_(std::move(ctx)) {}

  static Polynomial constant(const PolyContext& ctx, const Scalar& c) {
    Polynomial p(ctx);
    p.add_term(Exps(ctx.vars.size(), 0), c);
    return p;
  }
  static Polynomial variable(const PolyContext& ctx, std::size_t i, unsigned pow = 1) {
    Polynomial p(ctx);
    Exps e(ctx.vars.size(), 0);
    e[i] = pow;
    p.add_term(e, Scalar::one(ctx.base.profile));
    return p;
  }

  const PolyContext& ctx() const { return ctx_; }
  const std::map<Exps, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t nvars() const { return ctx_.vars.size(); }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(total_degree(e)));
    return d;
  }

  void add_term(const Exps& e, const Scalar& c) {
    if (e.size() != ctx_.vars.size()) raise(ErrorKind::Internal, "exponent arity mismatch");
    Scalar v = canonical(c);
    if (v.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, v);
    } else {
      Scalar s = canonical(it->second + v);
      if (s.is_zero())
        terms_.erase(it);
      else
        it->second = s;
    }
  }

  bool operator==(const Polynomial& o) const {
    return ctx_ == o.ctx_ && terms_ == o.terms_;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial operator+(const Polynomial& o) const {
    check_ctx(o);
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  Polynomial operator-(const Polynomial& o) const {
    check_ctx(o);
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
  }
  Polynomial operator*(const Polynomial& o) const {
    check_ctx(o);
    Polynomial r(ctx_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) r.add_term(mono_mul(e1, e2), c1 * c2);
    return r;
  }
  Polynomial operator-() const {
    Polynomial r(ctx_);
    for (const auto& [e, c] : terms_) r.add_term(e, -c);
    return r;
  }
  Polynomial operator*(const Scalar& s) const {
    Polynomial r(ctx_);
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(ctx_, Scalar::one(ctx_.base.profile));
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  // leading term under the given order
  std::pair<Exps, Scalar> leading_term(MonomialOrder order) const {
    if (terms_.empty()) raise(ErrorKind::Internal, "leading term of zero");
    auto best = terms_.begin();
    for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
      if (mono_less(best->first, it->first, order)) best = it;
    return {best->first, best->second};
  }

  Scalar coeff(const Exps& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar::zero(ctx_.base.profile) : it->second;
  }

  // min over terms of v_pi(coefficient); +infinity for the zero polynomial
  Valuation gauss_valuation() const {
    Valuation v = Valuation::inf();
    for (const auto& [e, c] : terms_) v = min(v, c.valuation(ctx_.base));
    return v;
  }

  bool is_integral() const {
    return gauss_valuation() >= Valuation::of(0);
  }

  // same terms reinterpreted in another regime (reducing mod pi^N on entry to
  // a residue regime; entering over_R requires integral coefficients)
  Polynomial with_regime(const Regime& r) const {
    PolyContext c = ctx_;
    c.regime = r;
    Polynomial out(c);
    for (const auto& [e, v] : terms_) out.add_term(e, v);
    return out;
  }

  // evaluate by substituting images[i] for variable i; images share a context
  Polynomial substitute(const std::vector<Polynomial>& images, const PolyContext& target) const {
    if (images.size() != nvars()) raise(ErrorKind::Internal, "substitute arity");
    Polynomial r(target);
    for (const auto& [e, c] : terms_) {
      Polynomial t = Polynomial::constant(target, c);
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] > 0) t = t * images[i].pow(e[i]);
      r = r + t;
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    // print highest deglex terms first for readability
    std::vector<const std::pair<const Exps, Scalar>*> ts;
    for (const auto& t : terms_) ts.push_back(&t);
    std::sort(ts.begin(), ts.end(), [](auto* a, auto* b) {
      return mono_less(b->first, a->first, MonomialOrder::deglex);
    });
    std::ostringstream os;
    bool first = true;
    for (auto* t : ts) {
      std::string cs = t->second.str();
      bool neg = !cs.empty() && cs[0] == '-';
      if (!first)
        os << (neg ? " - " : " + ");
      else if (neg)
        os << "-";
      first = false;
      if (neg) cs = cs.substr(1);
      std::string mono = mono_str(t->first);
      if (mono.empty())
        os << cs;
      else if (cs == "1")
        os << mono;
      else
        os << cs << "*" << mono;
    }
    return os.str();
  }

  std::string mono_str(const Exps& e) const {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!s.empty()) s += "*";
      s += ctx_.vars[i];
      if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s;
  }

 private:
  void check_ctx(const Polynomial& o) const {
    if (ctx_ != o.ctx_) raise(ErrorKind::RegimeMismatch, "polynomial contexts differ");
  }

  Scalar canonical(const Scalar& c) const {
    if (ctx_.regime.kind == RegimeKind::over_R_mod_piN)
      return c.reduce_mod_piN(ctx_.base, ctx_.regime.N);
    if (ctx_.regime.kind == RegimeKind::over_R && !c.is_zero() && !c.is_integral(ctx_.base))
      raise(ErrorKind::NotIntegral, "coefficient " + c.str() + " is not in R");
    return c;
  }

  PolyContext ctx_;
  std::map<Exps, Scalar> terms_;
};

}  // namespace gluekit
