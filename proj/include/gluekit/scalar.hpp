#pragma once

// Base-pair (R, pi) and exact scalar arithmetic for the two coefficient
// profiles: rationals with a distinguished prime p (arithmetic) and rational
// functions in t over Q (geometric). All arithmetic is exact; there is no
// floating point anywhere in the library.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gluekit/error.hpp"

namespace gluekit {

enum class Profile { arithmetic, geometric };

// The ambient data (R, pi). In the arithmetic profile R = Z_(p) and pi = p;
// in the geometric profile R = Q[t]_(t) and pi = t.
struct BasePair {
  Profile profile = Profile::arithmetic;
  long p = 2;  // the prime, arithmetic profile only
  std::string description;

  bool operator==(const BasePair& o) const {
    return profile == o.profile && (profile == Profile::geometric || p == o.p);
  }
  bool operator!=(const BasePair& o) const { return !(*this == o); }

  std::string pi_name() const { return profile == Profile::arithmetic ? "p" : "t"; }

  std::string str() const {
    if (profile == Profile::arithmetic) return "Zp(" + std::to_string(p) + ")";
    return "Qt";
  }

  static BasePair arithmetic_base(long prime) {
    return BasePair{Profile::arithmetic, prime, "Z localized at " + std::to_string(prime)};
  }
  static BasePair geometric_base() {
    return BasePair{Profile::geometric, 0, "Q[t] localized at (t)"};
  }
};

// pi-adic valuation value: a (possibly infinite) integer. Infinity is the
// valuation of zero.
struct Valuation {
  bool infinite = false;
  long v = 0;

  static Valuation inf() { return Valuation{true, 0}; }
  static Valuation of(long x) { return Valuation{false, x}; }

  bool operator==(const Valuation& o) const {
    return infinite == o.infinite && (infinite || v == o.v);
  }
  bool operator<(const Valuation& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return v < o.v;
  }
  bool operator<=(const Valuation& o) const { return *this < o || *this == o; }
  bool operator>=(const Valuation& o) const { return !(*this < o); }

  Valuation operator+(const Valuation& o) const {
    if (infinite || o.infinite) return inf();
    return of(v + o.v);
  }

  std::string str() const { return infinite ? "inf" : std::to_string(v); }
};

inline Valuation min(Valuation a, Valuation b) { return a < b ? a : b; }

// --- dense univariate polynomials over Q, used for the geometric profile ---

struct UniPoly {
  std::vector<mpq_class> c;  // c[i] = coefficient of t^i

  UniPoly() = default;
  explicit UniPoly(mpq_class a) {
    if (a != 0) c.push_back(std::move(a));
  }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  // order of vanishing at t = 0; -1 for the zero polynomial
  long ord() const {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) return static_cast<long>(i);
    return -1;
  }

  mpq_class coeff(std::size_t i) const { return i < c.size() ? c[i] : mpq_class(0); }

  UniPoly operator+(const UniPoly& o) const {
    UniPoly r;
    r.c.resize(std::max(c.size(), o.c.size()));
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = coeff(i) + o.coeff(i);
    r.trim();
    return r;
  }
  UniPoly operator-(const UniPoly& o) const {
    UniPoly r;
    r.c.resize(std::max(c.size(), o.c.size()));
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = coeff(i) - o.coeff(i);
    r.trim();
    return r;
  }
  UniPoly operator*(const UniPoly& o) const {
    UniPoly r;
    if (is_zero() || o.is_zero()) return r;
    r.c.assign(c.size() + o.c.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
  }
  UniPoly operator-() const {
    UniPoly r = *this;
    for (auto& x : r.c) x = -x;
    return r;
  }

  bool operator==(const UniPoly& o) const { return c == o.c; }

  // euclidean remainder by a nonzero divisor
  static void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r) {
    q = UniPoly();
    r = a;
    r.trim();
    UniPoly bb = b;
    bb.trim();
    if (bb.is_zero()) raise(ErrorKind::Internal, "UniPoly division by zero");
    while (!r.is_zero() && r.degree() >= bb.degree()) {
      int d = r.degree() - bb.degree();
      mpq_class f = r.c.back() / bb.c.back();
      if (static_cast<int>(q.c.size()) < d + 1) q.c.resize(d + 1);
      q.c[d] += f;
      for (std::size_t i = 0; i < bb.c.size(); ++i) r.c[i + d] -= f * bb.c[i];
      r.trim();
    }
    q.trim();
  }

  static UniPoly gcd(UniPoly a, UniPoly b) {
    a.trim();
    b.trim();
    while (!b.is_zero()) {
      UniPoly q, r;
      divmod(a, b, q, r);
      a = b;
      b = r;
    }
    if (!a.is_zero()) {
      mpq_class lead = a.c.back();
      for (auto& x : a.c) x /= lead;  // monic
    }
    return a;
  }

  // truncated inverse: 1/this mod t^N (requires unit constant term)
  UniPoly inverse_mod_tN(int N) const {
    if (is_zero() || c[0] == 0) raise(ErrorKind::NotAUnit, "power series inverse needs unit constant term");
    UniPoly inv;
    inv.c.assign(N, mpq_class(0));
    inv.c[0] = 1 / c[0];
    for (int k = 1; k < N; ++k) {
      mpq_class s = 0;
      for (int i = 1; i <= k; ++i) s += coeff(i) * inv.c[k - i];
      inv.c[k] = -s / c[0];
    }
    inv.trim();
    return inv;
  }

  UniPoly truncated(int N) const {
    UniPoly r = *this;
    if (static_cast<int>(r.c.size()) > N) r.c.resize(N);
    r.trim();
    return r;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      if (!first) os << (c[i] > 0 ? " + " : " - ");
      mpq_class a = first ? c[i] : mpq_class(abs(c[i]));
      first = false;
      if (i == 0)
        os << a;
      else if (a == 1)
        os << "t" << (i > 1 ? "^" + std::to_string(i) : "");
      else
        os << a << "*t" << (i > 1 ? "^" + std::to_string(i) : "");
    }
    return os.str();
  }
};

// --- Scalar: an element of the fraction field of R ---
//
// Arithmetic profile: an exact rational. Geometric profile: a reduced
// rational function num/den in Q(t) with den(0)-normalization when possible.

class Scalar {
 public:
  Scalar() : profile_(Profile::arithmetic), q_(0) {}

  static Scalar rational(mpq_class q) {
    Scalar s;
    s.profile_ = Profile::arithmetic;
    s.q_ = std::move(q);
    s.q_.canonicalize();
    return s;
  }
  static Scalar ratfun(UniPoly num, UniPoly den) {
    Scalar s;
    s.profile_ = Profile::geometric;
    s.num_ = std::move(num);
    s.den_ = std::move(den);
    s.normalize();
    return s;
  }
  static Scalar integer(long n, Profile profile) {
    if (profile == Profile::arithmetic) return rational(mpq_class(n));
    return ratfun(UniPoly(mpq_class(n)), UniPoly(mpq_class(1)));
  }
  static Scalar zero(Profile profile) { return integer(0, profile); }
  static Scalar one(Profile profile) { return integer(1, profile); }

  // the distinguished element pi of the base
  static Scalar pi(const BasePair& base) {
    if (base.profile == Profile::arithmetic) return rational(mpq_class(base.p));
    UniPoly t;
    t.c = {mpq_class(0), mpq_class(1)};
    return ratfun(t, UniPoly(mpq_class(1)));
  }
  static Scalar pi_power(const BasePair& base, long k) {
    Scalar r = one(base.profile);
    Scalar p = pi(base);
    if (k >= 0) {
      for (long i = 0; i < k; ++i) r = r * p;
    } else {
      for (long i = 0; i < -k; ++i) r = r / p;
    }
    return r;
  }

  Profile profile() const { return profile_; }
  const mpq_class& rat() const { return q_; }

  bool is_zero() const {
    return profile_ == Profile::arithmetic ? q_ == 0 : num_.is_zero();
  }
  bool is_one() const {
    if (profile_ == Profile::arithmetic) return q_ == 1;
    return num_ == den_;
  }

  bool operator==(const Scalar& o) const {
    check_profile(o);
    if (profile_ == Profile::arithmetic) return q_ == o.q_;
    return (num_ * o.den_) == (o.num_ * den_);
  }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  Scalar operator+(const Scalar& o) const {
    check_profile(o);
    if (profile_ == Profile::arithmetic) return rational(q_ + o.q_);
    return ratfun(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Scalar operator-(const Scalar& o) const {
    check_profile(o);
    if (profile_ == Profile::arithmetic) return rational(q_ - o.q_);
    return ratfun(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Scalar operator*(const Scalar& o) const {
    check_profile(o);
    if (profile_ == Profile::arithmetic) return rational(q_ * o.q_);
    return ratfun(num_ * o.num_, den_ * o.den_);
  }
  Scalar operator/(const Scalar& o) const {
    check_profile(o);
    if (o.is_zero()) raise(ErrorKind::Internal, "scalar division by zero");
    if (profile_ == Profile::arithmetic) return rational(q_ / o.q_);
    return ratfun(num_ * o.den_, den_ * o.num_);
  }
  Scalar operator-() const {
    if (profile_ == Profile::arithmetic) return rational(-q_);
    return ratfun(-num_, den_);
  }

  // pi-adic valuation relative to the given base; infinity at zero
  Valuation valuation(const BasePair& base) const {
    if (is_zero()) return Valuation::inf();
    if (profile_ == Profile::arithmetic) {
      if (base.profile != Profile::arithmetic) raise(ErrorKind::RegimeMismatch, "scalar profile vs base");
      return Valuation::of(padic_val(q_.get_num(), base.p) - padic_val(q_.get_den(), base.p));
    }
    if (base.profile != Profile::geometric) raise(ErrorKind::RegimeMismatch, "scalar profile vs base");
    return Valuation::of(num_.ord() - den_.ord());
  }

  bool is_integral(const BasePair& base) const {
    return is_zero() || valuation(base).v >= 0;
  }

  // canonical residue representative mod pi^N: an integer in [0, pi^N) for the
  // arithmetic profile, a polynomial in t of degree < N for the geometric one.
  // Requires valuation >= 0.
  Scalar reduce_mod_piN(const BasePair& base, int N) const {
    if (is_zero()) return zero(profile_);
    if (!is_integral(base)) raise(ErrorKind::NotIntegral, "cannot reduce a scalar of negative valuation");
    if (base.profile == Profile::arithmetic) {
      mpz_class mod;
      mpz_ui_pow_ui(mod.get_mpz_t(), static_cast<unsigned long>(base.p), static_cast<unsigned long>(N));
      mpz_class deninv;
      if (mpz_invert(deninv.get_mpz_t(), q_.get_den().get_mpz_t(), mod.get_mpz_t()) == 0)
        raise(ErrorKind::NotAUnit, "denominator not invertible mod pi^N");
      mpz_class r = (q_.get_num() % mod) * deninv % mod;
      if (r < 0) r += mod;
      return rational(mpq_class(r));
    }
    UniPoly deninv = den_.inverse_mod_tN(N);
    UniPoly r = (num_ * deninv).truncated(N);
    return ratfun(r, UniPoly(mpq_class(1)));
  }

  // exact division within the valuation ring / chain ring: returns q with
  // q * b == a whenever v(b) <= v(a) (plus q integral); mod pi^N the quotient
  // is taken as the canonical representative mod pi^(N - v(b)), which makes
  // the corresponding reduction step well defined.
  static bool divide_dvr(const Scalar& a, const Scalar& b, const BasePair& base, Scalar& out) {
    if (a.is_zero()) {
      out = zero(a.profile_);
      return true;
    }
    if (b.is_zero()) return false;
    if (b.valuation(base) <= a.valuation(base)) {
      out = a / b;
      return true;
    }
    return false;
  }

  std::string str() const {
    if (profile_ == Profile::arithmetic) return q_.get_str();
    if (den_.degree() == 0 && den_.coeff(0) == 1) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

  static long padic_val(const mpz_class& n, long p) {
    if (n == 0) raise(ErrorKind::Internal, "padic_val(0)");
    mpz_class m = abs(n), q, r;
    long v = 0;
    mpz_class P(p);
    for (;;) {
      mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t(), P.get_mpz_t());
      if (r != 0) break;
      m = q;
      ++v;
    }
    return v;
  }

 private:
  void check_profile(const Scalar& o) const {
    if (profile_ != o.profile_) raise(ErrorKind::RegimeMismatch, "mixed scalar profiles");
  }

  void normalize() {
    num_.trim();
    den_.trim();
    if (den_.is_zero()) raise(ErrorKind::Internal, "zero denominator");
    if (num_.is_zero()) {
      den_ = UniPoly(mpq_class(1));
      return;
    }
    UniPoly g = UniPoly::gcd(num_, den_);
    if (g.degree() > 0) {
      UniPoly q, r;
      UniPoly::divmod(num_, g, q, r);
      num_ = q;
      UniPoly::divmod(den_, g, q, r);
      den_ = q;
    }
    // scale so the lowest nonzero denominator coefficient is 1
    mpq_class s = den_.c[static_cast<std::size_t>(std::max<long>(den_.ord(), 0))];
    for (auto& x : num_.c) x /= s;
    for (auto& x : den_.c) x /= s;
  }

  Profile profile_;
  mpq_class q_;
  UniPoly num_, den_;
};

}  // namespace gluekit
