#pragma once

// shared helpers for the test suites: seeded rng (GLUEKIT_SEED) and random
// scalars/polynomials per context

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "gluekit/polynomial.hpp"

namespace testutil {

inline std::uint64_t seed_from_env() {
  const char* s = std::getenv("GLUEKIT_SEED");
  if (!s) return 0xC0FFEE123456789ULL;
  return std::strtoull(s, nullptr, 10);
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(seed_from_env());
  return gen;
}

inline long rand_int(long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  return d(rng());
}

// random rational with numerator/denominator bounded by `height`; denominator
// kept coprime to p so the value lies in R for the arithmetic profile
inline gluekit::Scalar rand_scalar(const gluekit::BasePair& base, long height,
                                   bool allow_denominator = false) {
  using namespace gluekit;
  if (base.profile == Profile::arithmetic) {
    long num = rand_int(-height, height);
    long den = 1;
    if (allow_denominator) {
      den = rand_int(1, height);
      while (den % base.p == 0) den = rand_int(1, height);
    }
    return Scalar::rational(mpq_class(num, den));
  }
  UniPoly n;
  int deg = static_cast<int>(rand_int(0, 2));
  for (int i = 0; i <= deg; ++i) n.c.push_back(mpq_class(rand_int(-height, height)));
  n.trim();
  return Scalar::ratfun(n, UniPoly(mpq_class(1)));
}

inline gluekit::Polynomial rand_poly(const gluekit::PolyContext& ctx, int max_deg, long height,
                                     int max_terms = 4) {
  using namespace gluekit;
  Polynomial p(ctx);
  int nterms = static_cast<int>(rand_int(0, max_terms));
  for (int t = 0; t < nterms; ++t) {
    Exps e(ctx.vars.size(), 0);
    int budget = static_cast<int>(rand_int(0, max_deg));
    for (int d = 0; d < budget && !ctx.vars.empty(); ++d)
      e[static_cast<std::size_t>(rand_int(0, static_cast<long>(ctx.vars.size()) - 1))]++;
    p.add_term(e, rand_scalar(ctx.base, height));
  }
  return p;
}

}  // namespace testutil
