#pragma once

// Exact linear algebra over the fraction field of R with pi-valuation
// bookkeeping. The Smith-style diagonalization with minimum-valuation pivots
// is the workhorse behind every lattice membership, spanning, and kernel
// computation in the gluing pipelines (entries may have negative valuation;
// transforms stay unimodular over the valuation ring).

#include <cstddef>
#include <optional>
#include <vector>

#include "gluekit/scalar.hpp"

namespace gluekit {

using Vec = std::vector<Scalar>;
using Mat = std::vector<Vec>;  // row-major

inline Mat mat_identity(std::size_t n, Profile profile) {
  Mat m(n, Vec(n, Scalar::zero(profile)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Scalar::one(profile);
  return m;
}

inline std::size_t mat_rows(const Mat& m) { return m.size(); }
inline std::size_t mat_cols(const Mat& m) { return m.empty() ? 0 : m[0].size(); }

inline Vec mat_vec(const Mat& m, const Vec& x) {
  Vec r(m.size(), x.empty() ? Scalar() : Scalar::zero(x[0].profile()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    Scalar s = m[i].empty() ? Scalar() : Scalar::zero(m[i][0].profile());
    for (std::size_t j = 0; j < m[i].size(); ++j) s = s + m[i][j] * x[j];
    r[i] = s;
  }
  return r;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  std::size_t n = mat_rows(a), k = mat_cols(a), m = mat_cols(b);
  Profile pr = n && k ? a[0][0].profile() : Profile::arithmetic;
  Mat r(n, Vec(m, Scalar::zero(pr)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) r[i][j] = r[i][j] + a[i][t] * b[t][j];
    }
  return r;
}

inline Mat mat_transpose(const Mat& a) {
  std::size_t n = mat_rows(a), m = mat_cols(a);
  Profile pr = n && m ? a[0][0].profile() : Profile::arithmetic;
  Mat r(m, Vec(n, Scalar::zero(pr)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) r[j][i] = a[i][j];
  return r;
}

// --- Smith-style diagonalization with valuation pivots ---
//
// Produces U * A * V = D with D diagonal (pi-power entries up to units,
// normalized to exact pi powers) and U, V invertible over the valuation ring.

struct SmithResult {
  Mat U, Uinv, V, Vinv;
  Mat D;
  std::vector<long> pivot_val;  // valuations of the diagonal pivots
  std::size_t rank = 0;
};

inline SmithResult smith_valuation(const BasePair& base, Mat A) {
  std::size_t n = mat_rows(A), m = mat_cols(A);
  Profile pr = base.profile;
  SmithResult res;
  res.U = mat_identity(n, pr);
  res.Uinv = mat_identity(n, pr);
  res.V = mat_identity(m, pr);
  res.Vinv = mat_identity(m, pr);
  res.D = A;
  Mat& D = res.D;

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    std::swap(D[a], D[b]);
    std::swap(res.U[a], res.U[b]);
    for (std::size_t i = 0; i < n; ++i) std::swap(res.Uinv[i][a], res.Uinv[i][b]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < n; ++i) std::swap(D[i][a], D[i][b]);
    for (std::size_t i = 0; i < m; ++i) std::swap(res.V[i][a], res.V[i][b]);
    std::swap(res.Vinv[a], res.Vinv[b]);
  };
  // row[a] -= c * row[b]
  auto add_row = [&](std::size_t a, std::size_t b, const Scalar& c) {
    for (std::size_t j = 0; j < m; ++j) D[a][j] = D[a][j] - c * D[b][j];
    for (std::size_t j = 0; j < n; ++j) res.U[a][j] = res.U[a][j] - c * res.U[b][j];
    for (std::size_t i = 0; i < n; ++i) res.Uinv[i][b] = res.Uinv[i][b] + c * res.Uinv[i][a];
  };
  // col[a] -= c * col[b]
  auto add_col = [&](std::size_t a, std::size_t b, const Scalar& c) {
    for (std::size_t i = 0; i < n; ++i) D[i][a] = D[i][a] - c * D[i][b];
    for (std::size_t i = 0; i < m; ++i) res.V[i][a] = res.V[i][a] - c * res.V[i][b];
    for (std::size_t j = 0; j < m; ++j) res.Vinv[b][j] = res.Vinv[b][j] + c * res.Vinv[a][j];
  };
  // row[a] *= u (u a unit); inverse op on Uinv
  auto scale_row = [&](std::size_t a, const Scalar& u) {
    for (std::size_t j = 0; j < m; ++j) D[a][j] = D[a][j] * u;
    for (std::size_t j = 0; j < n; ++j) res.U[a][j] = res.U[a][j] * u;
    Scalar ui = Scalar::one(pr) / u;
    for (std::size_t i = 0; i < n; ++i) res.Uinv[i][a] = res.Uinv[i][a] * ui;
  };

  std::size_t k = 0;
  while (k < n && k < m) {
    // find the minimum-valuation entry in the trailing block
    bool found = false;
    std::size_t pi = k, pj = k;
    Valuation best = Valuation::inf();
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < m; ++j) {
        if (D[i][j].is_zero()) continue;
        Valuation v = D[i][j].valuation(base);
        if (!found || v < best) {
          best = v;
          pi = i;
          pj = j;
          found = true;
        }
      }
    if (!found) break;
    if (pi != k) swap_rows(k, pi);
    if (pj != k) swap_cols(k, pj);
    long v = best.v;
    Scalar piv = Scalar::pi_power(base, v);
    scale_row(k, piv / D[k][k]);  // unit since D[k][k] has valuation v
    for (std::size_t i = k + 1; i < n; ++i)
      if (!D[i][k].is_zero()) add_row(i, k, D[i][k] / piv);
    for (std::size_t j = k + 1; j < m; ++j)
      if (!D[k][j].is_zero()) add_col(j, k, D[k][j] / piv);
    res.pivot_val.push_back(v);
    ++k;
  }
  res.rank = k;
  return res;
}

// Solve A x = b with x integral (all valuations >= 0). Entries of A and b may
// be arbitrary field elements.
inline std::optional<Vec> solve_integral(const BasePair& base, const Mat& A, const Vec& b) {
  std::size_t n = mat_rows(A), m = mat_cols(A);
  if (n == 0) return Vec(m, Scalar::zero(base.profile));
  SmithResult s = smith_valuation(base, A);
  Vec ub = mat_vec(s.U, b);
  Vec y(m, Scalar::zero(base.profile));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < s.rank) {
      Scalar q = ub[i] / Scalar::pi_power(base, s.pivot_val[i]);
      if (!q.is_integral(base)) return std::nullopt;
      y[i] = q;
    } else if (!ub[i].is_zero()) {
      return std::nullopt;
    }
  }
  return mat_vec(s.V, y);
}

// Solve A x = b over the field.
inline std::optional<Vec> solve_field(const BasePair& base, const Mat& A, const Vec& b) {
  std::size_t n = mat_rows(A), m = mat_cols(A);
  if (n == 0) return Vec(m, Scalar::zero(base.profile));
  SmithResult s = smith_valuation(base, A);
  Vec ub = mat_vec(s.U, b);
  Vec y(m, Scalar::zero(base.profile));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < s.rank) {
      y[i] = ub[i] / Scalar::pi_power(base, s.pivot_val[i]);
    } else if (!ub[i].is_zero()) {
      return std::nullopt;
    }
  }
  return mat_vec(s.V, y);
}

// Basis (as rows) of the integral kernel lattice {x integral : A x = 0}. The
// lattice is automatically saturated (integer points of a Q-subspace).
inline std::vector<Vec> integral_kernel(const BasePair& base, const Mat& A) {
  std::size_t m = mat_cols(A);
  if (mat_rows(A) == 0) {
    std::vector<Vec> basis;
    Mat id = mat_identity(m, base.profile);
    for (std::size_t i = 0; i < m; ++i) basis.push_back(id[i]);
    return basis;
  }
  SmithResult s = smith_valuation(base, A);
  std::vector<Vec> basis;
  for (std::size_t j = s.rank; j < m; ++j) {
    Vec col(m, Scalar::zero(base.profile));
    // column j of V, rescaled so its minimal valuation is zero
    Valuation vmin = Valuation::inf();
    for (std::size_t i = 0; i < m; ++i) {
      col[i] = s.V[i][j];
      if (!col[i].is_zero()) vmin = min(vmin, col[i].valuation(base));
    }
    if (vmin.infinite) continue;
    Scalar sc = Scalar::pi_power(base, -vmin.v);
    for (auto& x : col) x = x * sc;
    basis.push_back(col);
  }
  return basis;
}

// Basis of the kernel over the field (rows).
inline std::vector<Vec> field_kernel(const BasePair& base, const Mat& A) {
  return integral_kernel(base, A);  // same subspace; integral basis is fine
}

// Rows spanning the left kernel {y : y A = 0} over the field.
inline std::vector<Vec> left_kernel(const BasePair& base, const Mat& A) {
  return field_kernel(base, mat_transpose(A));
}

// Does b lie in the span of A's columns with coefficients integral mod pi^N,
// i.e. is b hit modulo pi^N? Implemented as integral solvability of
// [A | pi^N I] x = b.
inline std::optional<Vec> solve_integral_mod(const BasePair& base, const Mat& A, const Vec& b,
                                             int N) {
  std::size_t n = mat_rows(A), m = mat_cols(A);
  Mat aug(n, Vec(m + n, Scalar::zero(base.profile)));
  Scalar piN = Scalar::pi_power(base, N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) aug[i][j] = A[i][j];
    aug[i][m + i] = piN;
  }
  auto sol = solve_integral(base, aug, b);
  if (!sol) return std::nullopt;
  return Vec(sol->begin(), sol->begin() + static_cast<long>(m));
}

// Mixed solvability: exists (w integral, q in the field) with
// Aint w + Afield q = b. Projects out the field part via the left kernel.
inline std::optional<Vec> solve_mixed(const BasePair& base, const Mat& Aint, const Mat& Afield,
                                      const Vec& b) {
  std::size_t nrows = std::max(mat_rows(Aint), mat_rows(Afield));
  std::vector<Vec> L;
  if (mat_cols(Afield) == 0) {
    Mat id = mat_identity(nrows, base.profile);
    L.assign(id.begin(), id.end());
  } else {
    L = left_kernel(base, Afield);
  }
  if (L.empty()) return Vec(mat_cols(Aint), Scalar::zero(base.profile));
  Mat proj;
  Vec pb;
  for (const auto& row : L) {
    Vec pr(mat_cols(Aint), Scalar::zero(base.profile));
    Scalar s = Scalar::zero(base.profile);
    for (std::size_t i = 0; i < row.size(); ++i) {
      s = s + row[i] * b[i];
      for (std::size_t j = 0; j < mat_cols(Aint); ++j)
        pr[j] = pr[j] + row[i] * Aint[i][j];
    }
    proj.push_back(pr);
    pb.push_back(s);
  }
  return solve_integral(base, proj, pb);
}

}  // namespace gluekit
