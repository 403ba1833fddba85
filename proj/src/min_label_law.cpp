#include <algorithm>
#include <cmath>

#include "tridiagonal.hpp"
#include "uihp/errors.hpp"
#include "uihp/labeled_trees.hpp"

namespace uihp {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Newton iteration with step halving on a tridiagonal nonlinear system.
// eval(z, F, sub, diag, sup) fills the residual and the Jacobian.
template <class Eval>
int newton_tridiagonal(std::vector<double>& z, Eval eval, int max_iter) {
  const std::size_t n = z.size();
  std::vector<double> F(n), sub(n - 1), diag(n), sup(n - 1);
  std::vector<double> F_trial(n), s1(n - 1), d1(n), u1(n - 1);
  eval(z, F, sub, diag, sup);
  double norm = max_abs(F);
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> step(F);
    detail::solve_tridiagonal(sub, diag, sup, step);
    double t = 1.0;
    std::vector<double> trial(n);
    bool improved = false;
    for (int halving = 0; halving <= 8; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = z[i] - t * step[i];
      eval(trial, F_trial, s1, d1, u1);
      const double trial_norm = max_abs(F_trial);
      if (trial_norm < norm) {
        norm = trial_norm;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return it;  // stuck at rounding level; z keeps the best iterate
    double rel = 0;
    for (std::size_t i = 0; i < n; ++i)
      rel = std::max(rel, std::abs(trial[i] - z[i]) / std::max(std::abs(trial[i]), 1e-300));
    z.swap(trial);
    F.swap(F_trial);
    sub.swap(s1);
    diag.swap(d1);
    sup.swap(u1);
    if (rel < 1e-15 || norm == 0) return it;
  }
  return max_iter;
}

}  // namespace

FixedPointSolution solve_min_label_fixed_point(int M, const OracleOptions& opt) {
  if (M < 1) M = 1;
  // unknowns q_1..q_M with q = 1 - h; q_0 = 1, q_{M+1} = q_M.
  // 3 * (h form residual) rearranged: q_{k-1} - 2 q_k + q_{k+1} - q_k (q_{k-1} + q_k + q_{k+1}) = 0
  std::vector<double> z(M);
  for (int k = 1; k <= M; ++k) z[k - 1] = 1.0 / (k + 1);
  auto eval = [M](const std::vector<double>& q, std::vector<double>& F, std::vector<double>& sub,
                  std::vector<double>& diag, std::vector<double>& sup) {
    for (int k = 1; k <= M; ++k) {
      const double qm = k == 1 ? 1.0 : q[k - 2];
      const double qk = q[k - 1];
      const bool last = k == M;
      const double qp = last ? qk : q[k];
      F[k - 1] = qm - 2 * qk + qp - qk * (qm + qk + qp);
      if (k > 1) sub[k - 2] = 1 - qk;
      if (!last) {
        sup[k - 1] = 1 - qk;
        diag[k - 1] = -2 - (qm + 2 * qk + qp);
      } else {
        diag[k - 1] = -1 - (qm + 4 * qk);
      }
    }
  };
  FixedPointSolution sol;
  sol.iterations = newton_tridiagonal(z, eval, opt.max_iter);
  sol.q.resize(M + 1);
  sol.q[0] = 1.0;
  std::copy(z.begin(), z.end(), sol.q.begin() + 1);
  double res = 0;
  for (int k = 1; k <= M; ++k) {
    const double hm = 1 - sol.q[k - 1], hk = 1 - sol.q[k], hp = 1 - sol.q[std::min(k + 1, M)];
    res = std::max(res, std::abs(hk - 1.0 / (2.0 - (hm + hk + hp) / 3.0)));
  }
  sol.residual = res;
  if (!(res < opt.tol)) throw NoConvergence(res);
  return sol;
}

double oracle_h(int m, const OracleOptions& opt) {
  if (m <= 0) return 0.0;
  const int M = std::max(10 * m, 1000);
  return 1.0 - solve_min_label_fixed_point(M, opt).q[m];
}

QuadMinLaw::QuadMinLaw(int max_depth) {
  auto sol = solve_min_label_fixed_point(8 * max_depth);
  q_.assign(sol.q.begin(), sol.q.begin() + max_depth + 1);
}

double QuadMinLaw::tail(int d) const {
  if (d <= 0) return 1.0;
  if (d > max_depth()) throw CapExceeded(CapExceeded::Kind::law_range, q_.size());
  return q_[d];
}

bool QuadMinLaw::reaches(double u, int d) const {
  if (d <= 0) return true;
  if (d > max_depth()) {
    if (u >= q_.back()) return false;
    throw CapExceeded(CapExceeded::Kind::law_range, q_.size());
  }
  return u < q_[d];
}

namespace {
// max{d : u < tail[d]} on a decreasing table with tail[0] > u
int search_depth(const std::vector<double>& tail, double u) {
  if (u < tail.back()) throw CapExceeded(CapExceeded::Kind::law_range, tail.size());
  // first index with tail <= u
  auto it = std::upper_bound(tail.begin(), tail.end(), u, [](double x, double t) { return t <= x; });
  return static_cast<int>(it - tail.begin()) - 1;
}
}  // namespace

int QuadMinLaw::sample_depth(double u) const { return search_depth(q_, u); }

MobileFixedPoint solve_mobile_fixed_point(int M, const TriangularWeights& w,
                                          const OracleOptions& opt) {
  if (M < 1) M = 1;
  const double rho = w.labeled_ratio();
  const double kappa = rho / (2 * (1 - rho));
  const double p3 = w.three_flag_prob();
  const double pl = w.labeled_face_prob();
  const double nu = 1 - 2 * p3;
  // interleaved unknowns: b_n at 2n (n = 0..M), a_n at 2n-1 (n = 1..M); a_0 = 1, a_{M+1} = a_M
  const int N = 2 * M + 1;
  std::vector<double> z(N);
  for (int n = 0; n <= M; ++n) z[2 * n] = 1.0 / (n + 1);
  for (int n = 1; n <= M; ++n) z[2 * n - 1] = 1.0 / (n + 1);
  auto eval = [=](const std::vector<double>& x, std::vector<double>& F, std::vector<double>& sub,
                  std::vector<double>& diag, std::vector<double>& sup) {
    auto a = [&](int n) { return n == 0 ? 1.0 : x[2 * std::min(n, M) - 1]; };
    auto b = [&](int n) { return x[2 * n]; };
    for (int n = 0; n <= M; ++n) {
      // half-mobile equation, row 2n
      const int r = 2 * n;
      const double bn = b(n);
      F[r] = nu * bn + p3 * bn * bn - pl * (a(n) + a(n + 1));
      diag[r] = nu + 2 * p3 * bn;
      if (n >= 1) sub[r - 1] = -pl;
      if (n < M) sup[r] = -pl;
      else sub[r - 1] += -pl;
    }
    for (int n = 1; n <= M; ++n) {
      // mobile equation, row 2n-1
      const int r = 2 * n - 1;
      const double an = a(n), s = b(n) + b(n - 1);
      F[r] = (1 - an) * (1 + kappa * s) - 1;
      diag[r] = -(1 + kappa * s);
      sup[r] = kappa * (1 - an);
      sub[r - 1] = kappa * (1 - an);
    }
  };
  MobileFixedPoint sol;
  sol.iterations = newton_tridiagonal(z, eval, opt.max_iter);
  std::vector<double> F(N), s(N - 1), d(N), u(N - 1);
  eval(z, F, s, d, u);
  sol.residual = max_abs(F);
  sol.a.resize(M + 1);
  sol.b.resize(M + 1);
  sol.a[0] = 1.0;
  for (int n = 1; n <= M; ++n) sol.a[n] = z[2 * n - 1];
  for (int n = 0; n <= M; ++n) sol.b[n] = z[2 * n];
  if (!(sol.residual < opt.tol)) throw NoConvergence(sol.residual);
  return sol;
}

MobileMinLaw::MobileMinLaw(const TriangularWeights& w, int max_depth) {
  auto sol = solve_mobile_fixed_point(8 * max_depth, w);
  a_.assign(sol.a.begin(), sol.a.begin() + max_depth + 1);
  b_.assign(sol.b.begin(), sol.b.begin() + max_depth + 1);
}

double MobileMinLaw::mobile_tail(int d) const {
  if (d <= 0) return 1.0;
  if (d > max_depth()) throw CapExceeded(CapExceeded::Kind::law_range, a_.size());
  return a_[d];
}

double MobileMinLaw::half_tail(int d) const {
  if (d <= -1) return 1.0;
  if (d > max_depth()) throw CapExceeded(CapExceeded::Kind::law_range, b_.size());
  return b_[d];
}

bool MobileMinLaw::mobile_reaches(double u, int d) const {
  if (d <= 0) return true;
  if (d > max_depth()) {
    if (u >= a_.back()) return false;
    throw CapExceeded(CapExceeded::Kind::law_range, a_.size());
  }
  return u < a_[d];
}

bool MobileMinLaw::half_reaches(double u, int d) const {
  if (d <= -1) return true;
  if (d > max_depth()) {
    if (u >= b_.back()) return false;
    throw CapExceeded(CapExceeded::Kind::law_range, b_.size());
  }
  return u < b_[d];
}

int MobileMinLaw::sample_mobile_depth(double u) const { return search_depth(a_, u); }

int MobileMinLaw::sample_half_depth(double u) const {
  if (u >= b_[0]) return -1;
  return search_depth(b_, u);
}

}  // namespace uihp
