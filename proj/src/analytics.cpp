#include "uihp/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "uihp/errors.hpp"
#include "uihp/labeled_trees.hpp"

namespace uihp {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::recursion: return "recursion";
    case Provenance::deconvolution: return "deconvolution";
    case Provenance::series: return "series";
    default: return "oracle";
  }
}

nlohmann::json to_json(const SeriesTable& t) {
  nlohmann::json j{{"name", t.name},
                   {"first", t.first},
                   {"provenance", provenance_name(t.provenance)},
                   {"values", t.values},
                   {"error", t.error},
                   {"residual", t.residual}};
  if (t.is_exact()) {
    std::vector<std::string> q;
    for (const auto& v : t.exact) q.push_back(v.get_str());
    j["exact"] = q;
  }
  return j;
}

void write_csv(std::ostream& os, const SeriesTable& t) {
  os << "name,index,value,error,exact,provenance\n";
  os.precision(17);
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    os << t.name << ',' << t.first + static_cast<int>(k) << ',' << t.values[k] << ',' << t.error[k]
       << ',' << (t.is_exact() ? t.exact[k].get_str() : "") << ',' << provenance_name(t.provenance)
       << '\n';
  }
}

double closed_h(int m) { return 1.0 - 2.0 / ((m + 1.0) * (m + 2.0)); }
double closed_tri_rm(int m) { return m * (m + 2.0) / ((m + 1.0) * (m + 1.0)); }
double closed_tri_sm(int m, const TriangularWeights& w) {
  return 1.0 - w.g3 * w.R * w.R / w.S * 2.0 / ((m + 1.0) * (m + 2.0));
}

namespace {

// trajectory of g(m+1) = A - B(m) - r(m)/g(m); exit = +1 above 1, -1 at or below 0, 0 none
struct Trajectory {
  std::vector<long double> g;  // g[1..]
  int exit = 0;
  int valid = 0;  // last index with g in (0,1)
};

Trajectory forward(long double x, long double A, const std::function<long double(int)>& B,
                   const std::function<long double(int)>& r, int K) {
  Trajectory t;
  t.g.assign(K + 1, 0);
  long double g = x;
  for (int m = 1; m <= K; ++m) {
    if (!(g > 0)) {
      t.exit = -1;
      return t;
    }
    if (!(g < 1)) {
      t.exit = 1;
      return t;
    }
    t.g[m] = g;
    t.valid = m;
    g = A - B(m) - r(m) / g;
  }
  return t;
}

}  // namespace

ShootResult shoot_universal(long double A, const std::function<long double(int)>& B,
                            const std::function<long double(int)>& r, int M, int K) {
  long double lo = 0, hi = 1;
  Trajectory tlo, thi, tmid;
  bool settled = false;
  for (int it = 0; it < 400; ++it) {
    const long double mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    tmid = forward(mid, A, B, r, K);
    if (tmid.exit == 0) {
      settled = true;
      lo = hi = mid;
      break;
    }
    if (tmid.exit > 0) hi = mid;
    else lo = mid;
  }
  ShootResult res;
  long double far_value = 0;
  if (settled) {
    res.x = lo;
    res.far = K;
    far_value = tmid.g[K];
  } else {
    // the true trajectory is bracketed by the two last trials (the map is increasing)
    tlo = forward(lo, A, B, r, K);
    thi = forward(hi, A, B, r, K);
    const int top = std::min(tlo.valid, thi.valid);
    int far = 0;
    for (int m = 1; m <= top; ++m)
      if (thi.g[m] - tlo.g[m] < 1e-6L) far = m;
      else break;
    res.x = (lo + hi) / 2;
    res.far = far;
    if (far > 0) far_value = (tlo.g[far] + thi.g[far]) / 2;
  }
  if (res.far <= M) throw NoConvergence(static_cast<double>(res.far));
  std::vector<long double> g(res.far + 1, 0);
  g[res.far] = far_value;
  for (int m = res.far - 1; m >= 1; --m) g[m] = r(m) / (A - B(m) - g[m + 1]);
  res.g.assign(g.begin(), g.begin() + M + 2);
  for (int m = 1; m <= M; ++m) {
    const long double lhs = res.g[m] * (A - B(m) - res.g[m + 1]);
    res.residual = std::max(res.residual, static_cast<double>(std::fabs(lhs - r(m))));
  }
  res.g.resize(M + 1);
  return res;
}

SeriesTable solve_arch_recursion(const std::vector<double>& h, int M) {
  const int K = static_cast<int>(h.size()) - 1;
  if (K < 2 * M) throw Error("solve_arch_recursion needs h well beyond M");
  const auto res = shoot_universal(
      2.0L, [](int) { return 0.0L; }, [&](int m) { return static_cast<long double>(h[m]); }, M,
      K - 1);
  SeriesTable t;
  t.name = "g";
  t.first = 1;
  t.provenance = Provenance::recursion;
  for (int m = 1; m <= M; ++m) t.push(static_cast<double>(res.g[m]));
  t.residual = res.residual;
  for (int m = 1; m <= M; ++m)
    if (!(t[m] > 0 && t[m] < 1)) throw NoConvergence(t[m]);
  return t;
}

NlReport verify_nl_uniqueness(int M) {
  auto step = [](int m, long double f) {
    const long double a = (m + 1.0L) * (m + 2.0L);
    return (a * f - 2) / (a * (1 - f));
  };
  // exit index, or -1 if the trajectory stays in (0,1) up to K
  auto run = [&](long double x, int K, std::vector<long double>* out) {
    long double f = x;
    if (out) out->assign(1, 1.0L);
    for (int m = 1; m <= K; ++m) {
      if (!(f > 0) || !(f < 1)) return m;
      if (out) out->push_back(f);
      f = step(m, f);
    }
    return -1;
  };
  auto side = [&](long double x, int K) {
    long double f = x;
    for (int m = 1; m <= K; ++m) {
      if (!(f > 0)) return -1;
      if (!(f < 1)) return 1;
      f = step(m, f);
    }
    return 0;
  };
  NlReport rep;
  const int K = std::max(100000, 20 * M);
  long double lo = 0, hi = 1;
  for (int it = 0; it < 400; ++it) {
    const long double mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    const int s = side(mid, K);
    if (s == 0) {
      lo = hi = mid;
      break;
    }
    if (s > 0) hi = mid;
    else lo = mid;
  }
  rep.x_star = (lo + hi) / 2;
  std::vector<long double> f;
  const int e = run(rep.x_star, M, &f);
  if (e != -1) throw NoConvergence(e);
  rep.f = f;
  for (int m = 1; m <= M; ++m)
    rep.max_error = std::max(rep.max_error, static_cast<double>(std::fabs(f[m] - 1.0L / (m + 1))));
  rep.exit_below = run(0.5L - 1e-6L, K, nullptr);
  rep.exit_above = run(0.5L + 1e-6L, K, nullptr);
  rep.f2_from_half = static_cast<double>(step(1, 0.5L));
  const std::vector<long double> xs{0.1L, 0.3L, 0.45L, 0.499L, 0.5L, 0.501L, 0.55L, 0.7L, 0.9L};
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      long double a = xs[i], b = xs[j];
      ++rep.pairs;
      for (int m = 1; m <= K; ++m) {
        if (!(a > 0 && a < 1 && b > 0 && b < 1)) break;
        if (!(a < b)) {
          rep.ordering = false;
          break;
        }
        a = step(m, a);
        b = step(m, b);
      }
    }
  return rep;
}

SeriesTable renewal_deconvolve(const SeriesTable& u) {
  SeriesTable f;
  f.name = "f";
  f.first = 0;
  f.provenance = Provenance::deconvolution;
  const int N = u.last();
  if (u.first != 0) throw Error("renewal_deconvolve: table must start at 0");
  if (u.is_exact()) {
    if (u.exact[0] != 1) throw Error("renewal_deconvolve: u_0 must be 1");
    std::vector<mpq_class> fv(N + 1, 0);
    for (int n = 1; n <= N; ++n) {
      mpq_class s = u.exact[n];
      for (int k = 1; k < n; ++k) s -= fv[k] * u.exact[n - k];
      s.canonicalize();
      fv[n] = s;
    }
    for (const auto& v : fv) f.push(v);
  } else {
    std::vector<long double> fv(N + 1, 0);
    for (int n = 1; n <= N; ++n) {
      long double s = u.values[n];
      for (int k = 1; k < n; ++k) s -= fv[k] * u.values[n - k];
      fv[n] = s;
    }
    for (auto v : fv) f.push(static_cast<double>(v));
  }
  return f;
}

namespace {

using Poly = std::vector<mpq_class>;

Poly multiply(const Poly& a, const Poly& b, std::size_t n) {
  Poly c(n, 0);
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) c[i + j] += a[i] * b[j];
  }
  for (auto& x : c) x.canonicalize();
  return c;
}

// 1/a mod s^n by Newton: r <- r (2 - a r)
Poly reciprocal(const Poly& a, std::size_t n) {
  Poly r{mpq_class(1) / a[0]};
  std::size_t k = 1;
  while (k < n) {
    k = std::min(2 * k, n);
    Poly ar = multiply(a, r, k);
    for (auto& x : ar) x = -x;
    ar[0] += 2;
    r = multiply(r, ar, k);
  }
  return r;
}

// ln(1/(1-s)) = integral of 1/(1-s)
Poly log_series(std::size_t n) {
  Poly geo(n, 1);
  Poly out(n, 0);
  for (std::size_t k = 1; k < n; ++k) out[k] = geo[k - 1] / mpq_class(static_cast<long>(k));
  return out;
}

}  // namespace

SeriesTable series_coefficients(Series which, int N) {
  const std::size_t n = static_cast<std::size_t>(N) + 1;
  const Poly L = log_series(n + 3);
  SeriesTable t;
  t.first = 0;
  t.provenance = Provenance::series;
  Poly out;
  if (which == Series::U) {
    t.name = "U";
    out.assign(L.begin() + 1, L.begin() + 1 + n);  // -(1/s) ln(1-s)
  } else if (which == Series::F) {
    t.name = "F";
    const Poly Ls(L.begin() + 1, L.begin() + 1 + n);  // L(s)/s
    out = reciprocal(Ls, n);                          // s/L(s)
    for (auto& x : out) x = -x;
    out[0] += 1;
  } else {
    t.name = "H";
    // L - s - s^2/2 = s^3 W(s)
    const Poly W(L.begin() + 3, L.begin() + 3 + n);
    out = reciprocal(W, n);
    for (auto& x : out) x = -x / 3;
    out[0] += 1;
  }
  for (auto& x : out) {
    x.canonicalize();
    t.push(x);
  }
  return t;
}

SeriesTable membership_table(int c, int N) {
  SeriesTable t;
  t.name = "u" + std::to_string(c);
  t.first = 0;
  t.provenance = Provenance::closed_form;
  for (int k = 0; k <= N; ++k) t.push(mpq_class(c, k + c));
  return t;
}

TailTrend tail_trend(const std::vector<int>& points) {
  TailTrend tr;
  const int N = *std::max_element(points.begin(), points.end());
  auto deconv = [N](auto zero, int c) {
    using T = decltype(zero);
    std::vector<T> u(N + 1), f(N + 1, 0);
    for (int n = 0; n <= N; ++n) u[n] = T(c) / T(n + c);
    for (int n = 1; n <= N; ++n) {
      T s = u[n];
      for (int k = 1; k < n; ++k) s -= f[k] * u[n - k];
      f[n] = s;
    }
    return f;
  };
  const auto fl = deconv(0.0L, 1), hl = deconv(0.0L, 3);
  const auto fd = deconv(0.0, 1);
  for (int m : points) {
    const long double l = std::log(static_cast<long double>(m));
    tr.m.push_back(m);
    tr.f_scaled.push_back(static_cast<double>(fl[m] * m * l * l));
    tr.h_over_f.push_back(static_cast<double>(hl[m] / fl[m]));
    tr.error.push_back(static_cast<double>(std::fabs(fl[m] - fd[m]) * m * l * l));
  }
  tr.f_increasing = true;
  tr.ratio_approaching = true;
  for (std::size_t k = 0; k < tr.m.size(); ++k) {
    if (tr.f_scaled[k] >= 1) tr.f_increasing = false;
    if (tr.h_over_f[k] <= 1.0 / 3) tr.ratio_approaching = false;
    if (k == 0) continue;
    if (!(tr.f_scaled[k] - tr.error[k] > tr.f_scaled[k - 1] + tr.error[k - 1])) tr.f_increasing = false;
    if (!(tr.h_over_f[k] < tr.h_over_f[k - 1])) tr.ratio_approaching = false;
  }
  return tr;
}

TriangularTables triangular_tables(int M, const TriangularWeights& w) {
  TriangularTables t;
  t.identity_residual = std::fabs(2 * w.g3 * std::pow(w.R, 1.5) - 1);
  const int K = std::max(40 * M, 2000);
  const auto fp = solve_mobile_fixed_point(8 * K, w);
  auto init = [](SeriesTable& s, const char* name, Provenance p) {
    s.name = name;
    s.first = 1;
    s.provenance = p;
  };
  init(t.rm_closed, "R_m/R", Provenance::closed_form);
  init(t.sm_closed, "S_m/S", Provenance::closed_form);
  init(t.rm_oracle, "R_m/R", Provenance::oracle);
  init(t.sm_oracle, "S_m/S", Provenance::oracle);
  init(t.f_tilde, "f_tilde", Provenance::recursion);
  init(t.delta_prime, "P(Delta'_0>=m)", Provenance::recursion);
  for (int m = 1; m <= M; ++m) {
    t.rm_closed.push(closed_tri_rm(m));
    t.sm_closed.push(closed_tri_sm(m, w));
    t.rm_oracle.push(1 - fp.a[m], fp.residual);
    t.sm_oracle.push(1 - fp.b[m], fp.residual);
    t.oracle_gap = std::max({t.oracle_gap, std::fabs(t.rm_oracle[m] - t.rm_closed[m]),
                             std::fabs(t.sm_oracle[m] - t.sm_closed[m])});
  }
  // forward recursion at f = 1/(m+1)
  for (int m = 1; m <= M; ++m) {
    const long double f = 1.0L / (m + 1), a = (m + 1.0L) * (m + 1.0L);
    const long double next = (a * f - 1) / (a * (1 - f)) - 1.0L / ((m + 1.0L) * (m + 2.0L));
    t.recursion_residual =
        std::max(t.recursion_residual, static_cast<double>(std::fabs(next - 1.0L / (m + 2))));
  }
  // universal relation with the oracle tables, solved by shooting
  const long double sqrtR = std::sqrt(static_cast<long double>(w.R));
  const long double A = w.C() / sqrtR;
  const auto res = shoot_universal(
      A, [&](int m) { return (1 - static_cast<long double>(fp.b[m])) * w.S / sqrtR; },
      [&](int m) { return 1 - static_cast<long double>(fp.a[m]); }, M, K);
  for (int m = 1; m <= M; ++m) {
    const double f = static_cast<double>(1 - res.g[m]);
    t.f_tilde.push(f);
    t.f_tilde_gap = std::max(t.f_tilde_gap, std::fabs(f - 1.0 / (m + 1)));
    const double dp = 1 - static_cast<double>(res.g[m]) / t.rm_oracle[m];
    t.delta_prime.push(dp);
    t.delta_prime_gap = std::max(t.delta_prime_gap, std::fabs(dp - 1.0 / (m + 2)));
  }
  t.f_tilde.residual = res.residual;
  // quad parameters: S = 0, C = 2 sqrt R, R_m/R = h(m)
  for (int m = 1; m <= M; ++m)
    for (double x : {0.1, 0.5, 0.9})
      for (double y : {0.2, 0.6, 0.95}) {
        const double rR = 1.7;  // any R works once S = 0
        const double Cq = 2 * std::sqrt(rR);
        const double lhs = x * (Cq / std::sqrt(rR) - 0.0 - y) - closed_h(m);
        const double arch = x * (2 - y) - closed_h(m);
        t.universal_quad_gap = std::max(t.universal_quad_gap, std::fabs(lhs - arch));
      }
  return t;
}

double intersection_product(int i) { return (1.0 / (i + 1)) * (3.0 / (i + 3)); }

}  // namespace uihp
