#pragma once
// Recursion solvers, renewal deconvolution, power-series coefficients and the
// triangular tables. Exact rationals where the sizes allow it.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "uihp/constants.hpp"

namespace uihp {

enum class Provenance { closed_form, recursion, deconvolution, series, oracle };
const char* provenance_name(Provenance p);

struct SeriesTable {
  std::string name;
  int first = 0;  // index of values[0]
  Provenance provenance = Provenance::closed_form;
  std::vector<double> values;
  std::vector<double> error;     // absolute error bound per entry, 0 for exact entries
  std::vector<mpq_class> exact;  // filled for rational tables
  double residual = 0;           // defining-identity residual when relevant

  bool is_exact() const { return !exact.empty(); }
  int last() const { return first + static_cast<int>(values.size()) - 1; }
  double operator[](int n) const { return values[n - first]; }
  const mpq_class& q(int n) const { return exact[n - first]; }
  void push(double v, double err = 0) {
    values.push_back(v);
    error.push_back(err);
  }
  void push(const mpq_class& v) {
    exact.push_back(v);
    exact.back().canonicalize();
    values.push_back(exact.back().get_d());
    error.push_back(0);
  }
};

nlohmann::json to_json(const SeriesTable& t);
void write_csv(std::ostream& os, const SeriesTable& t);

// ---- closed forms, used only as references ----
double closed_h(int m);             // 1 - 2/((m+1)(m+2))
double closed_tri_rm(int m);        // m(m+2)/(m+1)^2
double closed_tri_sm(int m, const TriangularWeights& w);

// ---- shooting for g(m) (A - B(m) - g(m+1)) = r(m), m >= 1 ----
// Forward map g(m+1) = A - B(m) - r(m)/g(m) from g(1) = x. Bisection picks the x whose
// trajectory stays in (0,1) up to m = K; the far value then seeds a backward sweep
// g(m) = r(m)/(A - B(m) - g(m+1)), which is contracting.
struct ShootResult {
  std::vector<long double> g;  // g[m], m = 1..M (g[0] unused)
  long double x = 0;           // shooting parameter g(1) from bisection
  int far = 0;                 // index of the far boundary used by the backward sweep
  double residual = 0;         // max |g(m)(A - B(m) - g(m+1)) - r(m)|, m <= M
};
ShootResult shoot_universal(long double A, const std::function<long double(int)>& B,
                            const std::function<long double(int)>& r, int M, int K);

// g(m) = h(m)/(2 - g(m+1)); h[m] for m = 0..K with K >= 4M used for the far boundary.
SeriesTable solve_arch_recursion(const std::vector<double>& h, int M);

struct NlReport {
  long double x_star = 0;        // bisected f(1)
  double max_error = 0;          // max |f(m) - 1/(m+1)|, m <= M
  std::vector<long double> f;    // f[m], m = 0..M
  int exit_below = -1;           // exit step from 1/2 - 1e-6
  int exit_above = -1;           // exit step from 1/2 + 1e-6
  bool ordering = true;          // x1 < x2 => f1 < f2 while both in (0,1)
  int pairs = 0;
  double f2_from_half = 0;       // one forward step from f(1) = 1/2
};
NlReport verify_nl_uniqueness(int M);

// f_n from u_n = f_1 u_{n-1} + ... + f_n u_0 (u_0 = 1); exact when u is exact.
SeriesTable renewal_deconvolve(const SeriesTable& u);

enum class Series { U, F, H };
// Coefficients 0..N by power-series reciprocal (Newton iteration) in rationals.
SeriesTable series_coefficients(Series which, int N);

// probabilities of 3/(n+3) etc. as exact tables
SeriesTable membership_table(int numerator_shift, int N);  // c/(n+c), exact

struct TailTrend {
  std::vector<int> m;
  std::vector<double> f_scaled;   // f_m m ln^2 m
  std::vector<double> h_over_f;   // P(G'_1 = m) / P(G_1 = m)
  std::vector<double> error;      // |long double - double| estimate on f_m m ln^2 m
  bool f_increasing = false;
  bool ratio_approaching = false; // decreasing and above 1/3
};
TailTrend tail_trend(const std::vector<int>& points);

struct TriangularTables {
  SeriesTable rm_closed, sm_closed, rm_oracle, sm_oracle;
  SeriesTable f_tilde;         // 1 - g from the universal relation with oracle tables
  SeriesTable delta_prime;     // P(Delta'_0 >= m) from f_tilde and R_m/R
  double identity_residual = 0;   // |2 g3 R^{3/2} - 1|
  double recursion_residual = 0;  // 1/(m+1) plugged into the forward recursion
  double oracle_gap = 0;          // oracle tables vs closed forms
  double universal_quad_gap = 0;  // universal relation at quad parameters vs the arch identity
  double f_tilde_gap = 0;         // |f_tilde - 1/(m+1)|
  double delta_prime_gap = 0;     // vs 1/(m+2)
};
TriangularTables triangular_tables(int M, const TriangularWeights& w = TriangularWeights::critical());

double intersection_product(int i);

}  // namespace uihp
