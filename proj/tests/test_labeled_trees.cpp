#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "uihp/errors.hpp"
#include "uihp/labeled_trees.hpp"

using namespace uihp;

namespace {

double closed_h(int m) { return 1.0 - 2.0 / ((m + 1.0) * (m + 2.0)); }

// all plane trees with exactly n edges, as Lukasiewicz words (child counts in preorder)
void enumerate_trees(int n, const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> word;
  std::function<void(int, int)> rec = [&](int open, int edges_left) {
    // open = number of nodes still to be written
    if (open == 0) {
      if (edges_left == 0) emit(word);
      return;
    }
    for (int k = 0; k <= edges_left; ++k) {
      word.push_back(k);
      rec(open - 1 + k, edges_left - k);
      word.pop_back();
    }
  };
  rec(1, n);
}

}  // namespace

TEST_CASE("zero-offspring draw gives a single node") {
  // find a stream whose first geometric draw is 0
  uint64_t key = 0;
  for (;; ++key) {
    Rng probe(key);
    if (probe.geometric_half() == 0) break;
  }
  Rng rng(key);
  const PlaneTree t = sample_gw_tree(rng);
  CHECK(t.size() == 1);
  CHECK(t.edge_count() == 0);
}

TEST_CASE("P(|tau| = 0) is 1/2") {
  Rng rng(11);
  const int N = 200000;
  int zero = 0;
  for (int i = 0; i < N; ++i) {
    try {
      if (sample_gw_tree(rng, 64).edge_count() == 0) ++zero;
    } catch (const CapExceeded&) {
    }
  }
  const double p = double(zero) / N;
  CHECK(std::abs(p - 0.5) < 4 * std::sqrt(0.25 / N));
}

TEST_CASE("tree sizes match the enumeration oracle over trees with <= 12 edges") {
  // weight of one plane tree with n edges: 2^{-(2n+1)}
  double mass = 0, mean12 = 0;
  std::size_t count = 0;
  for (int n = 0; n <= 12; ++n) {
    enumerate_trees(n, [&](const std::vector<int>& w) {
      ++count;
      mass += std::ldexp(1.0, -(2 * n + 1));
      mean12 += n * std::ldexp(1.0, -(2 * n + 1));
      CHECK(w.size() == std::size_t(n + 1));
    });
  }
  CHECK(count == 290512);  // sum of Catalan numbers up to 12
  const double rem = 1.0 - mass;
  const double lower = mean12 + 13 * rem, upper = mean12 + 100 * rem;

  Rng rng(2024);
  const int N = 1000000;
  double sum100 = 0, sum100sq = 0, sum12 = 0, sum12sq = 0;
  for (int i = 0; i < N; ++i) {
    std::size_t e;
    try {
      e = sample_gw_tree(rng, 101).edge_count();
    } catch (const CapExceeded&) {
      e = 100;
    }
    const double a = double(std::min<std::size_t>(e, 100)), b = double(std::min<std::size_t>(e, 12));
    sum100 += a;
    sum100sq += a * a;
    sum12 += b;
    sum12sq += b * b;
  }
  const double m100 = sum100 / N, se100 = std::sqrt((sum100sq / N - m100 * m100) / N);
  CHECK(m100 >= lower - 3 * se100);
  CHECK(m100 <= upper + 3 * se100);
  // with the cap at 12 the oracle value is exact
  const double exact12 = mean12 + 12 * rem;
  const double m12 = sum12 / N, se12 = std::sqrt((sum12sq / N - m12 * m12) / N);
  CHECK(std::abs(m12 - exact12) < 3 * se12);
}

TEST_CASE("node cap raises CapExceeded") {
  Rng rng(5);
  bool thrown = false;
  for (int i = 0; i < 1000 && !thrown; ++i) {
    try {
      sample_gw_tree(rng, 3);
    } catch (const CapExceeded& e) {
      thrown = true;
      CHECK(e.cap == 3);
      CHECK(e.kind == CapExceeded::Kind::nodes);
    }
  }
  CHECK(thrown);
}

TEST_CASE("labels") {
  Rng rng(3);
  SUBCASE("single node keeps the root label") {
    const auto t = label_uniform(PlaneTree(), 5, rng);
    CHECK(t.labels == std::vector<int32_t>{5});
  }
  SUBCASE("two-node tree increments are uniform (chi-square, 99%)") {
    const PlaneTree two(std::vector<int32_t>{-1, 0});
    const int N = 100000;
    int bins[3] = {0, 0, 0};
    for (int i = 0; i < N; ++i) {
      const auto t = label_uniform(two, 7, rng);
      const int d = t.labels[1] - 7;
      REQUIRE(std::abs(d) <= 1);
      ++bins[d + 1];
    }
    double chi2 = 0;
    for (int b : bins) chi2 += (b - N / 3.0) * (b - N / 3.0) / (N / 3.0);
    CHECK(chi2 < 9.2103);  // chi-square(2) quantile at 0.99
  }
  SUBCASE("sampled trees are well labeled") {
    for (int i = 0; i < 2000; ++i) {
      bool ok = true;
      try {
        ok = sample_labeled_tree(rng, -3, 100000).valid();
      } catch (const CapExceeded&) {
      }
      CHECK(ok);
    }
  }
}

TEST_CASE("min label") {
  WellLabeledTree single{PlaneTree(), {0}};
  CHECK(min_label(single) == 0);
  WellLabeledTree path{PlaneTree(std::vector<int32_t>{-1, 0, 1, 2}), {0, -1, -1, -1}};
  CHECK(min_label(path) == -1);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    WellLabeledTree t;
    try {
      t = sample_labeled_tree(rng, 0, 200000);
    } catch (const CapExceeded&) {
      continue;
    }
    // independent traversal: contour order
    int32_t m = t.labels[0];
    for (uint32_t v : contour_corners(t.tree)) m = std::min(m, t.labels[v]);
    CHECK(min_label(t) == m);
  }
}

TEST_CASE("contour of a hand-built tree") {
  // root with children 1 and 2; node 1 has child 3
  const PlaneTree t(std::vector<int32_t>{-1, 0, 0, 1});
  CHECK(contour_corners(t) == std::vector<uint32_t>{0, 1, 3, 1, 0, 2, 0});
  CHECK(contour_corners(t).size() == 2 * t.edge_count() + 1);
}

TEST_CASE("tree JSON round trip") {
  Rng rng(4);
  const auto t = sample_labeled_tree(rng, 2, 1000000);
  const auto back = labeled_tree_from_json(to_json(t));
  CHECK(back.labels == t.labels);
  CHECK(back.tree.parents() == t.tree.parents());
  CHECK_THROWS(labeled_tree_from_json(nlohmann::json{{"parents", {-1, 0}}, {"labels", {0, 2}}}));
}

TEST_CASE("oracle_h") {
  CHECK(oracle_h(0) == 0.0);
  CHECK(oracle_h(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(oracle_h(5) == doctest::Approx(1.0 - 2.0 / 42.0).epsilon(1e-12));
  for (int m = 0; m <= 50; ++m) CHECK(std::abs(oracle_h(m) - closed_h(m)) < 1e-8);
  // free boundary: doubling M leaves small-m values unchanged
  const auto a = solve_min_label_fixed_point(1000), b = solve_min_label_fixed_point(2000);
  for (int m = 1; m <= 50; ++m) CHECK(std::abs(a.q[m] - b.q[m]) < 1e-11);
  CHECK(a.residual < 1e-13);
  OracleOptions strict;
  strict.max_iter = 1;
  CHECK_THROWS_AS(oracle_h(10, strict), NoConvergence);
}

TEST_CASE("quad min-label law table and sampler") {
  const QuadMinLaw law(1 << 10);
  for (int d : {1, 2, 10, 100, 1000})
    CHECK(law.tail(d) == doctest::Approx(1 - closed_h(d)).epsilon(1e-6));
  CHECK(law.sample_depth(0.999) == 0);
  CHECK(law.sample_depth(0.5) == 0);  // tail(1) = 1/3, tail(2) = 1/6
  CHECK(law.sample_depth(0.2) == 1);
  CHECK(law.sample_depth(0.12) == 2);
  CHECK(law.reaches(0.9, 0));
  CHECK_FALSE(law.reaches(0.99, 5000));
  CHECK_THROWS_AS(law.reaches(1e-12, 5000), CapExceeded);
}

TEST_CASE("empirical min-label law of explicit trees matches oracle_h") {
  Rng rng(99);
  const int N = 40000;
  std::vector<int> above(21, 0);
  int used = 0, truncated = 0;
  for (int i = 0; i < N; ++i) {
    int32_t mn;
    try {
      mn = min_label(sample_labeled_tree(rng, 0, 1000000));
    } catch (const CapExceeded&) {
      ++truncated;
      continue;
    }
    ++used;
    for (int m = 1; m <= 20; ++m)
      if (mn > -m) ++above[m];
  }
  const double tfrac = double(truncated) / N;
  for (int m = 1; m <= 20; ++m) {
    const double h = oracle_h(m), p = double(above[m]) / used;
    CHECK(std::abs(p - h) <= 3 * std::sqrt(h * (1 - h) / used) + tfrac);
  }
}

// ---- mobiles ----

namespace {

struct Enumerated {
  std::string code;
  int faces;
};

// encodings follow Mobile::encode(): kind letter, value (not for faces), children in parentheses
std::vector<Enumerated> gen_flag(int f, int budget);

std::vector<Enumerated> gen_labeled(int n, int budget) {
  // sequences of face children
  std::vector<Enumerated> out;
  std::function<void(std::string, int)> rec = [&](std::string acc, int used) {
    out.push_back({"L" + std::to_string(n) + "(" + acc + ")", used});
    if (used >= budget) return;
    for (int f : {n, n - 1}) {
      for (const auto& sub : gen_flag(f, budget - used - 1))
        rec(acc + "U(" + sub.code + ")", used + 1 + sub.faces);
    }
  };
  rec("", 0);
  return out;
}

std::vector<Enumerated> gen_flag(int f, int budget) {
  // a flag has one face below it
  std::vector<Enumerated> out;
  if (budget < 1) return out;
  const std::string F = "F" + std::to_string(f);
  for (int x : {f, f + 1})
    for (const auto& l : gen_labeled(x, budget - 1))
      out.push_back({F + "(U(" + l.code + "))", 1 + l.faces});
  for (const auto& a : gen_flag(f, budget - 1))
    for (const auto& b : gen_flag(f, budget - 1 - a.faces))
      out.push_back({F + "(U(" + a.code + b.code + "))", 1 + a.faces + b.faces});
  return out;
}

}  // namespace

TEST_CASE("critical constants") {
  const auto w = TriangularWeights::critical();
  CHECK(w.p_up() == doctest::Approx((std::sqrt(3.0) - 1) / 2).epsilon(1e-14));
  CHECK(w.p_level() == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-14));
  CHECK(2 * w.p_up() + w.p_level() == doctest::Approx(1.0).epsilon(1e-15));
  // Boltzmann normalizations
  CHECK(w.R * (1 - 2 * w.g3 * w.S) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.g3 * (w.S * w.S + 2 * w.R) == doctest::Approx(w.S).epsilon(1e-14));
  // smallest mobile: a lone labeled vertex, weight g^0 / R
  CHECK(1 - w.labeled_ratio() == doctest::Approx(1 / w.R).epsilon(1e-14));
}

TEST_CASE("mobile sampler matches Boltzmann enumeration of mobiles with <= 3 faces") {
  const auto w = TriangularWeights::critical();
  const auto all = gen_labeled(0, 3);
  std::map<std::string, double> expected;
  for (const auto& e : all) expected[e.code] += std::pow(w.g3, e.faces) / w.R;
  CHECK(expected.size() == all.size());  // no duplicate encodings
  CHECK(expected.at("L0()") == doctest::Approx(1 / w.R));

  Rng rng(31337);
  const int N = 1000000;
  std::map<std::string, int> seen;
  int other = 0;
  for (int i = 0; i < N; ++i) {
    try {
      const Mobile m = sample_mobile(rng, 0, w, 11);  // <= 3 faces means <= 10 nodes
      if (m.unlabeled_count() <= 3) ++seen[m.encode()];
      else ++other;
    } catch (const CapExceeded&) {
      ++other;
    }
  }
  double mass = 0;
  int worst_sigma = 0;
  for (const auto& [code, p] : expected) {
    mass += p;
    const double emp = seen.count(code) ? double(seen[code]) / N : 0.0;
    const double s = std::sqrt(p * (1 - p) / N);
    if (std::abs(emp - p) > 3 * s) ++worst_sigma;
  }
  for (const auto& [code, c] : seen) CHECK_MESSAGE(expected.count(code), code);
  // 3 sigma per cell; a couple of hundred cells allow a handful of excursions
  CHECK(worst_sigma <= std::max<int>(2, expected.size() / 100));
  const double emp_other = double(other) / N;
  CHECK(std::abs(emp_other - (1 - mass)) < 3 * std::sqrt(mass * (1 - mass) / N));
}

TEST_CASE("sampled mobiles satisfy the degree identity and the face rule") {
  const auto w = TriangularWeights::critical();
  Rng rng(12);
  for (int i = 0; i < 3000; ++i) {
    try {
      const Mobile m = i % 2 ? sample_mobile(rng, i % 7 - 3, w, 100000)
                             : sample_half_mobile(rng, i % 5 - 2, w, 100000);
      std::string why;
      CHECK_MESSAGE(m.valid(&why), why);
      CHECK(m.is_half_mobile() == (i % 2 == 0));
    } catch (const CapExceeded&) {
    }
  }
}

TEST_CASE("mobile min-label tail reproduces R_m / R") {
  const auto w = TriangularWeights::critical();
  Rng rng(77);
  const int N = 60000;
  std::vector<int> above(11, 0);
  int used = 0, truncated = 0;
  for (int i = 0; i < N; ++i) {
    int32_t mn;
    try {
      mn = min_label(sample_mobile(rng, 0, w, 1000000));
    } catch (const CapExceeded&) {
      ++truncated;
      continue;
    }
    ++used;
    for (int m = 1; m <= 10; ++m)
      if (mn > -m) ++above[m];
  }
  for (int m = 1; m <= 10; ++m) {
    const double p = m * (m + 2.0) / ((m + 1.0) * (m + 1.0));
    const double emp = double(above[m]) / used;
    CHECK(std::abs(emp - p) <= 3 * std::sqrt(p * (1 - p) / used) + double(truncated) / N);
  }
}

TEST_CASE("mobile fixed point matches the closed forms") {
  const auto w = TriangularWeights::critical();
  const auto sol = solve_mobile_fixed_point(4000, w);
  CHECK(sol.residual < 1e-13);
  const double c = w.g3 * w.R * w.R / w.S;
  for (int n = 0; n <= 100; ++n) {
    CHECK(sol.a[n] == doctest::Approx(n == 0 ? 1.0 : 1.0 / ((n + 1.0) * (n + 1.0))).epsilon(1e-7));
    CHECK(sol.b[n] == doctest::Approx(c * 2 / ((n + 1.0) * (n + 2.0))).epsilon(1e-7));
  }
  const MobileMinLaw law(w, 256);
  CHECK(law.sample_half_depth(0.999) == -1);
  CHECK(law.sample_mobile_depth(0.999) == 0);
}

TEST_CASE("mobile JSON round trip") {
  const auto w = TriangularWeights::critical();
  Rng rng(19);
  const Mobile m = sample_half_mobile(rng, 0, w, 1000000);
  const Mobile back = mobile_from_json(to_json(m));
  CHECK(back.encode() == m.encode());
}

TEST_CASE("pruned trees have the law of explicit trees seen through the band") {
  const QuadMinLaw law(1 << 12);
  const int32_t lo = -3, hi = 0;
  const int N = 60000;
  for (int32_t root : {0, 2, -5}) {
    CAPTURE(root);
    // statistic: number of in-band vertices, bucketed 0..5 and 6+
    std::vector<double> full(7, 0), pruned(7, 0);
    Rng a(1000 + root), b(2000 + root);
    int used_a = 0, used_b = 0;
    for (int i = 0; i < N; ++i) {
      try {
        const auto t = sample_labeled_tree(a, root, 200000);
        int k = 0;
        for (int32_t l : t.labels) k += (l >= lo && l <= hi);
        ++full[std::min(k, 6)];
        ++used_a;
      } catch (const CapExceeded&) {
      }
      try {
        const auto p = sample_pruned_tree(b, root, lo, hi, law, 200000);
        ++pruned[std::min<int>(p.vertex_label.size(), 6)];
        ++used_b;
      } catch (const CapExceeded&) {
      }
    }
    for (int k = 0; k < 7; ++k) {
      const double pa = full[k] / used_a, pb = pruned[k] / used_b;
      const double s = std::sqrt(pa * (1 - pa) / used_a + pb * (1 - pb) / used_b);
      CHECK(std::abs(pa - pb) <= 4 * s + 1e-3);
    }
  }
}
