#include <cmath>

#include "uihp/errors.hpp"
#include "uihp/labeled_trees.hpp"

namespace uihp {

namespace {

struct Frame {
  int32_t label;
  int32_t local;  // local vertex id, -1 when outside the band
  uint32_t remaining;
  bool need;      // some remaining child must still enter the band
  double p;       // probability that a child subtree enters the band
};

}  // namespace

PrunedContour sample_pruned_tree(Rng& rng, int32_t root_label, int32_t band_lo, int32_t band_hi,
                                 const QuadMinLaw& law, std::size_t node_cap) {
  PrunedContour out;
  auto dist = [&](int32_t y) { return y > band_hi ? y - band_hi : (y < band_lo ? band_lo - y : 0); };
  std::size_t nodes = 0;
  std::vector<Frame> stack;

  auto open_in_band = [&](int32_t y) {
    const auto id = static_cast<int32_t>(out.vertex_label.size());
    out.vertex_label.push_back(y);
    out.corner_vertex.push_back(static_cast<uint32_t>(id));
    out.corner_label.push_back(y);
    stack.push_back({y, id, rng.geometric_half(), false, 0.0});
  };
  // node outside the band whose subtree is known to enter it
  auto open_constrained = [&](int32_t y) {
    const int d = dist(y);
    const double p = (law.tail(d - 1) + law.tail(d) + law.tail(d + 1)) / 3.0;
    // P(K = k | hit) proportional to 2^{-(k+1)} (1 - (1-p)^k), total p / (1 + p)
    const double target = rng.uniform01() * (p / (1 + p));
    double c = 0, half = 0.5, s = 0;  // s = 1 - (1-p)^k, updated without cancellation
    uint32_t k = 0;
    while (k < 4096) {
      ++k;
      half *= 0.5;
      s += p * (1 - s);
      c += half * s;
      if (target < c) break;
    }
    stack.push_back({y, -1, k, true, p});
  };
  auto count_node = [&] {
    if (++nodes > node_cap) throw CapExceeded(CapExceeded::Kind::nodes, node_cap);
  };

  count_node();
  if (dist(root_label) == 0) {
    out.root_in_band = true;
    open_in_band(root_label);
  } else if (law.reaches(rng.uniform01(), dist(root_label))) {
    open_constrained(root_label);
  } else {
    return out;
  }

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.remaining == 0) {
      stack.pop_back();
      if (!stack.empty() && stack.back().local >= 0) {
        out.corner_vertex.push_back(static_cast<uint32_t>(stack.back().local));
        out.corner_label.push_back(stack.back().label);
      }
      continue;
    }
    if (f.local >= 0) {
      --f.remaining;
      const int32_t y = f.label + rng.ternary();
      const int d = dist(y);
      if (d == 0) {
        count_node();
        open_in_band(y);
        continue;
      }
      if (law.reaches(rng.uniform01(), d)) {
        count_node();
        open_constrained(y);
        continue;
      }
      // skipped subtree: the parent's next corner follows directly
      out.corner_vertex.push_back(static_cast<uint32_t>(f.local));
      out.corner_label.push_back(f.label);
      continue;
    }
    // outside the band, conditioned to enter it
    const uint32_t r = f.remaining--;
    const double p = f.p;
    const double hit_p = f.need ? p / -std::expm1(r * std::log1p(-p)) : p;
    const bool hit = rng.uniform01() < hit_p;
    const int d = dist(f.label);
    const int32_t dir = f.label > band_hi ? 1 : -1;  // label change per unit of distance
    double w[3];
    for (int e = -1; e <= 1; ++e) {
      const double t = law.tail(d + e);
      w[e + 1] = hit ? t : 1.0 - t;
    }
    double u = rng.uniform01() * (w[0] + w[1] + w[2]);
    int e = -1;
    while (e < 1 && u >= w[e + 1]) {
      u -= w[e + 1];
      ++e;
    }
    if (!hit) continue;
    f.need = false;
    const int32_t y = f.label + dir * e;
    count_node();
    if (d + e == 0) open_in_band(y);
    else open_constrained(y);
  }
  return out;
}

}  // namespace uihp
