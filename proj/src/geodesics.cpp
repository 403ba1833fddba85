#include "uihp/geodesics.hpp"

#include <algorithm>
#include <set>

#include "uihp/errors.hpp"

namespace uihp {

const char* ray_kind_name(RayKind k) {
  switch (k) {
    case RayKind::maximal: return "maximal";
    case RayKind::minimal: return "minimal";
    default: return "random_proper";
  }
}

bool GeodesicRay::proper() const {
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] != labels[i - 1] - 1) return false;
  return true;
}

namespace {

template <class Pick>
GeodesicRay trace(const CornerSequence& cs, uint32_t v, std::size_t n, RayKind kind, Pick pick) {
  GeodesicRay r;
  r.kind = kind;
  r.start = v;
  uint32_t cur = v;
  for (std::size_t i = 0;; ++i) {
    const std::size_t c = pick(cur);
    r.vertices.push_back(cur);
    r.corners.push_back(c);
    r.labels.push_back(cs.vertex_label[cur]);
    if (i == n) break;
    cur = cs.corners[cs.successor(c)].owner;
  }
  return r;
}

}  // namespace

GeodesicRay maximal_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps) {
  // iterated successors of the leftmost corner; the corner chain is c, succ(c), ...
  GeodesicRay r;
  r.kind = RayKind::maximal;
  r.start = v;
  std::size_t c = cs.leftmost_corner(v);
  for (std::size_t i = 0;; ++i) {
    const uint32_t u = cs.corners[c].owner;
    r.vertices.push_back(u);
    r.corners.push_back(c);
    r.labels.push_back(cs.vertex_label[u]);
    if (i == n_steps) break;
    c = cs.successor(c);
  }
  return r;
}

GeodesicRay minimal_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps) {
  return trace(cs, v, n_steps, RayKind::minimal,
               [&](uint32_t u) { return cs.rightmost_corner(u); });
}

GeodesicRay random_proper_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps,
                                   Rng& rng) {
  return trace(cs, v, n_steps, RayKind::random_proper,
               [&](uint32_t u) { return cs.corner_of(u, rng.below(cs.corner_count(u))); });
}

nlohmann::json to_json(const GeodesicRay& r) {
  return {{"kind", ray_kind_name(r.kind)},
          {"start", r.start},
          {"vertices", r.vertices},
          {"corners", r.corners},
          {"labels", r.labels}};
}

std::vector<int> IntersectionRecord::gaps(const std::vector<int>& set) {
  std::vector<int> g;
  for (std::size_t k = 1; k < set.size(); ++k) g.push_back(set[k] - set[k - 1]);
  return g;
}

namespace {
std::vector<int> regenerative_set(const std::vector<int>& delta, int horizon) {
  std::vector<bool> covered(horizon + 1, false);
  for (int j = 0; j < horizon && j < static_cast<int>(delta.size()); ++j)
    for (int i = j + 1; i <= std::min(horizon, j + delta[j]); ++i) covered[i] = true;
  std::vector<int> out;
  for (int i = 0; i <= horizon; ++i)
    if (!covered[i]) out.push_back(i);
  return out;
}
}  // namespace

IntersectionRecord intersections_from_deltas(const std::vector<int>& delta,
                                             const std::vector<int>& delta_prime, int horizon) {
  IntersectionRecord rec;
  rec.horizon = horizon;
  rec.r_plus = regenerative_set(delta, horizon);
  rec.r_minus = regenerative_set(delta_prime, horizon);
  return rec;
}

void prepare_horizon(TreedBridgeWindow& w, int horizon) {
  w.hitting_time(horizon + 1, Side::right);
  w.hitting_time(horizon, Side::left);
}

IntersectionRecord intersections_by_labels(TreedBridgeWindow& w, int horizon) {
  std::vector<int> d(horizon), dp(horizon);
  for (int j = 0; j < horizon; ++j) {
    d[j] = w.delta(j);
    dp[j] = w.delta_prime(j);
  }
  return intersections_from_deltas(d, dp, horizon);
}

BoundarySets boundary_hits(const CornerSequence& cs, const GeodesicRay& ray) {
  std::vector<uint8_t> mark(cs.vertex_count(), 0);
  for (int64_t i = cs.lo; i <= cs.hi; ++i) {
    const int64_t v = cs.phi_vertex(i);
    if (v == none) continue;
    if (i >= 0) mark[v] |= 2;
    if (i <= 0) mark[v] |= 1;
  }
  BoundarySets out;
  for (std::size_t k = 0; k < ray.vertices.size(); ++k) {
    if (mark[ray.vertices[k]] & 2) out.right.push_back(static_cast<int>(k));
    if (mark[ray.vertices[k]] & 1) out.left.push_back(static_cast<int>(k));
  }
  return out;
}

IntersectionRecord intersections_by_tracing(const CornerSequence& cs, int horizon,
                                            bool with_minimal) {
  IntersectionRecord rec;
  rec.horizon = horizon;
  const uint32_t root = cs.root_vertex();
  const auto hmax = boundary_hits(cs, maximal_geodesic(cs, root, horizon));
  rec.r_plus = hmax.right;
  rec.r_minus = hmax.left;
  if (with_minimal) {
    const auto hmin = boundary_hits(cs, minimal_geodesic(cs, root, horizon));
    rec.has_min = true;
    rec.r_plus_min = hmin.right;
    rec.r_minus_min = hmin.left;
  }
  return rec;
}

SandwichReport sandwich_check(const CornerSequence& cs, const GeodesicRay& ray,
                              const IntersectionRecord& rec) {
  SandwichReport rep;
  const int n = std::min<int>(rec.horizon, static_cast<int>(ray.length()));
  const auto hits = boundary_hits(cs, ray);
  std::set<int> hit(hits.right.begin(), hits.right.end());
  hit.insert(hits.left.begin(), hits.left.end());
  auto within = [n](const std::vector<int>& s) {
    std::set<int> out;
    for (int x : s)
      if (x <= n) out.insert(x);
    return out;
  };
  const auto rp = within(rec.r_plus), rm = within(rec.r_minus);
  const auto rpm = within(rec.r_plus_min), rmm = within(rec.r_minus_min);
  auto flag = [&](const std::string& what, int k) {
    ++rep.violations;
    if (rep.messages.size() < 20) rep.messages.push_back(what + " at " + std::to_string(k));
  };
  for (int k : rp)
    if (!hit.count(k)) flag("R+ time missed by ray", k);
  for (int k : rmm)
    if (!hit.count(k)) flag("R-min time missed by ray", k);
  for (int k : hit)
    if (k <= n && !rpm.count(k) && !rm.count(k)) flag("ray hit outside R+min u R-", k);
  for (int k : rp)
    if (!rpm.count(k)) flag("R+ not inside R+min", k);
  for (int k : rmm)
    if (!rm.count(k)) flag("R-min not inside R-", k);
  return rep;
}

}  // namespace uihp
