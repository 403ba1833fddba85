#include <doctest.h>

#include <algorithm>

#include "uihp/errors.hpp"
#include "uihp/geodesics.hpp"

using namespace uihp;

namespace {

Graft tree_graft(int64_t site, std::vector<int32_t> parents, std::vector<int32_t> labels) {
  Graft g;
  g.site = site;
  g.root_value = labels[0];
  g.body = WellLabeledTree{PlaneTree(std::move(parents)), std::move(labels)};
  return g;
}

TreedBridgeWindow hand_window() {
  std::vector<Graft> g;
  g.push_back(tree_graft(0, {-1, 0, 0}, {0, 1, -1}));
  g.push_back(tree_graft(2, {-1}, {0}));
  g.push_back(tree_graft(3, {-1, 0}, {-1, -2}));
  return TreedBridgeWindow::from_values(Model::quad, 0, {0, -1, 0, -1, -2}, std::move(g));
}

// first later real corner with label - 1, by direct scan
std::vector<uint32_t> scan_path(const CornerSequence& cs, std::size_t c, std::size_t n) {
  std::vector<uint32_t> out{cs.corners[c].owner};
  for (std::size_t i = 0; i < n; ++i) {
    const int32_t want = cs.corners[c].label - 1;
    std::size_t k = c + 1;
    while (cs.corners[k].flag || cs.corners[k].label != want) ++k;
    c = k;
    out.push_back(cs.corners[c].owner);
  }
  return out;
}

// rightmost corner of each visited vertex, by direct scan
std::vector<uint32_t> scan_min_path(const CornerSequence& cs, uint32_t v, std::size_t n) {
  std::vector<uint32_t> out{v};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = cs.corners.size() - 1;
    while (cs.corners[c].flag || cs.corners[c].owner != v) --c;
    const int32_t want = cs.corners[c].label - 1;
    std::size_t k = c + 1;
    while (cs.corners[k].flag || cs.corners[k].label != want) ++k;
    v = cs.corners[k].owner;
    out.push_back(v);
  }
  return out;
}

struct Sampled {
  TreedBridgeWindow w;
  CornerSequence cs;
};

// windows prepared to the given horizon; truncated ones are skipped
std::vector<Sampled> sample(Model m, int count, int horizon, uint64_t seed) {
  std::vector<Sampled> out;
  for (uint64_t r = 0; out.size() < std::size_t(count) && r < uint64_t(20 * count); ++r) {
    try {
      TreedBridgeWindow w({seed, r}, m, 0, 0, {200000, 400000});
      prepare_horizon(w, horizon);
      auto cs = build_corner_sequence(w);
      out.push_back({std::move(w), std::move(cs)});
    } catch (const CapExceeded&) {
    }
  }
  return out;
}

}  // namespace

TEST_CASE("hand window rays") {
  auto w = hand_window();
  const auto cs = build_corner_sequence(w);
  const uint32_t root = cs.root_vertex();
  const auto g = maximal_geodesic(cs, root, 2);
  CHECK(g.labels == std::vector<int32_t>{0, -1, -2});
  CHECK(g.vertices == scan_path(cs, cs.leftmost_corner(root), 2));
  CHECK(g.proper());
  const auto m = minimal_geodesic(cs, root, 1);
  CHECK(m.corners[0] == 4);
  CHECK(m.vertices == scan_min_path(cs, root, 1));
  CHECK(m.vertices[1] == cs.corners[6].owner);
  CHECK(g.vertices[1] != m.vertices[1]);
  CHECK_THROWS_AS(maximal_geodesic(cs, root, 3), Unresolved);

  const auto rec = intersections_by_tracing(cs, 2, false);
  CHECK(rec.r_plus == std::vector<int>{0});
  CHECK(intersections_from_deltas({w.delta(0), w.delta(1)}, {0, 0}, 2).r_plus == std::vector<int>{0});
  CHECK(w.delta(0) == 1);
  CHECK(w.delta(1) == 1);
}

TEST_CASE("single-corner vertices: all three kinds agree") {
  std::vector<Graft> g;
  for (int i = 0; i < 4; ++i) g.push_back(tree_graft(i, {-1}, {-i}));
  auto w = TreedBridgeWindow::from_values(Model::quad, 0, {0, -1, -2, -3, -4}, std::move(g));
  const auto cs = build_corner_sequence(w);
  Rng rng(123);
  const auto a = maximal_geodesic(cs, cs.root_vertex(), 3);
  const auto b = minimal_geodesic(cs, cs.root_vertex(), 3);
  const auto c = random_proper_geodesic(cs, cs.root_vertex(), 3, rng);
  CHECK(a.vertices == b.vertices);
  CHECK(a.vertices == c.vertices);
  const auto rec = intersections_by_tracing(cs, 3);
  CHECK(rec.r_plus == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("first step up puts 1 in R+") {
  // b = 0, 1, 0, -1, -2 with single-node trees on the down-steps
  std::vector<Graft> g;
  g.push_back(tree_graft(1, {-1}, {1}));
  g.push_back(tree_graft(2, {-1}, {0}));
  g.push_back(tree_graft(3, {-1}, {-1}));
  auto w = TreedBridgeWindow::from_values(Model::quad, 0, {0, 1, 0, -1, -2}, std::move(g));
  CHECK_FALSE(w.has_graft(0));
  CHECK(w.delta(0) == 0);
  const auto cs = build_corner_sequence(w);
  const auto rec = intersections_by_tracing(cs, 1, false);
  CHECK(rec.r_plus == std::vector<int>{0, 1});
}

TEST_CASE("tracing agrees with the label representation") {
  const int horizon = 8;
  for (Model m : {Model::quad, Model::tri}) {
    CAPTURE(model_name(m));
    auto windows = sample(m, 100, horizon, m == Model::quad ? 31 : 32);
    CHECK(windows.size() >= 90);
    for (auto& s : windows) {
      const auto a = intersections_by_tracing(s.cs, horizon);
      const auto b = intersections_by_labels(s.w, horizon);
      CHECK(a.r_plus == b.r_plus);
      CHECK(a.r_minus == b.r_minus);
      REQUIRE(!a.r_plus.empty());
      CHECK(a.r_plus[0] == 0);
      CHECK(a.r_minus[0] == 0);
      CHECK(std::includes(a.r_plus_min.begin(), a.r_plus_min.end(), a.r_plus.begin(), a.r_plus.end()));
      CHECK(std::includes(a.r_minus.begin(), a.r_minus.end(), a.r_minus_min.begin(), a.r_minus_min.end()));
      for (int gap : IntersectionRecord::gaps(a.r_plus)) CHECK(gap > 0);
    }
  }
}

TEST_CASE("rays on sampled windows: properness, geodesy, coalescence, sandwich") {
  const int horizon = 12;
  for (Model m : {Model::quad, Model::tri}) {
    CAPTURE(model_name(m));
    std::size_t violations = 0, rays = 0, merged = 0;
    for (auto& s : sample(m, 40, horizon, 77)) {
      MapGraph g = build_map(s.w);
      const auto& cs = g.cs;
      const uint32_t root = cs.root_vertex();
      const auto rec = intersections_by_tracing(cs, horizon);
      const auto gmax = maximal_geodesic(cs, root, horizon);
      const auto gmin = minimal_geodesic(cs, root, horizon);
      CHECK(gmax.vertices == scan_path(cs, cs.leftmost_corner(root), horizon));
      CHECK(gmin.vertices == scan_min_path(cs, root, horizon));
      CHECK(gmax.vertices[1] == cs.corners[cs.successor(cs.leftmost_corner(root))].owner);
      const auto dist = bfs_distances(g, root);
      Rng rng(derive_key(5, rays, 0, 0));
      for (int k = 0; k < 5; ++k) {
        const auto r = random_proper_geodesic(cs, root, horizon, rng);
        ++rays;
        CHECK(r.proper());
        for (std::size_t i = 0; i <= r.length(); ++i) {
          CHECK(r.labels[i] == -int32_t(i));
          CHECK(dist[r.vertices[i]] == int32_t(i));
        }
        const auto rep = sandwich_check(cs, r, rec);
        violations += rep.violations;
      }
      CHECK(sandwich_check(cs, gmax, rec).ok());
      CHECK(sandwich_check(cs, gmin, rec).ok());
      // start from another vertex of label 1 and from a vertex of label 2
      for (uint32_t v = 0; v < cs.vertex_count(); ++v) {
        if (v == root || cs.vertex_label[v] < 1 || cs.vertex_label[v] > 2) continue;
        if (cs.vertex_site[v] < 0 || cs.vertex_site[v] > s.w.hitting_time(2, Side::right)) continue;
        GeodesicRay o;
        try {
          o = maximal_geodesic(cs, v, horizon);
        } catch (const Unresolved&) {
          continue;
        }
        const int shift = cs.vertex_label[v];
        // after the first common corner the two chains agree
        for (std::size_t i = 0; i + shift < o.corners.size() && i < gmax.corners.size(); ++i) {
          if (o.corners[i + shift] != gmax.corners[i]) continue;
          ++merged;
          for (std::size_t k = i; k + shift < o.corners.size() && k < gmax.corners.size(); ++k)
            CHECK(o.vertices[k + shift] == gmax.vertices[k]);
          break;
        }
        break;
      }
    }
    CHECK(violations == 0);
    CHECK(merged > 0);
  }
}

namespace {

// a full tree seen through the label band, as the pruned sampler would produce it
PrunedContour restrict_to_band(const WellLabeledTree& t, int32_t lo, int32_t hi) {
  PrunedContour p;
  std::vector<int32_t> id(t.tree.size(), -1);
  for (uint32_t v : contour_corners(t.tree)) {
    const int32_t y = t.labels[v];
    if (y < lo || y > hi) continue;
    if (id[v] < 0) {
      id[v] = static_cast<int32_t>(p.vertex_label.size());
      p.vertex_label.push_back(y);
    }
    p.corner_vertex.push_back(static_cast<uint32_t>(id[v]));
    p.corner_label.push_back(y);
  }
  p.root_in_band = t.labels[0] >= lo && t.labels[0] <= hi;
  return p;
}

struct RayView {
  std::vector<int32_t> labels;
  std::vector<int64_t> sites;
  std::vector<int> right, left;
};

RayView view(const CornerSequence& cs, const GeodesicRay& r) {
  RayView v{r.labels, {}, {}, {}};
  for (uint32_t x : r.vertices) v.sites.push_back(cs.vertex_site[x]);
  const auto h = boundary_hits(cs, r);
  v.right = h.right;
  v.left = h.left;
  return v;
}

}  // namespace

TEST_CASE("band-restricted windows trace like full windows") {
  const int n = 8;
  int compared = 0;
  for (const auto& s : sample(Model::quad, 40, n, 91)) {
    const auto& w = s.w;
    std::vector<int32_t> values;
    for (int64_t i = w.lo(); i <= w.hi(); ++i) values.push_back(w.value(i));
    std::vector<Graft> grafts;
    for (int64_t i = w.lo(); i < w.hi(); ++i) {
      if (!w.has_graft(i)) continue;
      Graft g;
      g.site = i;
      g.root_value = w.graft(i).root_value;
      g.body = restrict_to_band(std::get<WellLabeledTree>(w.graft(i).body), -(n + 1), 0);
      grafts.push_back(std::move(g));
    }
    const auto pw = TreedBridgeWindow::from_values(Model::quad, w.lo(), values, std::move(grafts));
    const auto pcs = build_corner_sequence(pw);
    const auto a = intersections_by_tracing(s.cs, n, true);
    const auto b = intersections_by_tracing(pcs, n, true);
    CHECK(a.r_plus == b.r_plus);
    CHECK(a.r_minus == b.r_minus);
    CHECK(a.r_plus_min == b.r_plus_min);
    CHECK(a.r_minus_min == b.r_minus_min);
    const auto fa = view(s.cs, maximal_geodesic(s.cs, s.cs.root_vertex(), n));
    const auto fb = view(pcs, maximal_geodesic(pcs, pcs.root_vertex(), n));
    CHECK(fa.labels == fb.labels);
    CHECK(fa.sites == fb.sites);
    CHECK(fa.right == fb.right);
    CHECK(fa.left == fb.left);
    const auto ma = view(s.cs, minimal_geodesic(s.cs, s.cs.root_vertex(), n));
    const auto mb = view(pcs, minimal_geodesic(pcs, pcs.root_vertex(), n));
    CHECK(ma.sites == mb.sites);
    CHECK(ma.right == mb.right);
    // the pruned map is a subgraph containing the rays, so ray distances survive
    const auto g = build_map(pw);
    const auto ray = minimal_geodesic(g.cs, g.cs.root_vertex(), n);
    const auto dist = bfs_distances(g, ray.vertices[0]);
    for (std::size_t k = 0; k < ray.vertices.size(); ++k) CHECK(dist[ray.vertices[k]] == int(k));
    ++compared;
  }
  CHECK(compared >= 30);
}
