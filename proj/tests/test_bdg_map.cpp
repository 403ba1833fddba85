#include <doctest.h>

#include <set>
#include <sstream>

#include "uihp/bdg_map.hpp"
#include "uihp/errors.hpp"

using namespace uihp;

namespace {

Graft tree_graft(int64_t site, std::vector<int32_t> parents, std::vector<int32_t> labels) {
  Graft g;
  g.site = site;
  g.root_value = labels[0];
  g.body = WellLabeledTree{PlaneTree(std::move(parents)), std::move(labels)};
  return g;
}

// values 0,-1,0,-1,-2 on [0,4]; trees at the down-steps 0, 2, 3
TreedBridgeWindow hand_window() {
  std::vector<Graft> g;
  g.push_back(tree_graft(0, {-1, 0, 0}, {0, 1, -1}));
  g.push_back(tree_graft(2, {-1}, {0}));
  g.push_back(tree_graft(3, {-1, 0}, {-1, -2}));
  return TreedBridgeWindow::from_values(Model::quad, 0, {0, -1, 0, -1, -2}, std::move(g));
}

std::vector<TreedBridgeWindow> sample_windows(Model m, int count, int64_t half, uint64_t seed) {
  std::vector<TreedBridgeWindow> out;
  for (uint64_t r = 0; out.size() < std::size_t(count); ++r) {
    try {
      out.emplace_back(StreamId{seed, r}, m, -half, half, Budgets{100000, 300000});
    } catch (const CapExceeded&) {
    }
  }
  return out;
}

}  // namespace

TEST_CASE("single graft window") {
  std::vector<Graft> g;
  g.push_back(tree_graft(0, {-1}, {0}));
  auto w = TreedBridgeWindow::from_values(Model::quad, 0, {0, -1}, std::move(g));
  const auto cs = build_corner_sequence(w);
  CHECK(cs.corners.size() == 1);
  CHECK(cs.anchor == 0);
  CHECK(cs.phi_vertex(0) == 0);
}

TEST_CASE("hand-built window: contour, successors, phi, root edge") {
  auto w = hand_window();
  const auto cs = build_corner_sequence(w);
  std::vector<int32_t> labels;
  for (const auto& c : cs.corners) labels.push_back(c.label);
  CHECK(labels == std::vector<int32_t>{0, 1, 0, -1, 0, 0, -1, -2, -1});
  CHECK(cs.succ == std::vector<int64_t>{3, 2, 3, 7, 6, 6, 7, none, none});
  CHECK(cs.anchor == 0);
  CHECK(cs.phi_corner == std::vector<int64_t>{0, 6, 5, 6, none});
  CHECK(cs.phi_phantom == std::vector<bool>{false, true, false, false, true});
  const auto g = build_map(w);
  REQUIRE(g.root_dart != none);
  CHECK(g.tail(g.root_dart) == cs.phi_vertex(0));
  CHECK(g.head(g.root_dart) == cs.phi_vertex(1));
  CHECK_THROWS_AS(cs.successor(7), Unresolved);
  // window without a label-0 corner on the right
  std::vector<Graft> none_g;
  none_g.push_back(tree_graft(-1, {-1}, {1}));
  auto bad = TreedBridgeWindow::from_values(Model::quad, -1, {1, 0}, std::move(none_g));
  CHECK_THROWS_AS(build_corner_sequence(bad), NoAnchor);
}

TEST_CASE("corner counts and successors on sampled windows") {
  for (Model m : {Model::quad, Model::tri}) {
    for (auto& w : sample_windows(m, 15, 25, 7)) {
      CornerSequence cs;
      try {
        cs = build_corner_sequence(w);
      } catch (const NoAnchor&) {
        continue;
      }
      if (m == Model::quad) {
        std::size_t expect = 0;
        for (int64_t i = w.lo(); i < w.hi(); ++i)
          if (w.has_graft(i))
            expect += 2 * std::get<WellLabeledTree>(w.graft(i).body).tree.edge_count() + 1;
        CHECK(cs.corners.size() == expect);
      }
      // linear scan oracle
      const std::size_t n = cs.corners.size();
      for (std::size_t c = 0; c < n; c += 1 + n / 2000) {
        const int32_t want = cs.corners[c].flag ? cs.corners[c].label : cs.corners[c].label - 1;
        int64_t found = none;
        for (std::size_t k = c + 1; k < n; ++k)
          if (!cs.corners[k].flag && cs.corners[k].label == want) {
            found = int64_t(k);
            break;
          }
        CHECK(cs.succ[c] == found);
      }
    }
  }
}

TEST_CASE("map invariants on sampled windows") {
  for (Model m : {Model::quad, Model::tri}) {
    CAPTURE(model_name(m));
    std::size_t faces = 0, rooted = 0;
    for (auto& w : sample_windows(m, 20, 30, 11)) {
      MapGraph g;
      try {
        g = build_map(w);
      } catch (const NoAnchor&) {
        continue;
      }
      const auto& cs = g.cs;
      // Lipschitz labels along arcs; flag edges join equal labels
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (!g.resolved(e)) continue;
        const int d = cs.vertex_label[g.edges[e].u] - cs.vertex_label[g.edges[e].v];
        if (g.edges[e].flag >= 0) CHECK(d == 0);
        else CHECK(d == 1);
      }
      // every vertex with a resolved corner has an outgoing arc
      for (uint32_t v = 0; v < cs.vertex_count(); ++v) CHECK(cs.corner_count(v) >= 1);
      // face census
      const auto fc = face_census(g);
      const std::size_t want = m == Model::quad ? 4 : 3;
      CHECK(fc.count(want) == fc.closed);
      faces += fc.closed;
      // labels bound distances from the root
      const uint32_t root = cs.root_vertex();
      const auto dist = bfs_distances(g, root);
      for (uint32_t v = 0; v < cs.vertex_count(); ++v)
        if (dist[v] >= 0) CHECK(std::abs(cs.vertex_label[v] - cs.vertex_label[root]) <= dist[v]);
      // root edge and boundary darts
      if (g.root_dart != none) {
        ++rooted;
        CHECK(g.tail(g.root_dart) == g.phi(0));
        CHECK(g.head(g.root_dart) == g.phi(1));
      }
      std::set<int64_t> darts;
      std::size_t mapped = 0;
      for (int64_t i = cs.lo; i < cs.hi; ++i) {
        const int64_t d = g.boundary_dart[i - cs.lo];
        if (w.has_graft(i) && w.step(i) == -1) CHECK(g.phi(i) == cs.corners[cs.graft_range[i - cs.lo][0]].owner);
        if (d == none) continue;
        ++mapped;
        darts.insert(d);
        CHECK(int64_t(g.tail(d)) == g.phi(i));
        CHECK(int64_t(g.head(d)) == g.phi(i + 1));
      }
      CHECK(darts.size() == mapped);
    }
    CHECK(faces > 100);
    CHECK(rooted >= 10);
  }
}

TEST_CASE("resolution policy extends the window") {
  MapOptions opt;
  opt.resolve_core = true;
  opt.core_lo = -5;
  opt.core_hi = 5;
  int built = 0;
  for (uint64_t r = 0; r < 10; ++r) {
    TreedBridgeWindow w({3, r}, Model::quad, -10, 10, {100000, 300000});
    MapGraph g;
    try {
      g = build_map(w, opt);
    } catch (const Unresolved&) {
      continue;  // a node cap hit on the way out
    }
    ++built;
    for (std::size_t c = 0; c < g.cs.corners.size(); ++c)
      if (g.cs.corners[c].site >= -5 && g.cs.corners[c].site <= 5) CHECK(g.cs.succ[c] != none);
  }
  CHECK(built >= 7);
  TreedBridgeWindow tight({3, 0}, Model::quad, -300, 300, {300, 300000});
  opt.core_lo = -300;
  opt.core_hi = 300;
  CHECK_THROWS_AS(build_map(tight, opt), Unresolved);
}

TEST_CASE("exports") {
  auto w = hand_window();
  const auto g = build_map(w);
  const auto j = to_json(g);
  CHECK(j["n"] == g.vertex_count());
  CHECK(j["root"].size() == 2);
  CHECK(j["phi"].contains("0"));
  CHECK(j["phi"]["4"].is_null());
  std::ostringstream os;
  write_dot(os, g);
  CHECK(os.str().find("root=true") != std::string::npos);
}
