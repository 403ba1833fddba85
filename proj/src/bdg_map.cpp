#include "uihp/bdg_map.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "uihp/errors.hpp"

namespace uihp {

std::size_t CornerSequence::successor(std::size_t i) const {
  if (succ[i] == none) throw Unresolved({i});
  return static_cast<std::size_t>(succ[i]);
}

int64_t CornerSequence::phi_vertex(int64_t i) const {
  if (i < lo || i > hi) return none;
  const int64_t c = phi_corner[i - lo];
  return c == none ? none : corners[c].owner;
}

std::vector<std::size_t> CornerSequence::unresolved_corners() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < succ.size(); ++c)
    if (succ[c] == none) out.push_back(c);
  return out;
}

CornerSequence build_corner_sequence(const TreedBridgeWindow& w) {
  CornerSequence cs;
  cs.model = w.model();
  cs.lo = w.lo();
  cs.hi = w.hi();
  cs.graft_range.assign(cs.hi - cs.lo, {none, none});
  cs.graft_rooted.assign(cs.hi - cs.lo, false);
  std::vector<uint32_t> local_map;
  auto add_vertex = [&](int32_t label, int64_t site) {
    cs.vertex_label.push_back(label);
    cs.vertex_site.push_back(site);
    return static_cast<uint32_t>(cs.vertex_label.size() - 1);
  };
  for (int64_t i = cs.lo; i < cs.hi; ++i) {
    if (!w.has_graft(i)) continue;
    const Graft& g = w.graft(i);
    const auto begin = static_cast<int64_t>(cs.corners.size());
    if (auto t = std::get_if<WellLabeledTree>(&g.body)) {
      local_map.assign(t->tree.size(), invalid_vertex);
      for (uint32_t v : contour_corners(t->tree)) {
        if (local_map[v] == invalid_vertex) local_map[v] = add_vertex(t->labels[v], i);
        cs.corners.push_back({local_map[v], t->labels[v], i, v, false});
      }
    } else if (auto m = std::get_if<Mobile>(&g.body)) {
      local_map.assign(m->size(), invalid_vertex);
      for (uint32_t v : mobile_contour(*m)) {
        const bool flag = m->kind(v) == NodeKind::flagged;
        if (local_map[v] == invalid_vertex) {
          if (flag) {
            local_map[v] = static_cast<uint32_t>(cs.flag_corners.size());
            cs.flag_corners.push_back({static_cast<uint32_t>(cs.corners.size()), 0});
          } else {
            local_map[v] = add_vertex(m->value(v), i);
          }
        } else if (flag) {
          cs.flag_corners[local_map[v]][1] = static_cast<uint32_t>(cs.corners.size());
        }
        cs.corners.push_back({local_map[v], m->value(v), i, v, flag});
      }
    } else {
      const auto& p = std::get<PrunedContour>(g.body);
      local_map.assign(p.vertex_label.size(), invalid_vertex);
      for (std::size_t k = 0; k < p.corner_vertex.size(); ++k) {
        const uint32_t v = p.corner_vertex[k];
        if (local_map[v] == invalid_vertex) local_map[v] = add_vertex(p.vertex_label[v], i);
        cs.corners.push_back({local_map[v], p.corner_label[k], i, v, false});
      }
    }
    cs.graft_range[i - cs.lo] = {begin, static_cast<int64_t>(cs.corners.size())};
    const auto* pc = std::get_if<PrunedContour>(&g.body);
    cs.graft_rooted[i - cs.lo] = pc ? pc->root_in_band : true;
  }

  const std::size_t n = cs.corners.size();
  const std::size_t nv = cs.vertex_label.size();
  cs.vertex_corner_begin.assign(nv + 1, 0);
  for (const auto& c : cs.corners)
    if (!c.flag) ++cs.vertex_corner_begin[c.owner + 1];
  for (std::size_t v = 0; v < nv; ++v) cs.vertex_corner_begin[v + 1] += cs.vertex_corner_begin[v];
  cs.vertex_corners.resize(cs.vertex_corner_begin[nv]);
  {
    std::vector<uint32_t> fill(cs.vertex_corner_begin.begin(), cs.vertex_corner_begin.end() - 1);
    for (std::size_t c = 0; c < n; ++c)
      if (!cs.corners[c].flag) cs.vertex_corners[fill[cs.corners[c].owner]++] = static_cast<uint32_t>(c);
  }

  bool found = false;
  for (std::size_t c = 0; c < n; ++c) {
    const auto& r = cs.corners[c];
    if (!r.flag && r.site >= 0 && r.label == 0) {
      cs.anchor = c;
      found = true;
      break;
    }
  }

  // labels present, including bridge values (for phi)
  int32_t lmin = 0, lmax = 0;
  for (const auto& c : cs.corners) {
    lmin = std::min(lmin, c.label);
    lmax = std::max(lmax, c.label);
  }
  std::vector<int64_t> next_real(static_cast<std::size_t>(lmax - lmin) + 3, none);
  auto slot = [&](int32_t label) -> int64_t* {
    if (label < lmin - 1 || label > lmax) return nullptr;
    return &next_real[static_cast<std::size_t>(label - lmin + 1)];
  };
  cs.succ.assign(n, none);
  cs.phi_corner.assign(cs.hi - cs.lo + 1, none);
  cs.phi_phantom.assign(cs.hi - cs.lo + 1, true);
  for (int64_t i = cs.hi; i >= cs.lo; --i) {
    if (i < cs.hi) {
      const auto [b, e] = cs.graft_range[i - cs.lo];
      for (int64_t c = e - 1; c >= b; --c) {
        const auto& r = cs.corners[c];
        if (r.flag) {
          cs.succ[c] = *slot(r.label);
        } else {
          cs.succ[c] = *slot(r.label - 1);
          *slot(r.label) = c;
        }
      }
      cs.phi_phantom[i - cs.lo] = w.step(i) != -1;
    }
    if (auto p = slot(w.value(i))) cs.phi_corner[i - cs.lo] = *p;
  }

  cs.left_bounded.assign(n, false);
  int32_t run_min = std::numeric_limits<int32_t>::max();
  for (std::size_t c = 0; c < n; ++c) {
    const auto& r = cs.corners[c];
    if (r.flag) continue;
    cs.left_bounded[c] = run_min <= r.label;
    run_min = std::min(run_min, r.label);
  }
  if (!found) throw NoAnchor();
  return cs;
}

namespace {

MapGraph assemble(CornerSequence cs) {
  MapGraph g;
  const std::size_t n = cs.corners.size();
  const std::size_t nv = cs.vertex_count();
  std::vector<int64_t> out_edge(n, none);
  for (std::size_t c = 0; c < n; ++c) {
    if (cs.corners[c].flag) continue;
    const int64_t t = cs.succ[c];
    out_edge[c] = static_cast<int64_t>(g.edges.size());
    g.edges.push_back({cs.corners[c].owner, t == none ? invalid_vertex : cs.corners[t].owner,
                       static_cast<int64_t>(c), t, -1});
  }
  std::vector<int64_t> flag_edge(cs.flag_corners.size());
  for (std::size_t f = 0; f < cs.flag_corners.size(); ++f) {
    const int64_t tl = cs.succ[cs.flag_corners[f][0]], tr = cs.succ[cs.flag_corners[f][1]];
    flag_edge[f] = static_cast<int64_t>(g.edges.size());
    g.edges.push_back({tl == none ? invalid_vertex : cs.corners[tl].owner,
                       tr == none ? invalid_vertex : cs.corners[tr].owner, tl, tr,
                       static_cast<int32_t>(f)});
  }

  // arcs arriving at each corner, as (source position, dart)
  std::vector<uint32_t> in_begin(n + 1, 0);
  struct Arrival {
    int64_t target, source, dart;
  };
  std::vector<Arrival> arrivals;
  for (std::size_t c = 0; c < n; ++c) {
    if (cs.corners[c].flag || cs.succ[c] == none) continue;
    arrivals.push_back({cs.succ[c], static_cast<int64_t>(c), 2 * out_edge[c] + 1});
  }
  for (std::size_t f = 0; f < cs.flag_corners.size(); ++f) {
    const auto [fl, fr] = cs.flag_corners[f];
    if (cs.succ[fl] != none) arrivals.push_back({cs.succ[fl], fl, 2 * flag_edge[f]});
    if (cs.succ[fr] != none) arrivals.push_back({cs.succ[fr], fr, 2 * flag_edge[f] + 1});
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.target != b.target ? a.target < b.target : a.source > b.source;
  });
  for (const auto& a : arrivals) ++in_begin[a.target + 1];
  for (std::size_t c = 0; c < n; ++c) in_begin[c + 1] += in_begin[c];

  g.rot_begin.assign(nv + 1, 0);
  g.dart_slot.assign(2 * g.edges.size(), none);
  g.complete.assign(nv, true);
  for (uint32_t v = 0; v < nv; ++v) {
    g.rot_begin[v] = static_cast<uint32_t>(g.rot.size());
    for (std::size_t k = 0; k < cs.corner_count(v); ++k) {
      const std::size_t c = cs.corner_of(v, k);
      for (uint32_t a = in_begin[c]; a < in_begin[c + 1]; ++a) {
        g.dart_slot[arrivals[a].dart] = static_cast<int64_t>(g.rot.size());
        g.rot.push_back(arrivals[a].dart);
      }
      const int64_t d = 2 * out_edge[c];
      g.dart_slot[d] = static_cast<int64_t>(g.rot.size());
      g.rot.push_back(d);
      if (cs.succ[c] == none || !cs.left_bounded[c]) g.complete[v] = false;
    }
  }
  g.rot_begin[nv] = static_cast<uint32_t>(g.rot.size());

  // dart of the boundary edge {i, i+1}, oriented from phi(i) to phi(i+1)
  auto boundary = [&](int64_t i) -> int64_t {
    const auto range = cs.graft_range[i - cs.lo];
    const int s = cs.phi_phantom[i - cs.lo] ? 1 : -1;
    if (s == -1) {
      // pruned grafts may have no corners, or lose the root
      if (range[0] == none || range[1] <= range[0]) return none;
      const auto& last = cs.corners[range[1] - 1];
      if (!cs.graft_rooted[i - cs.lo] || last.flag || last.local != 0) return none;
      const int64_t e = out_edge[range[1] - 1];
      if (e == none) return none;
      return g.resolved(e) ? 2 * e : none;
    }
    if (range[0] != none && range[1] > range[0]) {  // level step: flag edge of the half-mobile root
      const int64_t e = flag_edge[cs.corners[range[0]].owner];
      return g.resolved(e) ? 2 * e : none;
    }
    const int64_t c = cs.phi_corner[i + 1 - cs.lo];
    if (c == none) return none;
    const int64_t e = out_edge[c];
    if (e == none) return none;
    return g.resolved(e) ? 2 * e + 1 : none;
  };
  g.boundary_dart.assign(cs.hi - cs.lo, none);
  for (int64_t i = cs.lo; i < cs.hi; ++i) g.boundary_dart[i - cs.lo] = boundary(i);
  if (cs.lo <= 0 && cs.hi >= 1) g.root_dart = g.boundary_dart[-cs.lo];
  g.cs = std::move(cs);
  return g;
}

}  // namespace

MapGraph build_map(const TreedBridgeWindow& w) {
  MapGraph g = assemble(build_corner_sequence(w));
  g.core_lo = w.lo();
  g.core_hi = w.hi();
  return g;
}

MapGraph build_map(TreedBridgeWindow& w, const MapOptions& opt) {
  if (!opt.resolve_core) return build_map(static_cast<const TreedBridgeWindow&>(w));
  auto grow = [&](std::vector<std::size_t> pending) {
    const int64_t room = static_cast<int64_t>(w.budgets().step_budget) - w.hi();
    const int64_t k = std::min(room, std::max<int64_t>(64, w.hi() - w.lo()));
    if (k <= 0 || w.frozen()) throw Unresolved(std::move(pending));
    try {
      w.extend_right(k);
    } catch (const CapExceeded&) {
      throw Unresolved(std::move(pending));
    }
  };
  for (;;) {
    CornerSequence cs;
    try {
      cs = build_corner_sequence(w);
    } catch (const NoAnchor&) {
      grow({});
      continue;
    }
    std::vector<std::size_t> pending;
    for (std::size_t c = 0; c < cs.corners.size(); ++c)
      if (cs.succ[c] == none && cs.corners[c].site >= opt.core_lo && cs.corners[c].site <= opt.core_hi)
        pending.push_back(c);
    if (pending.empty()) {
      MapGraph g = assemble(std::move(cs));
      g.core_lo = opt.core_lo;
      g.core_hi = opt.core_hi;
      return g;
    }
    grow(std::move(pending));
  }
}

std::vector<std::vector<uint32_t>> MapGraph::adjacency() const {
  std::vector<std::vector<uint32_t>> adj(vertex_count());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!resolved(e)) continue;
    adj[edges[e].u].push_back(edges[e].v);
    if (edges[e].u != edges[e].v) adj[edges[e].v].push_back(edges[e].u);
  }
  return adj;
}

FaceCensus face_census(const MapGraph& g) {
  FaceCensus fc;
  std::vector<bool> seen(g.dart_slot.size(), false);
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (!g.complete[v]) continue;
    for (uint32_t s = g.rot_begin[v]; s < g.rot_begin[v + 1]; ++s) {
      const int64_t start = g.rot[s];
      if (seen[start]) continue;
      std::size_t len = 0;
      bool closed = false;
      int64_t d = start;
      for (;;) {
        seen[d] = true;
        ++len;
        const uint32_t w = g.head(d);
        if (w == invalid_vertex || !g.complete[w]) break;
        const int64_t t = d ^ 1;
        int64_t pos = g.dart_slot[t] + 1;
        if (pos == g.rot_begin[w + 1]) pos = g.rot_begin[w];
        d = g.rot[pos];
        if (d == start) {
          closed = true;
          break;
        }
        if (seen[d]) break;
      }
      if (closed) {
        if (fc.by_degree.size() <= len) fc.by_degree.resize(len + 1, 0);
        ++fc.by_degree[len];
        ++fc.closed;
      } else {
        ++fc.partial;
      }
    }
  }
  return fc;
}

std::vector<int32_t> bfs_distances(const std::vector<std::vector<uint32_t>>& adj, uint32_t source,
                                   int32_t max_depth) {
  std::vector<int32_t> dist(adj.size(), -1);
  std::deque<uint32_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const uint32_t u = queue.front();
    queue.pop_front();
    if (max_depth >= 0 && dist[u] >= max_depth) continue;
    for (uint32_t x : adj[u]) {
      if (dist[x] != -1) continue;
      dist[x] = dist[u] + 1;
      queue.push_back(x);
    }
  }
  return dist;
}

std::vector<int32_t> bfs_distances(const MapGraph& g, uint32_t source) {
  return bfs_distances(g.adjacency(), source);
}

nlohmann::json to_json(const MapGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (g.resolved(e)) edges.push_back({g.edges[e].u, g.edges[e].v});
  nlohmann::json phi = nlohmann::json::object();
  nlohmann::json phantom = nlohmann::json::array();
  for (int64_t i = g.cs.lo; i <= g.cs.hi; ++i) {
    const int64_t v = g.phi(i);
    phi[std::to_string(i)] = v == none ? nlohmann::json(nullptr) : nlohmann::json(v);
    if (g.cs.phi_phantom[i - g.cs.lo]) phantom.push_back(i);
  }
  nlohmann::json root = nullptr;
  if (g.root_dart != none) root = {g.tail(g.root_dart), g.head(g.root_dart)};
  std::size_t complete = std::count(g.complete.begin(), g.complete.end(), true);
  return {{"model", model_name(g.cs.model)},
          {"lo", g.cs.lo},
          {"hi", g.cs.hi},
          {"n", g.vertex_count()},
          {"edges", edges},
          {"labels", g.cs.vertex_label},
          {"phi", phi},
          {"phi_phantom", phantom},
          {"root", root},
          {"complete_vertices", complete}};
}

void write_dot(std::ostream& os, const MapGraph& g) {
  std::vector<int> side(g.vertex_count(), 0);  // 1 left, 2 right, 3 both
  for (int64_t i = g.cs.lo; i <= g.cs.hi; ++i) {
    const int64_t v = g.phi(i);
    if (v == none) continue;
    if (i <= 0) side[v] |= 1;
    if (i >= 0) side[v] |= 2;
  }
  os << "graph map {\n  node [shape=circle, fontsize=10];\n";
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    os << "  " << v << " [label=\"" << g.cs.vertex_label[v] << "\"";
    if (side[v] == 1) os << ", boundary=left, color=blue";
    else if (side[v] == 2) os << ", boundary=right, color=darkgreen";
    else if (side[v] == 3) os << ", boundary=both, color=purple";
    os << "];\n";
  }
  const int64_t root_edge = g.root_dart == none ? none : g.root_dart >> 1;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!g.resolved(e)) continue;
    const bool root = static_cast<int64_t>(e) == root_edge;
    os << "  " << (root ? g.tail(g.root_dart) : g.edges[e].u) << " -- "
       << (root ? g.head(g.root_dart) : g.edges[e].v);
    if (root) os << " [root=true, color=red, penwidth=3, dir=forward]";
    else if (g.edges[e].flag >= 0) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
}

}  // namespace uihp
