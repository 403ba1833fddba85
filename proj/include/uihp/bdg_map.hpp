#pragma once
// Corner sequence, successor arcs, map graph and boundary map of a treed bridge window.

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "uihp/treed_bridge.hpp"

namespace uihp {

inline constexpr int64_t none = -1;

struct CornerRecord {
  uint32_t owner;  // vertex id for real corners, flag id for flag corners
  int32_t label;
  int64_t site;    // bridge index of the graft
  uint32_t local;  // node index inside the graft
  bool flag = false;
};

struct CornerSequence {
  Model model = Model::quad;
  int64_t lo = 0, hi = 0;
  std::vector<CornerRecord> corners;  // contour order over grafts lo..hi-1
  std::size_t anchor = 0;             // c0
  // real corner: first later real corner with label - 1; flag corner: first later
  // real corner with the same label; none if the window ends first
  std::vector<int64_t> succ;
  // whether some real corner before c has label <= label(c) (all arcs into c are then visible)
  std::vector<bool> left_bounded;

  std::vector<int32_t> vertex_label;
  std::vector<int64_t> vertex_site;
  std::vector<uint32_t> vertex_corner_begin;  // CSR over vertex_corners
  std::vector<uint32_t> vertex_corners;       // corner indices, contour order
  std::vector<std::array<uint32_t, 2>> flag_corners;  // left/right corner of each flag
  std::vector<std::array<int64_t, 2>> graft_range;    // [begin, end) corners of graft at lo + k
  std::vector<bool> graft_rooted;  // the graft root is among its corners (false for out-of-band roots)

  // phi_corner[i - lo]: next real corner at or after graft i with label b(i), i in [lo, hi]
  std::vector<int64_t> phi_corner;
  std::vector<bool> phi_phantom;  // i is not a down-step

  std::size_t vertex_count() const { return vertex_label.size(); }
  std::size_t leftmost_corner(uint32_t v) const { return vertex_corners[vertex_corner_begin[v]]; }
  std::size_t rightmost_corner(uint32_t v) const {
    return vertex_corners[vertex_corner_begin[v + 1] - 1];
  }
  std::size_t corner_count(uint32_t v) const {
    return vertex_corner_begin[v + 1] - vertex_corner_begin[v];
  }
  std::size_t corner_of(uint32_t v, std::size_t k) const {
    return vertex_corners[vertex_corner_begin[v] + k];
  }
  uint32_t root_vertex() const { return corners[anchor].owner; }
  std::size_t successor(std::size_t i) const;  // throws Unresolved
  int64_t phi_vertex(int64_t i) const;          // none if unresolved
  std::vector<std::size_t> unresolved_corners() const;
};

CornerSequence build_corner_sequence(const TreedBridgeWindow& w);

struct MapEdge {
  uint32_t u = 0;  // invalid_vertex when that end is outside the window
  uint32_t v = 0;
  int64_t from_corner = none;  // source corner (real corner, or left flag corner)
  int64_t to_corner = none;    // target corner (or right flag corner for flag edges)
  int32_t flag = -1;
};

inline constexpr uint32_t invalid_vertex = 0xffffffffu;

// Edge e has darts 2e (tail u) and 2e + 1 (tail v).
class MapGraph {
 public:
  CornerSequence cs;
  std::vector<MapEdge> edges;
  std::vector<uint32_t> rot_begin;  // per vertex, into rot
  std::vector<int64_t> rot;         // darts in clockwise order around each vertex
  std::vector<int64_t> dart_slot;   // position in rot, none for missing darts
  std::vector<bool> complete;       // rotation fully known inside the window
  int64_t root_dart = none;         // phi(0) -> phi(1)
  std::vector<int64_t> boundary_dart;  // per window edge {i, i+1}, i in [lo, hi)
  int64_t core_lo = 0, core_hi = 0;

  std::size_t vertex_count() const { return cs.vertex_count(); }
  uint32_t tail(int64_t d) const { return d & 1 ? edges[d >> 1].v : edges[d >> 1].u; }
  uint32_t head(int64_t d) const { return d & 1 ? edges[d >> 1].u : edges[d >> 1].v; }
  bool resolved(std::size_t e) const {
    return edges[e].u != invalid_vertex && edges[e].v != invalid_vertex;
  }
  int64_t phi(int64_t i) const { return cs.phi_vertex(i); }
  std::vector<std::vector<uint32_t>> adjacency() const;
};

struct MapOptions {
  bool resolve_core = false;  // extend right until every corner of a core vertex is resolved
  int64_t core_lo = 0;
  int64_t core_hi = 0;
};

// Builds from the window as it is.
MapGraph build_map(const TreedBridgeWindow& w);
// Applies the resolution policy first; throws Unresolved when the step budget runs out.
MapGraph build_map(TreedBridgeWindow& w, const MapOptions& opt);

struct FaceCensus {
  std::vector<std::size_t> by_degree;  // closed faces through complete vertices
  std::size_t closed = 0;
  std::size_t partial = 0;
  std::size_t count(std::size_t degree) const {
    return degree < by_degree.size() ? by_degree[degree] : 0;
  }
};

FaceCensus face_census(const MapGraph& g);

// BFS distances from source over resolved edges; -1 when unreachable
std::vector<int32_t> bfs_distances(const MapGraph& g, uint32_t source);
std::vector<int32_t> bfs_distances(const std::vector<std::vector<uint32_t>>& adj, uint32_t source,
                                   int32_t max_depth = -1);

nlohmann::json to_json(const MapGraph& g);
void write_dot(std::ostream& os, const MapGraph& g);

}  // namespace uihp
