#pragma once
// Geodesic rays along successor chains and their boundary-intersection sets.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uihp/bdg_map.hpp"

namespace uihp {

enum class RayKind { maximal, minimal, random_proper };

const char* ray_kind_name(RayKind k);

struct GeodesicRay {
  RayKind kind = RayKind::maximal;
  uint32_t start = 0;
  std::vector<uint32_t> vertices;   // gamma(0..n)
  std::vector<std::size_t> corners; // corner of gamma(i) whose arc gives the step i -> i+1
  std::vector<int32_t> labels;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool proper() const;
};

// All three throw Unresolved when the chain leaves the window.
GeodesicRay maximal_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps);
GeodesicRay minimal_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps);
GeodesicRay random_proper_geodesic(const CornerSequence& cs, uint32_t v, std::size_t n_steps,
                                   Rng& rng);
inline GeodesicRay maximal_geodesic(const MapGraph& g, uint32_t v, std::size_t n) {
  return maximal_geodesic(g.cs, v, n);
}
inline GeodesicRay minimal_geodesic(const MapGraph& g, uint32_t v, std::size_t n) {
  return minimal_geodesic(g.cs, v, n);
}

nlohmann::json to_json(const GeodesicRay& r);

struct IntersectionRecord {
  int horizon = 0;
  std::vector<int> r_plus, r_minus;  // from the maximal geodesic, within [0, horizon]
  bool has_min = false;
  std::vector<int> r_plus_min, r_minus_min;  // from the minimal geodesic

  static std::vector<int> gaps(const std::vector<int>& set);
};

// Regenerative representation from the Delta statistics, for j < horizon.
IntersectionRecord intersections_from_deltas(const std::vector<int>& delta,
                                             const std::vector<int>& delta_prime, int horizon);
// Needs full grafts; extends the window to H_horizon and H'_horizon.
IntersectionRecord intersections_by_labels(TreedBridgeWindow& w, int horizon);

// Extends w so that gamma(0..n) and the needed part of phi lie inside it.
void prepare_horizon(TreedBridgeWindow& w, int horizon);

// Boundary hit times of a ray from the root; phi membership tables over the window.
struct BoundarySets {
  std::vector<int> right, left;
};
BoundarySets boundary_hits(const CornerSequence& cs, const GeodesicRay& ray);
IntersectionRecord intersections_by_tracing(const CornerSequence& cs, int horizon,
                                            bool with_minimal = true);

struct SandwichReport {
  std::size_t violations = 0;
  std::vector<std::string> messages;
  bool ok() const { return violations == 0; }
};
SandwichReport sandwich_check(const CornerSequence& cs, const GeodesicRay& ray,
                              const IntersectionRecord& rec);

}  // namespace uihp
