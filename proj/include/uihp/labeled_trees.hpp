#pragma once
// Labeled Galton-Watson trees (quadrangular case), Boltzmann mobiles (triangular
// case) and the numeric min-label laws used as oracles and fast samplers.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uihp/constants.hpp"
#include "uihp/random.hpp"

namespace uihp {

inline constexpr std::size_t default_node_cap = 10'000'000;

// Rooted plane tree. Node 0 is the root, parent[v] < v, children of a node are
// ordered by increasing index.
class PlaneTree {
 public:
  PlaneTree() : PlaneTree(std::vector<int32_t>{-1}) {}
  explicit PlaneTree(std::vector<int32_t> parents);

  std::size_t size() const { return parent_.size(); }
  std::size_t edge_count() const { return parent_.size() - 1; }
  uint32_t root() const { return 0; }
  int32_t parent(uint32_t v) const { return parent_[v]; }
  const std::vector<int32_t>& parents() const { return parent_; }
  std::span<const uint32_t> children(uint32_t v) const {
    return {children_.data() + child_begin_[v], children_.data() + child_begin_[v + 1]};
  }
  std::size_t degree(uint32_t v) const { return child_begin_[v + 1] - child_begin_[v]; }

 private:
  std::vector<int32_t> parent_;
  std::vector<uint32_t> child_begin_;
  std::vector<uint32_t> children_;
};

// node ids in contour order: corner(v), then (contour(child), corner(v)) per child
std::vector<uint32_t> contour_corners(const PlaneTree& t);

struct WellLabeledTree {
  PlaneTree tree;
  std::vector<int32_t> labels;

  int32_t root_label() const { return labels[0]; }
  bool valid() const;
};

PlaneTree sample_gw_tree(Rng& rng, std::size_t node_cap = default_node_cap);
WellLabeledTree label_uniform(const PlaneTree& tree, int32_t root_label, Rng& rng);
// GW tree and uniform labels in one pass (same law as the two calls above)
WellLabeledTree sample_labeled_tree(Rng& rng, int32_t root_label,
                                    std::size_t node_cap = default_node_cap);
int32_t min_label(const WellLabeledTree& t);

nlohmann::json to_json(const WellLabeledTree& t);
WellLabeledTree labeled_tree_from_json(const nlohmann::json& j);

// ---- mobiles ----

enum class NodeKind : uint8_t { labeled, unlabeled, flagged };

class Mobile {
 public:
  Mobile() = default;
  Mobile(std::vector<int32_t> parents, std::vector<NodeKind> kinds, std::vector<int32_t> values);

  std::size_t size() const { return tree_.size(); }
  const PlaneTree& tree() const { return tree_; }
  NodeKind kind(uint32_t v) const { return kinds_[v]; }
  // label of a labeled node, flag of a flagged node, 0 for face nodes
  int32_t value(uint32_t v) const { return values_[v]; }
  const std::vector<NodeKind>& kinds() const { return kinds_; }
  const std::vector<int32_t>& values() const { return values_; }
  bool is_half_mobile() const { return kinds_[0] == NodeKind::flagged; }
  int32_t root_value() const { return values_[0]; }
  std::size_t unlabeled_count() const;
  // degree identity and face-walk rule
  bool valid(std::string* why = nullptr) const;
  std::string encode() const;

 private:
  PlaneTree tree_;
  std::vector<NodeKind> kinds_;
  std::vector<int32_t> values_;
};

// labeled and flagged node ids in contour order (face nodes carry no corners)
std::vector<uint32_t> mobile_contour(const Mobile& m);

Mobile sample_mobile(Rng& rng, int32_t root_label, const TriangularWeights& w,
                     std::size_t node_cap = default_node_cap);
Mobile sample_half_mobile(Rng& rng, int32_t root_flag, const TriangularWeights& w,
                          std::size_t node_cap = default_node_cap);
// min over labeled nodes; +inf (INT32_MAX) if there is none
int32_t min_label(const Mobile& m);

nlohmann::json to_json(const Mobile& m);
Mobile mobile_from_json(const nlohmann::json& j);

// ---- min-label laws ----

struct OracleOptions {
  int max_iter = 200;
  double tol = 1e-13;
};

// h(m) = P(min label > -m) for a labeled GW tree with root label 0, from the
// fixed-point system with free boundary at M = max(10m, 1000).
double oracle_h(int m, const OracleOptions& opt = {});

// Tail table q(d) = 1 - h(d), d = 0..M, solved on [0, M] with free boundary.
struct FixedPointSolution {
  std::vector<double> q;
  double residual = 0;  // max |h - 1/(2 - avg h)|
  int iterations = 0;
};
FixedPointSolution solve_min_label_fixed_point(int M, const OracleOptions& opt = {});

// P(D >= d) where D = root label - min label. Table valid for d <= max_depth().
class QuadMinLaw {
 public:
  explicit QuadMinLaw(int max_depth = 1 << 15);
  int max_depth() const { return static_cast<int>(q_.size()) - 1; }
  double tail(int d) const;  // throws CapExceeded(law_range) beyond the table
  // D = max{d : u < tail(d)}, exact for D <= max_depth(); throws beyond it
  int sample_depth(double u) const;
  // whether D >= d, i.e. u < tail(d); decided without the table when u is large
  bool reaches(double u, int d) const;
  const std::vector<double>& table() const { return q_; }

 private:
  std::vector<double> q_;
};

// Tail tables for mobiles (a) and half-mobiles (b) from the fixed point of
// R_n = 1/(1 - g(S_n + S_{n-1})), S_n = g(S_n^2 + R_n + R_{n+1}), R_0 = S_{-1} = 0.
struct MobileFixedPoint {
  std::vector<double> a;  // a[n] = 1 - R_n/R, n = 0..M
  std::vector<double> b;  // b[n] = 1 - S_n/S, n = 0..M
  double residual = 0;
  int iterations = 0;
};
MobileFixedPoint solve_mobile_fixed_point(int M, const TriangularWeights& w,
                                          const OracleOptions& opt = {});

class MobileMinLaw {
 public:
  explicit MobileMinLaw(const TriangularWeights& w, int max_depth = 1 << 15);
  int max_depth() const { return static_cast<int>(a_.size()) - 1; }
  // mobiles: D >= 0; half-mobiles: D >= -1 (a labeled child may sit above the flag)
  int sample_mobile_depth(double u) const;
  int sample_half_depth(double u) const;
  bool mobile_reaches(double u, int d) const;
  bool half_reaches(double u, int d) const;
  double mobile_tail(int d) const;
  double half_tail(int d) const;

 private:
  std::vector<double> a_, b_;
};

// Contour of a GW tree restricted to a label band [lo, hi]. Subtrees that never
// enter the band are skipped without being materialized; corners of in-band
// vertices are kept exactly, including those separated by skipped subtrees.
struct PrunedContour {
  std::vector<uint32_t> corner_vertex;  // local vertex ids, contour order
  std::vector<int32_t> corner_label;
  std::vector<int32_t> vertex_label;
  bool root_in_band = false;
};

PrunedContour sample_pruned_tree(Rng& rng, int32_t root_label, int32_t band_lo, int32_t band_hi,
                                 const QuadMinLaw& law, std::size_t node_cap = default_node_cap);

}  // namespace uihp
