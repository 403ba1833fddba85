#include "uihp/labeled_trees.hpp"

#include <algorithm>
#include <stdexcept>

#include "uihp/errors.hpp"

namespace uihp {

PlaneTree::PlaneTree(std::vector<int32_t> parents) : parent_(std::move(parents)) {
  const std::size_t n = parent_.size();
  if (n == 0 || parent_[0] != -1) throw std::invalid_argument("tree root must have parent -1");
  child_begin_.assign(n + 1, 0);
  for (std::size_t v = 1; v < n; ++v) {
    const int32_t p = parent_[v];
    if (p < 0 || static_cast<std::size_t>(p) >= v)
      throw std::invalid_argument("parent index must precede child");
    ++child_begin_[p + 1];
  }
  for (std::size_t v = 0; v < n; ++v) child_begin_[v + 1] += child_begin_[v];
  children_.resize(n - 1);
  std::vector<uint32_t> fill(child_begin_.begin(), child_begin_.end() - 1);
  for (std::size_t v = 1; v < n; ++v) children_[fill[parent_[v]]++] = static_cast<uint32_t>(v);
}

std::vector<uint32_t> contour_corners(const PlaneTree& t) {
  std::vector<uint32_t> out;
  out.reserve(2 * t.edge_count() + 1);
  // frame: node, next child position
  std::vector<std::pair<uint32_t, uint32_t>> stack{{0u, 0u}};
  out.push_back(0);
  while (!stack.empty()) {
    auto& [v, k] = stack.back();
    auto ch = t.children(v);
    if (k == ch.size()) {
      stack.pop_back();
      if (!stack.empty()) out.push_back(stack.back().first);
      continue;
    }
    const uint32_t c = ch[k++];
    out.push_back(c);
    stack.emplace_back(c, 0u);
  }
  return out;
}

bool WellLabeledTree::valid() const {
  if (labels.size() != tree.size()) return false;
  for (std::size_t v = 1; v < tree.size(); ++v) {
    const int d = labels[v] - labels[tree.parent(static_cast<uint32_t>(v))];
    if (d < -1 || d > 1) return false;
  }
  return true;
}

PlaneTree sample_gw_tree(Rng& rng, std::size_t node_cap) {
  std::vector<int32_t> parent{-1};
  // pending children, pushed so that the leftmost is popped first
  std::vector<int32_t> pending;
  const uint32_t k0 = rng.geometric_half();
  pending.insert(pending.end(), k0, 0);
  while (!pending.empty()) {
    const int32_t p = pending.back();
    pending.pop_back();
    if (parent.size() >= node_cap) throw CapExceeded(CapExceeded::Kind::nodes, node_cap);
    const auto v = static_cast<int32_t>(parent.size());
    parent.push_back(p);
    const uint32_t k = rng.geometric_half();
    pending.insert(pending.end(), k, v);
  }
  return PlaneTree(std::move(parent));
}

WellLabeledTree label_uniform(const PlaneTree& tree, int32_t root_label, Rng& rng) {
  WellLabeledTree t{tree, std::vector<int32_t>(tree.size())};
  t.labels[0] = root_label;
  for (std::size_t v = 1; v < tree.size(); ++v)
    t.labels[v] = t.labels[tree.parent(static_cast<uint32_t>(v))] + rng.ternary();
  return t;
}

WellLabeledTree sample_labeled_tree(Rng& rng, int32_t root_label, std::size_t node_cap) {
  std::vector<int32_t> parent{-1};
  std::vector<int32_t> label{root_label};
  std::vector<int32_t> pending;
  pending.insert(pending.end(), rng.geometric_half(), 0);
  while (!pending.empty()) {
    const int32_t p = pending.back();
    pending.pop_back();
    if (parent.size() >= node_cap) throw CapExceeded(CapExceeded::Kind::nodes, node_cap);
    const auto v = static_cast<int32_t>(parent.size());
    parent.push_back(p);
    label.push_back(label[p] + rng.ternary());
    pending.insert(pending.end(), rng.geometric_half(), v);
  }
  return {PlaneTree(std::move(parent)), std::move(label)};
}

int32_t min_label(const WellLabeledTree& t) {
  return *std::min_element(t.labels.begin(), t.labels.end());
}

nlohmann::json to_json(const WellLabeledTree& t) {
  return {{"parents", t.tree.parents()}, {"labels", t.labels}};
}

WellLabeledTree labeled_tree_from_json(const nlohmann::json& j) {
  WellLabeledTree t{PlaneTree(j.at("parents").get<std::vector<int32_t>>()),
                    j.at("labels").get<std::vector<int32_t>>()};
  if (!t.valid()) throw std::invalid_argument("labels violate the edge Lipschitz condition");
  return t;
}

}  // namespace uihp
