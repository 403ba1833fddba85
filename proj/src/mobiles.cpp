#include <algorithm>
#include <limits>
#include <stdexcept>

#include "uihp/errors.hpp"
#include "uihp/labeled_trees.hpp"

namespace uihp {

Mobile::Mobile(std::vector<int32_t> parents, std::vector<NodeKind> kinds,
               std::vector<int32_t> values)
    : tree_(std::move(parents)), kinds_(std::move(kinds)), values_(std::move(values)) {
  if (kinds_.size() != tree_.size() || values_.size() != tree_.size())
    throw std::invalid_argument("mobile arrays must have equal length");
}

std::size_t Mobile::unlabeled_count() const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), NodeKind::unlabeled));
}

bool Mobile::valid(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (kinds_[0] == NodeKind::unlabeled) return fail("root must be labeled or flagged");
  for (uint32_t v = 0; v < size(); ++v) {
    const int32_t p = tree_.parent(v);
    const auto ch = tree_.children(v);
    if (kinds_[v] != NodeKind::unlabeled) {
      if (p >= 0 && kinds_[p] != NodeKind::unlabeled) return fail("edge between two non-face nodes");
      if (kinds_[v] == NodeKind::flagged && (p >= 0 ? 1 : 0) + ch.size() > 2)
        return fail("flagged node of degree > 2");
      if (kinds_[v] == NodeKind::flagged && p < 0 && ch.size() != 1)
        return fail("root flag must have degree 1");
      continue;
    }
    int n_lab = 0, n_flag = 0;
    int lab = 0;
    std::vector<int32_t> flags;
    auto visit = [&](uint32_t u) {
      if (kinds_[u] == NodeKind::labeled) {
        ++n_lab;
        lab = values_[u];
      } else if (kinds_[u] == NodeKind::flagged) {
        ++n_flag;
        flags.push_back(values_[u]);
      }
    };
    if (p >= 0) visit(static_cast<uint32_t>(p));
    for (uint32_t c : ch) {
      if (kinds_[c] == NodeKind::unlabeled) return fail("edge between two face nodes");
      visit(c);
    }
    if (2 * n_lab + n_flag != 3) return fail("face node violates 2*#labeled + #flagged = 3");
    if (n_lab == 1 && !(flags[0] == lab || flags[0] == lab - 1))
      return fail("flag must equal the label or the label minus one");
    if (n_lab == 0 && !(flags[0] == flags[1] && flags[1] == flags[2]))
      return fail("flags around a three-flag face must agree");
  }
  return true;
}

std::string Mobile::encode() const {
  std::string s;
  std::vector<std::pair<uint32_t, uint32_t>> stack;
  auto open = [&](uint32_t v) {
    s += kinds_[v] == NodeKind::labeled ? 'L' : kinds_[v] == NodeKind::flagged ? 'F' : 'U';
    if (kinds_[v] != NodeKind::unlabeled) s += std::to_string(values_[v]);
    s += '(';
    stack.emplace_back(v, 0u);
  };
  open(0);
  while (!stack.empty()) {
    auto& [v, k] = stack.back();
    const auto ch = tree_.children(v);
    if (k == ch.size()) {
      s += ')';
      stack.pop_back();
      continue;
    }
    open(ch[k++]);
  }
  return s;
}

std::vector<uint32_t> mobile_contour(const Mobile& m) {
  const PlaneTree& t = m.tree();
  auto has_corners = [&](uint32_t v) { return m.kind(v) != NodeKind::unlabeled; };
  std::vector<uint32_t> out;
  std::vector<std::pair<uint32_t, uint32_t>> stack{{0u, 0u}};
  if (has_corners(0)) out.push_back(0);
  while (!stack.empty()) {
    auto& [v, k] = stack.back();
    const auto ch = t.children(v);
    if (k == ch.size()) {
      stack.pop_back();
      if (!stack.empty() && has_corners(stack.back().first)) out.push_back(stack.back().first);
      continue;
    }
    const uint32_t c = ch[k++];
    if (has_corners(c)) out.push_back(c);
    stack.emplace_back(c, 0u);
  }
  return out;
}

namespace {

struct Spec {
  int32_t parent;
  NodeKind kind;
  int32_t value;  // label, flag, or (for a face) unused
};

Mobile grow_mobile(Rng& rng, Spec root, const TriangularWeights& w, std::size_t node_cap) {
  const double ratio = w.labeled_ratio();
  const double p3 = w.three_flag_prob();
  const double pl = w.labeled_face_prob();
  std::vector<int32_t> parent;
  std::vector<NodeKind> kind;
  std::vector<int32_t> value;
  std::vector<Spec> pending{root};
  while (!pending.empty()) {
    const Spec sp = pending.back();
    pending.pop_back();
    if (parent.size() >= node_cap) throw CapExceeded(CapExceeded::Kind::nodes, node_cap);
    const auto v = static_cast<int32_t>(parent.size());
    parent.push_back(sp.parent);
    kind.push_back(sp.kind);
    value.push_back(sp.kind == NodeKind::unlabeled ? 0 : sp.value);
    switch (sp.kind) {
      case NodeKind::labeled: {
        int k = 0;
        while (rng.uniform01() < ratio) ++k;
        for (int i = 0; i < k; ++i) pending.push_back({v, NodeKind::unlabeled, sp.value});
        break;
      }
      case NodeKind::flagged:
        pending.push_back({v, NodeKind::unlabeled, sp.value});
        break;
      case NodeKind::unlabeled:
        if (kind[sp.parent] == NodeKind::labeled) {
          pending.push_back({v, NodeKind::flagged, sp.value - (rng.coin() ? 1 : 0)});
        } else {
          const double u = rng.uniform01();
          if (u < p3) {
            pending.push_back({v, NodeKind::flagged, sp.value});
            pending.push_back({v, NodeKind::flagged, sp.value});
          } else if (u < p3 + pl) {
            pending.push_back({v, NodeKind::labeled, sp.value});
          } else {
            pending.push_back({v, NodeKind::labeled, sp.value + 1});
          }
        }
        break;
    }
  }
  return Mobile(std::move(parent), std::move(kind), std::move(value));
}

}  // namespace

Mobile sample_mobile(Rng& rng, int32_t root_label, const TriangularWeights& w,
                     std::size_t node_cap) {
  return grow_mobile(rng, {-1, NodeKind::labeled, root_label}, w, node_cap);
}

Mobile sample_half_mobile(Rng& rng, int32_t root_flag, const TriangularWeights& w,
                          std::size_t node_cap) {
  return grow_mobile(rng, {-1, NodeKind::flagged, root_flag}, w, node_cap);
}

int32_t min_label(const Mobile& m) {
  int32_t best = std::numeric_limits<int32_t>::max();
  for (uint32_t v = 0; v < m.size(); ++v)
    if (m.kind(v) == NodeKind::labeled) best = std::min(best, m.value(v));
  return best;
}

nlohmann::json to_json(const Mobile& m) {
  nlohmann::json kinds = nlohmann::json::array(), labels = nlohmann::json::array(),
                 flags = nlohmann::json::array();
  for (uint32_t v = 0; v < m.size(); ++v) {
    switch (m.kind(v)) {
      case NodeKind::labeled:
        kinds.push_back("labeled");
        labels.push_back(m.value(v));
        flags.push_back(nullptr);
        break;
      case NodeKind::unlabeled:
        kinds.push_back("unlabeled");
        labels.push_back(nullptr);
        flags.push_back(nullptr);
        break;
      case NodeKind::flagged:
        kinds.push_back("flagged");
        labels.push_back(nullptr);
        flags.push_back(m.value(v));
        break;
    }
  }
  return {{"parents", m.tree().parents()}, {"kinds", kinds}, {"labels", labels}, {"flags", flags}};
}

Mobile mobile_from_json(const nlohmann::json& j) {
  auto parents = j.at("parents").get<std::vector<int32_t>>();
  const auto& kinds = j.at("kinds");
  const auto& labels = j.at("labels");
  const auto& flags = j.at("flags");
  std::vector<NodeKind> k(parents.size());
  std::vector<int32_t> val(parents.size(), 0);
  for (std::size_t v = 0; v < parents.size(); ++v) {
    const auto s = kinds.at(v).get<std::string>();
    if (s == "labeled") {
      k[v] = NodeKind::labeled;
      val[v] = labels.at(v).get<int32_t>();
    } else if (s == "flagged") {
      k[v] = NodeKind::flagged;
      val[v] = flags.at(v).get<int32_t>();
    } else if (s == "unlabeled") {
      k[v] = NodeKind::unlabeled;
    } else {
      throw std::invalid_argument("unknown node kind: " + s);
    }
  }
  Mobile m(std::move(parents), std::move(k), std::move(val));
  std::string why;
  if (!m.valid(&why)) throw std::invalid_argument("invalid mobile: " + why);
  return m;
}

}  // namespace uihp
