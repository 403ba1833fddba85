#include "uihp/treed_bridge.hpp"

#include <algorithm>
#include <stdexcept>

#include "uihp/errors.hpp"

namespace uihp {

namespace {

// Cached step reader for one half of the bridge. Index k counts edges away from 0.
class HalfSteps {
 public:
  HalfSteps(const StreamId& id, Model model, Side side, const TriangularWeights& w)
      : id_(id),
        model_(model),
        domain_(side == Side::right ? Domain::step_right : Domain::step_left),
        p_up_(w.p_up()) {}

  // the walk increment away from 0: xi_k = X_{k+1} - X_k
  int operator()(uint64_t k) {
    if (model_ == Model::quad) {
      const uint64_t block = k >> 6;
      if (block != block_) {
        block_ = block;
        word_ = id_.key(domain_, block);
      }
      return ((word_ >> (k & 63)) & 1) ? 1 : -1;
    }
    const double u = to_unit(id_.key(domain_, k));
    return u < p_up_ ? 1 : (u < 2 * p_up_ ? -1 : 0);
  }

 private:
  StreamId id_;
  Model model_;
  Domain domain_;
  double p_up_;
  uint64_t block_ = ~0ULL;
  uint64_t word_ = 0;
};

}  // namespace

int step_value(const StreamId& id, Model model, int64_t i, const TriangularWeights& w) {
  if (i >= 0) return HalfSteps(id, model, Side::right, w)(static_cast<uint64_t>(i));
  // edge {i, i+1} on the left is walk step k = -i-1 taken leftwards
  return -HalfSteps(id, model, Side::left, w)(static_cast<uint64_t>(-i - 1));
}

int32_t Graft::min_label() const {
  if (auto t = std::get_if<WellLabeledTree>(&body)) return uihp::min_label(*t);
  if (auto m = std::get_if<Mobile>(&body)) return uihp::min_label(*m);
  throw std::logic_error("min label of a pruned graft is not available");
}

TreedBridgeWindow::TreedBridgeWindow(StreamId id, Model model, int64_t lo, int64_t hi,
                                     Budgets budgets, GraftPolicy policy,
                                     TriangularWeights weights)
    : id_(id), model_(model), budgets_(budgets), policy_(policy), weights_(weights) {
  if (lo > 0 || hi < 0) throw std::invalid_argument("window must contain 0");
  if (policy_.pruned && (model_ != Model::quad || policy_.law == nullptr))
    throw std::invalid_argument("pruned grafts need the quadrangular model and a min-label law");
  extend_to(lo, hi);
}

TreedBridgeWindow TreedBridgeWindow::from_values(Model model, int64_t lo,
                                                 const std::vector<int32_t>& values,
                                                 std::vector<Graft> grafts) {
  const int64_t hi = lo + static_cast<int64_t>(values.size()) - 1;
  if (lo > 0 || hi < 0 || values[-lo] != 0) throw std::invalid_argument("need value(0) = 0");
  TreedBridgeWindow w;
  w.model_ = model;
  w.frozen_ = true;
  w.lo_ = lo;
  w.hi_ = hi;
  w.right_.assign(values.begin() - lo, values.end());
  w.left_.clear();
  for (int64_t i = 0; i >= lo; --i) w.left_.push_back(values[i - lo]);
  w.right_grafts_.resize(hi);
  w.left_grafts_.resize(-lo);
  for (int64_t i = lo; i < hi; ++i) {
    const int s = w.step(i);
    if (s < -1 || s > 1 || (model == Model::quad && s == 0))
      throw std::invalid_argument("invalid bridge step");
  }
  for (auto& g : grafts) {
    if (g.site < lo || g.site >= hi) throw std::invalid_argument("graft outside window");
    w.slot(g.site) = std::move(g);
  }
  for (int64_t i = lo; i < hi; ++i) {
    const int s = w.step(i);
    const bool needs = s == -1 || (model == Model::tri && s == 0);
    if (needs != w.slot(i).has_value()) throw std::invalid_argument("graft set does not match steps");
    if (needs && w.slot(i)->root_value != w.value(i))
      throw std::invalid_argument("graft root value must equal the bridge value");
  }
  return w;
}

int32_t TreedBridgeWindow::value(int64_t i) const {
  if (i < lo_ || i > hi_) throw std::out_of_range("index outside window");
  return i >= 0 ? right_[i] : left_[-i];
}

std::optional<Graft>& TreedBridgeWindow::slot(int64_t i) {
  return i >= 0 ? right_grafts_[i] : left_grafts_[-i - 1];
}
const std::optional<Graft>& TreedBridgeWindow::slot(int64_t i) const {
  return i >= 0 ? right_grafts_[i] : left_grafts_[-i - 1];
}

bool TreedBridgeWindow::has_graft(int64_t i) const {
  if (i < lo_ || i >= hi_) return false;
  return slot(i).has_value();
}

const Graft& TreedBridgeWindow::graft(int64_t i) const {
  if (!has_graft(i)) throw std::out_of_range("no graft at index");
  return *slot(i);
}

void TreedBridgeWindow::sample_graft(int64_t i) {
  Rng rng(id_, Domain::graft, zigzag(i));
  const int32_t r = value(i);
  const int s = step(i);
  Graft g;
  g.site = i;
  g.root_value = r;
  if (model_ == Model::quad) {
    if (policy_.pruned)
      g.body = sample_pruned_tree(rng, r, policy_.band_lo, policy_.band_hi, *policy_.law,
                                  budgets_.node_cap);
    else
      g.body = sample_labeled_tree(rng, r, budgets_.node_cap);
  } else if (s == -1) {
    g.body = sample_mobile(rng, r, weights_, budgets_.node_cap);
  } else {
    g.half = true;
    g.body = sample_half_mobile(rng, r, weights_, budgets_.node_cap);
  }
  slot(i) = std::move(g);
}

void TreedBridgeWindow::extend_right(int64_t k) {
  if (k < 0) throw std::invalid_argument("negative extension");
  if (k == 0) return;
  if (frozen_) throw std::logic_error("hand-built window cannot be extended");
  if (static_cast<std::size_t>(hi_ + k) > budgets_.step_budget)
    throw CapExceeded(CapExceeded::Kind::steps, budgets_.step_budget);
  HalfSteps steps(id_, model_, Side::right, weights_);
  for (int64_t t = 0; t < k; ++t) {
    const int64_t i = hi_;
    const int s = steps(static_cast<uint64_t>(i));
    right_.push_back(right_.back() + s);
    right_grafts_.emplace_back();
    ++hi_;
    if (s == -1 || (model_ == Model::tri && s == 0)) {
      try {
        sample_graft(i);
      } catch (...) {
        right_.pop_back();
        right_grafts_.pop_back();
        --hi_;
        throw;
      }
    }
  }
}

void TreedBridgeWindow::extend_left(int64_t k) {
  if (k < 0) throw std::invalid_argument("negative extension");
  if (k == 0) return;
  if (frozen_) throw std::logic_error("hand-built window cannot be extended");
  if (static_cast<std::size_t>(-lo_ + k) > budgets_.step_budget)
    throw CapExceeded(CapExceeded::Kind::steps, budgets_.step_budget);
  HalfSteps steps(id_, model_, Side::left, weights_);
  for (int64_t t = 0; t < k; ++t) {
    const int64_t i = lo_ - 1;
    const int xi = steps(static_cast<uint64_t>(-i - 1));
    left_.push_back(left_.back() + xi);  // b(i) = b(i+1) + xi
    left_grafts_.emplace_back();
    --lo_;
    const int s = -xi;  // b(i+1) - b(i)
    if (s == -1 || (model_ == Model::tri && s == 0)) {
      try {
        sample_graft(i);
      } catch (...) {
        left_.pop_back();
        left_grafts_.pop_back();
        ++lo_;
        throw;
      }
    }
  }
}

void TreedBridgeWindow::extend_to(int64_t lo, int64_t hi) {
  if (hi > hi_) extend_right(hi - hi_);
  if (lo < lo_) extend_left(lo_ - lo);
}

int64_t TreedBridgeWindow::hitting_time(int j, Side side) {
  if (j < 0) throw std::invalid_argument("j must be nonnegative");
  const int32_t target = -j;
  if (side == Side::right) {
    for (int64_t m = 0;; ++m) {
      if (m > hi_) extend_right(1);
      if (right_[m] == target) return m;
    }
  }
  for (int64_t m = 0;; ++m) {
    if (m > -lo_) extend_left(1);
    if (left_[m] == target) return -m;
  }
}

int TreedBridgeWindow::delta(int j) {
  const int64_t a = hitting_time(j, Side::right), b = hitting_time(j + 1, Side::right);
  int best = 0;
  for (int64_t i = a; i < b; ++i)
    if (has_graft(i)) best = std::max(best, -(graft(i).min_label() + j));
  return best;
}

int TreedBridgeWindow::delta_prime(int j) {
  const int64_t a = hitting_time(j + 1, Side::left), b = hitting_time(j, Side::left);
  int best = 0;
  for (int64_t i = a; i < b; ++i)
    if (has_graft(i)) best = std::max(best, -(graft(i).min_label() + j));
  return best;
}

nlohmann::json to_json(const TreedBridgeWindow& w) {
  nlohmann::json values = nlohmann::json::array(), grafts = nlohmann::json::array();
  for (int64_t i = w.lo(); i <= w.hi(); ++i) values.push_back(w.value(i));
  for (int64_t i = w.lo(); i < w.hi(); ++i) {
    if (!w.has_graft(i)) continue;
    const Graft& g = w.graft(i);
    nlohmann::json rec = {{"site", i}, {"kind", g.half ? "half_mobile" : "tree"}};
    if (auto t = std::get_if<WellLabeledTree>(&g.body)) rec["tree"] = to_json(*t);
    else if (auto m = std::get_if<Mobile>(&g.body)) {
      rec["kind"] = g.half ? "half_mobile" : "mobile";
      rec["tree"] = to_json(*m);
    } else {
      const auto& p = std::get<PrunedContour>(g.body);
      rec["kind"] = "pruned";
      rec["corner_vertex"] = p.corner_vertex;
      rec["corner_label"] = p.corner_label;
    }
    grafts.push_back(std::move(rec));
  }
  return {{"model", model_name(w.model())},
          {"lo", w.lo()},
          {"hi", w.hi()},
          {"values", values},
          {"grafts", grafts}};
}

SideDeltas sample_side_deltas(const StreamId& id, Model model, Side side, int count, int clamp,
                              std::size_t step_budget, const LawSet& laws) {
  SideDeltas out;
  out.delta.assign(std::max(count, 0), 0);
  out.H.push_back(0);
  if (count <= 0) return out;
  if (model == Model::quad && !laws.quad) throw std::invalid_argument("missing quad law");
  if (model == Model::tri && !laws.tri) throw std::invalid_argument("missing tri law");
  HalfSteps steps(id, model, side, laws.weights);
  int32_t y = 0;
  int j = 0;
  for (uint64_t k = 0; k < step_budget; ++k) {
    const int xi = steps(k);
    // signed site of the edge, its increment read left to right, and the root of its graft
    const int64_t site = side == Side::right ? static_cast<int64_t>(k) : -static_cast<int64_t>(k) - 1;
    const int s = side == Side::right ? xi : -xi;
    const int32_t root = side == Side::right ? y : y + xi;
    if (s == -1 || (s == 0 && model == Model::tri)) {
      const double u = to_unit(id.key(Domain::graft_law, zigzag(site)));
      const int d0 = root + j + 1;  // depth needed for a positive contribution
      try {
        bool reaches;
        int depth = 0;
        if (model == Model::quad) {
          reaches = laws.quad->reaches(u, d0);
          if (reaches) depth = laws.quad->sample_depth(u);
        } else if (s == -1) {
          reaches = laws.tri->mobile_reaches(u, d0);
          if (reaches) depth = laws.tri->sample_mobile_depth(u);
        } else {
          reaches = laws.tri->half_reaches(u, d0);
          if (reaches) depth = laws.tri->sample_half_depth(u);
        }
        if (reaches) out.delta[j] = std::max(out.delta[j], std::min(depth - root - j, clamp));
      } catch (const CapExceeded&) {
        out.complete = j;
        return out;
      }
    }
    y += xi;
    if (y == -(j + 1)) {
      ++j;
      out.H.push_back(side == Side::right ? static_cast<int64_t>(k) + 1
                                          : -static_cast<int64_t>(k) - 1);
      if (j == count) {
        out.complete = count;
        return out;
      }
    }
  }
  out.complete = j;
  return out;
}

}  // namespace uihp
