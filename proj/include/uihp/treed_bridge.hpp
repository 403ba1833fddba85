#pragma once
// Two-sided bridges with grafted trees (quad) or mobiles / half-mobiles (tri),
// sampled lazily on a window [lo, hi].

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uihp/constants.hpp"
#include "uihp/labeled_trees.hpp"
#include "uihp/random.hpp"

namespace uihp {

inline constexpr std::size_t default_step_budget = 1'000'000;

enum class Side { right, left };

// Step b(i+1) - b(i) of the edge {i, i+1}. Quad steps are bits of one word per
// 64 indices, tri steps one uniform per index. Right and left halves use
// separate domains, so the halves are independent walks from 0.
int step_value(const StreamId& id, Model model, int64_t i, const TriangularWeights& w);

struct Budgets {
  std::size_t step_budget = default_step_budget;  // max extension per side
  std::size_t node_cap = default_node_cap;        // per graft
};

// Full grafts, or (quad only) grafts restricted to a label band.
struct GraftPolicy {
  bool pruned = false;
  int32_t band_lo = 0;
  int32_t band_hi = 0;
  const QuadMinLaw* law = nullptr;
};

struct Graft {
  int64_t site = 0;
  bool half = false;  // half-mobile on a level step
  std::variant<WellLabeledTree, Mobile, PrunedContour> body;
  int32_t root_value = 0;
  int32_t min_label() const;  // full grafts only
};

class TreedBridgeWindow {
 public:
  TreedBridgeWindow(StreamId id, Model model, int64_t lo, int64_t hi, Budgets budgets = {},
                    GraftPolicy policy = {},
                    TriangularWeights weights = TriangularWeights::critical());

  // hand-built window for tests: values[i - lo], grafts keyed by site
  static TreedBridgeWindow from_values(Model model, int64_t lo, const std::vector<int32_t>& values,
                                       std::vector<Graft> grafts);

  StreamId stream() const { return id_; }
  Model model() const { return model_; }
  int64_t lo() const { return lo_; }
  int64_t hi() const { return hi_; }
  int32_t value(int64_t i) const;
  int step(int64_t i) const { return value(i + 1) - value(i); }  // edge {i, i+1}
  bool has_graft(int64_t i) const;
  const Graft& graft(int64_t i) const;
  const GraftPolicy& policy() const { return policy_; }
  const Budgets& budgets() const { return budgets_; }

  void extend_right(int64_t k);
  void extend_left(int64_t k);
  void extend_to(int64_t lo, int64_t hi);

  // first m >= 0 (right) / last m <= 0 (left) with value -j; extends the window
  int64_t hitting_time(int j, Side side);
  // max over grafts in [H_j, H_{j+1}) (resp. [H'_{j+1}, H'_j)) of -(min label + j), floored at 0
  int delta(int j);
  int delta_prime(int j);

  bool frozen() const { return frozen_; }

 private:
  TreedBridgeWindow() = default;
  void sample_graft(int64_t i);
  std::optional<Graft>& slot(int64_t i);
  const std::optional<Graft>& slot(int64_t i) const;

  StreamId id_{};
  Model model_ = Model::quad;
  Budgets budgets_{};
  GraftPolicy policy_{};
  TriangularWeights weights_{};
  int64_t lo_ = 0, hi_ = 0;
  std::vector<int32_t> right_{0};  // b(0..hi)
  std::vector<int32_t> left_{0};   // b(0), b(-1), ..., b(lo)
  std::vector<std::optional<Graft>> right_grafts_;  // site i >= 0 at [i]
  std::vector<std::optional<Graft>> left_grafts_;   // site i < 0 at [-i-1]
  bool frozen_ = false;  // hand-built windows cannot grow
};

nlohmann::json to_json(const TreedBridgeWindow& w);

// ---- law-level excursions ----
// The same bridge steps as TreedBridgeWindow, with each graft replaced by a draw of
// its depth (root label minus min label) from the numeric min-label law. Used for
// the large Monte Carlo runs, where materializing every tree is out of reach.

struct LawSet {
  const QuadMinLaw* quad = nullptr;
  const MobileMinLaw* tri = nullptr;
  TriangularWeights weights = TriangularWeights::critical();
};

struct SideDeltas {
  std::vector<int> delta;   // delta[j], clamped at `clamp`, j < count
  int complete = 0;         // delta[j] is final for j < complete; later entries are lower bounds
  std::vector<int64_t> H;   // hitting times H_0..H_complete (negative on the left)
  bool truncated() const { return complete < static_cast<int>(delta.size()); }
};

SideDeltas sample_side_deltas(const StreamId& id, Model model, Side side, int count, int clamp,
                              std::size_t step_budget, const LawSet& laws);

}  // namespace uihp
