#pragma once
// Replicate scheduling and aggregation for the statistical targets.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uihp/constants.hpp"

namespace uihp {

enum class Target {
  trivial,
  delta_tail,
  tri_delta_tail,
  r_membership,
  tri_r_membership,
  harmonic_count,
  min_label,
  mobile_min_label,
  explicit_delta,
  dual_method,
  face_census,
  geodesy,
  sandwich,
  gap_symmetry,
};

const char* target_name(Target t);
Target target_from_name(const std::string& s);  // throws std::invalid_argument
std::vector<std::string> target_names();

struct EstimationPlan {
  Target target = Target::delta_tail;
  Model model = Model::quad;     // for the window targets that take both
  int grid = 20;                 // largest m or i
  int horizon = 10;              // window targets
  int window = 30;               // half width for face census
  uint64_t replicates = 1000;   // upper bound when min_determined is set
  uint64_t min_determined = 0;  // > 0: run in batches until this many replicates are fully determined
  uint64_t seed = 42;
  std::size_t step_budget = 1'000'000;
  std::size_t node_cap = 1'000'000;
  int workers = 1;
  double truncation_ceiling = 0.05;
  TriangularWeights weights = TriangularWeights::critical();
};

nlohmann::json to_json(const EstimationPlan& p);

enum class RecordKind { proportion, mean, zero_count, two_sample };

struct EstimateRecord {
  std::string group;
  int param = 0;
  RecordKind kind = RecordKind::proportion;
  int64_t count = 0, n = 0;     // hits / determined replicates (or sample A for two_sample)
  int64_t count_b = 0, n_b = 0; // sample B for two_sample
  double estimate = 0;
  double expected = 0;          // closed form, or the B estimate
  double se = 0;
  double truncation = 0;        // undetermined fraction for this record
  double band = 0;              // z se + truncation, z from band_sigmas
  bool pass = false;
};

struct EstimateReport {
  std::string target;
  uint64_t seed = 0;
  uint64_t replicates = 0;
  uint64_t truncated = 0;       // replicates with at least one undetermined quantity
  uint64_t determined = 0;
  double truncation_fraction = 0;
  std::vector<EstimateRecord> records;
  double band_sigmas = 3;
  bool pass = false;
  double wall_seconds = 0;      // kept out of to_json
};

// z for a report with `records` banded records: 3 for one record, and for several the
// value keeping the family-wise level at that of a single 3 sigma band.
double band_sigmas(std::size_t records);

nlohmann::json to_json(const EstimateReport& r);

// Runs without the ceiling check.
EstimateReport run_plan_unchecked(const EstimationPlan& plan);
// Throws BudgetExceeded when the truncation fraction is above the plan ceiling.
EstimateReport run_plan(const EstimationPlan& plan);

// Membership of 0..n in the regenerative set built from per-index Delta values
// with `complete` final entries: 1 in, 0 out, -1 undetermined.
std::vector<int8_t> membership(const std::vector<int>& delta, int complete, int n);

enum class Scale { quick, full };

struct BatteryEntry {
  int index = 0;
  std::string criterion;
  uint64_t seed = 0;  // derived from the battery seed and the index
  bool pass = false;
  nlohmann::json detail;
  double wall_seconds = 0;  // kept out of to_json
};
nlohmann::json to_json(const BatteryEntry& e);

// Criteria 1..12; `only` restricts to a subset of indices. on_done fires after each criterion.
std::vector<BatteryEntry> test_battery(Scale scale, uint64_t seed, int workers,
                                       const TriangularWeights& w = TriangularWeights::critical(),
                                       const std::vector<int>& only = {},
                                       const std::function<void(const BatteryEntry&)>& on_done = {});
uint64_t criterion_seed(uint64_t seed, int index);

}  // namespace uihp
