#include "uihp/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <stdexcept>
#include <thread>

#include "uihp/bdg_map.hpp"
#include "uihp/errors.hpp"
#include "uihp/geodesics.hpp"
#include "uihp/labeled_trees.hpp"
#include "uihp/treed_bridge.hpp"

namespace uihp {

namespace {

constexpr std::pair<Target, const char*> kNames[] = {
    {Target::trivial, "trivial"},
    {Target::delta_tail, "delta_tail"},
    {Target::tri_delta_tail, "tri_delta_tail"},
    {Target::r_membership, "r_membership"},
    {Target::tri_r_membership, "tri_r_membership"},
    {Target::harmonic_count, "harmonic_count"},
    {Target::min_label, "min_label"},
    {Target::mobile_min_label, "mobile_min_label"},
    {Target::explicit_delta, "explicit_delta"},
    {Target::dual_method, "dual_method"},
    {Target::face_census, "face_census"},
    {Target::geodesy, "geodesy"},
    {Target::sandwich, "sandwich"},
    {Target::gap_symmetry, "gap_symmetry"},
};

const char* kind_name(RecordKind k) {
  switch (k) {
    case RecordKind::proportion: return "proportion";
    case RecordKind::mean: return "mean";
    case RecordKind::zero_count: return "zero_count";
    default: return "two_sample";
  }
}

}  // namespace

const char* target_name(Target t) {
  for (const auto& [k, v] : kNames)
    if (k == t) return v;
  return "?";
}

Target target_from_name(const std::string& s) {
  for (const auto& [k, v] : kNames)
    if (s == v) return k;
  throw std::invalid_argument("unknown target: " + s);
}

std::vector<std::string> target_names() {
  std::vector<std::string> out;
  for (const auto& kv : kNames) out.push_back(kv.second);
  return out;
}

nlohmann::json to_json(const EstimationPlan& p) {
  return {{"target", target_name(p.target)},
          {"model", model_name(p.model)},
          {"grid", p.grid},
          {"horizon", p.horizon},
          {"window", p.window},
          {"replicates", p.replicates},
          {"seed", p.seed},
          {"step_budget", p.step_budget},
          {"node_cap", p.node_cap},
          {"min_determined", p.min_determined},
          {"truncation_ceiling", p.truncation_ceiling},
          {"weights", {{"R", p.weights.R}, {"S", p.weights.S}, {"g3", p.weights.g3}}}};
}

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& e : r.records) {
    nlohmann::json j{{"group", e.group},        {"param", e.param},
                     {"kind", kind_name(e.kind)}, {"count", e.count},
                     {"n", e.n},                {"estimate", e.estimate},
                     {"expected", e.expected},  {"se", e.se},
                     {"truncation", e.truncation}, {"band", e.band},
                     {"pass", e.pass}};
    if (e.kind == RecordKind::two_sample) {
      j["count_b"] = e.count_b;
      j["n_b"] = e.n_b;
    }
    recs.push_back(std::move(j));
  }
  return {{"target", r.target},
          {"seed", r.seed},
          {"replicates", r.replicates},
          {"truncated", r.truncated},
          {"determined", r.determined},
          {"truncation_fraction", r.truncation_fraction},
          {"pass", r.pass},
          {"band_sigmas", r.band_sigmas},
          {"records", recs}};
}

std::vector<int8_t> membership(const std::vector<int>& delta, int complete, int n) {
  std::vector<int8_t> out(n + 1, -1);
  out[0] = 1;
  int reach = 0;  // max j + delta_j over j < i, partial values included
  for (int i = 1; i <= n; ++i) {
    const int j = i - 1;
    if (j < static_cast<int>(delta.size())) reach = std::max(reach, j + delta[j]);
    if (reach >= i) out[i] = 0;
    else if (i <= complete) out[i] = 1;
  }
  return out;
}

namespace {

struct Slot {
  std::string group;
  int param = 0;
  RecordKind kind = RecordKind::proportion;
  double expected = 0;
  double scale = 1;  // truncation widening multiplier (means)
};

struct Tally {
  std::vector<int64_t> hit, n, undet, sum, sumsq;
  int64_t truncated = 0;
  explicit Tally(std::size_t k = 0)
      : hit(k, 0), n(k, 0), undet(k, 0), sum(k, 0), sumsq(k, 0) {}
  void add(const Tally& o) {
    for (std::size_t s = 0; s < hit.size(); ++s) {
      hit[s] += o.hit[s];
      n[s] += o.n[s];
      undet[s] += o.undet[s];
      sum[s] += o.sum[s];
      sumsq[s] += o.sumsq[s];
    }
    truncated += o.truncated;
  }
  void bernoulli(std::size_t s, bool x) {
    ++n[s];
    hit[s] += x;
  }
};

struct Job {
  std::vector<Slot> slots;
  // two_sample records pair slot k with slot paired[k]
  std::vector<int> paired;
  std::function<void(uint64_t, Tally&)> replicate;
};

struct Shared {
  std::unique_ptr<QuadMinLaw> quad;
  std::unique_ptr<MobileMinLaw> tri;
  LawSet laws;
};

std::shared_ptr<Shared> make_laws(const EstimationPlan& p, bool quad, bool tri) {
  auto sh = std::make_shared<Shared>();
  if (quad) sh->quad = std::make_unique<QuadMinLaw>(1 << 15);
  if (tri) sh->tri = std::make_unique<MobileMinLaw>(p.weights, 1 << 15);
  sh->laws = LawSet{sh->quad.get(), sh->tri.get(), p.weights};
  return sh;
}

int add_slot(Job& job, std::string group, int param, RecordKind kind, double expected,
             double scale = 1) {
  job.slots.push_back({std::move(group), param, kind, expected, scale});
  job.paired.push_back(-1);
  return static_cast<int>(job.slots.size()) - 1;
}

// tail slots for m = 1..grid, filled from a value known exactly or as a lower bound
void tail_fill(Tally& t, int base, int grid, int value, bool exact) {
  for (int m = 1; m <= grid; ++m) {
    if (exact || value >= m) t.bernoulli(base + m - 1, value >= m);
    else ++t.undet[base + m - 1];
  }
}

Job delta_job(const EstimationPlan& p, Model model) {
  Job job;
  const bool tri = model == Model::tri;
  const int a = static_cast<int>(job.slots.size());
  for (int m = 1; m <= p.grid; ++m) add_slot(job, "P(Delta_0>=m)", m, RecordKind::proportion, 1.0 / (m + 1));
  const int b = static_cast<int>(job.slots.size());
  for (int m = 1; m <= p.grid; ++m)
    add_slot(job, "P(Delta'_0>=m)", m, RecordKind::proportion, tri ? 1.0 / (m + 2) : 1.0 / (m + 3));
  auto sh = make_laws(p, !tri, tri);
  job.replicate = [=](uint64_t r, Tally& t) {
    const StreamId id{p.seed, r};
    const auto s = sample_side_deltas(id, model, Side::right, 1, p.grid, p.step_budget, sh->laws);
    const auto l = sample_side_deltas(id, model, Side::left, 1, p.grid, p.step_budget, sh->laws);
    tail_fill(t, a, p.grid, s.delta[0], !s.truncated());
    tail_fill(t, b, p.grid, l.delta[0], !l.truncated());
    if ((s.truncated() && s.delta[0] < p.grid) || (l.truncated() && l.delta[0] < p.grid)) ++t.truncated;
  };
  return job;
}

Job membership_job(const EstimationPlan& p, Model model) {
  Job job;
  const bool tri = model == Model::tri;
  const int a = static_cast<int>(job.slots.size());
  for (int i = 1; i <= p.grid; ++i) add_slot(job, "P(i in R+)", i, RecordKind::proportion, 1.0 / (i + 1));
  const int b = static_cast<int>(job.slots.size());
  for (int i = 1; i <= p.grid; ++i)
    add_slot(job, "P(i in R-)", i, RecordKind::proportion, tri ? 2.0 / (i + 2) : 3.0 / (i + 3));
  auto sh = make_laws(p, !tri, tri);
  job.replicate = [=](uint64_t r, Tally& t) {
    const StreamId id{p.seed, r};
    const auto s = sample_side_deltas(id, model, Side::right, p.grid, p.grid, p.step_budget, sh->laws);
    const auto l = sample_side_deltas(id, model, Side::left, p.grid, p.grid, p.step_budget, sh->laws);
    const auto mr = membership(s.delta, s.complete, p.grid);
    const auto ml = membership(l.delta, l.complete, p.grid);
    bool any = false;
    for (int i = 1; i <= p.grid; ++i) {
      if (mr[i] < 0) ++t.undet[a + i - 1], any = true;
      else t.bernoulli(a + i - 1, mr[i] == 1);
      if (ml[i] < 0) ++t.undet[b + i - 1], any = true;
      else t.bernoulli(b + i - 1, ml[i] == 1);
    }
    t.truncated += any;
  };
  return job;
}

Job harmonic_job(const EstimationPlan& p) {
  Job job;
  double expect = 0;
  for (int n = 1; n <= p.grid; ++n) {
    expect += 1.0 / (n + 1);
    add_slot(job, "E#(R+ in 1..n)", n, RecordKind::mean, expect, n);
  }
  auto sh = make_laws(p, true, false);
  job.replicate = [=](uint64_t r, Tally& t) {
    const StreamId id{p.seed, r};
    const auto s = sample_side_deltas(id, Model::quad, Side::right, p.grid, p.grid, p.step_budget, sh->laws);
    const auto mr = membership(s.delta, s.complete, p.grid);
    int64_t count = 0;
    bool ok = true;
    for (int n = 1; n <= p.grid; ++n) {
      ok = ok && mr[n] >= 0;
      count += mr[n] == 1;
      if (!ok) {
        ++t.undet[n - 1];
        continue;
      }
      ++t.n[n - 1];
      t.sum[n - 1] += count;
      t.sumsq[n - 1] += count * count;
    }
    t.truncated += !ok;
  };
  return job;
}

Job min_label_job(const EstimationPlan& p) {
  Job job;
  const QuadMinLaw law(std::max(4 * p.grid, 1000));
  for (int m = 1; m <= p.grid; ++m) add_slot(job, "P(D>=m)", m, RecordKind::proportion, law.tail(m));
  job.replicate = [=](uint64_t r, Tally& t) {
    Rng rng(StreamId{p.seed, r}, Domain::misc, 0);
    try {
      const auto tree = sample_labeled_tree(rng, 0, p.node_cap);
      tail_fill(t, 0, p.grid, -min_label(tree), true);
    } catch (const CapExceeded&) {
      for (int m = 1; m <= p.grid; ++m) ++t.undet[m - 1];
      ++t.truncated;
    }
  };
  return job;
}

Job mobile_min_job(const EstimationPlan& p) {
  Job job;
  for (int m = 1; m <= p.grid; ++m)
    add_slot(job, "P(min>-m)", m, RecordKind::proportion, m * (m + 2.0) / ((m + 1.0) * (m + 1.0)));
  const auto w = p.weights;
  job.replicate = [=](uint64_t r, Tally& t) {
    Rng rng(StreamId{p.seed, r}, Domain::misc, 0);
    try {
      const int32_t mn = min_label(sample_mobile(rng, 0, w, p.node_cap));
      for (int m = 1; m <= p.grid; ++m) t.bernoulli(m - 1, mn > -m);
    } catch (const CapExceeded&) {
      for (int m = 1; m <= p.grid; ++m) ++t.undet[m - 1];
      ++t.truncated;
    }
  };
  return job;
}

Job explicit_delta_job(const EstimationPlan& p) {
  Job job;
  for (int m = 1; m <= p.grid; ++m) add_slot(job, "P(Delta_0>=m)", m, RecordKind::proportion, 1.0 / (m + 1));
  job.replicate = [=](uint64_t r, Tally& t) {
    try {
      TreedBridgeWindow w({p.seed, r}, p.model, 0, 0, {p.step_budget, p.node_cap}, {}, p.weights);
      tail_fill(t, 0, p.grid, w.delta(0), true);
    } catch (const CapExceeded&) {
      for (int m = 1; m <= p.grid; ++m) ++t.undet[m - 1];
      ++t.truncated;
    }
  };
  return job;
}

// full windows for tri (and for quad when asked), band-pruned quad windows otherwise
TreedBridgeWindow horizon_window(const EstimationPlan& p, const StreamId& id, const Shared* sh,
                                 bool pruned) {
  GraftPolicy pol;
  if (pruned) {
    pol.pruned = true;
    pol.band_lo = -(p.horizon + 1);
    pol.band_hi = 0;
    pol.law = sh->quad.get();
  }
  TreedBridgeWindow w(id, p.model, 0, 0, {p.step_budget, p.node_cap}, pol, p.weights);
  prepare_horizon(w, p.horizon);
  return w;
}

Job dual_job(const EstimationPlan& p) {
  Job job;
  add_slot(job, "label/tracing mismatches", p.horizon, RecordKind::zero_count, 0);
  job.replicate = [=](uint64_t r, Tally& t) {
    try {
      auto w = horizon_window(p, {p.seed, r}, nullptr, false);
      const auto cs = build_corner_sequence(w);
      const auto a = intersections_by_tracing(cs, p.horizon, false);
      const auto b = intersections_by_labels(w, p.horizon);
      t.bernoulli(0, a.r_plus != b.r_plus || a.r_minus != b.r_minus);
    } catch (const CapExceeded&) {
      ++t.undet[0];
      ++t.truncated;
    } catch (const Unresolved&) {
      ++t.undet[0];
      ++t.truncated;
    }
  };
  return job;
}

Job face_job(const EstimationPlan& p) {
  Job job;
  const std::size_t want = p.model == Model::quad ? 4 : 3;
  add_slot(job, "faces of other degree", static_cast<int>(want), RecordKind::zero_count, 0);
  add_slot(job, "windows with closed faces", static_cast<int>(want), RecordKind::proportion, 1);
  job.replicate = [=](uint64_t r, Tally& t) {
    try {
      TreedBridgeWindow w({p.seed, r}, p.model, -p.window, p.window, {p.step_budget, p.node_cap}, {},
                          p.weights);
      const auto g = build_map(w);
      const auto fc = face_census(g);
      t.n[0] += static_cast<int64_t>(fc.closed);
      t.hit[0] += static_cast<int64_t>(fc.closed - fc.count(want));
      t.bernoulli(1, fc.closed > 0);
    } catch (const CapExceeded&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    } catch (const NoAnchor&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    }
  };
  return job;
}

Job geodesy_job(const EstimationPlan& p) {
  Job job;
  add_slot(job, "improper steps", p.horizon, RecordKind::zero_count, 0);
  add_slot(job, "BFS distance mismatches", p.horizon, RecordKind::zero_count, 0);
  const bool pruned = p.model == Model::quad;
  auto sh = make_laws(p, pruned, false);
  job.replicate = [=](uint64_t r, Tally& t) {
    try {
      auto w = horizon_window(p, {p.seed, r}, sh.get(), pruned);
      const auto g = build_map(w);
      const auto& cs = g.cs;
      const auto adj = g.adjacency();
      Rng rng(StreamId{p.seed, r}, Domain::geodesic, 0);
      std::vector<GeodesicRay> rays{maximal_geodesic(cs, cs.root_vertex(), p.horizon),
                                    minimal_geodesic(cs, cs.root_vertex(), p.horizon)};
      for (int k = 0; k < 3; ++k) rays.push_back(random_proper_geodesic(cs, cs.root_vertex(), p.horizon, rng));
      for (const auto& ray : rays) {
        for (std::size_t i = 1; i < ray.vertices.size(); ++i) {
          bool adjacent = false;
          for (uint32_t x : adj[ray.vertices[i - 1]]) adjacent = adjacent || x == ray.vertices[i];
          t.bernoulli(0, ray.labels[i] != ray.labels[i - 1] - 1 || !adjacent);
        }
        for (std::size_t i = 0; i < ray.vertices.size(); ++i) {
          const auto dist = bfs_distances(adj, ray.vertices[i], p.horizon);
          for (std::size_t j = 0; j < ray.vertices.size(); ++j) {
            const int64_t d = static_cast<int64_t>(i > j ? i - j : j - i);
            if (d > p.horizon) continue;
            t.bernoulli(1, dist[ray.vertices[j]] != d);
          }
        }
      }
    } catch (const CapExceeded&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    } catch (const Unresolved&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    }
  };
  return job;
}

Job sandwich_job(const EstimationPlan& p) {
  Job job;
  add_slot(job, "sandwich violations (random proper rays)", p.horizon, RecordKind::zero_count, 0);
  add_slot(job, "sandwich violations (maximal and minimal)", p.horizon, RecordKind::zero_count, 0);
  const bool pruned = p.model == Model::quad;
  auto sh = make_laws(p, pruned, false);
  job.replicate = [=](uint64_t r, Tally& t) {
    try {
      auto w = horizon_window(p, {p.seed, r}, sh.get(), pruned);
      const auto cs = build_corner_sequence(w);
      const auto rec = intersections_by_tracing(cs, p.horizon, true);
      Rng rng(StreamId{p.seed, r}, Domain::geodesic, 0);
      const auto ray = random_proper_geodesic(cs, cs.root_vertex(), p.horizon, rng);
      ++t.n[0];
      t.hit[0] += static_cast<int64_t>(sandwich_check(cs, ray, rec).violations);
      t.n[1] += 2;
      t.hit[1] += static_cast<int64_t>(
          sandwich_check(cs, maximal_geodesic(cs, cs.root_vertex(), p.horizon), rec).violations +
          sandwich_check(cs, minimal_geodesic(cs, cs.root_vertex(), p.horizon), rec).violations);
    } catch (const CapExceeded&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    } catch (const Unresolved&) {
      ++t.undet[0];
      ++t.undet[1];
      ++t.truncated;
    }
  };
  return job;
}

// first gap of R+^min (traced on a right-side window) vs first gap of R- (labels),
// from independent streams 2r and 2r+1
Job gap_symmetry_job(const EstimationPlan& p) {
  Job job;
  const int n = p.horizon;
  for (int g = 1; g <= n; ++g) {
    const int a = add_slot(job, "P(G1min<=g) vs P(G'1<=g)", g, RecordKind::two_sample, 0);
    const int b = add_slot(job, "P(G'1<=g)", g, RecordKind::proportion, 0);
    job.paired[a] = b;
  }
  auto sh = make_laws(p, true, false);
  EstimationPlan q = p;
  q.model = Model::quad;
  job.replicate = [=](uint64_t r, Tally& t) {
    bool trunc = false;
    // sample A: grow the window to H_{k+1} one level at a time and stop at the
    // first k with gamma_min(k) on the right boundary
    int ga = -1;  // first gap, n + 1 when beyond the horizon, -k when only G > k - 1 is known
    int checked = 0;
    try {
      GraftPolicy pol{true, -(n + 1), 0, sh->quad.get()};
      TreedBridgeWindow w({q.seed, 2 * r}, Model::quad, 0, 0, {q.step_budget, q.node_cap}, pol);
      ga = n + 1;
      for (int k = 1; k <= n; ++k) {
        w.hitting_time(k + 1, Side::right);
        const auto cs = build_corner_sequence(w);
        const auto hits = boundary_hits(cs, minimal_geodesic(cs, cs.root_vertex(), k));
        if (!hits.right.empty() && hits.right.back() == k) {
          ga = k;
          break;
        }
        checked = k;
      }
    } catch (const CapExceeded&) {
      ga = -(checked + 1);
      trunc = true;
    } catch (const Unresolved&) {
      ga = -(checked + 1);
      trunc = true;
    }
    // sample B
    const auto l = sample_side_deltas({q.seed, 2 * r + 1}, Model::quad, Side::left, n, n, q.step_budget,
                                      sh->laws);
    const auto ml = membership(l.delta, l.complete, n);
    int gb = n + 1;  // -1 while undetermined
    for (int i = 1; i <= n; ++i) {
      if (ml[i] < 0) {
        gb = -i;  // known to exceed i - 1
        break;
      }
      if (ml[i] == 1) {
        gb = i;
        break;
      }
    }
    for (int g = 1; g <= n; ++g) {
      const int a = 2 * (g - 1), b = a + 1;
      if (ga > 0) t.bernoulli(a, ga <= g);
      else if (-ga > g) t.bernoulli(a, false);
      else ++t.undet[a];
      if (gb > 0) t.bernoulli(b, gb <= g);
      else if (-gb > g) t.bernoulli(b, false);
      else ++t.undet[b];
    }
    if (trunc || gb < 0) ++t.truncated;
  };
  return job;
}

Job trivial_job(const EstimationPlan&) {
  Job job;
  add_slot(job, "certain event", 0, RecordKind::proportion, 1);
  job.replicate = [](uint64_t, Tally& t) { t.bernoulli(0, true); };
  return job;
}

Job make_job(const EstimationPlan& p) {
  switch (p.target) {
    case Target::trivial: return trivial_job(p);
    case Target::delta_tail: return delta_job(p, Model::quad);
    case Target::tri_delta_tail: return delta_job(p, Model::tri);
    case Target::r_membership: return membership_job(p, Model::quad);
    case Target::tri_r_membership: return membership_job(p, Model::tri);
    case Target::harmonic_count: return harmonic_job(p);
    case Target::min_label: return min_label_job(p);
    case Target::mobile_min_label: return mobile_min_job(p);
    case Target::explicit_delta: return explicit_delta_job(p);
    case Target::dual_method: return dual_job(p);
    case Target::face_census: return face_job(p);
    case Target::geodesy: return geodesy_job(p);
    case Target::sandwich: return sandwich_job(p);
    case Target::gap_symmetry: return gap_symmetry_job(p);
  }
  throw std::invalid_argument("unknown target");
}

EstimateRecord evaluate(const Slot& s, const Tally& t, std::size_t k, int pair, uint64_t reps,
                        double z) {
  EstimateRecord e;
  e.group = s.group;
  e.param = s.param;
  e.kind = s.kind;
  e.count = t.hit[k];
  e.n = t.n[k];
  const double tr = reps ? double(t.undet[k]) / double(reps) : 0;
  e.truncation = tr;
  switch (s.kind) {
    case RecordKind::proportion: {
      e.expected = s.expected;
      e.estimate = e.n ? double(e.count) / double(e.n) : 0;
      e.se = e.n ? std::sqrt(s.expected * (1 - s.expected) / double(e.n)) : 0;
      e.band = z * e.se + tr;
      e.pass = e.n > 0 && std::fabs(e.estimate - e.expected) <= e.band + 1e-12;
      break;
    }
    case RecordKind::mean: {
      e.expected = s.expected;
      e.estimate = e.n ? double(t.sum[k]) / double(e.n) : 0;
      const double var = e.n ? double(t.sumsq[k]) / double(e.n) - e.estimate * e.estimate : 0;
      e.se = e.n > 1 ? std::sqrt(std::max(var, 0.0) / double(e.n - 1)) : 0;
      e.band = z * e.se + tr * s.scale;
      e.pass = e.n > 0 && std::fabs(e.estimate - e.expected) <= e.band + 1e-12;
      break;
    }
    case RecordKind::zero_count: {
      e.estimate = double(e.count);
      e.pass = e.n > 0 && e.count == 0;
      break;
    }
    case RecordKind::two_sample: {
      e.count_b = t.hit[pair];
      e.n_b = t.n[pair];
      e.estimate = e.n ? double(e.count) / double(e.n) : 0;
      e.expected = e.n_b ? double(e.count_b) / double(e.n_b) : 0;
      const double pooled =
          (e.n + e.n_b) ? double(e.count + e.count_b) / double(e.n + e.n_b) : 0;
      e.se = (e.n && e.n_b) ? std::sqrt(pooled * (1 - pooled) * (1.0 / e.n + 1.0 / e.n_b)) : 0;
      e.truncation = std::max(tr, reps ? double(t.undet[pair]) / double(reps) : 0);
      e.band = z * e.se + e.truncation;
      e.pass = e.n > 0 && e.n_b > 0 && std::fabs(e.estimate - e.expected) <= e.band + 1e-12;
      break;
    }
  }
  return e;
}

}  // namespace

double band_sigmas(std::size_t records) {
  // two-sided level of a single 3 sigma band, shared out over the records (Sidak)
  const double alpha1 = std::erfc(3.0 / std::sqrt(2.0));
  if (records <= 1) return 3.0;
  const double a = -std::expm1(std::log1p(-alpha1) / double(records));
  double lo = 3.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > a ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EstimateReport run_plan_unchecked(const EstimationPlan& plan) {
  if (plan.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (plan.step_budget == 0 || plan.node_cap == 0) throw std::invalid_argument("budgets must be positive");
  const auto start = std::chrono::steady_clock::now();
  const Job job = make_job(plan);
  const std::size_t k = job.slots.size();
  const int W = std::max(1, plan.workers);
  Tally total(k);
  uint64_t done = 0;
  // fixed batches so the stopping point does not depend on the worker count
  const uint64_t batch = plan.min_determined ? std::max<uint64_t>(plan.min_determined, 64) : plan.replicates;
  while (done < plan.replicates) {
    const uint64_t end = std::min(plan.replicates, done + batch);
    std::vector<Tally> parts(W, Tally(k));
    std::vector<std::exception_ptr> errs(W);
    auto work = [&](int wi) {
      try {
        for (uint64_t r = done + wi; r < end; r += W) job.replicate(r, parts[wi]);
      } catch (...) {
        errs[wi] = std::current_exception();
      }
    };
    if (W == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (int wi = 0; wi < W; ++wi) threads.emplace_back(work, wi);
      for (auto& th : threads) th.join();
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    for (const auto& p : parts) total.add(p);
    done = end;
    if (plan.min_determined && done - uint64_t(total.truncated) >= plan.min_determined) break;
  }

  EstimateReport rep;
  rep.target = target_name(plan.target);
  rep.seed = plan.seed;
  rep.replicates = done;
  rep.truncated = static_cast<uint64_t>(total.truncated);
  rep.determined = done - rep.truncated;
  rep.truncation_fraction = double(total.truncated) / double(done);
  rep.pass = rep.determined >= plan.min_determined;
  std::vector<bool> is_pair(k, false);
  for (std::size_t s = 0; s < k; ++s)
    if (job.paired[s] >= 0) is_pair[job.paired[s]] = true;
  std::size_t tested = 0;
  for (std::size_t s = 0; s < k; ++s)
    tested += !is_pair[s] && job.slots[s].kind != RecordKind::zero_count;
  const double z = band_sigmas(tested);
  rep.band_sigmas = z;
  for (std::size_t s = 0; s < k; ++s) {
    if (is_pair[s]) continue;
    rep.records.push_back(evaluate(job.slots[s], total, s, job.paired[s], done, z));
    rep.pass = rep.pass && rep.records.back().pass;
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

EstimateReport run_plan(const EstimationPlan& plan) {
  auto rep = run_plan_unchecked(plan);
  if (rep.truncation_fraction > plan.truncation_ceiling)
    throw BudgetExceeded(rep.truncation_fraction, plan.truncation_ceiling);
  return rep;
}

}  // namespace uihp
