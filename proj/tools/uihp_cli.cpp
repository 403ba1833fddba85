// uihp: sampling, map building, ray tracing, estimation and the test battery.
//
// Every run writes one artifact (--out, or uihp_<subcommand>.<ext>) and a sidecar
// <artifact>.meta.json with the seed, version, echoed configuration and wall-clock.
// UIHP_SEED sets the seed when --seed is not given.
//
// Exit codes: 0 pass, 1 criterion failure, 2 usage error, 3 truncation above the ceiling.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uihp/analytics.hpp"
#include "uihp/bdg_map.hpp"
#include "uihp/errors.hpp"
#include "uihp/geodesics.hpp"
#include "uihp/montecarlo.hpp"
#include "uihp/treed_bridge.hpp"
#include "uihp/version.hpp"

using namespace uihp;
using nlohmann::json;

namespace {

constexpr int exit_fail = 1, exit_usage = 2, exit_budget = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  uint64_t seed = 42;
  std::string model = "quad";
  int window = 30;
  int horizon = 10;
  uint64_t replicates = 1000;
  std::size_t budget_steps = 1'000'000;
  std::size_t budget_nodes = 1'000'000;
  int workers = 1;
  std::string format;
  std::string out;
  std::string scale = "quick";
  std::string target;
  int M = 100;
  int grid = 20;
  uint64_t replicate = 0;

  Model model_enum() const { return model == "tri" ? Model::tri : Model::quad; }
  json echo() const {
    return {{"subcommand", subcommand}, {"seed", seed},       {"model", model},
            {"window", window},         {"horizon", horizon}, {"replicates", replicates},
            {"budget_steps", budget_steps}, {"budget_nodes", budget_nodes},
            {"workers", workers},       {"format", format},   {"out", out},
            {"scale", scale},           {"target", target},   {"M", M},
            {"grid", grid},             {"replicate", replicate}};
  }
};

void require_format(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (c.format == f) return;
  std::string list;
  for (const char* f : allowed) list += std::string(list.empty() ? "" : ", ") + f;
  throw UsageError("--format " + c.format + " not available for " + c.subcommand + " (use " + list + ")");
}

json intersections_json(const IntersectionRecord& r) {
  return {{"horizon", r.horizon},     {"r_plus", r.r_plus},         {"r_minus", r.r_minus},
          {"r_plus_min", r.r_plus_min}, {"r_minus_min", r.r_minus_min}};
}

// returns the exit status; writes the artifact body into `os`
int cmd_simulate(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "csv"});
  TreedBridgeWindow w({c.seed, c.replicate}, c.model_enum(), -c.window, c.window,
                      {c.budget_steps, c.budget_nodes});
  if (c.format == "json") {
    os << to_json(w).dump() << '\n';
  } else {
    os << "index,value,graft_nodes\n";
    for (int64_t i = w.lo(); i <= w.hi(); ++i) {
      std::size_t nodes = 0;
      if (i < w.hi() && w.has_graft(i)) {
        const auto& g = w.graft(i).body;
        if (auto t = std::get_if<WellLabeledTree>(&g)) nodes = t->tree.size();
        else if (auto m = std::get_if<Mobile>(&g)) nodes = m->size();
      }
      os << i << ',' << w.value(i) << ',' << nodes << '\n';
    }
  }
  return 0;
}

int cmd_build_map(const RunConfig& c, std::ostream& os) {
  require_format(c, {"dot", "json"});
  TreedBridgeWindow w({c.seed, c.replicate}, c.model_enum(), -c.window, c.window,
                      {c.budget_steps, c.budget_nodes});
  const auto g = build_map(w);
  if (c.format == "dot") write_dot(os, g);
  else os << to_json(g).dump() << '\n';
  return 0;
}

int cmd_trace(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "csv", "ndjson"});
  TreedBridgeWindow w({c.seed, c.replicate}, c.model_enum(), 0, 0, {c.budget_steps, c.budget_nodes});
  prepare_horizon(w, c.horizon);
  const auto cs = build_corner_sequence(w);
  const uint32_t root = cs.root_vertex();
  Rng rng(StreamId{c.seed, c.replicate}, Domain::geodesic, 0);
  const std::vector<GeodesicRay> rays{maximal_geodesic(cs, root, c.horizon),
                                      minimal_geodesic(cs, root, c.horizon),
                                      random_proper_geodesic(cs, root, c.horizon, rng)};
  const auto rec = intersections_by_tracing(cs, c.horizon, true);
  const auto lab = intersections_by_labels(w, c.horizon);
  if (c.format == "csv") {
    os << "ray,step,vertex,label,site,right_boundary,left_boundary\n";
    for (const auto& r : rays) {
      const auto hits = boundary_hits(cs, r);
      for (std::size_t k = 0; k < r.vertices.size(); ++k) {
        const bool R = std::find(hits.right.begin(), hits.right.end(), int(k)) != hits.right.end();
        const bool L = std::find(hits.left.begin(), hits.left.end(), int(k)) != hits.left.end();
        os << ray_kind_name(r.kind) << ',' << k << ',' << r.vertices[k] << ',' << r.labels[k] << ','
           << cs.vertex_site[r.vertices[k]] << ',' << R << ',' << L << '\n';
      }
    }
    return 0;
  }
  json rj = json::array();
  for (const auto& r : rays) rj.push_back(to_json(r));
  json body{{"rays", rj},
            {"tracing", intersections_json(rec)},
            {"labels", intersections_json(lab)},
            {"dual_equal", rec.r_plus == lab.r_plus && rec.r_minus == lab.r_minus}};
  if (c.format == "json") {
    os << body.dump() << '\n';
  } else {
    for (const auto& r : rj) os << json{{"ray", r}}.dump() << '\n';
    os << json{{"tracing", body["tracing"]}, {"labels", body["labels"]}, {"dual_equal", body["dual_equal"]}}.dump()
       << '\n';
  }
  return body["dual_equal"].get<bool>() ? 0 : exit_fail;
}

void write_report(const EstimateReport& r, const std::string& format, std::ostream& os) {
  const json j = to_json(r);
  if (format == "json") {
    os << j.dump() << '\n';
  } else if (format == "ndjson") {
    for (const auto& rec : j["records"]) os << rec.dump() << '\n';
  } else {
    os << "group,param,kind,count,n,estimate,expected,se,truncation,band,pass\n";
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      const auto& e = r.records[k];
      os << '"' << e.group << "\"," << e.param << ',' << j["records"][k]["kind"].get<std::string>() << ','
         << e.count << ',' << e.n << ',' << e.estimate << ',' << e.expected << ',' << e.se << ','
         << e.truncation << ',' << e.band << ',' << e.pass << '\n';
    }
  }
}

int cmd_estimate(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "csv", "ndjson"});
  EstimationPlan p;
  try {
    p.target = target_from_name(c.target.empty() ? "delta_tail" : c.target);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  p.model = c.model_enum();
  p.grid = c.grid;
  p.horizon = c.horizon;
  p.window = c.window;
  p.replicates = c.replicates;
  p.seed = c.seed;
  p.step_budget = c.budget_steps;
  p.node_cap = c.budget_nodes;
  p.workers = c.workers;
  const auto r = run_plan(p);  // BudgetExceeded handled by main
  write_report(r, c.format, os);
  std::cerr << r.target << ": " << (r.pass ? "pass" : "FAIL") << ", truncation " << r.truncation_fraction
            << '\n';
  return r.pass ? 0 : exit_fail;
}

void write_table(const SeriesTable& t, const std::string& format, std::ostream& os) {
  if (format == "csv") write_csv(os, t);
  else os << to_json(t).dump() << '\n';
}

int cmd_solve(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "csv"});
  const std::string t = c.target.empty() ? "nl-system" : c.target;
  if (t == "nl-system") {
    const auto r = verify_nl_uniqueness(c.M);
    SeriesTable tab;
    tab.name = "f";
    tab.provenance = Provenance::recursion;
    for (std::size_t m = 0; m < r.f.size(); ++m) tab.push(double(r.f[m]));
    tab.residual = r.max_error;
    write_table(tab, c.format, os);
    std::cout << "max residual " << r.max_error << " (f(m) vs 1/(m+1), m <= " << c.M << ")\n";
    return r.max_error < 1e-6 ? 0 : exit_fail;
  }
  if (t == "arch") {
    const auto fp = solve_min_label_fixed_point(40 * c.M);
    std::vector<double> h(fp.q.size());
    for (std::size_t m = 1; m < h.size(); ++m) h[m] = 1 - fp.q[m];
    const auto g = solve_arch_recursion(h, c.M);
    write_table(g, c.format, os);
    std::cout << "max residual " << g.residual << '\n';
    return g.residual < 1e-10 ? 0 : exit_fail;
  }
  if (t == "oracle-h") {
    SeriesTable tab;
    tab.name = "h";
    tab.first = 1;
    tab.provenance = Provenance::oracle;
    double err = 0;
    for (int m = 1; m <= c.M; ++m) {
      tab.push(oracle_h(m));
      err = std::max(err, std::fabs(tab.values.back() - closed_h(m)));
    }
    tab.residual = err;
    write_table(tab, c.format, os);
    std::cout << "max deviation from the closed form " << err << '\n';
    return err < 1e-8 ? 0 : exit_fail;
  }
  if (t == "tri-tables") {
    const auto tt = triangular_tables(c.M);
    write_table(tt.f_tilde, c.format, os);
    std::cout << "identity residual " << tt.identity_residual << ", recursion residual "
              << tt.recursion_residual << ", f_tilde gap " << tt.f_tilde_gap << '\n';
    return tt.identity_residual < 1e-12 && tt.recursion_residual < 1e-10 ? 0 : exit_fail;
  }
  throw UsageError("unknown solve target " + t + " (nl-system, arch, oracle-h, tri-tables)");
}

int cmd_export(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "csv"});
  const std::string t = c.target.empty() ? "F" : c.target;
  SeriesTable tab;
  if (t == "U") tab = series_coefficients(Series::U, c.M);
  else if (t == "F") tab = series_coefficients(Series::F, c.M);
  else if (t == "H") tab = series_coefficients(Series::H, c.M);
  else if (t == "f") tab = renewal_deconvolve(membership_table(1, c.M));
  else if (t == "h") tab = renewal_deconvolve(membership_table(3, c.M));
  else throw UsageError("unknown export target " + t + " (U, F, H, f, h)");
  write_table(tab, c.format, os);
  return 0;
}

int cmd_battery(const RunConfig& c, std::ostream& os) {
  require_format(c, {"json", "ndjson"});
  if (c.scale != "quick" && c.scale != "full") throw UsageError("--scale must be quick or full");
  const auto entries = test_battery(c.scale == "full" ? Scale::full : Scale::quick, c.seed, c.workers);
  bool all = true;
  json list = json::array();
  for (const auto& e : entries) {
    all = all && e.pass;
    list.push_back(to_json(e));
    std::cout << (e.pass ? "PASS " : "FAIL ") << e.index << ' ' << e.criterion << " (seed " << e.seed
              << ")\n";
  }
  if (c.format == "json") {
    os << json{{"scale", c.scale}, {"seed", c.seed}, {"pass", all}, {"criteria", list}}.dump() << '\n';
  } else {
    for (const auto& e : list) os << e.dump() << '\n';
  }
  return all ? 0 : exit_fail;
}

std::string default_ext(const std::string& format) { return format == "ndjson" ? "ndjson" : format; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treed bridges, BDG maps and boundary geodesics"};
  app.require_subcommand(1);
  RunConfig c;
  bool seed_given = false;

  auto common = [&](CLI::App* s, const std::string& fmt) {
    c.format = fmt;
    s->add_option("--seed", c.seed, "64-bit seed (env UIHP_SEED when absent)")
        ->each([&](const std::string&) { seed_given = true; });
    s->add_option("--model", c.model, "quad or tri")->check(CLI::IsMember({"quad", "tri"}));
    s->add_option("--window", c.window, "half width of the bridge window")->check(CLI::PositiveNumber);
    s->add_option("--horizon", c.horizon, "ray horizon")->check(CLI::PositiveNumber);
    s->add_option("--replicates", c.replicates, "replicate count")->check(CLI::PositiveNumber);
    s->add_option("--replicate", c.replicate, "replicate index for single-window commands");
    s->add_option("--budget-steps", c.budget_steps, "bridge steps per side")->check(CLI::PositiveNumber);
    s->add_option("--budget-nodes", c.budget_nodes, "nodes per graft")->check(CLI::PositiveNumber);
    s->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--format", c.format, "csv, json, ndjson or dot")
        ->check(CLI::IsMember({"csv", "json", "ndjson", "dot"}));
    s->add_option("--out", c.out, "artifact path");
    s->add_option("--scale", c.scale, "battery scale: quick or full");
    s->add_option("--target", c.target, "estimate/solve/export target");
    s->add_option("--M", c.M, "table size for solve/export")->check(CLI::PositiveNumber);
    s->add_option("--grid", c.grid, "largest m or i for estimate")->check(CLI::PositiveNumber);
  };
  struct Sub {
    const char* name;
    const char* help;
    const char* fmt;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const Sub subs[] = {
      {"simulate", "sample a treed bridge window", "json", cmd_simulate},
      {"build-map", "build the map of a window", "dot", cmd_build_map},
      {"trace", "trace geodesic rays and boundary intersections", "json", cmd_trace},
      {"estimate", "run one Monte Carlo target", "json", cmd_estimate},
      {"solve", "numeric solvers (nl-system, arch, oracle-h, tri-tables)", "csv", cmd_solve},
      {"export", "exact coefficient tables (U, F, H, f, h)", "csv", cmd_export},
      {"battery", "run the acceptance battery", "json", cmd_battery},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handles;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    handles.push_back({sc, &s});
  }
  // options live on each subcommand; defaults for the format differ
  for (auto& [sc, s] : handles) common(sc, s->fmt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  const Sub* chosen = nullptr;
  for (auto& [sc, s] : handles)
    if (sc->parsed()) {
      chosen = s;
      c.subcommand = s->name;
      // the format default was overwritten by the last registration; restore per command
      if (sc->count("--format") == 0) c.format = s->fmt;
    }
  if (!seed_given)
    if (const char* env = std::getenv("UIHP_SEED")) {
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "UIHP_SEED is not an unsigned integer\n";
        return exit_usage;
      }
    }
  if (c.out.empty()) c.out = "uihp_" + c.subcommand + "." + default_ext(c.format);

  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream body;
  int status = 0;
  json outcome;
  try {
    status = chosen->fn(c, body);
    outcome = {{"status", status}};
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return exit_usage;
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << '\n';
    status = exit_budget;
    outcome = {{"status", status}, {"error", e.what()}};
  } catch (const CapExceeded& e) {
    std::cerr << e.what() << '\n';
    status = exit_budget;
    outcome = {{"status", status}, {"error", e.what()}};
  } catch (const Unresolved& e) {
    std::cerr << e.what() << " (raise --budget-steps or lower --horizon)\n";
    status = exit_budget;
    outcome = {{"status", status}, {"error", e.what()}};
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = exit_fail;
    outcome = {{"status", status}, {"error", e.what()}};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << c.out << '\n';
      return exit_usage;
    }
    f << body.str();
  }
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream(c.out + ".meta.json")
      << json{{"version", version},   {"seed", c.seed},       {"config", c.echo()},
              {"outcome", outcome},   {"wall_seconds", wall}, {"started_utc", stamp}}
             .dump(2)
      << '\n';
  return status;
}
