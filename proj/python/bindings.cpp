// Python bindings. Structured results cross the boundary as JSON text and are
// decoded on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uihp/analytics.hpp"
#include "uihp/bdg_map.hpp"
#include "uihp/errors.hpp"
#include "uihp/geodesics.hpp"
#include "uihp/montecarlo.hpp"
#include "uihp/treed_bridge.hpp"
#include "uihp/version.hpp"

#include <sstream>

namespace py = pybind11;
using namespace uihp;
using nlohmann::json;

namespace {

Model model_of(const std::string& m) {
  if (m == "quad") return Model::quad;
  if (m == "tri") return Model::tri;
  throw std::invalid_argument("model must be quad or tri");
}

EstimationPlan plan_from_json(const std::string& text) {
  const auto j = json::parse(text);
  EstimationPlan p;
  p.target = target_from_name(j.value("target", std::string("delta_tail")));
  p.model = model_of(j.value("model", std::string("quad")));
  p.grid = j.value("grid", p.grid);
  p.horizon = j.value("horizon", p.horizon);
  p.window = j.value("window", p.window);
  p.replicates = j.value("replicates", p.replicates);
  p.min_determined = j.value("min_determined", p.min_determined);
  p.seed = j.value("seed", p.seed);
  p.step_budget = j.value("step_budget", p.step_budget);
  p.node_cap = j.value("node_cap", p.node_cap);
  p.workers = j.value("workers", p.workers);
  p.truncation_ceiling = j.value("truncation_ceiling", p.truncation_ceiling);
  return p;
}

json table_json(const SeriesTable& t) { return to_json(t); }

}  // namespace

PYBIND11_MODULE(_uihp, m) {
  m.doc() = "treed bridges, BDG maps, boundary geodesics";
  m.attr("__version__") = version;

  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);
  py::register_exception<Unresolved>(m, "Unresolved", PyExc_RuntimeError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<NoConvergence>(m, "NoConvergence", PyExc_RuntimeError);

  m.def("oracle_h", [](int mm) { return oracle_h(mm); }, py::arg("m"));
  m.def("closed_h", &closed_h, py::arg("m"));
  m.def("min_label_tail", [](int M) { return solve_min_label_fixed_point(M).q; }, py::arg("M"),
        "P(D >= d), d = 0..M, from the fixed-point system");
  m.def("nl_system_json", [](int M) {
    const auto r = verify_nl_uniqueness(M);
    std::vector<double> f(r.f.begin(), r.f.end());
    return json{{"x_star", double(r.x_star)}, {"max_error", r.max_error}, {"ordering", r.ordering},
                {"pairs", r.pairs}, {"f", f}}.dump();
  }, py::arg("M"));
  m.def("series_json", [](const std::string& which, int N) {
    if (which == "U") return table_json(series_coefficients(Series::U, N)).dump();
    if (which == "F") return table_json(series_coefficients(Series::F, N)).dump();
    if (which == "H") return table_json(series_coefficients(Series::H, N)).dump();
    if (which == "f") return table_json(renewal_deconvolve(membership_table(1, N))).dump();
    if (which == "h") return table_json(renewal_deconvolve(membership_table(3, N))).dump();
    throw std::invalid_argument("series must be U, F, H, f or h");
  }, py::arg("which"), py::arg("N"));
  m.def("tail_trend_json", [](const std::vector<int>& pts) {
    const auto t = tail_trend(pts);
    return json{{"m", t.m}, {"f_scaled", t.f_scaled}, {"h_over_f", t.h_over_f}, {"error", t.error},
                {"f_increasing", t.f_increasing}, {"ratio_approaching", t.ratio_approaching}}.dump();
  }, py::arg("points"));
  m.def("triangular_json", [](int M) {
    const auto t = triangular_tables(M);
    return json{{"identity_residual", t.identity_residual}, {"recursion_residual", t.recursion_residual},
                {"oracle_gap", t.oracle_gap}, {"f_tilde_gap", t.f_tilde_gap},
                {"delta_prime_gap", t.delta_prime_gap}, {"f_tilde", t.f_tilde.values}}.dump();
  }, py::arg("M"));

  m.def("window_json", [](uint64_t seed, uint64_t replicate, const std::string& model, int64_t lo,
                          int64_t hi, std::size_t steps, std::size_t nodes) {
    TreedBridgeWindow w({seed, replicate}, model_of(model), lo, hi, {steps, nodes});
    return to_json(w).dump();
  }, py::arg("seed"), py::arg("replicate"), py::arg("model"), py::arg("lo"), py::arg("hi"),
        py::arg("step_budget") = default_step_budget, py::arg("node_cap") = std::size_t(1'000'000));

  m.def("map_export", [](uint64_t seed, uint64_t replicate, const std::string& model, int window,
                         const std::string& format) {
    TreedBridgeWindow w({seed, replicate}, model_of(model), -window, window, {default_step_budget, 1'000'000});
    const auto g = build_map(w);
    if (format == "dot") {
      std::ostringstream os;
      write_dot(os, g);
      return os.str();
    }
    return to_json(g).dump();
  }, py::arg("seed"), py::arg("replicate"), py::arg("model"), py::arg("window"), py::arg("format") = "json");

  m.def("face_census", [](uint64_t seed, uint64_t replicate, const std::string& model, int window) {
    TreedBridgeWindow w({seed, replicate}, model_of(model), -window, window, {default_step_budget, 1'000'000});
    const auto fc = face_census(build_map(w));
    return std::make_pair(fc.by_degree, fc.closed);
  }, py::arg("seed"), py::arg("replicate"), py::arg("model"), py::arg("window"));

  m.def("trace_json", [](uint64_t seed, uint64_t replicate, const std::string& model, int horizon) {
    TreedBridgeWindow w({seed, replicate}, model_of(model), 0, 0, {default_step_budget, 1'000'000});
    prepare_horizon(w, horizon);
    const auto cs = build_corner_sequence(w);
    const uint32_t root = cs.root_vertex();
    Rng rng(StreamId{seed, replicate}, Domain::geodesic, 0);
    json rays = json::array({to_json(maximal_geodesic(cs, root, horizon)),
                             to_json(minimal_geodesic(cs, root, horizon)),
                             to_json(random_proper_geodesic(cs, root, horizon, rng))});
    const auto t = intersections_by_tracing(cs, horizon, true);
    const auto l = intersections_by_labels(w, horizon);
    return json{{"rays", rays},
                {"tracing", {{"r_plus", t.r_plus}, {"r_minus", t.r_minus},
                             {"r_plus_min", t.r_plus_min}, {"r_minus_min", t.r_minus_min}}},
                {"labels", {{"r_plus", l.r_plus}, {"r_minus", l.r_minus}}}}.dump();
  }, py::arg("seed"), py::arg("replicate"), py::arg("model"), py::arg("horizon"));

  m.def("membership", [](const std::vector<int>& d, int complete, int n) {
    const auto v = membership(d, complete, n);
    return std::vector<int>(v.begin(), v.end());
  }, py::arg("delta"), py::arg("complete"), py::arg("n"));

  m.def("target_names", &target_names);
  m.def("run_plan_json", [](const std::string& plan, bool check_ceiling) {
    const auto p = plan_from_json(plan);
    py::gil_scoped_release nogil;
    const auto r = check_ceiling ? run_plan(p) : run_plan_unchecked(p);
    return to_json(r).dump();
  }, py::arg("plan"), py::arg("check_ceiling") = true);
  m.def("battery_json", [](const std::string& scale, uint64_t seed, int workers, const std::vector<int>& only) {
    py::gil_scoped_release nogil;
    json out = json::array();
    for (const auto& e : test_battery(scale == "full" ? Scale::full : Scale::quick, seed, workers,
                                      TriangularWeights::critical(), only))
      out.push_back(to_json(e));
    return out.dump();
  }, py::arg("scale") = "quick", py::arg("seed") = 42, py::arg("workers") = 1,
        py::arg("only") = std::vector<int>{});
}
