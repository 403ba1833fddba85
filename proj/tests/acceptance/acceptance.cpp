// Runs the twelve acceptance criteria at full scale and prints one line per criterion.
// usage: uihp_acceptance [--quick] [--seed N] [--workers N] [--json PATH]

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "uihp/montecarlo.hpp"

using namespace uihp;

int main(int argc, char** argv) {
  Scale scale = Scale::full;
  uint64_t seed = 42;
  int workers = 1;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--quick")) scale = Scale::quick;
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
    else if (!std::strcmp(argv[i], "--workers") && i + 1 < argc) workers = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--json") && i + 1 < argc) json_path = argv[++i];
    else {
      std::fprintf(stderr, "unknown argument %s\n", argv[i]);
      return 2;
    }
  }
  int failed = 0;
  nlohmann::json all = nlohmann::json::array();
  auto report = [&](const BatteryEntry& e) {
    failed += !e.pass;
    std::printf("%s %2d %-22s seed=%llu  (%.1f s)\n", e.pass ? "PASS" : "FAIL", e.index,
                e.criterion.c_str(), static_cast<unsigned long long>(e.seed), e.wall_seconds);
    if (!e.pass) std::printf("     %s\n", e.detail.dump().c_str());
    std::fflush(stdout);
    all.push_back(to_json(e));
  };
  const auto entries = test_battery(scale, seed, workers, TriangularWeights::critical(), {}, report);
  std::printf("%d/%zu criteria passed\n", int(entries.size()) - failed, entries.size());
  if (!json_path.empty()) std::ofstream(json_path) << all.dump(2) << '\n';
  return failed ? 1 : 0;
}
