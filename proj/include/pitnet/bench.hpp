#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pitnet/ite.hpp"

namespace pitnet {

struct BenchRecord {
  int width = 0;
  int depth = 0;
  std::uint64_t seed = 0;
  std::string engine;  // "exact" or "bmps"
  std::optional<Index> chi;
  double tau = 6.0;
  double wall_time_seconds = 0.0;
  double profit = 0.0;
  std::optional<double> normalized_profit;
  long long violations = 0;
  std::optional<bool> matched_oracle;
  std::string reference;  // "oracle" or "exact"; empty when unavailable
  std::string error;      // empty on success; failed runs keep the sweep going
  Index max_bond = 0;
};

struct BenchOptions {
  std::vector<int> sizes;  // side lengths; depth = ceil(L/2)
  int seeds_per_size = 1;
  std::vector<Engine> engines = {{EngineKind::Exact, 0}, {EngineKind::Bmps, 2}};
  double tau = 6.0;
};

std::vector<BenchRecord> run_bench(const BenchOptions& opt,
                                   const EngineLimits& limits = EngineLimits::from_env());

std::string bench_csv(const std::vector<BenchRecord>& records);
std::string bench_svg_time(const std::vector<BenchRecord>& records);
std::string bench_svg_profit(const std::vector<BenchRecord>& records);
std::string bench_svg_violations(const std::vector<BenchRecord>& records);

// bench.csv, time.svg, profit.svg, violations.svg under out_dir
void write_bench_outputs(const std::vector<BenchRecord>& records,
                         const std::string& out_dir);

}  // namespace pitnet
