#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pitnet/bench.hpp"
#include "pitnet/ite.hpp"
#include "pitnet/mining.hpp"

namespace {

// flag-level problems exit 1, anything thrown while running exits 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path);
}

// comma-separated sizes, each entry an integer or an inclusive "a..b" range
std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        sizes.push_back(std::stoi(item));
      } else {
        const int lo = std::stoi(item.substr(0, dots));
        const int hi = std::stoi(item.substr(dots + 2));
        if (hi < lo) throw UsageError("--sizes: empty range " + item);
        for (int v = lo; v <= hi; ++v) sizes.push_back(v);
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("--sizes: cannot parse '" + item + "'");
    } catch (const std::out_of_range&) {
      throw UsageError("--sizes: out of range '" + item + "'");
    }
  }
  for (int v : sizes)
    if (v < 1) throw UsageError("--sizes: sizes must be >= 1");
  return sizes;
}

struct GenFlags {
  int width = 0;
  int depth = 0;  // 0: default to ceil(width/2)
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveFlags {
  std::string instance;
  std::string engine = "exact";
  pitnet::Index chi = 2;
  double tau = 6.0;
  double deg_a = 1.1;
  std::optional<double> deg_b;  // default (a-1)/4
  bool check_oracle = false;
  std::string out;
};

struct OracleFlags {
  std::string instance;
  std::string out;
};

struct BenchFlags {
  std::string sizes;
  int seeds_per_size = 1;
  double tau = 6.0;
  std::string engine;  // empty: sweep exact and bmps
  pitnet::Index chi = 2;
  std::string out = "bench";
};

int cmd_gen(const GenFlags& f) {
  const int depth = f.depth > 0 ? f.depth : (f.width + 1) / 2;
  const auto inst = pitnet::generate_instance(f.width, depth, f.seed);
  const auto text = pitnet::instance_to_json(inst) + "\n";
  if (f.out.empty())
    std::cout << text;
  else
    write_file(f.out, text);
  return 0;
}

// JSON goes to --out when given (summary on stdout), otherwise JSON takes
// stdout and the summary moves to stderr so piping stays clean
std::ostream& emit_solution(const std::string& json, const std::string& out) {
  if (out.empty()) {
    std::cout << json << "\n";
    return std::cerr;
  }
  write_file(out, json + "\n");
  return std::cout;
}

int cmd_solve(const SolveFlags& f) {
  pitnet::SolverConfig cfg;
  cfg.tau = f.tau;
  cfg.engine.kind =
      f.engine == "bmps" ? pitnet::EngineKind::Bmps : pitnet::EngineKind::Exact;
  cfg.engine.chi = f.chi;
  cfg.a = f.deg_a;
  cfg.b = f.deg_b ? *f.deg_b : pitnet::SolverConfig::default_b(f.deg_a);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto inst = pitnet::instance_from_json(read_file(f.instance));
  const auto res = pitnet::solve(inst, cfg);

  auto& os = emit_solution(pitnet::solution_to_json(res.solution), f.out);
  os << std::setprecision(12);
  os << "profit " << res.solution.profit << "\n";
  os << "violations " << res.solution.violations << "\n";
  os << "energy " << res.energy << "\n";
  os << "wall_seconds " << res.wall_seconds << "\n";
  os << "max_bond " << res.stats.max_bond << "\n";
  if (!res.degenerate_sites.empty()) {
    os << "degenerate_sites";
    for (int v : res.degenerate_sites) os << " " << v;
    os << "\n";
  }
  if (f.check_oracle) {
    const auto oracle = pitnet::brute_force_oracle(inst);
    const bool matched = std::abs(res.solution.profit - oracle.profit) <= 1e-9 &&
                         res.solution.violations == 0;
    os << "matched_oracle " << (matched ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_oracle(const OracleFlags& f) {
  const auto inst = pitnet::instance_from_json(read_file(f.instance));
  const auto sol = pitnet::brute_force_oracle(inst);
  auto& os = emit_solution(pitnet::solution_to_json(sol), f.out);
  os << std::setprecision(12);
  os << "profit " << sol.profit << "\n";
  os << "violations " << sol.violations << "\n";
  return 0;
}

int cmd_bench(const BenchFlags& f, bool engine_given) {
  pitnet::BenchOptions opt;
  opt.sizes = parse_sizes(f.sizes);
  opt.seeds_per_size = f.seeds_per_size;
  opt.tau = f.tau;
  if (engine_given) {
    opt.engines = {f.engine == "bmps"
                       ? pitnet::Engine{pitnet::EngineKind::Bmps, f.chi}
                       : pitnet::Engine{pitnet::EngineKind::Exact, 0}};
  } else {
    opt.engines = {{pitnet::EngineKind::Exact, 0},
                   {pitnet::EngineKind::Bmps, f.chi}};
  }
  const auto records = pitnet::run_bench(opt);
  pitnet::write_bench_outputs(records, f.out);
  std::cout << records.size() << " runs -> " << f.out
            << "/{bench.csv,time.svg,profit.svg,violations.svg}\n";
  long long failures = 0;
  for (const auto& r : records)
    if (!r.error.empty()) ++failures;
  if (failures > 0) std::cout << failures << " runs recorded an error\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-network solver for 2D open-pit mining instances"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* sub_gen = app.add_subcommand("gen", "generate a random instance");
  sub_gen->add_option("--width", gen.width, "mine width (blocks)")
      ->required()
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  sub_gen->add_option("--depth", gen.depth, "mine depth, default ceil(width/2)")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  sub_gen->add_option("--seed", gen.seed, "RNG seed");
  sub_gen->add_option("--out", gen.out, "instance JSON path (default stdout)");

  SolveFlags solve;
  auto* sub_solve = app.add_subcommand("solve", "solve an instance");
  sub_solve->add_option("instance", solve.instance, "instance JSON path")
      ->required();
  sub_solve->add_option("--engine", solve.engine, "contraction engine")
      ->check(CLI::IsMember({"exact", "bmps"}));
  sub_solve->add_option("--chi", solve.chi, "bmps max bond dimension")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  sub_solve->add_option("--tau", solve.tau, "imaginary-time step");
  sub_solve->add_option("--deg-a", solve.deg_a,
                        "degeneracy-breaking operator diag(a, -1); 1 disables");
  sub_solve->add_option("--deg-b", solve.deg_b,
                        "decode threshold, default (a-1)/4");
  sub_solve->add_flag("--check-oracle", solve.check_oracle,
                      "compare against the exhaustive optimum (<= 24 blocks)");
  sub_solve->add_option("--out", solve.out, "solution JSON path (default stdout)");

  OracleFlags oracle;
  auto* sub_oracle = app.add_subcommand("oracle", "exhaustive optimum");
  sub_oracle->add_option("instance", oracle.instance, "instance JSON path")
      ->required();
  sub_oracle->add_option("--out", oracle.out,
                         "solution JSON path (default stdout)");

  BenchFlags bench;
  auto* sub_bench = app.add_subcommand("bench", "sweep sizes and engines");
  sub_bench
      ->add_option("--sizes", bench.sizes,
                   "side lengths, e.g. 3..13 or 3,5,7 (depth = ceil(L/2))")
      ->required();
  sub_bench->add_option("--seeds-per-size", bench.seeds_per_size, "seeds per size")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  sub_bench->add_option("--tau", bench.tau, "imaginary-time step");
  sub_bench
      ->add_option("--engine", bench.engine,
                   "restrict the sweep to one engine (default: both)")
      ->check(CLI::IsMember({"exact", "bmps"}));
  sub_bench->add_option("--chi", bench.chi, "bmps max bond dimension")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  sub_bench->add_option("--out", bench.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 1;
  }

  try {
    if (app.got_subcommand(sub_gen)) return cmd_gen(gen);
    if (app.got_subcommand(sub_solve)) return cmd_solve(solve);
    if (app.got_subcommand(sub_oracle)) return cmd_oracle(oracle);
    return cmd_bench(bench, sub_bench->count("--engine") > 0);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
