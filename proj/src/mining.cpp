#include "pitnet/mining.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <random>

namespace pitnet {

namespace {

void check_shape(int width, int depth) {
  if (width < 1) throw std::invalid_argument("mining: width must be >= 1");
  if (depth < 1) throw std::invalid_argument("mining: depth must be >= 1");
}

std::map<GridPos, int> var_index(const MineInstance& inst) {
  std::map<GridPos, int> ix;
  for (const GridPos& p : excavatable_blocks(inst))
    ix.emplace(p, static_cast<int>(ix.size()));
  return ix;
}

}  // namespace

bool operator<(const GridPos& a, const GridPos& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

bool operator==(const GridPos& a, const GridPos& b) {
  return a.row == b.row && a.col == b.col;
}

MineInstance generate_instance(int width, int depth, std::uint64_t seed) {
  check_shape(width, depth);
  MineInstance inst;
  inst.width = width;
  inst.depth = depth;
  std::mt19937_64 rng(seed);
  // Box-Muller on explicit 53-bit uniforms: identical streams across
  // standard library implementations, unlike std::normal_distribution.
  bool have_spare = false;
  double spare = 0.0;
  auto normal = [&]() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 =
        (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;  // (0,1)
    const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;  // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare = r * std::sin(2.0 * M_PI * u2);
    have_spare = true;
    return r * std::cos(2.0 * M_PI * u2);
  };
  inst.weights.assign(static_cast<size_t>(depth),
                      std::vector<double>(static_cast<size_t>(width), 0.0));
  for (int r = 0; r < depth; ++r)
    for (int c = 0; c < width; ++c)
      inst.weights[static_cast<size_t>(r)][static_cast<size_t>(c)] =
          0.1 + normal();
  return inst;
}

bool excavatable(const MineInstance& inst, int row, int col) {
  if (row < 0 || col < 0 || row >= inst.depth || col >= inst.width)
    return false;
  return col >= row && col <= inst.width - 1 - row;
}

std::vector<GridPos> excavatable_blocks(const MineInstance& inst) {
  std::vector<GridPos> blocks;
  for (int r = 0; r < inst.depth; ++r)
    for (int c = 0; c < inst.width; ++c)
      if (excavatable(inst, r, c)) blocks.push_back({r, c});
  return blocks;
}

std::vector<LocalConstraint> slope_constraints(const MineInstance& inst) {
  const auto ix = var_index(inst);
  std::vector<LocalConstraint> constraints;
  for (const GridPos& p : excavatable_blocks(inst)) {
    if (p.row == 0) continue;
    LocalConstraint c;
    for (int dc : {-1, 0, 1}) {
      auto it = ix.find({p.row - 1, p.col + dc});
      if (it == ix.end())
        throw std::logic_error("mining: missing parent block");
      c.scope.push_back(it->second);
    }
    c.scope.push_back(ix.at(p));
    // Child digs only under all three parents: x4 <= x1*x2*x3.
    for (int m = 0; m < 16; ++m) {
      Bits t = {static_cast<std::uint8_t>((m >> 3) & 1),
                static_cast<std::uint8_t>((m >> 2) & 1),
                static_cast<std::uint8_t>((m >> 1) & 1),
                static_cast<std::uint8_t>(m & 1)};
      if (t[3] == 0 || (t[0] && t[1] && t[2])) c.allowed.push_back(std::move(t));
    }
    constraints.push_back(std::move(c));
  }
  return constraints;
}

Solution evaluate_solution(const MineInstance& inst, const Bits& assignment) {
  const auto blocks = excavatable_blocks(inst);
  if (assignment.size() != blocks.size())
    throw std::invalid_argument("evaluate_solution: assignment length mismatch");
  const auto ix = var_index(inst);
  Solution s;
  s.assignment = assignment;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (assignment[i] > 1)
      throw std::invalid_argument("evaluate_solution: non-bit value");
    if (!assignment[i]) continue;
    s.profit += inst.weights[static_cast<size_t>(blocks[i].row)]
                            [static_cast<size_t>(blocks[i].col)];
    if (blocks[i].row == 0) continue;
    for (int dc : {-1, 0, 1}) {
      const int parent = ix.at({blocks[i].row - 1, blocks[i].col + dc});
      if (!assignment[static_cast<size_t>(parent)]) ++s.violations;
    }
  }
  return s;
}

Solution brute_force_oracle(const MineInstance& inst) {
  const auto blocks = excavatable_blocks(inst);
  const int n = static_cast<int>(blocks.size());
  if (n > 24)
    throw std::invalid_argument("brute_force_oracle: more than 24 blocks");
  const auto ix = var_index(inst);
  struct Edge {
    int child, parent;
  };
  std::vector<Edge> edges;
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] = inst.weights[static_cast<size_t>(blocks[i].row)]
                                            [static_cast<size_t>(blocks[i].col)];
    if (blocks[i].row == 0) continue;
    for (int dc : {-1, 0, 1})
      edges.push_back({i, ix.at({blocks[i].row - 1, blocks[i].col + dc})});
  }

  Bits best(static_cast<size_t>(n), 0);
  double best_profit = 0.0;
  int best_count = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    bool ok = true;
    for (const Edge& e : edges)
      if (((mask >> e.child) & 1) && !((mask >> e.parent) & 1)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    double profit = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) {
        profit += w[static_cast<size_t>(i)];
        ++count;
      }
    Bits x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1;
    const bool better =
        profit > best_profit ||
        (profit == best_profit &&
         (count < best_count ||
          (count == best_count &&
           std::lexicographical_compare(x.begin(), x.end(), best.begin(),
                                        best.end()))));
    if (mask == 0 || better) {
      best = std::move(x);
      best_profit = profit;
      best_count = count;
    }
  }
  Solution s;
  s.assignment = std::move(best);
  s.profit = best_profit;
  s.violations = 0;
  return s;
}

TensorNetwork build_mining_network(const MineInstance& inst) {
  const auto blocks = excavatable_blocks(inst);
  return build_network(static_cast<int>(blocks.size()),
                       slope_constraints(inst));
}

MiningLayout mining_layout(const MineInstance& inst) {
  MiningLayout layout;
  layout.blocks = excavatable_blocks(inst);
  layout.rows = 0;
  for (const GridPos& p : layout.blocks)
    layout.rows = std::max(layout.rows, p.row + 1);
  const auto ix = var_index(inst);
  for (const GridPos& p : layout.blocks)
    if (p.row > 0) layout.constraint_child.push_back(ix.at(p));
  return layout;
}

std::string instance_to_json(const MineInstance& inst) {
  nlohmann::json j;
  j["width"] = inst.width;
  j["depth"] = inst.depth;
  j["weights"] = inst.weights;
  return j.dump(2) + "\n";
}

MineInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  MineInstance inst;
  try {
    inst.width = j.at("width").get<int>();
    inst.depth = j.at("depth").get<int>();
    inst.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  check_shape(inst.width, inst.depth);
  if (inst.weights.size() != static_cast<size_t>(inst.depth))
    throw std::invalid_argument("instance: weights row count != depth");
  for (const auto& row : inst.weights) {
    if (row.size() != static_cast<size_t>(inst.width))
      throw std::invalid_argument("instance: weights row length != width");
    for (double v : row)
      if (!std::isfinite(v))
        throw std::invalid_argument("instance: non-finite weight");
  }
  return inst;
}

std::string solution_to_json(const Solution& sol) {
  nlohmann::json j;
  std::string bits;
  for (std::uint8_t b : sol.assignment) bits += static_cast<char>('0' + b);
  j["assignment"] = bits;
  j["profit"] = sol.profit;
  j["violations"] = sol.violations;
  return j.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("solution: ") + e.what());
  }
  Solution s;
  try {
    const std::string bits = j.at("assignment").get<std::string>();
    for (char ch : bits) {
      if (ch != '0' && ch != '1')
        throw std::invalid_argument("solution: bitstring expected");
      s.assignment.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    s.profit = j.at("profit").get<double>();
    s.violations = j.at("violations").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("solution: ") + e.what());
  }
  return s;
}

}  // namespace pitnet
