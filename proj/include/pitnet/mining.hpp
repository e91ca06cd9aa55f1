#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitnet/constraint_net.hpp"

namespace pitnet {

// 2D cross-section, weights[row][col] = profit of the block at depth `row`
struct MineInstance {
  int width = 0;
  int depth = 0;
  std::vector<std::vector<double>> weights;
};

struct GridPos {
  int row = 0;
  int col = 0;
};

bool operator<(const GridPos& a, const GridPos& b);
bool operator==(const GridPos& a, const GridPos& b);

struct Solution {
  Bits assignment;  // row-major over excavatable blocks
  double profit = 0.0;
  long long violations = 0;
};

// i.i.d. Normal(0.1, 1) weights, reproducible per (width, depth, seed)
MineInstance generate_instance(int width, int depth, std::uint64_t seed);

// 45-degree pit wall: block (r, c) can ever be excavated iff c >= r and
// c <= width-1-r (and r < depth)
bool excavatable(const MineInstance& inst, int row, int col);

// row-major list of excavatable blocks; positions define the variable ids
std::vector<GridPos> excavatable_blocks(const MineInstance& inst);

// per block below the surface: (parent_left, parent_mid, parent_right, child)
// with the child=1 rows requiring all three parents excavated
std::vector<LocalConstraint> slope_constraints(const MineInstance& inst);

Solution evaluate_solution(const MineInstance& inst, const Bits& assignment);

// exhaustive optimum for <= 24 excavatable blocks; ties resolved toward fewer
// excavated blocks, then the lexicographically smallest assignment
Solution brute_force_oracle(const MineInstance& inst);

TensorNetwork build_mining_network(const MineInstance& inst);

// grid geometry of the network: variable positions and, per constraint, the
// child variable its indicator is absorbed into during layered contraction
struct MiningLayout {
  std::vector<GridPos> blocks;
  std::vector<int> constraint_child;
  int rows = 0;
};

MiningLayout mining_layout(const MineInstance& inst);

std::string instance_to_json(const MineInstance& inst);
MineInstance instance_from_json(const std::string& text);
std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text);

}  // namespace pitnet
