#pragma once

// Small random layered networks: every bond connects consecutive rows, every
// node below the top row keeps at least one upward leg, and the total bond
// configuration count stays enumerable so oracles::enumerate_closed applies.

#include <random>
#include <string>
#include <vector>

#include "pitnet/engine.hpp"

namespace testnets {

inline pitnet::LayeredNetwork random_layered(std::mt19937_64& rng) {
  using pitnet::Index;
  std::uniform_int_distribution<int> d_rows(1, 4);
  std::uniform_int_distribution<int> d_width(1, 3);
  std::uniform_int_distribution<Index> d_dim(1, 4);
  std::uniform_real_distribution<double> d_val(-1.0, 1.0);

  const int nrows = d_rows(rng);
  std::vector<int> row_size;
  int total = 0;
  for (int r = 0; r < nrows; ++r) {
    int w = d_width(rng);
    w = std::min(w, 10 - total - (nrows - 1 - r));  // keep room, cap 10 nodes
    if (w < 1) w = 1;
    row_size.push_back(w);
    total += w;
  }

  struct Node {
    std::vector<std::string> labels;
    std::vector<Index> dims;
    int row, col;
  };
  std::vector<Node> nodes;
  std::vector<std::vector<int>> by_row(static_cast<size_t>(nrows));
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < row_size[static_cast<size_t>(r)]; ++c) {
      by_row[static_cast<size_t>(r)].push_back(static_cast<int>(nodes.size()));
      nodes.push_back({{}, {}, r, c});
    }

  double combos = 1.0;
  int bond_id = 0;
  auto add_bond = [&](int up, int down, Index dim) {
    const std::string l = "b" + std::to_string(bond_id++);
    nodes[static_cast<size_t>(up)].labels.push_back(l);
    nodes[static_cast<size_t>(up)].dims.push_back(dim);
    nodes[static_cast<size_t>(down)].labels.push_back(l);
    nodes[static_cast<size_t>(down)].dims.push_back(dim);
    combos *= static_cast<double>(dim);
  };
  for (int r = 1; r < nrows; ++r)
    for (int down : by_row[static_cast<size_t>(r)]) {
      const auto& ups = by_row[static_cast<size_t>(r - 1)];
      const int up = ups[std::uniform_int_distribution<size_t>(0, ups.size() - 1)(rng)];
      add_bond(up, down, d_dim(rng));
    }
  // a few extra bonds while the enumeration stays small
  std::uniform_int_distribution<int> d_extra(0, 4);
  for (int k = d_extra(rng); k > 0; --k) {
    if (nrows < 2) break;
    const int r = std::uniform_int_distribution<int>(1, nrows - 1)(rng);
    const auto& ups = by_row[static_cast<size_t>(r - 1)];
    const auto& downs = by_row[static_cast<size_t>(r)];
    const Index dim = d_dim(rng);
    if (combos * static_cast<double>(dim) > 4096.0) break;
    add_bond(ups[std::uniform_int_distribution<size_t>(0, ups.size() - 1)(rng)],
             downs[std::uniform_int_distribution<size_t>(0, downs.size() - 1)(rng)],
             dim);
  }

  pitnet::LayeredNetwork net;
  for (const Node& n : nodes) {
    Index size = 1;
    for (Index d : n.dims) size *= d;
    std::vector<double> data(static_cast<size_t>(size));
    for (double& v : data) v = d_val(rng);
    net.nodes.push_back(
        {pitnet::Tensor(n.labels, n.dims, std::move(data)), n.row, n.col});
  }
  return net;
}

inline std::vector<pitnet::Tensor> tensors_of(const pitnet::LayeredNetwork& net) {
  std::vector<pitnet::Tensor> out;
  for (const auto& n : net.nodes) out.push_back(n.tensor);
  return out;
}

}  // namespace testnets
