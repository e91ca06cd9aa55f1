#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pitnet/log_scalar.hpp"
#include "pitnet/tensor.hpp"

namespace pitnet {

inline constexpr std::size_t kDefaultMemLimitBytes = std::size_t{2} << 30;  // 2 GiB

class MemoryLimitError : public std::runtime_error {
 public:
  explicit MemoryLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct EngineLimits {
  std::size_t mem_limit_bytes = kDefaultMemLimitBytes;
  static EngineLimits from_env();  // honors PITNET_MEM_LIMIT_BYTES
};

struct ContractionStep {
  int a = -1;  // node ids; a contraction of (a, b) yields the next fresh id
  int b = -1;
};

struct ContractionPlan {
  std::vector<ContractionStep> steps;
  std::size_t peak_bytes = 0;
};

// greedy minimum-intermediate-size pairwise order, ties broken by node id
ContractionPlan plan_closed(const std::vector<Tensor>& nodes,
                            const EngineLimits& limits = EngineLimits::from_env());

// full contraction of a closed network (every label paired); disconnected
// components are contracted separately and multiplied
LogScalar contract_closed(const std::vector<Tensor>& nodes,
                          const EngineLimits& limits = EngineLimits::from_env());

struct LayeredNode {
  Tensor tensor;
  int row = 0;
  int col = 0;
};

// closed network whose bonds connect consecutive rows only
struct LayeredNetwork {
  std::vector<LayeredNode> nodes;
  double log_scale = 0.0;
};

struct ContractionStats {
  Index max_bond = 0;  // largest boundary bond kept after compression
};

// boundary-MPS sweep: absorb one row at a time, keeping each absorbed node's
// remaining legs together as one chain site, then compress every bond under
// `policy`; grouping by source keeps copies of a variable off the chain bonds
LogScalar bmps_contract(const LayeredNetwork& net, const TruncationPolicy& policy,
                        const EngineLimits& limits = EngineLimits::from_env(),
                        ContractionStats* stats = nullptr);

struct OpenFold {
  Tensor tensor;  // the surviving open leg
  double log_scale = 0.0;
};

// same sweep with exactly one unpaired label kept open to the end; all branch
// components share every truncation, so ratios between the folded entries are
// far more stable than between separate sweeps
OpenFold bmps_contract_open(const LayeredNetwork& net, const std::string& open_label,
                            const TruncationPolicy& policy,
                            const EngineLimits& limits = EngineLimits::from_env(),
                            ContractionStats* stats = nullptr);

// per-node environments from one top-down plus one bottom-up sweep;
// contracting env[i] with any tensor carrying node i's legs gives the value
// of the whole network with node i replaced
struct SiteEnvironments {
  std::vector<Tensor> env;
  std::vector<double> log_scale;
  ContractionStats stats;
};

SiteEnvironments site_environments(const LayeredNetwork& net,
                                   const TruncationPolicy& policy,
                                   const EngineLimits& limits = EngineLimits::from_env());

LogScalar env_value(const SiteEnvironments& envs, int node, const Tensor& replacement);

}  // namespace pitnet
