#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitnet/tensor.hpp"

namespace pitnet {

using Bits = std::vector<std::uint8_t>;

// constraint over a tuple of variables: the assignment restricted to `scope`
// must be one of `allowed`
struct LocalConstraint {
  std::vector<int> scope;
  std::vector<Bits> allowed;
};

inline constexpr int kMaxScope = 20;

struct PhysicalSite {
  int tensor = -1;
  std::string label;
};

// copy/delta tensor per variable, indicator tensor per constraint, one shared
// virtual label per (constraint, scope position)
struct TensorNetwork {
  int n_vars = 0;
  std::vector<Tensor> tensors;
  std::vector<PhysicalSite> physical;  // indexed by variable id
  double log_scale = 0.0;              // accumulated normalization
};

std::string physical_label(int var);
std::string bond_label(int constraint, int scope_pos);

TensorNetwork build_network(int n_vars,
                            const std::vector<LocalConstraint>& constraints);

// structural invariants: virtual labels appear exactly twice with matching
// extents, physical labels once with extent 2; throws on violation
void validate_network(const TensorNetwork& net);

// contraction value with all physical legs fixed to `assignment`
double amplitude(const TensorNetwork& net, const Bits& assignment);

struct ConstraintSpec {
  int n_vars = 0;
  std::vector<LocalConstraint> constraints;
};

std::string constraint_spec_to_json(const ConstraintSpec& spec);
ConstraintSpec constraint_spec_from_json(const std::string& text);

}  // namespace pitnet
