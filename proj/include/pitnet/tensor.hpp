#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pitnet {

// non-fatal diagnostics (e.g. an empty allowed-set) go through here;
// default handler writes to stderr. Returns the previous handler.
using WarningHandler = std::function<void(const std::string&)>;
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

using Index = std::int64_t;

class SvdError : public std::runtime_error {
 public:
  explicit SvdError(const std::string& what) : std::runtime_error(what) {}
};

// Dense real tensor with string-labeled indices, row-major storage over the
// listed index order. Labels are unique within a tensor; extents are >= 1;
// every stored value is finite.
class Tensor {
 public:
  Tensor(std::vector<std::string> labels, std::vector<Index> dims,
         std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<std::string> labels, std::vector<Index> dims);

  int order() const { return static_cast<int>(labels_.size()); }
  Index size() const { return static_cast<Index>(data_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool has_label(const std::string& label) const;
  int label_pos(const std::string& label) const;  // throws if absent
  Index dim(const std::string& label) const;

  double at(const std::vector<Index>& idx) const;
  double& at(const std::vector<Index>& idx);

  // reorder indices to new_order (a permutation of labels())
  Tensor permuted(const std::vector<std::string>& new_order) const;
  Tensor renamed(const std::unordered_map<std::string, std::string>& map) const;
  Tensor renamed_suffix(const std::string& suffix) const;
  // slice: drop `label`, keeping entries with that index == value
  Tensor fixed(const std::string& label, Index value) const;

  double max_abs() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Index> dims_;
  std::vector<double> data_;
};

inline constexpr double kDefaultRelThreshold = 1e-12;

// Bond truncation rule for split_truncated; at least one criterion must be
// set, and when both are, the stricter cut applies.
struct TruncationPolicy {
  std::optional<Index> max_bond;
  std::optional<double> rel_threshold;

  static TruncationPolicy exact() { return {std::nullopt, kDefaultRelThreshold}; }
  static TruncationPolicy bond(Index chi) { return {chi, kDefaultRelThreshold}; }
  void validate() const;
};

// order-k tensor, all extents = dim, 1 iff every index is equal
Tensor delta_tensor(int order, Index dim, std::vector<std::string> labels = {});

// binary indicator: 1 on each tuple in `allowed`, 0 elsewhere; an empty
// allowed set is accepted but warned about (the network contracts to zero)
Tensor indicator_tensor(int arity,
                        const std::vector<std::vector<std::uint8_t>>& allowed,
                        std::vector<std::string> labels = {});

// sum over all shared labels; output carries the non-shared labels of a then
// b in their original relative order; no shared labels means outer product
Tensor contract(const Tensor& a, const Tensor& b);

// entrywise sum; b may carry the same labels in any order
Tensor add(const Tensor& a, const Tensor& b);

struct SplitResult {
  Tensor left;
  Tensor right;
  double truncation_error = 0.0;  // sqrt(discarded sigma^2 / total sigma^2)
  std::string bond_label;
};

// which factor absorbs the singular values in a split; the other side comes
// out an isometry (Balanced spreads sqrt over both)
enum class SingularSide { Balanced, Left, Right };

// SVD split across the bipartition (left_labels | rest), truncated per policy
SplitResult split_truncated(const Tensor& t,
                            const std::vector<std::string>& left_labels,
                            const TruncationPolicy& policy,
                            std::string bond_label = "",
                            SingularSide side = SingularSide::Balanced);

struct ScaleResult {
  Tensor tensor;
  double log_scale = 0.0;
};

// divide by the max-magnitude entry m, return (t/m, log m); error on all-zero
ScaleResult scale_normalize(const Tensor& t);

}  // namespace pitnet
