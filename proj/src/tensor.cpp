#include "pitnet/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>

namespace pitnet {

namespace {

std::mutex g_warn_mutex;
WarningHandler g_warn_handler;

std::vector<Index> strides_of(const std::vector<Index>& dims) {
  std::vector<Index> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
    s[static_cast<size_t>(k)] =
        s[static_cast<size_t>(k) + 1] * dims[static_cast<size_t>(k) + 1];
  return s;
}

Index product(const std::vector<Index>& dims) {
  Index n = 1;
  for (Index d : dims) {
    if (d > 0 && n > (Index{1} << 46) / d)
      throw std::length_error("tensor size overflow");
    n *= d;
  }
  return n;
}

std::vector<std::string> default_labels(int order) {
  std::vector<std::string> l;
  l.reserve(static_cast<size_t>(order));
  for (int k = 0; k < order; ++k) l.push_back("i" + std::to_string(k));
  return l;
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  WarningHandler prev = g_warn_handler;
  g_warn_handler = std::move(handler);
  return prev;
}

void warn(const std::string& message) {
  WarningHandler h;
  {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    h = g_warn_handler;
  }
  if (h)
    h(message);
  else
    std::fprintf(stderr, "pitnet warning: %s\n", message.c_str());
}

Tensor::Tensor(std::vector<std::string> labels, std::vector<Index> dims,
               std::vector<double> data)
    : labels_(std::move(labels)), dims_(std::move(dims)), data_(std::move(data)) {
  if (labels_.size() != dims_.size())
    throw std::invalid_argument("tensor: labels/dims size mismatch");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size())
    throw std::invalid_argument("tensor: duplicate label");
  for (Index d : dims_)
    if (d < 1) throw std::invalid_argument("tensor: extent must be >= 1");
  if (static_cast<Index>(data_.size()) != product(dims_))
    throw std::invalid_argument("tensor: data size does not match dims");
  for (double v : data_)
    if (!std::isfinite(v)) throw std::invalid_argument("tensor: non-finite value");
}

Tensor Tensor::scalar(double v) { return Tensor({}, {}, {v}); }

Tensor Tensor::zeros(std::vector<std::string> labels, std::vector<Index> dims) {
  const Index n = product(dims);
  return Tensor(std::move(labels), std::move(dims),
                std::vector<double>(static_cast<size_t>(n), 0.0));
}

bool Tensor::has_label(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

int Tensor::label_pos(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw std::invalid_argument("tensor: no label " + label);
  return static_cast<int>(it - labels_.begin());
}

Index Tensor::dim(const std::string& label) const {
  return dims_[static_cast<size_t>(label_pos(label))];
}

double Tensor::at(const std::vector<Index>& idx) const {
  return const_cast<Tensor*>(this)->at(idx);
}

double& Tensor::at(const std::vector<Index>& idx) {
  if (idx.size() != dims_.size())
    throw std::invalid_argument("tensor: index arity mismatch");
  const auto s = strides_of(dims_);
  Index flat = 0;
  for (size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= dims_[k])
      throw std::out_of_range("tensor: index out of range");
    flat += idx[k] * s[k];
  }
  return data_[static_cast<size_t>(flat)];
}

Tensor Tensor::permuted(const std::vector<std::string>& new_order) const {
  if (new_order == labels_) return *this;
  if (new_order.size() != labels_.size())
    throw std::invalid_argument("permute: wrong number of labels");
  std::vector<int> src(new_order.size());  // output axis -> input axis
  for (size_t k = 0; k < new_order.size(); ++k)
    src[k] = label_pos(new_order[k]);
  std::set<int> uniq(src.begin(), src.end());
  if (uniq.size() != src.size())
    throw std::invalid_argument("permute: repeated label");

  std::vector<Index> out_dims(new_order.size());
  for (size_t k = 0; k < src.size(); ++k)
    out_dims[k] = dims_[static_cast<size_t>(src[k])];
  const auto out_strides = strides_of(out_dims);
  // stride in the output for each *input* axis
  std::vector<Index> out_stride_of_in(dims_.size());
  for (size_t k = 0; k < src.size(); ++k)
    out_stride_of_in[static_cast<size_t>(src[k])] = out_strides[k];

  std::vector<double> out(data_.size());
  std::vector<Index> idx(dims_.size(), 0);
  Index out_flat = 0;
  for (size_t in_flat = 0; in_flat < data_.size(); ++in_flat) {
    out[static_cast<size_t>(out_flat)] = data_[in_flat];
    for (int k = static_cast<int>(dims_.size()) - 1; k >= 0; --k) {
      const auto ks = static_cast<size_t>(k);
      if (++idx[ks] < dims_[ks]) {
        out_flat += out_stride_of_in[ks];
        break;
      }
      idx[ks] = 0;
      out_flat -= out_stride_of_in[ks] * (dims_[ks] - 1);
    }
  }
  return Tensor(new_order, std::move(out_dims), std::move(out));
}

Tensor Tensor::renamed(const std::unordered_map<std::string, std::string>& map) const {
  std::vector<std::string> labels = labels_;
  for (auto& l : labels) {
    auto it = map.find(l);
    if (it != map.end()) l = it->second;
  }
  return Tensor(std::move(labels), dims_, data_);
}

Tensor Tensor::renamed_suffix(const std::string& suffix) const {
  std::vector<std::string> labels = labels_;
  for (auto& l : labels) l += suffix;
  return Tensor(std::move(labels), dims_, data_);
}

Tensor Tensor::fixed(const std::string& label, Index value) const {
  const int pos = label_pos(label);
  if (value < 0 || value >= dims_[static_cast<size_t>(pos)])
    throw std::out_of_range("fixed: value out of range");
  std::vector<std::string> out_labels;
  std::vector<Index> out_dims;
  for (size_t k = 0; k < labels_.size(); ++k)
    if (static_cast<int>(k) != pos) {
      out_labels.push_back(labels_[k]);
      out_dims.push_back(dims_[k]);
    }
  const auto s = strides_of(dims_);
  // the sliced axis contributes a constant offset; copy contiguous blocks
  const Index inner = s[static_cast<size_t>(pos)];
  const Index offset = value * inner;
  const Index block = inner;                      // entries per inner block
  const Index outer = size() / (dims_[static_cast<size_t>(pos)] * inner);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(outer * block));
  for (Index o = 0; o < outer; ++o) {
    const Index base = o * dims_[static_cast<size_t>(pos)] * inner + offset;
    out.insert(out.end(), data_.begin() + base, data_.begin() + base + block);
  }
  return Tensor(std::move(out_labels), std::move(out_dims), std::move(out));
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

void TruncationPolicy::validate() const {
  if (!max_bond && !rel_threshold)
    throw std::invalid_argument("truncation policy: no criterion set");
  if (max_bond && *max_bond < 1)
    throw std::invalid_argument("truncation policy: max_bond must be >= 1");
  if (rel_threshold && (*rel_threshold < 0.0 || !std::isfinite(*rel_threshold)))
    throw std::invalid_argument("truncation policy: bad rel_threshold");
}

Tensor delta_tensor(int order, Index dim, std::vector<std::string> labels) {
  if (order < 1) throw std::invalid_argument("delta: order must be >= 1");
  if (dim < 2) throw std::invalid_argument("delta: dim must be >= 2");
  if (labels.empty()) labels = default_labels(order);
  if (static_cast<int>(labels.size()) != order)
    throw std::invalid_argument("delta: wrong label count");
  Tensor t = Tensor::zeros(std::move(labels), std::vector<Index>(order, dim));
  Index stride_sum = 0;
  Index s = 1;
  for (int k = 0; k < order; ++k) {
    stride_sum += s;
    s *= dim;
  }
  for (Index v = 0; v < dim; ++v)
    t.data()[static_cast<size_t>(v * stride_sum)] = 1.0;
  return t;
}

Tensor indicator_tensor(int arity,
                        const std::vector<std::vector<std::uint8_t>>& allowed,
                        std::vector<std::string> labels) {
  if (arity < 1) throw std::invalid_argument("indicator: arity must be >= 1");
  if (labels.empty()) labels = default_labels(arity);
  if (static_cast<int>(labels.size()) != arity)
    throw std::invalid_argument("indicator: wrong label count");
  if (allowed.empty())
    warn("indicator tensor with empty allowed set; any network containing it "
         "contracts to zero");
  Tensor t = Tensor::zeros(std::move(labels), std::vector<Index>(arity, 2));
  std::set<Index> seen;
  for (const auto& tup : allowed) {
    if (static_cast<int>(tup.size()) != arity)
      throw std::invalid_argument("indicator: tuple arity mismatch");
    Index flat = 0;
    for (std::uint8_t bit : tup) {
      if (bit > 1) throw std::invalid_argument("indicator: non-bit value");
      flat = flat * 2 + bit;
    }
    if (!seen.insert(flat).second)
      throw std::invalid_argument("indicator: duplicate tuple");
    t.data()[static_cast<size_t>(flat)] = 1.0;
  }
  return t;
}

Tensor contract(const Tensor& a, const Tensor& b) {
  std::vector<std::string> shared, free_a, free_b;
  for (const auto& l : a.labels())
    (b.has_label(l) ? shared : free_a).push_back(l);
  for (const auto& l : b.labels())
    if (!a.has_label(l)) free_b.push_back(l);
  for (const auto& l : shared)
    if (a.dim(l) != b.dim(l))
      throw std::invalid_argument("contract: extent mismatch on label " + l);

  std::vector<std::string> a_order = free_a;
  a_order.insert(a_order.end(), shared.begin(), shared.end());
  std::vector<std::string> b_order = shared;
  b_order.insert(b_order.end(), free_b.begin(), free_b.end());
  const Tensor ap = a.permuted(a_order);
  const Tensor bp = b.permuted(b_order);

  Index m = 1, k = 1, n = 1;
  std::vector<std::string> out_labels = free_a;
  std::vector<Index> out_dims;
  for (const auto& l : free_a) {
    out_dims.push_back(a.dim(l));
    m *= a.dim(l);
  }
  for (const auto& l : shared) k *= a.dim(l);
  out_labels.insert(out_labels.end(), free_b.begin(), free_b.end());
  for (const auto& l : free_b) {
    out_dims.push_back(b.dim(l));
    n *= b.dim(l);
  }
  if (m > 0 && n > (Index{1} << 46) / m)
    throw std::length_error("contract: result too large");

  std::vector<double> out(static_cast<size_t>(m * n));
  Eigen::Map<const RowMat> ma(ap.data().data(), m, k);
  Eigen::Map<const RowMat> mb(bp.data().data(), k, n);
  Eigen::Map<RowMat> mc(out.data(), m, n);
  mc.noalias() = ma * mb;
  return Tensor(std::move(out_labels), std::move(out_dims), std::move(out));
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("add: label sets differ");
  for (const auto& l : a.labels())
    if (!b.has_label(l)) throw std::invalid_argument("add: label sets differ");
  const Tensor bp = b.permuted(a.labels());
  if (bp.dims() != a.dims()) throw std::invalid_argument("add: extent mismatch");
  std::vector<double> out = a.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bp.data()[i];
  return Tensor(a.labels(), a.dims(), std::move(out));
}

SplitResult split_truncated(const Tensor& t,
                            const std::vector<std::string>& left_labels,
                            const TruncationPolicy& policy,
                            std::string bond_label, SingularSide side) {
  policy.validate();
  if (left_labels.empty() ||
      left_labels.size() >= static_cast<size_t>(t.order()))
    throw std::invalid_argument("split: left labels must be a nonempty proper subset");
  std::set<std::string> left_set(left_labels.begin(), left_labels.end());
  if (left_set.size() != left_labels.size())
    throw std::invalid_argument("split: duplicate left label");
  for (const auto& l : left_labels)
    if (!t.has_label(l)) throw std::invalid_argument("split: unknown label " + l);
  std::vector<std::string> right_labels;
  for (const auto& l : t.labels())
    if (!left_set.count(l)) right_labels.push_back(l);

  if (bond_label.empty()) {
    for (int k = 0;; ++k) {
      std::string cand = "s" + std::to_string(k);
      if (!t.has_label(cand)) {
        bond_label = cand;
        break;
      }
    }
  } else if (t.has_label(bond_label)) {
    throw std::invalid_argument("split: bond label collides with " + bond_label);
  }

  std::vector<std::string> order = left_labels;
  order.insert(order.end(), right_labels.begin(), right_labels.end());
  const Tensor tp = t.permuted(order);

  Index m = 1, n = 1;
  std::vector<Index> left_dims, right_dims;
  for (const auto& l : left_labels) {
    left_dims.push_back(t.dim(l));
    m *= t.dim(l);
  }
  for (const auto& l : right_labels) {
    right_dims.push_back(t.dim(l));
    n *= t.dim(l);
  }

  Eigen::MatrixXd mat = Eigen::Map<const RowMat>(tp.data().data(), m, n);
  // two-sided Jacobi: slower than divide-and-conquer but immune to the
  // clustered/zero singular values our 0-1 structured tensors produce
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!sv.allFinite() || !svd.matrixU().allFinite() || !svd.matrixV().allFinite())
    throw SvdError("split: SVD did not converge");

  const Index full = sv.size();
  Index keep = full;
  if (policy.rel_threshold) {
    const double cut = *policy.rel_threshold * sv(0);
    keep = 0;
    for (Index i = 0; i < full; ++i)
      if (sv(i) >= cut && sv(i) > 0.0) ++keep;
    if (keep == 0) keep = 1;
  }
  if (policy.max_bond) keep = std::min(keep, *policy.max_bond);

  double total = 0.0, discarded = 0.0;
  for (Index i = 0; i < full; ++i) {
    const double s2 = sv(i) * sv(i);
    total += s2;
    if (i >= keep) discarded += s2;
  }
  const double err = total > 0.0 ? std::sqrt(discarded / total) : 0.0;

  std::vector<double> ldata(static_cast<size_t>(m * keep));
  std::vector<double> rdata(static_cast<size_t>(keep * n));
  for (Index j = 0; j < keep; ++j) {
    const double root = std::sqrt(sv(j));
    const double lw = side == SingularSide::Left
                          ? sv(j)
                          : (side == SingularSide::Balanced ? root : 1.0);
    const double rw = side == SingularSide::Right
                          ? sv(j)
                          : (side == SingularSide::Balanced ? root : 1.0);
    for (Index i = 0; i < m; ++i)
      ldata[static_cast<size_t>(i * keep + j)] = svd.matrixU()(i, j) * lw;
    for (Index i = 0; i < n; ++i)
      rdata[static_cast<size_t>(j * n + i)] = svd.matrixV()(i, j) * rw;
  }

  std::vector<std::string> llabels = left_labels;
  llabels.push_back(bond_label);
  left_dims.push_back(keep);
  std::vector<std::string> rlabels = {bond_label};
  rlabels.insert(rlabels.end(), right_labels.begin(), right_labels.end());
  right_dims.insert(right_dims.begin(), keep);

  return SplitResult{Tensor(std::move(llabels), std::move(left_dims), std::move(ldata)),
                     Tensor(std::move(rlabels), std::move(right_dims), std::move(rdata)),
                     err, bond_label};
}

ScaleResult scale_normalize(const Tensor& t) {
  const double m = t.max_abs();
  if (m == 0.0)
    throw std::invalid_argument("scale_normalize: all-zero tensor");
  std::vector<double> out = t.data();
  for (double& v : out) v /= m;
  return ScaleResult{Tensor(t.labels(), t.dims(), std::move(out)), std::log(m)};
}

}  // namespace pitnet
