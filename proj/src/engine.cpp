#include "pitnet/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace pitnet {

namespace {

std::size_t bytes_of(Index entries) { return static_cast<std::size_t>(entries) * sizeof(double); }

void check_limit(Index entries, const EngineLimits& limits, const char* what) {
  if (bytes_of(entries) > limits.mem_limit_bytes)
    throw MemoryLimitError(std::string(what) + ": intermediate of " +
                           std::to_string(bytes_of(entries)) +
                           " bytes exceeds the memory ceiling of " +
                           std::to_string(limits.mem_limit_bytes) +
                           " bytes; use the bmps engine or lower chi");
}

struct MetaNode {
  std::vector<std::string> labels;
  std::map<std::string, Index> dims;
  bool alive = true;
};

// size of the pairwise contraction output (non-shared legs of both)
Index meta_out_entries(const MetaNode& a, const MetaNode& b) {
  Index n = 1;
  for (const auto& l : a.labels)
    if (!b.dims.count(l)) n *= a.dims.at(l);
  for (const auto& l : b.labels)
    if (!a.dims.count(l)) n *= b.dims.at(l);
  return n;
}

bool meta_share(const MetaNode& a, const MetaNode& b) {
  for (const auto& l : a.labels)
    if (b.dims.count(l)) return true;
  return false;
}

MetaNode meta_merge(const MetaNode& a, const MetaNode& b) {
  MetaNode out;
  for (const auto& l : a.labels)
    if (!b.dims.count(l)) {
      out.labels.push_back(l);
      out.dims[l] = a.dims.at(l);
    }
  for (const auto& l : b.labels)
    if (!a.dims.count(l)) {
      out.labels.push_back(l);
      out.dims[l] = b.dims.at(l);
    }
  return out;
}

}  // namespace

EngineLimits EngineLimits::from_env() {
  EngineLimits lim;
  if (const char* s = std::getenv("PITNET_MEM_LIMIT_BYTES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0)
      lim.mem_limit_bytes = static_cast<std::size_t>(v);
    else
      warn("ignoring malformed PITNET_MEM_LIMIT_BYTES");
  }
  return lim;
}

ContractionPlan plan_closed(const std::vector<Tensor>& nodes,
                            const EngineLimits& limits) {
  std::map<std::string, int> label_count;
  for (const auto& t : nodes)
    for (const auto& l : t.labels()) label_count[l]++;
  for (const auto& [l, c] : label_count)
    if (c != 2)
      throw std::invalid_argument("plan_closed: label " + l +
                                  " does not appear exactly twice");

  std::vector<MetaNode> meta;
  for (const auto& t : nodes) {
    MetaNode m;
    m.labels = t.labels();
    for (size_t k = 0; k < t.labels().size(); ++k) m.dims[t.labels()[k]] = t.dims()[k];
    meta.push_back(std::move(m));
  }

  ContractionPlan plan;
  int alive = static_cast<int>(meta.size());
  while (alive > 1) {
    int best_a = -1, best_b = -1;
    Index best_size = 0;
    bool found_shared = false;
    for (int i = 0; i < static_cast<int>(meta.size()); ++i) {
      if (!meta[static_cast<size_t>(i)].alive) continue;
      for (int j = i + 1; j < static_cast<int>(meta.size()); ++j) {
        if (!meta[static_cast<size_t>(j)].alive) continue;
        const bool share =
            meta_share(meta[static_cast<size_t>(i)], meta[static_cast<size_t>(j)]);
        if (found_shared && !share) continue;
        const Index sz =
            meta_out_entries(meta[static_cast<size_t>(i)], meta[static_cast<size_t>(j)]);
        const bool better =
            (share && !found_shared) || best_a < 0 || sz < best_size;
        if (better) {
          best_a = i;
          best_b = j;
          best_size = sz;
          found_shared = found_shared || share;
        }
      }
    }
    check_limit(best_size, limits, "plan_closed");
    plan.steps.push_back({best_a, best_b});
    plan.peak_bytes = std::max(plan.peak_bytes, bytes_of(best_size));
    MetaNode merged = meta_merge(meta[static_cast<size_t>(best_a)],
                                 meta[static_cast<size_t>(best_b)]);
    meta[static_cast<size_t>(best_a)].alive = false;
    meta[static_cast<size_t>(best_b)].alive = false;
    meta.push_back(std::move(merged));
    --alive;
  }
  return plan;
}

LogScalar contract_closed(const std::vector<Tensor>& nodes,
                          const EngineLimits& limits) {
  if (nodes.empty()) return {1.0, 0.0};
  const ContractionPlan plan = plan_closed(nodes, limits);

  std::vector<std::optional<Tensor>> pool;
  pool.reserve(nodes.size() * 2);
  for (const auto& t : nodes) pool.emplace_back(t);
  double log = 0.0;
  for (const auto& step : plan.steps) {
    Tensor merged = contract(*pool[static_cast<size_t>(step.a)],
                             *pool[static_cast<size_t>(step.b)]);
    pool[static_cast<size_t>(step.a)].reset();
    pool[static_cast<size_t>(step.b)].reset();
    if (merged.max_abs() == 0.0) return {0.0, 0.0};
    auto [norm, ls] = scale_normalize(merged);
    log += ls;
    pool.emplace_back(std::move(norm));
  }
  const Tensor& last = *pool.back();
  if (last.order() != 0)
    throw std::invalid_argument("contract_closed: network is not closed");
  return {last.data()[0], log};
}

namespace {

struct LayerIndex {
  std::vector<std::vector<int>> rows;  // node ids per row, col order
  // label -> the two nodes holding it
  std::map<std::string, std::pair<int, int>> ends;
};

LayerIndex index_layers(const LayeredNetwork& net, const std::string& open = {}) {
  LayerIndex ix;
  std::map<std::string, std::vector<int>> holders;
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i)
    for (const auto& l : net.nodes[static_cast<size_t>(i)].tensor.labels())
      holders[l].push_back(i);

  std::map<int, std::vector<int>> by_row;
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i)
    by_row[net.nodes[static_cast<size_t>(i)].row].push_back(i);
  std::map<int, int> row_rank;
  for (const auto& [r, ids] : by_row) {
    row_rank[r] = static_cast<int>(ix.rows.size());
    std::vector<int> sorted = ids;
    std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      return net.nodes[static_cast<size_t>(a)].col < net.nodes[static_cast<size_t>(b)].col;
    });
    ix.rows.push_back(std::move(sorted));
  }

  for (const auto& [l, hs] : holders) {
    if (l == open) {
      if (hs.size() != 1)
        throw std::invalid_argument("bmps: open label " + l +
                                    " appears on more than one node");
      continue;
    }
    if (hs.size() != 2)
      throw std::invalid_argument("bmps: label " + l + " does not appear exactly twice");
    const int ra = row_rank.at(net.nodes[static_cast<size_t>(hs[0])].row);
    const int rb = row_rank.at(net.nodes[static_cast<size_t>(hs[1])].row);
    if (std::abs(ra - rb) != 1)
      throw std::invalid_argument("bmps: bond " + l +
                                  " does not connect consecutive rows");
    ix.ends[l] = {hs[0], hs[1]};
  }
  if (!open.empty() && !holders.count(open))
    throw std::invalid_argument("bmps: open label " + open + " not present");
  return ix;
}

struct Boundary {
  std::vector<Tensor> sites;  // 1:1 with the row it targets
  double log = 0.0;
  bool zero = false;
};

class Sweeper {
 public:
  Sweeper(const LayeredNetwork& net, const LayerIndex& ix,
          const TruncationPolicy& policy, const EngineLimits& limits,
          std::string prefix, ContractionStats* stats, std::string open = {})
      : net_(net), ix_(ix), policy_(policy), limits_(limits),
        prefix_(std::move(prefix)), stats_(stats), open_(std::move(open)) {
    policy_.validate();
    if (!open_.empty())
      for (const auto& n : net_.nodes)
        if (n.tensor.has_label(open_)) open_col_ = n.col;
  }

  // boundaries[t] holds the contraction of the rows before row_seq[t], one
  // chain site per node of the last absorbed row; when `fold`, also absorbs
  // the final row
  std::vector<Boundary> run(const std::vector<int>& row_seq, bool fold,
                            LogScalar* value) {
    std::vector<Boundary> out;
    Boundary cur;  // empty chain: nothing above the first row
    out.push_back(cur);
    for (size_t t = 0; t + 1 < row_seq.size(); ++t) {
      step(cur, row_seq[t]);
      out.push_back(cur);
    }
    if (fold) {
      step(cur, row_seq.back());
      *value = fold_scalar(cur);
    }
    return out;
  }

  // absorb every row, then fold down to the single open leg
  OpenFold run_open(const std::vector<int>& row_seq) {
    Index open_dim = 1;
    for (const auto& n : net_.nodes)
      if (n.tensor.has_label(open_))
        open_dim = n.tensor.dim(open_);
    Boundary cur;
    for (const int r : row_seq) step(cur, r);
    if (cur.zero) return {Tensor::zeros({open_}, {open_dim}), 0.0};
    std::optional<Tensor> acc;
    for (auto& s : cur.sites) merge_into(acc, s, cur.log);
    if (acc->order() != 1 || !acc->has_label(open_))
      throw std::invalid_argument("bmps: network is not closed up to the open leg");
    return {std::move(*acc), cur.log + net_.log_scale};
  }

 private:
  // absorb one row: walk left to right, merging chain sites until a node's
  // boundary bonds are all present, contract the node, then split its
  // remaining legs off as the new site for its position. Grouping the new
  // chain by source keeps every variable's copies on one site, so chain
  // bonds carry only genuine row-to-row coupling and survive truncation
  void step(Boundary& b, int row) {
    const auto& ids = ix_.rows[static_cast<size_t>(row)];
    const size_t m = ids.size();
    if (b.zero) {
      b.sites.assign(m, Tensor::scalar(0.0));
      return;
    }
    std::map<std::string, size_t> site_of_label;
    for (size_t j = 0; j < b.sites.size(); ++j)
      for (const auto& l : b.sites[j].labels()) site_of_label[l] = j;

    // an open leg is re-homed each row onto the node nearest its source
    // column, so the cuts around it share the correlation it carries evenly
    // instead of stacking it all on one side of the chain
    int target_k = -1;
    size_t open_site = 0;
    if (!open_.empty()) {
      const auto it = site_of_label.find(open_);
      if (it != site_of_label.end()) {
        open_site = it->second;
        int best = std::numeric_limits<int>::max();
        for (size_t k = 0; k < m; ++k) {
          const int d = std::abs(net_.nodes[static_cast<size_t>(ids[k])].col - open_col_);
          if (d < best) {
            best = d;
            target_k = static_cast<int>(k);
          }
        }
      }
    }

    std::vector<Tensor> fresh;
    std::optional<Tensor> acc;
    std::string prev_bond;
    size_t p = 0;
    for (size_t k = 0; k < m; ++k) {
      const Tensor& node = net_.nodes[static_cast<size_t>(ids[k])].tensor;
      size_t hi = 0;
      bool bonded = false;
      for (const auto& l : node.labels()) {
        const auto it = site_of_label.find(l);
        if (it != site_of_label.end()) {
          hi = std::max(hi, it->second);
          bonded = true;
        }
      }
      while (p < b.sites.size() &&
             ((bonded && p <= hi) || k + 1 == m ||
              (static_cast<int>(k) == target_k && p <= open_site)))
        merge_into(acc, b.sites[p++], b.log);
      merge_into(acc, node, b.log);
      if (acc->max_abs() == 0.0) {
        zero_out(b, m);
        return;
      }

      if (k + 1 == m) {
        push_site(fresh, std::move(*acc), b.log);
        acc.reset();
        break;
      }
      std::vector<std::string> left;
      if (!prev_bond.empty() && acc->has_label(prev_bond)) left.push_back(prev_bond);
      for (const auto& l : node.labels())
        if (acc->has_label(l)) left.push_back(l);
      if (static_cast<int>(k) == target_k && acc->has_label(open_) &&
          std::find(left.begin(), left.end(), open_) == left.end())
        left.push_back(open_);
      if (left.size() == static_cast<size_t>(acc->order())) {
        // nothing to pass right: the boundary factorizes at this point
        push_site(fresh, std::move(*acc), b.log);
        acc.reset();
        prev_bond.clear();
        continue;
      }
      if (left.empty()) {
        // the node dissolved entirely into legs for later nodes: a scalar
        // site keeps the chain 1:1 with the row
        fresh.push_back(Tensor::scalar(1.0));
        continue;
      }
      check_limit(acc->size(), limits_, "bmps");
      // the split is kept lossless in chi; compress() truncates afterwards
      // against a canonical gauge where the cut is globally optimal
      const TruncationPolicy loose{std::nullopt,
                                   policy_.rel_threshold.value_or(0.0)};
      auto res = split_truncated(*acc, left, loose, next_bond());
      push_site(fresh, std::move(res.left), b.log);
      Tensor right = std::move(res.right);
      if (right.max_abs() == 0.0) {
        zero_out(b, m);
        return;
      }
      auto [norm, ls] = scale_normalize(right);
      b.log += ls;
      acc = std::move(norm);
      prev_bond = res.bond_label;
    }
    b.sites = std::move(fresh);
    compress(b);
  }

  static std::string shared_bond(const Tensor& a, const Tensor& b) {
    for (const auto& l : a.labels())
      if (b.has_label(l)) return l;
    return {};
  }

  void zero_out(Boundary& b, size_t n_sites) {
    b.zero = true;
    b.sites.assign(n_sites, Tensor::scalar(0.0));
  }

  // contract `piece` into the chain site at `idx`, renormalizing; returns
  // false when the boundary collapses to zero
  bool merge_scaled(Boundary& b, size_t idx, Tensor piece) {
    check_limit(merge_entries(b.sites[idx], piece), limits_, "bmps");
    Tensor merged = contract(b.sites[idx], piece);
    if (merged.max_abs() == 0.0) {
      zero_out(b, b.sites.size());
      return false;
    }
    auto [norm, ls] = scale_normalize(merged);
    b.log += ls;
    b.sites[idx] = std::move(norm);
    return true;
  }

  // one-site or bare-bond chains aside, sweep left-to-right turning every
  // site into an isometry (singular values pushed right), then right-to-left
  // truncating under the policy; with both gauges in place each cut keeps
  // the globally dominant directions, which per-split truncation does not
  void compress(Boundary& b) {
    if (b.zero || b.sites.size() < 2) return;
    const TruncationPolicy lossless{std::nullopt, 0.0};
    for (size_t j = 0; j + 1 < b.sites.size(); ++j) {
      const std::string bond = shared_bond(b.sites[j], b.sites[j + 1]);
      if (bond.empty()) continue;
      if (b.sites[j].order() == 1) {
        Tensor bare = std::move(b.sites[j]);
        b.sites[j] = Tensor::scalar(1.0);
        if (!merge_scaled(b, j + 1, std::move(bare))) return;
        continue;
      }
      std::vector<std::string> keep;
      for (const auto& l : b.sites[j].labels())
        if (l != bond) keep.push_back(l);
      check_limit(b.sites[j].size(), limits_, "bmps");
      auto res = split_truncated(b.sites[j], keep, lossless, next_bond(),
                                 SingularSide::Right);
      b.sites[j] = std::move(res.left);
      if (!merge_scaled(b, j + 1, std::move(res.right))) return;
    }
    for (size_t j = b.sites.size(); j-- > 1;) {
      const std::string bond = shared_bond(b.sites[j - 1], b.sites[j]);
      if (bond.empty()) continue;
      if (b.sites[j].order() == 1) {
        Tensor bare = std::move(b.sites[j]);
        b.sites[j] = Tensor::scalar(1.0);
        if (!merge_scaled(b, j - 1, std::move(bare))) return;
        continue;
      }
      check_limit(b.sites[j].size(), limits_, "bmps");
      auto res = split_truncated(b.sites[j], {bond}, policy_, next_bond(),
                                 SingularSide::Left);
      if (stats_)
        stats_->max_bond =
            std::max(stats_->max_bond, res.right.dim(res.bond_label));
      b.sites[j] = std::move(res.right);
      if (!merge_scaled(b, j - 1, std::move(res.left))) return;
    }
  }

  LogScalar fold_scalar(Boundary& b) {
    if (b.zero) return {0.0, 0.0};
    std::optional<Tensor> acc;
    for (auto& s : b.sites) merge_into(acc, s, b.log);
    if (acc->order() != 0)
      throw std::invalid_argument("bmps: network is not closed");
    return {acc->data()[0], b.log + net_.log_scale};
  }

  Index merge_entries(const Tensor& a, const Tensor& b) {
    MetaNode ma, mb;
    ma.labels = a.labels();
    for (size_t k = 0; k < a.labels().size(); ++k) ma.dims[a.labels()[k]] = a.dims()[k];
    mb.labels = b.labels();
    for (size_t k = 0; k < b.labels().size(); ++k) mb.dims[b.labels()[k]] = b.dims()[k];
    return meta_out_entries(ma, mb);
  }

  void merge_into(std::optional<Tensor>& acc, const Tensor& site, double& log) {
    if (!acc) {
      acc = site;
      return;
    }
    check_limit(merge_entries(*acc, site), limits_, "bmps");
    Tensor merged = contract(*acc, site);
    if (merged.max_abs() == 0.0) {
      acc = std::move(merged);  // zero propagates; caller folds it to zero
      return;
    }
    auto [norm, ls] = scale_normalize(merged);
    log += ls;
    acc = std::move(norm);
  }

  void push_site(std::vector<Tensor>& out, Tensor t, double& log) {
    if (t.max_abs() == 0.0) {
      out.push_back(std::move(t));
      return;
    }
    auto [norm, ls] = scale_normalize(t);
    log += ls;
    out.push_back(std::move(norm));
  }

  std::string next_bond() { return prefix_ + std::to_string(counter_++); }

  const LayeredNetwork& net_;
  const LayerIndex& ix_;
  TruncationPolicy policy_;
  EngineLimits limits_;
  std::string prefix_;
  ContractionStats* stats_;
  std::string open_;
  int open_col_ = 0;
  int counter_ = 0;
};

std::string fresh_prefix(const LayeredNetwork& net, const std::string& base) {
  std::string prefix = base;
  auto collides = [&](const std::string& p) {
    for (const auto& n : net.nodes)
      for (const auto& l : n.tensor.labels())
        if (l.rfind(p, 0) == 0) return true;
    return false;
  };
  while (collides(prefix)) prefix = "@" + prefix;
  return prefix;
}

std::vector<int> row_order(const LayerIndex& ix, bool reversed) {
  std::vector<int> seq(ix.rows.size());
  for (size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<int>(i);
  if (reversed) std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

LogScalar bmps_contract(const LayeredNetwork& net, const TruncationPolicy& policy,
                        const EngineLimits& limits, ContractionStats* stats) {
  if (net.nodes.empty()) return {1.0, net.log_scale};
  const LayerIndex ix = index_layers(net);
  Sweeper sweep(net, ix, policy, limits, fresh_prefix(net, "@bT"), stats);
  LogScalar value{};
  sweep.run(row_order(ix, false), true, &value);
  if (value.mantissa == 0.0) return {0.0, 0.0};
  return value;
}

OpenFold bmps_contract_open(const LayeredNetwork& net, const std::string& open_label,
                            const TruncationPolicy& policy,
                            const EngineLimits& limits, ContractionStats* stats) {
  const LayerIndex ix = index_layers(net, open_label);
  Sweeper sweep(net, ix, policy, limits, fresh_prefix(net, "@bT"), stats,
                open_label);
  return sweep.run_open(row_order(ix, false));
}

SiteEnvironments site_environments(const LayeredNetwork& net,
                                   const TruncationPolicy& policy,
                                   const EngineLimits& limits) {
  const LayerIndex ix = index_layers(net);
  SiteEnvironments out;
  out.env.assign(net.nodes.size(), Tensor::scalar(1.0));
  out.log_scale.assign(net.nodes.size(), 0.0);

  Sweeper down(net, ix, policy, limits, fresh_prefix(net, "@bT"), &out.stats);
  Sweeper up(net, ix, policy, limits, fresh_prefix(net, "@bB"), &out.stats);
  const std::vector<Boundary> top = down.run(row_order(ix, false), false, nullptr);
  std::vector<Boundary> bot_rev = up.run(row_order(ix, true), false, nullptr);

  const size_t nrows = ix.rows.size();
  for (size_t r = 0; r < nrows; ++r) {
    const Boundary& t = top[r];
    const Boundary& b = bot_rev[nrows - 1 - r];
    const auto& ids = ix.rows[r];

    if (t.zero || b.zero) {
      for (int id : ids) {
        const Tensor& node = net.nodes[static_cast<size_t>(id)].tensor;
        out.env[static_cast<size_t>(id)] = Tensor::zeros(node.labels(), node.dims());
        out.log_scale[static_cast<size_t>(id)] = 0.0;
      }
      continue;
    }

    // the row's environment network is a three-rail ladder: the top chain
    // (grouped by the row above), this row's nodes, the bottom chain (grouped
    // by the row below). Interleave by column so partial contractions stay
    // local, then env(node) = forward partial x backward partial around it
    struct Rung {
      const Tensor* t;
      int col;
      int tier;  // 0 top, 1 node, 2 bottom
      int node;  // net node id when tier == 1
    };
    std::vector<Rung> rungs;
    if (r > 0) {
      const auto& above = ix.rows[r - 1];
      for (size_t i = 0; i < t.sites.size(); ++i)
        rungs.push_back({&t.sites[i],
                         net.nodes[static_cast<size_t>(above[i])].col, 0, -1});
    }
    for (int id : ids)
      rungs.push_back({&net.nodes[static_cast<size_t>(id)].tensor,
                       net.nodes[static_cast<size_t>(id)].col, 1, id});
    if (r + 1 < nrows) {
      const auto& below = ix.rows[r + 1];
      for (size_t i = 0; i < b.sites.size(); ++i)
        rungs.push_back({&b.sites[i],
                         net.nodes[static_cast<size_t>(below[i])].col, 2, -1});
    }
    std::stable_sort(rungs.begin(), rungs.end(), [](const Rung& x, const Rung& y) {
      return x.col != y.col ? x.col < y.col : x.tier < y.tier;
    });

    const size_t K = rungs.size();
    std::vector<Tensor> fwd(K + 1, Tensor::scalar(1.0));
    std::vector<Tensor> bwd(K + 1, Tensor::scalar(1.0));
    std::vector<double> flog(K + 1, 0.0), blog(K + 1, 0.0);
    for (size_t k = 0; k < K; ++k) {
      Tensor x = contract(fwd[k], *rungs[k].t);
      flog[k + 1] = flog[k];
      if (x.max_abs() == 0.0) {
        fwd[k + 1] = std::move(x);
        continue;
      }
      auto [norm, ls] = scale_normalize(x);
      flog[k + 1] += ls;
      fwd[k + 1] = std::move(norm);
    }
    for (size_t k = K; k-- > 0;) {
      Tensor x = contract(*rungs[k].t, bwd[k + 1]);
      blog[k] = blog[k + 1];
      if (x.max_abs() == 0.0) {
        bwd[k] = std::move(x);
        continue;
      }
      auto [norm, ls] = scale_normalize(x);
      blog[k] += ls;
      bwd[k] = std::move(norm);
    }

    for (size_t k = 0; k < K; ++k) {
      if (rungs[k].tier != 1) continue;
      const int id = rungs[k].node;
      const Tensor& node = net.nodes[static_cast<size_t>(id)].tensor;
      Tensor e = contract(fwd[k], bwd[k + 1]);
      // labels now are exactly node's legs (possibly permuted)
      if (e.max_abs() == 0.0) {
        out.env[static_cast<size_t>(id)] = Tensor::zeros(node.labels(), node.dims());
        out.log_scale[static_cast<size_t>(id)] = 0.0;
        continue;
      }
      auto [norm, ls] = scale_normalize(e);
      out.env[static_cast<size_t>(id)] = std::move(norm);
      out.log_scale[static_cast<size_t>(id)] =
          ls + t.log + b.log + flog[k] + blog[k + 1] + net.log_scale;
    }
  }
  return out;
}

LogScalar env_value(const SiteEnvironments& envs, int node, const Tensor& replacement) {
  const Tensor& env = envs.env[static_cast<size_t>(node)];
  for (const auto& l : replacement.labels())
    if (!env.has_label(l))
      throw std::invalid_argument("env_value: replacement leg " + l +
                                  " not present in the environment");
  if (replacement.order() != env.order())
    throw std::invalid_argument("env_value: leg set mismatch");
  const Tensor v = contract(env, replacement);
  return {v.data()[0], envs.log_scale[static_cast<size_t>(node)]};
}

}  // namespace pitnet
