#include "pitnet/ite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace pitnet {

DiagonalHamiltonian build_hamiltonian(const MineInstance& inst) {
  DiagonalHamiltonian h;
  for (const GridPos& p : excavatable_blocks(inst)) {
    h.e0.push_back(0.0);
    h.e1.push_back(-inst.weights[static_cast<size_t>(p.row)]
                                [static_cast<size_t>(p.col)]);
  }
  return h;
}

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("config: tau must be finite and > 0");
  if (engine.kind == EngineKind::Bmps && engine.chi < 1)
    throw std::invalid_argument("config: chi must be >= 1");
  if (!(a >= 1.0) || !std::isfinite(a))
    throw std::invalid_argument("config: a must be finite and >= 1");
  if (!std::isfinite(b)) throw std::invalid_argument("config: b must be finite");
  if (a > 1.0) {
    if (!(b > 0.0 && b < (a - 1.0) / 2.0))
      throw std::invalid_argument(
          "config: a > 1 requires 0 < b < (a-1)/2 so the threshold separates "
          "occupied sites from degenerate ones");
  } else if (b != 0.0) {
    throw std::invalid_argument("config: a = 1 requires b = 0");
  }
}

TensorNetwork apply_ite(const TensorNetwork& net, const DiagonalHamiltonian& h,
                        double tau) {
  if (static_cast<int>(h.e0.size()) != net.n_vars ||
      static_cast<int>(h.e1.size()) != net.n_vars)
    throw std::invalid_argument("apply_ite: hamiltonian size mismatch");
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("apply_ite: tau must be finite and >= 0");
  for (int v = 0; v < net.n_vars; ++v)
    if (!std::isfinite(h.e0[static_cast<size_t>(v)]) ||
        !std::isfinite(h.e1[static_cast<size_t>(v)]))
      throw std::invalid_argument("apply_ite: non-finite energy");

  TensorNetwork out = net;
  for (int v = 0; v < net.n_vars; ++v) {
    const auto& site = out.physical[static_cast<size_t>(v)];
    Tensor& t = out.tensors[static_cast<size_t>(site.tensor)];
    // shift exponents so the larger gate entry is exactly 1: the gate never
    // overflows, and the shift moves into the network's log scale
    const double s0 = -tau * h.e0[static_cast<size_t>(v)];
    const double s1 = -tau * h.e1[static_cast<size_t>(v)];
    const double shift = std::max(s0, s1);
    const double g[2] = {std::exp(s0 - shift), std::exp(s1 - shift)};
    out.log_scale += shift;

    const int pos = t.label_pos(site.label);
    Index stride = 1;
    for (int k = t.order() - 1; k > pos; --k) stride *= t.dims()[static_cast<size_t>(k)];
    auto& data = t.data();
    for (Index i = 0; i < t.size(); ++i) data[static_cast<size_t>(i)] *= g[(i / stride) % 2];

    try {
      ScaleResult sr = scale_normalize(t);
      t = std::move(sr.tensor);
      out.log_scale += sr.log_scale;
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(
          "apply_ite: site tensor vanished under the gate; reduce tau");
    }
  }
  return out;
}

namespace {

void check_layout(const TensorNetwork& net, const MiningLayout& layout) {
  if (static_cast<int>(layout.blocks.size()) != net.n_vars)
    throw std::invalid_argument("measure: layout block count != n_vars");
  const size_t n_constraints = net.tensors.size() - static_cast<size_t>(net.n_vars);
  if (layout.constraint_child.size() != n_constraints)
    throw std::invalid_argument("measure: layout constraint count mismatch");
  for (int child : layout.constraint_child)
    if (child < 0 || child >= net.n_vars)
      throw std::invalid_argument("measure: constraint child out of range");
}

}  // namespace

Measurer::Measurer(const TensorNetwork& net, const MiningLayout& layout,
                   const Engine& engine, const EngineLimits& limits) {
  validate_network(net);
  check_layout(net, layout);
  const int n = net.n_vars;

  // <psi|P_b|psi> at a site is the network with every entry squared and that
  // physical index fixed to b: amplitudes are single products of entries, so
  // the bra layer is the same squared layer rather than a second copy
  const auto squared = [](Tensor t) {
    for (double& d : t.data()) d *= d;
    return t;
  };
  std::vector<Tensor> n0, n1;
  for (int v = 0; v < n; ++v) {
    const auto& site = net.physical[static_cast<size_t>(v)];
    const Tensor& k = net.tensors[static_cast<size_t>(site.tensor)];
    n0.push_back(squared(k.fixed(site.label, 0)));
    n1.push_back(squared(k.fixed(site.label, 1)));
  }
  // each indicator joins its child's composite, so the remaining bonds only
  // connect consecutive rows
  for (size_t c = 0; c < layout.constraint_child.size(); ++c) {
    const Tensor r2 = squared(net.tensors[static_cast<size_t>(net.n_vars) + c]);
    const int child = layout.constraint_child[c];
    n0[static_cast<size_t>(child)] = contract(n0[static_cast<size_t>(child)], r2);
    n1[static_cast<size_t>(child)] = contract(n1[static_cast<size_t>(child)], r2);
  }

  layer_.log_scale = 2.0 * net.log_scale;
  for (int v = 0; v < n; ++v) {
    const GridPos& p = layout.blocks[static_cast<size_t>(v)];
    layer_.nodes.push_back({add(n0[static_cast<size_t>(v)], n1[static_cast<size_t>(v)]),
                            p.row, p.col});
  }

  if (engine.kind == EngineKind::Exact) {
    // the reference engine contracts the bra-ket sandwich as built, pairwise
    // in greedy order with no structural shortcut: one closed network for the
    // norm, then one per variable for its x_v = 1 branch; the 0 branch is
    // their difference
    std::vector<Tensor> one_branch, closed;
    one_branch.reserve(static_cast<size_t>(n));
    closed.reserve(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
      const auto& site = net.physical[static_cast<size_t>(v)];
      const Tensor& k = net.tensors[static_cast<size_t>(site.tensor)];
      const Tensor k0 = k.fixed(site.label, 0);
      const Tensor k1 = k.fixed(site.label, 1);
      Tensor d0 = contract(k0, k0.renamed_suffix("~"));
      Tensor d1 = contract(k1, k1.renamed_suffix("~"));
      for (size_t c = 0; c < layout.constraint_child.size(); ++c) {
        if (layout.constraint_child[c] != v) continue;
        const Tensor& cr = net.tensors[static_cast<size_t>(net.n_vars) + c];
        const Tensor r2 = contract(cr, cr.renamed_suffix("~"));
        d0 = contract(d0, r2);
        d1 = contract(d1, r2);
      }
      closed.push_back(add(d0, d1));
      one_branch.push_back(std::move(d1));
    }
    const LogScalar norm = contract_closed(closed, limits);
    for (int v = 0; v < n; ++v) {
      Tensor whole = std::move(closed[static_cast<size_t>(v)]);
      closed[static_cast<size_t>(v)] = std::move(one_branch[static_cast<size_t>(v)]);
      const LogScalar one = contract_closed(closed, limits);
      one_branch[static_cast<size_t>(v)] = std::move(closed[static_cast<size_t>(v)]);
      closed[static_cast<size_t>(v)] = std::move(whole);
      double r = norm.mantissa == 0.0
                     ? 0.0
                     : one.mantissa / norm.mantissa *
                           std::exp(one.log_scale - norm.log_scale);
      r = std::clamp(r, 0.0, 1.0);
      const double log = norm.log_scale + layer_.log_scale;
      n1_.push_back({r * norm.mantissa, log});
      n0_.push_back({(1.0 - r) * norm.mantissa, log});
    }
    return;
  }

  // truncated path: one boundary sweep per variable with that site's branch
  // pair stacked on an extra open leg. Both branches then pass through the
  // same truncations, so their ratio stays accurate even when each absolute
  // value is squeezed toward the precision floor
  std::string open = "%imp";
  for (bool clash = true; clash;) {
    clash = false;
    for (const auto& node : layer_.nodes)
      if (node.tensor.has_label(open)) {
        clash = true;
        open += '%';
        break;
      }
  }
  for (int v = 0; v < n; ++v) {
    const Tensor& t0 = n0[static_cast<size_t>(v)];
    const Tensor& t1 = n1[static_cast<size_t>(v)];
    std::vector<std::string> labels = t0.labels();
    labels.push_back(open);
    std::vector<Index> dims = t0.dims();
    dims.push_back(2);
    std::vector<double> data(static_cast<size_t>(t0.size()) * 2);
    for (Index i = 0; i < t0.size(); ++i) {
      data[static_cast<size_t>(i) * 2] = t0.data()[static_cast<size_t>(i)];
      data[static_cast<size_t>(i) * 2 + 1] = t1.data()[static_cast<size_t>(i)];
    }
    Tensor& slot = layer_.nodes[static_cast<size_t>(v)].tensor;
    Tensor whole = std::move(slot);
    slot = Tensor(labels, dims, std::move(data));
    ContractionStats st;
    const OpenFold fold =
        bmps_contract_open(layer_, open, engine.policy(), limits, &st);
    slot = std::move(whole);
    stats_.max_bond = std::max(stats_.max_bond, st.max_bond);
    n0_.push_back({std::max(fold.tensor.data()[0], 0.0), fold.log_scale});
    n1_.push_back({std::max(fold.tensor.data()[1], 0.0), fold.log_scale});
  }
}

double Measurer::site(int var, double a) const {
  if (var < 0 || var >= n_vars())
    throw std::invalid_argument("site: variable out of range");
  const double v0 = n0_[static_cast<size_t>(var)].mantissa;
  const double v1 = n1_[static_cast<size_t>(var)].mantissa;
  const double norm = v0 + v1;
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ZeroNormError(
        "measurement: network norm vanished at site " + std::to_string(var) +
        "; the constraints admit no assignment or truncation destroyed the state");
  return (a * v0 - v1) / norm;
}

std::vector<double> Measurer::all_sites(double a) const {
  std::vector<double> out;
  for (int v = 0; v < n_vars(); ++v) out.push_back(site(v, a));
  return out;
}

double Measurer::occupation(int var) const { return (1.0 - site(var)) / 2.0; }

double Measurer::energy(const DiagonalHamiltonian& h) const {
  if (static_cast<int>(h.e0.size()) != n_vars() ||
      static_cast<int>(h.e1.size()) != n_vars())
    throw std::invalid_argument("energy: hamiltonian size mismatch");
  double e = 0.0;
  for (int v = 0; v < n_vars(); ++v) {
    const double p = occupation(v);
    e += h.e1[static_cast<size_t>(v)] * p + h.e0[static_cast<size_t>(v)] * (1.0 - p);
  }
  return e;
}

LogScalar Measurer::site_norm(int var) const {
  if (var < 0 || var >= n_vars())
    throw std::invalid_argument("site_norm: variable out of range");
  return LogScalar::sum(n0_[static_cast<size_t>(var)], n1_[static_cast<size_t>(var)]);
}

double measure_site(const TensorNetwork& net, const MiningLayout& layout, int var,
                    const Engine& engine, double a) {
  return Measurer(net, layout, engine).site(var, a);
}

double measure_energy(const TensorNetwork& net, const MiningLayout& layout,
                      const DiagonalHamiltonian& h, const Engine& engine) {
  return Measurer(net, layout, engine).energy(h);
}

namespace {

Solution decode_from(const std::vector<double>& expectations,
                     const MineInstance& inst, const SolverConfig& cfg) {
  Bits x;
  for (double m : expectations)
    x.push_back(m < cfg.b ? 1 : 0);
  return evaluate_solution(inst, x);
}

}  // namespace

Solution decode(const TensorNetwork& net, const MiningLayout& layout,
                const MineInstance& inst, const SolverConfig& cfg,
                const EngineLimits& limits) {
  cfg.validate();
  Measurer m(net, layout, cfg.engine, limits);
  return decode_from(m.all_sites(cfg.a), inst, cfg);
}

SolveResult solve(const MineInstance& inst, const SolverConfig& cfg,
                  const EngineLimits& limits) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const TensorNetwork net = build_mining_network(inst);
  const MiningLayout layout = mining_layout(inst);
  const DiagonalHamiltonian h = build_hamiltonian(inst);
  const TensorNetwork evolved = apply_ite(net, h, cfg.tau);

  Measurer m(evolved, layout, cfg.engine, limits);
  SolveResult r;
  r.expectations = m.all_sites(cfg.a);
  r.solution = decode_from(r.expectations, inst, cfg);
  const double degenerate_value = cfg.a > 1.0 ? (cfg.a - 1.0) / 2.0 : 0.0;
  for (int v = 0; v < m.n_vars(); ++v)
    if (std::abs(r.expectations[static_cast<size_t>(v)] - degenerate_value) <=
        kDegenerateEps)
      r.degenerate_sites.push_back(v);
  r.energy = m.energy(h);
  r.stats = m.stats();
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace pitnet
