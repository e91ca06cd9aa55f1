#include "pitnet/constraint_net.hpp"

#include <json.hpp>
#include <map>
#include <set>

#include "pitnet/engine.hpp"

namespace pitnet {

std::string physical_label(int var) { return "p" + std::to_string(var); }

std::string bond_label(int constraint, int scope_pos) {
  return "c" + std::to_string(constraint) + "." + std::to_string(scope_pos);
}

// Tensor layout: one delta per variable at index [0, n_vars), then one
// indicator per constraint in input order. Downstream code (measurement,
// layered absorption) relies on this ordering.
TensorNetwork build_network(int n_vars,
                            const std::vector<LocalConstraint>& constraints) {
  if (n_vars < 0) throw std::invalid_argument("build_network: negative n_vars");
  std::vector<std::vector<std::string>> var_bonds(static_cast<size_t>(n_vars));
  for (size_t c = 0; c < constraints.size(); ++c) {
    const auto& scope = constraints[c].scope;
    if (scope.empty())
      throw std::invalid_argument("build_network: empty scope");
    if (scope.size() > static_cast<size_t>(kMaxScope))
      throw std::invalid_argument(
          "build_network: scope larger than " + std::to_string(kMaxScope) +
          " would need a 2^" + std::to_string(scope.size()) + " indicator");
    std::set<int> seen;
    for (size_t k = 0; k < scope.size(); ++k) {
      const int v = scope[k];
      if (v < 0 || v >= n_vars)
        throw std::invalid_argument("build_network: variable out of range");
      if (!seen.insert(v).second)
        throw std::invalid_argument("build_network: repeated variable in scope");
      var_bonds[static_cast<size_t>(v)].push_back(
          bond_label(static_cast<int>(c), static_cast<int>(k)));
    }
  }

  TensorNetwork net;
  net.n_vars = n_vars;
  for (int v = 0; v < n_vars; ++v) {
    std::vector<std::string> labels = {physical_label(v)};
    const auto& bonds = var_bonds[static_cast<size_t>(v)];
    labels.insert(labels.end(), bonds.begin(), bonds.end());
    net.tensors.push_back(
        delta_tensor(1 + static_cast<int>(bonds.size()), 2, std::move(labels)));
    net.physical.push_back({v, physical_label(v)});
  }
  for (size_t c = 0; c < constraints.size(); ++c) {
    std::vector<std::string> labels;
    for (size_t k = 0; k < constraints[c].scope.size(); ++k)
      labels.push_back(bond_label(static_cast<int>(c), static_cast<int>(k)));
    net.tensors.push_back(
        indicator_tensor(static_cast<int>(constraints[c].scope.size()),
                         constraints[c].allowed, std::move(labels)));
  }
  return net;
}

void validate_network(const TensorNetwork& net) {
  if (net.n_vars != static_cast<int>(net.physical.size()))
    throw std::invalid_argument("network: physical map size mismatch");
  std::map<std::string, std::vector<std::pair<int, Index>>> seen;
  for (size_t t = 0; t < net.tensors.size(); ++t) {
    const auto& tensor = net.tensors[t];
    for (size_t k = 0; k < tensor.labels().size(); ++k)
      seen[tensor.labels()[k]].push_back({static_cast<int>(t), tensor.dims()[k]});
  }
  std::set<std::string> phys;
  for (int v = 0; v < net.n_vars; ++v) {
    const auto& site = net.physical[static_cast<size_t>(v)];
    if (site.tensor < 0 || site.tensor >= static_cast<int>(net.tensors.size()))
      throw std::invalid_argument("network: physical site tensor out of range");
    auto it = seen.find(site.label);
    if (it == seen.end() || it->second.size() != 1 ||
        it->second[0].first != site.tensor)
      throw std::invalid_argument("network: physical label " + site.label +
                                  " must appear exactly once, on its own tensor");
    if (it->second[0].second != 2)
      throw std::invalid_argument("network: physical leg extent must be 2");
    phys.insert(site.label);
  }
  for (const auto& [label, holders] : seen) {
    if (phys.count(label)) continue;
    if (holders.size() != 2)
      throw std::invalid_argument("network: virtual label " + label +
                                  " must appear exactly twice");
    if (holders[0].second != holders[1].second)
      throw std::invalid_argument("network: extent mismatch on label " + label);
  }
}

double amplitude(const TensorNetwork& net, const Bits& assignment) {
  if (static_cast<int>(assignment.size()) != net.n_vars)
    throw std::invalid_argument("amplitude: assignment length mismatch");
  for (std::uint8_t b : assignment)
    if (b > 1) throw std::invalid_argument("amplitude: non-bit value");

  std::vector<Tensor> fixed;
  std::map<int, std::vector<int>> phys_of_tensor;
  for (int v = 0; v < net.n_vars; ++v)
    phys_of_tensor[net.physical[static_cast<size_t>(v)].tensor].push_back(v);
  for (size_t t = 0; t < net.tensors.size(); ++t) {
    Tensor cur = net.tensors[t];
    auto it = phys_of_tensor.find(static_cast<int>(t));
    if (it != phys_of_tensor.end())
      for (int v : it->second)
        cur = cur.fixed(net.physical[static_cast<size_t>(v)].label,
                        assignment[static_cast<size_t>(v)]);
    fixed.push_back(std::move(cur));
  }
  const LogScalar r = contract_closed(fixed);
  return r.mantissa * std::exp(r.log_scale + net.log_scale);
}

std::string constraint_spec_to_json(const ConstraintSpec& spec) {
  nlohmann::json j;
  j["n_vars"] = spec.n_vars;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : spec.constraints) {
    nlohmann::json jc;
    jc["scope"] = c.scope;
    std::vector<std::string> allowed;
    for (const auto& tup : c.allowed) {
      std::string s;
      for (std::uint8_t b : tup) s += static_cast<char>('0' + b);
      allowed.push_back(std::move(s));
    }
    jc["allowed"] = allowed;
    j["constraints"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

ConstraintSpec constraint_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("constraint spec: ") + e.what());
  }
  ConstraintSpec spec;
  try {
    spec.n_vars = j.at("n_vars").get<int>();
    for (const auto& jc : j.at("constraints")) {
      LocalConstraint c;
      c.scope = jc.at("scope").get<std::vector<int>>();
      for (const auto& js : jc.at("allowed")) {
        const std::string s = js.get<std::string>();
        if (s.size() != c.scope.size())
          throw std::invalid_argument(
              "constraint spec: allowed tuple length differs from scope");
        Bits tup;
        for (char ch : s) {
          if (ch != '0' && ch != '1')
            throw std::invalid_argument("constraint spec: bitstring expected");
          tup.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        c.allowed.push_back(std::move(tup));
      }
      spec.constraints.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("constraint spec: ") + e.what());
  }
  return spec;
}

}  // namespace pitnet
