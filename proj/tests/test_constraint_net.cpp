#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pitnet/constraint_net.hpp"
#include "pitnet/engine.hpp"

using namespace pitnet;

namespace {

Bits bits_of(std::uint32_t mask, int n) {
  Bits x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1u;
  return x;
}

std::vector<LocalConstraint> random_constraints(std::mt19937_64& rng, int n_vars) {
  std::vector<LocalConstraint> cs;
  const int m = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int c = 0; c < m; ++c) {
    LocalConstraint lc;
    const int arity = std::uniform_int_distribution<int>(
        1, std::min(3, n_vars))(rng);
    std::vector<int> vars(static_cast<size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) vars[static_cast<size_t>(i)] = i;
    std::shuffle(vars.begin(), vars.end(), rng);
    lc.scope.assign(vars.begin(), vars.begin() + arity);
    for (std::uint32_t t = 0; t < (1u << arity); ++t)
      if (std::uniform_int_distribution<int>(0, 1)(rng))
        lc.allowed.push_back(bits_of(t, arity));
    if (lc.allowed.empty()) lc.allowed.push_back(bits_of(0, arity));
    cs.push_back(std::move(lc));
  }
  return cs;
}

// sum of amplitudes over all assignments, by capping each physical leg with
// the all-ones vector
double capped_total(const TensorNetwork& net) {
  std::vector<Tensor> nodes = net.tensors;
  for (const auto& site : net.physical)
    nodes.push_back(Tensor({site.label}, {2}, {1.0, 1.0}));
  const LogScalar r = contract_closed(nodes);
  return r.mantissa * std::exp(r.log_scale + net.log_scale);
}

}  // namespace

TEST_CASE("label scheme") {
  CHECK(physical_label(3) == "p3");
  CHECK(bond_label(2, 0) == "c2.0");
  CHECK(bond_label(0, 4) == "c0.4");
}

TEST_CASE("network structure: one delta per variable, one indicator per constraint") {
  // x0 <-> x1 (equality), x1 or x2
  std::vector<LocalConstraint> cs = {
      {{0, 1}, {{0, 0}, {1, 1}}},
      {{1, 2}, {{0, 1}, {1, 0}, {1, 1}}},
  };
  const TensorNetwork net = build_network(3, cs);
  validate_network(net);
  REQUIRE(net.tensors.size() == 5);
  REQUIRE(net.physical.size() == 3);

  // variable 1 sits in both constraints: physical leg + two bonds
  CHECK(net.tensors[0].order() == 2);
  CHECK(net.tensors[1].order() == 3);
  CHECK(net.tensors[2].order() == 2);
  CHECK(net.tensors[1].has_label("p1"));
  CHECK(net.tensors[1].has_label("c0.1"));
  CHECK(net.tensors[1].has_label("c1.0"));
  CHECK(net.tensors[3].order() == 2);  // indicators carry their scope bonds
  CHECK(net.tensors[4].has_label("c1.1"));

  // delta content: the variable tensor is 1 iff all its indices agree
  const Tensor& d1 = net.tensors[1];
  CHECK(d1.at({0, 0, 0}) == 1.0);
  CHECK(d1.at({1, 1, 1}) == 1.0);
  CHECK(d1.at({1, 0, 1}) == 0.0);
}

TEST_CASE("amplitude is the constraint indicator") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const auto cs = random_constraints(rng, n);
    const TensorNetwork net = build_network(n, cs);
    validate_network(net);
    long long count = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const Bits x = bits_of(mask, n);
      const double amp = amplitude(net, x);
      const bool sat = oracles::satisfies(cs, x);
      CHECK(amp == (sat ? 1.0 : 0.0));
      count += sat;
    }
    CHECK(capped_total(net) == doctest::Approx(static_cast<double>(count)).epsilon(1e-12));
  }
}

TEST_CASE("an unconstrained network accepts everything") {
  const TensorNetwork net = build_network(3, {});
  validate_network(net);
  CHECK(net.tensors.size() == 3);
  for (std::uint32_t mask = 0; mask < 8; ++mask)
    CHECK(amplitude(net, bits_of(mask, 3)) == 1.0);
}

TEST_CASE("amplitudes are invariant under constraint reordering") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5;
    auto cs = random_constraints(rng, n);
    const TensorNetwork a = build_network(n, cs);
    std::reverse(cs.begin(), cs.end());
    const TensorNetwork b = build_network(n, cs);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const Bits x = bits_of(mask, n);
      CHECK(amplitude(a, x) == amplitude(b, x));
    }
  }
}

TEST_CASE("amplitudes are invariant under scope permutation") {
  // x0+x1+x2 odd, stated in two different scope orders
  std::vector<LocalConstraint> cs1 = {
      {{0, 1, 2}, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}}}};
  std::vector<LocalConstraint> cs2 = {
      {{2, 0, 1}, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 1, 1}}}};
  const TensorNetwork a = build_network(3, cs1);
  const TensorNetwork b = build_network(3, cs2);
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    const Bits x = bits_of(mask, 3);
    CHECK(amplitude(a, x) == amplitude(b, x));
    CHECK(amplitude(a, x) == (oracles::satisfies(cs1, x) ? 1.0 : 0.0));
  }
}

TEST_CASE("three-bit even parity counts eight of sixteen") {
  // two overlapping parity checks on four variables
  std::vector<LocalConstraint> cs = {
      {{0, 1, 2}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}},
      {{1, 2, 3}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}},
  };
  const TensorNetwork net = build_network(4, cs);
  long long count = 0;
  for (std::uint32_t mask = 0; mask < 16; ++mask)
    count += amplitude(net, bits_of(mask, 4)) == 1.0;
  CHECK(count == 4);
  CHECK(capped_total(net) == 4.0);
}

TEST_CASE("empty allowed set warns and zeroes every amplitude") {
  std::vector<std::string> warnings;
  set_warning_handler([&](const std::string& w) { warnings.push_back(w); });
  const TensorNetwork net = build_network(2, {{{0, 1}, {}}});
  set_warning_handler(nullptr);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("empty") != std::string::npos);
  for (std::uint32_t mask = 0; mask < 4; ++mask)
    CHECK(amplitude(net, bits_of(mask, 2)) == 0.0);
}

TEST_CASE("scope validation") {
  CHECK_THROWS_AS(build_network(-1, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_network(2, {{{}, {}}}), std::invalid_argument);
  CHECK_THROWS_AS(build_network(2, {{{0, 2}, {{0, 0}, {1, 1}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_network(2, {{{0, 0}, {{0, 0}, {1, 1}}}}),
                  std::invalid_argument);

  std::vector<int> wide(static_cast<size_t>(kMaxScope) + 1);
  for (size_t i = 0; i < wide.size(); ++i) wide[i] = static_cast<int>(i);
  LocalConstraint too_wide{wide, {Bits(wide.size(), 0)}};
  CHECK_THROWS_AS(build_network(kMaxScope + 1, {too_wide}), std::invalid_argument);
}

TEST_CASE("amplitude argument validation") {
  const TensorNetwork net = build_network(2, {{{0, 1}, {{0, 0}, {1, 1}}}});
  CHECK_THROWS_AS(amplitude(net, {0}), std::invalid_argument);
  CHECK_THROWS_AS(amplitude(net, {0, 2}), std::invalid_argument);
}

TEST_CASE("validate_network rejects broken wiring") {
  TensorNetwork net = build_network(2, {{{0, 1}, {{0, 0}, {1, 1}}}});
  validate_network(net);

  TensorNetwork dangling = net;
  dangling.tensors[0] = dangling.tensors[0].renamed({{"c0.0", "loose"}});
  CHECK_THROWS_AS(validate_network(dangling), std::invalid_argument);

  TensorNetwork missing_phys = net;
  missing_phys.tensors[1] = missing_phys.tensors[1].renamed({{"p1", "q1"}});
  CHECK_THROWS_AS(validate_network(missing_phys), std::invalid_argument);

  TensorNetwork bad_map = net;
  bad_map.physical[0].tensor = 1;
  CHECK_THROWS_AS(validate_network(bad_map), std::invalid_argument);
}

TEST_CASE("constraint spec JSON round trip") {
  ConstraintSpec spec;
  spec.n_vars = 4;
  spec.constraints = {
      {{0, 1, 2}, {{0, 0, 0}, {1, 1, 1}}},
      {{3}, {{1}}},
  };
  const std::string text = constraint_spec_to_json(spec);
  const ConstraintSpec back = constraint_spec_from_json(text);
  CHECK(back.n_vars == spec.n_vars);
  REQUIRE(back.constraints.size() == spec.constraints.size());
  for (size_t c = 0; c < spec.constraints.size(); ++c) {
    CHECK(back.constraints[c].scope == spec.constraints[c].scope);
    CHECK(back.constraints[c].allowed == spec.constraints[c].allowed);
  }
  // the round-tripped spec builds the same network
  const TensorNetwork a = build_network(spec.n_vars, spec.constraints);
  const TensorNetwork b = build_network(back.n_vars, back.constraints);
  for (std::uint32_t mask = 0; mask < 16; ++mask)
    CHECK(amplitude(a, bits_of(mask, 4)) == amplitude(b, bits_of(mask, 4)));
}

TEST_CASE("constraint spec JSON rejects malformed input") {
  CHECK_THROWS_AS(constraint_spec_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(constraint_spec_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(constraint_spec_from_json(
                      R"({"n_vars": 2, "constraints": [{"scope": [0, 1], "allowed": ["0"]}]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(constraint_spec_from_json(
                      R"({"n_vars": 2, "constraints": [{"scope": [0, 1], "allowed": ["0x"]}]})"),
                  std::invalid_argument);
}
