#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pitnet/tensor.hpp"

using namespace pitnet;

namespace {

Tensor random_tensor(std::mt19937_64& rng, std::vector<std::string> labels,
                     std::vector<Index> dims) {
  Index n = 1;
  for (Index d : dims) n *= d;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> data(static_cast<size_t>(n));
  for (double& v : data) v = u(rng);
  return Tensor(std::move(labels), std::move(dims), std::move(data));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  const Tensor bp = b.permuted(a.labels());
  double m = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.data()[static_cast<size_t>(i)] -
                              bp.data()[static_cast<size_t>(i)]));
  return m;
}

}  // namespace

TEST_CASE("tensor construction and invariants") {
  Tensor t({"a", "b"}, {2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.order() == 2);
  CHECK(t.size() == 6);
  CHECK(t.at({1, 2}) == 6);
  CHECK(t.dim("b") == 3);

  CHECK_THROWS(Tensor({"a", "a"}, {2, 2}, std::vector<double>(4, 0.0)));
  CHECK_THROWS(Tensor({"a"}, {2}, {1.0}));            // size mismatch
  CHECK_THROWS(Tensor({"a"}, {0}, {}));               // extent < 1
  CHECK_THROWS(Tensor({"a"}, {2}, {1.0, NAN}));       // finite invariant
  CHECK_THROWS(Tensor({"a"}, {2}, {1.0, INFINITY}));
  CHECK(Tensor::scalar(3.5).order() == 0);
  CHECK(Tensor::scalar(3.5).at({}) == 3.5);
}

TEST_CASE("permute, rename, fix") {
  Tensor t({"a", "b"}, {2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor p = t.permuted({"b", "a"});
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(p.at({j, i}) == t.at({i, j}));
  CHECK_THROWS(t.permuted({"a", "c"}));

  Tensor r = t.renamed({{"a", "x"}});
  CHECK(r.labels() == std::vector<std::string>{"x", "b"});
  CHECK(t.renamed_suffix("~").labels() == std::vector<std::string>{"a~", "b~"});

  Tensor f = t.fixed("a", 1);
  CHECK(f.labels() == std::vector<std::string>{"b"});
  CHECK(f.at({0}) == 4);
  CHECK(f.at({2}) == 6);
  CHECK_THROWS(t.fixed("a", 2));
}

TEST_CASE("delta tensor") {
  Tensor d2 = delta_tensor(2, 2);
  CHECK(d2.at({0, 0}) == 1);
  CHECK(d2.at({1, 1}) == 1);
  CHECK(d2.at({0, 1}) == 0);

  Tensor d3 = delta_tensor(3, 2, {"x", "y", "z"});
  std::vector<Index> idx(3, 0);
  do {
    const bool all_eq = idx[0] == idx[1] && idx[1] == idx[2];
    CHECK(d3.at(idx) == (all_eq ? 1.0 : 0.0));
  } while (oracles::next_multi_index(idx, d3.dims()));

  CHECK(delta_tensor(1, 4).at({2}) == 1);  // order-1: all-ones
  CHECK_THROWS(delta_tensor(0, 2));
  CHECK_THROWS(delta_tensor(2, 1));
}

TEST_CASE("indicator tensor") {
  const std::vector<std::vector<std::uint8_t>> parity = {
      {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}};
  Tensor r = indicator_tensor(3, parity);
  int ones = 0;
  std::vector<Index> idx(3, 0);
  do {
    std::vector<std::uint8_t> tup(idx.begin(), idx.end());
    const bool in = std::find(parity.begin(), parity.end(), tup) != parity.end();
    CHECK(r.at(idx) == (in ? 1.0 : 0.0));
    ones += static_cast<int>(r.at(idx));
  } while (oracles::next_multi_index(idx, r.dims()));
  CHECK(ones == 4);

  CHECK_THROWS(indicator_tensor(0, {}));
  CHECK_THROWS(indicator_tensor(2, {{0}}));        // arity mismatch
  CHECK_THROWS(indicator_tensor(1, {{2}}));        // non-bit
  CHECK_THROWS(indicator_tensor(1, {{0}, {0}}));   // duplicate

  std::string warned;
  auto prev = set_warning_handler([&](const std::string& m) { warned = m; });
  Tensor z = indicator_tensor(2, {});
  set_warning_handler(prev);
  CHECK(!warned.empty());
  CHECK(z.max_abs() == 0.0);
}

TEST_CASE("contract basics") {
  Tensor v({"i"}, {2}, {1, 2});
  Tensor w({"i"}, {2}, {3, 4});
  CHECK(contract(v, w).at({}) == 11);

  Tensor m({"i", "j"}, {2, 2}, {1, 2, 3, 4});
  Tensor mv = contract(m, v);  // shares j? no: shares i -> output j
  CHECK(mv.labels() == std::vector<std::string>{"j"});
  CHECK(mv.at({0}) == 1 * 1 + 3 * 2);
  CHECK(mv.at({1}) == 2 * 1 + 4 * 2);

  // outer product when no labels are shared
  Tensor o = contract(v, w.renamed({{"i", "k"}}));
  CHECK(o.labels() == std::vector<std::string>{"i", "k"});
  CHECK(o.at({1, 0}) == 6);

  // output label order: free of a (original order), then free of b
  Tensor a({"p1", "b2", "b3"}, {2, 2, 2}, std::vector<double>(8, 1.0));
  Tensor b({"p2", "b2"}, {2, 2}, std::vector<double>(4, 1.0));
  CHECK(contract(a, b).labels() == std::vector<std::string>{"p1", "b3", "p2"});

  Tensor bad({"i"}, {3}, {1, 2, 3});
  CHECK_THROWS(contract(v, bad));  // extent mismatch on shared label
}

TEST_CASE("contract agrees with loop oracle") {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<std::vector<Index>, std::vector<Index>>> shapes = {
      {{2, 3, 4}, {4, 3, 5}}, {{6, 2}, {2}}, {{2, 2, 2, 2}, {2, 2, 2, 2}},
      {{8, 8}, {8, 8}},       {{3}, {5}},    {{4, 4, 4}, {4, 4, 4, 4}}};
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
      labelings = {{{"a", "b", "c"}, {"c", "b", "d"}},
                   {{"a", "b"}, {"b"}},
                   {{"a", "b", "c", "d"}, {"d", "c", "e", "f"}},
                   {{"a", "b"}, {"b", "c"}},
                   {{"a"}, {"z"}},
                   {{"a", "b", "c"}, {"c", "a", "x", "y"}}};
  for (size_t k = 0; k < shapes.size(); ++k) {
    Tensor a = random_tensor(rng, labelings[k].first, shapes[k].first);
    Tensor b = random_tensor(rng, labelings[k].second, shapes[k].second);
    Tensor got = contract(a, b);
    Tensor want = oracles::loop_contract(a, b);
    CHECK(got.labels() == want.labels());
    CHECK(max_abs_diff(got, want) <= 1e-12);
  }
}

TEST_CASE("contract is bilinear") {
  std::mt19937_64 rng(11);
  Tensor a1 = random_tensor(rng, {"i", "j"}, {3, 4});
  Tensor a2 = random_tensor(rng, {"i", "j"}, {3, 4});
  Tensor b = random_tensor(rng, {"j", "k"}, {4, 2});
  Tensor lhs = contract(add(a1, a2), b);
  Tensor rhs = add(contract(a1, b), contract(a2, b));
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12);

  Tensor a3 = a1;
  for (double& v : a3.data()) v *= 2.5;
  CHECK(max_abs_diff(contract(a3, b), [&] {
          Tensor s = contract(a1, b);
          for (double& v : s.data()) v *= 2.5;
          return s;
        }()) <= 1e-12);
}

TEST_CASE("delta fusion: contracting copy tensors over one shared leg") {
  Tensor d1 = delta_tensor(3, 2, {"a", "b", "s"});
  Tensor d2 = delta_tensor(2, 2, {"s", "c"});
  Tensor fused = contract(d1, d2);
  Tensor want = delta_tensor(3, 2, {"a", "b", "c"});
  CHECK(fused.labels() == want.labels());
  CHECK(max_abs_diff(fused, want) == 0.0);
}

TEST_CASE("split_truncated: exact reconstruction") {
  std::mt19937_64 rng(13);
  Tensor t = random_tensor(rng, {"a", "b", "c"}, {3, 4, 5});
  auto [l, r, err, bond] = split_truncated(t, {"a", "c"}, TruncationPolicy::exact());
  CHECK(err <= 1e-12);
  CHECK(l.has_label(bond));
  CHECK(r.has_label(bond));
  Tensor back = contract(l, r);
  CHECK(max_abs_diff(back, t) <= 1e-10);
}

TEST_CASE("split_truncated: known singular values") {
  // diag(3, 1): keeping one value discards sigma=1 of total sqrt(10)
  Tensor t({"a", "b"}, {2, 2}, {3, 0, 0, 1});
  TruncationPolicy p{1, std::nullopt};
  auto res = split_truncated(t, {"a"}, p);
  CHECK(res.truncation_error == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));
  CHECK(res.left.dim(res.bond_label) == 1);

  // sqrt(sigma) absorbed on both sides: matching factor norms per bond index
  auto full = split_truncated(t, {"a"}, TruncationPolicy::exact());
  for (Index k = 0; k < full.left.dim(full.bond_label); ++k) {
    double ln = 0.0, rn = 0.0;
    for (Index i = 0; i < 2; ++i) {
      ln += full.left.at({i, k}) * full.left.at({i, k});
      rn += full.right.at({k, i}) * full.right.at({k, i});
    }
    CHECK(ln == doctest::Approx(rn).epsilon(1e-10));
  }
}

TEST_CASE("split_truncated: rank-1 input truncates without error") {
  std::mt19937_64 rng(17);
  Tensor u = random_tensor(rng, {"a"}, {6});
  Tensor v = random_tensor(rng, {"b"}, {7});
  Tensor t = contract(u, v);
  auto res = split_truncated(t, {"a"}, TruncationPolicy{1, std::nullopt});
  CHECK(res.truncation_error <= 1e-12);
  CHECK(max_abs_diff(contract(res.left, res.right), t) <= 1e-10);
}

TEST_CASE("split_truncated: error monotone in max_bond, stricter rule wins") {
  std::mt19937_64 rng(19);
  Tensor t = random_tensor(rng, {"a", "b"}, {6, 6});
  double prev = 2.0;
  for (Index k = 1; k <= 6; ++k) {
    auto res = split_truncated(t, {"a"}, TruncationPolicy{k, std::nullopt});
    CHECK(res.truncation_error <= prev + 1e-15);
    prev = res.truncation_error;
  }

  // sigma = (2, 1): rel_threshold .6 alone keeps both cuts to rank 1
  Tensor d({"a", "b"}, {2, 2}, {2, 0, 0, 1});
  auto r1 = split_truncated(d, {"a"}, TruncationPolicy{5, 0.6});
  CHECK(r1.left.dim(r1.bond_label) == 1);
  auto r2 = split_truncated(d, {"a"}, TruncationPolicy{1, 1e-15});
  CHECK(r2.left.dim(r2.bond_label) == 1);
  auto r3 = split_truncated(d, {"a"}, TruncationPolicy{5, 1e-15});
  CHECK(r3.left.dim(r3.bond_label) == 2);
}

TEST_CASE("split_truncated: argument validation") {
  Tensor t({"a", "b"}, {2, 2}, {1, 0, 0, 1});
  CHECK_THROWS(split_truncated(t, {}, TruncationPolicy::exact()));
  CHECK_THROWS(split_truncated(t, {"a", "b"}, TruncationPolicy::exact()));
  CHECK_THROWS(split_truncated(t, {"z"}, TruncationPolicy::exact()));
  CHECK_THROWS(split_truncated(t, {"a"}, TruncationPolicy{}));  // nothing set
  auto named = split_truncated(t, {"a"}, TruncationPolicy::exact(), "mybond");
  CHECK(named.bond_label == "mybond");
  CHECK_THROWS(split_truncated(t, {"a"}, TruncationPolicy::exact(), "b"));
}

TEST_CASE("scale_normalize") {
  Tensor t({"a"}, {2}, {-4, 2});
  auto [n, ls] = scale_normalize(t);
  CHECK(ls == doctest::Approx(std::log(4.0)));
  CHECK(n.at({0}) == -1.0);
  CHECK(n.at({1}) == 0.5);
  CHECK(n.max_abs() == 1.0);

  Tensor z = Tensor::zeros({"a"}, {3});
  CHECK_THROWS(scale_normalize(z));
}
