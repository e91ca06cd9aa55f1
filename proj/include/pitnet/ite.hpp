#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pitnet/engine.hpp"
#include "pitnet/mining.hpp"

namespace pitnet {

// diagonal single-site energies: variable i contributes e0[i] when x_i=0 and
// e1[i] when x_i=1
struct DiagonalHamiltonian {
  std::vector<double> e0;
  std::vector<double> e1;
};

// profit maximization: (e0, e1) = (0, -w) per excavatable block
DiagonalHamiltonian build_hamiltonian(const MineInstance& inst);

enum class EngineKind { Exact, Bmps };

struct Engine {
  EngineKind kind = EngineKind::Exact;
  Index chi = 2;  // BMPS only

  TruncationPolicy policy() const {
    return kind == EngineKind::Exact ? TruncationPolicy::exact()
                                     : TruncationPolicy::bond(chi);
  }
};

struct SolverConfig {
  double tau = 6.0;
  Engine engine{};
  double a = 1.0;  // degeneracy-breaking measurement diag(a, -1)
  double b = 0.0;  // decode threshold: x_i = 1 iff <O_i> < b

  void validate() const;  // tau>0, chi>=1, a>=1, and a>1 requires 0<b<(a-1)/2
  static double default_b(double a) { return a > 1.0 ? (a - 1.0) / 4.0 : 0.0; }
};

class ZeroNormError : public std::runtime_error {
 public:
  explicit ZeroNormError(const std::string& what) : std::runtime_error(what) {}
};

// single exact imaginary-time step: scale every physical leg by
// diag(exp(-tau e0), exp(-tau e1)), renormalizing each site tensor
TensorNetwork apply_ite(const TensorNetwork& net, const DiagonalHamiltonian& h,
                        double tau);

// measurement context. The bra-ket sandwich collapses to a single squared
// layer: with every bond pinned by its copy tensor, an assignment's amplitude
// is one product of entries, so summing amp(x)^2 equals contracting the
// network with every entry squared. The exact engine contracts the double
// layer closed, once for the norm and once per variable; the truncated engine
// runs one boundary sweep per variable with both branch components stacked on
// an open leg so they share every truncation.
class Measurer {
 public:
  Measurer(const TensorNetwork& net, const MiningLayout& layout,
           const Engine& engine,
           const EngineLimits& limits = EngineLimits::from_env());

  int n_vars() const { return static_cast<int>(n0_.size()); }
  // <diag(a,-1)>_var in [-1, a] up to truncation error
  double site(int var, double a = 1.0) const;
  std::vector<double> all_sites(double a = 1.0) const;
  double occupation(int var) const;  // <x_var> in [0, 1]
  double energy(const DiagonalHamiltonian& h) const;
  LogScalar site_norm(int var) const;  // <psi|psi> via this site's environment
  const ContractionStats& stats() const { return stats_; }
  const LayeredNetwork& measure_layer() const { return layer_; }

 private:
  LayeredNetwork layer_;
  std::vector<LogScalar> n0_, n1_;  // per variable, shared log within a site
  ContractionStats stats_;
};

double measure_site(const TensorNetwork& net, const MiningLayout& layout, int var,
                    const Engine& engine, double a = 1.0);
double measure_energy(const TensorNetwork& net, const MiningLayout& layout,
                      const DiagonalHamiltonian& h, const Engine& engine);

inline constexpr double kDegenerateEps = 1e-6;

Solution decode(const TensorNetwork& net, const MiningLayout& layout,
                const MineInstance& inst, const SolverConfig& cfg,
                const EngineLimits& limits = EngineLimits::from_env());

struct SolveResult {
  Solution solution;
  std::vector<double> expectations;   // measured with cfg.a
  std::vector<int> degenerate_sites;  // expectation within kDegenerateEps of
                                      // the exact-degeneracy value
  double energy = 0.0;
  ContractionStats stats;
  double wall_seconds = 0.0;
};

SolveResult solve(const MineInstance& inst, const SolverConfig& cfg,
                  const EngineLimits& limits = EngineLimits::from_env());

}  // namespace pitnet
