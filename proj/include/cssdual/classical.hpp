#pragma once

#include <cstdint>
#include <string>

#include "cssdual/hypergraph.hpp"

namespace cssdual {

// Ferromagnetic spin model: binary spins on vertices, one -J prod(s_i)
// term per hyperedge, J = 1, k_B = 1, T = 1/beta.
struct SpinModel {
  Hypergraph interactions;

  std::size_t n_spins() const { return interactions.n_vertices(); }
  std::size_t n_terms() const { return interactions.n_edges(); }
};

struct Observables {
  double energy_per_spin = 0.0;
  double energy_err = 0.0;
  double heat_capacity_per_spin = 0.0;
  double heat_capacity_err = 0.0;
  double magnetization_per_spin = 0.0;  // <|m|>
  double magnetization_err = 0.0;
  double binder_cumulant = 0.0;  // 1 - <m^4>/(3<m^2>^2)
  double binder_err = 0.0;
  std::uint64_t n_samples = 0;
};

// ln sum_{s in {+-1}^n} exp(-beta E(s)), Gray-code walk with incremental
// energy updates, log-sum-exp accumulation. Throws resource_error when
// n_spins exceeds exact_cap.
double log_partition_exact(const SpinModel& m, double beta,
                           std::size_t exact_cap = 24);

// Exact weighted sums over all configurations; stderr fields are zero.
Observables observables_exact(const SpinModel& m, double beta,
                              std::size_t exact_cap = 24);

// Closed-form periodic-ring thermodynamics from the 2x2 transfer matrix:
// Z = lambda_+^n + lambda_-^n with lambda_+- = 2cosh(beta), 2sinh(beta).
// Totals (not per spin); derivatives are analytic.
struct RingThermo {
  double log_z = 0.0;
  double energy = 0.0;         // <E> total
  double heat_capacity = 0.0;  // beta^2 d^2 lnZ / dbeta^2, total
};
RingThermo transfer_matrix_ring(std::size_t n, double beta);

// Exact magnetization moments of the periodic ring from an O(n^2)
// transfer walk over the joint (spin, running sum) distribution.
struct RingMagnetization {
  double mean_abs_m = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};
RingMagnetization ring_magnetization_moments(std::size_t n, double beta);

enum class McAlgorithm { Auto, Metropolis, Wolff };

struct McParams {
  std::uint64_t equilibration_sweeps = 10000;
  std::uint64_t measurement_sweeps = 100000;
  std::uint64_t measure_every = 1;
  McAlgorithm algorithm = McAlgorithm::Auto;
};

struct McResult {
  Observables obs;
  std::string algorithm_used;  // "metropolis" | "wolff"
  bool fell_back_to_metropolis = false;
};

// Metropolis single-spin-flip for general hypergraph interactions; Wolff
// cluster updates when every interaction is 2-body (Auto picks Wolff in
// that case). Errors from binning analysis, with jackknife for the
// nonlinear observables. Fully deterministic given (seed, params).
McResult mc_sample(const SpinModel& m, double beta, const McParams& params,
                   std::uint64_t seed);

}  // namespace cssdual
