#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cssdual/config.hpp"
#include "cssdual/hypergraph.hpp"

namespace cssdual {

// CSS state attached to a hypergraph: the uniform superposition over the
// GF(2) span of the hyperedge indicators, amplitude 2^{-M/2} on each of
// the 2^M support strings. span_basis is a greedy first-come independent
// subset of incidence rows.
struct CssState {
  Hypergraph hypergraph;
  StabilizerSpec spec;
  std::vector<gf2::BitVector> span_basis;

  std::size_t n_qubits() const { return hypergraph.n_vertices(); }
  std::size_t m() const { return span_basis.size(); }
};

CssState build_css(const Hypergraph& h);

// ln <CSS| exp(beta sum_i Z_i) |CSS> = ln[ 2^{-M} sum_{x in span}
// e^{beta (N - 2 wt(x))} ], evaluated in log space over a Gray-code span
// walk. Chunk-parallel with a fixed chunk policy and in-order merge, so
// the result does not depend on the thread count.
double log_partition_q(const CssState& css, double beta,
                       const Caps& caps = {}, unsigned threads = 1);

// Z(beta + d/2) / sqrt(Z(beta) Z(beta + d)), computed as an exponential
// of log-partition differences; lies in (0, 1].
double fidelity(const CssState& css, double beta, double dbeta,
                const Caps& caps = {}, unsigned threads = 1);

// d^2/dbeta^2 of log_partition_q by central differences with one
// Richardson level; step h = 1e-4 * max(1, beta).
double second_log_derivative(const CssState& css, double beta,
                             const Caps& caps = {}, unsigned threads = 1);

// 1 - f''(beta)/8 * dbeta^2; the quadratic (small-dbeta) fidelity law.
double quadratic_fidelity(const CssState& css, double beta, double dbeta,
                          const Caps& caps = {}, unsigned threads = 1);

// (1/N) <G(beta)| sum_i Z_i |G(beta)> as an exact weighted span sum.
double magnetization(const CssState& css, double beta, const Caps& caps = {},
                     unsigned threads = 1);

// Deformed ground state exp{(beta/2) sum Z} |CSS> / sqrt(Z).
struct DeformedGroundState {
  CssState css;
  double beta = 0.0;
  double log_z = 0.0;
};
DeformedGroundState make_deformed(CssState css, double beta,
                                  const Caps& caps = {}, unsigned threads = 1);

// Product of Pauli factors: X on x_support, Z on z_support, overall sign.
struct PauliProduct {
  gf2::BitVector x_support;
  gf2::BitVector z_support;
  int phase = +1;

  static PauliProduct x_type(const gf2::BitVector& support);
  static PauliProduct z_type(const gf2::BitVector& support);
  // action on a real statevector in the computational basis
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

// Dense verification layer. Basis convention used everywhere: states are
// indexed lexicographically with qubit 0 as the most significant bit, so
// |x_0 x_1 ... x_{N-1}> sits at index sum_i x_i << (N-1-i).
std::size_t basis_index(const gf2::BitVector& x);

Eigen::VectorXd dense_css_state(const CssState& css, const Caps& caps = {});
Eigen::VectorXd dense_deformed_state(const CssState& css, double beta,
                                     const Caps& caps = {});

// -sum_{e*} B_{e*} - sum_e A_e + sum_e U_e(beta), with each U_e factor
// expanded as cosh(beta) I - sinh(beta) Z.
Eigen::MatrixXd build_cssm_hamiltonian(const Hypergraph& h, double beta,
                                       const Caps& caps = {});

struct GroundStateReport {
  double beta = 0.0;
  std::size_t n_qubits = 0;
  std::size_t k = 0;
  double max_q_residual = 0.0;   // max_e || Q_e |G> ||
  double max_b_residual = 0.0;   // max_{e*} || (B_{e*} - 1) |G> ||
  double energy_expectation = 0.0;
  double min_eigenvalue = 0.0;
  double spectral_gap = 0.0;
  bool q_pass = false;
  bool b_pass = false;
  bool energy_pass = false;
  bool eigen_pass = false;
  bool all_pass() const { return q_pass && b_pass && energy_pass && eigen_pass; }
};

// Builds |G(beta)> densely, checks the zero-mode and stabilizer
// relations, and confirms by eigensolve that -K is the bottom of the
// spectrum. Residual tolerance 1e-10, eigenvalue tolerance 1e-8.
GroundStateReport verify_ground_state(const Hypergraph& h, double beta,
                                      const Caps& caps = {});

struct GroundSpaceReport {
  std::size_t dimension = 0;
  double ground_energy = 0.0;
  std::size_t n_z_terms = 0;  // Z terms kept in the Hamiltonian
  std::vector<double> candidate_residuals;  // distance to ground space
  bool candidates_contained(double tol = 1e-8) const {
    for (double r : candidate_residuals)
      if (!(r < tol)) return false;
    return true;
  }
};

// Hamiltonian with an explicit Z-term list (dropping the flagged
// non-local ones when asked); reports the ground-space dimension at
// tolerance 1e-8 and whether each candidate sector state — the deformed
// uniform superposition over coset rep + span — lies in that space.
GroundSpaceReport degenerate_ground_space(
    const Hypergraph& h, std::span<const gf2::BitVector> z_terms,
    std::span<const gf2::BitVector> nonlocal_z,
    std::span<const gf2::BitVector> sector_reps, double beta,
    bool drop_nonlocal, const Caps& caps = {});

// Family front-ends: the ring's non-local Z term is the all-ones string;
// the torus keeps its plaquettes and drops the two T_z loops.
GroundSpaceReport ghz_degenerate_ground_space(std::size_t n, double beta,
                                              bool drop_nonlocal,
                                              const Caps& caps = {});
GroundSpaceReport toric_degenerate_ground_space(std::size_t L, double beta,
                                                bool drop_nonlocal,
                                                const Caps& caps = {});

}  // namespace cssdual
