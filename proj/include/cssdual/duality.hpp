#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssdual/config.hpp"
#include "cssdual/hypergraph.hpp"

namespace cssdual {

inline constexpr std::array<double, 5> kDefaultBetaGrid = {0.1, 0.25, 0.5,
                                                           1.0, 2.0};

struct IdentityCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

// ln Z_cl(dual H) - ln Z_q(H) over a beta grid. The difference must be a
// beta-independent constant equal to |E| ln 2; any deviation falsifies
// the implementation. Identities are compared on totals, not densities.
struct CorrespondenceReport {
  std::vector<double> beta_grid;
  std::vector<double> log_ratio;
  double constant = 0.0;  // log_ratio[0]
  double expected_constant = 0.0;
  double max_deviation_from_constant = 0.0;
  double max_deviation_from_expected = 0.0;
  std::vector<IdentityCheck> identity_checks;
  bool pass = false;
};

CorrespondenceReport verify_partition_correspondence(
    const Hypergraph& h, std::span<const double> betas, const Caps& caps = {},
    unsigned threads = 1);

// |F(beta, dbeta) - (1 - Cv dbeta^2 / (8 beta^2))| with Cv the *total*
// classical heat capacity on the dual; the residual must shrink at least
// cubically (slack epsilon = 0.2) along the dbeta list.
struct FidelityHeatReport {
  double beta = 0.0;
  double cv_dual_total = 0.0;
  std::vector<double> dbetas;
  std::vector<double> fidelity_exact;
  std::vector<double> fidelity_quadratic;
  std::vector<double> residuals;
  double fitted_cubic_coeff = 0.0;  // max residual_i / dbeta_i^3
  bool shrinkage_pass = false;
  bool pass = false;
};

FidelityHeatReport verify_fidelity_heat_capacity(const Hypergraph& h,
                                                 double beta,
                                                 std::span<const double> dbetas,
                                                 const Caps& caps = {},
                                                 unsigned threads = 1);

// N m_H(beta) + <E>_cl(dual, beta) = 0 pointwise to 1e-10 (totals).
struct MagnetizationEnergyReport {
  std::vector<double> betas;
  std::vector<double> quantum_side;    // N * m_H
  std::vector<double> classical_side;  // -<E>_cl on the dual
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool pass = false;
};

MagnetizationEnergyReport verify_magnetization_energy(
    const Hypergraph& h, std::span<const double> betas, const Caps& caps = {},
    unsigned threads = 1);

nlohmann::json to_json(const CorrespondenceReport& r);
nlohmann::json to_json(const FidelityHeatReport& r);
nlohmann::json to_json(const MagnetizationEnergyReport& r);

}  // namespace cssdual
