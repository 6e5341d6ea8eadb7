#include "cssdual/duality.hpp"

#include <cmath>

#include "cssdual/classical.hpp"
#include "cssdual/errors.hpp"
#include "cssdual/quantum.hpp"

namespace cssdual {

namespace {
constexpr double kTol = 1e-10;
constexpr double kShrinkEpsilon = 0.2;
}  // namespace

CorrespondenceReport verify_partition_correspondence(
    const Hypergraph& h, std::span<const double> betas, const Caps& caps,
    unsigned threads) {
  if (betas.empty()) throw validation_error("beta grid must be non-empty");
  const SpinModel dual_model{dual(h)};
  const CssState css = build_css(h);

  CorrespondenceReport rep;
  rep.expected_constant =
      static_cast<double>(h.n_edges()) * std::log(2.0);
  for (double beta : betas) {
    rep.beta_grid.push_back(beta);
    const double lz_cl =
        log_partition_exact(dual_model, beta, caps.exact_cap);
    const double lz_q = log_partition_q(css, beta, caps, threads);
    rep.log_ratio.push_back(lz_cl - lz_q);
  }
  rep.constant = rep.log_ratio.front();
  for (double r : rep.log_ratio) {
    rep.max_deviation_from_constant =
        std::max(rep.max_deviation_from_constant, std::abs(r - rep.constant));
    rep.max_deviation_from_expected = std::max(
        rep.max_deviation_from_expected, std::abs(r - rep.expected_constant));
  }
  const bool const_ok = rep.max_deviation_from_constant < kTol;
  const bool value_ok = rep.max_deviation_from_expected < kTol;
  rep.identity_checks.push_back(
      {"log_ratio_constant_in_beta", const_ok,
       rep.max_deviation_from_constant});
  rep.identity_checks.push_back(
      {"constant_equals_edges_ln2", value_ok,
       rep.max_deviation_from_expected});
  rep.pass = const_ok && value_ok;
  return rep;
}

FidelityHeatReport verify_fidelity_heat_capacity(const Hypergraph& h,
                                                 double beta,
                                                 std::span<const double> dbetas,
                                                 const Caps& caps,
                                                 unsigned threads) {
  if (!(beta > 0.0)) throw validation_error("beta must be positive");
  const SpinModel dual_model{dual(h)};
  const CssState css = build_css(h);

  FidelityHeatReport rep;
  rep.beta = beta;
  const Observables obs =
      observables_exact(dual_model, beta, caps.exact_cap);
  rep.cv_dual_total = obs.heat_capacity_per_spin *
                      static_cast<double>(dual_model.n_spins());

  for (double db : dbetas) {
    const double f = fidelity(css, beta, db, caps, threads);
    const double quad =
        1.0 - rep.cv_dual_total * db * db / (8.0 * beta * beta);
    rep.dbetas.push_back(db);
    rep.fidelity_exact.push_back(f);
    rep.fidelity_quadratic.push_back(quad);
    rep.residuals.push_back(std::abs(f - quad));
  }

  for (std::size_t i = 0; i < rep.dbetas.size(); ++i) {
    const double db = rep.dbetas[i];
    if (db != 0.0)
      rep.fitted_cubic_coeff = std::max(
          rep.fitted_cubic_coeff, rep.residuals[i] / (db * db * db));
  }

  // residuals must fall at least as fast as dbeta^{3(1-eps)}
  rep.shrinkage_pass = true;
  for (std::size_t i = 0; i + 1 < rep.dbetas.size(); ++i) {
    const double step = rep.dbetas[i] / rep.dbetas[i + 1];
    if (!(step > 1.0)) continue;
    const double required = std::pow(step, 3.0 * (1.0 - kShrinkEpsilon));
    if (rep.residuals[i + 1] == 0.0) continue;
    const double got = rep.residuals[i] / rep.residuals[i + 1];
    if (got < required) rep.shrinkage_pass = false;
  }
  rep.pass = rep.shrinkage_pass;
  return rep;
}

MagnetizationEnergyReport verify_magnetization_energy(
    const Hypergraph& h, std::span<const double> betas, const Caps& caps,
    unsigned threads) {
  if (betas.empty()) throw validation_error("beta grid must be non-empty");
  const SpinModel dual_model{dual(h)};
  const CssState css = build_css(h);
  const double n = static_cast<double>(h.n_vertices());

  MagnetizationEnergyReport rep;
  for (double beta : betas) {
    const double m = magnetization(css, beta, caps, threads);
    const Observables obs =
        observables_exact(dual_model, beta, caps.exact_cap);
    const double e_cl = obs.energy_per_spin *
                        static_cast<double>(dual_model.n_spins());
    rep.betas.push_back(beta);
    rep.quantum_side.push_back(n * m);
    rep.classical_side.push_back(-e_cl);
    rep.residuals.push_back(std::abs(n * m + e_cl));
    rep.max_residual = std::max(rep.max_residual, rep.residuals.back());
  }
  rep.pass = rep.max_residual < kTol;
  return rep;
}

nlohmann::json to_json(const CorrespondenceReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.identity_checks)
    checks.push_back(
        {{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}});
  return {{"betas", r.beta_grid},
          {"log_ratio", r.log_ratio},
          {"constant", r.constant},
          {"expected_constant", r.expected_constant},
          {"max_deviation_from_constant", r.max_deviation_from_constant},
          {"max_deviation_from_expected", r.max_deviation_from_expected},
          {"identity_checks", checks},
          {"pass", r.pass}};
}

nlohmann::json to_json(const FidelityHeatReport& r) {
  return {{"beta", r.beta},
          {"cv_dual_total", r.cv_dual_total},
          {"dbetas", r.dbetas},
          {"fidelity_exact", r.fidelity_exact},
          {"fidelity_quadratic", r.fidelity_quadratic},
          {"residuals", r.residuals},
          {"fitted_cubic_coeff", r.fitted_cubic_coeff},
          {"shrinkage_pass", r.shrinkage_pass},
          {"pass", r.pass}};
}

nlohmann::json to_json(const MagnetizationEnergyReport& r) {
  return {{"betas", r.betas},
          {"quantum_side", r.quantum_side},
          {"classical_side", r.classical_side},
          {"residuals", r.residuals},
          {"max_residual", r.max_residual},
          {"pass", r.pass}};
}

}  // namespace cssdual
