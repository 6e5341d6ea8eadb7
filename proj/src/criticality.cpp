#include "cssdual/criticality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include "cssdual/errors.hpp"
#include "cssdual/format.hpp"
#include "cssdual/rng.hpp"

namespace cssdual {

std::string family_name(ModelFamily f) {
  return f == ModelFamily::Ring1D ? "ring1d" : "square2d";
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "ring1d") return ModelFamily::Ring1D;
  if (name == "square2d") return ModelFamily::Square2D;
  throw validation_error("unknown model family: " + name);
}

namespace {

ScanCell ring_cell(std::size_t n, double temperature, std::uint64_t seed) {
  const double beta = 1.0 / temperature;
  // Per-site thermodynamics from the leading transfer eigenvalue;
  // magnetization moments from the exact finite-ring distribution.
  const double r = std::tanh(beta);
  ScanCell cell;
  cell.method = "transfer";
  cell.seed = seed;
  cell.obs.energy_per_spin = -r;
  cell.obs.heat_capacity_per_spin = beta * beta * (1.0 - r * r);
  const RingMagnetization mm = ring_magnetization_moments(n, beta);
  cell.obs.magnetization_per_spin = mm.mean_abs_m;
  cell.obs.binder_cumulant = 1.0 - mm.m4 / (3.0 * mm.m2 * mm.m2);
  cell.obs.n_samples = 0;
  return cell;
}

ScanCell square_cell(const SpinModel& model, double temperature,
                     const McParams& mc, std::uint64_t seed,
                     std::size_t exact_cap) {
  const double beta = 1.0 / temperature;
  ScanCell cell;
  cell.seed = seed;
  if (model.n_spins() <= exact_cap) {
    cell.method = "exact";
    cell.obs = observables_exact(model, beta, exact_cap);
  } else {
    const McResult res = mc_sample(model, beta, mc, seed);
    cell.method = res.algorithm_used;
    cell.obs = res.obs;
  }
  return cell;
}

}  // namespace

ScanResult scan(const ScanSpec& spec) {
  if (spec.sizes.size() < 3)
    throw validation_error("scan requires at least 3 sizes");
  if (spec.temperatures.size() < 5)
    throw validation_error("scan requires at least 5 temperatures");
  for (std::size_t i = 0; i + 1 < spec.temperatures.size(); ++i)
    if (!(spec.temperatures[i] < spec.temperatures[i + 1]))
      throw validation_error("temperatures must be strictly increasing");
  for (double t : spec.temperatures)
    if (!(t > 0.0)) throw validation_error("temperatures must be positive");

  ScanResult result;
  result.family = spec.family;
  result.sizes = spec.sizes;
  result.temperatures = spec.temperatures;
  result.cells.assign(spec.sizes.size(),
                      std::vector<ScanCell>(spec.temperatures.size()));

  // Pre-build the square models once per size (rings need no model).
  std::vector<SpinModel> models(spec.sizes.size());
  if (spec.family == ModelFamily::Square2D)
    for (std::size_t i = 0; i < spec.sizes.size(); ++i)
      models[i] = SpinModel{ising_square(spec.sizes[i])};

  const std::uint64_t family_id =
      spec.family == ModelFamily::Ring1D ? 1 : 2;
  const std::size_t n_cells = spec.sizes.size() * spec.temperatures.size();

  auto run_cell = [&](std::size_t flat) {
    const std::size_t si = flat / spec.temperatures.size();
    const std::size_t ti = flat % spec.temperatures.size();
    const std::uint64_t seed = seed_for(
        spec.master_seed, {family_id, spec.sizes[si], ti, /*replica=*/0});
    if (spec.family == ModelFamily::Ring1D)
      result.cells[si][ti] =
          ring_cell(spec.sizes[si], spec.temperatures[ti], seed);
    else
      result.cells[si][ti] = square_cell(
          models[si], spec.temperatures[ti], spec.mc, seed, spec.exact_cap);
  };

  const unsigned workers = std::max(1u, spec.threads);
  if (workers <= 1) {
    for (std::size_t f = 0; f < n_cells; ++f) run_cell(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t f = next.fetch_add(1); f < n_cells;
             f = next.fetch_add(1))
          run_cell(f);
      });
    for (auto& th : pool) th.join();
  }
  return result;
}

PeakEstimate detect_peak(std::span<const double> t, std::span<const double> c,
                         std::span<const double> c_err) {
  if (t.size() < 5)
    throw validation_error("detect_peak requires at least 5 grid points");
  if (t.size() != c.size() || t.size() != c_err.size())
    throw validation_error("detect_peak: mismatched array lengths");

  std::size_t imax = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] > c[imax]) imax = i;

  PeakEstimate est;
  if (imax == 0 || imax + 1 == c.size()) {
    est.at_boundary = true;
    est.t_star = t[imax];
    est.c_star = c[imax];
    est.c_err = c_err[imax];
    return est;
  }

  // exact quadratic through the three points around the maximum
  const double x1 = t[imax - 1], x2 = t[imax], x3 = t[imax + 1];
  const double y1 = c[imax - 1], y2 = c[imax], y3 = c[imax + 1];
  const double a1 = 1.0 / ((x1 - x2) * (x1 - x3));
  const double a2 = 1.0 / ((x2 - x1) * (x2 - x3));
  const double a3 = 1.0 / ((x3 - x1) * (x3 - x2));
  const double c2 = y1 * a1 + y2 * a2 + y3 * a3;  // t^2 coefficient
  const double c1 = -(y1 * a1 * (x2 + x3) + y2 * a2 * (x1 + x3) +
                      y3 * a3 * (x1 + x2));
  if (!(c2 < 0.0)) {
    // not concave around the max; fall back to the grid point
    est.valid = true;
    est.t_star = x2;
    est.c_star = y2;
    est.c_err = c_err[imax];
    est.t_err = 0.5 * std::min(x2 - x1, x3 - x2);
    return est;
  }
  const double t_star = -c1 / (2.0 * c2);
  const double c0 = y2 - c1 * x2 - c2 * x2 * x2;
  est.valid = true;
  est.t_star = t_star;
  est.c_star = c0 + c1 * t_star + c2 * t_star * t_star;

  // error propagation; at the vertex dy*/dy_i is the Lagrange basis there
  const double sig[3] = {c_err[imax - 1], c_err[imax], c_err[imax + 1]};
  const double L1 = (t_star - x2) * (t_star - x3) * a1;
  const double L2 = (t_star - x1) * (t_star - x3) * a2;
  const double L3 = (t_star - x1) * (t_star - x2) * a3;
  est.c_err = std::sqrt(L1 * L1 * sig[0] * sig[0] + L2 * L2 * sig[1] * sig[1] +
                        L3 * L3 * sig[2] * sig[2]);
  const double b_part[3] = {-a1 * (x2 + x3), -a2 * (x1 + x3),
                            -a3 * (x1 + x2)};
  const double a_part[3] = {a1, a2, a3};
  double terr_sq = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = -(b_part[i] * c2 - a_part[i] * c1) / (2.0 * c2 * c2);
    terr_sq += d * d * sig[i] * sig[i];
  }
  est.t_err = std::sqrt(terr_sq);
  return est;
}

CrossingEstimate binder_crossing(const ScanResult& sc) {
  CrossingEstimate est;
  if (sc.sizes.size() < 2)
    throw validation_error("binder_crossing requires at least 2 sizes");
  const std::size_t nt = sc.temperatures.size();
  std::vector<double> pair_errs;

  for (std::size_t i = 0; i < sc.sizes.size(); ++i)
    for (std::size_t j = i + 1; j < sc.sizes.size(); ++j) {
      std::vector<double> d(nt), sg(nt);
      for (std::size_t k = 0; k < nt; ++k) {
        const Observables& a = sc.cells[i][k].obs;
        const Observables& b = sc.cells[j][k].obs;
        d[k] = a.binder_cumulant - b.binder_cumulant;
        sg[k] = std::max(std::hypot(a.binder_err, b.binder_err), 1e-12);
      }
      // last significantly-negative point, then first significantly
      // positive one after it
      std::ptrdiff_t lo = -1;
      for (std::size_t k = 0; k < nt; ++k)
        if (d[k] < -sg[k]) lo = static_cast<std::ptrdiff_t>(k);
      if (lo < 0) continue;
      std::size_t hi = nt;
      for (std::size_t k = static_cast<std::size_t>(lo) + 1; k < nt; ++k)
        if (d[k] > sg[k]) {
          hi = k;
          break;
        }
      if (hi == nt) continue;
      const std::size_t a = static_cast<std::size_t>(lo);
      const double span = sc.temperatures[hi] - sc.temperatures[a];
      const double cross =
          sc.temperatures[a] - d[a] * span / (d[hi] - d[a]);
      est.pairwise.push_back(cross);
      pair_errs.push_back(span * (sg[a] + sg[hi]) /
                          std::abs(d[hi] - d[a]));
    }

  if (est.pairwise.empty()) return est;  // found = false: flagged
  est.found = true;
  est.tc = std::accumulate(est.pairwise.begin(), est.pairwise.end(), 0.0) /
           static_cast<double>(est.pairwise.size());
  double spread = 0.0;
  for (double p : est.pairwise) spread = std::max(spread, std::abs(p - est.tc));
  double perr = 0.0;
  for (double e : pair_errs) perr = std::max(perr, e);
  est.err = std::max(spread, perr);
  return est;
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::Topological:
      return "topological";
    case Decision::NotTopological:
      return "not-topological";
    case Decision::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

std::string growth_note(const std::vector<std::size_t>& sizes,
                        const std::vector<PeakEstimate>& peaks) {
  // descriptive fit Cv* = a + b ln L; never used in the decision
  const std::size_t n = sizes.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = peaks[i].c_star;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return "Cv* growth fit unavailable";
  const double b = (nn * sxy - sx * sy) / denom;
  const double a = (sy - b * sx) / nn;
  double rms = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    const double r = peaks[i].c_star - (a + b * x);
    rms += r * r;
  }
  rms = std::sqrt(rms / nn);
  return "Cv* vs ln L fit: slope " + fmt17(b) + ", intercept " + fmt17(a) +
         ", rms residual " + fmt17(rms) + " (descriptive only)";
}

}  // namespace

Verdict finite_size_verdict(const ScanResult& sc, const VerdictParams& params) {
  if (sc.sizes.size() < 3)
    throw validation_error("verdict requires a scan over >= 3 sizes");
  const std::size_t ns = sc.sizes.size();
  const std::size_t nt = sc.temperatures.size();

  Verdict v;
  v.sizes = sc.sizes;
  for (std::size_t i = 0; i < ns; ++i) {
    std::vector<double> c(nt), cerr(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      c[k] = sc.cells[i][k].obs.heat_capacity_per_spin;
      cerr[k] = sc.cells[i][k].obs.heat_capacity_err;
    }
    v.peaks.push_back(detect_peak(sc.temperatures, c, cerr));
  }
  v.alpha_note = growth_note(sc.sizes, v.peaks);

  const double spacing =
      (sc.temperatures.back() - sc.temperatures.front()) /
      static_cast<double>(nt - 1);
  const double t_lo = sc.temperatures.front() + params.edge_margin * spacing;
  const double t_hi = sc.temperatures.back() - params.edge_margin * spacing;

  bool all_valid = true;
  for (const PeakEstimate& p : v.peaks)
    if (!p.valid || p.at_boundary) all_valid = false;

  auto comb_err = [&](std::size_t i, std::size_t j) {
    return std::hypot(v.peaks[i].c_err, v.peaks[j].c_err);
  };

  auto heights_saturated = [&]() {
    const double dc = v.peaks[ns - 1].c_star - v.peaks[ns - 2].c_star;
    return dc <= std::max(params.sigma * comb_err(ns - 2, ns - 1),
                          params.saturation_rel_floor *
                              std::abs(v.peaks[ns - 2].c_star));
  };

  if (!all_valid) {
    // even with flagged locations the height trend is meaningful: flat or
    // shrinking maxima rule out a divergence
    if (heights_saturated()) {
      v.decision = Decision::NotTopological;
      v.rationale =
          "Cv maxima do not grow across the largest sizes (peaks flagged)";
      return v;
    }
    // a peak running off the low-T end of the grid as sizes grow is the
    // zero-temperature-transition signature
    bool low_edge_drift = true;
    for (std::size_t i = 0; i + 1 < ns; ++i)
      if (v.peaks[i + 1].t_star > v.peaks[i].t_star + 0.5 * spacing)
        low_edge_drift = false;
    if (v.peaks.back().at_boundary &&
        v.peaks.back().t_star <= sc.temperatures.front() + spacing &&
        low_edge_drift) {
      v.decision = Decision::NotTopological;
      v.rationale = "peak location drifts into the low-temperature grid edge";
      return v;
    }
    v.decision = Decision::Inconclusive;
    v.rationale = "peak detection flagged (boundary or non-concave)";
    return v;
  }

  // (a) peak heights strictly increasing, significant, and fast enough
  bool growth_ok = true;
  for (std::size_t i = 0; i + 1 < ns; ++i)
    if (!(v.peaks[i + 1].c_star >
          v.peaks[i].c_star + params.sigma * comb_err(i, i + 1)))
      growth_ok = false;
  const double doublings =
      std::log2(static_cast<double>(sc.sizes.back()) /
                static_cast<double>(sc.sizes.front()));
  const double required =
      v.peaks.front().c_star *
      std::pow(1.0 + params.growth_per_doubling, doublings);
  if (!(v.peaks.back().c_star - params.sigma * comb_err(0, ns - 1) >=
        required))
    growth_ok = false;

  // (b) peak locations converge inside the grid
  bool converge_ok = true;
  for (std::size_t i = 0; i + 2 < ns; ++i) {
    const double d1 = std::abs(v.peaks[i + 1].t_star - v.peaks[i].t_star);
    const double d2 = std::abs(v.peaks[i + 2].t_star - v.peaks[i + 1].t_star);
    const double slack =
        std::max(0.5 * spacing,
                 params.sigma * (v.peaks[i + 1].t_err + v.peaks[i + 2].t_err));
    if (d2 > d1 + slack) converge_ok = false;
  }
  const double t_last = v.peaks.back().t_star;
  if (!(t_last >= t_lo && t_last <= t_hi)) converge_ok = false;

  // saturation across the two largest sizes (flat or shrinking heights)
  const bool saturated = heights_saturated();

  // drift toward an edge
  bool drift_to_edge = true;
  for (std::size_t i = 0; i + 1 < ns; ++i)
    if (std::abs(v.peaks[i + 1].t_star) >
        std::abs(v.peaks[i].t_star) - 1e-12)
      drift_to_edge = false;
  drift_to_edge = drift_to_edge && v.peaks.back().t_star < t_lo;

  if (growth_ok && converge_ok) {
    v.decision = Decision::Topological;
    const CrossingEstimate cross = binder_crossing(sc);
    if (cross.found) {
      v.has_tc = true;
      v.tc = cross.tc;
      v.tc_err = cross.err;
      v.rationale =
          "Cv peaks grow with size and converge; Tc from Binder crossing";
    } else {
      v.has_tc = true;
      v.tc = v.peaks.back().t_star;
      v.tc_err = std::abs(v.peaks.back().t_star - v.peaks[ns - 2].t_star) +
                 v.peaks.back().t_err;
      v.rationale =
          "Cv peaks grow with size and converge; Tc from largest-size peak";
    }
  } else if (saturated || drift_to_edge) {
    v.decision = Decision::NotTopological;
    v.rationale = saturated
                      ? "Cv peak heights saturate across the largest sizes"
                      : "Cv peak drifts toward the grid edge";
  } else {
    v.decision = Decision::Inconclusive;
    v.rationale = "growth/convergence criteria not met but no saturation";
  }
  return v;
}

void write_scan_csv(const ScanResult& sc, std::ostream& out) {
  out << "model,L,T,method,E,E_err,Cv,Cv_err,m,m_err,binder,binder_err,seed\n";
  const std::string model = family_name(sc.family);
  for (std::size_t i = 0; i < sc.sizes.size(); ++i)
    for (std::size_t k = 0; k < sc.temperatures.size(); ++k) {
      const ScanCell& cell = sc.cells[i][k];
      const Observables& o = cell.obs;
      out << model << ',' << sc.sizes[i] << ',' << fmt17(sc.temperatures[k])
          << ',' << cell.method << ',' << fmt17(o.energy_per_spin) << ','
          << fmt17(o.energy_err) << ',' << fmt17(o.heat_capacity_per_spin)
          << ',' << fmt17(o.heat_capacity_err) << ','
          << fmt17(o.magnetization_per_spin) << ','
          << fmt17(o.magnetization_err) << ',' << fmt17(o.binder_cumulant)
          << ',' << fmt17(o.binder_err) << ',' << cell.seed << '\n';
    }
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json peaks = nlohmann::json::array();
  for (std::size_t i = 0; i < v.peaks.size(); ++i) {
    const PeakEstimate& p = v.peaks[i];
    peaks.push_back({{"L", i < v.sizes.size() ? v.sizes[i] : 0},
                     {"t_star", p.t_star},
                     {"c_star", p.c_star},
                     {"c_err", p.c_err},
                     {"t_err", p.t_err},
                     {"at_boundary", p.at_boundary},
                     {"valid", p.valid}});
  }
  nlohmann::json j = {{"decision", decision_name(v.decision)},
                      {"peaks", peaks},
                      {"alpha_note", v.alpha_note},
                      {"rationale", v.rationale}};
  if (v.has_tc)
    j["tc_estimate"] = {{"value", v.tc}, {"err", v.tc_err}};
  else
    j["tc_estimate"] = nullptr;
  return j;
}

}  // namespace cssdual
