#include "cssdual/classical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "cssdual/errors.hpp"
#include "cssdual/rng.hpp"

namespace cssdual {

namespace {

struct EdgeIndex {
  std::vector<std::vector<std::uint32_t>> vertex_edges;  // vertex -> edge ids
  std::size_t n_spins = 0;
  std::size_t n_edges = 0;
};

EdgeIndex build_index(const SpinModel& m) {
  EdgeIndex idx;
  idx.n_spins = m.n_spins();
  idx.n_edges = m.n_terms();
  idx.vertex_edges.resize(idx.n_spins);
  for (std::size_t e = 0; e < m.n_terms(); ++e)
    for (std::uint32_t v : m.interactions.edge(e))
      idx.vertex_edges[v].push_back(static_cast<std::uint32_t>(e));
  return idx;
}

// Streaming log-sum-exp accumulator set: rescales all partial sums when a
// larger exponent appears, so exp() never overflows.
struct ShiftedSums {
  double amax = -std::numeric_limits<double>::infinity();
  std::vector<double> sums;

  explicit ShiftedSums(std::size_t k) : sums(k, 0.0) {}

  // returns weight exp(a - amax) after rescaling
  double admit(double a) {
    if (a > amax) {
      if (std::isfinite(amax)) {
        const double scale = std::exp(amax - a);
        for (double& s : sums) s *= scale;
      }
      amax = a;
    }
    return std::exp(a - amax);
  }
};

}  // namespace

double log_partition_exact(const SpinModel& m, double beta,
                           std::size_t exact_cap) {
  const std::size_t n = m.n_spins();
  if (n > exact_cap)
    throw resource_error("exact enumeration over 2^" + std::to_string(n) +
                         " spin configurations exceeds cap 2^" +
                         std::to_string(exact_cap));
  if (!std::isfinite(beta)) throw validation_error("beta must be finite");

  const EdgeIndex idx = build_index(m);
  std::vector<std::int8_t> prod(idx.n_edges, 1);
  std::int64_t energy = -static_cast<std::int64_t>(idx.n_edges);

  ShiftedSums acc(1);
  acc.sums[0] += acc.admit(-beta * static_cast<double>(energy));
  const std::uint64_t total = n == 0 ? 1 : (std::uint64_t{1} << n);
  for (std::uint64_t t = 1; t < total; ++t) {
    const auto j = static_cast<std::size_t>(std::countr_zero(t));
    for (std::uint32_t e : idx.vertex_edges[j]) {
      energy += 2 * prod[e];
      prod[e] = static_cast<std::int8_t>(-prod[e]);
    }
    acc.sums[0] += acc.admit(-beta * static_cast<double>(energy));
  }
  return acc.amax + std::log(acc.sums[0]);
}

Observables observables_exact(const SpinModel& m, double beta,
                              std::size_t exact_cap) {
  const std::size_t n = m.n_spins();
  if (n > exact_cap)
    throw resource_error("exact enumeration over 2^" + std::to_string(n) +
                         " spin configurations exceeds cap 2^" +
                         std::to_string(exact_cap));
  if (n == 0) throw validation_error("spin model has no spins");
  if (!std::isfinite(beta)) throw validation_error("beta must be finite");

  const EdgeIndex idx = build_index(m);
  std::vector<std::int8_t> spin(n, 1);
  std::vector<std::int8_t> prod(idx.n_edges, 1);
  std::int64_t energy = -static_cast<std::int64_t>(idx.n_edges);
  std::int64_t mag = static_cast<std::int64_t>(n);

  // sums: Z, E, E^2, |m|, m^2, m^4
  ShiftedSums acc(6);
  auto tally = [&]() {
    const double w = acc.admit(-beta * static_cast<double>(energy));
    const double e = static_cast<double>(energy);
    const double mm = static_cast<double>(mag) / static_cast<double>(n);
    const double m2 = mm * mm;
    acc.sums[0] += w;
    acc.sums[1] += w * e;
    acc.sums[2] += w * e * e;
    acc.sums[3] += w * std::abs(mm);
    acc.sums[4] += w * m2;
    acc.sums[5] += w * m2 * m2;
  };

  tally();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < total; ++t) {
    const auto j = static_cast<std::size_t>(std::countr_zero(t));
    for (std::uint32_t e : idx.vertex_edges[j]) {
      energy += 2 * prod[e];
      prod[e] = static_cast<std::int8_t>(-prod[e]);
    }
    mag -= 2 * spin[j];
    spin[j] = static_cast<std::int8_t>(-spin[j]);
    tally();
  }

  const double z = acc.sums[0];
  const double e_mean = acc.sums[1] / z;
  const double e2_mean = acc.sums[2] / z;
  const double m2_mean = acc.sums[4] / z;
  const double m4_mean = acc.sums[5] / z;

  Observables obs;
  obs.energy_per_spin = e_mean / static_cast<double>(n);
  obs.heat_capacity_per_spin =
      beta * beta * (e2_mean - e_mean * e_mean) / static_cast<double>(n);
  obs.magnetization_per_spin = acc.sums[3] / z;
  obs.binder_cumulant = 1.0 - m4_mean / (3.0 * m2_mean * m2_mean);
  obs.n_samples = total;
  return obs;
}

RingThermo transfer_matrix_ring(std::size_t n, double beta) {
  if (n < 2) throw validation_error("transfer_matrix_ring requires n >= 2");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw validation_error("beta must be finite and non-negative");
  const double nn = static_cast<double>(n);
  const double r = std::tanh(beta);
  const double dr = 1.0 - r * r;  // dr/dbeta = sech^2

  const double u = std::pow(r, nn);
  const double du = nn * std::pow(r, nn - 1.0) * dr;
  const double d2u =
      nn * std::pow(r, nn - 2.0) * dr * ((nn - 1.0) * dr - 2.0 * r * r);

  RingThermo out;
  out.log_z = nn * (std::log(2.0) + std::log(std::cosh(beta))) + std::log1p(u);
  const double g1 = du / (1.0 + u);
  const double g2 = d2u / (1.0 + u) - g1 * g1;
  out.energy = -(nn * r + g1);
  out.heat_capacity = beta * beta * (nn * dr + g2);
  return out;
}

RingMagnetization ring_magnetization_moments(std::size_t n, double beta) {
  if (n < 2)
    throw validation_error("ring_magnetization_moments requires n >= 2");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw validation_error("beta must be finite and non-negative");

  // Bond weights rescaled by exp(-beta) per bond: aligned -> 1,
  // anti-aligned -> exp(-2 beta). Joint distribution over
  // (last spin, running sum) keeps everything in [0, 1].
  const double wflip = std::exp(-2.0 * beta);
  const std::size_t width = 2 * n + 1;  // running sum offset by n
  // dist[s][p]: s = 0 for spin +1, 1 for spin -1
  std::vector<double> w_total(width, 0.0);

  std::vector<double> cur(2 * width, 0.0), nxt(2 * width, 0.0);
  for (int s0 = 0; s0 < 2; ++s0) {
    std::fill(cur.begin(), cur.end(), 0.0);
    const int sv0 = s0 == 0 ? 1 : -1;
    cur[static_cast<std::size_t>(s0) * width + (n + sv0)] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (int s = 0; s < 2; ++s) {
        const std::size_t base = static_cast<std::size_t>(s) * width;
        for (std::size_t p = 0; p < width; ++p) {
          const double w = cur[base + p];
          if (w == 0.0) continue;
          for (int s2 = 0; s2 < 2; ++s2) {
            const int sv2 = s2 == 0 ? 1 : -1;
            const double bond = (s == s2) ? 1.0 : wflip;
            nxt[static_cast<std::size_t>(s2) * width + (p + sv2)] += w * bond;
          }
        }
      }
      std::swap(cur, nxt);
    }
    // close the ring back to s0
    for (int s = 0; s < 2; ++s) {
      const double bond = (s == s0) ? 1.0 : wflip;
      const std::size_t base = static_cast<std::size_t>(s) * width;
      for (std::size_t p = 0; p < width; ++p)
        w_total[p] += cur[base + p] * bond;
    }
  }

  double z = 0.0, s_abs = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::size_t p = 0; p < width; ++p) {
    const double w = w_total[p];
    if (w == 0.0) continue;
    const double mm = (static_cast<double>(p) - static_cast<double>(n)) /
                      static_cast<double>(n);
    z += w;
    s_abs += w * std::abs(mm);
    s2 += w * mm * mm;
    s4 += w * mm * mm * mm * mm;
  }
  return RingMagnetization{s_abs / z, s2 / z, s4 / z};
}

namespace {

// Binning analysis over a measurement series: bin means at doubling bin
// sizes; the quoted error is the plateau (max) stderr among levels that
// still hold at least kMinBins bins.
constexpr std::size_t kMinBins = 16;

std::vector<double> bin_means(const std::vector<double>& x,
                              std::size_t bin_size) {
  const std::size_t nb = x.size() / bin_size;
  std::vector<double> out(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < bin_size; ++i) s += x[b * bin_size + i];
    out[b] = s / static_cast<double>(bin_size);
  }
  return out;
}

double stderr_of_means(const std::vector<double>& means) {
  const std::size_t nb = means.size();
  if (nb < 2) return 0.0;
  const double mean =
      std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nb);
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(nb - 1);
  return std::sqrt(var / static_cast<double>(nb));
}

double binned_error(const std::vector<double>& x) {
  double best = 0.0;
  for (std::size_t bs = 1; x.size() / bs >= kMinBins; bs *= 2)
    best = std::max(best, stderr_of_means(bin_means(x, bs)));
  return best;
}

std::size_t plateau_bin_size(std::size_t n_samples) {
  std::size_t bs = 1;
  while (n_samples / (bs * 2) >= kMinBins) bs *= 2;
  return bs;
}

// Jackknife error of f(inputs...) over leave-one-bin-out means.
template <class F>
std::pair<double, double> jackknife(
    const std::vector<std::vector<double>>& bin_series, F&& f) {
  const std::size_t nb = bin_series.at(0).size();
  const std::size_t k = bin_series.size();
  std::vector<double> totals(k, 0.0);
  for (std::size_t q = 0; q < k; ++q)
    totals[q] = std::accumulate(bin_series[q].begin(), bin_series[q].end(), 0.0);

  std::vector<double> args(k, 0.0);
  for (std::size_t q = 0; q < k; ++q) args[q] = totals[q] / nb;
  const double full = f(args);
  if (nb < 2) return {full, 0.0};

  std::vector<double> theta(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t q = 0; q < k; ++q)
      args[q] = (totals[q] - bin_series[q][b]) / static_cast<double>(nb - 1);
    theta[b] = f(args);
  }
  const double tbar =
      std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(nb);
  double var = 0.0;
  for (double v : theta) var += (v - tbar) * (v - tbar);
  var *= static_cast<double>(nb - 1) / static_cast<double>(nb);
  return {full, std::sqrt(var)};
}

struct McState {
  std::vector<std::int8_t> spin;
  std::vector<std::int8_t> prod;  // per-edge product
  std::int64_t energy = 0;
  std::int64_t mag = 0;
};

McState hot_start(const SpinModel& m, const EdgeIndex& idx, SplitMix64& rng) {
  McState st;
  st.spin.resize(idx.n_spins);
  for (auto& s : st.spin) s = rng.next_bool() ? 1 : -1;
  st.prod.assign(idx.n_edges, 1);
  for (std::size_t e = 0; e < idx.n_edges; ++e) {
    std::int8_t p = 1;
    for (std::uint32_t v : m.interactions.edge(e)) p *= st.spin[v];
    st.prod[e] = p;
  }
  st.energy = 0;
  for (std::int8_t p : st.prod) st.energy -= p;
  st.mag = 0;
  for (std::int8_t s : st.spin) st.mag += s;
  return st;
}

void metropolis_sweep(const EdgeIndex& idx, McState& st, double beta,
                      SplitMix64& rng) {
  for (std::size_t i = 0; i < idx.n_spins; ++i) {
    std::int64_t delta = 0;
    for (std::uint32_t e : idx.vertex_edges[i]) delta += 2 * st.prod[e];
    if (delta <= 0 ||
        rng.next_double() < std::exp(-beta * static_cast<double>(delta))) {
      for (std::uint32_t e : idx.vertex_edges[i])
        st.prod[e] = static_cast<std::int8_t>(-st.prod[e]);
      st.mag -= 2 * st.spin[i];
      st.spin[i] = static_cast<std::int8_t>(-st.spin[i]);
      st.energy += delta;
    }
  }
}

struct WolffWork {
  // per vertex: (neighbour, edge id) for each incident 2-body bond
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj;
  std::vector<std::uint8_t> in_cluster;
  std::vector<std::uint32_t> members;
  std::vector<std::uint32_t> stack;
};

WolffWork wolff_setup(const SpinModel& m) {
  WolffWork w;
  w.adj.resize(m.n_spins());
  for (std::size_t e = 0; e < m.n_terms(); ++e) {
    const auto& ed = m.interactions.edge(e);
    w.adj[ed[0]].push_back({ed[1], static_cast<std::uint32_t>(e)});
    w.adj[ed[1]].push_back({ed[0], static_cast<std::uint32_t>(e)});
  }
  w.in_cluster.assign(m.n_spins(), 0);
  return w;
}

void wolff_step(const EdgeIndex& idx, WolffWork& w, McState& st, double p_add,
                SplitMix64& rng) {
  const auto seed =
      static_cast<std::uint32_t>(rng.next_below(idx.n_spins));
  const std::int8_t cluster_spin = st.spin[seed];
  w.members.clear();
  w.stack.clear();
  w.stack.push_back(seed);
  w.members.push_back(seed);
  w.in_cluster[seed] = 1;
  st.spin[seed] = static_cast<std::int8_t>(-cluster_spin);
  while (!w.stack.empty()) {
    const std::uint32_t i = w.stack.back();
    w.stack.pop_back();
    for (const auto& [j, e] : w.adj[i]) {
      if (st.spin[j] == cluster_spin && rng.next_double() < p_add) {
        w.in_cluster[j] = 1;
        st.spin[j] = static_cast<std::int8_t>(-cluster_spin);
        w.stack.push_back(j);
        w.members.push_back(j);
      }
    }
  }
  // boundary bonds change sign; interior bonds are invariant
  for (std::uint32_t i : w.members) {
    for (const auto& [j, e] : w.adj[i]) {
      if (!w.in_cluster[j]) {
        st.energy += 2 * st.prod[e];
        st.prod[e] = static_cast<std::int8_t>(-st.prod[e]);
      }
    }
  }
  st.mag -= 2 * static_cast<std::int64_t>(cluster_spin) *
            static_cast<std::int64_t>(w.members.size());
  for (std::uint32_t i : w.members) w.in_cluster[i] = 0;
}

}  // namespace

McResult mc_sample(const SpinModel& m, double beta, const McParams& params,
                   std::uint64_t seed) {
  if (m.n_spins() == 0) throw validation_error("spin model has no spins");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw validation_error("beta must be finite and non-negative");
  if (params.equilibration_sweeps == 0 || params.measurement_sweeps == 0 ||
      params.measure_every == 0)
    throw validation_error("sweep counts must be positive");

  const EdgeIndex idx = build_index(m);
  bool all_two_body = true;
  for (const auto& e : m.interactions.edges())
    if (e.size() != 2) all_two_body = false;

  McResult result;
  bool use_wolff = false;
  switch (params.algorithm) {
    case McAlgorithm::Auto:
      use_wolff = all_two_body;
      break;
    case McAlgorithm::Metropolis:
      use_wolff = false;
      break;
    case McAlgorithm::Wolff:
      use_wolff = all_two_body;
      result.fell_back_to_metropolis = !all_two_body;
      break;
  }
  result.algorithm_used = use_wolff ? "wolff" : "metropolis";

  SplitMix64 rng(seed);
  McState st = hot_start(m, idx, rng);
  WolffWork ww;
  double p_add = 0.0;
  if (use_wolff) {
    ww = wolff_setup(m);
    p_add = -std::expm1(-2.0 * beta);  // 1 - exp(-2 beta J), J = 1
  }

  auto sweep = [&]() {
    if (use_wolff)
      wolff_step(idx, ww, st, p_add, rng);
    else
      metropolis_sweep(idx, st, beta, rng);
  };

  for (std::uint64_t t = 0; t < params.equilibration_sweeps; ++t) sweep();

  const std::uint64_t n_meas =
      params.measurement_sweeps / params.measure_every;
  std::vector<double> e_series, m_series;
  e_series.reserve(n_meas);
  m_series.reserve(n_meas);
  for (std::uint64_t t = 0; t < params.measurement_sweeps; ++t) {
    sweep();
    if ((t + 1) % params.measure_every == 0) {
      e_series.push_back(static_cast<double>(st.energy));
      m_series.push_back(static_cast<double>(st.mag) /
                         static_cast<double>(idx.n_spins));
    }
  }

  const auto n = static_cast<double>(idx.n_spins);
  const std::size_t ns = e_series.size();
  std::vector<double> e2(ns), mabs(ns), m2(ns), m4(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    e2[i] = e_series[i] * e_series[i];
    mabs[i] = std::abs(m_series[i]);
    m2[i] = m_series[i] * m_series[i];
    m4[i] = m2[i] * m2[i];
  }

  Observables obs;
  obs.n_samples = ns;
  const std::size_t bs = plateau_bin_size(ns);
  const std::size_t usable = (ns / bs) * bs;

  auto mean_of = [usable](const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.begin() + usable, 0.0) /
           static_cast<double>(usable);
  };

  obs.energy_per_spin = mean_of(e_series) / n;
  obs.energy_err = binned_error(e_series) / n;
  obs.magnetization_per_spin = mean_of(mabs);
  obs.magnetization_err = binned_error(mabs);

  const std::vector<std::vector<double>> cv_bins = {bin_means(e_series, bs),
                                                    bin_means(e2, bs)};
  auto [cv, cv_err] = jackknife(cv_bins, [&](const std::vector<double>& a) {
    return beta * beta * (a[1] - a[0] * a[0]) / n;
  });
  obs.heat_capacity_per_spin = cv;
  obs.heat_capacity_err = cv_err;

  const std::vector<std::vector<double>> b_bins = {bin_means(m2, bs),
                                                   bin_means(m4, bs)};
  auto [binder, binder_err] =
      jackknife(b_bins, [](const std::vector<double>& a) {
        return 1.0 - a[1] / (3.0 * a[0] * a[0]);
      });
  obs.binder_cumulant = binder;
  obs.binder_err = binder_err;

  result.obs = obs;
  return result;
}

}  // namespace cssdual
