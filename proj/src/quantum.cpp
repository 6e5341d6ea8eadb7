#include "cssdual/quantum.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Eigenvalues>

#include "cssdual/errors.hpp"

namespace cssdual {

namespace {

constexpr double kLn2 = 0.6931471805599453094;

void check_enum_cap(std::size_t m, const Caps& caps) {
  if (m > caps.enum_cap)
    throw resource_error("span enumeration of 2^" + std::to_string(m) +
                         " elements exceeds cap 2^" +
                         std::to_string(caps.enum_cap));
}

void check_dense_cap(std::size_t n, const Caps& caps) {
  if (n > caps.dense_cap)
    throw resource_error("dense operators on " + std::to_string(n) +
                         " qubits exceed cap " +
                         std::to_string(caps.dense_cap));
}

// Partial sums over a stretch of the span walk: log-sum-exp of
// a(x) = beta (N - 2 wt(x)) together with the (N - 2 wt)-weighted sum.
struct SpanSums {
  double amax = -std::numeric_limits<double>::infinity();
  double s = 0.0;  // sum of exp(a - amax)
  double t = 0.0;  // sum of (N - 2 wt) exp(a - amax)

  void admit(double a, double value) {
    if (a > amax) {
      if (std::isfinite(amax)) {
        const double scale = std::exp(amax - a);
        s *= scale;
        t *= scale;
      }
      amax = a;
    }
    const double w = std::exp(a - amax);
    s += w;
    t += value * w;
  }

  void merge(const SpanSums& o) {
    if (o.s == 0.0) return;
    if (o.amax <= amax) {
      const double scale = std::exp(o.amax - amax);
      s += o.s * scale;
      t += o.t * scale;
    } else {
      const double scale = std::isfinite(amax) ? std::exp(amax - o.amax) : 0.0;
      s = s * scale + o.s;
      t = t * scale + o.t;
      amax = o.amax;
    }
  }
};

// Fixed chunk policy: a function of M only, never of the thread count,
// so --threads cannot change a single output byte.
std::size_t chunk_count(std::size_t m) { return m <= 16 ? 1 : 64; }

SpanSums reduce_span(const CssState& css, double beta, const Caps& caps,
                     unsigned threads) {
  if (!std::isfinite(beta)) throw validation_error("beta must be finite");
  const std::size_t m = css.m();
  check_enum_cap(m, caps);
  const double n = static_cast<double>(css.n_qubits());
  const std::uint64_t total = std::uint64_t{1} << m;
  const std::size_t n_chunks = chunk_count(m);
  const std::uint64_t chunk = total / n_chunks;

  auto run_chunk = [&](std::size_t c) {
    SpanSums acc;
    gf2::enumerate_span_range(
        css.span_basis, c * chunk, (c + 1) * chunk,
        [&](const gf2::BitVector& x) {
          const double v = n - 2.0 * static_cast<double>(x.popcount());
          acc.admit(beta * v, v);
        });
    return acc;
  };

  std::vector<SpanSums> partial(n_chunks);
  const unsigned workers =
      std::min<unsigned>(std::max(1u, threads),
                         static_cast<unsigned>(n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) partial[c] = run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks;
             c = next.fetch_add(1))
          partial[c] = run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  SpanSums out;
  for (const SpanSums& p : partial) out.merge(p);  // fixed chunk order
  return out;
}

}  // namespace

CssState build_css(const Hypergraph& h) {
  CssState css;
  css.hypergraph = h;
  css.spec = stabilizer_spec(h);
  gf2::Echelon ech(h.n_vertices());
  for (const gf2::BitVector& row : css.spec.x_type)
    if (ech.insert(row)) css.span_basis.push_back(row);
  return css;
}

double log_partition_q(const CssState& css, double beta, const Caps& caps,
                       unsigned threads) {
  const SpanSums acc = reduce_span(css, beta, caps, threads);
  return acc.amax + std::log(acc.s) -
         static_cast<double>(css.m()) * kLn2;
}

double fidelity(const CssState& css, double beta, double dbeta,
                const Caps& caps, unsigned threads) {
  const double f_mid = log_partition_q(css, beta + 0.5 * dbeta, caps, threads);
  const double f_a = log_partition_q(css, beta, caps, threads);
  const double f_b = log_partition_q(css, beta + dbeta, caps, threads);
  return std::min(1.0, std::exp(f_mid - 0.5 * f_a - 0.5 * f_b));
}

double second_log_derivative(const CssState& css, double beta,
                             const Caps& caps, unsigned threads) {
  const double h = 1e-4 * std::max(1.0, std::abs(beta));
  auto central = [&](double step) {
    const double fp = log_partition_q(css, beta + step, caps, threads);
    const double f0 = log_partition_q(css, beta, caps, threads);
    const double fm = log_partition_q(css, beta - step, caps, threads);
    return (fp - 2.0 * f0 + fm) / (step * step);
  };
  const double d_h = central(h);
  const double d_h2 = central(0.5 * h);
  return (4.0 * d_h2 - d_h) / 3.0;  // one Richardson level
}

double quadratic_fidelity(const CssState& css, double beta, double dbeta,
                          const Caps& caps, unsigned threads) {
  const double f2 = second_log_derivative(css, beta, caps, threads);
  return 1.0 - 0.125 * f2 * dbeta * dbeta;
}

double magnetization(const CssState& css, double beta, const Caps& caps,
                     unsigned threads) {
  const SpanSums acc = reduce_span(css, beta, caps, threads);
  return acc.t / (acc.s * static_cast<double>(css.n_qubits()));
}

DeformedGroundState make_deformed(CssState css, double beta, const Caps& caps,
                                  unsigned threads) {
  DeformedGroundState g;
  g.beta = beta;
  g.log_z = log_partition_q(css, beta, caps, threads);
  g.css = std::move(css);
  return g;
}

PauliProduct PauliProduct::x_type(const gf2::BitVector& support) {
  return PauliProduct{support, gf2::BitVector(support.size()), +1};
}

PauliProduct PauliProduct::z_type(const gf2::BitVector& support) {
  return PauliProduct{gf2::BitVector(support.size()), support, +1};
}

std::size_t basis_index(const gf2::BitVector& x) {
  const std::size_t n = x.size();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (x.get(i)) idx |= std::size_t{1} << (n - 1 - i);
  return idx;
}

namespace {

std::size_t support_mask(const gf2::BitVector& support) {
  return basis_index(support);
}

// parity of bits(idx & mask): Z-string sign on |idx>
inline double z_sign(std::size_t idx, std::size_t mask) {
  return (std::popcount(idx & mask) & 1) ? -1.0 : 1.0;
}

}  // namespace

Eigen::VectorXd PauliProduct::apply(const Eigen::VectorXd& v) const {
  // convention: (prod X)(prod Z), Z signs first, then flips
  const std::size_t xm = support_mask(x_support);
  const std::size_t zm = support_mask(z_support);
  Eigen::VectorXd out(v.size());
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(v.size()); ++idx)
    out[idx ^ xm] = phase * z_sign(idx, zm) * v[idx];
  return out;
}

Eigen::VectorXd dense_css_state(const CssState& css, const Caps& caps) {
  const std::size_t n = css.n_qubits();
  check_dense_cap(n, caps);
  const std::size_t dim = std::size_t{1} << n;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const double amp = std::pow(2.0, -0.5 * static_cast<double>(css.m()));
  gf2::enumerate_span(css.span_basis, [&](const gf2::BitVector& x) {
    v[static_cast<Eigen::Index>(basis_index(x))] = amp;
  });
  return v;
}

Eigen::VectorXd dense_deformed_state(const CssState& css, double beta,
                                     const Caps& caps) {
  Eigen::VectorXd v = dense_css_state(css, caps);
  const double n = static_cast<double>(css.n_qubits());
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    const double wt = std::popcount(static_cast<std::size_t>(idx));
    v[idx] *= std::exp(0.5 * beta * (n - 2.0 * wt));
  }
  v /= v.norm();
  return v;
}

Eigen::MatrixXd build_cssm_hamiltonian(const Hypergraph& h, double beta,
                                       const Caps& caps) {
  const std::size_t n = h.n_vertices();
  check_dense_cap(n, caps);
  const StabilizerSpec spec = stabilizer_spec(h);
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXd ham =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  const double ch = std::cosh(beta);
  const double sh = std::sinh(beta);

  for (const gf2::BitVector& z : spec.z_type) {
    const std::size_t zm = support_mask(z);
    for (std::size_t idx = 0; idx < dim; ++idx)
      ham(idx, idx) -= z_sign(idx, zm);
  }
  for (std::size_t e = 0; e < h.n_edges(); ++e) {
    const gf2::BitVector sup =
        gf2::BitVector::from_indices(n, h.edge(e));
    const std::size_t xm = support_mask(sup);
    for (std::size_t idx = 0; idx < dim; ++idx) ham(idx ^ xm, idx) -= 1.0;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      double u = 1.0;
      for (std::uint32_t q : h.edge(e)) {
        const bool bit = (idx >> (n - 1 - q)) & 1;
        u *= ch - sh * (bit ? -1.0 : 1.0);  // exp(-beta Z) factor
      }
      ham(idx, idx) += u;
    }
  }
  return ham;
}

namespace {

// || (U_e - A_e) |v> || for one hyperedge, without forming matrices
double q_residual(const Hypergraph& h, std::size_t e, double beta,
                  const Eigen::VectorXd& v) {
  const std::size_t n = h.n_vertices();
  const gf2::BitVector sup = gf2::BitVector::from_indices(n, h.edge(e));
  const std::size_t xm = support_mask(sup);
  const double ch = std::cosh(beta);
  const double sh = std::sinh(beta);
  double sq = 0.0;
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(v.size()); ++idx) {
    double u = 1.0;
    for (std::uint32_t q : h.edge(e)) {
      const bool bit = (idx >> (n - 1 - q)) & 1;
      u *= ch - sh * (bit ? -1.0 : 1.0);
    }
    const double r = u * v[idx] - v[idx ^ xm];
    sq += r * r;
  }
  return std::sqrt(sq);
}

}  // namespace

GroundStateReport verify_ground_state(const Hypergraph& h, double beta,
                                      const Caps& caps) {
  check_dense_cap(h.n_vertices(), caps);
  const CssState css = build_css(h);
  const Eigen::VectorXd g = dense_deformed_state(css, beta, caps);

  GroundStateReport rep;
  rep.beta = beta;
  rep.n_qubits = h.n_vertices();
  rep.k = css.spec.k;

  for (std::size_t e = 0; e < h.n_edges(); ++e)
    rep.max_q_residual =
        std::max(rep.max_q_residual, q_residual(h, e, beta, g));

  for (const gf2::BitVector& z : css.spec.z_type) {
    const std::size_t zm = support_mask(z);
    double sq = 0.0;
    for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
      const double r =
          (z_sign(static_cast<std::size_t>(idx), zm) - 1.0) * g[idx];
      sq += r * r;
    }
    rep.max_b_residual = std::max(rep.max_b_residual, std::sqrt(sq));
  }

  const Eigen::MatrixXd ham = build_cssm_hamiltonian(h, beta, caps);
  rep.energy_expectation = g.dot(ham * g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham);
  rep.min_eigenvalue = solver.eigenvalues()[0];
  rep.spectral_gap = solver.eigenvalues()[1] - solver.eigenvalues()[0];

  const double k = static_cast<double>(rep.k);
  rep.q_pass = rep.max_q_residual < 1e-10;
  rep.b_pass = rep.max_b_residual < 1e-10;
  rep.energy_pass = std::abs(rep.energy_expectation + k) < 1e-8;
  rep.eigen_pass = std::abs(rep.min_eigenvalue + k) < 1e-8;
  return rep;
}

GroundSpaceReport degenerate_ground_space(
    const Hypergraph& h, std::span<const gf2::BitVector> z_terms,
    std::span<const gf2::BitVector> nonlocal_z,
    std::span<const gf2::BitVector> sector_reps, double beta,
    bool drop_nonlocal, const Caps& caps) {
  const std::size_t n = h.n_vertices();
  check_dense_cap(n, caps);
  const std::size_t dim = std::size_t{1} << n;

  std::vector<gf2::BitVector> kept;
  for (const gf2::BitVector& z : z_terms) {
    bool flagged = false;
    for (const gf2::BitVector& nl : nonlocal_z)
      if (z == nl) flagged = true;
    if (!drop_nonlocal || !flagged) kept.push_back(z);
  }

  Eigen::MatrixXd ham =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  for (const gf2::BitVector& z : kept) {
    const std::size_t zm = support_mask(z);
    for (std::size_t idx = 0; idx < dim; ++idx)
      ham(idx, idx) -= z_sign(idx, zm);
  }
  const double ch = std::cosh(beta);
  const double sh = std::sinh(beta);
  for (std::size_t e = 0; e < h.n_edges(); ++e) {
    const gf2::BitVector sup = gf2::BitVector::from_indices(n, h.edge(e));
    const std::size_t xm = support_mask(sup);
    for (std::size_t idx = 0; idx < dim; ++idx) ham(idx ^ xm, idx) -= 1.0;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      double u = 1.0;
      for (std::uint32_t q : h.edge(e)) {
        const bool bit = (idx >> (n - 1 - q)) & 1;
        u *= ch - sh * (bit ? -1.0 : 1.0);
      }
      ham(idx, idx) += u;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const double e0 = evals[0];
  const double cut = e0 + 1e-8;
  Eigen::Index gs_dim = 0;
  while (gs_dim < evals.size() && evals[gs_dim] <= cut) ++gs_dim;

  GroundSpaceReport rep;
  rep.dimension = static_cast<std::size_t>(gs_dim);
  rep.ground_energy = e0;
  rep.n_z_terms = kept.size();

  const CssState css = build_css(h);
  const Eigen::MatrixXd ground =
      solver.eigenvectors().leftCols(gs_dim);
  const double nn = static_cast<double>(n);
  for (const gf2::BitVector& y : sector_reps) {
    Eigen::VectorXd cand =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    gf2::enumerate_span(css.span_basis, [&](const gf2::BitVector& x) {
      gf2::BitVector shifted = x;
      shifted ^= y;
      const double wt = static_cast<double>(shifted.popcount());
      cand[static_cast<Eigen::Index>(basis_index(shifted))] =
          std::exp(0.5 * beta * (nn - 2.0 * wt));
    });
    cand /= cand.norm();
    const Eigen::VectorXd proj = ground * (ground.transpose() * cand);
    rep.candidate_residuals.push_back((cand - proj).norm());
  }
  return rep;
}

GroundSpaceReport ghz_degenerate_ground_space(std::size_t n, double beta,
                                              bool drop_nonlocal,
                                              const Caps& caps) {
  const Hypergraph h = ghz_ring(n);
  gf2::BitVector all_ones(n);
  for (std::size_t i = 0; i < n; ++i) all_ones.set(i);
  const std::vector<gf2::BitVector> z_terms = {all_ones};
  std::vector<gf2::BitVector> reps = {gf2::BitVector(n)};
  if (drop_nonlocal) {
    gf2::BitVector odd(n);
    odd.set(0);
    reps.push_back(odd);  // the odd-weight sector
  }
  return degenerate_ground_space(h, z_terms, z_terms, reps, beta,
                                 drop_nonlocal, caps);
}

GroundSpaceReport toric_degenerate_ground_space(std::size_t L, double beta,
                                                bool drop_nonlocal,
                                                const Caps& caps) {
  const ToricCode tc = toric_code(L);
  std::vector<gf2::BitVector> z_terms = tc.plaquettes;
  z_terms.push_back(tc.logicals.z_loops[0]);
  z_terms.push_back(tc.logicals.z_loops[1]);
  const std::vector<gf2::BitVector> nonlocal = {tc.logicals.z_loops[0],
                                                tc.logicals.z_loops[1]};
  const std::size_t nq = tc.hypergraph.n_vertices();
  std::vector<gf2::BitVector> reps = {gf2::BitVector(nq)};
  if (drop_nonlocal) {
    reps.push_back(tc.logicals.x_loops[0]);
    reps.push_back(tc.logicals.x_loops[1]);
    gf2::BitVector both = tc.logicals.x_loops[0];
    both ^= tc.logicals.x_loops[1];
    reps.push_back(both);
  }
  return degenerate_ground_space(tc.hypergraph, z_terms, nonlocal, reps, beta,
                                 drop_nonlocal, caps);
}

}  // namespace cssdual
