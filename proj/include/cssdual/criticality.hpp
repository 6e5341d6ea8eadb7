#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssdual/classical.hpp"

namespace cssdual {

// Classical model families scanned for criticality. Ring1D is the dual
// of the GHZ family, Square2D the dual of the toric family.
enum class ModelFamily { Ring1D, Square2D };

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

struct ScanSpec {
  ModelFamily family = ModelFamily::Square2D;
  std::vector<std::size_t> sizes;       // ring length n, or torus side L
  std::vector<double> temperatures;     // strictly increasing
  McParams mc;
  std::uint64_t master_seed = 42;
  unsigned threads = 1;
  std::size_t exact_cap = 24;
};

struct ScanCell {
  Observables obs;
  std::string method;  // "transfer" | "exact" | "mc"
  std::uint64_t seed = 0;
};

struct ScanResult {
  ModelFamily family = ModelFamily::Square2D;
  std::vector<std::size_t> sizes;
  std::vector<double> temperatures;
  std::vector<std::vector<ScanCell>> cells;  // [size][temperature]
};

// Fill the grid. Ring cells are exact (per-site transfer-matrix
// thermodynamics plus exact finite-ring magnetization moments, stderr 0).
// Square cells enumerate exactly when L^2 <= exact_cap, otherwise run MC
// with a per-cell seed hashed from (master seed, family, size, T index).
// Identical spec => bit-identical result, for any thread count.
ScanResult scan(const ScanSpec& spec);

struct PeakEstimate {
  double t_star = 0.0;
  double c_star = 0.0;
  double c_err = 0.0;
  double t_err = 0.0;
  bool at_boundary = false;  // max sits on a grid endpoint; refused
  bool valid = false;
};

// Quadratic fit through the maximal grid point and its neighbours.
// Requires >= 5 grid points.
PeakEstimate detect_peak(std::span<const double> t, std::span<const double> c,
                         std::span<const double> c_err);

struct CrossingEstimate {
  double tc = 0.0;
  double err = 0.0;
  bool found = false;
  std::vector<double> pairwise;  // one entry per size pair with a crossing
};

// Pairwise Binder-curve crossings by linear interpolation. A crossing
// needs a significantly negative difference followed by a significantly
// positive one (1 sigma, floor 1e-12), which rejects noise-level sign
// flips where curves coincide.
CrossingEstimate binder_crossing(const ScanResult& scan);

struct VerdictParams {
  double growth_per_doubling = 0.05;  // required relative Cv* growth
  double sigma = 2.0;                 // significance multiplier
  double saturation_rel_floor = 1e-4;
  double edge_margin = 1.0;           // grid spacings from either end
};

enum class Decision { Topological, NotTopological, Inconclusive };
std::string decision_name(Decision d);

struct Verdict {
  Decision decision = Decision::Inconclusive;
  bool has_tc = false;
  double tc = 0.0;
  double tc_err = 0.0;
  std::vector<std::size_t> sizes;
  std::vector<PeakEstimate> peaks;  // one per size, ascending
  std::string alpha_note;           // descriptive Cv* vs ln L fit
  std::string rationale;
};

// Decision rule: topological iff peak heights grow with size (each step
// significant, total >= growth_per_doubling per doubling) and peak
// locations converge inside the grid; not-topological when heights
// saturate/shrink or peaks drift into a grid edge; else inconclusive.
Verdict finite_size_verdict(const ScanResult& scan,
                            const VerdictParams& params = {});

// CSV schema (exact column order):
// model,L,T,method,E,E_err,Cv,Cv_err,m,m_err,binder,binder_err,seed
void write_scan_csv(const ScanResult& scan, std::ostream& out);

nlohmann::json verdict_to_json(const Verdict& v);

}  // namespace cssdual
