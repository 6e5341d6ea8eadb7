#include "cssdual/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "cssdual/errors.hpp"

namespace cssdual {

Hypergraph::Hypergraph(std::size_t n_vertices,
                       std::vector<std::vector<std::uint32_t>> edges)
    : n_(n_vertices), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto& e = edges_[i];
    if (e.empty())
      throw validation_error("hyperedge " + std::to_string(i) + " is empty");
    std::sort(e.begin(), e.end());
    for (std::size_t j = 0; j + 1 < e.size(); ++j)
      if (e[j] == e[j + 1])
        throw validation_error("hyperedge " + std::to_string(i) +
                               " repeats vertex " + std::to_string(e[j]));
    if (e.back() >= n_)
      throw validation_error("hyperedge " + std::to_string(i) +
                             " references vertex " + std::to_string(e.back()) +
                             " but n_vertices = " + std::to_string(n_));
  }
}

bool Hypergraph::has_duplicate_edges() const {
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& e : edges_)
    if (!seen.insert(e).second) return true;
  return false;
}

std::vector<std::uint32_t> Hypergraph::isolated_vertices() const {
  std::vector<bool> covered(n_, false);
  for (const auto& e : edges_)
    for (std::uint32_t v : e) covered[v] = true;
  std::vector<std::uint32_t> out;
  for (std::size_t v = 0; v < n_; ++v)
    if (!covered[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

std::vector<std::vector<std::uint32_t>> Hypergraph::canonical_edges() const {
  auto c = edges_;
  std::sort(c.begin(), c.end());
  return c;
}

bool Hypergraph::canonically_equal(const Hypergraph& o) const {
  return n_ == o.n_ && canonical_edges() == o.canonical_edges();
}

Hypergraph dual(const Hypergraph& h) {
  const auto isolated = h.isolated_vertices();
  if (!isolated.empty())
    throw validation_error(
        "dual undefined: vertex " + std::to_string(isolated.front()) +
        " belongs to no hyperedge (would produce an empty dual hyperedge)");
  std::vector<std::vector<std::uint32_t>> dual_edges(h.n_vertices());
  for (std::size_t m = 0; m < h.n_edges(); ++m)
    for (std::uint32_t v : h.edge(m))
      dual_edges[v].push_back(static_cast<std::uint32_t>(m));
  return Hypergraph(h.n_edges(), std::move(dual_edges));
}

gf2::BitMatrix incidence(const Hypergraph& h) {
  std::vector<gf2::BitVector> rows;
  rows.reserve(h.n_edges());
  for (const auto& e : h.edges())
    rows.push_back(gf2::BitVector::from_indices(h.n_vertices(), e));
  return gf2::BitMatrix::from_rows(std::move(rows), h.n_vertices());
}

StabilizerSpec stabilizer_spec(const Hypergraph& h) {
  StabilizerSpec s;
  gf2::BitMatrix inc = incidence(h);
  s.x_type = inc.row;
  s.z_type = gf2::kernel_basis(inc);
  s.m = gf2::rank(inc);
  s.k = h.n_vertices() - s.m;
  return s;
}

Hypergraph ghz_ring(std::size_t n) {
  if (n < 2) throw validation_error("ghz_ring requires n >= 2");
  std::vector<std::vector<std::uint32_t>> edges;
  edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>((i + 1) % n)});
  return Hypergraph(n, std::move(edges));
}

Hypergraph ising_square(std::size_t L) {
  if (L < 2) throw validation_error("ising_square requires L >= 2");
  auto site = [L](std::size_t r, std::size_t c) {
    return static_cast<std::uint32_t>((r % L) * L + (c % L));
  };
  std::vector<std::vector<std::uint32_t>> edges;
  edges.reserve(2 * L * L);
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      edges.push_back({site(r, c), site(r, c + 1)});
      edges.push_back({site(r, c), site(r + 1, c)});
    }
  return Hypergraph(L * L, std::move(edges));
}

ToricCode toric_code(std::size_t L) {
  if (L < 2) throw validation_error("toric_code requires L >= 2");
  const std::size_t n_qubits = 2 * L * L;
  // qubit layout: horizontal edge h(r,c) joins sites (r,c)-(r,c+1),
  // vertical edge v(r,c) joins (r,c)-(r+1,c)
  auto hq = [L](std::size_t r, std::size_t c) {
    return static_cast<std::uint32_t>(2 * ((r % L) * L + (c % L)));
  };
  auto vq = [L](std::size_t r, std::size_t c) {
    return static_cast<std::uint32_t>(2 * ((r % L) * L + (c % L)) + 1);
  };

  std::vector<std::vector<std::uint32_t>> stars;
  stars.reserve(L * L);
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c)
      stars.push_back({hq(r, c), hq(r, c + L - 1), vq(r, c), vq(r + L - 1, c)});

  ToricCode tc;
  tc.L = L;
  tc.hypergraph = Hypergraph(n_qubits, std::move(stars));

  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      std::vector<std::uint32_t> p = {hq(r, c), hq(r + 1, c), vq(r, c),
                                      vq(r, c + 1)};
      tc.plaquettes.push_back(
          gf2::BitVector::from_indices(n_qubits, p));
    }

  // Z loops follow lattice cycles; X loops cross them on the dual lattice.
  gf2::BitVector tz1(n_qubits), tz2(n_qubits), tx1(n_qubits), tx2(n_qubits);
  for (std::size_t c = 0; c < L; ++c) {
    tz1.set(hq(0, c));
    tx1.set(vq(0, c));
  }
  for (std::size_t r = 0; r < L; ++r) {
    tz2.set(vq(r, 0));
    tx2.set(hq(r, 0));
  }
  tc.logicals.z_loops = {tz1, tz2};
  tc.logicals.x_loops = {tx1, tx2};
  return tc;
}

namespace {

Hypergraph hypergraph_from_json(const nlohmann::json& j,
                                const std::string& context) {
  const std::string where = context.empty() ? "hypergraph document"
                                            : context;
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw validation_error(where + ": expected object with fields "
                                   "\"n\" and \"edges\"");
  if (!j["n"].is_number_unsigned())
    throw validation_error(where + ": \"n\" must be a non-negative integer");
  if (!j["edges"].is_array())
    throw validation_error(where + ": \"edges\" must be an array");
  const std::size_t n = j["n"].get<std::size_t>();
  std::vector<std::vector<std::uint32_t>> edges;
  edges.reserve(j["edges"].size());
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const auto& je = j["edges"][i];
    if (!je.is_array())
      throw validation_error(where + ": edge " + std::to_string(i) +
                             " is not an array");
    std::vector<std::uint32_t> e;
    for (const auto& jv : je) {
      if (!jv.is_number_unsigned())
        throw validation_error(where + ": edge " + std::to_string(i) +
                               " contains a non-integer vertex");
      e.push_back(jv.get<std::uint32_t>());
    }
    edges.push_back(std::move(e));
  }
  try {
    return Hypergraph(n, std::move(edges));
  } catch (const validation_error& err) {
    throw validation_error(where + ": " + err.what());
  }
}

}  // namespace

Hypergraph read_hypergraph(std::istream& in, const std::string& context) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error((context.empty() ? std::string("hypergraph document")
                                            : context) +
                           ": parse error: " + e.what());
  }
  return hypergraph_from_json(j, context);
}

Hypergraph read_hypergraph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open hypergraph file: " + path);
  return read_hypergraph(in, path);
}

void write_hypergraph(const Hypergraph& h, std::ostream& out) {
  nlohmann::json j;
  j["n"] = h.n_vertices();
  j["edges"] = h.edges();
  out << j.dump() << "\n";
}

void write_hypergraph_file(const Hypergraph& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open output file: " + path);
  write_hypergraph(h, out);
}

}  // namespace cssdual
