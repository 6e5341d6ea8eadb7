#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cssdual/gf2.hpp"

namespace cssdual {

// Vertex set {0..n-1} plus hyperedges (vertex subsets). Qubits live on
// vertices. Edges are stored with strictly increasing indices; the edge
// *list* keeps construction order (it labels stabilizers and dual
// vertices). Duplicate edges are legal — the L=2 torus produces them —
// but surfaced via has_duplicate_edges().
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(std::size_t n_vertices,
             std::vector<std::vector<std::uint32_t>> edges);

  std::size_t n_vertices() const { return n_; }
  std::size_t n_edges() const { return edges_.size(); }
  const std::vector<std::vector<std::uint32_t>>& edges() const {
    return edges_;
  }
  const std::vector<std::uint32_t>& edge(std::size_t i) const {
    return edges_[i];
  }

  bool has_duplicate_edges() const;
  std::vector<std::uint32_t> isolated_vertices() const;

  // sorted edge list; comparison form only, labeling order untouched
  std::vector<std::vector<std::uint32_t>> canonical_edges() const;
  bool canonically_equal(const Hypergraph& o) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::uint32_t>> edges_;
};

// Swap roles: one dual vertex per hyperedge, one dual hyperedge per
// vertex v holding every edge that contains v. Rejects isolated vertices
// (they would yield an empty dual edge).
Hypergraph dual(const Hypergraph& h);

// rows = edge indicators over the vertex columns
gf2::BitMatrix incidence(const Hypergraph& h);

// X-type supports (one per hyperedge), Z-type supports (kernel of the
// incidence matrix), m = GF(2) rank, k = n_vertices - m.
struct StabilizerSpec {
  std::vector<gf2::BitVector> x_type;
  std::vector<gf2::BitVector> z_type;
  std::size_t m = 0;
  std::size_t k = 0;
};
StabilizerSpec stabilizer_spec(const Hypergraph& h);

// n vertices in a cycle, edges {i, i+1 mod n}. n >= 2.
Hypergraph ghz_ring(std::size_t n);

// L x L torus of spins with nearest-neighbour bonds: L^2 vertices,
// 2L^2 edges of size 2 (doubled bonds at L=2 are kept). L >= 2.
Hypergraph ising_square(std::size_t L);

struct LogicalOps {
  std::array<gf2::BitVector, 2> x_loops;  // non-contractible X strings
  std::array<gf2::BitVector, 2> z_loops;  // non-contractible Z strings
};

// Qubits on the 2L^2 edges of an L x L torus; hyperedges are the L^2
// four-qubit vertex stars. Plaquette supports and the four loop
// operators are exposed for the dense ground-space checks.
struct ToricCode {
  Hypergraph hypergraph;
  LogicalOps logicals;
  std::vector<gf2::BitVector> plaquettes;
  std::size_t L = 0;
};
ToricCode toric_code(std::size_t L);

// Document format: {"edges": [[...], ...], "n": N}, UTF-8, one trailing
// newline, edge order preserved.
Hypergraph read_hypergraph(std::istream& in, const std::string& context = "");
Hypergraph read_hypergraph_file(const std::string& path);
void write_hypergraph(const Hypergraph& h, std::ostream& out);
void write_hypergraph_file(const Hypergraph& h, const std::string& path);

}  // namespace cssdual
