#pragma once

#include <cstddef>
#include <cstdint>

namespace cssdual {

// Resource caps shared across modules. All exact kernels check these up
// front and throw resource_error instead of attempting oversized work.
struct Caps {
  std::size_t dense_cap = 12;  // max qubits for 2^N dense operators
  std::size_t enum_cap = 30;   // max span dimension M for 2^M enumeration
  std::size_t exact_cap = 24;  // max classical spins for 2^n enumeration
};

inline constexpr std::uint64_t kDefaultSeed = 42;

}  // namespace cssdual
