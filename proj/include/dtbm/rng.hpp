#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

// Deterministic seed derivation. Every randomized routine in the library
// consumes an engine keyed by (base seed, call-site tag, indices...), so
// results are reproducible and independent of evaluation order.

namespace dtbm::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of words into one well-mixed 64-bit key.
inline std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

template <class... Ids>
std::uint64_t key(std::uint64_t base, Ids... ids) {
  return mix({base, static_cast<std::uint64_t>(ids)...});
}

template <class... Ids>
std::mt19937_64 engine_for(std::uint64_t base, Ids... ids) {
  return std::mt19937_64(key(base, ids...));
}

// Call-site tags, so unrelated substreams never collide.
namespace tag {
inline constexpr std::uint64_t kmeans = 0x6b6d65616e73ULL;      // "kmeans"
inline constexpr std::uint64_t init_zero_row = 0x537a65726fULL; // degenerate rows, init
inline constexpr std::uint64_t refine_zero_row = 0x4a7a65726fULL;
inline constexpr std::uint64_t refine_no_centroid = 0x4a616c6cULL;
inline constexpr std::uint64_t clustering = 0x7a64726177ULL;
inline constexpr std::uint64_t theta = 0x7468657461ULL;
inline constexpr std::uint64_t noise = 0x6e6f697365ULL;
inline constexpr std::uint64_t hosvd = 0x686f737664ULL;
inline constexpr std::uint64_t bic_init = 0x626963696eULL;
inline constexpr std::uint64_t bic_refine = 0x626963726bULL;
inline constexpr std::uint64_t sweep_cell = 0x7377656570ULL;
}  // namespace tag

}  // namespace dtbm::rng
