#ifndef MMCS_RNG_HPP
#define MMCS_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmcs {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child stream derived from (master seed, id path).  Workers that
// own disjoint id paths get unrelated streams, so fan-out never changes results.
inline std::mt19937_64 child_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t id : path) {
        s ^= id;
        h ^= splitmix64(s);
    }
    return std::mt19937_64(h);
}

}  // namespace mmcs

#endif
