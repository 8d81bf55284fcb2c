#pragma once

#include <cstdint>
#include <random>

namespace equiboot {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to spread seed bits and to derive
// independent sub-streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic stream seed for (master, a, b), e.g. (master_seed,
// scenario_index, replication_index). Streams for distinct (a, b) are
// decorrelated, so replications may run in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(a + 0x51ed270b0f3372e1ULL));
    s = splitmix64(s ^ splitmix64(b + 0x63db93abfdd6e183ULL));
    return s;
}

} // namespace equiboot
