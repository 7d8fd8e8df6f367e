#pragma once

#include <cstdint>
#include <random>

namespace facnum {

// splitmix64 finalizer; decorrelates consecutive stream indices.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for stream `index` derived from a master seed. Replications seeded this
// way are independent of scheduling order, so parallel runs stay reproducible.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x51ed270b0a1c53d5ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(stream_seed(master, index));
}

}  // namespace facnum
