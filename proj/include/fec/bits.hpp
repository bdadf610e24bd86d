#pragma once

#include <cstdint>
#include <vector>

namespace fec {

// Bits are stored one per byte (0/1) at module interfaces; the gf2 kernel
// packs them into words internally.
using BitVec = std::vector<std::uint8_t>;

inline int bitrev(int i, int nbits) {
    int r = 0;
    for (int b = 0; b < nbits; ++b) {
        r = (r << 1) | (i & 1);
        i >>= 1;
    }
    return r;
}

inline int weight(const BitVec& v) {
    int w = 0;
    for (auto b : v) w += b;
    return w;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stateless per-trial seed derivation; results are independent of worker count.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point_index,
                                std::uint64_t trial_index) {
    return splitmix64(splitmix64(master ^ splitmix64(point_index + 1)) ^ (trial_index + 1));
}

}  // namespace fec
