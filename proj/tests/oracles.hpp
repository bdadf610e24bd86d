#pragma once

// Test-only reference implementations, kept independent of the library's
// computation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "fec/bits.hpp"
#include "fec/gf2.hpp"
#include "fec/polar.hpp"

namespace oracles {

using fec::BitVec;

// G_N by explicit Kronecker powering of F = [[1,0],[1,1]] followed by the
// bit-reversal row permutation (the library builds rows from the subset
// characterization instead).
inline fec::gf2::DenseBitMatrix kronecker_generator(int n) {
    std::vector<std::vector<std::uint8_t>> m = {{1}};
    const std::uint8_t F[2][2] = {{1, 0}, {1, 1}};
    for (int s = 0; s < n; ++s) {
        const int half = 1 << s;
        std::vector<std::vector<std::uint8_t>> next(2 * half, std::vector<std::uint8_t>(2 * half, 0));
        for (int i = 0; i < 2 * half; ++i)
            for (int j = 0; j < 2 * half; ++j)
                next[i][j] = F[i / half][j / half] & m[i % half][j % half];
        m = std::move(next);
    }
    const int N = 1 << n;
    fec::gf2::DenseBitMatrix g(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (m[fec::bitrev(i, n)][j]) g.set(i, j, true);
    return g;
}

// CRC remainder by polynomial long division, msb-first message bits.
inline BitVec crc_remainder_longdiv(const BitVec& msg, std::uint64_t poly, int r) {
    BitVec reg = msg;
    reg.resize(msg.size() + r, 0);
    for (std::size_t i = 0; i < msg.size(); ++i) {
        if (!reg[i]) continue;
        for (int j = 0; j <= r; ++j) reg[i + j] ^= (poly >> (r - j)) & 1;
    }
    return BitVec(reg.begin() + msg.size(), reg.end());
}

// Rank by enumerating the row space (n_rows <= 12).
inline int rank_by_enumeration(const fec::gf2::DenseBitMatrix& m) {
    std::set<std::vector<std::uint8_t>> space;
    const int R = m.rows();
    for (long long mask = 0; mask < (1LL << R); ++mask) {
        std::vector<std::uint8_t> v(m.cols(), 0);
        for (int r = 0; r < R; ++r)
            if ((mask >> r) & 1)
                for (int c = 0; c < m.cols(); ++c) v[c] ^= m.get(r, c);
        space.insert(v);
    }
    int rank = 0;
    while ((1LL << rank) < (long long)space.size()) ++rank;
    return rank;
}

// All codewords of a (possibly CRC-augmented) code, 2^m of them.
inline std::vector<BitVec> enumerate_codebook(const fec::polar::AugmentedCodeSpec& aug) {
    const int m = aug.message_length();
    std::vector<BitVec> book;
    book.reserve(std::size_t(1) << m);
    for (long long v = 0; v < (1LL << m); ++v) {
        BitVec msg(m);
        for (int i = 0; i < m; ++i) msg[i] = (v >> i) & 1;
        book.push_back(aug.encode_message(msg));
    }
    return book;
}

// Exact ML over the BEC by scanning the whole codebook: Decoded iff exactly
// one codeword matches the unerased positions.
struct CodebookMlResult {
    bool unique = false;
    BitVec codeword;
    int compatible = 0;
};
inline CodebookMlResult codebook_ml(const std::vector<BitVec>& book, const BitVec& values,
                                    const std::vector<std::uint8_t>& erased) {
    CodebookMlResult res;
    for (const auto& c : book) {
        bool ok = true;
        for (std::size_t i = 0; i < c.size() && ok; ++i)
            if (!erased[i] && c[i] != values[i]) ok = false;
        if (ok) {
            ++res.compatible;
            if (res.compatible == 1) res.codeword = c;
        }
    }
    res.unique = res.compatible == 1;
    return res;
}

// Greedy most-reliable independent basis over the columns of a full-row-rank
// PCM: walk positions by decreasing reliability, keep a position if the
// remaining columns still contain an invertible (N-k)-subset, i.e. its column
// stays independent in the dual greedy. Equivalent standard form: greedily
// pivot columns from the least reliable end; the MRIB is the complement.
inline std::vector<int> greedy_mrib(const fec::gf2::DenseBitMatrix& h, const std::vector<double>& reliab) {
    const int N = h.cols(), R = h.rows();
    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (reliab[a] != reliab[b]) return reliab[a] < reliab[b];
        return a > b;
    });
    fec::gf2::DenseBitMatrix w = h;
    std::vector<bool> used(R, false);
    std::vector<int> pivot_positions;
    for (int pos : order) {
        int pivot = -1;
        for (int r = 0; r < R; ++r)
            if (!used[r] && w.get(r, pos)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        used[pivot] = true;
        pivot_positions.push_back(pos);
        for (int r = 0; r < R; ++r)
            if (r != pivot && w.get(r, pos)) w.xor_rows(r, pivot);
    }
    std::vector<std::uint8_t> is_pivot(N, 0);
    for (int p : pivot_positions) is_pivot[p] = 1;
    std::vector<int> mrib;
    for (int i = 0; i < N; ++i)
        if (!is_pivot[i]) mrib.push_back(i);
    return mrib;
}

}  // namespace oracles
