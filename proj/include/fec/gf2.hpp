#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fec/bits.hpp"

namespace fec::gf2 {

// Word-packed GF(2) matrix. The API is index based; packing is an
// implementation detail. Bits beyond n_cols in the last word of a row are
// kept zero.
class DenseBitMatrix {
public:
    DenseBitMatrix() = default;
    DenseBitMatrix(int rows, int cols)
        : n_rows_(rows), n_cols_(cols), wpr_((cols + 63) / 64), words_(std::size_t(rows) * wpr_, 0) {}

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }

    bool get(int r, int c) const {
        return (words_[std::size_t(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(int r, int c, bool v) {
        auto& w = words_[std::size_t(r) * wpr_ + (c >> 6)];
        if (v)
            w |= (std::uint64_t{1} << (c & 63));
        else
            w &= ~(std::uint64_t{1} << (c & 63));
    }
    void flip(int r, int c) { words_[std::size_t(r) * wpr_ + (c >> 6)] ^= (std::uint64_t{1} << (c & 63)); }

    void xor_rows(int dst, int src) {
        auto* d = &words_[std::size_t(dst) * wpr_];
        const auto* s = &words_[std::size_t(src) * wpr_];
        for (int w = 0; w < wpr_; ++w) d[w] ^= s[w];
    }
    void swap_rows(int a, int b) {
        if (a == b) return;
        auto* pa = &words_[std::size_t(a) * wpr_];
        auto* pb = &words_[std::size_t(b) * wpr_];
        for (int w = 0; w < wpr_; ++w) std::swap(pa[w], pb[w]);
    }

    bool row_is_zero(int r) const {
        const auto* p = &words_[std::size_t(r) * wpr_];
        for (int w = 0; w < wpr_; ++w)
            if (p[w]) return false;
        return true;
    }
    int row_weight(int r) const;

    std::span<const std::uint64_t> row_words(int r) const {
        return {&words_[std::size_t(r) * wpr_], std::size_t(wpr_)};
    }
    std::span<std::uint64_t> row_words(int r) {
        return {&words_[std::size_t(r) * wpr_], std::size_t(wpr_)};
    }

    BitVec multiply(const BitVec& x) const;  // returns m * x
    long long ones() const;

    static DenseBitMatrix identity(int n);

    bool operator==(const DenseBitMatrix&) const = default;

private:
    int n_rows_ = 0, n_cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> words_;
};

// Row/column index-list GF(2) matrix; supports are kept sorted and mutually
// consistent (transpose duals).
struct SparseBinaryMatrix {
    int n_rows = 0, n_cols = 0;
    std::vector<std::vector<int>> row_support;
    std::vector<std::vector<int>> col_support;

    SparseBinaryMatrix() = default;
    SparseBinaryMatrix(int rows, int cols)
        : n_rows(rows), n_cols(cols), row_support(rows), col_support(cols) {}

    int row_degree(int r) const { return int(row_support[r].size()); }
    int col_degree(int c) const { return int(col_support[c].size()); }
    long long ones() const;
    double density() const;

    void add_entry(int r, int c);  // entry must not already exist
    bool has_entry(int r, int c) const;

    // dst row <- dst row xor src row, col_support kept consistent.
    void xor_rows(int dst, int src);

    DenseBitMatrix to_dense() const;
    bool check_consistency() const;
};

struct PermutationPair {
    // Maps output position -> input index.
    std::vector<int> row_perm;
    std::vector<int> col_perm;
};

enum class SolveKind { Unique, Multiple, Inconsistent };

struct SolveOutcome {
    SolveKind kind = SolveKind::Inconsistent;
    BitVec solution;     // present iff Unique
    int free_count = 0;  // present iff Multiple
};

class RankDeficiencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int rank(const DenseBitMatrix& m);

// Solves a x = b. Throws std::invalid_argument on dimension mismatch.
SolveOutcome solve(const DenseBitMatrix& a, const BitVec& b);

struct RowOp {
    int dst, src;  // dst ^= src, in original row indexing
};

struct SystematizeResult {
    DenseBitMatrix matrix;  // [A | I], rows() x cols()
    PermutationPair perms;  // output position -> input index
    std::vector<RowOp> row_ops;
    std::vector<int> pivot_cols;  // input col index of identity position i
};

// Brings a full-row-rank matrix to [A | I] with row operations plus row and
// column permutations. When a pivot choice exists, higher-preference columns
// stay out of the identity block (to the left); ties go to the lower index.
// Empty preference means all-equal. Throws RankDeficiencyError otherwise.
SystematizeResult systematize(const DenseBitMatrix& m, std::span<const double> col_preference = {});

}  // namespace fec::gf2
