#include "fec/gf2.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>

namespace fec::gf2 {

int DenseBitMatrix::row_weight(int r) const {
    int w = 0;
    for (auto word : row_words(r)) w += std::popcount(word);
    return w;
}

long long DenseBitMatrix::ones() const {
    long long w = 0;
    for (auto word : words_) w += std::popcount(word);
    return w;
}

BitVec DenseBitMatrix::multiply(const BitVec& x) const {
    if (int(x.size()) != n_cols_) throw std::invalid_argument("DenseBitMatrix::multiply: size mismatch");
    BitVec out(n_rows_, 0);
    for (int r = 0; r < n_rows_; ++r) {
        std::uint8_t acc = 0;
        for (int c = 0; c < n_cols_; ++c)
            if (x[c] && get(r, c)) acc ^= 1;
        out[r] = acc;
    }
    return out;
}

DenseBitMatrix DenseBitMatrix::identity(int n) {
    DenseBitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

long long SparseBinaryMatrix::ones() const {
    long long w = 0;
    for (const auto& r : row_support) w += (long long)r.size();
    return w;
}

double SparseBinaryMatrix::density() const {
    if (n_rows == 0 || n_cols == 0) return 0.0;
    return double(ones()) / (double(n_rows) * double(n_cols));
}

void SparseBinaryMatrix::add_entry(int r, int c) {
    auto& rs = row_support[r];
    rs.insert(std::lower_bound(rs.begin(), rs.end(), c), c);
    auto& cs = col_support[c];
    cs.insert(std::lower_bound(cs.begin(), cs.end(), r), r);
}

bool SparseBinaryMatrix::has_entry(int r, int c) const {
    const auto& rs = row_support[r];
    return std::binary_search(rs.begin(), rs.end(), c);
}

void SparseBinaryMatrix::xor_rows(int dst, int src) {
    if (dst < 0 || dst >= n_rows || src < 0 || src >= n_rows)
        throw std::invalid_argument("SparseBinaryMatrix::xor_rows: index out of range");
    const auto& s = row_support[src];
    const auto& d = row_support[dst];
    std::vector<int> merged;
    merged.reserve(d.size() + s.size());
    std::set_symmetric_difference(d.begin(), d.end(), s.begin(), s.end(), std::back_inserter(merged));
    // update col_support for columns whose membership changed
    for (int c : s) {
        auto& cs = col_support[c];
        auto it = std::lower_bound(cs.begin(), cs.end(), dst);
        if (it != cs.end() && *it == dst)
            cs.erase(it);
        else
            cs.insert(it, dst);
    }
    row_support[dst] = std::move(merged);
}

DenseBitMatrix SparseBinaryMatrix::to_dense() const {
    DenseBitMatrix m(n_rows, n_cols);
    for (int r = 0; r < n_rows; ++r)
        for (int c : row_support[r]) m.set(r, c, true);
    return m;
}

bool SparseBinaryMatrix::check_consistency() const {
    for (int r = 0; r < n_rows; ++r) {
        if (!std::is_sorted(row_support[r].begin(), row_support[r].end())) return false;
        for (int c : row_support[r]) {
            if (c < 0 || c >= n_cols) return false;
            const auto& cs = col_support[c];
            if (!std::binary_search(cs.begin(), cs.end(), r)) return false;
        }
    }
    long long rc = 0, cc = 0;
    for (const auto& r : row_support) rc += (long long)r.size();
    for (int c = 0; c < n_cols; ++c) {
        if (!std::is_sorted(col_support[c].begin(), col_support[c].end())) return false;
        for (int r : col_support[c])
            if (!std::binary_search(row_support[r].begin(), row_support[r].end(), c)) return false;
        cc += (long long)col_support[c].size();
    }
    return rc == cc;
}

int rank(const DenseBitMatrix& m) {
    DenseBitMatrix w = m;
    int rk = 0;
    std::vector<bool> used(w.rows(), false);
    for (int c = 0; c < w.cols(); ++c) {
        int pivot = -1;
        for (int r = 0; r < w.rows(); ++r) {
            if (!used[r] && w.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        used[pivot] = true;
        ++rk;
        for (int r = 0; r < w.rows(); ++r)
            if (r != pivot && w.get(r, c)) w.xor_rows(r, pivot);
    }
    return rk;
}

SolveOutcome solve(const DenseBitMatrix& a, const BitVec& b) {
    if (int(b.size()) != a.rows()) throw std::invalid_argument("gf2::solve: rhs size mismatch");
    DenseBitMatrix w = a;
    BitVec rhs = b;
    const int n = a.cols();
    std::vector<int> pivot_col_of_row(a.rows(), -1);
    std::vector<bool> used(a.rows(), false);
    int rk = 0;
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = 0; r < a.rows(); ++r) {
            if (!used[r] && w.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        used[pivot] = true;
        pivot_col_of_row[pivot] = c;
        ++rk;
        for (int r = 0; r < a.rows(); ++r) {
            if (r != pivot && w.get(r, c)) {
                w.xor_rows(r, pivot);
                rhs[r] ^= rhs[pivot];
            }
        }
    }
    for (int r = 0; r < a.rows(); ++r)
        if (!used[r] && rhs[r] && w.row_is_zero(r)) return {SolveKind::Inconsistent, {}, 0};
    if (rk < n) return {SolveKind::Multiple, {}, n - rk};
    SolveOutcome out;
    out.kind = SolveKind::Unique;
    out.solution.assign(n, 0);
    for (int r = 0; r < a.rows(); ++r)
        if (pivot_col_of_row[r] >= 0) out.solution[pivot_col_of_row[r]] = rhs[r];
    return out;
}

SystematizeResult systematize(const DenseBitMatrix& m, std::span<const double> col_preference) {
    const int rows = m.rows(), cols = m.cols();
    if (!col_preference.empty() && int(col_preference.size()) != cols)
        throw std::invalid_argument("gf2::systematize: preference size mismatch");
    if (rows > cols) throw RankDeficiencyError("gf2::systematize: more rows than columns");

    auto pref = [&](int c) { return col_preference.empty() ? 0.0 : col_preference[c]; };

    // Candidate pivot columns from least preferred to most; ties prefer the
    // higher index (so the lower index stays out of the identity block).
    std::vector<int> cand(cols);
    std::iota(cand.begin(), cand.end(), 0);
    std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (pref(a) != pref(b)) return pref(a) < pref(b);
        return a > b;
    });

    DenseBitMatrix w = m;
    std::vector<RowOp> ops;
    std::vector<int> pivot_row_of_col(cols, -1);
    std::vector<bool> used(rows, false);
    int npiv = 0;
    for (int c : cand) {
        if (npiv == rows) break;
        int pivot = -1;
        for (int r = 0; r < rows; ++r) {
            if (!used[r] && w.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        used[pivot] = true;
        pivot_row_of_col[c] = pivot;
        ++npiv;
        for (int r = 0; r < rows; ++r) {
            if (r != pivot && w.get(r, c)) {
                w.xor_rows(r, pivot);
                ops.push_back({r, pivot});
            }
        }
    }
    if (npiv < rows) throw RankDeficiencyError("gf2::systematize: input is rank deficient");

    // Output column order: non-pivots then pivots, each sorted by descending
    // preference with ties to the lower index.
    auto key_less = [&](int a, int b) {
        if (pref(a) != pref(b)) return pref(a) > pref(b);
        return a < b;
    };
    std::vector<int> nonpiv, piv;
    for (int c = 0; c < cols; ++c)
        (pivot_row_of_col[c] >= 0 ? piv : nonpiv).push_back(c);
    std::stable_sort(nonpiv.begin(), nonpiv.end(), key_less);
    std::stable_sort(piv.begin(), piv.end(), key_less);

    SystematizeResult res;
    res.perms.col_perm.reserve(cols);
    for (int c : nonpiv) res.perms.col_perm.push_back(c);
    for (int c : piv) res.perms.col_perm.push_back(c);
    res.perms.row_perm.reserve(rows);
    for (int c : piv) res.perms.row_perm.push_back(pivot_row_of_col[c]);
    res.pivot_cols = piv;
    res.row_ops = std::move(ops);

    res.matrix = DenseBitMatrix(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const int src_row = res.perms.row_perm[i];
        for (int j = 0; j < cols; ++j)
            if (w.get(src_row, res.perms.col_perm[j])) res.matrix.set(i, j, true);
    }
    return res;
}

}  // namespace fec::gf2
