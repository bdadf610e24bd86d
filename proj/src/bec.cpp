#include "fec/bec.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <random>
#include <stdexcept>

namespace fec::bec {

ErasureWord transmit_bec(const BitVec& c, double epsilon, std::uint64_t rng_seed) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("transmit_bec: epsilon out of range");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ErasureWord w;
    w.values = c;
    w.erased.assign(c.size(), 0);
    w.epsilon = epsilon;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (uni(rng) < epsilon) {
            w.erased[i] = 1;
            w.values[i] = 0;
        }
    }
    return w;
}

gf2::PermutationPair TriangulationState::perms() const {
    gf2::PermutationPair p;
    p.col_perm.reserve(mat.n_cols);
    for (int c : decoded_cols) p.col_perm.push_back(c);
    for (int c : ref_cols) p.col_perm.push_back(c);
    for (auto [r, c] : diag) p.col_perm.push_back(c);
    p.row_perm.reserve(mat.n_rows);
    for (int r : decoded_rows) p.row_perm.push_back(r);
    for (auto [r, c] : diag) p.row_perm.push_back(r);
    for (int r = 0; r < mat.n_rows; ++r)
        if (row_state[r] == RowState::Pending) p.row_perm.push_back(r);
    return p;
}

std::vector<int> TriangulationState::pending_rows() const {
    std::vector<int> rows;
    for (int r = 0; r < mat.n_rows; ++r)
        if (row_state[r] == RowState::Pending) rows.push_back(r);
    return rows;
}

TriangulationState make_state(const pcm::PrunedPcm& p) {
    TriangulationState s;
    s.mat = p.matrix;
    s.pcm = &p;
    s.col_state.assign(p.matrix.n_cols, ColState::Unknown);
    s.row_state.assign(p.matrix.n_rows, RowState::Pending);
    s.value.assign(p.matrix.n_cols, 0);
    s.acc.assign(p.matrix.n_rows, 0);
    s.unknown_count.resize(p.matrix.n_rows);
    for (int r = 0; r < p.matrix.n_rows; ++r) s.unknown_count[r] = p.matrix.row_degree(r);
    s.diag_index_of_col.assign(p.matrix.n_cols, -1);
    s.ref_index_of_col.assign(p.matrix.n_cols, -1);
    return s;
}

void assign_known(TriangulationState& s, int col, std::uint8_t v) {
    assert(s.col_state[col] == ColState::Unknown);
    s.col_state[col] = ColState::Decoded;
    s.decoded_cols.push_back(col);
    s.value[col] = v;
    s.stats.perm_count += 1;
    for (int r : s.mat.col_support[col]) {
        if (v) {
            s.acc[r] ^= 1;
            s.stats.xor_count += 1;
        }
        s.unknown_count[r] -= 1;
    }
}

void peel_to_fixpoint(TriangulationState& s) {
    std::vector<int> queue;
    queue.reserve(s.mat.n_rows);
    for (int r = 0; r < s.mat.n_rows; ++r)
        if (s.row_state[r] == RowState::Pending && s.unknown_count[r] <= 1) queue.push_back(r);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int r = queue[head];
        if (s.row_state[r] != RowState::Pending) continue;
        if (s.unknown_count[r] == 0) {
            if (s.acc[r] != 0)
                throw std::runtime_error("peel_bp: contradiction among known values (corrupted input)");
            s.row_state[r] = RowState::Decoded;
            s.decoded_rows.push_back(r);
            s.stats.perm_count += 1;
            continue;
        }
        int unknown = -1;
        for (int c : s.mat.row_support[r])
            if (s.col_state[c] == ColState::Unknown) {
                unknown = c;
                break;
            }
        assign_known(s, unknown, s.acc[r]);
        s.row_state[r] = RowState::Decoded;
        s.decoded_rows.push_back(r);
        s.stats.perm_count += 1;
        for (int q : s.mat.col_support[unknown])
            if (s.row_state[q] == RowState::Pending && s.unknown_count[q] <= 1) queue.push_back(q);
    }
}

TriangulationState peel_bp(const pcm::PrunedPcm& p, const ErasureWord& w) {
    if (int(w.values.size()) != p.block_length) throw std::invalid_argument("peel_bp: word length mismatch");
    TriangulationState s = make_state(p);
    s.values_valid = true;
    for (int bit = 0; bit < p.block_length; ++bit)
        if (!w.erased[bit]) assign_known(s, p.cvn_columns[bit], w.values[bit]);
    peel_to_fixpoint(s);
    return s;
}

void extend_diagonal(TriangulationState& s, bool eliminate) {
    // Each step scans the current weight-one pending rows as a batch, pivots
    // them in row order, then (parallel variant) zeroes the new pivot columns
    // below the diagonal. Newly created weight-one rows form the next batch.
    std::vector<int> batch;
    for (int r = 0; r < s.mat.n_rows; ++r)
        if (s.row_state[r] == RowState::Pending && s.unknown_count[r] == 1) batch.push_back(r);
    while (!batch.empty()) {
        std::vector<std::pair<int, int>> pivots;
        for (int r : batch) {
            if (s.row_state[r] != RowState::Pending || s.unknown_count[r] != 1) continue;
            int col = -1;
            for (int c : s.mat.row_support[r])
                if (s.col_state[c] == ColState::Unknown) {
                    col = c;
                    break;
                }
            s.col_state[col] = ColState::Diagonal;
            s.diag_index_of_col[col] = int(s.diag.size());
            s.row_state[r] = RowState::Diagonal;
            s.diag.emplace_back(r, col);
            s.stats.perm_count += 2;  // one row and one column permutation
            for (int q : s.mat.col_support[col])
                if (q != r && s.row_state[q] == RowState::Pending) s.unknown_count[q] -= 1;
            pivots.emplace_back(r, col);
        }
        if (eliminate) {
            // Within a step the diagonal rows contain none of the step's other
            // pivot columns, so these additions commute.
            for (auto [r, col] : pivots) {
                std::vector<int> targets;
                for (int q : s.mat.col_support[col])
                    if (q != r) targets.push_back(q);
                for (int q : targets) {
                    assert(s.row_state[q] == RowState::Pending);
                    std::uint8_t parity = 0;
                    if (s.values_valid) {
                        for (int c : s.mat.row_support[r])
                            if (s.col_state[c] == ColState::Decoded && s.value[c]) parity ^= 1;
                    }
                    s.mat.xor_rows(q, r);
                    s.acc[q] ^= parity;
                    s.stats.xor_count += int(s.mat.row_support[r].size());
                }
                assert(s.mat.col_degree(col) == 1);
            }
        }
        std::vector<int> next;
        for (auto [r, col] : pivots)
            for (int q : s.mat.col_support[col])
                if (s.row_state[q] == RowState::Pending && s.unknown_count[q] == 1) next.push_back(q);
        if (eliminate) {
            // Elimination leaves unknown counts unchanged; rescan instead of
            // trusting pivot-column supports (they were just cleared).
            next.clear();
            for (int r = 0; r < s.mat.n_rows; ++r)
                if (s.row_state[r] == RowState::Pending && s.unknown_count[r] == 1) next.push_back(r);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        batch = std::move(next);
    }
}

void mark_reference(TriangulationState& s, int col) {
    assert(s.col_state[col] == ColState::Unknown);
    s.col_state[col] = ColState::Reference;
    s.ref_index_of_col[col] = int(s.ref_cols.size());
    s.ref_cols.push_back(col);
    s.stats.perm_count += 1;
    for (int r : s.mat.col_support[col])
        if (s.row_state[r] == RowState::Pending) s.unknown_count[r] -= 1;
}

namespace {

int pick_reference(const TriangulationState& s, const ReferencePolicy& policy, std::mt19937_64& rng) {
    if (policy.kind == ReferencePolicy::Kind::RandomUnknown) {
        // Uniform over the remaining unknown codeword variables; falls back to
        // any unknown when no codeword variable is left undecided.
        std::vector<int> cands;
        for (int c = 0; c < s.mat.n_cols; ++c)
            if (s.col_state[c] == ColState::Unknown && s.pcm->is_cvn(c)) cands.push_back(c);
        if (cands.empty())
            for (int c = 0; c < s.mat.n_cols; ++c)
                if (s.col_state[c] == ColState::Unknown) cands.push_back(c);
        if (cands.empty()) return -1;
        return cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
    }
    // MinUnknownCheck: lowest-index row among those with the fewest remaining
    // unknowns (>= 2 at a stalled fixpoint), then its lowest-index unknown.
    int best_row = -1;
    for (int r = 0; r < s.mat.n_rows; ++r) {
        if (s.row_state[r] != RowState::Pending || s.unknown_count[r] < 1) continue;
        if (best_row < 0 || s.unknown_count[r] < s.unknown_count[best_row]) best_row = r;
    }
    if (best_row < 0) {
        for (int c = 0; c < s.mat.n_cols; ++c)
            if (s.col_state[c] == ColState::Unknown) return c;  // zero-support columns
        return -1;
    }
    for (int c : s.mat.row_support[best_row])
        if (s.col_state[c] == ColState::Unknown) return c;
    return -1;
}

void run_triangulation(TriangulationState& s, const ReferencePolicy& policy, bool eliminate) {
    std::mt19937_64 rng(policy.seed);
    extend_diagonal(s, eliminate);
    while (!s.complete()) {
        for (int t = 0; t < std::max(1, policy.batch) && !s.complete(); ++t) {
            const int col = pick_reference(s, policy, rng);
            if (col < 0) break;
            mark_reference(s, col);
        }
        extend_diagonal(s, eliminate);
    }
    s.stats.n_r = s.n_r();
    s.stats.n_e = s.n_e();
    s.stats.n_u = s.n_u();
}

}  // namespace

void triangulate(TriangulationState& s, const ReferencePolicy& policy) {
    run_triangulation(s, policy, /*eliminate=*/false);
}

void triangulate_parallel_variant(TriangulationState& s, const ReferencePolicy& policy) {
    run_triangulation(s, policy, /*eliminate=*/true);
}

AffineExpression back_substitute(TriangulationState& s) {
    const int n_u = s.n_u(), n_r = s.n_r();
    AffineExpression e;
    e.a_mat = gf2::DenseBitMatrix(n_u, std::max(n_r, 1));
    e.a_vec.assign(n_u, 0);
    long long gamma = 0, h11 = 0;
    for (int k = 0; k < n_u; ++k) {
        auto [row, pivot_col] = s.diag[k];
        std::uint8_t a_k = 0;
        if (s.values_valid) {
            // s^(1)_k = H^(1,1) d restricted to this row
            for (int c : s.mat.row_support[row])
                if (s.col_state[c] == ColState::Decoded) {
                    if (s.value[c]) a_k ^= 1;
                    ++h11;
                }
        }
        e.a_vec[k] = a_k;
        for (int c : s.mat.row_support[row]) {
            switch (s.col_state[c]) {
                case ColState::Reference:
                    e.a_mat.flip(k, s.ref_index_of_col[c]);
                    break;
                case ColState::Diagonal: {
                    ++gamma;
                    const int j = s.diag_index_of_col[c];
                    if (j == k) break;  // diagonal one
                    assert(j < k && "H^(1,3) must be lower triangular");
                    e.a_mat.xor_rows(k, j);
                    e.a_vec[k] ^= e.a_vec[j];
                    s.stats.stage3_xor += n_r + 1;
                    break;
                }
                default:
                    break;
            }
        }
    }
    s.stats.h13_ones = gamma;
    s.stats.h11_ones = h11;
    s.stats.xor_count += s.stats.stage3_xor + h11;
    return e;
}

gf2::SolveOutcome solve_reference(TriangulationState& s, const AffineExpression& e) {
    const int n_r = s.n_r();
    const auto pending = s.pending_rows();
    const int n_e = int(pending.size());
    gf2::DenseBitMatrix sys(n_e, n_r);
    BitVec rhs(n_e, 0);
    for (int i = 0; i < n_e; ++i) {
        const int row = pending[i];
        std::uint8_t b = 0;
        for (int c : s.mat.row_support[row]) {
            switch (s.col_state[c]) {
                case ColState::Decoded:
                    // s^(2) = H^(2,1) d
                    if (s.values_valid && s.value[c]) b ^= 1;
                    break;
                case ColState::Reference:
                    sys.flip(i, s.ref_index_of_col[c]);
                    break;
                case ColState::Diagonal: {
                    // H^(2,3) contribution: row += A_j, rhs += a_j
                    const int j = s.diag_index_of_col[c];
                    auto dst = sys.row_words(i);
                    auto src = e.a_mat.row_words(j);
                    for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
                    b ^= e.a_vec[j];
                    s.stats.xor_count += n_r + 1;
                    break;
                }
                default:
                    break;
            }
        }
        rhs[i] = b;
    }
    s.stats.elim_rows = n_e;
    s.stats.elim_cols = n_r + 1;
    return gf2::solve(sys, rhs);
}

namespace {

BitVec extract_codeword(const TriangulationState& s) {
    const auto& p = *s.pcm;
    BitVec c(p.block_length, 0);
    for (int bit = 0; bit < p.block_length; ++bit) c[bit] = s.value[p.cvn_columns[bit]];
    return c;
}

}  // namespace

DecodeOutcome ml_decode_bec(const pcm::PrunedPcm& p, const ErasureWord& w,
                            const ReferencePolicy& policy, Variant variant) {
    TriangulationState s = peel_bp(p, w);
    DecodeOutcome out;
    if (s.complete()) {  // stage-1 exit: n_r = n_e = 0
        out.kind = DecodeOutcome::Kind::Decoded;
        out.codeword = extract_codeword(s);
        out.stats = s.stats;
        out.stats.n_r = 0;
        out.stats.n_e = 0;
        return out;
    }
    if (variant == Variant::Parallel)
        triangulate_parallel_variant(s, policy);
    else
        triangulate(s, policy);
    AffineExpression e = back_substitute(s);
    gf2::SolveOutcome sol = solve_reference(s, e);
    out.stats = s.stats;
    if (sol.kind == gf2::SolveKind::Inconsistent)
        throw std::logic_error("ml_decode_bec: residual system inconsistent (implementation bug or corrupted input)");
    if (sol.kind == gf2::SolveKind::Multiple) {
        out.kind = DecodeOutcome::Kind::Ambiguous;
        return out;
    }
    // Recover r, then u = A r + a, then read off the codeword.
    for (int j = 0; j < s.n_r(); ++j) {
        s.value[s.ref_cols[j]] = sol.solution[j];
    }
    for (int k = 0; k < s.n_u(); ++k) {
        std::uint8_t v = e.a_vec[k];
        for (int j = 0; j < s.n_r(); ++j)
            if (sol.solution[j] && e.a_mat.get(k, j)) v ^= 1;
        s.value[s.diag[k].second] = v;
        s.stats.xor_count += s.n_r();
    }
    out.stats = s.stats;
    out.kind = DecodeOutcome::Kind::Decoded;
    out.codeword = extract_codeword(s);
    return out;
}

DecodeOutcome brute_force_ml_bec(const gf2::DenseBitMatrix& h, const ErasureWord& w) {
    const int N = int(w.values.size());
    if (h.cols() != N) throw std::invalid_argument("brute_force_ml_bec: PCM width mismatch");
    std::vector<int> erased;
    for (int j = 0; j < N; ++j)
        if (w.erased[j]) erased.push_back(j);
    gf2::DenseBitMatrix sys(h.rows(), std::max<int>(int(erased.size()), 1));
    BitVec rhs(h.rows(), 0);
    for (int r = 0; r < h.rows(); ++r) {
        std::uint8_t b = 0;
        for (int j = 0; j < N; ++j) {
            if (!h.get(r, j)) continue;
            if (w.erased[j]) continue;
            if (w.values[j]) b ^= 1;
        }
        rhs[r] = b;
        for (int t = 0; t < int(erased.size()); ++t)
            if (h.get(r, erased[t])) sys.set(r, t, true);
    }
    gf2::DenseBitMatrix trimmed(h.rows(), int(erased.size()));
    for (int r = 0; r < h.rows(); ++r)
        for (int t = 0; t < int(erased.size()); ++t)
            if (sys.get(r, t)) trimmed.set(r, t, true);
    gf2::SolveOutcome sol = gf2::solve(trimmed, rhs);
    DecodeOutcome out;
    if (sol.kind == gf2::SolveKind::Inconsistent)
        throw std::logic_error("brute_force_ml_bec: inconsistent system for a genuine channel output");
    if (sol.kind == gf2::SolveKind::Multiple) {
        out.kind = DecodeOutcome::Kind::Ambiguous;
        return out;
    }
    out.kind = DecodeOutcome::Kind::Decoded;
    out.codeword = w.values;
    for (int t = 0; t < int(erased.size()); ++t) out.codeword[erased[t]] = sol.solution[t];
    return out;
}

}  // namespace fec::bec
