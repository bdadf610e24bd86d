#include "fec/osd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fec::osd {

namespace {

// Reliability of every pruned-PCM column; hidden columns get -1 so they are
// never fixed and never win a reference choice against a codeword variable.
std::vector<double> column_reliability(const pcm::PrunedPcm& p, const std::vector<double>& soft) {
    std::vector<double> rel(p.matrix.n_cols, -1.0);
    for (int b = 0; b < p.block_length; ++b) rel[p.cvn_columns[b]] = std::fabs(soft[b]);
    return rel;
}

int pick_reference_osd(const bec::TriangulationState& s, const std::vector<double>& rel) {
    // Among pending checks with at least one unknown codeword variable, take
    // the fewest-unknown check (lowest row index on ties) and its unknown
    // codeword variable of highest reliability (lowest column index on ties).
    int best_row = -1;
    bool best_has_cvn = false;
    for (int r = 0; r < s.mat.n_rows; ++r) {
        if (s.row_state[r] != bec::RowState::Pending || s.unknown_count[r] < 1) continue;
        bool has_cvn = false;
        for (int c : s.mat.row_support[r])
            if (s.col_state[c] == bec::ColState::Unknown && rel[c] >= 0) {
                has_cvn = true;
                break;
            }
        if (best_row < 0 || (has_cvn && !best_has_cvn) ||
            (has_cvn == best_has_cvn && s.unknown_count[r] < s.unknown_count[best_row])) {
            best_row = r;
            best_has_cvn = has_cvn;
        }
    }
    if (best_row < 0) {
        for (int c = 0; c < s.mat.n_cols; ++c)
            if (s.col_state[c] == bec::ColState::Unknown) return c;
        return -1;
    }
    int best_col = -1;
    for (int c : s.mat.row_support[best_row]) {
        if (s.col_state[c] != bec::ColState::Unknown) continue;
        if (best_has_cvn && rel[c] < 0) continue;
        if (best_col < 0 || rel[c] > rel[best_col]) best_col = c;
    }
    return best_col;
}

}  // namespace

bec::TriangulationState mrib_triangulate(const pcm::PrunedPcm& p, const std::vector<double>& soft) {
    if (int(soft.size()) != p.block_length) throw std::invalid_argument("mrib_triangulate: llr length mismatch");
    bec::TriangulationState s = bec::make_state(p);
    s.values_valid = false;
    const std::vector<double> rel = column_reliability(p, soft);
    // lambda1: codeword bits by decreasing reliability, ties to lower index
    std::vector<int> order(p.block_length);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ra = std::fabs(soft[a]), rb = std::fabs(soft[b]);
        if (ra != rb) return ra > rb;
        return a < b;
    });
    const int dim = p.dim();
    for (int t = 0; t < dim; ++t) {
        const int col = p.cvn_columns[order[t]];
        s.col_state[col] = bec::ColState::Decoded;  // fixed, no value
        s.decoded_cols.push_back(col);
        for (int r : s.mat.col_support[col]) s.unknown_count[r] -= 1;
    }
    bec::extend_diagonal(s, /*eliminate=*/true);
    while (!s.complete()) {
        const int col = pick_reference_osd(s, rel);
        if (col < 0) break;
        bec::mark_reference(s, col);
        bec::extend_diagonal(s, /*eliminate=*/true);
    }
    s.stats.n_r = s.n_r();
    s.stats.n_e = s.n_e();
    s.stats.n_u = s.n_u();
    return s;
}

SystematicPcm systematize_stage4(const bec::TriangulationState& s, const std::vector<double>& soft) {
    const pcm::PrunedPcm& p = *s.pcm;
    const int dim = int(s.decoded_cols.size());
    const int n_r = s.n_r();
    const int N = p.block_length;
    const std::vector<double> rel = column_reliability(p, soft);

    // Leading columns: the fixed block then the references, all codeword
    // variables in the non-degenerate case.
    std::vector<int> leading = s.decoded_cols;
    leading.insert(leading.end(), s.ref_cols.begin(), s.ref_cols.end());
    std::vector<int> pos_of_col(s.mat.n_cols, -1);
    for (int i = 0; i < int(leading.size()); ++i) pos_of_col[leading[i]] = i;

    const auto pending = s.pending_rows();
    assert(int(pending.size()) == n_r);
    gf2::DenseBitMatrix block(n_r, dim + n_r);
    std::vector<double> pref(dim + n_r);
    for (int i = 0; i < dim + n_r; ++i) pref[i] = rel[leading[i]];
    for (int i = 0; i < n_r; ++i) {
        for (int c : s.mat.row_support[pending[i]]) {
            assert(pos_of_col[c] >= 0 && "H^(2,3) must be zero after the parallel variant");
            block.set(i, pos_of_col[c], true);
        }
    }
    gf2::SystematizeResult sysr = gf2::systematize(block, pref);
    for (const auto& op : sysr.row_ops)
        assert(op.dst < n_r && op.src < n_r);  // elimination confined to the n_r rows

    SystematicPcm sp;
    sp.k = dim;
    sp.matrix = gf2::DenseBitMatrix(N - dim, N);
    sp.lambda.resize(N);

    // Column layout: dim non-pivot leading columns (descending reliability),
    // n_r pivot columns, then the codeword diagonal columns in pivot order.
    std::vector<int> final_cols;  // matrix column ids
    final_cols.reserve(dim + n_r);
    for (int j = 0; j < dim + n_r; ++j) final_cols.push_back(leading[sysr.perms.col_perm[j]]);
    std::vector<int> block_pos_of_leading(dim + n_r);  // leading position -> output position
    for (int j = 0; j < dim + n_r; ++j) block_pos_of_leading[sysr.perms.col_perm[j]] = j;

    std::vector<std::pair<int, int>> cvn_diag;  // (diag index, col)
    for (int t = 0; t < int(s.diag.size()); ++t)
        if (p.is_cvn(s.diag[t].second)) cvn_diag.emplace_back(t, s.diag[t].second);
    if (dim + n_r + int(cvn_diag.size()) != N)
        throw gf2::RankDeficiencyError("systematize_stage4: hidden column among the leading block");

    for (int j = 0; j < dim + n_r; ++j) sp.lambda[j] = p.cvn_bit(final_cols[j]);
    for (int t = 0; t < int(cvn_diag.size()); ++t)
        sp.lambda[dim + n_r + t] = p.cvn_bit(cvn_diag[t].second);

    // Top n_r rows: [H~ | I_{n_r} | 0].
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < dim + n_r; ++j)
            if (sysr.matrix.get(i, j)) sp.matrix.set(i, j, true);

    // Codeword diagonal rows: substitute the pivot-column entries through the
    // eliminated top rows, leaving support on the MRIB plus the own diagonal.
    for (int t = 0; t < int(cvn_diag.size()); ++t) {
        const int row_out = n_r + t;
        const auto [diag_idx, col] = cvn_diag[t];
        const int row_in = s.diag[diag_idx].first;
        std::vector<std::uint8_t> lead(dim + n_r, 0);
        for (int c : s.mat.row_support[row_in]) {
            if (c == col) continue;
            const int lp = pos_of_col[c];
            assert(lp >= 0 && "H^(1,3)=I: diagonal rows only touch leading columns");
            lead[std::size_t(block_pos_of_leading[lp])] ^= 1;
        }
        for (int j = dim; j < dim + n_r; ++j) {
            if (!lead[j]) continue;
            lead[j] = 0;
            for (int q = 0; q < dim + n_r; ++q)
                if (sysr.matrix.get(j - dim, q)) lead[q] ^= 1;
        }
        for (int j = 0; j < dim; ++j)
            if (lead[j]) sp.matrix.set(row_out, j, true);
        for (int j = dim; j < dim + n_r; ++j) assert(!lead[j]);
        sp.matrix.set(row_out, dim + n_r + t, true);
    }
    return sp;
}

namespace {

struct Reprocessing {
    int k = 0, par = 0;  // par = N - k
    std::vector<double> y1;      // first k permuted values
    std::vector<double> s;       // s_l
    BitVec base1, base2;         // c0
    const SystematicPcm* sp = nullptr;
    double const_term = 0;       // sum over MRIB of (-1)^{c01} y + sum s_l
    std::vector<std::vector<int>> col_support;  // h_i supports (parity rows)

    Reprocessing(const SystematicPcm& spm, const std::vector<double>& y) : sp(&spm) {
        k = spm.k;
        const int N = spm.matrix.cols();
        par = N - k;
        y1.assign(y.begin(), y.begin() + k);
        base1.resize(k);
        for (int i = 0; i < k; ++i) base1[i] = y[i] >= 0 ? 0 : 1;
        base2.assign(par, 0);
        col_support.resize(k);
        for (int l = 0; l < par; ++l) {
            std::uint8_t acc = 0;
            for (int i = 0; i < k; ++i)
                if (base1[i] && sp->matrix.get(l, i)) acc ^= 1;
            base2[l] = acc;
        }
        for (int i = 0; i < k; ++i)
            for (int l = 0; l < par; ++l)
                if (sp->matrix.get(l, i)) col_support[i].push_back(l);
        s.resize(par);
        double s_sum = 0;
        for (int l = 0; l < par; ++l) {
            s[l] = y[k + l] * (base2[l] ? -1.0 : 1.0);
            s_sum += s[l];
        }
        const_term = s_sum;
        for (int i = 0; i < k; ++i) const_term += (base1[i] ? -y1[i] : y1[i]);
    }

    double score0() const { return const_term; }
    double sum_s(int i) const {
        double t = 0;
        for (int l : col_support[i]) t += s[l];
        return t;
    }
    double score1(int i) const {
        return const_term - 2.0 * (base1[i] ? -y1[i] : y1[i]) - 2.0 * sum_s(i);
    }
    double score2(int i, int j) const {
        double t = 0;
        // sum over the symmetric difference of the two column supports
        std::size_t a = 0, b = 0;
        const auto &ci = col_support[i], &cj = col_support[j];
        while (a < ci.size() || b < cj.size()) {
            if (b == cj.size() || (a < ci.size() && ci[a] < cj[b]))
                t += s[ci[a++]];
            else if (a == ci.size() || cj[b] < ci[a])
                t += s[cj[b++]];
            else {
                ++a;
                ++b;
            }
        }
        return const_term - 2.0 * (base1[i] ? -y1[i] : y1[i]) - 2.0 * (base1[j] ? -y1[j] : y1[j]) -
               2.0 * t;
    }

    OsdCandidate make(const std::vector<int>& pattern, double score) const {
        OsdCandidate cand;
        cand.pattern = pattern;
        cand.score = score;
        cand.codeword = base1;
        cand.codeword.resize(k + par);
        BitVec c2 = base2;
        for (int i : pattern) {
            cand.codeword[i] ^= 1;
            for (int l : col_support[i]) c2[l] ^= 1;
        }
        std::copy(c2.begin(), c2.end(), cand.codeword.begin() + k);
        return cand;
    }
};

bool better(double score, const std::vector<int>& pat, double best_score,
            const std::vector<int>& best_pat) {
    if (score != best_score) return score > best_score;
    if (pat.size() != best_pat.size()) return pat.size() < best_pat.size();
    return pat < best_pat;
}

}  // namespace

OsdCandidate reprocess_order1(const SystematicPcm& sp, const std::vector<double>& y_perm) {
    Reprocessing rp(sp, y_perm);
    double best = rp.score0();
    std::vector<int> best_pat;
    for (int i = 0; i < rp.k; ++i) {
        const double sc = rp.score1(i);
        if (better(sc, {i}, best, best_pat)) {
            best = sc;
            best_pat = {i};
        }
    }
    return rp.make(best_pat, best);
}

OsdCandidate reprocess_order2(const SystematicPcm& sp, const std::vector<double>& y_perm) {
    Reprocessing rp(sp, y_perm);
    double best = rp.score0();
    std::vector<int> best_pat;
    for (int i = 0; i < rp.k; ++i) {
        const double sc = rp.score1(i);
        if (better(sc, {i}, best, best_pat)) {
            best = sc;
            best_pat = {i};
        }
    }
    for (int i = 0; i < rp.k; ++i)
        for (int j = i + 1; j < rp.k; ++j) {
            const double sc = rp.score2(i, j);
            if (better(sc, {i, j}, best, best_pat)) {
                best = sc;
                best_pat = {i, j};
            }
        }
    return rp.make(best_pat, best);
}

OsdCandidate reprocess_partial2(const SystematicPcm& sp, const std::vector<double>& y_perm,
                                long long budget) {
    Reprocessing rp(sp, y_perm);
    const long long all_pairs = (long long)rp.k * (rp.k - 1) / 2;
    if (budget < 0 || budget > all_pairs) throw std::invalid_argument("reprocess_partial2: bad budget");
    double best = rp.score0();
    std::vector<int> best_pat;
    for (int i = 0; i < rp.k; ++i) {
        const double sc = rp.score1(i);
        if (better(sc, {i}, best, best_pat)) {
            best = sc;
            best_pat = {i};
        }
    }
    // The budget pairs with the lowest |y_i|+|y_j|; ties resolved toward the
    // least-reliable end (larger indices first) to stay deterministic.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(all_pairs);
    for (int i = 0; i < rp.k; ++i)
        for (int j = i + 1; j < rp.k; ++j) pairs.emplace_back(i, j);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        const double sa = std::fabs(rp.y1[a.first]) + std::fabs(rp.y1[a.second]);
        const double sb = std::fabs(rp.y1[b.first]) + std::fabs(rp.y1[b.second]);
        if (sa != sb) return sa < sb;
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    });
    for (long long t = 0; t < budget; ++t) {
        const auto [i, j] = pairs[t];
        const double sc = rp.score2(i, j);
        if (better(sc, {i, j}, best, best_pat)) {
            best = sc;
            best_pat = {i, j};
        }
    }
    return rp.make(best_pat, best);
}

LcosdResult reprocess_lcosd(const bec::TriangulationState& s, const std::vector<double>& soft,
                            const std::vector<double>& channel_llr) {
    const pcm::PrunedPcm& p = *s.pcm;
    const int N = p.block_length;
    const int dim = int(s.decoded_cols.size());
    const int n_r = s.n_r();
    // Hard-decide the first dim+n_r variables (fixed block then references).
    std::vector<int> head = s.decoded_cols;
    head.insert(head.end(), s.ref_cols.begin(), s.ref_cols.end());
    std::vector<int> head_pos(s.mat.n_cols, -1);
    BitVec head_bits(head.size());
    for (int i = 0; i < int(head.size()); ++i) {
        const int bit = p.cvn_bit(head[i]);
        if (bit < 0) throw std::invalid_argument("reprocess_lcosd: hidden variable in the leading block");
        head_pos[head[i]] = i;
        head_bits[i] = soft[bit] >= 0 ? 0 : 1;
    }
    const auto pending = s.pending_rows();

    LcosdResult best;
    best.score = -1e300;
    BitVec value(s.mat.n_cols, 0);
    BitVec fallback;  // zero-pattern completion, used when nothing passes
    double fallback_score = 0;
    for (int e = 0; e <= dim + n_r; ++e) {  // e == 0 is the empty pattern
        BitVec v = head_bits;
        if (e > 0) v[e - 1] ^= 1;
        bool ok = true;
        for (int row : pending) {
            std::uint8_t acc = 0;
            for (int c : s.mat.row_support[row]) acc ^= v[head_pos[c]];
            if (acc) {
                ok = false;
                break;
            }
        }
        if (!ok && e != 0) continue;
        // complete the diagonalized variables: H^(1,3)=I so each diagonal row
        // reads its pivot directly off the leading values
        for (int i = 0; i < int(head.size()); ++i) value[head[i]] = v[i];
        for (auto [row, col] : s.diag) {
            std::uint8_t acc = 0;
            for (int c : s.mat.row_support[row])
                if (c != col) acc ^= value[c];
            value[col] = acc;
        }
        BitVec cw(N);
        for (int b = 0; b < N; ++b) cw[b] = value[p.cvn_columns[b]];
        const double sc = bp::correlation(cw, channel_llr);
        if (e == 0) {
            fallback = cw;
            fallback_score = sc;
        }
        if (!ok) continue;
        ++best.candidates_kept;
        if (sc > best.score) {
            best.score = sc;
            best.codeword = cw;
        }
    }
    if (best.candidates_kept == 0) {
        best.codeword = std::move(fallback);
        best.score = fallback_score;
    }
    return best;
}

BitVec unpermute(const std::vector<int>& lambda, const BitVec& permuted) {
    BitVec out(permuted.size());
    for (std::size_t i = 0; i < permuted.size(); ++i) out[lambda[i]] = permuted[i];
    return out;
}

OsdDecodeResult cbpl_osd_decode(const polar::AugmentedCodeSpec& aug, const pcm::PrunedPcm& p,
                                const std::vector<double>& llr, int list_size,
                                const bp::BpConfig& cfg, const OsdParams& params) {
    OsdDecodeResult res;
    std::vector<bp::CbpOutput> branches;
    branches.reserve(list_size);
    double iter_sum = 0;
    for (int b = 0; b < list_size; ++b) {
        bp::CbpOutput out = bp::cbp_decode(aug, llr, cfg, bp::branch_stages(aug.polar.n, b));
        iter_sum += out.iterations_used;
        if (out.terminated_early) {
            res.codeword = out.hard_c;
            res.stats.early_exit = true;
            res.stats.exit_branch = b;
            res.stats.avg_iterations = iter_sum / (b + 1);
            return res;
        }
        branches.push_back(std::move(out));
    }
    res.stats.avg_iterations = iter_sum / list_size;

    double best = -1e300;
    BitVec best_cw;
    for (int b = 0; b < list_size; ++b) {
        const auto& soft = branches[b].soft_codeword_llrs;
        bec::TriangulationState st = mrib_triangulate(p, soft);
        res.stats.branch_n_r.push_back(st.n_r());
        res.stats.branch_elim_dims.emplace_back(st.n_r(), p.dim() + st.n_r());
        ++res.stats.osd_invocations;
        BitVec cw;
        double score;
        if (params.mode == OsdMode::Lcosd1) {
            LcosdResult lr = reprocess_lcosd(st, soft, llr);
            cw = lr.codeword;
            score = lr.score;
        } else {
            SystematicPcm sp = systematize_stage4(st, soft);
            std::vector<double> y_perm(p.block_length);
            for (int i = 0; i < p.block_length; ++i) y_perm[i] = llr[sp.lambda[i]];
            OsdCandidate cand;
            switch (params.mode) {
                case OsdMode::Osd1:
                    cand = reprocess_order1(sp, y_perm);
                    break;
                case OsdMode::Osd2:
                    cand = reprocess_order2(sp, y_perm);
                    break;
                default: {
                    const long long all_pairs = (long long)sp.k * (sp.k - 1) / 2;
                    const long long budget =
                        std::min<long long>(all_pairs, (long long)std::ceil(params.posd_fraction * double(all_pairs)));
                    cand = reprocess_partial2(sp, y_perm, budget);
                    break;
                }
            }
            cw = unpermute(sp.lambda, cand.codeword);
            score = cand.score;
        }
        if (score > best) {
            best = score;
            best_cw = cw;
        }
    }
    res.codeword = std::move(best_cw);
    return res;
}

}  // namespace fec::osd
