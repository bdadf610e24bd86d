#include <doctest.h>

#include <cmath>
#include <random>

#include "fec/osd.hpp"
#include "oracles.hpp"

using namespace fec;

namespace {

struct OsdCode {
    polar::AugmentedCodeSpec aug;
    pcm::PrunedPcm pruned;
    gf2::DenseBitMatrix dense;
};

OsdCode make_code(int n, int k, std::uint64_t poly) {
    OsdCode oc;
    auto spec = polar::construct_frozen_set(n, k, 0.5);
    oc.aug = polar::make_augmented(spec, poly);
    oc.pruned = pcm::prune(pcm::build_standard_fg_pcm(spec));
    if (poly != 0)
        oc.pruned = pcm::append_crc_rows(oc.pruned, oc.aug.crc, polar::full_generator(n), spec);
    oc.dense = polar::standard_dense_pcm(oc.aug);
    return oc;
}

std::vector<double> random_llrs(int n, std::mt19937_64& rng, double scale = 2.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

double candidate_distance(const BitVec& c, const std::vector<double>& y) {
    double d = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double b = c[i] ? -1.0 : 1.0;
        d += (b - y[i]) * (b - y[i]);
    }
    return d;
}

// Brute-force reprocessing oracle: enumerate the allowed patterns, rebuild
// each candidate from the systematic matrix, rank by explicit distances.
struct BruteBest {
    std::vector<int> pattern;
    BitVec codeword;
    double distance = 0;
};
BruteBest brute_reprocess(const osd::SystematicPcm& sp, const std::vector<double>& y,
                          const std::vector<std::vector<int>>& patterns) {
    const int k = sp.k, N = sp.matrix.cols();
    BitVec base1(k);
    for (int i = 0; i < k; ++i) base1[i] = y[i] >= 0 ? 0 : 1;
    BruteBest best;
    bool first = true;
    for (const auto& pat : patterns) {
        BitVec c1 = base1;
        for (int i : pat) c1[i] ^= 1;
        BitVec cw(N, 0);
        std::copy(c1.begin(), c1.end(), cw.begin());
        for (int l = 0; l < N - k; ++l) {
            std::uint8_t acc = 0;
            for (int i = 0; i < k; ++i)
                if (c1[i] && sp.matrix.get(l, i)) acc ^= 1;
            cw[k + l] = acc;
        }
        const double d = candidate_distance(cw, y);
        const bool better =
            first || d < best.distance - 1e-12 ||
            (std::fabs(d - best.distance) <= 1e-12 &&
             (pat.size() < best.pattern.size() || (pat.size() == best.pattern.size() && pat < best.pattern)));
        if (better) {
            best = {pat, cw, d};
            first = false;
        }
    }
    return best;
}

std::vector<std::vector<int>> patterns_up_to_order(int k, int q) {
    std::vector<std::vector<int>> pats = {{}};
    if (q >= 1)
        for (int i = 0; i < k; ++i) pats.push_back({i});
    if (q >= 2)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pats.push_back({i, j});
    return pats;
}

}  // namespace

TEST_CASE("mrib_triangulate shape and fixed block") {
    auto oc = make_code(5, 16, 0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        auto soft = random_llrs(32, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        REQUIRE(s.complete());
        CHECK(s.n_c() == 0);
        CHECK(int(s.decoded_cols.size()) == oc.pruned.dim());
        // fixed block = the dim most reliable codeword variables
        std::vector<int> order(32);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (std::fabs(soft[a]) != std::fabs(soft[b])) return std::fabs(soft[a]) > std::fabs(soft[b]);
            return a < b;
        });
        for (int i = 0; i < oc.pruned.dim(); ++i)
            CHECK(s.decoded_cols[i] == oc.pruned.cvn_columns[order[i]]);
        // parallel-variant shape: H^(1,3)=I and H^(2,3)=0
        for (int kk = 0; kk < s.n_u(); ++kk) {
            auto [row, col] = s.diag[kk];
            for (int c : s.mat.row_support[row])
                if (s.col_state[c] == bec::ColState::Diagonal) CHECK(c == col);
        }
        for (int r : s.pending_rows())
            for (int c : s.mat.row_support[r]) CHECK(s.col_state[c] != bec::ColState::Diagonal);
        // references are codeword variables
        for (int c : s.ref_cols) CHECK(oc.pruned.is_cvn(c));
    }
}

TEST_CASE("stage 4 produces a systematic PCM whose null space is the permuted codebook") {
    auto oc = make_code(4, 8, 0);
    auto book = oracles::enumerate_codebook(oc.aug);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 25; ++t) {
        auto soft = random_llrs(16, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto sp = osd::systematize_stage4(s, soft);
        REQUIRE(sp.matrix.rows() == 16 - 8);
        REQUIRE(sp.matrix.cols() == 16);
        // [A | I] form
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) CHECK(sp.matrix.get(i, 8 + j) == (i == j));
        // lambda is a permutation of the codeword positions
        std::vector<int> seen(16, 0);
        for (int v : sp.lambda) seen[v] += 1;
        for (int v : seen) CHECK(v == 1);
        // MRIB columns sorted by decreasing reliability
        for (int i = 0; i + 1 < sp.k; ++i)
            CHECK(std::fabs(soft[sp.lambda[i]]) >= std::fabs(soft[sp.lambda[i + 1]]) - 1e-12);
        // every permuted codeword is annihilated
        for (const auto& c : book) {
            BitVec perm(16);
            for (int i = 0; i < 16; ++i) perm[i] = c[sp.lambda[i]];
            CHECK(sp.matrix.multiply(perm) == BitVec(8, 0));
        }
    }
}

TEST_CASE("order-1 reprocessing matches brute enumeration") {
    std::mt19937_64 rng(7);
    for (auto [n, k] : std::vector<std::pair<int, int>>{{4, 8}, {5, 16}}) {
        auto oc = make_code(n, k, 0);
        const int N = 1 << n;
        for (int t = 0; t < 120; ++t) {
            auto soft = random_llrs(N, rng);
            auto s = osd::mrib_triangulate(oc.pruned, soft);
            auto sp = osd::systematize_stage4(s, soft);
            std::vector<double> y(N);
            for (int i = 0; i < N; ++i) y[i] = soft[sp.lambda[i]];
            auto cand = osd::reprocess_order1(sp, y);
            auto brute = brute_reprocess(sp, y, patterns_up_to_order(sp.k, 1));
            REQUIRE(cand.codeword == brute.codeword);
            // candidate satisfies the systematic PCM
            CHECK(sp.matrix.multiply(cand.codeword) == BitVec(N - sp.k, 0));
            // score agrees with the explicit distance ranking
            const double via_corr = candidate_distance(cand.codeword, y);
            CHECK(via_corr == doctest::Approx(brute.distance).epsilon(1e-9));
        }
    }
}

TEST_CASE("order-2 reprocessing matches brute enumeration and dominates order 1") {
    auto oc = make_code(4, 8, 0);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 120; ++t) {
        auto soft = random_llrs(16, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto sp = osd::systematize_stage4(s, soft);
        std::vector<double> y(16);
        for (int i = 0; i < 16; ++i) y[i] = soft[sp.lambda[i]];
        auto c1 = osd::reprocess_order1(sp, y);
        auto c2 = osd::reprocess_order2(sp, y);
        CHECK(c2.score >= c1.score - 1e-12);
        auto brute = brute_reprocess(sp, y, patterns_up_to_order(sp.k, 2));
        REQUIRE(c2.codeword == brute.codeword);
    }
}

TEST_CASE("order-2 scores equal the matrix-product formulation") {
    auto oc = make_code(4, 8, 0);
    std::mt19937_64 rng(11);
    auto soft = random_llrs(16, rng);
    auto s = osd::mrib_triangulate(oc.pruned, soft);
    auto sp = osd::systematize_stage4(s, soft);
    const int k = sp.k, par = 16 - k;
    std::vector<double> y(16);
    for (int i = 0; i < 16; ++i) y[i] = soft[sp.lambda[i]];
    BitVec base1(k);
    for (int i = 0; i < k; ++i) base1[i] = y[i] >= 0 ? 0 : 1;
    BitVec base2(par, 0);
    for (int l = 0; l < par; ++l) {
        std::uint8_t acc = 0;
        for (int i = 0; i < k; ++i)
            if (base1[i] && sp.matrix.get(l, i)) acc ^= 1;
        base2[l] = acc;
    }
    std::vector<double> svec(par);
    for (int l = 0; l < par; ++l) svec[l] = y[k + l] * (base2[l] ? -1.0 : 1.0);
    // D = A * B with A_i = s .* (-1)^{h_i} rows and B_j = (-1)^{h_j} columns
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            double dij = 0;
            for (int l = 0; l < par; ++l) {
                const double ai = svec[l] * (sp.matrix.get(l, i) ? -1.0 : 1.0);
                const double bj = sp.matrix.get(l, j) ? -1.0 : 1.0;
                dij += ai * bj;
            }
            // direct evaluation of the pair objective must match
            double direct = 0;
            for (int l = 0; l < par; ++l) {
                const double sgn = ((sp.matrix.get(l, i) ^ sp.matrix.get(l, j)) ? -1.0 : 1.0);
                direct += svec[l] * sgn;
            }
            CHECK(dij == doctest::Approx(direct).epsilon(1e-9));
        }
}

TEST_CASE("partial order-2 evaluates exactly the least-reliable pairs") {
    // K = 12 so the pair set is nontrivial
    auto oc = make_code(4, 12, 0);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 40; ++t) {
        auto soft = random_llrs(16, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto sp = osd::systematize_stage4(s, soft);
        std::vector<double> y(16);
        for (int i = 0; i < 16; ++i) y[i] = soft[sp.lambda[i]];
        const int k = sp.k;
        const long long all_pairs = (long long)k * (k - 1) / 2;

        // full budget reproduces order 2; empty budget reproduces order 1
        CHECK(osd::reprocess_partial2(sp, y, all_pairs).codeword == osd::reprocess_order2(sp, y).codeword);
        CHECK(osd::reprocess_partial2(sp, y, 0).codeword == osd::reprocess_order1(sp, y).codeword);

        // the budget-M search equals brute enumeration over the bottom-M pairs
        const long long M = all_pairs / 4;
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
            const double sa = std::fabs(y[a.first]) + std::fabs(y[a.second]);
            const double sb = std::fabs(y[b.first]) + std::fabs(y[b.second]);
            if (sa != sb) return sa < sb;
            if (a.first != b.first) return a.first > b.first;
            return a.second > b.second;
        });
        auto pats = patterns_up_to_order(k, 1);
        for (long long i = 0; i < M; ++i) pats.push_back({pairs[i].first, pairs[i].second});
        auto brute = brute_reprocess(sp, y, pats);
        CHECK(osd::reprocess_partial2(sp, y, M).codeword == brute.codeword);
    }
}

TEST_CASE("lcosd filters weight-one patterns by the residual checks") {
    auto oc = make_code(5, 16, 0);
    std::mt19937_64 rng(17);
    int with_refs = 0, without_refs = 0;
    for (int t = 0; t < 200 && (with_refs < 25 || without_refs < 5); ++t) {
        auto soft = random_llrs(32, rng);
        auto chan = soft;  // LLR domain distances
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto lr = osd::reprocess_lcosd(s, soft, chan);
        (s.n_r() > 0 ? with_refs : without_refs) += 1;

        // brute filter: all dim+n_r+1 patterns, keep those passing the bottom
        // checks, complete through the diagonal, score by correlation
        const int dim = oc.pruned.dim();
        const int head = dim + s.n_r();
        std::vector<int> head_cols = s.decoded_cols;
        head_cols.insert(head_cols.end(), s.ref_cols.begin(), s.ref_cols.end());
        BitVec hard(head);
        for (int i = 0; i < head; ++i) hard[i] = soft[oc.pruned.cvn_bit(head_cols[i])] >= 0 ? 0 : 1;
        double best = -1e300;
        BitVec best_cw;
        int kept = 0;
        for (int e = 0; e <= head; ++e) {
            BitVec v = hard;
            if (e > 0) v[e - 1] ^= 1;
            BitVec value(s.mat.n_cols, 0);
            for (int i = 0; i < head; ++i) value[head_cols[i]] = v[i];
            bool ok = true;
            for (int r : s.pending_rows()) {
                std::uint8_t acc = 0;
                for (int c : s.mat.row_support[r]) acc ^= value[c];
                if (acc) ok = false;
            }
            if (!ok) continue;
            ++kept;
            for (auto [row, col] : s.diag) {
                std::uint8_t acc = 0;
                for (int c : s.mat.row_support[row])
                    if (c != col) acc ^= value[c];
                value[col] = acc;
            }
            BitVec cw(32);
            for (int b = 0; b < 32; ++b) cw[b] = value[oc.pruned.cvn_columns[b]];
            const double sc = bp::correlation(cw, chan);
            if (sc > best) {
                best = sc;
                best_cw = cw;
            }
        }
        REQUIRE(kept == lr.candidates_kept);
        if (kept > 0) {
            CHECK(lr.codeword == best_cw);
            CHECK(lr.score == doctest::Approx(best));
        } else {
            CHECK(lr.codeword.size() == 32);  // zero-pattern fallback
        }
        if (s.n_r() == 0) CHECK(kept == head + 1);  // all patterns pass vacuously
    }
    CHECK(with_refs > 0);
}

TEST_CASE("unpermuted OSD winners are codewords of the augmented code") {
    auto oc = make_code(5, 16, 0x43);
    std::mt19937_64 rng(19);
    for (int t = 0; t < 40; ++t) {
        auto soft = random_llrs(32, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto sp = osd::systematize_stage4(s, soft);
        std::vector<double> y(32);
        for (int i = 0; i < 32; ++i) y[i] = soft[sp.lambda[i]];
        for (auto cand : {osd::reprocess_order1(sp, y), osd::reprocess_order2(sp, y)}) {
            BitVec cw = osd::unpermute(sp.lambda, cand.codeword);
            CHECK(oc.dense.multiply(cw) == BitVec(oc.dense.rows(), 0));
        }
    }
}

TEST_CASE("mrib matches the greedy oracle (reported, not enforced)") {
    auto oc = make_code(6, 32, 0);
    std::mt19937_64 rng(23);
    int mismatches = 0;
    const int T = 60;
    for (int t = 0; t < T; ++t) {
        auto soft = random_llrs(64, rng);
        auto s = osd::mrib_triangulate(oc.pruned, soft);
        auto sp = osd::systematize_stage4(s, soft);
        std::vector<double> rel(64);
        for (int i = 0; i < 64; ++i) rel[i] = std::fabs(soft[i]);
        auto oracle = oracles::greedy_mrib(oc.dense, rel);
        std::vector<int> ours(sp.lambda.begin(), sp.lambda.begin() + sp.k);
        std::sort(ours.begin(), ours.end());
        std::sort(oracle.begin(), oracle.end());
        if (ours != oracle) ++mismatches;
    }
    MESSAGE("MRIB mismatches vs greedy oracle: ", mismatches, "/", T);
    WARN_LE(mismatches, T / 10);
}

TEST_CASE("cbpl_osd short-circuits on early termination") {
    auto oc = make_code(5, 16, 0x43);
    std::mt19937_64 rng(29);
    BitVec msg(oc.aug.message_length());
    for (auto& b : msg) b = rng() & 1;
    BitVec c = oc.aug.encode_message(msg);
    std::vector<double> llr(32);
    for (int i = 0; i < 32; ++i) llr[i] = c[i] ? -12.0 : 12.0;
    auto res = osd::cbpl_osd_decode(oc.aug, oc.pruned, llr, 6, {}, {});
    CHECK(res.stats.early_exit);
    CHECK(res.stats.osd_invocations == 0);
    CHECK(res.codeword == c);
}

TEST_CASE("cbpl_osd runs the pipeline when no branch terminates") {
    auto oc = make_code(5, 16, 0x43);
    std::mt19937_64 rng(31);
    int invoked = 0;
    for (int t = 0; t < 25 && invoked == 0; ++t) {
        BitVec msg(oc.aug.message_length());
        for (auto& b : msg) b = rng() & 1;
        BitVec c = oc.aug.encode_message(msg);
        const double sigma = 1.4;  // noisy enough that CBP often fails
        auto y = bp::transmit_awgn(c, sigma, rng());
        auto llr = bp::channel_llr(y, sigma);
        bp::BpConfig cfg;
        cfg.i_max = 20;
        for (auto mode : {osd::OsdMode::Osd1, osd::OsdMode::Osd2, osd::OsdMode::Posd2, osd::OsdMode::Lcosd1}) {
            osd::OsdParams params;
            params.mode = mode;
            auto res = osd::cbpl_osd_decode(oc.aug, oc.pruned, llr, 6, cfg, params);
            if (!res.stats.early_exit) {
                ++invoked;
                CHECK(res.stats.osd_invocations == 6);
                CHECK(res.codeword.size() == 32);
                if (mode != osd::OsdMode::Lcosd1)
                    CHECK(oc.dense.multiply(res.codeword) == BitVec(oc.dense.rows(), 0));
            }
        }
    }
    CHECK(invoked > 0);
}
