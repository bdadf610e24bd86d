#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fec/bec.hpp"
#include "fec/bp_awgn.hpp"
#include "oracles.hpp"

using namespace fec;

namespace {

polar::AugmentedCodeSpec make_aug(int n, int k, std::uint64_t poly) {
    return polar::make_augmented(polar::construct_frozen_set(n, k, 0.5), poly);
}

BitVec random_word(const polar::AugmentedCodeSpec& aug, std::mt19937_64& rng) {
    BitVec msg(aug.message_length());
    for (auto& b : msg) b = rng() & 1;
    return aug.encode_message(msg);
}

std::vector<double> noiseless_llr(const BitVec& c, double mag = 12.0) {
    std::vector<double> llr(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) llr[i] = c[i] ? -mag : mag;
    return llr;
}

}  // namespace

TEST_CASE("transmit_awgn basics") {
    BitVec c = {0, 1, 0, 1};
    auto tiny = bp::transmit_awgn(c, 1e-9, 4);
    for (int i = 0; i < 4; ++i) CHECK(tiny[i] == doctest::Approx(c[i] ? -1.0 : 1.0).epsilon(1e-6));

    // mean of BPSK(0) is +1
    std::mt19937_64 rng(1);
    double mean = 0;
    const int T = 4000;
    for (int t = 0; t < T; ++t) mean += bp::transmit_awgn({0}, 1.0, rng())[0];
    CHECK(mean / T == doctest::Approx(1.0).epsilon(0.06));

    CHECK(bp::transmit_awgn(c, 0.8, 99) == bp::transmit_awgn(c, 0.8, 99));
    CHECK_THROWS_AS((void)bp::transmit_awgn(c, 0.0, 1), std::invalid_argument);
}

TEST_CASE("channel_llr scaling and clipping") {
    std::vector<double> y = {0.0, 1.0, -3.0, 100.0};
    auto llr = bp::channel_llr(y, 1.0, 20.0);
    CHECK(llr[0] == 0.0);
    CHECK(llr[1] == doctest::Approx(2.0));  // sigma^2 = 1, y = 1 -> 2
    CHECK(llr[2] == doctest::Approx(-6.0));
    CHECK(llr[3] == 20.0);  // clipped
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK((llr[i] > 0) - (llr[i] < 0) == (y[i] > 0) - (y[i] < 0));
}

TEST_CASE("bp_decode near-noiseless converges to the codeword") {
    auto aug = make_aug(5, 16, 0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        BitVec c = random_word(aug, rng);
        auto out = bp::bp_decode(aug.polar, noiseless_llr(c), {});
        CHECK(out.terminated_early);
        CHECK(out.iterations_used <= 5);
        CHECK(out.hard_c == c);
        for (int f : aug.polar.frozen_set) CHECK(out.hard_u[f] == 0);
    }
}

TEST_CASE("bp on erasure-valued LLRs matches peeling on the pruned PCM") {
    const int n = 5, N = 32;
    auto aug = make_aug(n, 16, 0);
    auto pruned = pcm::prune(pcm::build_standard_fg_pcm(aug.polar));
    bp::BpConfig cfg;
    cfg.scaling = 1.0;  // min-sum equals BP on the BEC
    cfg.llr_clip = 100.0;
    cfg.i_max = 200;
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        BitVec c = random_word(aug, rng);
        auto w = bec::transmit_bec(c, 0.45, rng());
        std::vector<double> llr(N);
        for (int i = 0; i < N; ++i) llr[i] = w.erased[i] ? 0.0 : (c[i] ? -cfg.llr_clip : cfg.llr_clip);
        auto out = bp::bp_decode(aug.polar, llr, cfg);
        auto s = bec::peel_bp(pruned, w);
        for (int b = 0; b < N; ++b) {
            const bool bp_decided = out.soft_codeword_llrs[b] != 0.0;
            const bool peel_decided = s.col_state[pruned.cvn_columns[b]] == bec::ColState::Decoded;
            CHECK(bp_decided == peel_decided);
            if (bp_decided) CHECK((out.soft_codeword_llrs[b] < 0 ? 1 : 0) == s.value[pruned.cvn_columns[b]]);
        }
    }
}

TEST_CASE("cbp early termination requires both conditions") {
    auto aug = make_aug(5, 16, 0x43);
    std::mt19937_64 rng(9);
    BitVec c = random_word(aug, rng);

    SUBCASE("valid word terminates early") {
        auto out = bp::cbp_decode(aug, noiseless_llr(c), {});
        CHECK(out.terminated_early);
        CHECK(out.hard_c == c);
    }
    SUBCASE("polar-valid word failing the CRC never terminates early") {
        // flip one information bit: still a polar codeword, CRC almost surely broken
        BitVec u = polar::polar_transform(c);
        BitVec u_a(aug.polar.k);
        for (int j = 0; j < aug.polar.k; ++j) u_a[j] = u[aug.polar.info_set[j]];
        u[aug.polar.info_set[0]] ^= 1;
        BitVec bad = polar::polar_transform(u);  // involution: c' = transform(u')
        BitVec ua2(aug.polar.k);
        BitVec u2 = polar::polar_transform(bad);
        for (int j = 0; j < aug.polar.k; ++j) ua2[j] = u2[aug.polar.info_set[j]];
        REQUIRE_FALSE(polar::crc_check(aug.crc, ua2));
        bp::BpConfig cfg;
        cfg.i_max = 30;
        auto out = bp::cbp_decode(aug, noiseless_llr(bad), cfg);
        CHECK_FALSE(out.terminated_early);
        CHECK(out.iterations_used == 30);
        CHECK_FALSE(out.soft_codeword_llrs.empty());
    }
}

TEST_CASE("branch permutations enumerate the final three stages") {
    CHECK(bp::max_branches(7) == 6);
    CHECK(bp::max_branches(2) == 2);
    auto std7 = bp::branch_stages(7, 0).stage_bits;
    CHECK(std7 == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    std::set<std::vector<int>> seen;
    for (int b = 0; b < 6; ++b) {
        auto sb = bp::branch_stages(7, b).stage_bits;
        // leading stages untouched
        for (int i = 0; i + 3 < 7; ++i) CHECK(sb[i] == i);
        seen.insert(sb);
    }
    CHECK(seen.size() == 6);
    CHECK_THROWS_AS((void)bp::branch_stages(7, 6), std::invalid_argument);
}

TEST_CASE("every branch graph decodes noiseless codewords of the same code") {
    auto aug = make_aug(4, 8, 0x43);
    std::mt19937_64 rng(15);
    for (int t = 0; t < 5; ++t) {
        BitVec c = random_word(aug, rng);
        for (int b = 0; b < bp::max_branches(4); ++b) {
            auto out = bp::cbp_decode(aug, noiseless_llr(c), {}, bp::branch_stages(4, b));
            CHECK(out.terminated_early);
            CHECK(out.hard_c == c);
        }
    }
}

TEST_CASE("cbpl with L=1 equals cbp") {
    auto aug = make_aug(5, 16, 0x43);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 15; ++t) {
        BitVec c = random_word(aug, rng);
        const double sigma = 0.9;
        auto y = bp::transmit_awgn(c, sigma, rng());
        auto llr = bp::channel_llr(y, sigma);
        auto single = bp::cbp_decode(aug, llr, {});
        auto list = bp::cbpl_decode(aug, llr, 1, {});
        CHECK(list.branches.size() == 1);
        CHECK(list.codeword == single.hard_c);
        CHECK(list.branches[0].hard_c == single.hard_c);
        CHECK(list.branches[0].iterations_used == single.iterations_used);
        CHECK(list.branches[0].soft_codeword_llrs == single.soft_codeword_llrs);
    }
}

TEST_CASE("cbpl selection prefers valid codewords by correlation") {
    auto aug = make_aug(5, 16, 0x43);
    std::mt19937_64 rng(19);
    int valid_cases = 0;
    for (int t = 0; t < 30; ++t) {
        BitVec c = random_word(aug, rng);
        const double sigma = 0.85;
        auto y = bp::transmit_awgn(c, sigma, rng());
        auto llr = bp::channel_llr(y, sigma);
        auto res = bp::cbpl_decode(aug, llr, bp::max_branches(5), {});
        if (res.any_valid) {
            ++valid_cases;
            CHECK(bp::is_valid_codeword(aug, res.codeword));
            // no other valid branch output correlates better
            for (const auto& br : res.branches)
                if (bp::is_valid_codeword(aug, br.hard_c))
                    CHECK(bp::correlation(res.codeword, llr) >= bp::correlation(br.hard_c, llr));
        }
    }
    CHECK(valid_cases > 0);
}

TEST_CASE("early termination output is always a valid codeword") {
    auto aug = make_aug(6, 32, 0x43);
    auto h = polar::standard_dense_pcm(aug);
    std::mt19937_64 rng(23);
    int early = 0;
    for (int t = 0; t < 40; ++t) {
        BitVec c = random_word(aug, rng);
        const double sigma = 0.8;
        auto y = bp::transmit_awgn(c, sigma, rng());
        auto llr = bp::channel_llr(y, sigma);
        auto out = bp::cbp_decode(aug, llr, {});
        if (out.terminated_early) {
            ++early;
            CHECK(bp::is_valid_codeword(aug, out.hard_c));
            CHECK(h.multiply(out.hard_c) == BitVec(h.rows(), 0));
        }
    }
    CHECK(early > 0);
}

TEST_CASE("lower noise means fewer bit errors") {
    auto aug = make_aug(6, 32, 0x43);
    std::mt19937_64 rng(29);
    auto run = [&](double ebn0_db, std::uint64_t seed) {
        std::mt19937_64 r2(seed);
        const double sigma = std::sqrt(1.0 / (2.0 * aug.rate() * std::pow(10.0, ebn0_db / 10)));
        long long errs = 0;
        for (int t = 0; t < 150; ++t) {
            BitVec c = random_word(aug, r2);
            auto y = bp::transmit_awgn(c, sigma, r2());
            auto llr = bp::channel_llr(y, sigma);
            auto out = bp::cbp_decode(aug, llr, {});
            for (std::size_t i = 0; i < c.size(); ++i) errs += out.hard_c[i] != c[i];
        }
        return errs;
    };
    CHECK(run(5.0, 1) < run(0.0, 1));
}
