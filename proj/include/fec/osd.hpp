#pragma once

#include <cstdint>
#include <vector>

#include "fec/bec.hpp"
#include "fec/bp_awgn.hpp"
#include "fec/gf2.hpp"
#include "fec/pcm.hpp"

namespace fec::osd {

struct ReliabilityOrder {
    std::vector<int> lambda1;  // sorted codeword bits by decreasing |llr|
    std::vector<int> lambda;   // final systematic position -> original bit
};

// Stages 2-3: sorts codeword variables by reliability, fixes the dim() most
// reliable, and runs the parallel-variant triangulation with the reference
// policy "highest-reliability unknown codeword variable from a check with the
// fewest unknowns". The returned state has H^(1,3)=I and H^(2,3)=0.
bec::TriangulationState mrib_triangulate(const pcm::PrunedPcm& p, const std::vector<double>& soft_llrs);

struct SystematicPcm {
    gf2::DenseBitMatrix matrix;  // (N-k) x N in the form [A | I]
    std::vector<int> lambda;     // position -> original codeword bit
    int k = 0;                   // MRIB size (code dimension)
};

// Stage 4: eliminates the n_r x (k+n_r) block (row operations confined to
// those n_r rows), prefers reliable columns leftward, and erases the hidden
// row/column pairs, yielding the (N-k) x N systematic PCM.
SystematicPcm systematize_stage4(const bec::TriangulationState& s, const std::vector<double>& soft_llrs);

struct OsdCandidate {
    std::vector<int> pattern;  // flipped positions (permuted domain), size <= 2
    BitVec codeword;           // length N, permuted domain
    double score = 0;          // correlation sum_i (-1)^{c_i} y_i
};

OsdCandidate reprocess_order1(const SystematicPcm& sp, const std::vector<double>& y_perm);
OsdCandidate reprocess_order2(const SystematicPcm& sp, const std::vector<double>& y_perm);
// Exactly the budget pairs with the lowest |y_i|+|y_j| are evaluated.
OsdCandidate reprocess_partial2(const SystematicPcm& sp, const std::vector<double>& y_perm, long long budget);

// Low-complexity variant: skips stage 4, filters the weight<=1 patterns over
// the first k+n_r variables by the n_r bottom checks, and completes the rest
// through the unit diagonal. Returns the winner in original codeword order.
struct LcosdResult {
    BitVec codeword;  // length N, original order
    double score = 0;
    int candidates_kept = 0;
};
LcosdResult reprocess_lcosd(const bec::TriangulationState& s, const std::vector<double>& soft_llrs,
                            const std::vector<double>& channel_llr);

enum class OsdMode { Osd1, Osd2, Posd2, Lcosd1 };

struct OsdParams {
    OsdMode mode = OsdMode::Osd1;
    double posd_fraction = 0.25;  // f; budget = ceil(f * k(k-1)/2)
};

struct OsdDecodeStats {
    int osd_invocations = 0;
    bool early_exit = false;
    int exit_branch = -1;
    std::vector<int> branch_n_r;
    std::vector<std::pair<int, int>> branch_elim_dims;  // n_r x (k+n_r) blocks
    double avg_iterations = 0;
};

struct OsdDecodeResult {
    BitVec codeword;  // length N, original order
    OsdDecodeStats stats;
};

// Full CBPL-OSD pipeline: L CBP branches (early termination short-circuits),
// per-branch OSD on that branch's soft output, cross-branch selection by
// minimal Euclidean distance to the channel output.
OsdDecodeResult cbpl_osd_decode(const polar::AugmentedCodeSpec& aug, const pcm::PrunedPcm& p,
                                const std::vector<double>& llr, int list_size,
                                const bp::BpConfig& cfg, const OsdParams& params);

BitVec unpermute(const std::vector<int>& lambda, const BitVec& permuted);

}  // namespace fec::osd
