#pragma once

#include <cstdint>
#include <vector>

#include "fec/bits.hpp"
#include "fec/polar.hpp"

namespace fec::bp {

struct BpConfig {
    int i_max = 100;
    int i_thr = 10;
    double llr_clip = 20.0;
    double scaling = 0.9375;  // min-sum normalization
};

// Realizes a stage-permuted polar factor graph: entry t is the index bit the
// (t+1)-th stage acts on. The standard graph is {0, 1, ..., n-1}.
struct StagePermutation {
    std::vector<int> stage_bits;
};

StagePermutation standard_stages(int n);
// Branch b of the list decoder: branch 0 is the standard graph; the rest
// permute the bits of the final three stages in lexicographic order.
StagePermutation branch_stages(int n, int branch);
int max_branches(int n);

std::vector<double> transmit_awgn(const BitVec& c, double sigma, std::uint64_t rng_seed);
std::vector<double> channel_llr(const std::vector<double>& y, double sigma, double llr_clip = 20.0);

struct CbpOutput {
    std::vector<double> soft_codeword_llrs;  // length N, codeword order
    BitVec hard_u;                           // length N
    BitVec hard_c;                           // length N
    bool terminated_early = false;
    int iterations_used = 0;
};

// Scaled min-sum on the n-stage lattice; stops when the hard decisions
// re-encode consistently (the CRC condition is vacuous without a CRC).
CbpOutput bp_decode(const polar::PolarCodeSpec& spec, const std::vector<double>& llr,
                    const BpConfig& cfg);

// CRC-aided BP: the CRC factor graph joins the schedule after i_thr
// iterations; early termination requires both the polar re-encoding condition
// and H_crc u_A = 0.
CbpOutput cbp_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                     const BpConfig& cfg, const StagePermutation& stages);
CbpOutput cbp_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                     const BpConfig& cfg);

struct CbplResult {
    BitVec codeword;  // selected output (valid codeword when any_valid)
    bool any_valid = false;
    int selected_branch = -1;
    std::vector<CbpOutput> branches;
};

// L CBP branches on distinct stage permutations; selects among valid-codeword
// outputs by minimal Euclidean distance to the channel output (equivalently
// maximal correlation with the LLRs), falling back to the closest output.
CbplResult cbpl_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                       int list_size, const BpConfig& cfg);

// True iff hard_c is a codeword of the CRC-augmented code.
bool is_valid_codeword(const polar::AugmentedCodeSpec& aug, const BitVec& hard_c);

double correlation(const BitVec& c, const std::vector<double>& llr);

}  // namespace fec::bp
