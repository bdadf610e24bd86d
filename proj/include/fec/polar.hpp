#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fec/bits.hpp"
#include "fec/gf2.hpp"

namespace fec::polar {

struct PolarCodeSpec {
    int n = 0;             // log2 blocklength
    int block_length = 0;  // N = 2^n
    int k = 0;             // dimension of the polar code
    double design_param = 0.5;
    std::vector<int> info_set;        // sorted, size k
    std::vector<int> frozen_set;      // sorted, size N-k
    std::vector<std::uint8_t> is_frozen;  // size N
};

// G_N = B_N F^{xn} with F = [[1,0],[1,1]] and B_N the bit-reversal permutation.
gf2::DenseBitMatrix full_generator(int n);

// Bhattacharyya construction over the BEC: Z- = 2Z - Z^2, Z+ = Z^2 starting
// from the design erasure probability; the N-K indices with largest Z are
// frozen, ties broken by freezing the larger index first.
PolarCodeSpec construct_frozen_set(int n, int k, double design_erasure);

// c^T = u^T G_N for a full-length input word u (frozen positions included).
BitVec polar_transform(const BitVec& u);

// Embeds info on the information set (zeros on the frozen set) and encodes.
BitVec encode(const PolarCodeSpec& spec, const BitVec& info);

// Plain successive-cancellation baseline; returns the codeword estimate.
// LLRs may be +-infinity (BEC-style inputs).
BitVec sc_decode(const PolarCodeSpec& spec, const std::vector<double>& llr);

struct CrcSpec {
    int r = 0;               // number of CRC bits (0 = no CRC)
    int m = 0;               // message length
    std::uint64_t poly = 0;  // generator polynomial incl. x^r term, e.g. 0x43 = x^6+x+1
    gf2::DenseBitMatrix generator;  // m x (m+r), systematic [I | P]
    gf2::DenseBitMatrix pcm;        // r x (m+r), [P^T | I_r]
};

// poly must have degree >= 1 unless r == 0 is wanted (pass poly = 0).
CrcSpec make_crc(int m, std::uint64_t poly);

BitVec crc_append(const CrcSpec& crc, const BitVec& msg);  // length m -> m+r
bool crc_check(const CrcSpec& crc, const BitVec& word);    // H_crc * word == 0

struct AugmentedCodeSpec {
    PolarCodeSpec polar;
    CrcSpec crc;  // crc.m + crc.r == polar.k

    int message_length() const { return crc.m; }
    double rate() const { return double(crc.m) / polar.block_length; }
    BitVec encode_message(const BitVec& msg) const;  // length m -> N
};

AugmentedCodeSpec make_augmented(PolarCodeSpec spec, std::uint64_t crc_poly);

// Standard dense PCM: the columns of G_N indexed by the frozen set, one row
// per frozen index; with CRC rows H_crc G_N^T appended when r > 0. Full row
// rank (N - m) x N.
gf2::DenseBitMatrix standard_dense_pcm(const AugmentedCodeSpec& aug);

// Code-spec file (JSON text): fields n, K, frozen_set (sorted, 0-based),
// crc_poly (hex string), design_param.
std::string code_spec_to_json(const PolarCodeSpec& spec, std::uint64_t crc_poly);
void code_spec_from_json(const std::string& text, PolarCodeSpec& spec, std::uint64_t& crc_poly);

}  // namespace fec::polar
