#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fec/gf2.hpp"
#include "fec/polar.hpp"

namespace fec::pcm {

// Full polar factor-graph PCM: N log2 N check rows over N(1+log2 N) variable
// columns. Column l*N + i is the variable node of layer l at index i; layer 0
// carries the information word, layer n the codeword. Stage s (1-based) ties
// indices differing in bit s-1; each butterfly contributes one degree-3 check
// {left top, left bottom, right top} and one degree-2 check {left bottom,
// right bottom}.
struct FactorGraphPcm {
    gf2::SparseBinaryMatrix matrix;
    int n = 0;
    int block_length = 0;
    std::vector<int> cvn_columns;  // codeword bit b -> column n*N + bitrev(b)
    std::vector<int> fvn_columns;  // frozen layer-0 columns
};

FactorGraphPcm build_standard_fg_pcm(const polar::PolarCodeSpec& spec);

struct PrunedPcm {
    gf2::SparseBinaryMatrix matrix;  // (N'-K) x N', plus crc_rows rows when appended
    int block_length = 0;            // N
    int code_k = 0;                  // polar dimension K
    int crc_rows = 0;                // r (0 before append_crc_rows)
    // The last N columns are the codeword variables; cvn_columns[b] is the
    // column of codeword bit b.
    std::vector<int> cvn_columns;
    // Per column, the sorted original factor-graph node ids merged into it.
    std::vector<std::vector<int>> origin_map;

    int n_prime() const { return matrix.n_cols; }
    // Dimension of the code the matrix checks (K, or K-r once CRC rows exist).
    int dim() const { return matrix.n_cols - matrix.n_rows; }
    bool is_cvn(int col) const { return col >= matrix.n_cols - block_length; }
    int cvn_bit(int col) const { return cvn_bit_of_[col]; }  // -1 for hidden

    std::vector<int> cvn_bit_of_;  // filled by prune/deserialize
};

// Applies the six reduction rules to fixpoint. degree_cap, when set, skips
// rule-5 merges whose merged check would exceed that degree.
PrunedPcm prune(const FactorGraphPcm& fg, std::optional<int> degree_cap = {});

// Greedy density reduction: replace the heavier of two rows by their sum when
// the sum is lighter than both; preserves the row space.
gf2::DenseBitMatrix reduce_density_greedy(const gf2::DenseBitMatrix& rows);

// Appends the r CRC constraints H_crc G_N^T (density-reduced), supported on
// the codeword columns only. Row count becomes N'-K+r.
PrunedPcm append_crc_rows(const PrunedPcm& p, const polar::CrcSpec& crc,
                          const gf2::DenseBitMatrix& g_full, const polar::PolarCodeSpec& spec);

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Versioned little-endian binary artifact with a trailing checksum.
void serialize(const PrunedPcm& p, std::ostream& os);
PrunedPcm deserialize(std::istream& is);
void save_artifact(const PrunedPcm& p, const std::string& path);
PrunedPcm load_artifact(const std::string& path);

}  // namespace fec::pcm
