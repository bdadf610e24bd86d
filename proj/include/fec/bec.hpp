#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fec/gf2.hpp"
#include "fec/pcm.hpp"

namespace fec::bec {

struct ErasureWord {
    BitVec values;                 // meaningful only where !erased
    std::vector<std::uint8_t> erased;
    double epsilon = 0.0;
};

ErasureWord transmit_bec(const BitVec& c, double epsilon, std::uint64_t rng_seed);

struct ReferencePolicy {
    enum class Kind { RandomUnknown, MinUnknownCheck };
    Kind kind = Kind::MinUnknownCheck;
    int batch = 1;           // n'_r references chosen per round
    std::uint64_t seed = 0;  // RandomUnknown only
};

struct DecodeStats {
    long long xor_count = 0;
    long long perm_count = 0;
    int n_r = 0;
    int n_e = 0;
    int elim_rows = 0, elim_cols = 0;  // stage-4 augmented system dims
    long long stage3_xor = 0;
    long long h13_ones = 0;  // gamma
    long long h11_ones = 0;
    int n_u = 0;
};

enum class ColState : std::uint8_t { Unknown, Decoded, Reference, Diagonal };
enum class RowState : std::uint8_t { Pending, Decoded, Diagonal };

// Working state of stages 1-2: a copy of the pruned PCM with the block
// decomposition tracked by states and orderings rather than physical
// permutation. Sequential triangulation never changes matrix content; the
// parallel variant adds row-elimination XORs.
struct TriangulationState {
    gf2::SparseBinaryMatrix mat;
    const pcm::PrunedPcm* pcm = nullptr;
    bool values_valid = false;     // true in the BEC pipeline, false for OSD
    std::vector<ColState> col_state;
    std::vector<RowState> row_state;
    BitVec value;                  // per column, valid where Decoded and values_valid
    BitVec acc;                    // per row: parity of known-value neighbors
    std::vector<int> unknown_count;
    std::vector<int> decoded_cols, decoded_rows, ref_cols;
    std::vector<std::pair<int, int>> diag;  // (row, col) in pivot order
    std::vector<int> diag_index_of_col;     // -1 or index into diag
    std::vector<int> ref_index_of_col;
    DecodeStats stats;

    int n_d() const { return int(decoded_cols.size()); }
    int n_c() const { return int(decoded_rows.size()); }
    int n_r() const { return int(ref_cols.size()); }
    int n_u() const { return int(diag.size()); }
    int n_e() const { return mat.n_rows - n_c() - n_u(); }
    bool complete() const { return n_d() + n_r() + n_u() == mat.n_cols; }

    // Fig. 3 ordering: decoded | references | diagonal columns, decoded |
    // diagonal | remaining rows. Maps position -> matrix index.
    gf2::PermutationPair perms() const;
    std::vector<int> pending_rows() const;
};

TriangulationState make_state(const pcm::PrunedPcm& p);

// Declares a column's value known (stage-1 entry points) and updates row
// unknown counts. Throws on contradictions among fully known checks.
void assign_known(TriangulationState& s, int col, std::uint8_t v);
void peel_to_fixpoint(TriangulationState& s);

// Stage 1: known codeword positions in, peeling to fixpoint.
TriangulationState peel_bp(const pcm::PrunedPcm& p, const ErasureWord& w);

// One batch of diagonal extension steps to exhaustion; with eliminate set,
// each step's pivot columns are cleared below the diagonal by row XORs (the
// parallel-friendly variant; makes H^(1,3)=I and H^(2,3)=0).
void extend_diagonal(TriangulationState& s, bool eliminate);

void mark_reference(TriangulationState& s, int col);

// Stage 2 with the module's reference policies.
void triangulate(TriangulationState& s, const ReferencePolicy& policy);
void triangulate_parallel_variant(TriangulationState& s, const ReferencePolicy& policy);

struct AffineExpression {
    gf2::DenseBitMatrix a_mat;  // n_u x n_r
    BitVec a_vec;               // length n_u
};

// Stage 3: u = A r + a by back substitution over the unit lower-triangular
// diagonal block.
AffineExpression back_substitute(TriangulationState& s);

// Stage 4: builds (H^(2,2) + H^(2,3)A) r = s^(2) + H^(2,3)a and solves it.
gf2::SolveOutcome solve_reference(TriangulationState& s, const AffineExpression& e);

enum class Variant { Sequential, Parallel };

struct DecodeOutcome {
    enum class Kind { Decoded, Ambiguous } kind = Kind::Ambiguous;
    BitVec codeword;  // length N, present iff Decoded
    DecodeStats stats;
};

DecodeOutcome ml_decode_bec(const pcm::PrunedPcm& p, const ErasureWord& w,
                            const ReferencePolicy& policy, Variant variant = Variant::Sequential);

// Reference decoder: dense elimination of H_era c_era = H_known c_known.
DecodeOutcome brute_force_ml_bec(const gf2::DenseBitMatrix& h, const ErasureWord& w);

}  // namespace fec::bec
