#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fec/bec.hpp"
#include "fec/bp_awgn.hpp"
#include "fec/osd.hpp"
#include "fec/pcm.hpp"
#include "fec/polar.hpp"

namespace fec::sim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CodeParams {
    int n = 0;
    int k = 0;                    // polar dimension (CRC bits included)
    std::uint64_t crc_poly = 0;   // 0 = no CRC
    double design_param = 0.5;
    std::string spec_file;        // optional code-spec JSON; overrides n/k/... when set
};

struct ChannelSpec {
    enum class Kind { Bec, Awgn } kind = Kind::Bec;
    std::vector<double> points;  // erasure probabilities, or Eb/N0 in dB
};

enum class DecoderKind { BecMl, BecMlParallel, BecBrute, Sc, Cbp, Cbpl, CbplOsd };

struct DecoderSpec {
    DecoderKind kind = DecoderKind::BecMl;
    bec::ReferencePolicy::Kind policy = bec::ReferencePolicy::Kind::MinUnknownCheck;
    int nr_batch = 1;
    int list_size = 6;
    bp::BpConfig bp;
    osd::OsdParams osd;
};

struct ExperimentConfig {
    CodeParams code;
    std::string artifact;  // pruned-PCM path; empty = construct in memory
    ChannelSpec channel;
    DecoderSpec decoder;
    long long trials = 10000;
    long long target_errors = 0;  // 0 = fixed trial count
    std::uint64_t master_seed = 1;
    int workers = 1;
};

struct PointResult {
    double point = 0;
    long long trials = 0;
    long long errors = 0;
    long long bit_errors = 0;
    double ber = 0, fer = 0, fer_ci_lo = 0, fer_ci_hi = 0;
    double avg_nr_all = 0, avg_nr_cond = 0, avg_ne = 0, avg_iters = 0, avg_xors = 0;
    double seconds = 0;
    long long cond_trials = 0;

    // seconds is wall time and excluded from equality.
    bool equivalent(const PointResult& o) const;
};

struct ExperimentResult {
    std::vector<PointResult> points;
    bool equivalent(const ExperimentResult& o) const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string emit_csv(const ExperimentResult& r);
std::string emit_json(const ExperimentResult& r);
ExperimentResult result_from_json(const std::string& text);

struct PairedPoint {
    double point = 0;
    long long trials = 0;
    long long a_errors = 0, b_errors = 0;
    long long a_only_errors = 0;  // A errs, B correct
    long long b_only_errors = 0;  // B errs, A correct
    double fer_a = 0, fer_b = 0;
    double delta = 0, delta_ci_lo = 0, delta_ci_hi = 0;  // fer_b - fer_a
    double p_b_better = 0;  // one-sided exact McNemar
};

struct PairedReport {
    std::vector<PairedPoint> points;
};

// Runs both configs on identical per-trial noise; code and channel must match.
PairedReport paired_compare(const ExperimentConfig& a, const ExperimentConfig& b);
std::string emit_paired_json(const PairedReport& r);

// Wilson 95% interval for a binomial proportion.
std::pair<double, double> wilson_interval(long long errors, long long trials);
double mcnemar_one_sided(long long favorable, long long discordant);

// Shared helpers for trial generation (used by the acceptance suite too).
struct CodeBundle {
    polar::AugmentedCodeSpec aug;
    pcm::PrunedPcm pruned;      // CRC rows appended when the code has a CRC
    bool has_pruned = false;
    gf2::DenseBitMatrix dense_pcm;  // standard dense PCM incl. CRC rows
    bool has_dense = false;
};
CodeBundle build_code_bundle(const CodeParams& code, bool need_pruned, bool need_dense,
                             const std::string& artifact_path = {});
double awgn_sigma(double ebn0_db, double rate);

}  // namespace fec::sim
