#include "fec/sim.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace fec::sim {

using nlohmann::json;

bool PointResult::equivalent(const PointResult& o) const {
    return point == o.point && trials == o.trials && errors == o.errors && bit_errors == o.bit_errors &&
           ber == o.ber && fer == o.fer && fer_ci_lo == o.fer_ci_lo && fer_ci_hi == o.fer_ci_hi &&
           avg_nr_all == o.avg_nr_all && avg_nr_cond == o.avg_nr_cond && avg_ne == o.avg_ne &&
           avg_iters == o.avg_iters && avg_xors == o.avg_xors && cond_trials == o.cond_trials;
}

bool ExperimentResult::equivalent(const ExperimentResult& o) const {
    if (points.size() != o.points.size()) return false;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!points[i].equivalent(o.points[i])) return false;
    return true;
}

std::pair<double, double> wilson_interval(long long errors, long long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = double(trials), p = double(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = errors == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

double mcnemar_one_sided(long long favorable, long long discordant) {
    if (discordant <= 0) return 1.0;
    // P[Bin(discordant, 1/2) >= favorable]
    double p = 0.0;
    const double ln2 = std::log(2.0);
    for (long long k = favorable; k <= discordant; ++k) {
        const double lg = std::lgamma(double(discordant + 1)) - std::lgamma(double(k + 1)) -
                          std::lgamma(double(discordant - k + 1)) - discordant * ln2;
        p += std::exp(lg);
    }
    return std::min(1.0, p);
}

double awgn_sigma(double ebn0_db, double rate) {
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return std::sqrt(1.0 / (2.0 * rate * ebn0));
}

CodeBundle build_code_bundle(const CodeParams& code, bool need_pruned, bool need_dense,
                             const std::string& artifact_path) {
    CodeBundle bundle;
    polar::PolarCodeSpec spec;
    std::uint64_t poly = code.crc_poly;
    if (!code.spec_file.empty()) {
        std::ifstream is(code.spec_file);
        if (!is) throw ArtifactError("code spec file not found: " + code.spec_file);
        std::stringstream ss;
        ss << is.rdbuf();
        polar::code_spec_from_json(ss.str(), spec, poly);
    } else {
        if (code.n < 1) throw ConfigError("code.n must be >= 1");
        spec = polar::construct_frozen_set(code.n, code.k, code.design_param);
    }
    bundle.aug = polar::make_augmented(spec, poly);
    if (need_pruned) {
        if (!artifact_path.empty()) {
            if (!std::filesystem::exists(artifact_path))
                throw ArtifactError("pruned PCM artifact not found: " + artifact_path);
            bundle.pruned = pcm::load_artifact(artifact_path);
            if (bundle.pruned.block_length != spec.block_length || bundle.pruned.code_k != spec.k)
                throw ArtifactError("artifact does not match the configured code");
        } else {
            pcm::FactorGraphPcm fg = pcm::build_standard_fg_pcm(bundle.aug.polar);
            bundle.pruned = pcm::prune(fg);
            if (bundle.aug.crc.r > 0)
                bundle.pruned = pcm::append_crc_rows(bundle.pruned, bundle.aug.crc,
                                                     polar::full_generator(spec.n), bundle.aug.polar);
        }
        bundle.has_pruned = true;
    }
    if (need_dense) {
        bundle.dense_pcm = polar::standard_dense_pcm(bundle.aug);
        bundle.has_dense = true;
    }
    return bundle;
}

namespace {

struct TrialOutcome {
    bool frame_error = false;
    int bit_errors = 0;
    bool cond = false;  // stage-1 / early-termination fall-through happened
    double n_r = 0, n_e = 0, iters = 0, xors = 0;
};

struct Runner {
    const ExperimentConfig& cfg;
    CodeBundle bundle;

    explicit Runner(const ExperimentConfig& c)
        : cfg(c),
          bundle(build_code_bundle(
              c.code,
              c.decoder.kind == DecoderKind::BecMl || c.decoder.kind == DecoderKind::BecMlParallel ||
                  c.decoder.kind == DecoderKind::CbplOsd,
              c.decoder.kind == DecoderKind::BecBrute, c.artifact)) {}

    TrialOutcome run_trial(double point, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        const auto& aug = bundle.aug;
        const int m = aug.message_length();
        BitVec msg(m);
        for (int i = 0; i < m; ++i) msg[i] = rng() & 1;
        const BitVec c = aug.encode_message(msg);
        const std::uint64_t chan_seed = rng();

        TrialOutcome t;
        auto tally = [&](const BitVec& decoded) {
            int errs = 0;
            for (std::size_t i = 0; i < c.size(); ++i) errs += decoded[i] != c[i];
            t.bit_errors = errs;
            t.frame_error = errs > 0;
        };

        switch (cfg.decoder.kind) {
            case DecoderKind::BecMl:
            case DecoderKind::BecMlParallel: {
                const bec::ErasureWord w = bec::transmit_bec(c, point, chan_seed);
                bec::ReferencePolicy pol{cfg.decoder.policy, cfg.decoder.nr_batch, rng()};
                const auto variant = cfg.decoder.kind == DecoderKind::BecMlParallel
                                         ? bec::Variant::Parallel
                                         : bec::Variant::Sequential;
                const bec::DecodeOutcome out = bec::ml_decode_bec(bundle.pruned, w, pol, variant);
                if (out.kind == bec::DecodeOutcome::Kind::Decoded) {
                    tally(out.codeword);
                } else {
                    t.frame_error = true;
                    for (auto e : w.erased) t.bit_errors += e;
                }
                t.n_r = out.stats.n_r;
                t.n_e = out.stats.n_e;
                t.xors = double(out.stats.xor_count);
                t.cond = out.stats.n_r > 0;
                break;
            }
            case DecoderKind::BecBrute: {
                const bec::ErasureWord w = bec::transmit_bec(c, point, chan_seed);
                const bec::DecodeOutcome out = bec::brute_force_ml_bec(bundle.dense_pcm, w);
                if (out.kind == bec::DecodeOutcome::Kind::Decoded) {
                    tally(out.codeword);
                } else {
                    t.frame_error = true;
                    for (auto e : w.erased) t.bit_errors += e;
                }
                break;
            }
            case DecoderKind::Sc: {
                const bec::ErasureWord w = bec::transmit_bec(c, point, chan_seed);
                std::vector<double> llr(c.size());
                const double inf = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < c.size(); ++i)
                    llr[i] = w.erased[i] ? 0.0 : (w.values[i] ? -inf : inf);
                tally(polar::sc_decode(aug.polar, llr));
                break;
            }
            case DecoderKind::Cbp:
            case DecoderKind::Cbpl: {
                const double sigma = awgn_sigma(point, aug.rate());
                const auto y = bp::transmit_awgn(c, sigma, chan_seed);
                const auto llr = bp::channel_llr(y, sigma, cfg.decoder.bp.llr_clip);
                if (cfg.decoder.kind == DecoderKind::Cbp) {
                    const bp::CbpOutput out = bp::cbp_decode(aug, llr, cfg.decoder.bp);
                    tally(out.hard_c);
                    t.iters = out.iterations_used;
                    t.cond = !out.terminated_early;
                } else {
                    const bp::CbplResult res = bp::cbpl_decode(aug, llr, cfg.decoder.list_size, cfg.decoder.bp);
                    tally(res.codeword);
                    double it = 0;
                    bool any_early = false;
                    for (const auto& b : res.branches) {
                        it += b.iterations_used;
                        any_early |= b.terminated_early;
                    }
                    t.iters = it / double(res.branches.size());
                    t.cond = !any_early;
                }
                break;
            }
            case DecoderKind::CbplOsd: {
                const double sigma = awgn_sigma(point, aug.rate());
                const auto y = bp::transmit_awgn(c, sigma, chan_seed);
                const auto llr = bp::channel_llr(y, sigma, cfg.decoder.bp.llr_clip);
                const osd::OsdDecodeResult res = osd::cbpl_osd_decode(
                    aug, bundle.pruned, llr, cfg.decoder.list_size, cfg.decoder.bp, cfg.decoder.osd);
                tally(res.codeword);
                t.iters = res.stats.avg_iterations;
                t.cond = !res.stats.early_exit;
                if (!res.stats.branch_n_r.empty()) {
                    double nr = 0;
                    for (int v : res.stats.branch_n_r) nr += v;
                    t.n_r = nr / double(res.stats.branch_n_r.size());
                }
                break;
            }
        }
        return t;
    }
};

PointResult reduce_point(double point, const std::vector<TrialOutcome>& rec, double seconds) {
    PointResult pr;
    pr.point = point;
    pr.trials = (long long)rec.size();
    double nr_all = 0, nr_cond = 0, ne = 0, iters = 0, xors = 0;
    for (const auto& t : rec) {
        pr.errors += t.frame_error;
        pr.bit_errors += t.bit_errors;
        pr.cond_trials += t.cond;
        nr_all += t.n_r;
        if (t.cond) nr_cond += t.n_r;
        ne += t.n_e;
        iters += t.iters;
        xors += t.xors;
    }
    const double n = double(std::max<long long>(1, pr.trials));
    pr.fer = double(pr.errors) / n;
    std::tie(pr.fer_ci_lo, pr.fer_ci_hi) = wilson_interval(pr.errors, pr.trials);
    pr.avg_nr_all = nr_all / n;
    pr.avg_nr_cond = pr.cond_trials ? nr_cond / double(pr.cond_trials) : 0.0;
    pr.avg_ne = ne / n;
    pr.avg_iters = iters / n;
    pr.avg_xors = xors / n;
    pr.seconds = seconds;
    return pr;
}

std::vector<TrialOutcome> run_point(const Runner& runner, double point, std::uint64_t master_seed,
                                    std::size_t point_index, long long trials, long long target_errors,
                                    int workers) {
    std::vector<TrialOutcome> rec;
    const long long block = 1000;  // fixed batch size keeps early stopping deterministic
    long long done = 0, errors = 0;
    while (done < trials) {
        const long long todo = std::min(block, trials - done);
        rec.resize(std::size_t(done + todo));
        std::atomic<long long> next{done};
        auto work = [&]() {
            for (;;) {
                const long long i = next.fetch_add(1);
                if (i >= done + todo) break;
                rec[std::size_t(i)] = runner.run_trial(point, trial_seed(master_seed, point_index, std::uint64_t(i)));
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        for (long long i = done; i < done + todo; ++i) errors += rec[std::size_t(i)].frame_error;
        done += todo;
        if (target_errors > 0 && errors >= target_errors) break;
    }
    return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    for (double p : cfg.channel.points) {
        if (cfg.channel.kind == ChannelSpec::Kind::Bec && (p < 0 || p > 1))
            throw ConfigError("BEC erasure probability out of [0,1]");
    }
    if (cfg.decoder.list_size < 1) throw ConfigError("list size must be >= 1");
    Runner runner(cfg);
    ExperimentResult result;
    const int N = runner.bundle.aug.polar.block_length;
    for (std::size_t pi = 0; pi < cfg.channel.points.size(); ++pi) {
        const auto t0 = std::chrono::steady_clock::now();
        auto rec = run_point(runner, cfg.channel.points[pi], cfg.master_seed, pi, cfg.trials,
                             cfg.target_errors, std::max(1, cfg.workers));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        PointResult pr = reduce_point(cfg.channel.points[pi], rec, secs);
        pr.ber = double(pr.bit_errors) / (double(std::max<long long>(1, pr.trials)) * N);
        result.points.push_back(pr);
    }
    return result;
}

PairedReport paired_compare(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.code.n != b.code.n || a.code.k != b.code.k || a.code.crc_poly != b.code.crc_poly ||
        a.code.design_param != b.code.design_param || a.code.spec_file != b.code.spec_file)
        throw ConfigError("paired_compare: code parameters differ");
    if (a.channel.kind != b.channel.kind || a.channel.points != b.channel.points)
        throw ConfigError("paired_compare: channels differ");
    Runner ra(a), rb(b);
    PairedReport rep;
    for (std::size_t pi = 0; pi < a.channel.points.size(); ++pi) {
        const double point = a.channel.points[pi];
        PairedPoint pp;
        pp.point = point;
        const long long trials = std::min(a.trials, b.trials);
        for (long long i = 0; i < trials; ++i) {
            const std::uint64_t seed = trial_seed(a.master_seed, pi, std::uint64_t(i));
            const bool ea = ra.run_trial(point, seed).frame_error;
            const bool eb = rb.run_trial(point, seed).frame_error;
            pp.a_errors += ea;
            pp.b_errors += eb;
            pp.a_only_errors += ea && !eb;
            pp.b_only_errors += eb && !ea;
        }
        pp.trials = trials;
        pp.fer_a = double(pp.a_errors) / double(std::max<long long>(1, trials));
        pp.fer_b = double(pp.b_errors) / double(std::max<long long>(1, trials));
        pp.delta = pp.fer_b - pp.fer_a;
        const double n = double(std::max<long long>(1, trials));
        const double var = ((pp.a_only_errors + pp.b_only_errors) / n - pp.delta * pp.delta) / n;
        const double half = 1.959963984540054 * std::sqrt(std::max(0.0, var));
        pp.delta_ci_lo = pp.delta - half;
        pp.delta_ci_hi = pp.delta + half;
        pp.p_b_better = mcnemar_one_sided(pp.a_only_errors, pp.a_only_errors + pp.b_only_errors);
        rep.points.push_back(pp);
    }
    return rep;
}

namespace {

const char* kind_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::BecMl: return "bec-ml";
        case DecoderKind::BecMlParallel: return "bec-ml-parallel";
        case DecoderKind::BecBrute: return "bec-brute";
        case DecoderKind::Sc: return "sc";
        case DecoderKind::Cbp: return "cbp";
        case DecoderKind::Cbpl: return "cbpl";
        case DecoderKind::CbplOsd: return "cbpl-osd";
    }
    return "?";
}

DecoderKind kind_from(const std::string& s) {
    if (s == "bec-ml") return DecoderKind::BecMl;
    if (s == "bec-ml-parallel") return DecoderKind::BecMlParallel;
    if (s == "bec-brute") return DecoderKind::BecBrute;
    if (s == "sc") return DecoderKind::Sc;
    if (s == "cbp") return DecoderKind::Cbp;
    if (s == "cbpl") return DecoderKind::Cbpl;
    if (s == "cbpl-osd") return DecoderKind::CbplOsd;
    throw ConfigError("unknown decoder type: " + s);
}

const char* mode_name(osd::OsdMode m) {
    switch (m) {
        case osd::OsdMode::Osd1: return "osd1";
        case osd::OsdMode::Osd2: return "osd2";
        case osd::OsdMode::Posd2: return "posd2";
        case osd::OsdMode::Lcosd1: return "lcosd1";
    }
    return "?";
}

osd::OsdMode mode_from(const std::string& s) {
    if (s == "osd1") return osd::OsdMode::Osd1;
    if (s == "osd2") return osd::OsdMode::Osd2;
    if (s == "posd2") return osd::OsdMode::Posd2;
    if (s == "lcosd1") return osd::OsdMode::Lcosd1;
    throw ConfigError("unknown osd mode: " + s);
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        const auto& jc = j.at("code");
        cfg.code.spec_file = jc.value("spec_file", "");
        if (cfg.code.spec_file.empty()) {
            cfg.code.n = jc.at("n").get<int>();
            cfg.code.k = jc.at("K").get<int>();
        }
        if (jc.contains("crc_poly")) {
            if (jc["crc_poly"].is_string())
                cfg.code.crc_poly = std::stoull(jc["crc_poly"].get<std::string>(), nullptr, 0);
            else
                cfg.code.crc_poly = jc["crc_poly"].get<std::uint64_t>();
        }
        cfg.code.design_param = jc.value("design_param", 0.5);
        cfg.artifact = j.value("artifact", "");
        const auto& jch = j.at("channel");
        const std::string ck = jch.at("type").get<std::string>();
        if (ck == "bec")
            cfg.channel.kind = ChannelSpec::Kind::Bec;
        else if (ck == "awgn")
            cfg.channel.kind = ChannelSpec::Kind::Awgn;
        else
            throw ConfigError("unknown channel type: " + ck);
        cfg.channel.points = jch.at("points").get<std::vector<double>>();
        if (cfg.channel.points.empty()) throw ConfigError("channel.points must be non-empty");
        const auto& jd = j.at("decoder");
        cfg.decoder.kind = kind_from(jd.at("type").get<std::string>());
        const std::string pol = jd.value("policy", "min-unknown");
        if (pol == "min-unknown")
            cfg.decoder.policy = bec::ReferencePolicy::Kind::MinUnknownCheck;
        else if (pol == "random")
            cfg.decoder.policy = bec::ReferencePolicy::Kind::RandomUnknown;
        else
            throw ConfigError("unknown reference policy: " + pol);
        cfg.decoder.nr_batch = jd.value("nr_batch", 1);
        cfg.decoder.list_size = jd.value("L", 6);
        cfg.decoder.bp.i_max = jd.value("i_max", 100);
        cfg.decoder.bp.i_thr = jd.value("i_thr", 10);
        cfg.decoder.bp.llr_clip = jd.value("llr_clip", 20.0);
        cfg.decoder.bp.scaling = jd.value("scaling", 0.9375);
        cfg.decoder.osd.mode = mode_from(jd.value("osd_mode", "osd1"));
        cfg.decoder.osd.posd_fraction = jd.value("posd_fraction", 0.25);
        cfg.trials = j.value("trials", 10000LL);
        cfg.target_errors = j.value("target_errors", 0LL);
        cfg.master_seed = j.value("master_seed", 1ULL);
        cfg.workers = j.value("workers", 1);
        if (cfg.decoder.bp.i_thr < 1 || cfg.decoder.bp.i_thr > cfg.decoder.bp.i_max)
            throw ConfigError("require 1 <= i_thr <= i_max");
        if (cfg.decoder.nr_batch < 1) throw ConfigError("nr_batch must be >= 1");
        if (cfg.decoder.list_size < 1) throw ConfigError("list size must be >= 1");
        if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
        if (cfg.channel.kind == ChannelSpec::Kind::Bec)
            for (double p : cfg.channel.points)
                if (p < 0 || p > 1) throw ConfigError("BEC erasure probability out of [0,1]");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["code"]["n"] = cfg.code.n;
    j["code"]["K"] = cfg.code.k;
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%llx", (unsigned long long)cfg.code.crc_poly);
    j["code"]["crc_poly"] = std::string(buf);
    j["code"]["design_param"] = cfg.code.design_param;
    if (!cfg.code.spec_file.empty()) j["code"]["spec_file"] = cfg.code.spec_file;
    if (!cfg.artifact.empty()) j["artifact"] = cfg.artifact;
    j["channel"]["type"] = cfg.channel.kind == ChannelSpec::Kind::Bec ? "bec" : "awgn";
    j["channel"]["points"] = cfg.channel.points;
    j["decoder"]["type"] = kind_name(cfg.decoder.kind);
    j["decoder"]["policy"] =
        cfg.decoder.policy == bec::ReferencePolicy::Kind::MinUnknownCheck ? "min-unknown" : "random";
    j["decoder"]["nr_batch"] = cfg.decoder.nr_batch;
    j["decoder"]["L"] = cfg.decoder.list_size;
    j["decoder"]["i_max"] = cfg.decoder.bp.i_max;
    j["decoder"]["i_thr"] = cfg.decoder.bp.i_thr;
    j["decoder"]["llr_clip"] = cfg.decoder.bp.llr_clip;
    j["decoder"]["scaling"] = cfg.decoder.bp.scaling;
    j["decoder"]["osd_mode"] = mode_name(cfg.decoder.osd.mode);
    j["decoder"]["posd_fraction"] = cfg.decoder.osd.posd_fraction;
    j["trials"] = cfg.trials;
    j["target_errors"] = cfg.target_errors;
    j["master_seed"] = cfg.master_seed;
    j["workers"] = cfg.workers;
    return j.dump(2);
}

std::string emit_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << "point,trials,errors,ber,fer,fer_ci_lo,fer_ci_hi,avg_nr_all,avg_nr_cond,avg_ne,avg_iters,"
          "avg_xors,seconds\n";
    os.precision(10);
    for (const auto& p : r.points) {
        os << p.point << ',' << p.trials << ',' << p.errors << ',' << p.ber << ',' << p.fer << ','
           << p.fer_ci_lo << ',' << p.fer_ci_hi << ',' << p.avg_nr_all << ',' << p.avg_nr_cond << ','
           << p.avg_ne << ',' << p.avg_iters << ',' << p.avg_xors << ',' << p.seconds << '\n';
    }
    return os.str();
}

namespace {

json point_to_json(const PointResult& p) {
    json j;
    j["point"] = p.point;
    j["trials"] = p.trials;
    j["errors"] = p.errors;
    j["bit_errors"] = p.bit_errors;
    j["ber"] = p.ber;
    j["fer"] = p.fer;
    j["fer_ci_lo"] = p.fer_ci_lo;
    j["fer_ci_hi"] = p.fer_ci_hi;
    j["avg_nr_all"] = p.avg_nr_all;
    j["avg_nr_cond"] = p.avg_nr_cond;
    j["avg_ne"] = p.avg_ne;
    j["avg_iters"] = p.avg_iters;
    j["avg_xors"] = p.avg_xors;
    j["seconds"] = p.seconds;
    j["cond_trials"] = p.cond_trials;
    return j;
}

}  // namespace

std::string emit_json(const ExperimentResult& r) {
    json j;
    j["points"] = json::array();
    for (const auto& p : r.points) j["points"].push_back(point_to_json(p));
    return j.dump(2);
}

ExperimentResult result_from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentResult r;
    for (const auto& jp : j.at("points")) {
        PointResult p;
        p.point = jp.at("point").get<double>();
        p.trials = jp.at("trials").get<long long>();
        p.errors = jp.at("errors").get<long long>();
        p.bit_errors = jp.at("bit_errors").get<long long>();
        p.ber = jp.at("ber").get<double>();
        p.fer = jp.at("fer").get<double>();
        p.fer_ci_lo = jp.at("fer_ci_lo").get<double>();
        p.fer_ci_hi = jp.at("fer_ci_hi").get<double>();
        p.avg_nr_all = jp.at("avg_nr_all").get<double>();
        p.avg_nr_cond = jp.at("avg_nr_cond").get<double>();
        p.avg_ne = jp.at("avg_ne").get<double>();
        p.avg_iters = jp.at("avg_iters").get<double>();
        p.avg_xors = jp.at("avg_xors").get<double>();
        p.seconds = jp.at("seconds").get<double>();
        p.cond_trials = jp.at("cond_trials").get<long long>();
        r.points.push_back(p);
    }
    return r;
}

std::string emit_paired_json(const PairedReport& r) {
    json j;
    j["points"] = json::array();
    for (const auto& p : r.points) {
        json jp;
        jp["point"] = p.point;
        jp["trials"] = p.trials;
        jp["a_errors"] = p.a_errors;
        jp["b_errors"] = p.b_errors;
        jp["a_only_errors"] = p.a_only_errors;
        jp["b_only_errors"] = p.b_only_errors;
        jp["fer_a"] = p.fer_a;
        jp["fer_b"] = p.fer_b;
        jp["delta"] = p.delta;
        jp["delta_ci_lo"] = p.delta_ci_lo;
        jp["delta_ci_hi"] = p.delta_ci_hi;
        jp["p_b_better"] = p.p_b_better;
        j["points"].push_back(jp);
    }
    return j.dump(2);
}

}  // namespace fec::sim
