#include "fec/bp_awgn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fec::bp {

StagePermutation standard_stages(int n) {
    StagePermutation p;
    p.stage_bits.resize(n);
    for (int i = 0; i < n; ++i) p.stage_bits[i] = i;
    return p;
}

int max_branches(int n) {
    int k = std::min(n, 3), f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

StagePermutation branch_stages(int n, int branch) {
    StagePermutation p = standard_stages(n);
    const int k = std::min(n, 3);
    std::vector<int> tail(p.stage_bits.end() - k, p.stage_bits.end());
    if (branch == 0) return p;
    // remaining suffix permutations in lexicographic order
    std::vector<std::vector<int>> perms;
    std::vector<int> seq = tail;
    std::sort(seq.begin(), seq.end());
    do {
        if (seq != tail) perms.push_back(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
    if (branch - 1 >= int(perms.size())) throw std::invalid_argument("branch_stages: branch out of range");
    std::copy(perms[branch - 1].begin(), perms[branch - 1].end(), p.stage_bits.end() - k);
    return p;
}

std::vector<double> transmit_awgn(const BitVec& c, double sigma, std::uint64_t rng_seed) {
    if (sigma <= 0) throw std::invalid_argument("transmit_awgn: sigma must be positive");
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> y(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) y[i] = (c[i] ? -1.0 : 1.0) + noise(rng);
    return y;
}

std::vector<double> channel_llr(const std::vector<double>& y, double sigma, double llr_clip) {
    if (sigma <= 0) throw std::invalid_argument("channel_llr: sigma must be positive");
    std::vector<double> llr(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        llr[i] = std::clamp(2.0 * y[i] / (sigma * sigma), -llr_clip, llr_clip);
    return llr;
}

namespace {

// Min-sum lattice decoder. Message layout: r[s][i] is the right-going message
// into node (s,i) from stage s (r[0] holds the layer-0 priors), l[s][i] the
// left-going message into node (s,i) from stage s+1 (l[n] holds the channel
// LLRs). Codeword bit b attaches at layer-n position bitrev(b).
class Lattice {
public:
    Lattice(const polar::AugmentedCodeSpec& aug, const BpConfig& cfg, const StagePermutation& stages)
        : aug_(aug), cfg_(cfg), stages_(stages.stage_bits), n_(aug.polar.n), N_(aug.polar.block_length) {
        l_.assign((n_ + 1) * N_, 0.0);
        r_.assign((n_ + 1) * N_, 0.0);
        rev_.resize(N_);
        for (int b = 0; b < N_; ++b) rev_[b] = bitrev(b, n_);
        const auto& crc = aug_.crc;
        if (crc.r > 0) {
            crc_checks_.resize(crc.r);
            for (int t = 0; t < crc.r; ++t)
                for (int j = 0; j < crc.m + crc.r; ++j)
                    if (crc.pcm.get(t, j)) crc_checks_[t].push_back(aug_.polar.info_set[j]);
            crc_msg_.assign(std::size_t(crc.r) * N_, 0.0);
            crc_total_.assign(N_, 0.0);
        }
    }

    CbpOutput run(const std::vector<double>& llr, bool use_crc) {
        std::fill(l_.begin(), l_.end(), 0.0);
        std::fill(r_.begin(), r_.end(), 0.0);
        if (!crc_msg_.empty()) std::fill(crc_msg_.begin(), crc_msg_.end(), 0.0);
        if (!crc_total_.empty()) std::fill(crc_total_.begin(), crc_total_.end(), 0.0);
        for (int b = 0; b < N_; ++b) l_[n_ * N_ + rev_[b]] = llr[b];
        for (int i = 0; i < N_; ++i) r_[i] = aug_.polar.is_frozen[i] ? cfg_.llr_clip : 0.0;

        CbpOutput out;
        int iter = 0;
        for (iter = 1; iter <= cfg_.i_max; ++iter) {
            left_sweep();
            if (use_crc && aug_.crc.r > 0 && iter > cfg_.i_thr) update_crc_messages();
            right_sweep();
            if (check_stop(out, use_crc)) {
                out.terminated_early = true;
                out.iterations_used = iter;
                return out;
            }
        }
        out.terminated_early = false;
        out.iterations_used = cfg_.i_max;
        fill_output(out);
        return out;
    }

private:
    double f(double a, double b) const {
        const double sa = (a > 0) - (a < 0), sb = (b > 0) - (b < 0);
        return std::clamp(cfg_.scaling * sa * sb * std::min(std::fabs(a), std::fabs(b)),
                          -cfg_.llr_clip, cfg_.llr_clip);
    }
    double clip(double x) const { return std::clamp(x, -cfg_.llr_clip, cfg_.llr_clip); }

    void left_sweep() {
        for (int t = n_; t >= 1; --t) {
            const int h = 1 << stages_[t - 1];
            const double* lt = &l_[t * N_];
            double* lprev = &l_[(t - 1) * N_];
            const double* rprev = &r_[(t - 1) * N_];
            for (int i = 0; i < N_; ++i) {
                if (i & h) continue;
                const double lc = lt[i], ld = lt[i + h];
                const double ra = rprev[i], rb = rprev[i + h];
                lprev[i] = f(lc, ld + rb);
                lprev[i + h] = clip(f(lc, ra) + ld);
            }
        }
    }
    void right_sweep() {
        for (int t = 1; t <= n_; ++t) {
            const int h = 1 << stages_[t - 1];
            double* rt = &r_[t * N_];
            const double* lt = &l_[t * N_];
            const double* rprev = &r_[(t - 1) * N_];
            for (int i = 0; i < N_; ++i) {
                if (i & h) continue;
                const double ra = rprev[i], rb = rprev[i + h];
                rt[i] = f(ra, lt[i + h] + rb);
                rt[i + h] = clip(f(ra, lt[i]) + rb);
            }
        }
    }

    void update_crc_messages() {
        const auto& crc = aug_.crc;
        // messages variable -> check start from the polar-side LLR plus the
        // other CRC checks' previous messages
        for (int t = 0; t < crc.r; ++t) {
            const auto& vars = crc_checks_[t];
            // compute signs and two smallest magnitudes of incoming messages
            double min1 = 1e300, min2 = 1e300;
            int argmin = -1, sign = 1;
            std::vector<double> in(vars.size());
            for (std::size_t v = 0; v < vars.size(); ++v) {
                const int u = vars[v];
                const double mu = l_[u] + crc_total_[u] - crc_msg_[std::size_t(t) * N_ + u];
                in[v] = mu;
                const double a = std::fabs(mu);
                if (mu < 0) sign = -sign;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    argmin = int(v);
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (std::size_t v = 0; v < vars.size(); ++v) {
                const int u = vars[v];
                const double mag = (int(v) == argmin) ? min2 : min1;
                int s = sign;
                if (in[v] < 0) s = -s;
                const double nu = clip(cfg_.scaling * s * mag);
                const std::size_t idx = std::size_t(t) * N_ + u;
                crc_total_[u] += nu - crc_msg_[idx];
                crc_msg_[idx] = nu;
            }
        }
        for (int i = 0; i < N_; ++i)
            if (!aug_.polar.is_frozen[i]) r_[i] = clip(crc_total_.empty() ? 0.0 : crc_total_[i]);
    }

    void fill_output(CbpOutput& out) const {
        out.soft_codeword_llrs.resize(N_);
        out.hard_c.resize(N_);
        out.hard_u.resize(N_);
        for (int b = 0; b < N_; ++b) {
            const double soft = l_[n_ * N_ + rev_[b]] + r_[n_ * N_ + rev_[b]];
            out.soft_codeword_llrs[b] = soft;
            out.hard_c[b] = soft < 0 ? 1 : 0;
        }
        for (int i = 0; i < N_; ++i) {
            if (aug_.polar.is_frozen[i]) {
                out.hard_u[i] = 0;
            } else {
                const double soft = r_[i] + l_[i];
                out.hard_u[i] = soft < 0 ? 1 : 0;
            }
        }
    }

    bool check_stop(CbpOutput& out, bool use_crc) {
        fill_output(out);
        if (polar::polar_transform(out.hard_u) != out.hard_c) return false;
        if (use_crc && aug_.crc.r > 0) {
            BitVec u_a(aug_.polar.k);
            for (int j = 0; j < aug_.polar.k; ++j) u_a[j] = out.hard_u[aug_.polar.info_set[j]];
            if (!polar::crc_check(aug_.crc, u_a)) return false;
        }
        return true;
    }

    const polar::AugmentedCodeSpec& aug_;
    BpConfig cfg_;
    std::vector<int> stages_;
    int n_, N_;
    std::vector<double> l_, r_;
    std::vector<int> rev_;
    std::vector<std::vector<int>> crc_checks_;  // per CRC check: layer-0 positions
    std::vector<double> crc_msg_;               // check -> variable messages
    std::vector<double> crc_total_;             // per variable: sum of CRC messages
};

}  // namespace

CbpOutput bp_decode(const polar::PolarCodeSpec& spec, const std::vector<double>& llr,
                    const BpConfig& cfg) {
    polar::AugmentedCodeSpec aug;
    aug.polar = spec;
    aug.crc = polar::make_crc(spec.k, 0);
    Lattice lat(aug, cfg, standard_stages(spec.n));
    return lat.run(llr, /*use_crc=*/false);
}

CbpOutput cbp_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                     const BpConfig& cfg, const StagePermutation& stages) {
    Lattice lat(aug, cfg, stages);
    return lat.run(llr, /*use_crc=*/true);
}

CbpOutput cbp_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                     const BpConfig& cfg) {
    return cbp_decode(aug, llr, cfg, standard_stages(aug.polar.n));
}

bool is_valid_codeword(const polar::AugmentedCodeSpec& aug, const BitVec& hard_c) {
    // u = G_N^T c via the involution property of G_N
    BitVec u = polar::polar_transform(hard_c);
    for (int f : aug.polar.frozen_set)
        if (u[f]) return false;
    if (aug.crc.r > 0) {
        BitVec u_a(aug.polar.k);
        for (int j = 0; j < aug.polar.k; ++j) u_a[j] = u[aug.polar.info_set[j]];
        if (!polar::crc_check(aug.crc, u_a)) return false;
    }
    return true;
}

double correlation(const BitVec& c, const std::vector<double>& llr) {
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] ? -llr[i] : llr[i];
    return s;
}

CbplResult cbpl_decode(const polar::AugmentedCodeSpec& aug, const std::vector<double>& llr,
                       int list_size, const BpConfig& cfg) {
    if (list_size < 1 || list_size > max_branches(aug.polar.n))
        throw std::invalid_argument("cbpl_decode: list size exceeds available stage permutations");
    CbplResult res;
    res.branches.reserve(list_size);
    double best_valid = -1e300, best_any = -1e300;
    int best_valid_idx = -1, best_any_idx = -1;
    for (int b = 0; b < list_size; ++b) {
        CbpOutput out = cbp_decode(aug, llr, cfg, branch_stages(aug.polar.n, b));
        const double corr = correlation(out.hard_c, llr);
        if (is_valid_codeword(aug, out.hard_c)) {
            if (corr > best_valid) {
                best_valid = corr;
                best_valid_idx = b;
            }
        }
        if (corr > best_any) {
            best_any = corr;
            best_any_idx = b;
        }
        res.branches.push_back(std::move(out));
    }
    res.any_valid = best_valid_idx >= 0;
    res.selected_branch = res.any_valid ? best_valid_idx : best_any_idx;
    res.codeword = res.branches[res.selected_branch].hard_c;
    return res;
}

}  // namespace fec::bp
