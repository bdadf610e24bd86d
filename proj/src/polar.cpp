#include "fec/polar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace fec::polar {

gf2::DenseBitMatrix full_generator(int n) {
    if (n < 1) throw std::invalid_argument("full_generator: n must be >= 1");
    const int N = 1 << n;
    gf2::DenseBitMatrix g(N, N);
    // Row i of B_N F^{xn} has ones at { j : j subset of bitrev(i) }.
    for (int i = 0; i < N; ++i) {
        const int ri = bitrev(i, n);
        for (int j = ri;; j = (j - 1) & ri) {
            g.set(i, j, true);
            if (j == 0) break;
        }
    }
    return g;
}

PolarCodeSpec construct_frozen_set(int n, int k, double design_erasure) {
    const int N = 1 << n;
    if (k < 0 || k > N) throw std::invalid_argument("construct_frozen_set: K out of range");
    std::vector<double> z(N);
    for (int i = 0; i < N; ++i) {
        double Z = design_erasure;
        for (int b = n - 1; b >= 0; --b) {
            Z = ((i >> b) & 1) ? Z * Z : 2 * Z - Z * Z;
        }
        z[i] = Z;
    }
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    // frozen first: largest Z; ties broken by freezing the larger index first
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (z[a] != z[b]) return z[a] > z[b];
        return a > b;
    });
    PolarCodeSpec spec;
    spec.n = n;
    spec.block_length = N;
    spec.k = k;
    spec.design_param = design_erasure;
    spec.is_frozen.assign(N, 0);
    for (int i = 0; i < N - k; ++i) spec.is_frozen[order[i]] = 1;
    for (int i = 0; i < N; ++i)
        (spec.is_frozen[i] ? spec.frozen_set : spec.info_set).push_back(i);
    return spec;
}

BitVec polar_transform(const BitVec& u) {
    const int N = int(u.size());
    int n = 0;
    while ((1 << n) < N) ++n;
    if ((1 << n) != N) throw std::invalid_argument("polar_transform: length must be a power of two");
    BitVec w = u;
    for (int h = 1; h < N; h <<= 1)
        for (int i = 0; i < N; ++i)
            if ((i & h) == 0) w[i] ^= w[i + h];
    BitVec c(N);
    for (int i = 0; i < N; ++i) c[i] = w[bitrev(i, n)];
    return c;
}

BitVec encode(const PolarCodeSpec& spec, const BitVec& info) {
    if (int(info.size()) != spec.k) throw std::invalid_argument("polar::encode: info length mismatch");
    BitVec u(spec.block_length, 0);
    for (int i = 0; i < spec.k; ++i) u[spec.info_set[i]] = info[i];
    return polar_transform(u);
}

namespace {

double sc_f(double a, double b) {
    const double sa = (a > 0) - (a < 0);
    const double sb = (b > 0) - (b < 0);
    return sa * sb * std::min(std::fabs(a), std::fabs(b));
}

double sc_g(double a, double b, std::uint8_t u) {
    const double r = (u ? -a : a) + b;
    // +inf and -inf cancel to an erasure on BEC-style inputs
    if (std::isnan(r)) return 0.0;
    return r;
}

// Recursive SC over the adjacent-pair lattice matching G_N = B_N F^{xn}.
// Returns hard codeword bits of the subcode in `hard`; decisions in `u_hat`.
void sc_rec(const double* llr, const std::uint8_t* frozen, int len, std::uint8_t* u_hat,
            std::uint8_t* hard, std::vector<double>& scratch) {
    if (len == 1) {
        std::uint8_t bit = 0;
        if (!frozen[0]) bit = llr[0] < 0 ? 1 : 0;
        u_hat[0] = frozen[0] ? 0 : bit;
        hard[0] = u_hat[0];
        return;
    }
    const int half = len / 2;
    std::vector<double> sub(half);
    for (int i = 0; i < half; ++i) sub[i] = sc_f(llr[2 * i], llr[2 * i + 1]);
    std::vector<std::uint8_t> hard_a(half), hard_b(half);
    sc_rec(sub.data(), frozen, half, u_hat, hard_a.data(), scratch);
    for (int i = 0; i < half; ++i) sub[i] = sc_g(llr[2 * i], llr[2 * i + 1], hard_a[i]);
    sc_rec(sub.data(), frozen + half, half, u_hat + half, hard_b.data(), scratch);
    for (int i = 0; i < half; ++i) {
        hard[2 * i] = hard_a[i] ^ hard_b[i];
        hard[2 * i + 1] = hard_b[i];
    }
}

}  // namespace

BitVec sc_decode(const PolarCodeSpec& spec, const std::vector<double>& llr) {
    if (int(llr.size()) != spec.block_length) throw std::invalid_argument("sc_decode: llr length mismatch");
    BitVec u_hat(spec.block_length, 0), hard(spec.block_length, 0);
    std::vector<double> scratch;
    sc_rec(llr.data(), spec.is_frozen.data(), spec.block_length, u_hat.data(), hard.data(), scratch);
    return hard;
}

CrcSpec make_crc(int m, std::uint64_t poly) {
    CrcSpec crc;
    crc.m = m;
    crc.poly = poly;
    if (poly == 0) {
        crc.r = 0;
        crc.generator = gf2::DenseBitMatrix::identity(m);
        crc.pcm = gf2::DenseBitMatrix(0, m);
        return crc;
    }
    int r = 63;
    while (r > 0 && !((poly >> r) & 1)) --r;
    crc.r = r;
    // parity of unit messages via polynomial long division (msb-first bits)
    auto remainder = [&](const BitVec& msg) {
        BitVec reg(msg);
        reg.resize(m + r, 0);
        for (int i = 0; i < m; ++i) {
            if (reg[i]) {
                for (int j = 0; j <= r; ++j) reg[i + j] ^= (poly >> (r - j)) & 1;
            }
        }
        return BitVec(reg.begin() + m, reg.end());
    };
    crc.generator = gf2::DenseBitMatrix(m, m + r);
    crc.pcm = gf2::DenseBitMatrix(r, m + r);
    for (int i = 0; i < m; ++i) {
        crc.generator.set(i, i, true);
        BitVec e(m, 0);
        e[i] = 1;
        BitVec par = remainder(e);
        for (int j = 0; j < r; ++j) {
            if (par[j]) {
                crc.generator.set(i, m + j, true);
                crc.pcm.set(j, i, true);
            }
        }
    }
    for (int j = 0; j < r; ++j) crc.pcm.set(j, m + j, true);
    return crc;
}

BitVec crc_append(const CrcSpec& crc, const BitVec& msg) {
    if (int(msg.size()) != crc.m) throw std::invalid_argument("crc_append: message length mismatch");
    if (crc.r == 0) return msg;
    BitVec out(msg);
    out.resize(crc.m + crc.r, 0);
    for (int j = 0; j < crc.r; ++j) {
        std::uint8_t acc = 0;
        for (int i = 0; i < crc.m; ++i)
            if (msg[i] && crc.generator.get(i, crc.m + j)) acc ^= 1;
        out[crc.m + j] = acc;
    }
    return out;
}

bool crc_check(const CrcSpec& crc, const BitVec& word) {
    if (int(word.size()) != crc.m + crc.r) throw std::invalid_argument("crc_check: word length mismatch");
    for (int j = 0; j < crc.r; ++j) {
        std::uint8_t acc = 0;
        for (int i = 0; i < crc.m + crc.r; ++i)
            if (word[i] && crc.pcm.get(j, i)) acc ^= 1;
        if (acc) return false;
    }
    return true;
}

BitVec AugmentedCodeSpec::encode_message(const BitVec& msg) const {
    return encode(polar, crc_append(crc, msg));
}

AugmentedCodeSpec make_augmented(PolarCodeSpec spec, std::uint64_t crc_poly) {
    AugmentedCodeSpec aug;
    int r = 0;
    if (crc_poly != 0) {
        int d = 63;
        while (d > 0 && !((crc_poly >> d) & 1)) --d;
        r = d;
    }
    if (spec.k - r <= 0) throw std::invalid_argument("make_augmented: CRC longer than code dimension");
    aug.crc = make_crc(spec.k - r, crc_poly);
    aug.polar = std::move(spec);
    return aug;
}

gf2::DenseBitMatrix standard_dense_pcm(const AugmentedCodeSpec& aug) {
    const auto& spec = aug.polar;
    const int N = spec.block_length;
    const int n_frozen = N - spec.k;
    gf2::DenseBitMatrix g = full_generator(spec.n);
    gf2::DenseBitMatrix h(n_frozen + aug.crc.r, N);
    for (int fi = 0; fi < n_frozen; ++fi) {
        const int f = spec.frozen_set[fi];
        for (int j = 0; j < N; ++j)
            if (g.get(j, f)) h.set(fi, j, true);
    }
    // CRC rows H_crc G_N^T in terms of the codeword: coefficient of c_j in
    // row t is sum_a Hcrc[t, idx(a)] G[j, a] over the information set.
    for (int t = 0; t < aug.crc.r; ++t) {
        for (int j = 0; j < N; ++j) {
            std::uint8_t acc = 0;
            for (int ia = 0; ia < spec.k; ++ia) {
                if (aug.crc.pcm.get(t, ia) && g.get(j, spec.info_set[ia])) acc ^= 1;
            }
            if (acc) h.set(n_frozen + t, j, true);
        }
    }
    return h;
}

std::string code_spec_to_json(const PolarCodeSpec& spec, std::uint64_t crc_poly) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["K"] = spec.k;
    j["frozen_set"] = spec.frozen_set;
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%llx", (unsigned long long)crc_poly);
    j["crc_poly"] = std::string(buf);
    j["design_param"] = spec.design_param;
    return j.dump(2);
}

void code_spec_from_json(const std::string& text, PolarCodeSpec& spec, std::uint64_t& crc_poly) {
    nlohmann::json j = nlohmann::json::parse(text);
    spec = PolarCodeSpec{};
    spec.n = j.at("n").get<int>();
    spec.block_length = 1 << spec.n;
    spec.k = j.at("K").get<int>();
    spec.design_param = j.value("design_param", 0.5);
    spec.frozen_set = j.at("frozen_set").get<std::vector<int>>();
    std::sort(spec.frozen_set.begin(), spec.frozen_set.end());
    if (int(spec.frozen_set.size()) != spec.block_length - spec.k)
        throw std::invalid_argument("code spec: frozen set size inconsistent with K");
    spec.is_frozen.assign(spec.block_length, 0);
    for (int f : spec.frozen_set) {
        if (f < 0 || f >= spec.block_length) throw std::invalid_argument("code spec: frozen index out of range");
        spec.is_frozen[f] = 1;
    }
    for (int i = 0; i < spec.block_length; ++i)
        if (!spec.is_frozen[i]) spec.info_set.push_back(i);
    std::string ps = j.at("crc_poly").get<std::string>();
    crc_poly = std::stoull(ps, nullptr, 0);
}

}  // namespace fec::polar
