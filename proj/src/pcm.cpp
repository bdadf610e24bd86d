#include "fec/pcm.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fec::pcm {

FactorGraphPcm build_standard_fg_pcm(const polar::PolarCodeSpec& spec) {
    const int n = spec.n, N = spec.block_length;
    FactorGraphPcm fg;
    fg.n = n;
    fg.block_length = N;
    fg.matrix = gf2::SparseBinaryMatrix(N * n, N * (n + 1));
    int row = 0;
    for (int s = 1; s <= n; ++s) {
        const int h = 1 << (s - 1);
        for (int i = 0; i < N; ++i) {
            if (i & h) continue;
            const int a = (s - 1) * N + i;
            const int b = (s - 1) * N + i + h;
            const int c = s * N + i;
            const int d = s * N + i + h;
            fg.matrix.add_entry(row, a);
            fg.matrix.add_entry(row, b);
            fg.matrix.add_entry(row, c);
            ++row;
            fg.matrix.add_entry(row, b);
            fg.matrix.add_entry(row, d);
            ++row;
        }
    }
    fg.cvn_columns.resize(N);
    for (int bit = 0; bit < N; ++bit) fg.cvn_columns[bit] = n * N + bitrev(bit, n);
    for (int f : spec.frozen_set) fg.fvn_columns.push_back(f);
    return fg;
}

namespace {

enum class NodeKind : std::uint8_t { Frozen, Hidden, Codeword };

struct PruneState {
    std::vector<std::vector<int>> row_sup, col_sup;
    std::vector<std::vector<int>> origin;
    std::vector<NodeKind> kind;
    std::vector<std::uint8_t> row_alive, col_alive;
    std::vector<int> cvn_bit;  // per column, -1 unless codeword node

    static void erase_sorted(std::vector<int>& v, int x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        assert(it != v.end() && *it == x);
        v.erase(it);
    }
    static void insert_sorted(std::vector<int>& v, int x) {
        v.insert(std::lower_bound(v.begin(), v.end(), x), x);
    }
    static bool contains_sorted(const std::vector<int>& v, int x) {
        return std::binary_search(v.begin(), v.end(), x);
    }

    void remove_col(int c) {
        for (int r : col_sup[c]) erase_sorted(row_sup[r], c);
        col_sup[c].clear();
        col_alive[c] = 0;
    }
    void remove_row(int r) {
        for (int c : row_sup[r]) erase_sorted(col_sup[c], r);
        row_sup[r].clear();
        row_alive[r] = 0;
    }
    // dst column <- dst xor src (GF(2)); src removed; origins merged.
    void merge_col_into(int src, int dst) {
        for (int r : col_sup[src]) {
            erase_sorted(row_sup[r], src);
            if (contains_sorted(row_sup[r], dst)) {
                erase_sorted(row_sup[r], dst);
                erase_sorted(col_sup[dst], r);
            } else {
                insert_sorted(row_sup[r], dst);
                insert_sorted(col_sup[dst], r);
            }
        }
        col_sup[src].clear();
        col_alive[src] = 0;
        auto& od = origin[dst];
        od.insert(od.end(), origin[src].begin(), origin[src].end());
        std::sort(od.begin(), od.end());
        origin[src].clear();
    }
    // dst row <- dst xor src; src removed.
    void merge_row_into(int src, int dst) {
        for (int c : row_sup[src]) {
            erase_sorted(col_sup[c], src);
            if (contains_sorted(row_sup[dst], c)) {
                erase_sorted(row_sup[dst], c);
                erase_sorted(col_sup[c], dst);
            } else {
                insert_sorted(row_sup[dst], c);
                insert_sorted(col_sup[c], dst);
            }
        }
        row_sup[src].clear();
        row_alive[src] = 0;
    }
};

}  // namespace

PrunedPcm prune(const FactorGraphPcm& fg, std::optional<int> degree_cap) {
    const int n_rows = fg.matrix.n_rows, n_cols = fg.matrix.n_cols;
    PruneState st;
    st.row_sup = fg.matrix.row_support;
    st.col_sup = fg.matrix.col_support;
    st.row_alive.assign(n_rows, 1);
    st.col_alive.assign(n_cols, 1);
    st.kind.assign(n_cols, NodeKind::Hidden);
    st.cvn_bit.assign(n_cols, -1);
    st.origin.resize(n_cols);
    for (int c = 0; c < n_cols; ++c) st.origin[c] = {c};
    for (int f : fg.fvn_columns) st.kind[f] = NodeKind::Frozen;
    for (int bit = 0; bit < fg.block_length; ++bit) {
        st.kind[fg.cvn_columns[bit]] = NodeKind::Codeword;
        st.cvn_bit[fg.cvn_columns[bit]] = bit;
    }

    auto rule1 = [&]() {  // FVN removal
        bool fired = false;
        for (int c = 0; c < n_cols; ++c) {
            if (st.col_alive[c] && st.kind[c] == NodeKind::Frozen) {
                st.remove_col(c);
                fired = true;
            }
        }
        return fired;
    };
    auto rule2 = [&]() {  // degree-1 checks: neighbor variable must be zero
        bool fired = false, again = true;
        while (again) {
            again = false;
            for (int r = 0; r < n_rows; ++r) {
                if (!st.row_alive[r] || st.row_sup[r].size() != 1) continue;
                const int c = st.row_sup[r][0];
                if (st.kind[c] == NodeKind::Codeword) continue;  // never drop a codeword column
                st.remove_row(r);
                st.remove_col(c);
                fired = again = true;
            }
        }
        return fired;
    };
    auto rule3 = [&]() {  // CVN = HVN through a degree-2 check
        bool fired = false, again = true;
        while (again) {
            again = false;
            for (int r = 0; r < n_rows; ++r) {
                if (!st.row_alive[r] || st.row_sup[r].size() != 2) continue;
                const int a = st.row_sup[r][0], b = st.row_sup[r][1];
                int cvn = -1, hvn = -1;
                if (st.kind[a] == NodeKind::Codeword && st.kind[b] == NodeKind::Hidden) cvn = a, hvn = b;
                if (st.kind[b] == NodeKind::Codeword && st.kind[a] == NodeKind::Hidden) cvn = b, hvn = a;
                if (cvn < 0) continue;
                st.remove_row(r);
                st.merge_col_into(hvn, cvn);
                fired = again = true;
            }
        }
        return fired;
    };
    auto rule4 = [&]() {  // degree-1 HVN: unknowable, drop with its check
        bool fired = false, again = true;
        while (again) {
            again = false;
            for (int c = 0; c < n_cols; ++c) {
                if (!st.col_alive[c] || st.kind[c] != NodeKind::Hidden || st.col_sup[c].size() != 1) continue;
                const int r = st.col_sup[c][0];
                st.remove_col(c);
                st.remove_row(r);
                fired = again = true;
            }
        }
        return fired;
    };
    auto rule5 = [&]() {  // degree-2 HVN: merge its two checks
        bool fired = false, again = true;
        while (again) {
            again = false;
            for (int c = 0; c < n_cols; ++c) {
                if (!st.col_alive[c] || st.kind[c] != NodeKind::Hidden || st.col_sup[c].size() != 2) continue;
                const int r1 = st.col_sup[c][0], r2 = st.col_sup[c][1];
                if (degree_cap) {
                    std::vector<int> merged;
                    std::set_symmetric_difference(st.row_sup[r1].begin(), st.row_sup[r1].end(),
                                                  st.row_sup[r2].begin(), st.row_sup[r2].end(),
                                                  std::back_inserter(merged));
                    if (int(merged.size()) > *degree_cap) continue;
                }
                st.remove_col(c);
                st.merge_row_into(r2, r1);
                assert(!st.row_sup[r1].empty() && "pruning produced an empty check row");
                fired = again = true;
            }
        }
        return fired;
    };
    auto rule6 = [&]() {  // degree-2 check over two HVNs: the HVNs are equal
        bool fired = false, again = true;
        while (again) {
            again = false;
            for (int r = 0; r < n_rows; ++r) {
                if (!st.row_alive[r] || st.row_sup[r].size() != 2) continue;
                const int a = st.row_sup[r][0], b = st.row_sup[r][1];
                if (st.kind[a] != NodeKind::Hidden || st.kind[b] != NodeKind::Hidden) continue;
                st.remove_row(r);
                st.merge_col_into(b, a);  // smaller original index survives
                fired = again = true;
            }
        }
        return fired;
    };

    bool any = true;
    while (any) {
        any = false;
        any |= rule1();
        any |= rule2();
        any |= rule3();
        any |= rule4();
        any |= rule5();
        any |= rule6();
    }

    // Compact: hidden columns first (ascending id), then codeword columns in
    // codeword-bit order.
    PrunedPcm p;
    p.block_length = fg.block_length;
    p.code_k = fg.block_length - int(fg.fvn_columns.size());
    std::vector<int> order;
    for (int c = 0; c < n_cols; ++c)
        if (st.col_alive[c] && st.kind[c] == NodeKind::Hidden) order.push_back(c);
    for (int bit = 0; bit < fg.block_length; ++bit) {
        const int c = fg.cvn_columns[bit];
        assert(st.col_alive[c] && "codeword column removed by pruning");
        order.push_back(c);
    }
    std::vector<int> col_index(n_cols, -1);
    for (int i = 0; i < int(order.size()); ++i) col_index[order[i]] = i;

    std::vector<int> live_rows;
    for (int r = 0; r < n_rows; ++r)
        if (st.row_alive[r]) live_rows.push_back(r);

    p.matrix = gf2::SparseBinaryMatrix(int(live_rows.size()), int(order.size()));
    for (int i = 0; i < int(live_rows.size()); ++i)
        for (int c : st.row_sup[live_rows[i]]) p.matrix.add_entry(i, col_index[c]);
    p.origin_map.resize(order.size());
    p.cvn_bit_of_.assign(order.size(), -1);
    for (int i = 0; i < int(order.size()); ++i) p.origin_map[i] = std::move(st.origin[order[i]]);
    p.cvn_columns.resize(fg.block_length);
    for (int bit = 0; bit < fg.block_length; ++bit) {
        const int i = col_index[fg.cvn_columns[bit]];
        p.cvn_columns[bit] = i;
        p.cvn_bit_of_[i] = bit;
    }
    return p;
}

gf2::DenseBitMatrix reduce_density_greedy(const gf2::DenseBitMatrix& rows) {
    gf2::DenseBitMatrix w = rows;
    const int n = w.rows();
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 0; i < n && !improved; ++i) {
            for (int j = i + 1; j < n && !improved; ++j) {
                const int wi = w.row_weight(i), wj = w.row_weight(j);
                int ws = 0;
                {
                    auto a = w.row_words(i);
                    auto b = w.row_words(j);
                    for (std::size_t t = 0; t < a.size(); ++t) ws += std::popcount(a[t] ^ b[t]);
                }
                if (ws < wi && ws < wj) {
                    // replace the heavier row (ties replace j)
                    if (wi > wj)
                        w.xor_rows(i, j);
                    else
                        w.xor_rows(j, i);
                    improved = true;
                }
            }
        }
    }
    return w;
}

PrunedPcm append_crc_rows(const PrunedPcm& p, const polar::CrcSpec& crc,
                          const gf2::DenseBitMatrix& g_full, const polar::PolarCodeSpec& spec) {
    if (crc.r == 0) return p;
    if (crc.m + crc.r != spec.k) throw std::invalid_argument("append_crc_rows: CRC dimensions incompatible");
    const int N = p.block_length;
    gf2::DenseBitMatrix crc_dense(crc.r, N);
    for (int t = 0; t < crc.r; ++t) {
        for (int j = 0; j < N; ++j) {
            std::uint8_t acc = 0;
            for (int ia = 0; ia < spec.k; ++ia)
                if (crc.pcm.get(t, ia) && g_full.get(j, spec.info_set[ia])) acc ^= 1;
            if (acc) crc_dense.set(t, j, true);
        }
    }
    crc_dense = reduce_density_greedy(crc_dense);

    PrunedPcm out = p;
    out.crc_rows = crc.r;
    out.matrix.n_rows += crc.r;
    out.matrix.row_support.resize(out.matrix.n_rows);
    for (int t = 0; t < crc.r; ++t) {
        const int row = p.matrix.n_rows + t;
        for (int j = 0; j < N; ++j)
            if (crc_dense.get(t, j)) out.matrix.add_entry(row, p.cvn_columns[j]);
    }
    return out;
}

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    crc = ~crc;
    for (std::size_t i = 0; i < len; ++i) {
        crc ^= p[i];
        for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xEDB88320u & (-(crc & 1u)));
    }
    return ~crc;
}

struct Writer {
    std::ostream& os;
    std::uint32_t crc = 0;
    void u32(std::uint32_t v) {
        unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                              (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
        os.write(reinterpret_cast<const char*>(b), 4);
        crc = crc32_update(crc, b, 4);
    }
};

struct Reader {
    std::istream& is;
    std::uint32_t crc = 0;
    std::uint32_t u32() {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        if (!is) throw ParseError("pruned PCM stream truncated");
        crc = crc32_update(crc, b, 4);
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
               (std::uint32_t(b[3]) << 24);
    }
};

constexpr std::uint32_t kMagic = 0x4d435046;  // "FPCM" little-endian
constexpr std::uint32_t kVersion = 1;

}  // namespace

void serialize(const PrunedPcm& p, std::ostream& os) {
    Writer w{os};
    w.u32(kMagic);
    w.u32(kVersion);
    w.u32(std::uint32_t(p.block_length));
    w.u32(std::uint32_t(p.code_k));
    w.u32(std::uint32_t(p.n_prime()));
    w.u32(std::uint32_t(p.crc_rows));
    w.u32(std::uint32_t(p.matrix.n_rows));
    for (int r = 0; r < p.matrix.n_rows; ++r) {
        w.u32(std::uint32_t(p.matrix.row_support[r].size()));
        for (int c : p.matrix.row_support[r]) w.u32(std::uint32_t(c));
    }
    w.u32(std::uint32_t(p.cvn_columns.size()));
    for (int c : p.cvn_columns) w.u32(std::uint32_t(c));
    for (const auto& og : p.origin_map) {
        w.u32(std::uint32_t(og.size()));
        for (int x : og) w.u32(std::uint32_t(x));
    }
    const std::uint32_t sum = w.crc;
    unsigned char b[4] = {(unsigned char)(sum & 0xff), (unsigned char)((sum >> 8) & 0xff),
                          (unsigned char)((sum >> 16) & 0xff), (unsigned char)((sum >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

PrunedPcm deserialize(std::istream& is) {
    Reader rd{is};
    if (rd.u32() != kMagic) throw ParseError("pruned PCM: bad magic");
    const std::uint32_t ver = rd.u32();
    if (ver != kVersion) throw ParseError("pruned PCM: unsupported version " + std::to_string(ver));
    PrunedPcm p;
    p.block_length = int(rd.u32());
    p.code_k = int(rd.u32());
    const int n_prime = int(rd.u32());
    p.crc_rows = int(rd.u32());
    const int n_rows = int(rd.u32());
    if (p.block_length <= 0 || n_prime < p.block_length || n_rows <= 0 || n_rows > (1 << 26))
        throw ParseError("pruned PCM: implausible header");
    p.matrix = gf2::SparseBinaryMatrix(n_rows, n_prime);
    for (int r = 0; r < n_rows; ++r) {
        const int cnt = int(rd.u32());
        if (cnt < 0 || cnt > n_prime) throw ParseError("pruned PCM: bad row length");
        int prev = -1;
        for (int t = 0; t < cnt; ++t) {
            const int c = int(rd.u32());
            if (c <= prev || c >= n_prime) throw ParseError("pruned PCM: unsorted or out-of-range column");
            p.matrix.add_entry(r, c);
            prev = c;
        }
    }
    const int n_cvn = int(rd.u32());
    if (n_cvn != p.block_length) throw ParseError("pruned PCM: cvn count mismatch");
    p.cvn_columns.resize(n_cvn);
    p.cvn_bit_of_.assign(n_prime, -1);
    for (int b = 0; b < n_cvn; ++b) {
        const int c = int(rd.u32());
        if (c < 0 || c >= n_prime) throw ParseError("pruned PCM: cvn column out of range");
        p.cvn_columns[b] = c;
        p.cvn_bit_of_[c] = b;
    }
    p.origin_map.resize(n_prime);
    for (int c = 0; c < n_prime; ++c) {
        const int cnt = int(rd.u32());
        if (cnt < 0 || cnt > (1 << 24)) throw ParseError("pruned PCM: bad origin size");
        p.origin_map[c].resize(cnt);
        for (int t = 0; t < cnt; ++t) p.origin_map[c][t] = int(rd.u32());
    }
    const std::uint32_t computed = rd.crc;
    unsigned char b4[4];
    is.read(reinterpret_cast<char*>(b4), 4);
    if (!is) throw ParseError("pruned PCM stream truncated");
    const std::uint32_t stored = std::uint32_t(b4[0]) | (std::uint32_t(b4[1]) << 8) |
                                 (std::uint32_t(b4[2]) << 16) | (std::uint32_t(b4[3]) << 24);
    if (stored != computed) throw ParseError("pruned PCM: checksum mismatch");
    return p;
}

void save_artifact(const PrunedPcm& p, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    serialize(p, os);
}

PrunedPcm load_artifact(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return deserialize(is);
}

}  // namespace fec::pcm
