#pragma once

// Suffix array, inverse suffix array and LCP array over a parenthesis
// sequence. '(' sorts before ')' and the implicit end-of-string sentinel is
// smallest, so a suffix that is a proper prefix of another sorts first.
// Construction is prefix doubling with counting sorts; the LCP array is
// computed in rank order (Kasai).

#include <cstdint>
#include <numeric>
#include <vector>

#include "parens.hpp"

namespace k2df {

struct SuffixIndex {
    std::vector<uint32_t> sa;   // lexicographic suffix order
    std::vector<uint32_t> isa;  // isa[sa[i]] = i
    std::vector<uint32_t> lcp;  // lcp[i] = |lcp(suffix sa[i-1], suffix sa[i])|, lcp[0] = 0
};

inline SuffixIndex build_suffix_index(const ParenSeq& p) {
    SuffixIndex out;
    const uint64_t n = p.size();
    if (n == 0) return out;

    std::vector<uint32_t> sa(n), rank(n), tmp(n), cnt;
    // initial ranks: '(' -> 1, ')' -> 2 (0 is reserved for "past the end")
    for (uint64_t i = 0; i < n; ++i) rank[i] = p.is_open(i) ? 1 : 2;

    auto counting_sort = [&](const std::vector<uint32_t>& key, uint32_t kmax,
                             const std::vector<uint32_t>& in, std::vector<uint32_t>& dst) {
        cnt.assign(kmax + 2, 0);
        for (uint64_t i = 0; i < n; ++i) ++cnt[key[in[i]] + 1];
        for (uint32_t i = 1; i < cnt.size(); ++i) cnt[i] += cnt[i - 1];
        for (uint64_t i = 0; i < n; ++i) dst[cnt[key[in[i]]]++] = in[i];
    };

    std::iota(sa.begin(), sa.end(), 0);
    counting_sort(rank, 2, sa, tmp);
    sa.swap(tmp);

    uint32_t classes = 0;
    {
        std::vector<uint32_t> nr(n);
        nr[sa[0]] = 0;
        for (uint64_t i = 1; i < n; ++i) {
            nr[sa[i]] = nr[sa[i - 1]] + (rank[sa[i]] != rank[sa[i - 1]] ? 1 : 0);
        }
        rank.swap(nr);
        classes = rank[sa[n - 1]] + 1;
    }

    std::vector<uint32_t> key2(n);
    for (uint64_t len = 1; len < n && classes < n; len *= 2) {
        // second key: rank of suffix i+len, 0 when past the end (sentinel smallest)
        for (uint64_t i = 0; i < n; ++i) key2[i] = i + len < n ? rank[i + len] + 1 : 0;
        counting_sort(key2, classes, sa, tmp);
        sa.swap(tmp);
        std::vector<uint32_t> key1shift(n);
        for (uint64_t i = 0; i < n; ++i) key1shift[i] = rank[i] + 1;
        counting_sort(key1shift, classes, sa, tmp);
        sa.swap(tmp);

        std::vector<uint32_t> nr(n);
        nr[sa[0]] = 0;
        for (uint64_t i = 1; i < n; ++i) {
            bool same = rank[sa[i]] == rank[sa[i - 1]] && key2[sa[i]] == key2[sa[i - 1]];
            nr[sa[i]] = nr[sa[i - 1]] + (same ? 0 : 1);
        }
        rank.swap(nr);
        classes = rank[sa[n - 1]] + 1;
    }

    out.sa = std::move(sa);
    out.isa.resize(n);
    for (uint64_t i = 0; i < n; ++i) out.isa[out.sa[i]] = uint32_t(i);

    // Kasai, iterating suffixes in text order
    out.lcp.assign(n, 0);
    uint64_t k = 0;
    for (uint64_t i = 0; i < n; ++i) {
        uint32_t r = out.isa[i];
        if (r == 0) {
            k = 0;
            continue;
        }
        uint64_t j = out.sa[r - 1];
        while (i + k < n && j + k < n && p.is_open(i + k) == p.is_open(j + k)) ++k;
        out.lcp[r] = uint32_t(k);
        if (k > 0) --k;
    }
    return out;
}

}  // namespace k2df
