#pragma once

// Balanced-parenthesis sequences: matching-parenthesis queries and occurrence
// rank for the 4-symbol pattern "(())". A 1-bit encodes '(' and a 0-bit ')'.
//
// find_close/find_open use a block-local excess scan: per 64-bit word we keep
// the min/max relative excess, so whole words that cannot contain the answer
// are stepped over. Absolute excess comes from the rank directory:
// excess(p) = 2*rank1(p) - p.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bitseq.hpp"

namespace k2df {

class ParenSeq {
public:
    ParenSeq() = default;

    explicit ParenSeq(BitSeq bits) : bits_(std::move(bits)) {
        rank_.build(bits_);
        build_excess_tables();
    }

    static ParenSeq from_string(std::string_view s) {
        BitSeq b;
        for (char c : s) {
            if (c == '(') b.push_back(true);
            else if (c == ')') b.push_back(false);
            else if (c != ' ') throw std::invalid_argument("ParenSeq: bad character");
        }
        return ParenSeq(std::move(b));
    }

    uint64_t size() const { return bits_.size(); }
    const BitSeq& bits() const { return bits_; }
    bool is_open(uint64_t i) const { return bits_.get(i); }
    char char_at(uint64_t i) const { return bits_.get(i) ? '(' : ')'; }

    std::string to_string() const {
        std::string s;
        s.reserve(size());
        for (uint64_t i = 0; i < size(); ++i) s.push_back(char_at(i));
        return s;
    }

    // #'(' minus #')' among the first p symbols.
    int64_t excess(uint64_t p) const {
        return 2 * int64_t(rank_.rank1(bits_, p)) - int64_t(p);
    }

    uint64_t find_close(uint64_t i) const {
        if (i >= size() || !bits_.get(i))
            throw std::invalid_argument("find_close: position is not an opening parenthesis");
        int64_t target = excess(i);
        int64_t e = target + 1;
        uint64_t p = i + 1;
        uint64_t wend = std::min<uint64_t>((i / 64 + 1) * 64, size());
        for (; p < wend; ++p) {
            e += bits_.get(p) ? 1 : -1;
            if (e == target) return p;
        }
        uint64_t nwords = (size() + 63) / 64;
        for (uint64_t w = p / 64; w < nwords; ++w) {
            if (e + wmin_[w] <= target) {
                uint64_t lim = std::min<uint64_t>(w * 64 + 64, size());
                for (uint64_t q = w * 64; q < lim; ++q) {
                    e += bits_.get(q) ? 1 : -1;
                    if (e == target) return q;
                }
                assert(false && "excess table promised a hit");
            }
            e += wdelta_[w];
        }
        throw std::logic_error("find_close: no matching parenthesis");
    }

    uint64_t find_open(uint64_t j) const {
        if (j >= size() || bits_.get(j))
            throw std::invalid_argument("find_open: position is not a closing parenthesis");
        int64_t target = excess(j + 1);
        // scan left looking for the first p with excess(p) == target
        int64_t e = target + 1;  // excess(j)
        uint64_t wstart = (j / 64) * 64;
        uint64_t p = j;
        while (p > wstart) {
            e -= bits_.get(p - 1) ? 1 : -1;  // e becomes excess(p-1)
            if (e == target) return p - 1;
            --p;
        }
        if (p == 0) throw std::logic_error("find_open: no matching parenthesis");
        for (uint64_t w = p / 64; w-- > 0;) {
            // e holds excess(64*(w+1)); word covers excess values
            // [start + wmin, start + wmax] with start = e - wdelta[w]
            int64_t start = e - wdelta_[w];
            if (target >= start + wmin_[w] && target <= start + wmax_[w]) {
                int64_t ec = e;
                for (uint64_t q = w * 64 + 64; q-- > w * 64;) {
                    ec -= bits_.get(q) ? 1 : -1;
                    if (ec == target) return q;
                }
            }
            e = start;
        }
        throw std::logic_error("find_open: no matching parenthesis");
    }

    size_t aux_bytes() const {
        return rank_.bytes() + wmin_.size() + wmax_.size() + wdelta_.size();
    }

    const RankIndex& rank_index() const { return rank_; }

private:
    void build_excess_tables() {
        uint64_t nwords = (size() + 63) / 64;
        wmin_.resize(nwords);
        wmax_.resize(nwords);
        wdelta_.resize(nwords);
        int64_t e = 0;
        for (uint64_t w = 0; w < nwords; ++w) {
            int rel = 0, mn = 0, mx = 0;
            uint64_t lim = std::min<uint64_t>(w * 64 + 64, size());
            for (uint64_t p = w * 64; p < lim; ++p) {
                rel += bits_.get(p) ? 1 : -1;
                if (rel < mn) mn = rel;
                if (rel > mx) mx = rel;
                if (e + rel < 0) throw std::runtime_error("ParenSeq: unbalanced (negative excess)");
            }
            wmin_[w] = int8_t(mn);
            wmax_[w] = int8_t(mx);
            wdelta_[w] = int8_t(rel);
            e += rel;
        }
        if (e != 0) throw std::runtime_error("ParenSeq: unbalanced (nonzero final excess)");
    }

    BitSeq bits_;
    RankIndex rank_;
    std::vector<int8_t> wmin_, wmax_, wdelta_;
};

// Occurrence rank for the pattern "(())": a marks bit vector (1 at each start
// position) plus a rank directory over it.
class PatternIndex {
public:
    PatternIndex() = default;

    explicit PatternIndex(const ParenSeq& p) {
        marks_ = BitSeq(p.size());
        uint64_t prev = ~uint64_t(0);
        for (uint64_t i = 0; i + 4 <= p.size(); ++i) {
            if (p.is_open(i) && p.is_open(i + 1) && !p.is_open(i + 2) && !p.is_open(i + 3)) {
                if (prev != ~uint64_t(0) && i - prev < 2)
                    throw std::logic_error("PatternIndex: overlapping pattern occurrences");
                marks_.set(i, true);
                prev = i;
                ++count_;
            }
        }
        rank_.build(marks_);
    }

    // Occurrences starting at positions strictly below i.
    uint64_t rank(uint64_t i) const {
        if (i > marks_.size()) throw std::out_of_range("rank_pattern: position out of bounds");
        return rank_.rank1(marks_, i);
    }

    bool is_start(uint64_t i) const { return i < marks_.size() && marks_.get(i); }
    uint64_t count() const { return count_; }
    size_t bytes() const { return marks_.size() / 8 + rank_.bytes(); }

private:
    BitSeq marks_;
    RankIndex rank_;
    uint64_t count_ = 0;
};

}  // namespace k2df
