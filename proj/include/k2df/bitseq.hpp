#pragma once

// Word-packed bit arrays with rank/select support and LEB128-style varints.
// Bit i lives in words_[i / 64] at bit position i % 64 (LSB-first), so the
// sequence reads left to right as positions 0, 1, 2, ...

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace k2df {

class BitSeq {
public:
    BitSeq() = default;

    explicit BitSeq(uint64_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitSeq from_string(std::string_view s) {
        BitSeq b;
        for (char c : s) {
            if (c == '0' || c == '1') b.push_back(c == '1');
            else if (c != ' ') throw std::invalid_argument("BitSeq::from_string: bad character");
        }
        return b;
    }

    uint64_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(uint64_t i, bool v) {
        if (v) words_[i >> 6] |= uint64_t(1) << (i & 63);
        else words_[i >> 6] &= ~(uint64_t(1) << (i & 63));
    }

    void push_back(bool v) {
        if ((len_ & 63) == 0) words_.push_back(0);
        if (v) words_.back() |= uint64_t(1) << (len_ & 63);
        ++len_;
    }

    // Appends the low `count` bits of `value`, lowest bit first.
    void append_bits(uint64_t value, unsigned count) {
        if (count == 0) return;
        if (count < 64) value &= (uint64_t(1) << count) - 1;
        unsigned off = len_ & 63;
        if (off == 0) {
            words_.push_back(value);
        } else {
            words_.back() |= value << off;
            if (count > 64 - off) words_.push_back(value >> (64 - off));
        }
        len_ += count;
    }

    // Reads `count` (<= 64) bits starting at position `pos`, lowest bit first.
    uint64_t read_bits(uint64_t pos, unsigned count) const {
        if (count == 0) return 0;
        uint64_t w = pos >> 6;
        unsigned off = pos & 63;
        uint64_t v = words_[w] >> off;
        if (off + count > 64) v |= words_[w + 1] << (64 - off);
        if (count < 64) v &= (uint64_t(1) << count) - 1;
        return v;
    }

    void append_range(const BitSeq& src, uint64_t from, uint64_t count) {
        while (count > 0) {
            unsigned chunk = count < 64 ? unsigned(count) : 64u;
            append_bits(src.read_bits(from, chunk), chunk);
            from += chunk;
            count -= chunk;
        }
    }

    uint64_t ones() const {
        uint64_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    std::span<const uint64_t> words() const { return words_; }

    bool operator==(const BitSeq& o) const { return len_ == o.len_ && words_ == o.words_; }

    std::string to_string() const {
        std::string s;
        s.reserve(len_);
        for (uint64_t i = 0; i < len_; ++i) s.push_back(get(i) ? '1' : '0');
        return s;
    }

    // Wire format: u64 bit length, then ceil(len/64) little-endian 64-bit words.
    void write(std::ostream& os) const {
        write_u64(os, len_);
        for (uint64_t w : words_) write_u64(os, w);
    }

    static BitSeq read(std::istream& is) {
        BitSeq b;
        b.len_ = read_u64(is);
        uint64_t nwords = (b.len_ + 63) / 64;
        b.words_.resize(nwords);
        for (uint64_t i = 0; i < nwords; ++i) b.words_[i] = read_u64(is);
        if (b.len_ & 63) {
            uint64_t tail = b.words_.back() >> (b.len_ & 63);
            if (tail != 0) throw std::runtime_error("BitSeq: nonzero bits past length");
        }
        return b;
    }

    static void write_u64(std::ostream& os, uint64_t v) {
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = (v >> (8 * i)) & 0xff;
        os.write(reinterpret_cast<const char*>(buf), 8);
    }

    static uint64_t read_u64(std::istream& is) {
        unsigned char buf[8];
        is.read(reinterpret_cast<char*>(buf), 8);
        if (!is) throw std::runtime_error("unexpected end of stream");
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(buf[i]) << (8 * i);
        return v;
    }

private:
    uint64_t len_ = 0;
    std::vector<uint64_t> words_;
};

// Two-level rank directory: superblocks of 512 bits (u32 absolute counts) and
// blocks of 64 bits (u16 counts relative to the superblock). Entries that are
// always zero (first superblock, first block of each superblock) are not
// stored, which keeps the overhead under 0.30 bits per bit for every length.
class RankIndex {
public:
    static constexpr uint64_t npos = ~uint64_t(0);

    RankIndex() = default;

    explicit RankIndex(const BitSeq& s) { build(s); }

    void build(const BitSeq& s) {
        if (s.size() >= (uint64_t(1) << 32))
            throw std::invalid_argument("RankIndex: sequence too long for u32 directory");
        super_.clear();
        blocks_.clear();
        uint64_t nblocks = (s.size() + 63) / 64;
        uint32_t total = 0, in_super = 0;
        auto words = s.words();
        for (uint64_t b = 0; b < nblocks; ++b) {
            if (b % 8 == 0) {
                if (b > 0) super_.push_back(total);
                in_super = 0;
            } else {
                blocks_.push_back(uint16_t(in_super));
            }
            uint32_t pc = uint32_t(std::popcount(words[b]));
            total += pc;
            in_super += pc;
        }
        ones_ = total;
    }

    uint64_t ones() const { return ones_; }

    // Number of ones at positions strictly below i.
    uint64_t rank1(const BitSeq& s, uint64_t i) const {
        if (i > s.size()) throw std::out_of_range("rank1: position out of bounds");
        if (i == 0) return 0;
        uint64_t b = i >> 6;
        uint64_t sb = b >> 3;
        uint64_t r = sb > 0 ? super_[sb - 1] : 0;
        if (b & 7) r += blocks_[b - sb - 1];
        if (i & 63) r += std::popcount(s.words()[b] & ((uint64_t(1) << (i & 63)) - 1));
        return r;
    }

    uint64_t rank0(const BitSeq& s, uint64_t i) const { return i - rank1(s, i); }

    // Position of the j-th one (j is 1-based); npos when out of range.
    uint64_t select1(const BitSeq& s, uint64_t j) const {
        if (j == 0 || j > ones_) return npos;
        // superblock: largest sb with count-before < j
        uint64_t lo = 0, hi = super_.size();
        while (lo < hi) {
            uint64_t mid = (lo + hi) / 2;
            if (super_[mid] < j) lo = mid + 1;
            else hi = mid;
        }
        uint64_t sb = lo;  // ones before superblock sb: sb ? super_[sb-1] : 0
        uint64_t rem = j - (sb > 0 ? super_[sb - 1] : 0);
        uint64_t nblocks = (s.size() + 63) / 64;
        uint64_t first = sb * 8;
        uint64_t last = std::min(first + 8, nblocks);
        uint64_t b = first;
        for (uint64_t nb = first + 1; nb < last; ++nb) {
            if (blocks_[nb - sb - 1] < rem) b = nb;
            else break;
        }
        if (b & 7) rem -= blocks_[b - sb - 1];
        uint64_t w = s.words()[b];
        for (uint64_t bit = 0; bit < 64; ++bit) {
            if ((w >> bit) & 1) {
                if (--rem == 0) return b * 64 + bit;
            }
        }
        return npos;  // unreachable for consistent directories
    }

    size_t bytes() const { return super_.size() * 4 + blocks_.size() * 2; }

private:
    std::vector<uint32_t> super_;
    std::vector<uint16_t> blocks_;
    uint64_t ones_ = 0;
};

// Base-128 varint, low 7 bits first, high bit of each byte = continuation.
inline unsigned varuint_len(uint64_t v) {
    unsigned bits = v == 0 ? 1 : unsigned(std::bit_width(v));
    return (bits + 6) / 7;
}

inline void varuint_encode(uint64_t v, std::vector<uint8_t>& out) {
    while (v >= 0x80) {
        out.push_back(uint8_t(v) | 0x80);
        v >>= 7;
    }
    out.push_back(uint8_t(v));
}

inline uint64_t varuint_decode(std::span<const uint8_t> bytes, size_t& pos) {
    uint64_t v = 0;
    unsigned shift = 0;
    while (true) {
        if (pos >= bytes.size()) throw std::runtime_error("varuint: truncated encoding");
        if (shift >= 64) throw std::runtime_error("varuint: encoding too long");
        uint8_t b = bytes[pos++];
        v |= uint64_t(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
    }
}

}  // namespace k2df
