#pragma once

// Canonical level-order k^2-tree: bit arrays T (all levels above the last)
// and L (last-level blocks) with rank-based child navigation.
//
// Positions are 0-based and index the virtual concatenation T.L; rank is
// exclusive, so the children of the node whose bit sits at position x start
// at rank1(T, x+1) * k^2. The root has no bit of its own, its child block is
// the k^2 bits at position 0. A single-cell matrix (h = 0) is stored as one
// leaf bit in L.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bitseq.hpp"
#include "detail/build.hpp"
#include "matrix.hpp"

namespace k2df {

class CanonicalTree {
public:
    CanonicalTree() = default;

    static CanonicalTree build(const CoordMatrix& m, uint32_t k) {
        detail::BlockForest f = detail::build_blocks(m, k);
        CanonicalTree t;
        t.k_ = f.k;
        t.n_ = f.n;
        t.shape_ = pad_shape(f.n, f.k);
        if (f.h == 0) {
            if (!m.coords.empty()) t.L_.push_back(true);
            else t.L_.push_back(false);
        } else {
            // Depth-first blocks grouped by level preserve level order, so
            // bucketing reproduces the level-wise layout.
            std::vector<std::vector<uint64_t>> buckets(f.h);
            for (size_t i = 0; i < f.blocks.size(); ++i)
                buckets[f.levels[i]].push_back(f.blocks[i]);
            const unsigned kk = f.k * f.k;
            for (uint32_t lv = 0; lv + 1 < f.h; ++lv)
                for (uint64_t b : buckets[lv]) t.T_.append_bits(b, kk);
            for (uint64_t b : buckets[f.h - 1]) t.L_.append_bits(b, kk);
        }
        t.finish();
        return t;
    }

    // Assembles a tree from raw parts (deserialization, fixtures); validates
    // the block structure level by level.
    static CanonicalTree from_parts(uint32_t k, uint64_t n, BitSeq T, BitSeq L) {
        CanonicalTree t;
        t.k_ = k;
        t.n_ = n;
        t.shape_ = pad_shape(n, k);
        t.T_ = std::move(T);
        t.L_ = std::move(L);
        t.validate();
        t.finish();
        return t;
    }

    uint32_t k() const { return k_; }
    uint64_t n() const { return n_; }
    uint32_t height() const { return shape_.h; }
    uint64_t side() const { return shape_.side; }
    const BitSeq& tree_bits() const { return T_; }
    const BitSeq& leaf_bits() const { return L_; }
    const RankIndex& rank_t() const { return rankT_; }

    // Bit of the virtual concatenation T.L.
    bool bit_at(uint64_t pos) const {
        if (pos < T_.size()) return T_.get(pos);
        pos -= T_.size();
        if (pos >= L_.size()) throw std::out_of_range("CanonicalTree: position out of bounds");
        return L_.get(pos);
    }

    uint64_t concat_size() const { return T_.size() + L_.size(); }

    // Reads the k^2-bit block starting at pos in T.L. Blocks never straddle
    // the T/L boundary because both lengths are multiples of k^2.
    uint64_t block_at(uint64_t pos) const {
        const unsigned kk = k_ * k_;
        if (pos < T_.size()) return T_.read_bits(pos, kk);
        return L_.read_bits(pos - T_.size(), kk);
    }

    // Position of child i of the node whose bit is at position x; x must hold
    // a 1 in T. Positions >= |T| address L at offset pos - |T|.
    uint64_t child_pos(uint64_t x, uint32_t i) const {
        const unsigned kk = k_ * k_;
        if (i >= kk) throw std::invalid_argument("child_pos: child index out of range");
        if (x >= T_.size()) throw std::out_of_range("child_pos: position out of bounds");
        if (!T_.get(x)) throw std::invalid_argument("child_pos: leaf has no children");
        return rankT_.rank1(T_, x + 1) * kk + i;
    }

    bool get_cell(uint64_t r, uint64_t c) const {
        if (r >= n_ || c >= n_) throw std::out_of_range("get_cell: coordinate out of range");
        if (shape_.h == 0) return L_.get(0);
        uint64_t pos = 0;
        uint64_t size = shape_.side;
        for (uint32_t level = 0;; ++level) {
            uint64_t half = size / k_;
            uint64_t idx = (r / half) * k_ + (c / half);
            uint64_t bitpos = pos + idx;
            bool bit = bit_at(bitpos);
            if (!bit) return false;
            if (level + 1 == shape_.h) return true;
            pos = rankT_.rank1(T_, bitpos + 1) * uint64_t(k_) * k_;
            r %= half;
            c %= half;
            size = half;
        }
    }

    // All columns c with M[r][c] = 1, ascending.
    std::vector<uint64_t> row_successors(uint64_t r) const {
        if (r >= n_) throw std::out_of_range("row_successors: row out of range");
        std::vector<uint64_t> out;
        if (shape_.h == 0) {
            if (L_.get(0)) out.push_back(0);
            return out;
        }
        row_rec(0, 0, r, 0, shape_.side, out);
        return out;
    }

    CoordMatrix decode() const {
        std::vector<Coord> pairs;
        if (shape_.h == 0) {
            if (L_.get(0)) pairs.push_back({0, 0});
        } else {
            decode_rec(0, 0, 0, 0, shape_.side, pairs);
        }
        return CoordMatrix::from_pairs(n_, std::move(pairs));
    }

    // |T| + |L|, checked against the k^2 m (log_{k^2}(side^2/m) + 8) bound.
    uint64_t space_bound_check(const CoordMatrix& m) const {
        if (m.nnz() == 0) throw std::invalid_argument("space_bound_check: needs at least one nonzero");
        uint64_t bits = T_.size() + L_.size();
        double kk = double(k_) * k_;
        double ratio = double(shape_.side) * double(shape_.side) / double(m.nnz());
        double bound = kk * double(m.nnz()) * (std::log(ratio) / std::log(kk) + 8.0);
        if (double(bits) > bound) throw std::logic_error("space_bound_check: bound violated");
        return bits;
    }

    std::vector<std::pair<std::string, uint64_t>> space_breakdown() const {
        return {{"T", T_.size()}, {"L", L_.size()}, {"rank_index", rankT_.bytes() * 8}};
    }

    uint64_t space_bits() const {
        uint64_t total = 0;
        for (auto& [name, bits] : space_breakdown()) total += bits;
        return total;
    }

private:
    void finish() { rankT_.build(T_); }

    void validate() const {
        const unsigned kk = k_ * k_;
        if (shape_.h == 0) {
            if (T_.size() != 0 || L_.size() != 1)
                throw std::runtime_error("CanonicalTree: bad single-cell layout");
            return;
        }
        if (T_.size() % kk != 0 || L_.size() % kk != 0)
            throw std::runtime_error("CanonicalTree: lengths not multiples of k^2");
        if (shape_.h == 1) {
            if (T_.size() != 0 || L_.size() != kk)
                throw std::runtime_error("CanonicalTree: bad height-1 layout");
            return;
        }
        if (T_.size() == 0) throw std::runtime_error("CanonicalTree: missing root block");
        if (T_.ones() + 1 != (T_.size() + L_.size()) / kk)
            throw std::runtime_error("CanonicalTree: block count mismatch");
        // level-by-level consumption: ones at level l spawn the blocks of level l+1
        uint64_t level_blocks = 1, consumed = 0;
        for (uint32_t lv = 0; lv + 1 < shape_.h; ++lv) {
            uint64_t bits = level_blocks * kk;
            if (consumed + bits > T_.size())
                throw std::runtime_error("CanonicalTree: T too short");
            uint64_t ones = 0;
            for (uint64_t i = 0; i < bits; ++i) ones += T_.get(consumed + i);
            consumed += bits;
            level_blocks = ones;
        }
        if (consumed != T_.size()) throw std::runtime_error("CanonicalTree: T length mismatch");
        if (level_blocks * kk != L_.size()) throw std::runtime_error("CanonicalTree: L length mismatch");
    }

    void decode_rec(uint64_t pos, uint32_t level, uint64_t r0, uint64_t c0, uint64_t size,
                    std::vector<Coord>& out) const {
        const uint64_t half = size / k_;
        const unsigned kk = k_ * k_;
        for (unsigned i = 0; i < kk; ++i) {
            if (!bit_at(pos + i)) continue;
            uint64_t r = r0 + (i / k_) * half;
            uint64_t c = c0 + (i % k_) * half;
            if (level + 1 == shape_.h) {
                if (r < n_ && c < n_) out.push_back({uint32_t(r), uint32_t(c)});
            } else {
                decode_rec(rankT_.rank1(T_, pos + i + 1) * kk, level + 1, r, c, half, out);
            }
        }
    }

    void row_rec(uint64_t pos, uint32_t level, uint64_t r, uint64_t c0, uint64_t size,
                 std::vector<uint64_t>& out) const {
        const uint64_t half = size / k_;
        const unsigned kk = k_ * k_;
        unsigned qi = unsigned(r / half);
        for (unsigned qj = 0; qj < k_; ++qj) {
            unsigned i = qi * k_ + qj;
            if (!bit_at(pos + i)) continue;
            uint64_t c = c0 + qj * half;
            if (level + 1 == shape_.h) {
                if (c < n_) out.push_back(c);
            } else {
                row_rec(rankT_.rank1(T_, pos + i + 1) * kk, level + 1, r % half, c, half, out);
            }
        }
    }

    uint32_t k_ = 2;
    uint64_t n_ = 0;
    PaddedShape shape_;
    BitSeq T_, L_;
    RankIndex rankT_;
};

}  // namespace k2df
