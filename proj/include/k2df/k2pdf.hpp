#pragma once

// Plain depth-first k^2-tree: the same k^2-bit node blocks as the canonical
// representation, emitted in DFS pre-order as a single bit array P. There is
// no navigation index; skipping a subtree is a depth-tracked scan (blocks at
// the leaf level spawn no further blocks, so the scan keeps a stack of
// pending-children counters per level).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detail/build.hpp"
#include "k2canon.hpp"
#include "matrix.hpp"

namespace k2df {

// Opaque traversal handle: index of the current block plus the depth of the
// node owning it.
struct DfCursor {
    uint64_t block = 0;
    uint32_t depth = 0;
};

class DfTree {
public:
    DfTree() = default;

    static DfTree build(const CoordMatrix& m, uint32_t k) {
        detail::BlockForest f = detail::build_blocks(m, k);
        return from_blocks(f.blocks, k, m.n);
    }

    // Blocks in DFS pre-order; an empty vector denotes an all-zero matrix.
    static DfTree from_blocks(const std::vector<uint64_t>& blocks, uint32_t k, uint64_t n) {
        DfTree t;
        t.k_ = k;
        t.n_ = n;
        t.shape_ = pad_shape(n, k);
        const unsigned kk = k * k;
        if (t.shape_.h == 0) {
            bool cell = !blocks.empty() && (blocks[0] & 1);
            t.P_.push_back(cell);
            t.m_ = 0;
        } else if (blocks.empty()) {
            t.P_.append_bits(0, kk);
            t.m_ = 1;
        } else {
            for (uint64_t b : blocks) t.P_.append_bits(b, kk);
            t.m_ = blocks.size();
        }
        return t;
    }

    static DfTree from_bits(BitSeq P, uint32_t k, uint64_t n) {
        DfTree t;
        t.k_ = k;
        t.n_ = n;
        t.shape_ = pad_shape(n, k);
        t.P_ = std::move(P);
        const unsigned kk = k * k;
        if (t.shape_.h == 0) {
            if (t.P_.size() != 1) throw std::runtime_error("DfTree: bad single-cell layout");
            t.m_ = 0;
        } else {
            if (t.P_.size() == 0 || t.P_.size() % kk != 0)
                throw std::runtime_error("DfTree: |P| is not a multiple of k^2");
            t.m_ = t.P_.size() / kk;
            t.validate_walk();
        }
        return t;
    }

    uint32_t k() const { return k_; }
    uint64_t n() const { return n_; }
    uint32_t height() const { return shape_.h; }
    uint64_t side() const { return shape_.side; }
    uint64_t block_count() const { return m_; }
    const BitSeq& bits() const { return P_; }

    uint64_t block_bits(uint64_t idx) const {
        return P_.read_bits(idx * k_ * k_, k_ * k_);
    }

    // Advances the cursor past the subtree that starts at it.
    DfCursor skip_subtree(DfCursor cur) const {
        uint64_t next = skip_from(cur.block, cur.depth);
        return DfCursor{next, cur.depth};
    }

    // Block index just past the subtree whose root block sits at `idx` with
    // the owning node at `level`.
    uint64_t skip_from(uint64_t idx, uint32_t level) const {
        uint32_t counts[64];
        int top = 0;
        counts[0] = 1;
        while (top >= 0) {
            if (idx >= m_) throw std::runtime_error("DfTree: traversal ran past the end");
            uint64_t bits = block_bits(idx);
            ++idx;
            --counts[top];
            uint32_t node_level = level + uint32_t(top);
            unsigned pc = unsigned(std::popcount(bits));
            if (node_level + 1 < shape_.h && pc > 0) {
                counts[++top] = pc;
            } else {
                while (top >= 0 && counts[top] == 0) --top;
            }
        }
        return idx;
    }

    // Visits every block in DFS order as visitor(index, level, bits).
    template <class Visitor>
    void walk(Visitor&& visit) const {
        if (shape_.h == 0 || m_ == 0) return;
        uint32_t counts[64];
        int top = 0;
        counts[0] = 1;
        uint64_t idx = 0;
        while (top >= 0) {
            uint64_t bits = block_bits(idx);
            --counts[top];
            visit(idx, uint32_t(top), bits);
            ++idx;
            unsigned pc = unsigned(std::popcount(bits));
            if (uint32_t(top) + 1 < shape_.h && pc > 0) {
                counts[++top] = pc;
            } else {
                while (top >= 0 && counts[top] == 0) --top;
            }
        }
        if (idx != m_) throw std::runtime_error("DfTree: DFS walk did not consume all blocks");
    }

    bool get_cell(uint64_t r, uint64_t c) const {
        if (r >= n_ || c >= n_) throw std::out_of_range("get_cell: coordinate out of range");
        if (shape_.h == 0) return P_.get(0);
        uint64_t idx = 0;
        uint64_t size = shape_.side;
        for (uint32_t level = 0;; ++level) {
            uint64_t bits = block_bits(idx);
            uint64_t half = size / k_;
            unsigned q = unsigned(r / half) * k_ + unsigned(c / half);
            if (!((bits >> q) & 1)) return false;
            if (level + 1 == shape_.h) return true;
            // enter child q: step past the subtrees of earlier set bits
            uint64_t child = idx + 1;
            for (unsigned j = 0; j < q; ++j)
                if ((bits >> j) & 1) child = skip_from(child, level + 1);
            idx = child;
            r %= half;
            c %= half;
            size = half;
        }
    }

    CoordMatrix decode() const {
        std::vector<Coord> pairs;
        if (shape_.h == 0) {
            if (P_.get(0)) pairs.push_back({0, 0});
        } else {
            uint64_t idx = 0;
            decode_rec(idx, 0, 0, 0, shape_.side, pairs);
            if (idx != m_) throw std::runtime_error("DfTree: decode did not consume all blocks");
        }
        return CoordMatrix::from_pairs(n_, std::move(pairs));
    }

    std::vector<std::pair<std::string, uint64_t>> space_breakdown() const {
        return {{"P", P_.size()}};
    }

    uint64_t space_bits() const { return P_.size(); }

    bool operator==(const DfTree& o) const {
        return k_ == o.k_ && n_ == o.n_ && P_ == o.P_;
    }

private:
    void validate_walk() const {
        walk([](uint64_t, uint32_t, uint64_t) {});
    }

    void decode_rec(uint64_t& idx, uint32_t level, uint64_t r0, uint64_t c0, uint64_t size,
                    std::vector<Coord>& out) const {
        const uint64_t half = size / k_;
        const unsigned kk = k_ * k_;
        uint64_t bits = block_bits(idx);
        ++idx;
        for (unsigned i = 0; i < kk; ++i) {
            if (!((bits >> i) & 1)) continue;
            uint64_t r = r0 + (i / k_) * half;
            uint64_t c = c0 + (i % k_) * half;
            if (level + 1 == shape_.h) {
                if (r < n_ && c < n_) out.push_back({uint32_t(r), uint32_t(c)});
            } else {
                decode_rec(idx, level + 1, r, c, half, out);
            }
        }
    }

    uint32_t k_ = 2;
    uint64_t n_ = 0;
    PaddedShape shape_;
    BitSeq P_;
    uint64_t m_ = 0;  // block count (0 for the single-cell layout)
};

// The blocks of P are a permutation of the blocks of T.L: bucketing the DFS
// sequence by level restores the level-wise order.
inline CanonicalTree canonical_from_pdf(const DfTree& t) {
    if (t.height() == 0) {
        BitSeq L;
        L.push_back(t.bits().get(0));
        return CanonicalTree::from_parts(t.k(), t.n(), BitSeq(), std::move(L));
    }
    std::vector<std::vector<uint64_t>> buckets(t.height());
    t.walk([&](uint64_t, uint32_t level, uint64_t bits) { buckets[level].push_back(bits); });
    const unsigned kk = t.k() * t.k();
    BitSeq T, L;
    for (uint32_t lv = 0; lv + 1 < t.height(); ++lv)
        for (uint64_t b : buckets[lv]) T.append_bits(b, kk);
    for (uint64_t b : buckets[t.height() - 1]) L.append_bits(b, kk);
    return CanonicalTree::from_parts(t.k(), t.n(), std::move(T), std::move(L));
}

inline void pdf_emit(const CanonicalTree& t, uint64_t pos, uint32_t level,
                     std::vector<uint64_t>& out) {
    const unsigned kk = t.k() * t.k();
    uint64_t bits = t.block_at(pos);
    out.push_back(bits);
    if (level + 1 >= t.height()) return;
    for (unsigned i = 0; i < kk; ++i)
        if ((bits >> i) & 1) pdf_emit(t, t.child_pos(pos + i, 0), level + 1, out);
}

inline DfTree pdf_from_canonical(const CanonicalTree& t) {
    if (t.height() == 0) {
        BitSeq P;
        P.push_back(t.leaf_bits().get(0));
        return DfTree::from_bits(std::move(P), t.k(), t.n());
    }
    std::vector<uint64_t> blocks;
    blocks.reserve(t.concat_size() / (t.k() * t.k()));
    pdf_emit(t, 0, 0, blocks);
    return DfTree::from_blocks(blocks, t.k(), t.n());
}

}  // namespace k2df
