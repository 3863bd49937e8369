#pragma once

// Balanced-parenthesis k^2-tree: a DFS emits '(' on entering a node and ')'
// on leaving it; zero leaves become "()". An internal node at the last block
// level (h-1) is emitted as "(())" and its k^2 child bits go to the separate
// leaf array L2, so the pattern "(())" is in order-preserving one-to-one
// correspondence with the k^2-bit blocks of L2.
//
// Node count identity: with t nodes at levels 0..h-1 and lb = |L2|/k^2 leaf
// blocks, |B| = 2t + 2*lb. For n <= k the root itself is the level h-1
// internal node (B = "(())"); an all-zero matrix keeps the root internal, so
// its children appear as k^2 zero leaves.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "k2pdf.hpp"
#include "parens.hpp"

namespace k2df {

class BpTree {
public:
    BpTree() = default;

    static BpTree build(const CoordMatrix& m, uint32_t k) {
        return from_pdf(DfTree::build(m, k));
    }

    static BpTree from_pdf(const DfTree& df) {
        BpTree t;
        t.k_ = df.k();
        t.n_ = df.n();
        t.h_ = df.height();
        t.side_ = df.side();
        if (t.h_ == 0) {
            BitSeq b;
            b.push_back(true);
            b.push_back(false);
            t.B_ = ParenSeq(std::move(b));
            t.L2_.push_back(df.bits().get(0));
            t.pat_ = PatternIndex(t.B_);
            t.t_nodes_ = 1;
            return t;
        }
        BitSeq b;
        BitSeq l2;
        uint64_t idx = 0;
        t.emit(df, idx, 0, b, l2);
        if (idx != df.block_count()) throw std::runtime_error("BpTree: emission block mismatch");
        t.B_ = ParenSeq(std::move(b));
        t.L2_ = std::move(l2);
        t.pat_ = PatternIndex(t.B_);
        t.finish_counts();
        return t;
    }

    static BpTree from_parts(ParenSeq B, BitSeq L2, uint32_t k, uint64_t n) {
        BpTree t;
        t.k_ = k;
        t.n_ = n;
        PaddedShape s = pad_shape(n, k);
        t.h_ = s.h;
        t.side_ = s.side;
        t.B_ = std::move(B);
        t.L2_ = std::move(L2);
        t.pat_ = PatternIndex(t.B_);
        if (t.h_ == 0) {
            if (t.B_.size() != 2 || t.L2_.size() != 1)
                throw std::runtime_error("BpTree: bad single-cell layout");
            t.t_nodes_ = 1;
            return t;
        }
        t.finish_counts();
        // full structural check: the parse must consume B and L2 exactly
        t.to_pdf();
        return t;
    }

    uint32_t k() const { return k_; }
    uint64_t n() const { return n_; }
    uint32_t height() const { return h_; }
    uint64_t side() const { return side_; }
    const ParenSeq& parens() const { return B_; }
    const BitSeq& leaf_bits() const { return L2_; }
    const PatternIndex& pattern() const { return pat_; }
    uint64_t node_count() const { return t_nodes_; }
    uint64_t leaf_blocks() const { return h_ == 0 ? 0 : L2_.size() / (k_ * k_); }

    // Leaf block addressed by a "(())" occurrence starting at pos.
    std::pair<uint64_t, uint64_t> leaf_block_of(uint64_t pos) const {
        if (!pat_.is_start(pos))
            throw std::invalid_argument("leaf_block_of: not at a \"(())\" occurrence");
        uint64_t idx = pat_.rank(pos);
        return {idx, leaf_block(idx)};
    }

    uint64_t leaf_block(uint64_t idx) const {
        const unsigned kk = k_ * k_;
        return L2_.read_bits(idx * kk, kk);
    }

    bool get_cell(uint64_t r, uint64_t c) const {
        if (r >= n_ || c >= n_) throw std::out_of_range("get_cell: coordinate out of range");
        if (h_ == 0) return L2_.get(0);
        uint64_t pos = 0;
        uint64_t size = side_;
        for (uint32_t level = 0;; ++level) {
            uint64_t half = size / k_;
            unsigned q = unsigned(r / half) * k_ + unsigned(c / half);
            if (level + 1 == h_) {
                uint64_t bits = leaf_block(pat_.rank(pos));
                return (bits >> q) & 1;
            }
            // enter child q, skipping the preceding sibling subtrees
            uint64_t child = pos + 1;
            for (unsigned j = 0; j < q; ++j)
                child = B_.is_open(child + 1) ? B_.find_close(child) + 1 : child + 2;
            if (!B_.is_open(child + 1)) return false;  // "()" zero leaf
            pos = child;
            r %= half;
            c %= half;
            size = half;
        }
    }

    CoordMatrix decode() const { return to_pdf().decode(); }

    DfTree to_pdf() const {
        if (h_ == 0) {
            BitSeq p;
            p.push_back(L2_.get(0));
            return DfTree::from_bits(std::move(p), k_, n_);
        }
        std::vector<uint64_t> blocks;
        uint64_t pos = 0;
        parse(pos, 0, blocks);
        if (pos != B_.size()) throw std::runtime_error("BpTree: parse did not consume B");
        return DfTree::from_blocks(blocks, k_, n_);
    }

    std::vector<std::pair<std::string, uint64_t>> space_breakdown() const {
        return {{"B", B_.size()},
                {"L2", L2_.size()},
                {"paren_index", B_.aux_bytes() * 8},
                {"pattern_index", pat_.bytes() * 8}};
    }

    uint64_t space_bits() const {
        uint64_t total = 0;
        for (auto& [name, bits] : space_breakdown()) total += bits;
        return total;
    }

private:
    void emit(const DfTree& df, uint64_t& idx, uint32_t level, BitSeq& b, BitSeq& l2) const {
        const unsigned kk = k_ * k_;
        uint64_t bits = df.block_bits(idx);
        ++idx;
        if (level + 1 == h_) {
            // level h-1 internal node: "(())", children bits go to L2
            b.push_back(true);
            b.push_back(true);
            b.push_back(false);
            b.push_back(false);
            l2.append_bits(bits, kk);
            return;
        }
        b.push_back(true);
        for (unsigned i = 0; i < kk; ++i) {
            if ((bits >> i) & 1) {
                emit(df, idx, level + 1, b, l2);
            } else {
                b.push_back(true);
                b.push_back(false);
            }
        }
        b.push_back(false);
    }

    void parse(uint64_t& pos, uint32_t level, std::vector<uint64_t>& blocks) const {
        const unsigned kk = k_ * k_;
        size_t my = blocks.size();
        blocks.push_back(0);
        if (level + 1 == h_) {
            if (!(pat_.is_start(pos)))
                throw std::runtime_error("BpTree: expected \"(())\" at the leaf block level");
            blocks[my] = leaf_block(pat_.rank(pos));
            pos += 4;
            return;
        }
        if (pos >= B_.size() || !B_.is_open(pos)) throw std::runtime_error("BpTree: expected '('");
        ++pos;
        uint64_t bits = 0;
        for (unsigned i = 0; i < kk; ++i) {
            if (pos + 1 >= B_.size()) throw std::runtime_error("BpTree: truncated node");
            if (B_.is_open(pos) && !B_.is_open(pos + 1)) {
                pos += 2;  // zero leaf
            } else {
                bits |= uint64_t(1) << i;
                parse(pos, level + 1, blocks);
            }
        }
        if (pos >= B_.size() || B_.is_open(pos)) throw std::runtime_error("BpTree: expected ')'");
        ++pos;
        blocks[my] = bits;
    }

    void finish_counts() {
        const unsigned kk = k_ * k_;
        if (L2_.size() % kk != 0) throw std::runtime_error("BpTree: |L2| is not a multiple of k^2");
        uint64_t lb = L2_.size() / kk;
        if (pat_.count() != lb)
            throw std::runtime_error("BpTree: pattern occurrences do not match leaf blocks");
        if ((B_.size() - 2 * lb) % 2 != 0) throw std::runtime_error("BpTree: odd node count");
        t_nodes_ = (B_.size() - 2 * lb) / 2;
        if (B_.size() != 2 * t_nodes_ + 2 * lb)
            throw std::runtime_error("BpTree: length identity violated");
    }

    uint32_t k_ = 2;
    uint64_t n_ = 0;
    uint32_t h_ = 1;
    uint64_t side_ = 0;
    ParenSeq B_;
    BitSeq L2_;
    PatternIndex pat_;
    uint64_t t_nodes_ = 0;
};

}  // namespace k2df
