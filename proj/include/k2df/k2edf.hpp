#pragma once

// Enriched depth-first k^2-tree: the PDF block array P plus a byte sequence S
// of skip records, so large subtrees can be jumped without scanning.
//
// A node owns a record iff its subtree is larger than tau blocks. The record
// holds one (p_blocks, s_bytes) varint pair per internal child except the
// last, in child order: p_blocks is the child's subtree size in blocks and
// s_bytes the total size of the records owned inside that child, so the P and
// S cursors advance in lockstep. The last child's size is derived as
// parent_size - 1 - sum(stored sizes). Records sit in S in DFS order of their
// owners; ownership stays decidable during navigation because the parent's
// record (or the root_blocks header) supplies every subtree size that can
// exceed tau.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "k2pdf.hpp"

namespace k2df {

struct EdfCursor {
    uint64_t block = 0;
    uint32_t level = 0;
    uint64_t soff = 0;        // offset of this node's record in S, when owned
    uint64_t size_blocks = 0; // subtree size in blocks
};

class EdfTree {
public:
    static constexpr uint64_t tau_auto = ~uint64_t(0);

    EdfTree() = default;

    static EdfTree build(const CoordMatrix& m, uint32_t k, uint64_t tau = tau_auto) {
        return from_pdf(DfTree::build(m, k), tau);
    }

    static EdfTree from_pdf(DfTree df, uint64_t tau = tau_auto) {
        EdfTree t;
        t.df_ = std::move(df);
        t.root_blocks_ = t.df_.block_count();
        if (tau == tau_auto) tau = uint64_t(std::ceil(std::sqrt(double(t.root_blocks_))));
        t.tau_ = tau;
        if (t.df_.height() > 0) t.build_records();
        return t;
    }

    static EdfTree from_parts(BitSeq P, std::vector<uint8_t> S, uint32_t k, uint64_t n,
                              uint64_t tau, uint64_t root_blocks) {
        EdfTree t;
        t.df_ = DfTree::from_bits(std::move(P), k, n);
        t.tau_ = tau;
        t.root_blocks_ = root_blocks;
        t.S_ = std::move(S);
        if (root_blocks != t.df_.block_count())
            throw std::runtime_error("EdfTree: root block count mismatch");
        // regenerating the records must reproduce S exactly
        std::vector<uint8_t> regen = std::move(t.S_);
        t.S_.clear();
        if (t.df_.height() > 0) t.build_records();
        if (regen != t.S_) throw std::runtime_error("EdfTree: skip records are inconsistent with P");
        return t;
    }

    const DfTree& pdf() const { return df_; }
    DfTree strip() const { return df_; }
    uint32_t k() const { return df_.k(); }
    uint64_t n() const { return df_.n(); }
    uint32_t height() const { return df_.height(); }
    uint64_t tau() const { return tau_; }
    uint64_t root_blocks() const { return root_blocks_; }
    const std::vector<uint8_t>& skip_bytes() const { return S_; }

    EdfCursor root_cursor() const { return EdfCursor{0, 0, 0, root_blocks_}; }

    bool owned(const EdfCursor& cur) const { return cur.size_blocks > tau_; }

    // Cursor for child i of the internal node at `cur`. Advances P by the
    // sizes of the preceding internal siblings (from the record when owned,
    // by depth-tracked scan otherwise) and S by their record-segment sizes.
    EdfCursor child_cursor(const EdfCursor& cur, unsigned i) const {
        const unsigned kk = df_.k() * df_.k();
        if (i >= kk) throw std::invalid_argument("child_cursor: child index out of range");
        if (cur.level + 1 >= df_.height())
            throw std::invalid_argument("child_cursor: node has no child blocks");
        uint64_t bits = df_.block_bits(cur.block);
        if (!((bits >> i) & 1)) throw std::invalid_argument("child_cursor: child is a zero leaf");
        EdfCursor out[64];
        unsigned count = children(cur, out);
        unsigned nth = 0;
        for (unsigned j = 0; j < i; ++j)
            if ((bits >> j) & 1) ++nth;
        (void)count;
        return out[nth];
    }

    // All internal-child cursors of `cur`, in child order; returns how many.
    unsigned children(const EdfCursor& cur, EdfCursor* out) const {
        uint64_t bits = df_.block_bits(cur.block);
        unsigned nint = unsigned(std::popcount(bits));
        uint32_t clevel = cur.level + 1;
        uint64_t block = cur.block + 1;
        if (nint == 0) return 0;
        if (owned(cur)) {
            size_t pos = cur.soff;
            std::span<const uint8_t> s(S_);
            uint64_t sum_sizes = 0;
            uint64_t sizes[64], sbytes[64];
            for (unsigned j = 0; j + 1 < nint; ++j) {
                sizes[j] = varuint_decode(s, pos);
                sbytes[j] = varuint_decode(s, pos);
                sum_sizes += sizes[j];
            }
            sizes[nint - 1] = cur.size_blocks - 1 - sum_sizes;
            sbytes[nint - 1] = 0;  // never needed: nothing is skipped past the last child
            uint64_t soff = pos;   // records of the children follow the owner's record
            for (unsigned j = 0; j < nint; ++j) {
                out[j] = EdfCursor{block, clevel, soff, sizes[j]};
                block += sizes[j];
                soff += sbytes[j];
            }
        } else {
            // small subtree: all descendants fit under tau, no records inside
            uint64_t consumed = 1;
            for (unsigned j = 0; j < nint; ++j) {
                uint64_t next = j + 1 < nint ? df_.skip_from(block, clevel)
                                             : cur.block + cur.size_blocks;
                out[j] = EdfCursor{block, clevel, cur.soff, next - block};
                consumed += next - block;
                block = next;
            }
            if (consumed != cur.size_blocks)
                throw std::runtime_error("EdfTree: scanned subtree size mismatch");
        }
        return nint;
    }

    bool get_cell(uint64_t r, uint64_t c) const {
        if (r >= df_.n() || c >= df_.n()) throw std::out_of_range("get_cell: coordinate out of range");
        if (df_.height() == 0) return df_.bits().get(0);
        EdfCursor cur = root_cursor();
        uint64_t size = df_.side();
        for (uint32_t level = 0;; ++level) {
            uint64_t bits = df_.block_bits(cur.block);
            uint64_t half = size / df_.k();
            unsigned q = unsigned(r / half) * df_.k() + unsigned(c / half);
            if (!((bits >> q) & 1)) return false;
            if (level + 1 == df_.height()) return true;
            cur = child_cursor(cur, q);
            r %= half;
            c %= half;
            size = half;
        }
    }

    CoordMatrix decode() const {
        std::vector<Coord> pairs;
        if (df_.height() == 0) {
            if (df_.bits().get(0)) pairs.push_back({0, 0});
        } else {
            decode_rec(root_cursor(), 0, 0, df_.side(), pairs);
        }
        return CoordMatrix::from_pairs(df_.n(), std::move(pairs));
    }

    std::vector<std::pair<std::string, uint64_t>> space_breakdown() const {
        return {{"P", df_.bits().size()}, {"S", S_.size() * 8}, {"headers", 128}};
    }

    uint64_t space_bits() const { return df_.bits().size() + S_.size() * 8 + 128; }

private:
    void build_records() {
        uint64_t m = df_.block_count();
        sizes_tmp_.assign(m, 0);
        sbytes_tmp_.assign(m, 0);
        uint64_t idx = 0;
        compute_sizes(idx, 0);
        idx = 0;
        compute_sbytes(idx, 0);
        idx = 0;
        emit_records(idx, 0);
        sizes_tmp_.clear();
        sizes_tmp_.shrink_to_fit();
        sbytes_tmp_.clear();
        sbytes_tmp_.shrink_to_fit();
    }

    uint64_t compute_sizes(uint64_t& idx, uint32_t level) {
        uint64_t my = idx++;
        uint64_t s = 1;
        uint64_t bits = df_.block_bits(my);
        if (level + 1 < df_.height()) {
            const unsigned kk = df_.k() * df_.k();
            for (unsigned i = 0; i < kk; ++i)
                if ((bits >> i) & 1) s += compute_sizes(idx, level + 1);
        }
        sizes_tmp_[my] = s;
        return s;
    }

    uint64_t compute_sbytes(uint64_t& idx, uint32_t level) {
        uint64_t my = idx++;
        uint64_t bits = df_.block_bits(my);
        uint64_t inside = 0;
        uint64_t child_size[64], child_sb[64];
        unsigned nint = 0;
        if (level + 1 < df_.height()) {
            const unsigned kk = df_.k() * df_.k();
            for (unsigned i = 0; i < kk; ++i) {
                if (!((bits >> i) & 1)) continue;
                child_size[nint] = sizes_tmp_[idx];
                child_sb[nint] = compute_sbytes(idx, level + 1);
                inside += child_sb[nint];
                ++nint;
            }
        }
        uint64_t reclen = 0;
        if (sizes_tmp_[my] > tau_ && nint >= 1) {
            for (unsigned j = 0; j + 1 < nint; ++j)
                reclen += varuint_len(child_size[j]) + varuint_len(child_sb[j]);
        }
        sbytes_tmp_[my] = reclen + inside;
        return sbytes_tmp_[my];
    }

    void emit_records(uint64_t& idx, uint32_t level) {
        uint64_t my = idx++;
        uint64_t bits = df_.block_bits(my);
        if (level + 1 >= df_.height()) return;
        const unsigned kk = df_.k() * df_.k();
        uint64_t child_idx[64];
        unsigned nint = 0;
        {
            uint64_t scan = my + 1;
            for (unsigned i = 0; i < kk; ++i) {
                if (!((bits >> i) & 1)) continue;
                child_idx[nint++] = scan;
                scan += sizes_tmp_[scan];
            }
        }
        if (sizes_tmp_[my] > tau_ && nint >= 1) {
            uint64_t sum = 0;
            for (unsigned j = 0; j + 1 < nint; ++j) {
                varuint_encode(sizes_tmp_[child_idx[j]], S_);
                varuint_encode(sbytes_tmp_[child_idx[j]], S_);
                sum += sizes_tmp_[child_idx[j]];
            }
            uint64_t derived_last = sizes_tmp_[child_idx[nint - 1]];
            if (sum + derived_last + 1 != sizes_tmp_[my])
                throw std::logic_error("EdfTree: subtree sizes do not sum up");
        }
        for (unsigned j = 0; j < nint; ++j) {
            uint64_t c = child_idx[j];
            emit_records(c, level + 1);
        }
    }

    void decode_rec(const EdfCursor& cur, uint64_t r0, uint64_t c0, uint64_t size,
                    std::vector<Coord>& out) const {
        const unsigned kk = df_.k() * df_.k();
        const uint64_t half = size / df_.k();
        uint64_t bits = df_.block_bits(cur.block);
        if (cur.level + 1 == df_.height()) {
            for (unsigned i = 0; i < kk; ++i) {
                if (!((bits >> i) & 1)) continue;
                uint64_t r = r0 + (i / df_.k()) * half;
                uint64_t c = c0 + (i % df_.k()) * half;
                if (r < df_.n() && c < df_.n()) out.push_back({uint32_t(r), uint32_t(c)});
            }
            return;
        }
        EdfCursor kids[64];
        unsigned nint = children(cur, kids);
        unsigned j = 0;
        for (unsigned i = 0; i < kk; ++i) {
            if (!((bits >> i) & 1)) continue;
            uint64_t r = r0 + (i / df_.k()) * half;
            uint64_t c = c0 + (i % df_.k()) * half;
            decode_rec(kids[j++], r, c, half, out);
        }
        (void)nint;
    }

    DfTree df_;
    std::vector<uint8_t> S_;
    uint64_t tau_ = 0;
    uint64_t root_blocks_ = 0;
    std::vector<uint64_t> sizes_tmp_, sbytes_tmp_;  // build-time scratch
};

}  // namespace k2df
