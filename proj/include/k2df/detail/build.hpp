#pragma once

// Shared construction machinery: recursive MX-quadtree partition of a sorted
// coordinate list into k^2-bit node blocks, emitted in depth-first pre-order.
// A node bit is 1 iff the corresponding submatrix contains a nonzero; the
// recursion descends only into nonzero children. The root block is always
// emitted, so an all-zero matrix yields a single zero block.

#include <array>
#include <cstdint>
#include <vector>

#include "../matrix.hpp"

namespace k2df::detail {

struct BlockForest {
    uint32_t k = 2;
    uint32_t h = 1;
    uint64_t n = 0;
    uint64_t side = 0;
    std::vector<uint64_t> blocks;  // DFS pre-order, one k^2-bit block per internal node
    std::vector<uint8_t> levels;   // owning node's level, 0 = root
};

class BlockBuilder {
public:
    BlockBuilder(const CoordMatrix& m, uint32_t k) : shape_(pad_shape(m.n, k)), k_(k) {
        coords_ = m.coords;
        scratch_.resize(coords_.size());
        out_.k = k;
        out_.h = shape_.h;
        out_.n = m.n;
        out_.side = shape_.side;
    }

    BlockForest run() {
        if (shape_.h == 0) return std::move(out_);  // single-cell matrix, no blocks
        rec(0, coords_.size(), 0, 0, shape_.side, 0);
        return std::move(out_);
    }

private:
    // Stable-partitions coords_[begin, end) into k^2 quadrant groups and
    // emits this node's block; recurses into nonzero children above the
    // leaf block level.
    void rec(size_t begin, size_t end, uint64_t r0, uint64_t c0, uint64_t size, uint32_t level) {
        const uint64_t half = size / k_;
        const uint32_t kk = k_ * k_;
        std::array<size_t, 65> cnt{};
        for (size_t i = begin; i < end; ++i) {
            const Coord& c = coords_[i];
            unsigned q = unsigned((c.row - r0) / half) * k_ + unsigned((c.col - c0) / half);
            ++cnt[q + 1];
        }
        std::array<size_t, 65> off{};
        for (uint32_t q = 0; q < kk; ++q) off[q + 1] = off[q] + cnt[q + 1];
        for (size_t i = begin; i < end; ++i) scratch_[i] = coords_[i];
        std::array<size_t, 64> cur{};
        for (uint32_t q = 0; q < kk; ++q) cur[q] = begin + off[q];
        for (size_t i = begin; i < end; ++i) {
            const Coord& c = scratch_[i];
            unsigned q = unsigned((c.row - r0) / half) * k_ + unsigned((c.col - c0) / half);
            coords_[cur[q]++] = c;
        }

        uint64_t bits = 0;
        for (uint32_t q = 0; q < kk; ++q)
            if (cnt[q + 1] > 0) bits |= uint64_t(1) << q;
        out_.blocks.push_back(bits);
        out_.levels.push_back(uint8_t(level));

        if (level + 1 >= out_.h) return;  // this was a leaf-level block
        for (uint32_t q = 0; q < kk; ++q) {
            if (cnt[q + 1] == 0) continue;
            uint64_t qr = r0 + (q / k_) * half;
            uint64_t qc = c0 + (q % k_) * half;
            rec(begin + off[q], begin + off[q] + cnt[q + 1], qr, qc, half, level + 1);
        }
    }

    PaddedShape shape_;
    uint32_t k_;
    std::vector<Coord> coords_;
    std::vector<Coord> scratch_;
    BlockForest out_;
};

inline BlockForest build_blocks(const CoordMatrix& m, uint32_t k) {
    return BlockBuilder(m, k).run();
}

}  // namespace k2df::detail
