#pragma once

// Sparse binary matrix model: sorted coordinate lists, edge-list I/O,
// reproducible random generation, padding arithmetic and a dense oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace k2df {

struct Coord {
    uint32_t row = 0;
    uint32_t col = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord& a, const Coord& b) {
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.col <=> b.col;
    }
};

// Square binary matrix as a sorted, deduplicated row-major coordinate list.
struct CoordMatrix {
    uint64_t n = 0;
    std::vector<Coord> coords;

    uint64_t nnz() const { return coords.size(); }

    static CoordMatrix from_pairs(uint64_t n, std::vector<Coord> pairs) {
        if (n == 0) throw std::invalid_argument("CoordMatrix: n must be positive");
        for (const Coord& c : pairs) {
            if (c.row >= n || c.col >= n)
                throw std::invalid_argument("CoordMatrix: coordinate out of range");
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        return CoordMatrix{n, std::move(pairs)};
    }

    bool operator==(const CoordMatrix& o) const { return n == o.n && coords == o.coords; }
};

// Tree shape induced by padding an n x n matrix to the next power of k.
struct PaddedShape {
    uint32_t k = 2;
    uint32_t h = 0;       // tree height, ceil(log_k n)
    uint64_t side = 1;    // k^h
};

inline PaddedShape pad_shape(uint64_t n, uint32_t k) {
    if (k < 2 || k > 8) throw std::invalid_argument("pad_shape: k must be in [2, 8]");
    if (n == 0) throw std::invalid_argument("pad_shape: n must be positive");
    PaddedShape s;
    s.k = k;
    s.h = 0;
    s.side = 1;
    while (s.side < n) {
        s.side *= k;
        ++s.h;
    }
    return s;
}

// Edge-list text format: first line "n nnz", then nnz lines "row col"
// (0-based). MatrixMarket pattern files are accepted as well: '%' comment
// lines are skipped, the size line is "rows cols nnz" and indices are 1-based.
inline CoordMatrix load_edgelist(std::istream& is) {
    std::string line;
    size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
    };

    uint64_t n = 0, declared = 0;
    bool one_based = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        uint64_t a, b, c;
        if (!(ls >> a >> b)) fail("malformed size line");
        if (ls >> c) {
            if (a != b) fail("only square matrices are supported");
            n = a;
            declared = c;
            one_based = true;
        } else {
            n = a;
            declared = b;
        }
        break;
    }
    if (n == 0) throw std::runtime_error("line " + std::to_string(lineno) + ": empty or missing header");

    std::vector<Coord> pairs;
    pairs.reserve(declared);
    uint64_t seen = 0;
    while (seen < declared) {
        if (!std::getline(is, line)) {
            ++lineno;
            fail("expected " + std::to_string(declared) + " entries, got " + std::to_string(seen));
        }
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        int64_t r, c;
        if (!(ls >> r >> c)) fail("malformed entry");
        if (one_based) {
            if (r < 1 || c < 1) fail("1-based coordinate below 1");
            --r;
            --c;
        }
        if (r < 0 || c < 0 || uint64_t(r) >= n || uint64_t(c) >= n) fail("coordinate out of range");
        pairs.push_back({uint32_t(r), uint32_t(c)});
        ++seen;
    }
    return CoordMatrix::from_pairs(n, std::move(pairs));
}

inline void save_edgelist(std::ostream& os, const CoordMatrix& m) {
    os << m.n << ' ' << m.nnz() << '\n';
    for (const Coord& c : m.coords) os << c.row << ' ' << c.col << '\n';
}

// Exactly round(density * n^2) distinct cells, sampled uniformly without
// replacement; deterministic for a given seed.
inline CoordMatrix random_matrix(uint64_t n, double density, uint64_t seed) {
    if (density < 0.0 || density > 1.0) throw std::invalid_argument("random_matrix: density in [0,1]");
    uint64_t cells = n * n;
    uint64_t target = uint64_t(std::llround(density * double(cells)));
    std::vector<Coord> pairs;
    if (target == cells) {
        pairs.reserve(cells);
        for (uint64_t r = 0; r < n; ++r)
            for (uint64_t c = 0; c < n; ++c) pairs.push_back({uint32_t(r), uint32_t(c)});
        return CoordMatrix{n, std::move(pairs)};
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint64_t> dist(0, cells - 1);
    bool complement = target > cells / 2;
    uint64_t picks = complement ? cells - target : target;
    std::unordered_set<uint64_t> chosen;
    chosen.reserve(picks * 2);
    while (chosen.size() < picks) chosen.insert(dist(rng));
    pairs.reserve(target);
    if (complement) {
        for (uint64_t id = 0; id < cells; ++id)
            if (!chosen.count(id)) pairs.push_back({uint32_t(id / n), uint32_t(id % n)});
    } else {
        for (uint64_t id : chosen) pairs.push_back({uint32_t(id / n), uint32_t(id % n)});
    }
    return CoordMatrix::from_pairs(n, std::move(pairs));
}

// Dense n x n boolean grid, one 64-bit word per 64 columns. Brute-force
// reference for every equivalence test; independent of the tree code paths.
class DenseOracle {
public:
    DenseOracle() = default;

    explicit DenseOracle(const CoordMatrix& m) : n_(m.n), stride_((m.n + 63) / 64) {
        bits_.assign(n_ * stride_, 0);
        for (const Coord& c : m.coords) set(c.row, c.col);
    }

    static DenseOracle zeros(uint64_t n) {
        DenseOracle d;
        d.n_ = n;
        d.stride_ = (n + 63) / 64;
        d.bits_.assign(d.n_ * d.stride_, 0);
        return d;
    }

    uint64_t n() const { return n_; }

    bool at(uint64_t r, uint64_t c) const {
        return (bits_[r * stride_ + c / 64] >> (c % 64)) & 1;
    }

    void set(uint64_t r, uint64_t c) {
        bits_[r * stride_ + c / 64] |= uint64_t(1) << (c % 64);
    }

    // Boolean matrix product, O(n^2 * n/64).
    DenseOracle multiply(const DenseOracle& o) const {
        DenseOracle out = zeros(n_);
        for (uint64_t r = 0; r < n_; ++r) {
            const uint64_t* arow = &bits_[r * stride_];
            uint64_t* crow = &out.bits_[r * stride_];
            for (uint64_t wb = 0; wb < stride_; ++wb) {
                uint64_t w = arow[wb];
                while (w) {
                    uint64_t l = wb * 64 + uint64_t(std::countr_zero(w));
                    w &= w - 1;
                    const uint64_t* brow = &o.bits_[l * stride_];
                    for (uint64_t j = 0; j < stride_; ++j) crow[j] |= brow[j];
                }
            }
        }
        return out;
    }

    DenseOracle bool_or(const DenseOracle& o) const {
        DenseOracle out = *this;
        for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] |= o.bits_[i];
        return out;
    }

    CoordMatrix to_coords() const {
        std::vector<Coord> pairs;
        for (uint64_t r = 0; r < n_; ++r)
            for (uint64_t c = 0; c < n_; ++c)
                if (at(r, c)) pairs.push_back({uint32_t(r), uint32_t(c)});
        return CoordMatrix{n_, std::move(pairs)};
    }

    bool operator==(const DenseOracle& o) const {
        return n_ == o.n_ && bits_ == o.bits_;
    }

private:
    uint64_t n_ = 0;
    uint64_t stride_ = 0;
    std::vector<uint64_t> bits_;
};

}  // namespace k2df
