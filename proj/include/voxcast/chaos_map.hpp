#ifndef VOXCAST_CHAOS_MAP_HPP
#define VOXCAST_CHAOS_MAP_HPP

// Integer modular maps used as permutation-table generators.
//
// A transform matrix is built as an ordered product of elementary factors
// T(i,j): the identity with a 2x2 block placed at rows/columns (i,j).  The
// induced map x -> A*x mod 2^N0 on (Z/2^N0)^n is a bijection whenever the
// block determinant is a unit, and enumerating it in serial-number order
// yields a scrambling table over [0, 2^(n*N0)).

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace voxcast {

// Ordered list of factor pairs plus the 2x2 block entries.  The order of the
// pairs is the key: different orders generally give different matrices.
struct FactorOrder {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;     // 1-based, i < j
    std::array<std::int64_t, 4> block{1, 1, 1, 2};  // A11, A12, A21, A22

    // All pairs (i,j), i<j, in lexicographic order.
    static FactorOrder canonical(int n);
};

class TransformMatrix {
public:
    TransformMatrix() = default;
    explicit TransformMatrix(int n);
    static TransformMatrix identity(int n);

    int dim() const { return n_; }
    std::int64_t at(int r, int c) const { return m_[static_cast<std::size_t>(r) * n_ + c]; }
    std::int64_t& at(int r, int c) { return m_[static_cast<std::size_t>(r) * n_ + c]; }

    bool operator==(const TransformMatrix&) const = default;

private:
    int n_ = 0;
    std::vector<std::int64_t> m_;
};

// Left-to-right product of the T factors in pair-list order.  Throws
// std::invalid_argument on duplicate/out-of-range/missing pairs or a
// non-unimodular block, std::overflow_error if a product entry would not
// fit in 64 bits.
TransformMatrix build_transform_matrix(const FactorOrder& order);

// State vector of the modular map; each coordinate lies in [0, 2^n0).
using MapState = std::vector<std::uint32_t>;

// y_i = (row_i(m) . x) mod 2^n0
MapState iterate_mod_map(const MapState& x, const TransformMatrix& m, int n0);

// Serial number S = sum_i x_i * 2^(n*n0 - n0*i); x_1 is most significant.
std::uint32_t pack_index(const MapState& x, int n0);
MapState unpack_index(std::uint32_t s, int n, int n0);

struct PriorityPermutation {
    std::vector<int> alpha;  // 1-based permutation of {1..n}

    static PriorityPermutation identity(int n);
    void validate(int n) const;
};

struct PermutationTable {
    int n = 0;
    int n0 = 0;
    std::vector<std::uint16_t> table;  // size 2^(n*n0)

    std::size_t size() const { return table.size(); }
    std::uint16_t operator[](std::size_t s) const { return table[s]; }

    // Inverse bijection (inverse[table[s]] == s).
    PermutationTable inverted() const;
    bool is_bijection() const;

    static PermutationTable identity(int n, int n0);
};

// table[S] = sum_i y_{alpha_i} * 2^(n*n0 - n0*i) with y = A*unpack(S) mod 2^n0.
PermutationTable generate_table(const TransformMatrix& m, int n0,
                                const PriorityPermutation& alpha);

// Byte-exact table dumps (little-endian 16-bit indices) for golden tests.
void save_table(const std::string& path, const PermutationTable& table);
PermutationTable load_table(const std::string& path, int n, int n0);

}  // namespace voxcast

#endif
