#include "voxcast/chaos_map.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace voxcast {

FactorOrder FactorOrder::canonical(int n) {
    FactorOrder o;
    o.n = n;
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
            o.pairs.emplace_back(i, j);
    return o;
}

TransformMatrix::TransformMatrix(int n)
    : n_(n), m_(static_cast<std::size_t>(n) * n, 0) {}

TransformMatrix TransformMatrix::identity(int n) {
    TransformMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("transform matrix entry overflows 64 bits");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("transform matrix entry overflows 64 bits");
    return r;
}

// right-multiply m by T(i,j): only columns i and j change
void apply_factor(TransformMatrix& m, int i, int j,
                  const std::array<std::int64_t, 4>& b) {
    const int n = m.dim();
    for (int r = 0; r < n; ++r) {
        const std::int64_t ci = m.at(r, i);
        const std::int64_t cj = m.at(r, j);
        m.at(r, i) = checked_add(checked_mul(ci, b[0]), checked_mul(cj, b[2]));
        m.at(r, j) = checked_add(checked_mul(ci, b[1]), checked_mul(cj, b[3]));
    }
}

}  // namespace

TransformMatrix build_transform_matrix(const FactorOrder& order) {
    const int n = order.n;
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");

    const std::int64_t det = order.block[0] * order.block[3] - order.block[1] * order.block[2];
    if (det != 1 && det != -1)
        throw std::invalid_argument("block parameters must be unimodular");

    const std::size_t expected = static_cast<std::size_t>(n) * (n - 1) / 2;
    if (order.pairs.size() != expected)
        throw std::invalid_argument("expected " + std::to_string(expected) + " factor pairs, got " +
                                    std::to_string(order.pairs.size()));

    std::vector<bool> seen(expected, false);
    for (const auto& [i, j] : order.pairs) {
        if (i < 1 || j <= i || j > n)
            throw std::invalid_argument("factor pair out of range");
        // index of {i,j} in lexicographic pair order
        const std::size_t idx = static_cast<std::size_t>(i - 1) * n - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i - 1);
        if (seen[idx]) throw std::invalid_argument("duplicate factor pair");
        seen[idx] = true;
    }

    TransformMatrix m = TransformMatrix::identity(n);
    for (const auto& [i, j] : order.pairs)
        apply_factor(m, i - 1, j - 1, order.block);
    return m;
}

MapState iterate_mod_map(const MapState& x, const TransformMatrix& m, int n0) {
    const int n = m.dim();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("state dimension does not match matrix");
    const std::uint64_t mod = std::uint64_t{1} << n0;

    MapState y(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        std::uint64_t acc = 0;
        for (int c = 0; c < n; ++c)
            acc += (static_cast<std::uint64_t>(m.at(r, c)) % mod) * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(acc % mod);
    }
    return y;
}

std::uint32_t pack_index(const MapState& x, int n0) {
    const int n = static_cast<int>(x.size());
    std::uint32_t s = 0;
    for (int i = 0; i < n; ++i)
        s |= x[static_cast<std::size_t>(i)] << (n0 * (n - 1 - i));
    return s;
}

MapState unpack_index(std::uint32_t s, int n, int n0) {
    const std::uint32_t mask = (1u << n0) - 1;
    const int bits = n * n0;
    if (bits < 32 && (s >> bits))
        throw std::invalid_argument("serial number out of range");
    MapState x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = (s >> (n0 * (n - 1 - i))) & mask;
    return x;
}

PriorityPermutation PriorityPermutation::identity(int n) {
    PriorityPermutation p;
    p.alpha.resize(static_cast<std::size_t>(n));
    std::iota(p.alpha.begin(), p.alpha.end(), 1);
    return p;
}

void PriorityPermutation::validate(int n) const {
    if (static_cast<int>(alpha.size()) != n)
        throw std::invalid_argument("alpha length does not match dimension");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int a : alpha) {
        if (a < 1 || a > n || seen[static_cast<std::size_t>(a - 1)])
            throw std::invalid_argument("alpha is not a permutation of 1..n");
        seen[static_cast<std::size_t>(a - 1)] = true;
    }
}

PermutationTable PermutationTable::inverted() const {
    PermutationTable inv;
    inv.n = n;
    inv.n0 = n0;
    inv.table.assign(table.size(), 0);
    for (std::size_t s = 0; s < table.size(); ++s)
        inv.table[table[s]] = static_cast<std::uint16_t>(s);
    return inv;
}

bool PermutationTable::is_bijection() const {
    std::vector<bool> seen(table.size(), false);
    for (std::uint16_t v : table) {
        if (v >= table.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

PermutationTable PermutationTable::identity(int n, int n0) {
    PermutationTable t;
    t.n = n;
    t.n0 = n0;
    t.table.resize(std::size_t{1} << (n * n0));
    std::iota(t.table.begin(), t.table.end(), 0);
    return t;
}

PermutationTable generate_table(const TransformMatrix& m, int n0,
                                const PriorityPermutation& alpha) {
    const int n = m.dim();
    alpha.validate(n);
    if (n * n0 > 16)
        throw std::invalid_argument("table would exceed 16-bit indices");

    PermutationTable t;
    t.n = n;
    t.n0 = n0;
    const std::size_t size = std::size_t{1} << (n * n0);
    t.table.resize(size);

    // reduce the matrix once; only residues matter
    const std::uint64_t mod = std::uint64_t{1} << n0;
    std::vector<std::uint32_t> mr(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            mr[static_cast<std::size_t>(r) * n + c] =
                static_cast<std::uint32_t>(static_cast<std::uint64_t>(m.at(r, c)) % mod);

    MapState x(static_cast<std::size_t>(n), 0);
    MapState y(static_cast<std::size_t>(n), 0);
    for (std::size_t s = 0; s < size; ++s) {
        const std::uint32_t mask = (1u << n0) - 1;
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = (static_cast<std::uint32_t>(s) >> (n0 * (n - 1 - i))) & mask;
        for (int r = 0; r < n; ++r) {
            std::uint64_t acc = 0;
            for (int c = 0; c < n; ++c)
                acc += mr[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
            y[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(acc % mod);
        }
        std::uint32_t e = 0;
        for (int i = 0; i < n; ++i)
            e |= y[static_cast<std::size_t>(alpha.alpha[static_cast<std::size_t>(i)] - 1)]
                 << (n0 * (n - 1 - i));
        t.table[s] = static_cast<std::uint16_t>(e);
    }
    return t;
}

void save_table(const std::string& path, const PermutationTable& table) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    for (std::uint16_t v : table.table) {
        const char le[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
        f.write(le, 2);
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

PermutationTable load_table(const std::string& path, int n, int n0) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    PermutationTable t;
    t.n = n;
    t.n0 = n0;
    const std::size_t size = std::size_t{1} << (n * n0);
    t.table.resize(size);
    for (std::size_t s = 0; s < size; ++s) {
        char le[2];
        f.read(le, 2);
        t.table[s] = static_cast<std::uint16_t>(static_cast<std::uint8_t>(le[0]) |
                                                (static_cast<std::uint8_t>(le[1]) << 8));
    }
    if (!f) throw std::runtime_error(path + ": truncated table");
    return t;
}

}  // namespace voxcast
