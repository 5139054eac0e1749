#include "ddbst/gf2.hpp"

namespace ddbst::gf2 {

int rank(std::vector<Bits> v) {
    int r = 0;
    for (int bit = 0; bit < 64; ++bit) {
        const Bits mask = Bits{1} << bit;
        std::size_t pivot = static_cast<std::size_t>(r);
        while (pivot < v.size() && !(v[pivot] & mask)) ++pivot;
        if (pivot == v.size()) continue;
        std::swap(v[static_cast<std::size_t>(r)], v[pivot]);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i != static_cast<std::size_t>(r) && (v[i] & mask)) v[i] ^= v[static_cast<std::size_t>(r)];
        }
        ++r;
    }
    return r;
}

std::optional<std::vector<Bits>> extend_to_basis(const std::vector<Bits>& cols, int n) {
    if (rank(cols) != static_cast<int>(cols.size())) return std::nullopt;
    std::vector<Bits> out = cols;
    for (int i = 0; i < n && static_cast<int>(out.size()) < n; ++i) {
        out.push_back(Bits{1} << i);
        if (rank(out) != static_cast<int>(out.size())) out.pop_back();
    }
    return out;
}

std::optional<std::vector<Bits>> inverse_rows(const std::vector<Bits>& cols, int n) {
    if (static_cast<int>(cols.size()) != n) return std::nullopt;
    // Row-reduce [A | I] with A's rows built from the columns.
    std::vector<Bits> a(static_cast<std::size_t>(n), 0), inv(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if ((cols[static_cast<std::size_t>(j)] >> i) & 1u) a[static_cast<std::size_t>(i)] |= Bits{1} << j;
        }
    }
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i)] = Bits{1} << i;
    for (int c = 0; c < n; ++c) {
        const Bits mask = Bits{1} << c;
        int p = c;
        while (p < n && !(a[static_cast<std::size_t>(p)] & mask)) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(p)]);
        std::swap(inv[static_cast<std::size_t>(c)], inv[static_cast<std::size_t>(p)]);
        for (int i = 0; i < n; ++i) {
            if (i != c && (a[static_cast<std::size_t>(i)] & mask)) {
                a[static_cast<std::size_t>(i)] ^= a[static_cast<std::size_t>(c)];
                inv[static_cast<std::size_t>(i)] ^= inv[static_cast<std::size_t>(c)];
            }
        }
    }
    return inv;
}

} // namespace ddbst::gf2
