#pragma once

#include <cstdint>
#include <optional>
#include <vector>

// Binary-field linear algebra on bit-packed vectors: a vector of length
// n <= 64 is a std::uint64_t with component i in bit i. Matrices are stored
// as a list of column masks.
namespace ddbst::gf2 {

using Bits = std::uint64_t;

inline int parity(Bits x) { return __builtin_parityll(x); }

/// A x where A has the given columns.
inline Bits apply_columns(const std::vector<Bits>& cols, Bits x) {
    Bits out = 0;
    for (std::size_t a = 0; a < cols.size(); ++a) {
        if ((x >> a) & 1u) out ^= cols[a];
    }
    return out;
}

/// A x where A has the given rows.
inline Bits apply_rows(const std::vector<Bits>& rows, Bits x) {
    Bits out = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) out |= static_cast<Bits>(parity(rows[i] & x)) << i;
    return out;
}

int rank(std::vector<Bits> vectors);

/// Appends unit vectors to `cols` (n-bit columns, linearly independent)
/// until they form a basis of the n-dimensional space. Returns nullopt if
/// the input columns are dependent.
std::optional<std::vector<Bits>> extend_to_basis(const std::vector<Bits>& cols, int n);

/// Inverse of the n x n matrix with the given columns, returned as rows.
/// nullopt when singular.
std::optional<std::vector<Bits>> inverse_rows(const std::vector<Bits>& cols, int n);

} // namespace ddbst::gf2
