#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ddbst/linalg.hpp"

namespace ddbst {

enum class SnapshotKind : std::uint8_t { Comp = 0, RealPlus, RealMinus, ImagPlus, ImagMinus };

std::string_view kind_name(SnapshotKind kind);
/// Inverse of kind_name; throws ParseError on unknown names.
SnapshotKind parse_kind(std::string_view name);

/// Identifier of one rank-one DDB projector.
///   Comp(t)                 |t>
///   RealPlus/RealMinus(j,k) (|j> +- |k>)/sqrt2
///   ImagPlus/ImagMinus(j,k) (|j> +- i|k>)/sqrt2
/// Pair kinds always carry j < k; Comp stores t in both fields.
struct SnapshotId {
    SnapshotKind kind = SnapshotKind::Comp;
    Index j = 0;
    Index k = 0;

    static SnapshotId comp(Index t) { return {SnapshotKind::Comp, t, t}; }
    static SnapshotId pair(SnapshotKind kind, Index j, Index k);

    bool is_comp() const { return kind == SnapshotKind::Comp; }
    bool valid_for(Index d) const;
    /// Throws InvalidParameter if the identifier is not valid in dimension d.
    void validate(Index d) const;

    friend auto operator<=>(const SnapshotId&, const SnapshotId&) = default;
};

std::string to_string(const SnapshotId& s);

/// 2d^2 - d.
std::uint64_t snapshot_count(Index d);
/// Dense index in [0, 2d^2 - d): Comp(t) -> t, pairs follow in (j,k)
/// lexicographic order with the four kinds interleaved.
std::uint64_t snapshot_index(const SnapshotId& s, Index d);
SnapshotId snapshot_from_index(std::uint64_t index, Index d);

std::vector<SnapshotId> enumerate_snapshots(Index d);

struct PairPartition {
    std::vector<std::pair<Index, Index>> pairs;
    std::optional<Index> leftover;
};

/// Round-robin (near-)1-factorization of K_d. Even d gives d-1 perfect
/// matchings; odd d gives d matchings, each missing exactly one element,
/// and every element is the leftover exactly once. The first partition is
/// always {(0,1), (2,3), ...}.
std::vector<PairPartition> build_partitions(Index d);

struct DDBasis {
    std::vector<SnapshotId> members;
    std::uint32_t weight_num = 1;
    std::uint32_t weight_den = 1;

    double weight() const { return static_cast<double>(weight_num) / weight_den; }
};

class DDBEnsemble {
public:
    DDBEnsemble(Index dim, std::vector<DDBasis> bases, std::vector<PairPartition> partitions);

    Index dim() const { return dim_; }
    const std::vector<DDBasis>& bases() const { return bases_; }
    const std::vector<PairPartition>& partitions() const { return partitions_; }
    std::size_t num_bases() const { return bases_.size(); }

    /// Total sampling weight carried by snapshot s (sum over containing bases).
    double prior_weight(const SnapshotId& s) const;

private:
    Index dim_;
    std::vector<DDBasis> bases_;
    std::vector<PairPartition> partitions_;
};

/// Even d: computational basis with weight 2/(2d) plus a real-phase and an
/// imaginary-phase basis per partition, each 1/(2d); 2d-1 bases in total.
/// Odd d: the two bases of each of the d partitions also carry the leftover
/// computational state; 2d bases of weight 1/(2d).
DDBEnsemble build_ensemble(Index d);

/// Amplitude vector of the snapshot state.
ComplexVector snapshot_vector(const SnapshotId& s, Index d);
/// Dense projector |s><s|.
ComplexMatrix snapshot_projector(const SnapshotId& s, Index d);

/// tr(X s) for an arbitrary square matrix using at most four entries of X.
Complex snapshot_trace(const ComplexMatrix& x, const SnapshotId& s);
/// tr(rho s) in O(1).
double snapshot_overlap(const DensityMatrix& rho, const SnapshotId& s);

/// O(1) draw: Comp(t) with probability 1/d^2, each pair snapshot 1/(2d^2).
SnapshotId draw_random_snapshot(Index d, RandomStream& rng);

} // namespace ddbst
