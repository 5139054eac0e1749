#include "ddbst/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace ddbst {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint64_t pair_rank(Index j, Index k, Index d) {
    const auto uj = static_cast<std::uint64_t>(j);
    const auto ud = static_cast<std::uint64_t>(d);
    return uj * ud - uj * (uj + 1) / 2 + static_cast<std::uint64_t>(k - j - 1);
}

} // namespace

std::string_view kind_name(SnapshotKind kind) {
    switch (kind) {
    case SnapshotKind::Comp: return "Comp";
    case SnapshotKind::RealPlus: return "RealPlus";
    case SnapshotKind::RealMinus: return "RealMinus";
    case SnapshotKind::ImagPlus: return "ImagPlus";
    case SnapshotKind::ImagMinus: return "ImagMinus";
    }
    return "?";
}

SnapshotKind parse_kind(std::string_view name) {
    for (auto kind : {SnapshotKind::Comp, SnapshotKind::RealPlus, SnapshotKind::RealMinus,
                      SnapshotKind::ImagPlus, SnapshotKind::ImagMinus}) {
        if (kind_name(kind) == name) return kind;
    }
    throw ParseError("unknown snapshot kind '" + std::string(name) + "'");
}

SnapshotId SnapshotId::pair(SnapshotKind kind, Index j, Index k) {
    if (kind == SnapshotKind::Comp) {
        throw InvalidParameter("SnapshotId::pair called with Comp kind");
    }
    if (!(j < k)) {
        throw InvalidParameter("pair snapshot requires j < k");
    }
    return {kind, j, k};
}

bool SnapshotId::valid_for(Index d) const {
    if (kind == SnapshotKind::Comp) return j == k && j >= 0 && j < d;
    return j >= 0 && j < k && k < d;
}

void SnapshotId::validate(Index d) const {
    if (!valid_for(d)) {
        throw InvalidParameter("snapshot " + to_string(*this) + " is invalid for dimension " +
                               std::to_string(d));
    }
}

std::string to_string(const SnapshotId& s) {
    std::string out(kind_name(s.kind));
    out += '(';
    out += std::to_string(s.j);
    if (!s.is_comp()) {
        out += ',';
        out += std::to_string(s.k);
    }
    out += ')';
    return out;
}

std::uint64_t snapshot_count(Index d) {
    const auto ud = static_cast<std::uint64_t>(d);
    return 2 * ud * ud - ud;
}

std::uint64_t snapshot_index(const SnapshotId& s, Index d) {
    s.validate(d);
    if (s.is_comp()) return static_cast<std::uint64_t>(s.j);
    return static_cast<std::uint64_t>(d) + 4 * pair_rank(s.j, s.k, d) +
           (static_cast<std::uint64_t>(s.kind) - 1);
}

SnapshotId snapshot_from_index(std::uint64_t index, Index d) {
    check_dim(d);
    if (index >= snapshot_count(d)) {
        throw InvalidParameter("snapshot index " + std::to_string(index) +
                               " out of range for dimension " + std::to_string(d));
    }
    const auto ud = static_cast<std::uint64_t>(d);
    if (index < ud) return SnapshotId::comp(static_cast<Index>(index));
    std::uint64_t rest = index - ud;
    const auto kind = static_cast<SnapshotKind>(rest % 4 + 1);
    std::uint64_t rank = rest / 4;
    Index j = 0;
    for (;; ++j) {
        const auto row = static_cast<std::uint64_t>(d - j - 1);
        if (rank < row) break;
        rank -= row;
    }
    return {kind, j, j + 1 + static_cast<Index>(rank)};
}

std::vector<SnapshotId> enumerate_snapshots(Index d) {
    check_dim(d);
    std::vector<SnapshotId> out;
    out.reserve(snapshot_count(d));
    for (Index t = 0; t < d; ++t) out.push_back(SnapshotId::comp(t));
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            for (auto kind : {SnapshotKind::RealPlus, SnapshotKind::RealMinus,
                              SnapshotKind::ImagPlus, SnapshotKind::ImagMinus}) {
                out.push_back({kind, j, k});
            }
        }
    }
    return out;
}

std::vector<PairPartition> build_partitions(Index d) {
    check_dim(d);
    // Circle method on m = odd number of points: round r leaves r out and
    // pairs r+i with r-i (mod m). For even d the extra point d-1 is matched
    // with the round's leftover.
    const bool even = d % 2 == 0;
    const Index m = even ? d - 1 : d;

    // Relabel so that round 0 becomes {(0,1),(2,3),...} with leftover d-1
    // (odd) or the pair (d-2,d-1) (even).
    std::vector<Index> label(static_cast<std::size_t>(d));
    label[0] = even ? d - 2 : d - 1;
    for (Index i = 1; i <= (m - 1) / 2; ++i) {
        label[static_cast<std::size_t>(i)] = 2 * (i - 1);
        label[static_cast<std::size_t>(m - i)] = 2 * (i - 1) + 1;
    }
    if (even) label[static_cast<std::size_t>(d - 1)] = d - 1;

    auto canonical = [&](Index a, Index b) {
        Index x = label[static_cast<std::size_t>(a)];
        Index y = label[static_cast<std::size_t>(b)];
        return x < y ? std::pair{x, y} : std::pair{y, x};
    };

    std::vector<PairPartition> out;
    out.reserve(static_cast<std::size_t>(m));
    for (Index r = 0; r < m; ++r) {
        PairPartition part;
        for (Index i = 1; i <= (m - 1) / 2; ++i) {
            part.pairs.push_back(canonical((r + i) % m, (r - i + m) % m));
        }
        if (even) {
            part.pairs.push_back(canonical(r, d - 1));
        } else {
            part.leftover = label[static_cast<std::size_t>(r)];
        }
        std::sort(part.pairs.begin(), part.pairs.end());
        out.push_back(std::move(part));
    }
    return out;
}

DDBEnsemble::DDBEnsemble(Index dim, std::vector<DDBasis> bases,
                         std::vector<PairPartition> partitions)
    : dim_(dim), bases_(std::move(bases)), partitions_(std::move(partitions)) {
    check_dim(dim_);
    std::uint64_t num = 0;
    const std::uint64_t den = 2 * static_cast<std::uint64_t>(dim_);
    for (const auto& basis : bases_) {
        if (static_cast<Index>(basis.members.size()) != dim_) {
            throw InvariantViolation("basis does not have d members");
        }
        if (basis.weight_den != den) {
            throw InvariantViolation("basis weights must be expressed over 2d");
        }
        for (const auto& s : basis.members) s.validate(dim_);
        num += basis.weight_num;
    }
    if (num != den) throw InvariantViolation("basis weights do not sum to 1");
}

double DDBEnsemble::prior_weight(const SnapshotId& s) const {
    s.validate(dim_);
    const double w = 1.0 / (2.0 * static_cast<double>(dim_));
    // Every pair snapshot lies in exactly one basis; every Comp snapshot
    // carries 2/(2d) in total (doubled computational basis, or two
    // leftover slots for odd d).
    return s.is_comp() ? 2.0 * w : w;
}

DDBEnsemble build_ensemble(Index d) {
    check_dim(d);
    auto partitions = build_partitions(d);
    const auto den = static_cast<std::uint32_t>(2 * d);
    std::vector<DDBasis> bases;
    if (d % 2 == 0) {
        DDBasis comp{{}, 2, den};
        for (Index t = 0; t < d; ++t) comp.members.push_back(SnapshotId::comp(t));
        bases.push_back(std::move(comp));
    }
    for (const auto& part : partitions) {
        DDBasis real{{}, 1, den};
        DDBasis imag{{}, 1, den};
        for (auto [j, k] : part.pairs) {
            real.members.push_back({SnapshotKind::RealPlus, j, k});
            real.members.push_back({SnapshotKind::RealMinus, j, k});
            imag.members.push_back({SnapshotKind::ImagPlus, j, k});
            imag.members.push_back({SnapshotKind::ImagMinus, j, k});
        }
        if (part.leftover) {
            real.members.push_back(SnapshotId::comp(*part.leftover));
            imag.members.push_back(SnapshotId::comp(*part.leftover));
        }
        bases.push_back(std::move(real));
        bases.push_back(std::move(imag));
    }
    return DDBEnsemble(d, std::move(bases), std::move(partitions));
}

ComplexVector snapshot_vector(const SnapshotId& s, Index d) {
    check_dim(d);
    s.validate(d);
    ComplexVector v = ComplexVector::Zero(d);
    switch (s.kind) {
    case SnapshotKind::Comp: v(s.j) = 1.0; break;
    case SnapshotKind::RealPlus: v(s.j) = kInvSqrt2; v(s.k) = kInvSqrt2; break;
    case SnapshotKind::RealMinus: v(s.j) = kInvSqrt2; v(s.k) = -kInvSqrt2; break;
    case SnapshotKind::ImagPlus: v(s.j) = kInvSqrt2; v(s.k) = Complex{0.0, kInvSqrt2}; break;
    case SnapshotKind::ImagMinus: v(s.j) = kInvSqrt2; v(s.k) = Complex{0.0, -kInvSqrt2}; break;
    }
    return v;
}

ComplexMatrix snapshot_projector(const SnapshotId& s, Index d) {
    ComplexVector v = snapshot_vector(s, d);
    return v * v.adjoint();
}

Complex snapshot_trace(const ComplexMatrix& x, const SnapshotId& s) {
    const Index d = x.rows();
    s.validate(d);
    const Index j = s.j;
    const Index k = s.k;
    if (s.is_comp()) return x(j, j);
    const Complex diag = x(j, j) + x(k, k);
    const Complex i{0.0, 1.0};
    switch (s.kind) {
    case SnapshotKind::RealPlus: return 0.5 * (diag + x(j, k) + x(k, j));
    case SnapshotKind::RealMinus: return 0.5 * (diag - x(j, k) - x(k, j));
    case SnapshotKind::ImagPlus: return 0.5 * (diag + i * x(j, k) - i * x(k, j));
    case SnapshotKind::ImagMinus: return 0.5 * (diag - i * x(j, k) + i * x(k, j));
    default: break;
    }
    return diag;
}

double snapshot_overlap(const DensityMatrix& rho, const SnapshotId& s) {
    return snapshot_trace(rho.matrix(), s).real();
}

SnapshotId draw_random_snapshot(Index d, RandomStream& rng) {
    const auto ud = static_cast<std::uint64_t>(d);
    // Computational branch with probability 1/d, then a uniform t.
    if (rng.below(ud) == 0) {
        return SnapshotId::comp(static_cast<Index>(rng.below(ud)));
    }
    // Two distinct integers, uniformly over unordered pairs, then one of
    // the four superpositions.
    auto a = static_cast<Index>(rng.below(ud));
    auto b = static_cast<Index>(rng.below(ud - 1));
    if (b >= a) ++b;
    const auto kind = static_cast<SnapshotKind>(rng.below(4) + 1);
    return {kind, std::min(a, b), std::max(a, b)};
}

} // namespace ddbst
