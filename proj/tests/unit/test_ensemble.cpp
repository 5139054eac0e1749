#include <doctest.h>

#include <map>
#include <set>

#include "ddbst/ensemble.hpp"
#include "oracle.hpp"

using namespace ddbst;

TEST_CASE("snapshot counts") {
    CHECK(enumerate_snapshots(2).size() == 6);
    CHECK(enumerate_snapshots(3).size() == 15);
    for (Index d = 2; d <= 12; ++d) {
        const auto all = enumerate_snapshots(d);
        CHECK(all.size() == static_cast<std::size_t>(2 * d * d - d));
        CHECK(snapshot_count(d) == all.size());
        std::set<SnapshotId> unique(all.begin(), all.end());
        CHECK(unique.size() == all.size());
    }
}

TEST_CASE("snapshot index round trip") {
    for (Index d : {2, 3, 7, 16}) {
        const auto all = enumerate_snapshots(d);
        for (std::size_t i = 0; i < all.size(); ++i) {
            CHECK(snapshot_index(all[i], d) == i);
            CHECK(snapshot_from_index(i, d) == all[i]);
        }
    }
}

TEST_CASE("SnapshotId validation") {
    CHECK_THROWS_AS(SnapshotId::pair(SnapshotKind::RealPlus, 2, 1), InvalidParameter);
    CHECK_THROWS_AS(SnapshotId::pair(SnapshotKind::Comp, 0, 1), InvalidParameter);
    CHECK_FALSE(SnapshotId::comp(3).valid_for(3));
    CHECK(SnapshotId::comp(2).valid_for(3));
    CHECK(to_string(SnapshotId::pair(SnapshotKind::RealPlus, 0, 2)) == "RealPlus(0,2)");
    CHECK(parse_kind("ImagMinus") == SnapshotKind::ImagMinus);
}

TEST_CASE("partitions: documented first partitions") {
    const auto p4 = build_partitions(4);
    CHECK(p4.size() == 3);
    CHECK(p4[0].pairs == std::vector<std::pair<Index, Index>>{{0, 1}, {2, 3}});
    CHECK_FALSE(p4[0].leftover.has_value());

    const auto p5 = build_partitions(5);
    CHECK(p5.size() == 5);
    CHECK(p5[0].pairs == std::vector<std::pair<Index, Index>>{{0, 1}, {2, 3}});
    REQUIRE(p5[0].leftover.has_value());
    CHECK(*p5[0].leftover == 4);
}

TEST_CASE("partitions cover every pair exactly once") {
    for (Index d = 2; d <= 64; ++d) {
        const auto parts = build_partitions(d);
        CHECK(parts.size() == static_cast<std::size_t>(d % 2 == 0 ? d - 1 : d));
        std::map<std::pair<Index, Index>, int> seen;
        std::map<Index, int> leftovers;
        for (const auto& p : parts) {
            std::set<Index> used;
            for (auto [j, k] : p.pairs) {
                CHECK(j < k);
                ++seen[{j, k}];
                used.insert(j);
                used.insert(k);
            }
            if (d % 2 == 1) {
                REQUIRE(p.leftover.has_value());
                ++leftovers[*p.leftover];
                used.insert(*p.leftover);
            }
            CHECK(used.size() == static_cast<std::size_t>(d));
        }
        CHECK(seen.size() == static_cast<std::size_t>(d * (d - 1) / 2));
        for (const auto& [pair, count] : seen) CHECK(count == 1);
        if (d % 2 == 1) {
            CHECK(leftovers.size() == static_cast<std::size_t>(d));
        }
    }
}

TEST_CASE("ensemble basis counts and weights") {
    CHECK(build_ensemble(4).num_bases() == 7);
    CHECK(build_ensemble(5).num_bases() == 10);
    for (Index d = 2; d <= 17; ++d) {
        const auto e = build_ensemble(d);
        CHECK(e.num_bases() == static_cast<std::size_t>(d % 2 == 0 ? 2 * d - 1 : 2 * d));
        double total = 0.0;
        for (const auto& b : e.bases()) total += b.weight();
        CHECK(std::abs(total - 1.0) < 1e-14);
    }
}

TEST_CASE("each basis is orthonormal and members carry the documented prior") {
    for (Index d : {2, 3, 4, 5, 6, 7}) {
        const auto e = build_ensemble(d);
        std::map<SnapshotId, double> weight;
        for (const auto& b : e.bases()) {
            REQUIRE(b.members.size() == static_cast<std::size_t>(d));
            ComplexMatrix u(d, d);
            for (Index c = 0; c < d; ++c) u.col(c) = oracle::snap(b.members[c], d);
            CHECK(oracle::max_abs(u.adjoint() * u - ComplexMatrix::Identity(d, d)) < 1e-14);
            for (const auto& s : b.members) weight[s] += b.weight();
        }
        CHECK(weight.size() == static_cast<std::size_t>(2 * d * d - d));
        for (const auto& [s, w] : weight) {
            const double want = s.is_comp() ? 1.0 / d : 1.0 / (2.0 * d);
            CHECK(std::abs(w - want) < 1e-14);
            CHECK(std::abs(e.prior_weight(s) - want) < 1e-14);
        }
    }
}

TEST_CASE("d = 2 reproduces the six single-qubit states") {
    const auto e = build_ensemble(2);
    std::set<SnapshotId> all;
    for (const auto& b : e.bases())
        for (const auto& s : b.members) all.insert(s);
    CHECK(all.size() == 6);
}

TEST_CASE("snapshot vectors") {
    const double h = 1.0 / std::sqrt(2.0);
    ComplexVector c1 = snapshot_vector(SnapshotId::comp(1), 3);
    CHECK(c1(0) == Complex{0, 0});
    CHECK(c1(1) == Complex{1, 0});
    CHECK(c1(2) == Complex{0, 0});
    const ComplexVector rm = snapshot_vector(SnapshotId::pair(SnapshotKind::RealMinus, 0, 2), 3);
    CHECK(std::abs(rm(0) - h) < 1e-15);
    CHECK(std::abs(rm(1)) == 0.0);
    CHECK(std::abs(rm(2) + h) < 1e-15);
    const ComplexVector ip = snapshot_vector(SnapshotId::pair(SnapshotKind::ImagPlus, 0, 1), 2);
    CHECK(std::abs(ip(0) - h) < 1e-15);
    CHECK(std::abs(ip(1) - Complex{0, h}) < 1e-15);
    for (const auto& s : enumerate_snapshots(5)) {
        CHECK(oracle::max_abs(snapshot_vector(s, 5) - oracle::snap(s, 5)) < 1e-15);
    }
}

TEST_CASE("snapshot overlaps match the dense oracle") {
    RandomStream rng(21, 0);
    for (Index d : {2, 3, 4, 6}) {
        const DensityMatrix mixed = DensityMatrix::maximally_mixed(d);
        for (int rep = 0; rep < 5; ++rep) {
            const DensityMatrix rho(oracle::random_density(d, rng));
            const ComplexMatrix x = oracle::random_hermitian(d, rng);
            for (const auto& s : enumerate_snapshots(d)) {
                const double want = oracle::tr_prod(rho.matrix(), oracle::proj(s, d)).real();
                const double got = snapshot_overlap(rho, s);
                CHECK(std::abs(got - want) < 1e-12);
                CHECK(got >= -1e-15);
                CHECK(got <= 1.0 + 1e-15);
                CHECK(std::abs(snapshot_trace(x, s) - oracle::tr_prod(x, oracle::proj(s, d))) < 1e-12);
                CHECK(std::abs(snapshot_overlap(mixed, s) - 1.0 / d) < 1e-15);
            }
        }
    }
    ComplexVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(std::abs(snapshot_overlap(DensityMatrix::from_pure(plus),
                                    SnapshotId::pair(SnapshotKind::RealPlus, 0, 1)) -
                   1.0) < 1e-15);
}

TEST_CASE("weighted projector sum reproduces the channel identity") {
    RandomStream rng(22, 0);
    for (Index d : {2, 3, 4, 5, 8}) {
        const ComplexMatrix rho = oracle::random_density(d, rng);
        ComplexMatrix lhs = ComplexMatrix::Zero(d, d);
        for (const auto& s : enumerate_snapshots(d)) {
            const ComplexMatrix p = oracle::proj(s, d);
            lhs += (s.is_comp() ? 2.0 : 1.0) * oracle::tr_prod(rho, p) * p;
        }
        ComplexMatrix rhs = rho + ComplexMatrix::Identity(d, d);
        for (Index k = 0; k < d; ++k) rhs(k, k) += static_cast<double>(d - 1) * rho(k, k);
        CHECK(oracle::max_abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("random snapshot draws follow 1/d^2 and 1/(2d^2)") {
    RandomStream rng(23, 0);
    const int draws = 1000000;
    std::map<SnapshotId, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[draw_random_snapshot(2, rng)];
    CHECK(counts.size() == 6);
    for (const auto& [s, c] : counts) {
        const double p = s.is_comp() ? 0.25 : 0.125;
        const double sigma = std::sqrt(draws * p * (1 - p));
        CHECK(std::abs(c - draws * p) <= 5.0 * sigma);
    }
    // normalization identity
    for (Index d = 2; d < 10; ++d) {
        const double dd = static_cast<double>(d);
        CHECK(std::abs(dd / (dd * dd) + (2 * dd * dd - 2 * dd) / (2 * dd * dd) - 1.0) < 1e-15);
    }
    RandomStream a(9, 9), b(9, 9);
    for (int i = 0; i < 1000; ++i) CHECK(draw_random_snapshot(7, a) == draw_random_snapshot(7, b));
}

TEST_CASE("random snapshot draws at odd d cover every snapshot uniformly") {
    RandomStream rng(24, 0);
    const Index d = 3;
    const int draws = 450000;
    std::map<SnapshotId, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[draw_random_snapshot(d, rng)];
    CHECK(counts.size() == 15);
    for (const auto& [s, c] : counts) {
        const double p = s.is_comp() ? 1.0 / 9.0 : 1.0 / 18.0;
        CHECK(std::abs(c - draws * p) <= 5.0 * std::sqrt(draws * p * (1 - p)));
    }
}
