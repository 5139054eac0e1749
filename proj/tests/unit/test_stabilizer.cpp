#include <doctest.h>

#include "ddbst/average_study.hpp"
#include "ddbst/stabilizer.hpp"
#include "oracle.hpp"

using namespace ddbst;
using gf2::Bits;

namespace {

AffineStabilizerState basis_state(int n, Bits t) {
    AffineStabilizerState s;
    s.n = n;
    s.r = 0;
    s.t = t;
    return s;
}

// Amplitude from the phase formula, evaluated by brute force over u.
ComplexVector brute_amplitudes(const AffineStabilizerState& s) {
    ComplexVector v = ComplexVector::Zero(Index{1} << s.n);
    for (Bits u = 0; u < (Bits{1} << s.r); ++u) {
        Bits idx = s.t;
        int q = s.global_phase;
        for (int a = 0; a < s.r; ++a) {
            if (!((u >> a) & 1u)) continue;
            idx ^= s.R[a];
            q += s.lin[a];
            for (int b = a + 1; b < s.r; ++b)
                if (((u >> b) & 1u) && ((s.quad[a] >> b) & 1u)) q += 2;
        }
        v(static_cast<Index>(idx)) = std::pow(Complex{0.0, 1.0}, q % 4) / std::sqrt(std::pow(2.0, s.r));
    }
    return v;
}

nlohmann::json json_round(const nlohmann::json& j) { return nlohmann::json::parse(j.dump()); }

} // namespace

TEST_CASE("gf2 rank, extension and inverse") {
    CHECK(gf2::rank({0b011, 0b101, 0b110}) == 2);
    CHECK(gf2::rank({0b001, 0b010, 0b100}) == 3);
    CHECK_FALSE(gf2::extend_to_basis({0b11, 0b11}, 2).has_value());
    RandomStream rng(81, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 1 + static_cast<int>(rng.below(12));
        std::vector<Bits> cols;
        do {
            cols.clear();
            for (int i = 0; i < n; ++i) cols.push_back(rng.next_u64() & ((Bits{1} << n) - 1));
        } while (gf2::rank(cols) != n);
        const auto inv = gf2::inverse_rows(cols, n);
        REQUIRE(inv.has_value());
        for (int k = 0; k < 20; ++k) {
            const Bits x = rng.next_u64() & ((Bits{1} << n) - 1);
            CHECK(gf2::apply_rows(*inv, gf2::apply_columns(cols, x)) == x);
        }
    }
}

TEST_CASE("amplitude examples") {
    const ComplexVector b = amplitudes(basis_state(3, 5));
    for (Index i = 0; i < 8; ++i) CHECK(std::abs(b(i)) == (i == 5 ? 1.0 : 0.0));

    AffineStabilizerState plus;
    plus.n = 1;
    plus.r = 1;
    plus.R = {1};
    plus.lin = {0};
    plus.quad = {0};
    const ComplexVector p = amplitudes(plus);
    CHECK(std::abs(p(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(p(1) - 1.0 / std::sqrt(2.0)) < 1e-15);

    AffineStabilizerState two;
    two.n = 2;
    two.r = 1;
    two.R = {0b10};
    two.t = 0b01;
    two.lin = {1};
    two.quad = {0};
    const ComplexVector q = amplitudes(two);
    CHECK(std::abs(q(0b01) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(q(0b11) - Complex{0.0, 1.0 / std::sqrt(2.0)}) < 1e-15);
    CHECK(std::abs(q(0b00)) == 0.0);
    CHECK_THROWS_AS(amplitudes(basis_state(13, 0)), InvalidParameter);
}

TEST_CASE("random states satisfy their invariants") {
    RandomStream rng(82, 0);
    for (int n = 1; n <= 8; ++n) {
        for (int r = 0; r <= n; ++r) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto s = random_affine_stabilizer(n, r, rng);
                CHECK_NOTHROW(s.validate());
                const ComplexVector v = amplitudes(s);
                CHECK(std::abs(v.squaredNorm() - 1.0) < 1e-12);
                CHECK(oracle::max_abs(v - brute_amplitudes(s)) < 1e-14);
                int support = 0;
                for (Index i = 0; i < v.size(); ++i) {
                    if (std::abs(v(i)) > 0) {
                        ++support;
                        CHECK(std::abs(std::abs(v(i)) - std::pow(2.0, -0.5 * r)) < 1e-14);
                    }
                }
                CHECK(support == (1 << r));
            }
        }
    }
}

TEST_CASE("validation rejects corrupted states") {
    RandomStream rng(83, 0);
    auto s = random_affine_stabilizer(5, 3, rng);
    auto bad = s;
    bad.R[2] = bad.R[0] ^ bad.R[1];
    CHECK_THROWS_AS(bad.validate(), InvariantViolation);
    CHECK_THROWS_AS(reduce_to_block(bad), InvariantViolation);
    bad = s;
    bad.quad[1] = 0b001;
    CHECK_THROWS_AS(bad.validate(), InvariantViolation);
    bad = s;
    bad.lin[0] = 4;
    CHECK_THROWS_AS(bad.validate(), InvariantViolation);
}

TEST_CASE("max overlap: both constants") {
    const OverlapAudit basis = max_ddb_overlap(basis_state(3, 6));
    CHECK(basis.value == doctest::Approx(1.0));
    CHECK(basis.snapshot == SnapshotId::comp(6));
    CHECK(basis.within_one_over);

    AffineStabilizerState plus;
    plus.n = 1;
    plus.r = 1;
    plus.R = {1};
    plus.lin = {0};
    plus.quad = {0};
    const OverlapAudit p = max_ddb_overlap(plus);
    CHECK(p.value == doctest::Approx(1.0));
    CHECK(p.snapshot == SnapshotId::pair(SnapshotKind::RealPlus, 0, 1));
    CHECK_FALSE(p.within_one_over);
    CHECK(p.within_two_over);

    RandomStream rng(84, 0);
    for (int n = 1; n <= 6; ++n) {
        for (int r = 0; r <= n; ++r) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto s = random_affine_stabilizer(n, r, rng);
                const OverlapAudit a = max_ddb_overlap(s);
                CHECK(a.within_two_over);
                // agrees with the dense scan
                const ComplexVector v = amplitudes(s);
                double best = 0.0;
                for (const auto& snap : enumerate_snapshots(v.size())) {
                    best = std::max(best, std::norm(oracle::snap(snap, v.size()).dot(v)));
                }
                CHECK(std::abs(best - a.value) < 1e-12);
            }
        }
    }
}

TEST_CASE("block reduction permutes amplitudes onto the leading block") {
    RandomStream rng(85, 0);
    for (int n = 1; n <= 8; ++n) {
        for (int r = 0; r <= n; ++r) {
            for (int rep = 0; rep < 3; ++rep) {
                const auto s = random_affine_stabilizer(n, r, rng);
                const BlockReduction red = reduce_to_block(s);
                const ComplexVector v = amplitudes(s);
                ComplexVector permuted = ComplexVector::Zero(v.size());
                for (Bits x = 0; x < static_cast<Bits>(v.size()); ++x) {
                    permuted(static_cast<Index>(red.pi.apply(x))) = v(static_cast<Index>(x));
                }
                const ComplexVector phi =
                    r == 0 ? ComplexVector::Constant(1, red.reduced.amplitude_of(0)) : amplitudes(red.reduced);
                ComplexVector padded = ComplexVector::Zero(v.size());
                padded.head(phi.size()) = phi;
                CHECK(oracle::max_abs(permuted - padded) < 1e-14);
                for (Bits u = 0; u < (Bits{1} << r); ++u) {
                    CHECK(red.pi.apply(s.index_of(u)) == u);
                    const Complex a = phi(static_cast<Index>(u)) * std::pow(2.0, 0.5 * r);
                    const bool unit_phase = std::abs(a - 1.0) < 1e-12 || std::abs(a + 1.0) < 1e-12 ||
                                            std::abs(a - Complex{0, 1}) < 1e-12 ||
                                            std::abs(a + Complex{0, 1}) < 1e-12;
                    CHECK(unit_phase);
                }
                if (r > 0) {
                    // reduced states sit within 1/2^r of uniform
                    CHECK(max_deviation_pure(phi) <= std::pow(2.0, -r) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("identity reduction and index map round trip") {
    AffineStabilizerState s;
    s.n = 4;
    s.r = 4;
    s.R = {1, 2, 4, 8};
    s.lin = {0, 1, 2, 3};
    s.quad = {0b0110, 0, 0b1000, 0};
    const BlockReduction red = reduce_to_block(s);
    for (Bits x = 0; x < 16; ++x) CHECK(red.pi.apply(x) == x);

    RandomStream rng(86, 0);
    for (int n : {1, 5, 12}) {
        const auto st = random_affine_stabilizer(n, static_cast<int>(rng.below(n + 1)), rng);
        const auto map = reduce_to_block(st).pi;
        for (Bits x = 0; x < (Bits{1} << n); ++x) CHECK(map.inverse(map.apply(x)) == x);
    }
    std::vector<Bits> singular{0b01, 0b01};
    CHECK_THROWS_AS(AffineIndexMap(2, singular, 0), InvariantViolation);
}

TEST_CASE("conjugated entries and L2") {
    RandomStream rng(87, 0);
    for (int n = 1; n <= 6; ++n) {
        const Index d = Index{1} << n;
        const HermitianObservable o(oracle::random_hermitian(d, rng));
        const auto acc = ObservableEntryAccessor::from_dense(o);
        const auto id = AffineIndexMap::identity(n);
        CHECK(conjugated_entry(id, acc, 1 % d, 0) == o.matrix()(1 % d, 0));
        const auto s = random_affine_stabilizer(n, static_cast<int>(rng.below(n + 1)), rng);
        const BlockReduction red = reduce_to_block(s);
        Complex tr{0.0, 0.0};
        for (Bits i = 0; i < static_cast<Bits>(d); ++i) {
            tr += conjugated_entry(red.pi, acc, i, i);
            for (Bits j = 0; j < static_cast<Bits>(d); j += 3) {
                CHECK(std::abs(conjugated_entry(red.pi, acc, i, j) -
                               std::conj(conjugated_entry(red.pi, acc, j, i))) < 1e-15);
            }
        }
        CHECK(std::abs(tr.real() - o.trace()) < 1e-10);

        // L2 from the support of the state directly
        double l2 = 0.0;
        for (Bits u = 0; u < (Bits{1} << s.r); ++u) l2 += o.matrix()(s.index_of(u), s.index_of(u)).real();
        l2 /= std::pow(2.0, s.r);
        CHECK(std::abs(l2_exact(red.pi, acc, s.r) - l2) < 1e-12);

        // block identity against the dense expectation
        const ComplexVector v = amplitudes(s);
        const double dense = (v.adjoint() * o.matrix() * v)(0, 0).real();
        CHECK(std::abs(block_expectation(red, acc) - dense) < 1e-12);
    }
    const HermitianObservable id(ComplexMatrix::Identity(16, 16));
    const auto s = random_affine_stabilizer(4, 2, rng);
    CHECK(l2_exact(reduce_to_block(s).pi, ObservableEntryAccessor::from_dense(id), 2) ==
          doctest::Approx(1.0));
}

TEST_CASE("L2 bounds") {
    RandomStream rng(88, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const int r = static_cast<int>(rng.below(n + 1));
        const double norm = 1.0 + 3.0 * rng.uniform();
        const HermitianObservable o = random_observable(Index{1} << n, norm, rng);
        const auto s = random_affine_stabilizer(n, r, rng);
        const double l2 = l2_exact(reduce_to_block(s).pi, ObservableEntryAccessor::from_dense(o), r);
        CHECK(std::abs(l2) <= std::sqrt(norm) * std::pow(2.0, -0.5 * r) + 1e-12);
        CHECK(std::abs(l2) <= norm * std::pow(2.0, -0.5 * r) + 1e-12);
    }
    // tr(O^2) < 1 can break the tr(O^2)/sqrt(2^r) form at r = 0
    ComplexMatrix small = ComplexMatrix::Zero(4, 4);
    small(0, 0) = 0.5;
    const HermitianObservable o(small);
    const auto s = [] {
        AffineStabilizerState b;
        b.n = 2;
        return b;
    }();
    const double l2 = l2_exact(reduce_to_block(s).pi, ObservableEntryAccessor::from_dense(o), 0);
    CHECK(l2 == 0.5);
    CHECK(l2 > o.hs_norm_sq());
    CHECK(l2 <= std::sqrt(o.hs_norm_sq()));
}

TEST_CASE("stabilizer estimate: direct and sampled paths") {
    RandomStream rng(89, 0);
    const int n = 6;
    const Index d = Index{1} << n;
    const HermitianObservable o = random_observable(d, 4.0, rng);
    const auto acc = ObservableEntryAccessor::from_dense(o);
    EstimationConfig cfg;
    cfg.seed = 3;

    const auto b = basis_state(n, 13);
    const Theorem3Report r0 = theorem3_estimate(b, acc, o.hs_norm_sq(), cfg, L2Mode::Neglect);
    CHECK(r0.final_estimate == o.matrix()(13, 13).real());
    CHECK(r0.shots == 0);
    CHECK(r0.direct);
    CHECK(r0.l2_bound == doctest::Approx(4.0));

    const auto s = random_affine_stabilizer(n, 5, rng);
    const ComplexVector v = amplitudes(s);
    const double truth = (v.adjoint() * o.matrix() * v)(0, 0).real();
    const Theorem3Report direct = theorem3_estimate(s, acc, o.hs_norm_sq(), cfg, L2Mode::Exact);
    CHECK(direct.direct);
    CHECK(std::abs(direct.final_estimate - truth) < 1e-12);

    Theorem3Config t3;
    t3.direct_max_rank = 0;
    cfg.epsilon = 0.2;
    const Theorem3Report sampled = theorem3_estimate(s, acc, o.hs_norm_sq(), cfg, L2Mode::Exact, t3);
    CHECK_FALSE(sampled.direct);
    CHECK(sampled.shots > 0);
    REQUIRE(sampled.l2_value.has_value());
    CHECK(std::abs(sampled.final_estimate - truth) <= 0.2);
    CHECK(sampled.l2_bound == doctest::Approx(4.0 / std::sqrt(32.0)));
    CHECK(sampled.l2_cs_bound == doctest::Approx(2.0 / std::sqrt(32.0)));

    const Theorem3Report neglect = theorem3_estimate(s, acc, o.hs_norm_sq(), cfg, L2Mode::Neglect, t3);
    CHECK_FALSE(neglect.l2_value.has_value());
    CHECK(neglect.final_estimate == doctest::Approx(sampled.final_estimate + *sampled.l2_value));
    const Theorem3Report report = theorem3_estimate(s, acc, o.hs_norm_sq(), cfg, L2Mode::BoundReport, t3);
    CHECK(report.final_estimate == neglect.final_estimate);
    CHECK(report.l2_value.has_value());

    cfg.shots = 0;
    t3.plan_shots = false;
    CHECK_THROWS_AS(theorem3_estimate(s, acc, 4.0, cfg, L2Mode::Exact, t3), InvalidParameter);
    CHECK_THROWS_AS(parse_l2_mode("half"), InvalidParameter);
}

TEST_CASE("stabilizer JSON round trip") {
    RandomStream rng(90, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = random_affine_stabilizer(7, static_cast<int>(rng.below(8)), rng);
        const auto back = stabilizer_from_json(json_round(stabilizer_to_json(s)));
        CHECK(back.R == s.R);
        CHECK(back.t == s.t);
        CHECK(back.lin == s.lin);
        CHECK(back.quad == s.quad);
        CHECK(back.global_phase == s.global_phase);
    }
    auto j = stabilizer_to_json(random_affine_stabilizer(3, 2, rng));
    j["global_phase"] = "2";
    CHECK_THROWS_AS(stabilizer_from_json(j), ParseError);
    j = stabilizer_to_json(random_affine_stabilizer(3, 2, rng));
    j["R"][0] = "1x";
    CHECK_THROWS_AS(stabilizer_from_json(j), ParseError);
}
