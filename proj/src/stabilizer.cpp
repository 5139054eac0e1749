#include "ddbst/stabilizer.hpp"

#include <chrono>
#include <cmath>

namespace ddbst {

using gf2::Bits;

namespace {

constexpr Complex kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

Bits low_mask(int bits) { return bits >= 64 ? ~Bits{0} : (Bits{1} << bits) - 1; }

void check_qubits(int n, int cap) {
    if (n < 0 || n > cap) {
        throw InvalidParameter("qubit count " + std::to_string(n) + " outside [0, " +
                               std::to_string(cap) + "]");
    }
}

} // namespace

void AffineStabilizerState::validate() const {
    if (n < 0 || n > kStabilizerIndexCap) throw InvariantViolation("qubit count out of range");
    if (r < 0 || r > n) throw InvariantViolation("rank must lie in [0, n]");
    if (R.size() != static_cast<std::size_t>(r) || lin.size() != static_cast<std::size_t>(r) ||
        quad.size() != static_cast<std::size_t>(r)) {
        throw InvariantViolation("R, lin and quad must have r entries");
    }
    const Bits nmask = low_mask(n);
    if (t & ~nmask) throw InvariantViolation("t has bits beyond n");
    for (int a = 0; a < r; ++a) {
        if (R[static_cast<std::size_t>(a)] & ~nmask) throw InvariantViolation("R column has bits beyond n");
        if (lin[static_cast<std::size_t>(a)] > 3) throw InvariantViolation("lin entries must lie in Z_4");
        // strictly upper: bits 0..a must be clear, nothing at or beyond r
        const Bits allowed = low_mask(r) & ~low_mask(a + 1);
        if (quad[static_cast<std::size_t>(a)] & ~allowed) {
            throw InvariantViolation("quad must be strictly upper triangular");
        }
    }
    if (global_phase > 3) throw InvariantViolation("global phase exponent must lie in Z_4");
    if (gf2::rank(R) != r) throw InvariantViolation("R does not have full column rank");
}

unsigned AffineStabilizerState::phase_exponent(Bits u) const {
    unsigned q = global_phase;
    for (int a = 0; a < r; ++a) {
        if (!((u >> a) & 1u)) continue;
        q += lin[static_cast<std::size_t>(a)];
        q += 2u * static_cast<unsigned>(gf2::parity(quad[static_cast<std::size_t>(a)] & u));
    }
    return q & 3u;
}

Complex AffineStabilizerState::amplitude_of(Bits u) const {
    return kIPow[phase_exponent(u)] * std::pow(2.0, -0.5 * r);
}

ComplexVector amplitudes(const AffineStabilizerState& psi, int cap) {
    check_qubits(psi.n, std::min(cap, kStabilizerDenseCap));
    psi.validate();
    ComplexVector out = ComplexVector::Zero(Index{1} << psi.n);
    for (Bits u = 0; u < (Bits{1} << psi.r); ++u) {
        out(static_cast<Index>(psi.index_of(u))) = psi.amplitude_of(u);
    }
    return out;
}

AffineStabilizerState random_affine_stabilizer(int n, int r, RandomStream& rng) {
    check_qubits(n, kStabilizerIndexCap);
    if (r < 0 || r > n) throw InvalidParameter("rank must lie in [0, n]");
    AffineStabilizerState s;
    s.n = n;
    s.r = r;
    const Bits nmask = low_mask(n);
    do {
        s.R.clear();
        for (int a = 0; a < r; ++a) s.R.push_back(rng.next_u64() & nmask);
    } while (gf2::rank(s.R) != r);
    s.t = rng.next_u64() & nmask;
    for (int a = 0; a < r; ++a) {
        s.lin.push_back(static_cast<std::uint8_t>(rng.below(4)));
        s.quad.push_back(rng.next_u64() & low_mask(r) & ~low_mask(a + 1));
    }
    s.global_phase = static_cast<std::uint8_t>(rng.below(4));
    return s;
}

OverlapAudit max_ddb_overlap(const AffineStabilizerState& psi, int cap) {
    const ComplexVector v = amplitudes(psi, cap);
    const Index d = v.size();
    OverlapAudit best;
    best.value = -1.0;
    const auto consider = [&](double value, const SnapshotId& s) {
        if (value > best.value) {
            best.value = value;
            best.snapshot = s;
        }
    };
    for (Index t = 0; t < d; ++t) consider(std::norm(v(t)), SnapshotId::comp(t));
    const Complex i{0.0, 1.0};
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            consider(0.5 * std::norm(v(j) + v(k)), SnapshotId::pair(SnapshotKind::RealPlus, j, k));
            consider(0.5 * std::norm(v(j) - v(k)), SnapshotId::pair(SnapshotKind::RealMinus, j, k));
            consider(0.5 * std::norm(v(j) - i * v(k)), SnapshotId::pair(SnapshotKind::ImagPlus, j, k));
            consider(0.5 * std::norm(v(j) + i * v(k)), SnapshotId::pair(SnapshotKind::ImagMinus, j, k));
        }
    }
    const double unit = std::pow(2.0, -psi.r);
    best.within_one_over = best.value <= unit + tol::kAlgebraic;
    best.within_two_over = best.value <= 2.0 * unit + tol::kAlgebraic;
    return best;
}

AffineIndexMap::AffineIndexMap(int n, std::vector<Bits> m_rows, Bits c)
    : n_(n), m_rows_(std::move(m_rows)), c_(c) {
    check_qubits(n, kStabilizerIndexCap);
    if (m_rows_.size() != static_cast<std::size_t>(n)) throw InvariantViolation("M must be n x n");
    // Rows of M are the columns of M^T; the rows of (M^T)^{-1} are the columns of M^{-1}.
    auto b = gf2::inverse_rows(m_rows_, n);
    if (!b) throw InvariantViolation("index map matrix is singular");
    b_cols_ = std::move(*b);
    t_ = gf2::apply_columns(b_cols_, c_);
}

AffineIndexMap AffineIndexMap::identity(int n) {
    std::vector<Bits> rows;
    for (int i = 0; i < n; ++i) rows.push_back(Bits{1} << i);
    return AffineIndexMap(n, std::move(rows), 0);
}

BlockReduction reduce_to_block(const AffineStabilizerState& psi) {
    psi.validate();
    auto basis = gf2::extend_to_basis(psi.R, psi.n);
    if (!basis) throw InvariantViolation("R is rank deficient");
    auto m_rows = gf2::inverse_rows(*basis, psi.n);
    if (!m_rows) throw InvariantViolation("R is rank deficient");
    const Bits c = gf2::apply_rows(*m_rows, psi.t);

    AffineStabilizerState red;
    red.n = psi.r;
    red.r = psi.r;
    for (int a = 0; a < psi.r; ++a) red.R.push_back(Bits{1} << a);
    red.t = 0;
    red.lin = psi.lin;
    red.quad = psi.quad;
    red.global_phase = psi.global_phase;
    return {AffineIndexMap(psi.n, std::move(*m_rows), c), std::move(red)};
}

ObservableEntryAccessor block_accessor(const AffineIndexMap& pi, const ObservableEntryAccessor& o,
                                       int r) {
    const double trace = std::ldexp(l2_exact(pi, o, r), r);
    return ObservableEntryAccessor(Index{1} << r, trace, [pi, o](Index m, Index n) {
        return conjugated_entry(pi, o, static_cast<Bits>(m), static_cast<Bits>(n));
    });
}

double l2_exact(const AffineIndexMap& pi, const ObservableEntryAccessor& o, int r) {
    if (r < 0 || r > pi.n()) throw InvalidParameter("rank must lie in [0, n]");
    double sum = 0.0;
    for (Bits y = 0; y < (Bits{1} << r); ++y) sum += conjugated_entry(pi, o, y, y).real();
    return std::ldexp(sum, -r);
}

double block_expectation(const BlockReduction& red, const ObservableEntryAccessor& o) {
    const int r = red.reduced.r;
    const Bits size = Bits{1} << r;
    std::vector<Index> idx(size);
    std::vector<Complex> amp(size);
    for (Bits u = 0; u < size; ++u) {
        idx[u] = static_cast<Index>(red.pi.inverse(u));
        amp[u] = red.reduced.amplitude_of(u);
    }
    Complex sum{0.0, 0.0};
    for (Bits u = 0; u < size; ++u) {
        Complex row{0.0, 0.0};
        for (Bits v = 0; v < size; ++v) row += o.entry(idx[u], idx[v]) * amp[v];
        sum += std::conj(amp[u]) * row;
    }
    return sum.real();
}

std::string_view l2_mode_name(L2Mode m) {
    switch (m) {
    case L2Mode::Neglect: return "neglect";
    case L2Mode::Exact: return "exact";
    case L2Mode::BoundReport: return "bound_report";
    }
    return "?";
}

L2Mode parse_l2_mode(std::string_view name) {
    if (name == "neglect") return L2Mode::Neglect;
    if (name == "exact") return L2Mode::Exact;
    if (name == "bound_report" || name == "bound-report") return L2Mode::BoundReport;
    throw InvalidParameter("unknown l2 mode '" + std::string(name) + "'");
}

nlohmann::json Theorem3Report::to_json() const {
    nlohmann::json j = {{"n", n},
                        {"r_used", r_used},
                        {"mode", std::string(l2_mode_name(mode))},
                        {"direct", direct},
                        {"l1_estimate", l1_estimate},
                        {"l2_value", l2_value ? nlohmann::json(*l2_value) : nlohmann::json(nullptr)},
                        {"l2_bound", l2_bound},
                        {"l2_cs_bound", l2_cs_bound},
                        {"final_estimate", final_estimate},
                        {"std_error", std_error},
                        {"shots", shots},
                        {"batches", batches},
                        {"epsilon", epsilon},
                        {"sigma", sigma}};
    return j;
}

Theorem3Report theorem3_estimate(const AffineStabilizerState& psi, const ObservableEntryAccessor& o,
                                 double hs_norm_sq, const EstimationConfig& cfg, L2Mode mode,
                                 const Theorem3Config& t3) {
    cfg.validate();
    psi.validate();
    if (t3.direct_max_rank < 0) throw InvalidParameter("direct_max_rank must be non-negative");
    if (!(hs_norm_sq >= 0.0) || !std::isfinite(hs_norm_sq)) {
        throw InvalidParameter("tr(O^2) must be finite and non-negative");
    }
    if (o.dim() != (Index{1} << psi.n)) throw DimensionError("observable dimension is not 2^n");

    Theorem3Report rep;
    rep.n = psi.n;
    rep.r_used = psi.r;
    rep.mode = mode;
    rep.epsilon = cfg.epsilon;
    rep.sigma = cfg.sigma;
    const double inv_sqrt = std::pow(2.0, -0.5 * psi.r);
    rep.l2_bound = hs_norm_sq * inv_sqrt;
    rep.l2_cs_bound = std::sqrt(hs_norm_sq) * inv_sqrt;

    const auto t0 = std::chrono::steady_clock::now();
    const BlockReduction red = reduce_to_block(psi);
    rep.reduction_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double l2 = l2_exact(red.pi, o, psi.r);
    if (psi.r == 0 || psi.r <= t3.direct_max_rank) {
        const double exact = block_expectation(red, o);
        rep.direct = true;
        rep.l2_value = l2;
        rep.l1_estimate = exact + l2;
        rep.final_estimate = exact;
        rep.shots = 0;
        return rep;
    }
    if (psi.r > kStabilizerDenseCap) {
        throw InvalidParameter("sampled path supports r <= " + std::to_string(kStabilizerDenseCap));
    }

    EstimationConfig run = cfg;
    if (t3.plan_shots) {
        // Reduced states deviate from uniform by at most 1/2^r (s <= 1), so the
        // single-shot variance is at most 4 tr(O^2).
        run.shots = plan_shots(1, cfg.sigma, cfg.epsilon, std::max(4.0 * hs_norm_sq, 1e-12));
        if (run.strategy == Strategy::MedianOfMeans) {
            run.batches = std::min(run.shots, plan_batches(1, cfg.sigma));
        }
    }
    run.validate();

    const ObservableEntryAccessor block = block_accessor(red.pi, o, psi.r);
    const DensityMatrix phi = DensityMatrix::from_pure(amplitudes(red.reduced));
    const DDBEnsemble ensemble = build_ensemble(phi.dim());
    const ShotSampler sampler(phi, ensemble);
    const auto values = sample_shot_values(
        sampler, run, [&](const SnapshotId& s) { return single_shot_partial(s, block).value; });
    const Aggregate agg = aggregate_values(values, run.strategy, run.batches);

    rep.l1_estimate = agg.estimate;
    rep.std_error = agg.std_error;
    rep.shots = run.shots;
    rep.batches = run.strategy == Strategy::MedianOfMeans ? run.batches : 1;
    switch (mode) {
    case L2Mode::Neglect:
        rep.final_estimate = agg.estimate;
        break;
    case L2Mode::Exact:
        rep.l2_value = l2;
        rep.final_estimate = agg.estimate - l2;
        break;
    case L2Mode::BoundReport:
        rep.l2_value = l2;
        rep.final_estimate = agg.estimate;
        break;
    }
    return rep;
}

namespace {

std::string bits_string(Bits x, int len) {
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = 0; i < len; ++i) {
        if ((x >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

Bits parse_bits(const nlohmann::json& v, int len, const char* what) {
    if (!v.is_string()) throw ParseError(std::string(what) + " must be a bit string");
    const auto s = v.get<std::string>();
    if (static_cast<int>(s.size()) != len) {
        throw ParseError(std::string(what) + " must have " + std::to_string(len) + " bits");
    }
    Bits out = 0;
    for (int i = 0; i < len; ++i) {
        const char ch = s[static_cast<std::size_t>(i)];
        if (ch != '0' && ch != '1') throw ParseError(std::string(what) + " has a non-binary digit");
        if (ch == '1') out |= Bits{1} << i;
    }
    return out;
}

constexpr const char* kPhaseNames[4] = {"1", "i", "-1", "-i"};

} // namespace

// Bit strings list bit 0 first.
nlohmann::json stabilizer_to_json(const AffineStabilizerState& psi) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < psi.n; ++i) {
        Bits row = 0;
        for (int a = 0; a < psi.r; ++a) row |= ((psi.R[static_cast<std::size_t>(a)] >> i) & 1u) << a;
        rows.push_back(bits_string(row, psi.r));
    }
    nlohmann::json quad = nlohmann::json::array();
    for (int a = 0; a < psi.r; ++a) quad.push_back(bits_string(psi.quad[static_cast<std::size_t>(a)], psi.r));
    nlohmann::json lin = nlohmann::json::array();
    for (auto l : psi.lin) lin.push_back(static_cast<int>(l));
    return {{"n", psi.n},
            {"r", psi.r},
            {"R", std::move(rows)},
            {"t", bits_string(psi.t, psi.n)},
            {"lin", std::move(lin)},
            {"quad", std::move(quad)},
            {"global_phase", kPhaseNames[psi.global_phase & 3u]}};
}

AffineStabilizerState stabilizer_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("stabilizer state must be a JSON object");
    for (const char* key : {"n", "r", "R", "t", "lin", "quad", "global_phase"}) {
        if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    }
    if (!j["n"].is_number_integer() || !j["r"].is_number_integer()) {
        throw ParseError("n and r must be integers");
    }
    AffineStabilizerState s;
    s.n = j["n"].get<int>();
    s.r = j["r"].get<int>();
    if (s.n < 0 || s.n > kStabilizerIndexCap || s.r < 0 || s.r > s.n) {
        throw ParseError("n or r out of range");
    }
    const auto& rows = j["R"];
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(s.n)) {
        throw ParseError("R must list n row bit strings");
    }
    s.R.assign(static_cast<std::size_t>(s.r), 0);
    for (int i = 0; i < s.n; ++i) {
        const Bits row = parse_bits(rows[static_cast<std::size_t>(i)], s.r, "R row");
        for (int a = 0; a < s.r; ++a) s.R[static_cast<std::size_t>(a)] |= ((row >> a) & 1u) << i;
    }
    s.t = parse_bits(j["t"], s.n, "t");
    const auto& lin = j["lin"];
    const auto& quad = j["quad"];
    if (!lin.is_array() || lin.size() != static_cast<std::size_t>(s.r) || !quad.is_array() ||
        quad.size() != static_cast<std::size_t>(s.r)) {
        throw ParseError("lin and quad must have r entries");
    }
    for (int a = 0; a < s.r; ++a) {
        const auto& l = lin[static_cast<std::size_t>(a)];
        if (!l.is_number_integer() || l.get<int>() < 0 || l.get<int>() > 3) {
            throw ParseError("lin entries must be integers in 0..3");
        }
        s.lin.push_back(static_cast<std::uint8_t>(l.get<int>()));
        s.quad.push_back(parse_bits(quad[static_cast<std::size_t>(a)], s.r, "quad row"));
    }
    const auto& g = j["global_phase"];
    if (!g.is_string()) throw ParseError("global_phase must be one of \"1\", \"i\", \"-1\", \"-i\"");
    bool found = false;
    for (std::uint8_t p = 0; p < 4; ++p) {
        if (g.get<std::string>() == kPhaseNames[p]) {
            s.global_phase = p;
            found = true;
        }
    }
    if (!found) throw ParseError("global_phase must be one of \"1\", \"i\", \"-1\", \"-i\"");
    s.validate();
    return s;
}

} // namespace ddbst
