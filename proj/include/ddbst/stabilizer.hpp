#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "ddbst/channel.hpp"
#include "ddbst/ensemble.hpp"
#include "ddbst/estimator.hpp"
#include "ddbst/gf2.hpp"
#include "ddbst/linalg.hpp"

namespace ddbst {

/// Largest qubit count for which dense amplitude vectors are formed.
inline constexpr int kStabilizerDenseCap = 12;
/// Largest qubit count accepted by the index-map machinery.
inline constexpr int kStabilizerIndexCap = 40;

/// sum_u i^{q(u)} |R u + t> / sqrt(2^r) with
/// q(u) = g + lin.u + 2 sum_{a<b} quad_ab u_a u_b  (mod 4).
/// Index bit i is component i of R u + t.
struct AffineStabilizerState {
    int n = 0;
    int r = 0;
    /// r column masks of R, each n bits wide.
    std::vector<gf2::Bits> R;
    gf2::Bits t = 0;
    /// r entries in Z_4.
    std::vector<std::uint8_t> lin;
    /// quad[a] has bit b set iff quad_ab = 1; only b > a may be set.
    std::vector<gf2::Bits> quad;
    /// Exponent g of the global phase i^g.
    std::uint8_t global_phase = 0;

    /// Throws InvariantViolation on shape errors or a rank-deficient R.
    void validate() const;

    gf2::Bits index_of(gf2::Bits u) const { return gf2::apply_columns(R, u) ^ t; }
    /// q(u) mod 4.
    unsigned phase_exponent(gf2::Bits u) const;
    Complex amplitude_of(gf2::Bits u) const;
};

/// Dense state vector of length 2^n; n <= cap.
ComplexVector amplitudes(const AffineStabilizerState& psi, int cap = kStabilizerDenseCap);

AffineStabilizerState random_affine_stabilizer(int n, int r, RandomStream& rng);

struct OverlapAudit {
    double value = 0.0;
    SnapshotId snapshot;
    /// value <= 1/2^r (the constant as commonly stated).
    bool within_one_over = false;
    /// value <= 2/2^r.
    bool within_two_over = false;
};

/// Exhaustive maximum of tr(|psi><psi| s) over all DDB snapshots; ties go to
/// the snapshot with the smallest snapshot_index.
OverlapAudit max_ddb_overlap(const AffineStabilizerState& psi, int cap = kStabilizerDenseCap);

/// x -> M x + c over the binary field; M is stored as rows, and the inverse
/// x -> B x + t (B = M^{-1}) as columns.
class AffineIndexMap {
public:
    AffineIndexMap(int n, std::vector<gf2::Bits> m_rows, gf2::Bits c);
    static AffineIndexMap identity(int n);

    int n() const { return n_; }
    const std::vector<gf2::Bits>& rows() const { return m_rows_; }
    gf2::Bits offset() const { return c_; }

    gf2::Bits apply(gf2::Bits x) const { return gf2::apply_rows(m_rows_, x) ^ c_; }
    gf2::Bits inverse(gf2::Bits y) const { return gf2::apply_columns(b_cols_, y) ^ t_; }

private:
    int n_;
    std::vector<gf2::Bits> m_rows_;
    gf2::Bits c_;
    std::vector<gf2::Bits> b_cols_;
    gf2::Bits t_;
};

struct BlockReduction {
    AffineIndexMap pi;
    /// n = r = psi.r, R = I, t = 0, same phase data as psi.
    AffineStabilizerState reduced;
};

/// pi sends R u + t to u (high n - r bits zero).
BlockReduction reduce_to_block(const AffineStabilizerState& psi);

/// Entry (i, j) of T O T^dagger for the permutation T induced by pi.
inline Complex conjugated_entry(const AffineIndexMap& pi, const ObservableEntryAccessor& o,
                                gf2::Bits i, gf2::Bits j) {
    return o.entry(static_cast<Index>(pi.inverse(i)), static_cast<Index>(pi.inverse(j)));
}

/// The 2^r x 2^r leading block of T O T^dagger as an entry accessor.
ObservableEntryAccessor block_accessor(const AffineIndexMap& pi, const ObservableEntryAccessor& o,
                                       int r);

/// (1/2^r) sum of O_ii over the support of the state.
double l2_exact(const AffineIndexMap& pi, const ObservableEntryAccessor& o, int r);

/// <Phi_r| [T O T^dagger]_block |Phi_r> by summing all 4^r block entries.
double block_expectation(const BlockReduction& red, const ObservableEntryAccessor& o);

enum class L2Mode { Neglect, Exact, BoundReport };
std::string_view l2_mode_name(L2Mode m);
L2Mode parse_l2_mode(std::string_view name);

struct Theorem3Config {
    /// r <= direct_max_rank is evaluated exactly over the 4^r block entries.
    int direct_max_rank = 10;
    /// Plan the shot count from epsilon, sigma and the variance bound
    /// 4 tr(O^2) instead of using EstimationConfig::shots.
    bool plan_shots = true;
};

struct Theorem3Report {
    /// Estimate of tr(Phi_r O_block) + L2, the quantity the trace-free
    /// single-shot values average to.
    double l1_estimate = 0.0;
    std::optional<double> l2_value;
    /// tr(O^2)/sqrt(2^r).
    double l2_bound = 0.0;
    /// sqrt(tr(O^2))/sqrt(2^r), the Cauchy-Schwarz bound on |L2|.
    double l2_cs_bound = 0.0;
    double final_estimate = 0.0;
    double std_error = 0.0;
    int n = 0;
    int r_used = 0;
    std::uint64_t shots = 0;
    std::uint64_t batches = 1;
    double epsilon = 0.0;
    double sigma = 0.0;
    L2Mode mode = L2Mode::Neglect;
    bool direct = false;
    double reduction_seconds = 0.0;

    nlohmann::json to_json() const;
};

/// hs_norm_sq is tr(O^2) of the full observable.
Theorem3Report theorem3_estimate(const AffineStabilizerState& psi, const ObservableEntryAccessor& o,
                                 double hs_norm_sq, const EstimationConfig& cfg, L2Mode mode,
                                 const Theorem3Config& t3 = {});

nlohmann::json stabilizer_to_json(const AffineStabilizerState& psi);
/// Throws ParseError on malformed input, InvariantViolation on a bad state.
AffineStabilizerState stabilizer_from_json(const nlohmann::json& j);

} // namespace ddbst
