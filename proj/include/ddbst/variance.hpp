#pragma once

#include <span>
#include <string>
#include <vector>

#include "ddbst/linalg.hpp"

namespace ddbst {

/// Auxiliary operator o with M^{-1}(O_0) = 2d o: off-diagonal entries of
/// O_0, diagonal entries of O_0 divided by d.
struct OOperator {
    ComplexMatrix matrix;
};

OOperator o_operator(const HermitianObservable& o);

enum class VarianceMethod {
    /// O(d^2) closed forms.
    ClosedForm,
    /// Sum over all 2d^2 - d snapshots; kept as a cross-check.
    SnapshotLoop,
};

/// Single-shot second moment of the traceless-part estimator for state sigma,
/// split into the computational-basis term and V_diag.
struct VarianceReport {
    /// 4d sum_k tr(sigma P_k) tr^2(o P_k) + V_diag.
    double variance_exact = 0.0;
    double v_diag = 0.0;
    /// 4d sum_k tr(sigma P_k) tr^2(o P_k).
    double diag_term = 0.0;
    /// 2d tr(O_0^2).
    double worst_bound = 0.0;
    /// 2 tr(O_0^2).
    double avg_bound = 0.0;
    /// tr(sigma O_0), the mean of the traceless-part estimator.
    double traceless_mean = 0.0;

    /// Var of the single-shot estimator itself: variance_exact - tr(sigma O_0)^2.
    double centered_variance() const { return variance_exact - traceless_mean * traceless_mean; }
};

VarianceReport variance_exact(const DensityMatrix& sigma, const HermitianObservable& o,
                              VarianceMethod method = VarianceMethod::ClosedForm);

/// d sum_{j<k} [(s_jj+s_kk)(o_jj+o_kk)^2 + (s_jk+s_kj)(o_jj+o_kk)(o_jk+o_kj)
///              - (s_jk-s_kj)(o_jj+o_kk)(o_jk-o_kj) + 2(s_jj+s_kk) o_jk o_kj]
double v_diag(const DensityMatrix& sigma, const HermitianObservable& o);

/// T = sum_k 2 o_kk^2 + sum_{j<k} [(o_jj+o_kk)^2 + 2 o_jk o_kj]; the worst-case
/// variance is at most 2d T and T <= tr(O_0^2).
double bound_t(const OOperator& o);

/// Average variance of uniformly sampled complete MUBs, (1 + 1/d) tr(O_0^2).
/// Reported for comparison only.
double mub_average_variance(const HermitianObservable& o);

struct BoundAuditRow {
    std::string state_id;
    double variance_exact = 0.0;
    double v_diag = 0.0;
    double worst_bound = 0.0;
    double avg_bound = 0.0;
    /// variance_exact / tr(O_0^2); 0 when O is proportional to I.
    double ratio = 0.0;
    bool maximally_mixed = false;
};

struct BoundAudit {
    std::vector<BoundAuditRow> rows;
    double traceless_hs_norm_sq = 0.0;
    double mub_average_constant = 0.0;
};

/// A state broke the 2d tr(O_0^2) bound (or 2 tr(O_0^2) for I/d).
class BoundViolation : public InvariantViolation {
public:
    BoundViolation(const std::string& what, std::string state_json)
        : InvariantViolation(what), state_json_(std::move(state_json)) {}

    const std::string& state_json() const { return state_json_; }

private:
    std::string state_json_;
};

/// Evaluates variance_exact for each state and asserts the worst-case bound,
/// plus the average bound for states equal to I/d. Throws BoundViolation on
/// the first failure. ids default to "state_<i>".
BoundAudit check_bounds(const HermitianObservable& o, std::span<const DensityMatrix> states,
                        std::span<const std::string> ids = {});

/// CSV: state_id,variance_exact,v_diag,worst_bound,avg_bound,ratio
std::string bound_audit_csv(const BoundAudit& audit, const std::string& comment = {});

} // namespace ddbst
