#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddbst/ensemble.hpp"
#include "ddbst/linalg.hpp"
#include "ddbst/variance.hpp"

namespace ddbst {

/// max over all 2d^2 - d snapshots of |tr(rho s) - 1/d|.
double max_deviation(const DensityMatrix& rho, const DDBEnsemble& ensemble);
double max_deviation(const DensityMatrix& rho);
/// Same quantity for |psi><psi| without forming the density matrix.
double max_deviation_pure(const ComplexVector& psi);

/// True iff max_deviation(rho) <= s/d (ties count as inside). s must be > 0.
bool classify(const DensityMatrix& rho, double s, const DDBEnsemble& ensemble);
bool classify_deviation(double deviation, double s, Index d);

/// Threshold written as a polynomial in the qubit count n: c + a n + b n^2.
/// Parsed from strings such as "4", "2n", "n^2", "0.5n^2".
struct ThresholdExpr {
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::string label;

    double at(int n) const { return c + a * n + b * static_cast<double>(n) * n; }
    static ThresholdExpr parse(const std::string& text);
};

enum class StateFamily { HaarPure, HsMixed };
std::string_view family_name(StateFamily f);
StateFamily parse_family(std::string_view name);

struct AverageStudyConfig {
    std::vector<int> qubit_range{2, 3, 4, 5, 6, 7, 8};
    std::uint64_t trials_per_dim = 1000;
    std::vector<ThresholdExpr> thresholds;
    std::uint64_t seed = 0;
    StateFamily state_family = StateFamily::HaarPure;
    unsigned workers = 1;
    /// Largest qubit count accepted (d = 2^n).
    int max_qubits = 10;

    void validate() const;
};

struct ProportionRow {
    int n = 0;
    Index d = 0;
    std::string threshold_label;
    double s = 0.0;
    double fraction = 0.0;
    std::uint64_t trials = 0;
};

struct ProportionTable {
    std::vector<ProportionRow> rows;

    std::string to_csv(const std::string& comment = {}) const;
    /// {"series": {label: [{n, d, s, fraction}, ...]}, "trials": ...}
    nlohmann::json to_json() const;
};

/// Draws trials_per_dim states per n (one stream per (n, trial)) and reports,
/// for every threshold, the fraction classified as approximately average.
/// All thresholds at a given n are evaluated on the same state set.
ProportionTable run_proportion_study(const AverageStudyConfig& cfg);

struct Lemma1Row {
    std::string state_id;
    double max_deviation = 0.0;
    double variance_exact = 0.0;
    double bound = 0.0;
};

struct Lemma1Audit {
    double s = 0.0;
    double traceless_hs_norm_sq = 0.0;
    std::vector<Lemma1Row> rows;
};

/// Checks variance_exact(rho, O) <= 2(s+1) tr(O_0^2) for every state. States
/// must pass classify at threshold s (InvalidParameter otherwise); a bound
/// failure throws BoundViolation carrying the state.
Lemma1Audit lemma1_variance_audit(std::span<const DensityMatrix> states,
                                  const HermitianObservable& o, double s);

} // namespace ddbst
