#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddbst/channel.hpp"
#include "ddbst/ensemble.hpp"
#include "ddbst/linalg.hpp"

namespace ddbst {

struct ShotRecord {
    SnapshotId snapshot;
    std::uint64_t shot_index = 0;

    friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

enum class Strategy { Mean, MedianOfMeans };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

struct EstimationConfig {
    std::uint64_t shots = 1000;
    Strategy strategy = Strategy::Mean;
    /// Number of median-of-means batches; ignored by Strategy::Mean.
    std::uint64_t batches = 1;
    std::uint64_t seed = 0;
    double epsilon = 0.1;
    double sigma = 0.05;
    unsigned workers = 1;
    bool keep_log = false;

    /// Throws InvalidParameter on shots == 0, batches outside [1, shots],
    /// epsilon <= 0, sigma outside (0, 1) or workers == 0.
    void validate() const;
};

struct EstimationReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t shots_used = 0;
    Strategy strategy = Strategy::Mean;
    std::uint64_t batches = 1;
    std::uint64_t seed = 0;
    std::optional<std::vector<ShotRecord>> shadow_log;
};

/// Outcome probabilities of one DDB-ST measurement, indexed by snapshot_index.
class SnapshotDistribution {
public:
    SnapshotDistribution(Index dim, std::vector<double> probabilities);

    Index dim() const { return dim_; }
    double operator()(const SnapshotId& s) const { return prob_[snapshot_index(s, dim_)]; }
    const std::vector<double>& probabilities() const { return prob_; }
    double total() const;

private:
    Index dim_;
    std::vector<double> prob_;
};

/// P(s) = (prior weight of the bases containing s) * tr(rho s).
SnapshotDistribution exact_snapshot_distribution(const DensityMatrix& rho,
                                                 const DDBEnsemble& ensemble);

/// Basis-then-Born measurement simulator with the per-basis outcome
/// distributions tabulated once (O(d^2) memory, O(log d) per shot).
class ShotSampler {
public:
    ShotSampler(const DensityMatrix& rho, const DDBEnsemble& ensemble);

    Index dim() const { return dim_; }
    ShotRecord sample(RandomStream& rng, std::uint64_t shot_index = 0) const;

private:
    Index dim_;
    const DDBEnsemble* ensemble_;
    /// slot -> basis, one slot per 1/(2d) of weight.
    std::vector<std::uint32_t> slot_basis_;
    /// Row b holds the cumulative Born probabilities of basis b.
    std::vector<double> cumulative_;
};

/// One measurement: pick a basis by weight, then an outcome by the Born rule.
ShotRecord simulate_shot(const DensityMatrix& rho, const DDBEnsemble& ensemble,
                         RandomStream& rng, std::uint64_t shot_index = 0);

/// Simulates cfg.shots measurements and maps each to a real value. Shots
/// are generated in fixed-size blocks, block b drawing from stream
/// derive_stream_id(cfg.seed, b); the output is identical for any worker count.
std::vector<double> sample_shot_values(const ShotSampler& sampler, const EstimationConfig& cfg,
                                       const std::function<double(const SnapshotId&)>& value,
                                       std::vector<ShotRecord>* log = nullptr);

struct Aggregate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Mean: sample mean with std/sqrt(m). Median of means: median of K
/// contiguous batch means, with std_error = (std of batch means)/sqrt(K).
/// K = 1 falls back to the mean.
Aggregate aggregate_values(std::span<const double> values, Strategy strategy,
                           std::uint64_t batches);

EstimationReport estimate(const DensityMatrix& rho, const ObservableEntryAccessor& o,
                          const DDBEnsemble& ensemble, const EstimationConfig& cfg);

/// Absolute constant used for the O(.) in the sample-complexity bound.
inline constexpr double kShotPlanConstant = 34.0;

/// ceil(34 ln(2L/sigma) / epsilon^2 * variance_bound).
std::uint64_t plan_shots(std::uint64_t num_observables, double sigma, double epsilon,
                         double variance_bound);
/// ceil(2 ln(2L/sigma)), the matching median-of-means batch count.
std::uint64_t plan_batches(std::uint64_t num_observables, double sigma);

// ---------------------------------------------------------------------------
// Shadow logs.
//
// Binary layout, little endian:
//   magic "DDBSHAD1" (8 bytes) | u32 dim | u32 bits_per_record
//   | u64 shot_count | u64 first_shot_index | packed snapshot indices
// Each record is snapshot_index(s, dim) in bits_per_record = ceil(log2(2 d^2))
// bits, LSB first. Shot indices are consecutive from first_shot_index.

struct ShadowLog {
    Index dim = 0;
    std::vector<ShotRecord> records;
};

/// Framing or content error while decoding a shadow log.
class ShadowFramingError : public ParseError {
public:
    ShadowFramingError(const std::string& what, std::uint64_t record_index)
        : ParseError(what + " (record " + std::to_string(record_index) + ")"),
          record_index_(record_index) {}

    std::uint64_t record_index() const { return record_index_; }

private:
    std::uint64_t record_index_;
};

inline constexpr std::size_t kShadowHeaderBytes = 8 + 4 + 4 + 8 + 8;

unsigned shadow_bits_per_record(Index d);

std::vector<std::uint8_t> serialize_shadow(std::span<const ShotRecord> log, Index d);
ShadowLog deserialize_shadow(std::span<const std::uint8_t> bytes);

/// CSV with header shot_index,kind,i,j (j repeats i for Comp).
std::string shadow_to_csv(std::span<const ShotRecord> log);

} // namespace ddbst
