#include "ddbst/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace ddbst {

namespace {

constexpr std::uint64_t kShotBlock = 8192;

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string_view strategy_name(Strategy s) {
    return s == Strategy::Mean ? "mean" : "median_of_means";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "mean") return Strategy::Mean;
    if (name == "median_of_means" || name == "mom") return Strategy::MedianOfMeans;
    throw InvalidParameter("unknown strategy '" + std::string(name) + "'");
}

void EstimationConfig::validate() const {
    if (shots == 0) throw InvalidParameter("shots must be positive");
    if (strategy == Strategy::MedianOfMeans && (batches == 0 || batches > shots)) {
        throw InvalidParameter("median-of-means batches must lie in [1, shots]");
    }
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidParameter("sigma must lie in (0, 1)");
    if (workers == 0) throw InvalidParameter("workers must be positive");
}

SnapshotDistribution::SnapshotDistribution(Index dim, std::vector<double> probabilities)
    : dim_(dim), prob_(std::move(probabilities)) {
    if (prob_.size() != snapshot_count(dim_)) {
        throw DimensionError("distribution size does not match 2d^2 - d");
    }
}

double SnapshotDistribution::total() const {
    return std::accumulate(prob_.begin(), prob_.end(), 0.0);
}

SnapshotDistribution exact_snapshot_distribution(const DensityMatrix& rho,
                                                 const DDBEnsemble& ensemble) {
    const Index d = ensemble.dim();
    if (rho.dim() != d) throw DimensionError("state and ensemble dimensions differ");
    std::vector<double> prob(snapshot_count(d), 0.0);
    for (const auto& basis : ensemble.bases()) {
        const double w = basis.weight();
        for (const auto& s : basis.members) {
            prob[snapshot_index(s, d)] += w * snapshot_overlap(rho, s);
        }
    }
    return SnapshotDistribution(d, std::move(prob));
}

ShotSampler::ShotSampler(const DensityMatrix& rho, const DDBEnsemble& ensemble)
    : dim_(ensemble.dim()), ensemble_(&ensemble) {
    if (rho.dim() != dim_) throw DimensionError("state and ensemble dimensions differ");
    const auto& bases = ensemble.bases();
    for (std::size_t b = 0; b < bases.size(); ++b) {
        for (std::uint32_t n = 0; n < bases[b].weight_num; ++n) {
            slot_basis_.push_back(static_cast<std::uint32_t>(b));
        }
    }
    const auto d = static_cast<std::size_t>(dim_);
    cumulative_.resize(bases.size() * d);
    for (std::size_t b = 0; b < bases.size(); ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            acc += std::max(0.0, snapshot_overlap(rho, bases[b].members[i]));
            cumulative_[b * d + i] = acc;
        }
    }
}

ShotRecord ShotSampler::sample(RandomStream& rng, std::uint64_t shot_index) const {
    const std::uint32_t b = slot_basis_[rng.below(slot_basis_.size())];
    const auto d = static_cast<std::size_t>(dim_);
    const double* row = cumulative_.data() + b * d;
    const double u = rng.uniform() * row[d - 1];
    std::size_t i = static_cast<std::size_t>(std::upper_bound(row, row + d, u) - row);
    i = std::min(i, d - 1);
    // Skip zero-probability outcomes that upper_bound can land on only
    // through rounding at the row end.
    while (i > 0 && row[i] == row[i - 1]) --i;
    return {ensemble_->bases()[b].members[i], shot_index};
}

ShotRecord simulate_shot(const DensityMatrix& rho, const DDBEnsemble& ensemble,
                         RandomStream& rng, std::uint64_t shot_index) {
    const Index d = ensemble.dim();
    if (rho.dim() != d) throw DimensionError("state and ensemble dimensions differ");
    const auto& bases = ensemble.bases();
    std::uint64_t slot = rng.below(2 * static_cast<std::uint64_t>(d));
    std::size_t b = 0;
    while (slot >= bases[b].weight_num) {
        slot -= bases[b].weight_num;
        ++b;
    }
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(d));
    double total = 0.0;
    for (const auto& s : bases[b].members) {
        probs.push_back(std::max(0.0, snapshot_overlap(rho, s)));
        total += probs.back();
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    while (probs[pick] == 0.0 && pick > 0) --pick;
    return {bases[b].members[pick], shot_index};
}

std::vector<double> sample_shot_values(const ShotSampler& sampler, const EstimationConfig& cfg,
                                       const std::function<double(const SnapshotId&)>& value,
                                       std::vector<ShotRecord>* log) {
    cfg.validate();
    const std::uint64_t m = cfg.shots;
    std::vector<double> values(m);
    if (log) log->assign(m, ShotRecord{});
    const std::uint64_t num_blocks = (m + kShotBlock - 1) / kShotBlock;

    auto run_block = [&](std::uint64_t block) {
        RandomStream rng(cfg.seed, derive_stream_id(0x5348u, block));
        const std::uint64_t begin = block * kShotBlock;
        const std::uint64_t end = std::min(m, begin + kShotBlock);
        for (std::uint64_t i = begin; i < end; ++i) {
            ShotRecord rec = sampler.sample(rng, i);
            values[i] = value(rec.snapshot);
            if (log) (*log)[i] = rec;
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(cfg.workers, num_blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < num_blocks; ++b) run_block(b);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = w; b < num_blocks; b += workers) run_block(b);
            });
        }
    }
    return values;
}

Aggregate aggregate_values(std::span<const double> values, Strategy strategy,
                           std::uint64_t batches) {
    if (values.empty()) throw InvalidParameter("cannot aggregate an empty sample");
    const double mean = mean_of(values);
    Aggregate out{mean, sample_std(values, mean) / std::sqrt(static_cast<double>(values.size()))};
    if (strategy == Strategy::Mean || batches <= 1) return out;
    if (batches > values.size()) throw InvalidParameter("more batches than shots");

    const std::size_t m = values.size();
    const std::size_t k = batches;
    std::vector<double> batch_means;
    batch_means.reserve(k);
    std::size_t begin = 0;
    for (std::size_t b = 0; b < k; ++b) {
        const std::size_t len = m / k + (b < m % k ? 1 : 0);
        batch_means.push_back(mean_of(values.subspan(begin, len)));
        begin += len;
    }
    const double batch_mean = mean_of(batch_means);
    out.std_error = sample_std(batch_means, batch_mean) / std::sqrt(static_cast<double>(k));
    out.estimate = median_of(std::move(batch_means));
    return out;
}

EstimationReport estimate(const DensityMatrix& rho, const ObservableEntryAccessor& o,
                          const DDBEnsemble& ensemble, const EstimationConfig& cfg) {
    cfg.validate();
    if (o.dim() != ensemble.dim() || rho.dim() != ensemble.dim()) {
        throw DimensionError("state, observable and ensemble dimensions differ");
    }
    ShotSampler sampler(rho, ensemble);
    std::vector<ShotRecord> log;
    const auto values = sample_shot_values(
        sampler, cfg, [&o](const SnapshotId& s) { return single_shot_estimate(s, o).value; },
        cfg.keep_log ? &log : nullptr);
    const auto agg = aggregate_values(values, cfg.strategy, cfg.batches);

    EstimationReport report;
    report.estimate = agg.estimate;
    report.std_error = agg.std_error;
    report.shots_used = values.size();
    report.strategy = cfg.strategy;
    report.batches = cfg.strategy == Strategy::Mean ? 1 : cfg.batches;
    report.seed = cfg.seed;
    if (cfg.keep_log) report.shadow_log = std::move(log);
    return report;
}

std::uint64_t plan_shots(std::uint64_t num_observables, double sigma, double epsilon,
                         double variance_bound) {
    if (num_observables == 0) throw InvalidParameter("need at least one observable");
    if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidParameter("sigma must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (!(variance_bound >= 0.0) || !std::isfinite(variance_bound)) {
        throw InvalidParameter("variance bound must be finite and non-negative");
    }
    const double n = kShotPlanConstant * std::log(2.0 * static_cast<double>(num_observables) / sigma) /
                     (epsilon * epsilon) * variance_bound;
    return static_cast<std::uint64_t>(std::ceil(n));
}

std::uint64_t plan_batches(std::uint64_t num_observables, double sigma) {
    if (num_observables == 0) throw InvalidParameter("need at least one observable");
    if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidParameter("sigma must lie in (0, 1)");
    const double k = std::ceil(2.0 * std::log(2.0 * static_cast<double>(num_observables) / sigma));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(k));
}

} // namespace ddbst
