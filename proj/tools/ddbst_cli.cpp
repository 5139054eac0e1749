// Command-line driver: estimation, variance audits, the average-state study,
// the stabilizer pipeline, timing benchmarks and ensemble dumps.
//
// Exit codes: 0 ok, 2 usage or invalid parameter, 3 unreadable input,
// 4 invariant violation.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddbst/average_study.hpp"
#include "ddbst/channel.hpp"
#include "ddbst/ensemble.hpp"
#include "ddbst/estimator.hpp"
#include "ddbst/io.hpp"
#include "ddbst/stabilizer.hpp"
#include "ddbst/variance.hpp"

namespace fs = std::filesystem;
using namespace ddbst;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitInvariant = 4;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// Collects outputs and writes manifest.json after everything else.
class RunOutput {
public:
    RunOutput(std::string command, fs::path dir, std::uint64_t seed)
        : command_(std::move(command)), dir_(std::move(dir)), seed_(seed), started_(utc_now()) {
        fs::create_directories(dir_);
    }

    json& config() { return config_; }

    void write(const std::string& name, const std::string& bytes) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) throw std::runtime_error("failed to write " + p.string());
        files_.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    std::string csv_comment() const {
        return "ddbst " + std::string(DDBST_VERSION) + " seed=" + std::to_string(seed_);
    }

    void finish() {
        json manifest = {{"command", command_},
                         {"version", DDBST_VERSION},
                         {"seed", seed_},
                         {"config", config_},
                         {"started", started_},
                         {"finished", utc_now()},
                         {"outputs", files_}};
        const fs::path p = dir_ / "manifest.json";
        const fs::path tmp = dir_ / "manifest.json.tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << manifest.dump(2) << "\n";
            if (!out) throw std::runtime_error("failed to write manifest");
        }
        fs::rename(tmp, p);
    }

private:
    std::string command_;
    fs::path dir_;
    std::uint64_t seed_;
    std::string started_;
    json config_ = json::object();
    json files_ = json::array();
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("DDBST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidParameter("DDBST_SEED is not an unsigned integer");
        }
    }
    return 0;
}

std::vector<int> parse_range(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dots));
            const int hi = std::stoi(text.substr(dots + 2));
            if (hi < lo) throw InvalidParameter("empty range '" + text + "'");
            for (int n = lo; n <= hi; ++n) out.push_back(n);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        }
    } catch (const std::logic_error&) {
        throw InvalidParameter("cannot parse range '" + text + "'");
    }
    if (out.empty()) throw InvalidParameter("empty range '" + text + "'");
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Common {
    std::string out_dir = "ddbst_out";
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

DensityMatrix make_state(const std::string& kind, Index d, const std::string& file, double bound,
                         std::uint64_t seed) {
    RandomStream rng(seed, derive_stream_id(0x5354, 0));
    if (kind == "maximally-mixed") return DensityMatrix::maximally_mixed(d);
    if (kind == "haar") return haar_random_pure(d, rng);
    if (kind == "hs") return hs_random_mixed(d, rng);
    if (kind == "rho-a") return make_rho_a(d, bound, rng);
    if (kind == "file") {
        if (file.empty()) throw InvalidParameter("--state file needs --state-file");
        DensityMatrix rho = density_from_json(read_json_file(file));
        if (rho.dim() != d) throw DimensionError("state file dimension differs from --dim");
        return rho;
    }
    throw InvalidParameter("unknown state kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    Index dim = 0;
    std::string state = "maximally-mixed";
    std::string state_file;
    double rho_a_bound = 0.0;
    std::string observable;
    std::uint64_t shots = 1000;
    std::string strategy = "mean";
    std::uint64_t batches = 0;
    bool oracle = false;
    bool shadow_log = false;
};

void run_estimate(const Common& c, const EstimateArgs& a) {
    const HermitianObservable o = observable_from_json(read_json_file(a.observable));
    const Index d = a.dim ? a.dim : o.dim();
    if (o.dim() != d) throw DimensionError("observable dimension differs from --dim");
    const DensityMatrix rho = make_state(a.state, d, a.state_file, a.rho_a_bound, c.seed);

    EstimationConfig cfg;
    cfg.shots = a.shots;
    cfg.strategy = parse_strategy(a.strategy);
    cfg.batches = cfg.strategy == Strategy::Mean ? 1 : (a.batches ? a.batches : plan_batches(1, cfg.sigma));
    cfg.seed = c.seed;
    cfg.workers = c.workers;
    cfg.keep_log = a.shadow_log;
    cfg.validate();

    RunOutput out("estimate", c.out_dir, c.seed);
    out.config() = {{"dim", d},         {"state", a.state},     {"observable", a.observable},
                    {"shots", a.shots}, {"strategy", a.strategy}, {"batches", cfg.batches},
                    {"oracle", a.oracle}, {"workers", c.workers}};

    const auto report = estimate(rho, ObservableEntryAccessor::from_dense(o), build_ensemble(d), cfg);
    json j = estimation_report_to_json(report);
    j["dim"] = d;
    j["state"] = a.state;
    if (a.oracle) {
        const double truth = trace_inner(rho.matrix(), o.matrix()).real();
        j["oracle"] = truth;
        j["abs_error"] = std::abs(report.estimate - truth);
    }
    out.write_json("report.json", j);
    if (report.shadow_log) {
        const auto bytes = serialize_shadow(*report.shadow_log, d);
        out.write("shadow.bin", std::string(bytes.begin(), bytes.end()));
    }
    out.finish();
    std::cout << "estimate " << std::setprecision(12) << report.estimate << " +- " << report.std_error
              << "\n";
}

// ---------------------------------------------------------------------------

struct VarianceArgs {
    Index dim = 8;
    std::string observable;
    bool worst_case_demo = false;
    std::uint64_t states = 100;
    std::string family = "haar";
    double rho_a_bound = 0.0;
    double random_norm = 1.0;
};

void run_variance(const Common& c, const VarianceArgs& a) {
    std::vector<DensityMatrix> states;
    std::vector<std::string> ids;
    std::optional<HermitianObservable> obs;
    Index d = a.dim;
    if (a.worst_case_demo) {
        const auto s = SnapshotId::pair(SnapshotKind::RealPlus, 0, 1);
        states.push_back(DensityMatrix::from_pure(snapshot_vector(s, d)));
        ids.push_back("P01_plus");
        obs.emplace(snapshot_projector(s, d));
    } else {
        if (!a.observable.empty()) {
            obs.emplace(observable_from_json(read_json_file(a.observable)));
            d = obs->dim();
        } else {
            RandomStream rng(c.seed, derive_stream_id(0x4f42, 0));
            obs.emplace(random_observable(d, a.random_norm, rng));
        }
        for (std::uint64_t i = 0; i < a.states; ++i) {
            RandomStream rng(c.seed, derive_stream_id(0x5641, i));
            if (a.family == "haar") {
                states.push_back(haar_random_pure(d, rng));
            } else if (a.family == "hs") {
                states.push_back(hs_random_mixed(d, rng));
            } else if (a.family == "rho-a") {
                states.push_back(make_rho_a(d, a.rho_a_bound, rng));
            } else {
                throw InvalidParameter("unknown family '" + a.family + "'");
            }
            ids.push_back(a.family + "_" + std::to_string(i));
        }
        states.push_back(DensityMatrix::maximally_mixed(d));
        ids.push_back("maximally_mixed");
    }

    RunOutput out("variance", c.out_dir, c.seed);
    out.config() = {{"dim", d},
                    {"observable", a.observable},
                    {"worst_case_demo", a.worst_case_demo},
                    {"states", a.states},
                    {"family", a.family}};
    const BoundAudit audit = check_bounds(*obs, states, ids);
    out.write("variance.csv", bound_audit_csv(audit, out.csv_comment()));
    out.write_json("summary.json", {{"dim", d},
                                    {"traceless_hs_norm_sq", audit.traceless_hs_norm_sq},
                                    {"mub_average_constant", audit.mub_average_constant},
                                    {"rows", audit.rows.size()}});
    out.finish();
    double max_ratio = 0.0;
    for (const auto& r : audit.rows) max_ratio = std::max(max_ratio, r.ratio);
    std::cout << "audited " << audit.rows.size() << " states, max ratio " << max_ratio << "\n";
}

// ---------------------------------------------------------------------------

struct Fig1Args {
    std::string n_range = "2..8";
    std::uint64_t trials = 1000;
    std::string thresholds = "4,2n,n^2";
    std::string family = "haar";
};

void run_fig1(const Common& c, const Fig1Args& a) {
    AverageStudyConfig cfg;
    cfg.qubit_range = parse_range(a.n_range);
    cfg.trials_per_dim = a.trials;
    for (const auto& t : split_commas(a.thresholds)) cfg.thresholds.push_back(ThresholdExpr::parse(t));
    cfg.seed = c.seed;
    cfg.state_family = parse_family(a.family);
    cfg.workers = c.workers;
    cfg.validate();

    RunOutput out("fig1", c.out_dir, c.seed);
    out.config() = {{"n_range", a.n_range},
                    {"trials", a.trials},
                    {"thresholds", a.thresholds},
                    {"family", a.family},
                    {"workers", c.workers}};
    const ProportionTable table = run_proportion_study(cfg);
    out.write("fig1.csv", table.to_csv(out.csv_comment()));
    out.write_json("fig1.json", table.to_json());
    out.finish();
    for (const auto& r : table.rows) {
        std::cout << "n=" << r.n << " s=" << r.threshold_label << " fraction=" << r.fraction << "\n";
    }
}

// ---------------------------------------------------------------------------

struct StabilizerArgs {
    int n = 4;
    int r = 2;
    std::string observable;
    double random_norm = 4.0;
    double epsilon = 0.1;
    double sigma = 0.05;
    std::string l2_mode = "exact";
    std::string state_file;
    int direct_max_rank = 10;
    std::string strategy = "mean";
};

void run_stabilizer(const Common& c, const StabilizerArgs& a) {
    AffineStabilizerState psi;
    if (!a.state_file.empty()) {
        psi = stabilizer_from_json(read_json_file(a.state_file));
    } else {
        if (a.n < 1 || a.n > kStabilizerDenseCap) {
            throw InvalidParameter("--n must lie in [1, " + std::to_string(kStabilizerDenseCap) + "]");
        }
        if (a.r < 0 || a.r > a.n) throw InvalidParameter("--r must lie in [0, n]");
        RandomStream rng(c.seed, derive_stream_id(0x5354, 1));
        psi = random_affine_stabilizer(a.n, a.r, rng);
    }
    const Index d = Index{1} << psi.n;
    HermitianObservable o = [&] {
        if (!a.observable.empty()) return observable_from_json(read_json_file(a.observable));
        RandomStream rng(c.seed, derive_stream_id(0x4f42, 1));
        return random_observable(d, a.random_norm, rng);
    }();
    if (o.dim() != d) throw DimensionError("observable dimension is not 2^n");

    EstimationConfig cfg;
    cfg.seed = c.seed;
    cfg.epsilon = a.epsilon;
    cfg.sigma = a.sigma;
    cfg.workers = c.workers;
    cfg.strategy = parse_strategy(a.strategy);
    Theorem3Config t3;
    t3.direct_max_rank = a.direct_max_rank;
    const L2Mode mode = parse_l2_mode(a.l2_mode);
    cfg.validate();

    RunOutput out("stabilizer", c.out_dir, c.seed);
    out.config() = {{"n", psi.n},
                    {"r", psi.r},
                    {"observable", a.observable},
                    {"epsilon", a.epsilon},
                    {"sigma", a.sigma},
                    {"l2_mode", a.l2_mode},
                    {"direct_max_rank", a.direct_max_rank}};
    const auto acc = ObservableEntryAccessor::from_dense(o);
    const Theorem3Report rep = theorem3_estimate(psi, acc, o.hs_norm_sq(), cfg, mode, t3);
    json j = rep.to_json();
    j["state"] = stabilizer_to_json(psi);
    if (psi.n <= kStabilizerDenseCap) {
        const ComplexVector v = amplitudes(psi);
        const double truth = (v.adjoint() * o.matrix() * v)(0, 0).real();
        j["oracle"] = truth;
        j["abs_error"] = std::abs(rep.final_estimate - truth);
    }
    out.write_json("stabilizer.json", j);
    out.finish();
    std::cout << "final " << std::setprecision(12) << rep.final_estimate << " (r=" << rep.r_used
              << ", shots=" << rep.shots << ")\n";
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string dims = "16,64,256,1024,4096";
    std::string oracle_dims = "64,128,256,512,1024";
    std::string qubits = "8,12,16,20,24,28,32";
    std::uint64_t shots = 1000000;
    int repeats = 5;
};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return den > 0 ? num / den : 0.0;
}

template <typename F>
double min_seconds(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void run_bench(const Common& c, const BenchArgs& a) {
    if (a.repeats < 1) throw InvalidParameter("--repeats must be positive");
    if (a.shots == 0) throw InvalidParameter("--shots must be positive");
    RunOutput out("bench", c.out_dir, c.seed);
    out.config() = {{"dims", a.dims},
                    {"oracle_dims", a.oracle_dims},
                    {"qubits", a.qubits},
                    {"shots", a.shots},
                    {"repeats", a.repeats}};
    std::ostringstream csv;
    csv << "# " << out.csv_comment() << "\n"
        << "section,size,seconds_per_op\n"
        << std::setprecision(9);
    json summary = json::object();

    std::vector<double> xs, ys;
    for (int d : parse_range(a.dims)) {
        check_dim(d);
        // Entries computed on demand; the benchmark never materializes O.
        const ObservableEntryAccessor acc(d, 0.0, [](Index j, Index k) {
            return Complex{std::cos(0.1 * static_cast<double>(j - k)),
                           j == k ? 0.0 : std::sin(0.1 * static_cast<double>(j - k))};
        });
        RandomStream rng(c.seed, derive_stream_id(0x4245, static_cast<std::uint64_t>(d)));
        std::vector<SnapshotId> shots(a.shots);
        for (auto& s : shots) s = draw_random_snapshot(d, rng);
        double sink = 0.0;
        const double t = min_seconds(a.repeats, [&] {
            for (const auto& s : shots) sink += single_shot_estimate(s, acc).value;
        });
        if (sink == 42.0) std::cout << "";
        csv << "per_shot," << d << "," << t / static_cast<double>(a.shots) << "\n";
        xs.push_back(d);
        ys.push_back(t / static_cast<double>(a.shots));
    }
    summary["per_shot_slope"] = slope(xs, ys);
    summary["per_shot_ratio_last_first"] = ys.back() / ys.front();

    xs.clear();
    ys.clear();
    for (int d : parse_range(a.oracle_dims)) {
        check_dim(d);
        RandomStream rng(c.seed, derive_stream_id(0x4246, static_cast<std::uint64_t>(d)));
        const ComplexMatrix x = random_hermitian(d, rng);
        const ComplexMatrix y = random_hermitian(d, rng);
        Complex sink{0.0, 0.0};
        const double t = min_seconds(a.repeats, [&] { sink += trace_inner(x, y); });
        if (sink == Complex{42.0, 0.0}) std::cout << "";
        csv << "dense_oracle," << d << "," << t << "\n";
        xs.push_back(d);
        ys.push_back(t);
    }
    summary["dense_oracle_slope"] = slope(xs, ys);

    xs.clear();
    ys.clear();
    for (int n : parse_range(a.qubits)) {
        if (n < 1 || n > kStabilizerIndexCap) throw InvalidParameter("qubit count out of range");
        RandomStream rng(c.seed, derive_stream_id(0x4247, static_cast<std::uint64_t>(n)));
        const auto psi = random_affine_stabilizer(n, n / 2, rng);
        const int inner = 200;
        const double t = min_seconds(a.repeats, [&] {
            for (int i = 0; i < inner; ++i) {
                const auto red = reduce_to_block(psi);
                if (red.pi.n() != n) std::cout << "";
            }
        });
        csv << "reduction," << n << "," << t / inner << "\n";
        xs.push_back(n);
        ys.push_back(t / inner);
    }
    summary["reduction_slope"] = slope(xs, ys);

    out.write("bench.csv", csv.str());
    out.write_json("bench.json", summary);
    out.finish();
    std::cout << summary.dump(2) << "\n";
}

void run_ensemble(const Common& c, Index d) {
    RunOutput out("ensemble", c.out_dir, c.seed);
    out.config() = {{"dim", d}};
    out.write_json("ensemble.json", ensemble_summary_json(build_ensemble(d)));
    out.finish();
    std::cout << "wrote ensemble for d=" << d << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dense dual basis shadow tomography toolkit"};
    app.set_version_flag("--version", DDBST_VERSION);
    app.require_subcommand(1);

    Common common;
    try {
        common.seed = default_seed();
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "random seed (default: $DDBST_SEED or 0)");
        sub->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    };

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "estimate tr(rho O) from simulated measurements");
    add_common(e);
    e->add_option("--dim", est.dim, "dimension (defaults to the observable's)")->check(CLI::Range(2, 4096));
    e->add_option("--state", est.state, "maximally-mixed|haar|hs|rho-a|file")
        ->check(CLI::IsMember({"maximally-mixed", "haar", "hs", "rho-a", "file"}));
    e->add_option("--state-file", est.state_file, "state JSON for --state file");
    e->add_option("--rho-a-bound", est.rho_a_bound, "off-diagonal bound for --state rho-a");
    e->add_option("--observable", est.observable, "observable JSON")->required();
    e->add_option("--shots", est.shots, "number of measurements")->check(CLI::PositiveNumber);
    e->add_option("--strategy", est.strategy, "mean|median_of_means");
    e->add_option("--batches", est.batches, "median-of-means batches (default planned from sigma)");
    e->add_flag("--oracle", est.oracle, "include the dense tr(rho O) and the absolute error");
    e->add_flag("--shadow-log", est.shadow_log, "write the binary shadow log");

    VarianceArgs var;
    auto* v = app.add_subcommand("variance", "exact single-shot variance and bound audit");
    add_common(v);
    v->add_option("--dim", var.dim, "dimension")->check(CLI::Range(2, 4096));
    v->add_option("--observable", var.observable, "observable JSON (default: random)");
    v->add_option("--observable-norm", var.random_norm, "tr(O^2) of the random observable");
    v->add_flag("--worst-case-demo", var.worst_case_demo, "sigma = O = projector onto (|0>+|1>)/sqrt2");
    v->add_option("--states", var.states, "number of random states");
    v->add_option("--family", var.family, "haar|hs|rho-a");
    v->add_option("--rho-a-bound", var.rho_a_bound, "off-diagonal bound for rho-a states");

    Fig1Args fig;
    auto* f = app.add_subcommand("fig1", "proportion of approximately average states");
    add_common(f);
    f->add_option("--n-range", fig.n_range, "qubit counts, e.g. 2..8 or 2,4,6");
    f->add_option("--trials", fig.trials, "states per qubit count");
    f->add_option("--thresholds", fig.thresholds, "comma-separated, e.g. 4,2n,n^2");
    f->add_option("--family", fig.family, "haar|hs");

    StabilizerArgs st;
    auto* s = app.add_subcommand("stabilizer", "stabilizer-state estimation by block reduction");
    add_common(s);
    s->add_option("--n", st.n, "qubits");
    s->add_option("--r", st.r, "rank of the support");
    s->add_option("--observable", st.observable, "observable JSON (default: random)");
    s->add_option("--observable-norm", st.random_norm, "tr(O^2) of the random observable");
    s->add_option("--epsilon", st.epsilon, "target additive error");
    s->add_option("--sigma", st.sigma, "failure probability");
    s->add_option("--l2-mode", st.l2_mode, "neglect|exact|bound_report");
    s->add_option("--state", st.state_file, "stabilizer state JSON");
    s->add_option("--direct-max-rank", st.direct_max_rank, "evaluate exactly when r <= this");
    s->add_option("--strategy", st.strategy, "mean|median_of_means");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "timing benchmarks");
    add_common(b);
    b->add_option("--dims", bench.dims, "dimensions for per-shot timing");
    b->add_option("--oracle-dims", bench.oracle_dims, "dimensions for the dense tr(AB) baseline");
    b->add_option("--qubits", bench.qubits, "qubit counts for the reduction timing");
    b->add_option("--shots", bench.shots, "shots per timing run");
    b->add_option("--repeats", bench.repeats, "repeats; the minimum is reported");

    Index ens_dim = 4;
    auto* en = app.add_subcommand("ensemble", "dump the bases and partitions for one dimension");
    add_common(en);
    en->add_option("--dim", ens_dim, "dimension")->check(CLI::Range(2, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*e) run_estimate(common, est);
        if (*v) run_variance(common, var);
        if (*f) run_fig1(common, fig);
        if (*s) run_stabilizer(common, st);
        if (*b) run_bench(common, bench);
        if (*en) run_ensemble(common, ens_dim);
    } catch (const InvalidParameter& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return kExitParse;
    } catch (const BoundViolation& err) {
        std::cerr << "invariant violation: " << err.what() << "\nstate: " << err.state_json() << "\n";
        return kExitInvariant;
    } catch (const Error& err) {
        std::cerr << "invariant violation: " << err.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
