#include "ddbst/average_study.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>

#include "ddbst/io.hpp"

namespace ddbst {

namespace {

// Pair snapshots on (j, k) have overlaps a +- Re rho_jk and a -+ Im rho_jk
// with a = (rho_jj + rho_kk)/2, so the largest deviation among the four is
// |a - 1/d| + max(|Re rho_jk|, |Im rho_jk|).
template <typename Diag, typename Off>
double scan_deviation(Index d, Diag diag, Off off) {
    const double inv_d = 1.0 / static_cast<double>(d);
    double best = 0.0;
    for (Index t = 0; t < d; ++t) best = std::max(best, std::abs(diag(t) - inv_d));
    for (Index j = 0; j < d; ++j) {
        const double dj = diag(j);
        for (Index k = j + 1; k < d; ++k) {
            const Complex c = off(j, k);
            const double dev = std::abs(0.5 * (dj + diag(k)) - inv_d) +
                               std::max(std::abs(c.real()), std::abs(c.imag()));
            best = std::max(best, dev);
        }
    }
    return best;
}

constexpr std::uint64_t kStudyTag = 0x4631;

} // namespace

double max_deviation(const DensityMatrix& rho) {
    return scan_deviation(
        rho.dim(), [&](Index t) { return rho(t, t).real(); },
        [&](Index j, Index k) { return rho(j, k); });
}

double max_deviation(const DensityMatrix& rho, const DDBEnsemble& ensemble) {
    if (rho.dim() != ensemble.dim()) throw DimensionError("state and ensemble dimensions differ");
    return max_deviation(rho);
}

double max_deviation_pure(const ComplexVector& psi) {
    check_dim(psi.size());
    return scan_deviation(
        psi.size(), [&](Index t) { return std::norm(psi(t)); },
        [&](Index j, Index k) { return psi(j) * std::conj(psi(k)); });
}

bool classify_deviation(double deviation, double s, Index d) {
    if (!(s > 0.0)) throw InvalidParameter("threshold s must be positive");
    return deviation <= s / static_cast<double>(d);
}

bool classify(const DensityMatrix& rho, double s, const DDBEnsemble& ensemble) {
    return classify_deviation(max_deviation(rho, ensemble), s, rho.dim());
}

ThresholdExpr ThresholdExpr::parse(const std::string& text) {
    static const std::regex term(R"(\s*([0-9]*\.?[0-9]*)\s*(n(\^2)?)?\s*)");
    ThresholdExpr out;
    out.label = text;
    std::size_t pos = 0;
    bool any = false;
    while (pos < text.size()) {
        const std::size_t plus = text.find('+', pos);
        const std::string piece =
            text.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
        std::smatch m;
        if (!std::regex_match(piece, m, term) || (m[1].length() == 0 && !m[2].matched) ||
            m[1].str() == ".") {
            throw InvalidParameter("cannot parse threshold '" + text + "'");
        }
        const double coef = m[1].length() ? std::stod(m[1].str()) : 1.0;
        if (!m[2].matched) {
            out.c += coef;
        } else if (m[3].matched) {
            out.b += coef;
        } else {
            out.a += coef;
        }
        any = true;
        if (plus == std::string::npos) break;
        pos = plus + 1;
    }
    if (!any) throw InvalidParameter("empty threshold");
    return out;
}

std::string_view family_name(StateFamily f) {
    return f == StateFamily::HaarPure ? "haar" : "hs";
}

StateFamily parse_family(std::string_view name) {
    if (name == "haar" || name == "haar_pure") return StateFamily::HaarPure;
    if (name == "hs" || name == "hs_mixed") return StateFamily::HsMixed;
    throw InvalidParameter("unknown state family '" + std::string(name) + "'");
}

void AverageStudyConfig::validate() const {
    if (trials_per_dim < 1) throw InvalidParameter("trials must be at least 1");
    if (qubit_range.empty()) throw InvalidParameter("empty qubit range");
    if (thresholds.empty()) throw InvalidParameter("no thresholds given");
    if (workers == 0) throw InvalidParameter("workers must be positive");
    for (int n : qubit_range) {
        if (n < 1 || n > max_qubits) {
            throw InvalidParameter("qubit count " + std::to_string(n) + " outside [1, " +
                                   std::to_string(max_qubits) + "]");
        }
        for (const auto& t : thresholds) {
            if (!(t.at(n) > 0.0)) throw InvalidParameter("threshold '" + t.label + "' is not positive");
        }
    }
}

ProportionTable run_proportion_study(const AverageStudyConfig& cfg) {
    cfg.validate();
    ProportionTable table;
    for (int n : cfg.qubit_range) {
        const Index d = Index{1} << n;
        std::vector<double> dev(cfg.trials_per_dim);
        auto work = [&](std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t t = begin; t < end; ++t) {
                RandomStream rng(cfg.seed,
                                 derive_stream_id(kStudyTag + static_cast<std::uint64_t>(n), t));
                dev[t] = cfg.state_family == StateFamily::HaarPure
                             ? max_deviation_pure(haar_random_vector(d, rng))
                             : max_deviation(hs_random_mixed(d, rng));
            }
        };
        const std::uint64_t workers = std::min<std::uint64_t>(cfg.workers, cfg.trials_per_dim);
        if (workers <= 1) {
            work(0, cfg.trials_per_dim);
        } else {
            std::vector<std::jthread> pool;
            const std::uint64_t chunk = (cfg.trials_per_dim + workers - 1) / workers;
            for (std::uint64_t w = 0; w < workers; ++w) {
                const std::uint64_t b = w * chunk;
                const std::uint64_t e = std::min(cfg.trials_per_dim, b + chunk);
                if (b < e) pool.emplace_back(work, b, e);
            }
        }
        for (const auto& th : cfg.thresholds) {
            const double s = th.at(n);
            const auto inside = std::count_if(dev.begin(), dev.end(),
                                              [&](double x) { return classify_deviation(x, s, d); });
            table.rows.push_back({n, d, th.label, s,
                                  static_cast<double>(inside) / static_cast<double>(dev.size()),
                                  cfg.trials_per_dim});
        }
    }
    return table;
}

std::string ProportionTable::to_csv(const std::string& comment) const {
    std::ostringstream os;
    if (!comment.empty()) os << "# " << comment << '\n';
    os << "n,d,threshold,s,fraction,trials\n" << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.n << ',' << r.d << ',' << r.threshold_label << ',' << r.s << ',' << r.fraction << ','
           << r.trials << '\n';
    }
    return os.str();
}

nlohmann::json ProportionTable::to_json() const {
    nlohmann::json series = nlohmann::json::object();
    std::vector<std::string> order;
    for (const auto& r : rows) {
        if (!series.contains(r.threshold_label)) {
            series[r.threshold_label] = nlohmann::json::array();
            order.push_back(r.threshold_label);
        }
        series[r.threshold_label].push_back(
            {{"n", r.n}, {"d", r.d}, {"s", r.s}, {"fraction", r.fraction}, {"trials", r.trials}});
    }
    return {{"thresholds", order}, {"series", std::move(series)}};
}

Lemma1Audit lemma1_variance_audit(std::span<const DensityMatrix> states,
                                  const HermitianObservable& o, double s) {
    if (!(s >= 0.0)) throw InvalidParameter("s must be non-negative");
    Lemma1Audit audit;
    audit.s = s;
    audit.traceless_hs_norm_sq = o.traceless_hs_norm_sq();
    const double bound = 2.0 * (s + 1.0) * audit.traceless_hs_norm_sq;
    constexpr double kSlack = 1e-8;
    const double inv_d = 1.0 / static_cast<double>(o.dim());

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& rho = states[i];
        Lemma1Row row;
        row.state_id = "state_" + std::to_string(i);
        row.max_deviation = max_deviation(rho);
        // s = 0 admits only exact averages; allow rounding there.
        if (row.max_deviation > s * inv_d + tol::kAlgebraic) {
            throw InvalidParameter(row.state_id + " is not approximately average at s = " +
                                   std::to_string(s));
        }
        row.variance_exact = variance_exact(rho, o).variance_exact;
        row.bound = bound;
        if (row.variance_exact > bound + kSlack) {
            throw BoundViolation("2(s+1) tr(O_0^2) bound violated by " + row.state_id,
                                 density_to_json(rho).dump());
        }
        audit.rows.push_back(std::move(row));
    }
    return audit;
}

} // namespace ddbst
