#include "ddbst/io.hpp"

#include <fstream>
#include <sstream>

namespace ddbst {

namespace {

Index read_dim(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer()) {
        throw ParseError("missing integer field 'dim'");
    }
    const auto d = j["dim"].get<long long>();
    if (d < 2 || d > kMaxDim) throw ParseError("'dim' out of range: " + std::to_string(d));
    return static_cast<Index>(d);
}

double read_number(const json& v, const char* what) {
    if (!v.is_number()) throw ParseError(std::string("expected a number for ") + what);
    return v.get<double>();
}

} // namespace

HermitianObservable observable_from_json(const json& j) {
    const Index d = read_dim(j);
    if (!j.contains("entries") || !j["entries"].is_array()) {
        throw ParseError("missing array field 'entries'");
    }
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    std::vector<bool> seen(static_cast<std::size_t>(d * d), false);
    for (const auto& e : j["entries"]) {
        if (!e.is_array() || e.size() != 4) {
            throw ParseError("each entry must be [row, col, re, im]");
        }
        if (!e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw ParseError("entry row/col must be integers");
        }
        const auto row = e[0].get<long long>();
        const auto col = e[1].get<long long>();
        if (row < 0 || col < 0 || row >= d || col >= d) throw ParseError("entry index out of range");
        if (row > col) throw ParseError("entries must list the upper triangle (row <= col)");
        const double re = read_number(e[2], "re");
        const double im = read_number(e[3], "im");
        if (row == col && im != 0.0) throw ParseError("diagonal entries must be real");
        auto flag = seen[static_cast<std::size_t>(row * d + col)];
        if (flag) throw ParseError("duplicate entry");
        flag = true;
        m(row, col) = Complex{re, im};
        m(col, row) = Complex{re, -im};
    }
    try {
        return HermitianObservable(std::move(m));
    } catch (const InvariantViolation& err) {
        throw ParseError(std::string("invalid observable: ") + err.what());
    }
}

json observable_to_json(const HermitianObservable& o, double drop_below) {
    json entries = json::array();
    const Index d = o.dim();
    for (Index r = 0; r < d; ++r) {
        for (Index c = r; c < d; ++c) {
            const Complex v = o.matrix()(r, c);
            if (std::abs(v) == 0.0 || std::abs(v) <= drop_below) continue;
            entries.push_back({r, c, v.real(), r == c ? 0.0 : v.imag()});
        }
    }
    return {{"dim", d}, {"entries", std::move(entries)}};
}

DensityMatrix density_from_json(const json& j) {
    const Index d = read_dim(j);
    if (!j.contains("entries") || !j["entries"].is_array() ||
        j["entries"].size() != static_cast<std::size_t>(d)) {
        throw ParseError("'entries' must hold d rows");
    }
    ComplexMatrix m(d, d);
    for (Index r = 0; r < d; ++r) {
        const auto& row = j["entries"][static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(d)) {
            throw ParseError("row " + std::to_string(r) + " must hold d entries");
        }
        for (Index c = 0; c < d; ++c) {
            const auto& v = row[static_cast<std::size_t>(c)];
            if (!v.is_array() || v.size() != 2) throw ParseError("state entries are [re, im]");
            m(r, c) = Complex{read_number(v[0], "re"), read_number(v[1], "im")};
        }
    }
    return DensityMatrix(std::move(m));
}

json density_to_json(const DensityMatrix& rho) {
    const Index d = rho.dim();
    json rows = json::array();
    for (Index r = 0; r < d; ++r) {
        json row = json::array();
        for (Index c = 0; c < d; ++c) row.push_back({rho(r, c).real(), rho(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return {{"dim", d}, {"entries", std::move(rows)}};
}

json snapshot_to_json(const SnapshotId& s) {
    return {{"kind", std::string(kind_name(s.kind))}, {"i", s.j}, {"j", s.k}};
}

json ensemble_summary_json(const DDBEnsemble& ensemble) {
    json weights = json::array();
    for (const auto& b : ensemble.bases()) {
        weights.push_back(std::to_string(b.weight_num) + "/" + std::to_string(b.weight_den));
    }
    json parts = json::array();
    for (const auto& p : ensemble.partitions()) {
        json pairs = json::array();
        for (auto [j, k] : p.pairs) pairs.push_back({j, k});
        json item = {{"pairs", std::move(pairs)}};
        item["leftover"] = p.leftover ? json(*p.leftover) : json(nullptr);
        parts.push_back(std::move(item));
    }
    return {{"dim", ensemble.dim()},
            {"num_bases", ensemble.num_bases()},
            {"weights", std::move(weights)},
            {"partitions", std::move(parts)}};
}

json estimation_report_to_json(const EstimationReport& report) {
    json j = {{"estimate", report.estimate},
              {"std_error", report.std_error},
              {"shots_used", report.shots_used},
              {"strategy", std::string(strategy_name(report.strategy))},
              {"batches", report.batches},
              {"seed", report.seed}};
    if (report.strategy == Strategy::MedianOfMeans) {
        j["std_error_note"] = "standard deviation of batch means / sqrt(batches)";
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

} // namespace ddbst
