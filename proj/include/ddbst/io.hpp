#pragma once

#include <string>

#include <json.hpp>

#include "ddbst/ensemble.hpp"
#include "ddbst/estimator.hpp"
#include "ddbst/linalg.hpp"

namespace ddbst {

using json = nlohmann::json;

/// Observable file: {"dim": d, "entries": [[row, col, re, im], ...]} listing
/// the upper triangle (row <= col); the lower triangle is filled in by
/// Hermitian completion and missing entries are zero. Throws ParseError.
HermitianObservable observable_from_json(const json& j);
json observable_to_json(const HermitianObservable& o, double drop_below = 0.0);

/// State file: {"dim": d, "entries": [[[re, im], ...], ...]} (dense rows).
DensityMatrix density_from_json(const json& j);
json density_to_json(const DensityMatrix& rho);

json snapshot_to_json(const SnapshotId& s);

/// {"dim", "num_bases", "weights", "partitions"} for audit.
json ensemble_summary_json(const DDBEnsemble& ensemble);

json estimation_report_to_json(const EstimationReport& report);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_text_file(const std::string& path);
json read_json_file(const std::string& path);

} // namespace ddbst
