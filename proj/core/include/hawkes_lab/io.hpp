#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hawkes_lab/coupling.hpp"
#include "hawkes_lab/matrix.hpp"
#include "hawkes_lab/mc.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/moments.hpp"
#include "hawkes_lab/simulator.hpp"
#include "hawkes_lab/statistics.hpp"

namespace hawkes_lab {

using json = nlohmann::json;

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json mark_to_json(const MarkDistribution& mark);
MarkDistribution mark_from_json(const json& j);

/// {"d": 2, "mu": [...], "alpha": [[...]], "beta": [...],
///  "marks": [{"kind": "exponential", "rate": 1.0}, ...]}
/// On input, scalar mu/beta and a single mark object are broadcast to all
/// components, and "d" is optional. Throws ConfigError on malformed input.
json model_to_json(const HawkesModel& model);
HawkesModel model_from_json(const json& j);

/// Hash of the canonical JSON form of the model.
std::string model_hash(const HawkesModel& model);

json report_to_json(const StabilityReport& report);
json moments_to_json(const MomentSet& moments);

/// One JSON-lines record.
json clt_sample_to_json(const CltSample& sample);

/// Sidecar holding T, seed, L_T, H_T, int_lambda and lambda_T.
json path_sidecar_json(const SimulatedPath& path);
/// Columns time,component,mark with 1-based components.
void write_path_csv(std::ostream& os, const SimulatedPath& path);

json summary_to_json(const mc::ExperimentSummary& summary);
/// Columns x_lo,x_hi,y_lo,y_hi,count.
void write_histogram_csv(std::ostream& os, const mc::Histogram2D& hist);
/// Columns T,estimate,reference,discrepancy,se for records with a test function.
void write_discrepancy_csv(std::ostream& os, const mc::ExperimentSummary& summary);

}  // namespace hawkes_lab
