#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedscope/alpha_estimator.hpp"
#include "seedscope/perf_metrics.hpp"
#include "seedscope/synth.hpp"
#include "seedscope/trimming.hpp"

namespace seedscope {

using Json = nlohmann::ordered_json;

/// Two-space indent plus a trailing newline. Doubles use the shortest form
/// that round-trips.
std::string dump_json(const Json& value);

Json to_json(const AlphaConfig& cfg);
/// `{candidate, alpha_hat, B, grid, saturated, per_replicate, ...}`
Json to_json(const AlphaEstimate& estimate, const AlphaConfig& cfg);
Json to_json(const AlphaMatrix& matrix);
Json to_json(const RobustTestResult& result);
Json to_json(const MetricsRecord& record);
Json to_json(const BinStats& bin);
Json to_json(const SynthSpec& spec);
Json to_json(const Table1Row& row);
/// Configuration and per-size summary; per-record data goes to CSV.
Json to_json(const SweepResult& result, double alpha_cut);

std::string_view to_string(EvaluationGrid grid) noexcept;

}  // namespace seedscope
