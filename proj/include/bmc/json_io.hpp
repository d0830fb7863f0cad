#pragma once

#include <string>

#include <json.hpp>

#include "bmc/channel.hpp"
#include "bmc/games.hpp"
#include "bmc/metric.hpp"
#include "bmc/mismatch.hpp"
#include "bmc/simulator.hpp"

namespace bmc {

using json = nlohmann::json;

json to_json(const BinaryChannel& w);
json to_json(const InputDistribution& p);
json to_json(const JointDistribution& mu);
json to_json(const Metric& d);
json to_json(const MetricBank& bank);
json to_json(const GameResult& r);
json to_json(const MismatchResult& r);
json to_json(const SimulationReport& r);

BinaryChannel channel_from_json(const json& j);
InputDistribution input_from_json(const json& j);
Metric metric_from_json(const json& j);

/// Locale-independent fixed-significance formatting for CSV cells
/// (12 significant digits, '.' decimal point).
std::string format_csv_number(double v);

/// Writes content to path atomically (temp file in the same directory,
/// then rename). Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace bmc
