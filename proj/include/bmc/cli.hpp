#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

namespace bmc {

/// One CLI invocation: subcommand plus its key-value parameters. Every
/// parameter has a documented default; unknown keys are rejected. The
/// worker count is an execution knob (flag or BMCLAB_WORKERS), not part of
/// the config, so reruns of an embedded config reproduce results
/// regardless of parallelism.
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::string output_path; ///< empty = stdout only
    std::string format = "json";
};

/// Computes the artifact for a config: {"config": ..., "result": ...},
/// no timestamp. Deterministic given the config (and seed parameters
/// within it), independent of the worker count.
nlohmann::json run_core(const RunConfig& config, unsigned workers = 0);

/// Rebuilds the RunConfig embedded in an emitted artifact.
RunConfig config_from_artifact(const nlohmann::json& artifact);

/// Full CLI dispatch: computes, stamps, prints to `out`, optionally writes
/// the artifact file. Returns the process exit status (0 on success;
/// `verify` returns nonzero if any criterion failed). Structured errors go
/// to `err` and yield status 2.
int run(const RunConfig& config, unsigned workers, std::ostream& out, std::ostream& err);

} // namespace bmc
