#include "bmc/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <set>
#include <sstream>

#include "bmc/errors.hpp"
#include "bmc/games.hpp"
#include "bmc/json_io.hpp"
#include "bmc/mismatch.hpp"
#include "bmc/simulator.hpp"
#include "bmc/verify.hpp"

namespace bmc {

namespace {

struct Params {
    const std::map<std::string, std::string>& kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    std::string require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing required parameter '" + key + "'");
        return it->second;
    }

    double number(const std::string& key, double fallback) const {
        return has(key) ? parse_number(key, kv.at(key)) : fallback;
    }

    double require_number(const std::string& key) const {
        return parse_number(key, require(key));
    }

    long integer(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        const std::string& s = kv.at(key);
        long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw ConfigError("parameter '" + key + "' is not an integer: " + s);
        }
        return v;
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string& s = kv.at(key);
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw ConfigError("parameter '" + key + "' must be true or false, got " + s);
    }

    static double parse_number(const std::string& key, const std::string& s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw ConfigError("parameter '" + key + "' is not a number: " + s);
        }
        return v;
    }
};

void reject_unknown(const RunConfig& c, const std::set<std::string>& known) {
    for (const auto& [key, value] : c.parameters) {
        if (!known.count(key)) {
            throw ConfigError("unknown parameter '" + key + "' for subcommand " + c.subcommand);
        }
    }
}

MetricBank bank_from_spec(const std::string& spec) {
    json j;
    try {
        j = json::parse(spec);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("bank specification is not valid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) {
        throw ConfigError("bank specification must be a nonempty JSON array");
    }
    std::vector<Metric> metrics;
    for (const auto& item : j) {
        if (item.contains("d")) {
            metrics.push_back(metric_from_json(item));
        } else if (item.contains("a") && item.contains("b")) {
            metrics.push_back(likelihood_metric(channel_from_json(item)));
        } else {
            throw ConfigError("bank entries must be {a, b} channels or {d} metric tables");
        }
    }
    return MetricBank(std::move(metrics));
}

std::vector<BinaryChannel> channels_from_spec(const std::string& spec) {
    json j;
    try {
        j = json::parse(spec);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("channel list is not valid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) {
        throw ConfigError("channel list must be a nonempty JSON array");
    }
    std::vector<BinaryChannel> out;
    for (const auto& item : j) out.push_back(channel_from_json(item));
    return out;
}

std::string grid_to_csv(const std::vector<std::array<double, 3>>& grid) {
    std::string csv = "a,b,ratio\n";
    for (const auto& row : grid) {
        csv += format_csv_number(row[0]);
        csv += ',';
        csv += format_csv_number(row[1]);
        csv += ',';
        csv += format_csv_number(row[2]);
        csv += '\n';
    }
    return csv;
}

json run_capacity(const RunConfig& c) {
    reject_unknown(c, {"a", "b", "p_tol"});
    const Params p{c.parameters};
    const BinaryChannel w(p.require_number("a"), p.require_number("b"));
    const CapacityResult r = capacity(w, p.number("p_tol", 1e-12));
    json out{{"bits", r.bits}, {"input", to_json(r.input)}};
    if (r.z_closed_form) out["z_closed_form"] = *r.z_closed_form;
    return out;
}

json run_imis(const RunConfig& c) {
    reject_unknown(c, {"a", "b", "p0", "bank", "oracle_points"});
    const Params p{c.parameters};
    const BinaryChannel w0(p.require_number("a"), p.require_number("b"));
    const InputDistribution pin(p.number("p0", 0.5));
    const MetricBank bank = bank_from_spec(p.require("bank"));
    const MismatchResult r = mismatched_information(pin, w0, bank);
    json out = to_json(r);
    out["matched_information"] = mutual_information(pin, w0);
    const long oracle_points = p.integer("oracle_points", 0);
    if (oracle_points > 0) {
        out["oracle_bits"] = mismatched_information_oracle(
            pin, w0, bank, static_cast<std::size_t>(oracle_points));
    }
    return out;
}

json run_alpha(const RunConfig& c, unsigned workers, std::string* side_csv,
               std::string* side_path) {
    reject_unknown(c, {"p_grid", "channel_grid", "delta", "grid_csv"});
    const Params p{c.parameters};
    const GameResult r =
        alpha_game(static_cast<int>(p.integer("p_grid", 1025)),
                   static_cast<int>(p.integer("channel_grid", 512)), p.number("delta", 1e-3),
                   workers);
    if (p.has("grid_csv")) {
        *side_path = p.require("grid_csv");
        *side_csv = grid_to_csv(efficiency_grid(r.witness_input,
                                                static_cast<int>(p.integer("channel_grid", 512)),
                                                p.number("delta", 1e-3), workers));
    }
    return to_json(r);
}

json run_beta(const RunConfig& c, unsigned workers, std::string* side_csv,
              std::string* side_path) {
    reject_unknown(c, {"channel_grid", "delta", "p0", "bank", "grid_csv"});
    const Params p{c.parameters};
    const MetricBank bank = bank_from_spec(p.require("bank"));
    const InputDistribution pin(p.number("p0", 0.5));
    const int grid = static_cast<int>(p.integer("channel_grid", 256));
    const double delta = p.number("delta", 1e-2);
    const GameResult r = beta_game(bank, pin, grid, delta, workers);
    if (p.has("grid_csv")) {
        *side_path = p.require("grid_csv");
        *side_csv = grid_to_csv(mismatch_ratio_grid(bank, pin, grid, delta, workers));
    }
    return to_json(r);
}

json run_compound(const RunConfig& c) {
    reject_unknown(c, {"channels", "p_tol"});
    const Params p{c.parameters};
    const ChannelSet s(channels_from_spec(p.require("channels")));
    const GameResult r = compound_capacity(s, p.number("p_tol", 1e-9));
    return to_json(r);
}

json run_simulate(const RunConfig& c, unsigned workers) {
    reject_unknown(c, {"n", "rate", "a", "b", "p0", "decoder", "bank", "channels", "trials",
                       "seed", "fixed_composition"});
    const Params p{c.parameters};
    const BinaryChannel w0(p.require_number("a"), p.require_number("b"));
    const int n = static_cast<int>(p.integer("n", 0));
    const double rate = p.require_number("rate");
    const InputDistribution pin(p.number("p0", 0.5));
    const auto seed = static_cast<std::uint64_t>(p.integer("seed", 1));
    const auto trials = static_cast<std::uint64_t>(p.integer("trials", 10000));
    const Codebook cb =
        generate_codebook(n, rate, pin, seed, p.flag("fixed_composition", false));

    const std::string dec = p.get("decoder", "ml");
    DecoderSpec spec;
    if (dec == "ml") {
        spec = MatchedMl{};
    } else if (dec == "gld") {
        spec = GldDecoder{bank_from_spec(p.require("bank"))};
    } else if (dec == "glrt") {
        spec = GlrtDecoder{channels_from_spec(p.require("channels"))};
    } else if (dec == "mmi") {
        spec = MmiDecoder{};
    } else {
        throw ConfigError("decoder must be one of ml|gld|glrt|mmi, got " + dec);
    }
    const SimulationReport rep = estimate_error(w0, cb, spec, trials, seed, workers);
    json out = to_json(rep);
    out["n"] = n;
    out["rate"] = rate;
    out["channel"] = to_json(w0);
    return out;
}

json run_verify(const RunConfig& c, unsigned workers) {
    reject_unknown(c, {"seed", "criterion"});
    const Params p{c.parameters};
    const auto seed = static_cast<std::uint64_t>(p.integer("seed", 1));
    const int only = static_cast<int>(p.integer("criterion", 0));
    const auto results = verify::run_criteria(seed, workers, only);
    json arr = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        arr.push_back(json{{"id", r.id},
                           {"name", r.name},
                           {"target", r.target},
                           {"measured", r.measured},
                           {"pass", r.pass},
                           {"seconds", r.seconds}});
        all_pass = all_pass && r.pass;
    }
    return json{{"criteria", arr}, {"all_pass", all_pass}};
}

std::string simulate_csv(const json& result) {
    std::string csv = "n,rate,a,b,decoder,trials,errors,p_e_hat,ci95_halfwidth,seed\n";
    csv += format_csv_number(result.at("n").get<double>()) + ",";
    csv += format_csv_number(result.at("rate").get<double>()) + ",";
    csv += format_csv_number(result.at("channel").at("a").get<double>()) + ",";
    csv += format_csv_number(result.at("channel").at("b").get<double>()) + ",";
    csv += result.at("decoder").get<std::string>() + ",";
    csv += std::to_string(result.at("trials").get<std::uint64_t>()) + ",";
    csv += std::to_string(result.at("errors").get<std::uint64_t>()) + ",";
    csv += format_csv_number(result.at("p_e_hat").get<double>()) + ",";
    csv += format_csv_number(result.at("ci95_halfwidth").get<double>()) + ",";
    csv += std::to_string(result.at("seed").get<std::uint64_t>()) + "\n";
    return csv;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace

nlohmann::json run_core(const RunConfig& config, unsigned workers) {
    json cfg{{"subcommand", config.subcommand},
             {"parameters", config.parameters},
             {"format", config.format}};
    if (!config.output_path.empty()) cfg["output_path"] = config.output_path;

    std::string side_csv, side_path;
    json result;
    if (config.subcommand == "capacity") {
        result = run_capacity(config);
    } else if (config.subcommand == "imis") {
        result = run_imis(config);
    } else if (config.subcommand == "alpha") {
        result = run_alpha(config, workers, &side_csv, &side_path);
    } else if (config.subcommand == "beta") {
        result = run_beta(config, workers, &side_csv, &side_path);
    } else if (config.subcommand == "compound") {
        result = run_compound(config);
    } else if (config.subcommand == "simulate") {
        result = run_simulate(config, workers);
    } else if (config.subcommand == "verify") {
        result = run_verify(config, workers);
    } else {
        throw ConfigError("unknown subcommand: " + config.subcommand);
    }
    json artifact{{"config", cfg}, {"result", result}};
    if (!side_path.empty()) artifact["grid_csv_path"] = side_path;
    if (!side_csv.empty()) write_file_atomic(side_path, side_csv);
    return artifact;
}

RunConfig config_from_artifact(const nlohmann::json& artifact) {
    const json& cfg = artifact.at("config");
    RunConfig c;
    c.subcommand = cfg.at("subcommand").get<std::string>();
    c.parameters = cfg.at("parameters").get<std::map<std::string, std::string>>();
    c.format = cfg.value("format", "json");
    c.output_path = cfg.value("output_path", "");
    return c;
}

int run(const RunConfig& config, unsigned workers, std::ostream& out, std::ostream& err) {
    try {
        if (config.format != "json" && config.format != "csv") {
            throw ConfigError("format must be json or csv");
        }
        if (config.format == "csv" && config.subcommand != "simulate") {
            throw ConfigError("csv output is only available for simulate; "
                              "games expose grids via the grid_csv parameter");
        }
        json artifact = run_core(config, workers);

        std::string payload;
        if (config.format == "csv") {
            payload = simulate_csv(artifact.at("result"));
        } else {
            artifact["timestamp"] = utc_timestamp();
            payload = artifact.dump(2);
            payload += '\n';
        }

        if (config.subcommand == "verify") {
            for (const auto& cr : artifact.at("result").at("criteria")) {
                char line[512];
                std::snprintf(line, sizeof line, "[%s] #%-2d %-28s target: %s | measured: %s (%.1fs)\n",
                              cr.at("pass").get<bool>() ? "PASS" : "FAIL",
                              cr.at("id").get<int>(), cr.at("name").get<std::string>().c_str(),
                              cr.at("target").get<std::string>().c_str(),
                              cr.at("measured").get<std::string>().c_str(),
                              cr.at("seconds").get<double>());
                out << line;
            }
        }
        if (!config.output_path.empty()) {
            write_file_atomic(config.output_path, payload);
        }
        if (config.subcommand != "verify" || config.output_path.empty()) {
            out << payload;
        }
        if (config.subcommand == "verify" && !artifact.at("result").at("all_pass").get<bool>()) {
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        json msg{{"error", e.what()}, {"subcommand", config.subcommand}};
        err << msg.dump(2) << "\n";
        return 2;
    }
}

} // namespace bmc
