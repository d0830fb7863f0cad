#include "bmc/json_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bmc/errors.hpp"

namespace bmc {

namespace {

// -infinity is not representable in JSON numbers; use a string sentinel.
json entry_to_json(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return json("-inf");
    return json(v);
}

double entry_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("unrecognized metric entry: " + j.dump());
    }
    return j.get<double>();
}

} // namespace

json to_json(const BinaryChannel& w) { return json{{"a", w.a}, {"b", w.b}}; }

json to_json(const InputDistribution& p) { return json{{"p0", p.p0}}; }

json to_json(const JointDistribution& mu) {
    return json{{"m", {{mu(0, 0), mu(0, 1)}, {mu(1, 0), mu(1, 1)}}}};
}

json to_json(const Metric& d) {
    return json{{"d",
                 {{entry_to_json(d(0, 0)), entry_to_json(d(0, 1))},
                  {entry_to_json(d(1, 0)), entry_to_json(d(1, 1))}}}};
}

json to_json(const MetricBank& bank) {
    json arr = json::array();
    for (const Metric& d : bank.metrics) arr.push_back(to_json(d));
    return json{{"metrics", arr}, {"K", bank.size()}};
}

json to_json(const GameResult& r) {
    return json{{"value", r.value},
                {"witness_input", to_json(r.witness_input)},
                {"witness_channel", to_json(r.witness_channel)},
                {"resolution", r.resolution}};
}

json to_json(const MismatchResult& r) {
    return json{{"bits", r.bits},
                {"achieved_by", r.achieved_by},
                {"minimizer", to_json(r.minimizer)},
                {"threshold", entry_to_json(r.threshold)}};
}

json to_json(const SimulationReport& r) {
    return json{{"trials", r.trials},     {"errors", r.errors},
                {"p_e_hat", r.p_e_hat},   {"ci95_halfwidth", r.ci95_halfwidth},
                {"seed", r.seed},         {"decoder", r.decoder_tag}};
}

BinaryChannel channel_from_json(const json& j) {
    return BinaryChannel(j.at("a").get<double>(), j.at("b").get<double>());
}

InputDistribution input_from_json(const json& j) {
    return InputDistribution(j.at("p0").get<double>());
}

Metric metric_from_json(const json& j) {
    const auto& rows = j.at("d");
    std::array<std::array<double, 2>, 2> d{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) d[x][y] = entry_from_json(rows.at(x).at(y));
    return Metric(d);
}

std::string format_csv_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 12);
    if (ec != std::errc{}) throw IoError("number formatting failed");
    return std::string(buf.data(), ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw IoError("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

} // namespace bmc
