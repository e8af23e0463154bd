#pragma once

// Experiment record persistence: a small stable JSON schema for everything the
// CLI emits, plus CSV flattening. Key order is fixed (ordered maps, ordered
// JSON) and the timestamp honors SOURCE_DATE_EPOCH, so identical inputs give
// byte-identical files.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "version.hpp"

namespace couponflux {

using ordered_json = nlohmann::ordered_json;

inline std::string utc_timestamp() {
    std::time_t t;
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ExperimentRecord {
    int schema_version = 1;
    std::string model;  // reset | clumsy | careless | combined
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    std::map<std::string, double> outputs;
    bool log_space = false;  // set when some value is emitted in log form only
    std::string error;       // non-empty when the producing step failed
    std::string tool_version = kToolVersion;
    std::string timestamp = utc_timestamp();
};

// Finite doubles emit as numbers; -inf as the string "-inf" per the schema.
inline ordered_json encode_output_value(double v) {
    if (std::isfinite(v)) return v;
    if (v < 0.0) return "-inf";
    throw DomainError("output values must be finite or -inf");
}

inline double decode_output_value(const ordered_json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "-inf") return -std::numeric_limits<double>::infinity();
        throw DomainError("unrecognized tagged output value");
    }
    if (!j.is_number()) throw DomainError("output value must be a number or a tagged string");
    return j.get<double>();
}

inline ordered_json to_json(const ExperimentRecord& r) {
    ordered_json j;
    j["schema_version"] = r.schema_version;
    j["model"] = r.model;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["seed"] = r.seed;
    ordered_json outputs = ordered_json::object();
    for (const auto& [k, v] : r.outputs) outputs[k] = encode_output_value(v);
    j["outputs"] = outputs;
    if (r.log_space) j["log_space"] = true;
    if (!r.error.empty()) j["error"] = r.error;
    j["tool_version"] = r.tool_version;
    j["timestamp"] = r.timestamp;
    return j;
}

inline ExperimentRecord record_from_json(const ordered_json& j) {
    ExperimentRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != 1) throw DomainError("unsupported schema_version");
    r.model = j.at("model").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) r.params[k] = v.get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("outputs").items()) r.outputs[k] = decode_output_value(v);
    r.log_space = j.value("log_space", false);
    r.error = j.value("error", std::string{});
    r.tool_version = j.at("tool_version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
}

// Two-line CSV (header + row) flattening the scalar fields; -inf values keep
// their tag so the table stays loadable.
inline std::string to_csv(const ExperimentRecord& r) {
    std::string header = "schema_version,model,seed";
    std::string row = "1," + r.model + "," + std::to_string(r.seed);
    auto num = [](double v) {
        if (!std::isfinite(v) && v < 0.0) return std::string("-inf");
        char buf[32];
        snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& [k, v] : r.params) {
        header += ",params." + k;
        row += "," + num(v);
    }
    for (const auto& [k, v] : r.outputs) {
        header += ",outputs." + k;
        row += "," + num(v);
    }
    header += ",tool_version,timestamp";
    row += "," + r.tool_version + "," + r.timestamp;
    if (!r.error.empty()) {
        header += ",error";
        row += "," + r.error;
    }
    return header + "\n" + row + "\n";
}

}
