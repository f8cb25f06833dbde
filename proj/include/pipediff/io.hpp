// File interfaces: strict design/stage-config JSON loaders, an ordered JSON
// report writer with 17-significant-digit numbers, and the run manifest
// embedded in every report.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pipediff/geometry.hpp"
#include "pipediff/meanline.hpp"

namespace pipediff {

constexpr const char* kToolVersion = "0.1.0";

// Malformed or contract-violating input file (CLI exit code 4). line/column
// are 1-based for syntax errors and 0 for schema violations.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Minimal order-preserving JSON value for report emission. Numbers are
// written with 17 significant digits; non-finite values become null.
class Json {
public:
    static Json object();
    static Json array();
    static Json number(double v);
    static Json integer(long long v);
    static Json boolean(bool v);
    static Json string(std::string v);
    static Json null();

    Json& set(const std::string& key, Json v);  // object only
    Json& push(Json v);                         // array only

    std::string dump(int indent = 2) const;

private:
    enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };
    Kind kind_ = Kind::Null;
    bool b_ = false;
    long long i_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;

    void dump_to(std::string& out, int indent, int depth) const;
};

struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::string config_hash;
    std::string tool_version = kToolVersion;
    bool appendix_b_sqrt_correction = true;
    bool nmax_floor_inversion = true;
    std::optional<std::string> timestamp;  // absent with --no-timestamp
};

Json manifest_json(const RunManifest& manifest);
std::string iso8601_utc_now();

// FNV-1a 64-bit over the given bytes, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

PipeDiffuserDesign parse_design(const std::string& text, const std::string& origin);
PipeDiffuserDesign load_design(const std::string& path);

StageConfig parse_stage_config(const std::string& text, const std::string& origin);
StageConfig load_stage_config(const std::string& path);

// Canonical serializations (also used for the config hash).
Json design_json(const PipeDiffuserDesign& design);
Json stage_config_json(const StageConfig& config);
std::string stage_config_hash(const StageConfig& config);

std::string read_file(const std::string& path);

}  // namespace pipediff
