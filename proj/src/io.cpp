#include "pipediff/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pipediff {

namespace {

using nlohmann::json;

// Converts a byte offset from a nlohmann parse error into line/column.
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json parse_strict(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw InputError(origin + ": malformed JSON at line " + std::to_string(line) +
                             ", column " + std::to_string(col) + ": " + e.what(),
                         line, col);
    }
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& origin) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const auto& k : known) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw InputError(origin + ": unknown key \"" + item.key() + "\"");
        }
    }
}

double need_number(const json& j, const std::string& key, const std::string& origin) {
    if (!j.contains(key)) {
        throw InputError(origin + ": missing key \"" + key + "\"");
    }
    if (!j[key].is_number()) {
        throw InputError(origin + ": key \"" + key + "\" must be a number");
    }
    return j[key].get<double>();
}

int need_int(const json& j, const std::string& key, const std::string& origin) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw InputError(origin + ": key \"" + key + "\" must be an integer");
    }
    return j[key].get<int>();
}

}  // namespace

Json Json::object() {
    Json v;
    v.kind_ = Kind::Obj;
    return v;
}

Json Json::array() {
    Json v;
    v.kind_ = Kind::Arr;
    return v;
}

Json Json::number(double x) {
    Json v;
    v.kind_ = Kind::Num;
    v.d_ = x;
    return v;
}

Json Json::integer(long long x) {
    Json v;
    v.kind_ = Kind::Int;
    v.i_ = x;
    return v;
}

Json Json::boolean(bool x) {
    Json v;
    v.kind_ = Kind::Bool;
    v.b_ = x;
    return v;
}

Json Json::string(std::string x) {
    Json v;
    v.kind_ = Kind::Str;
    v.s_ = std::move(x);
    return v;
}

Json Json::null() { return Json(); }

Json& Json::set(const std::string& key, Json v) {
    obj_.emplace_back(key, std::move(v));
    return *this;
}

Json& Json::push(Json v) {
    arr_.push_back(std::move(v));
    return *this;
}

namespace {

void escape_to(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string pad_close(static_cast<std::size_t>(indent) * depth, ' ');
    switch (kind_) {
        case Kind::Null: out += "null"; break;
        case Kind::Bool: out += b_ ? "true" : "false"; break;
        case Kind::Int: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%lld", i_);
            out += buf;
            break;
        }
        case Kind::Num: {
            if (!std::isfinite(d_)) {
                out += "null";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", d_);
                out += buf;
            }
            break;
        }
        case Kind::Str: escape_to(out, s_); break;
        case Kind::Arr: {
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                out += pad;
                arr_[i].dump_to(out, indent, depth + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            out += pad_close + "]";
            break;
        }
        case Kind::Obj: {
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                out += pad;
                escape_to(out, obj_[i].first);
                out += ": ";
                obj_[i].second.dump_to(out, indent, depth + 1);
                if (i + 1 < obj_.size()) out += ',';
                out += '\n';
            }
            out += pad_close + "}";
            break;
        }
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    dump_to(out, indent, 0);
    out += '\n';
    return out;
}

Json manifest_json(const RunManifest& m) {
    Json inputs = Json::array();
    for (const auto& p : m.inputs) inputs.push(Json::string(p));
    Json j = Json::object();
    j.set("command", Json::string(m.command));
    j.set("inputs", std::move(inputs));
    j.set("config_hash", Json::string(m.config_hash));
    j.set("tool_version", Json::string(m.tool_version));
    j.set("appendix_b_sqrt_correction", Json::boolean(m.appendix_b_sqrt_correction));
    j.set("nmax_floor_inversion", Json::boolean(m.nmax_floor_inversion));
    if (m.timestamp) {
        j.set("timestamp", Json::string(*m.timestamp));
    }
    return j;
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipeDiffuserDesign parse_design(const std::string& text, const std::string& origin) {
    const json j = parse_strict(text, origin);
    if (!j.is_object()) {
        throw InputError(origin + ": design file must be a JSON object");
    }
    reject_unknown_keys(j,
                        {"n_pipes", "d_th_mm", "alpha_deg", "two_theta_deg", "length_mm",
                         "area_ratio", "authoritative", "d_tan_mm", "r3a_over_r3", "d4_mm",
                         "passage_height_mm"},
                        origin);

    PipeDiffuserDesign d;
    d.n_pipes = need_int(j, "n_pipes", origin);
    d.d_th = need_number(j, "d_th_mm", origin);
    d.alpha = need_number(j, "alpha_deg", origin);
    d.two_theta = need_number(j, "two_theta_deg", origin);
    if (j.contains("length_mm")) d.length = need_number(j, "length_mm", origin);
    if (j.contains("area_ratio")) d.area_ratio = need_number(j, "area_ratio", origin);
    if (!j.contains("authoritative") || !j["authoritative"].is_string()) {
        throw InputError(origin + ": key \"authoritative\" must be \"length\" or \"area_ratio\"");
    }
    const std::string mode = j["authoritative"].get<std::string>();
    if (mode == "length") {
        d.authoritative = AuthoritativeMode::Length;
    } else if (mode == "area_ratio") {
        d.authoritative = AuthoritativeMode::AreaRatio;
    } else {
        throw InputError(origin + ": authoritative must be \"length\" or \"area_ratio\", got \"" +
                         mode + "\"");
    }
    d.d_tan = need_number(j, "d_tan_mm", origin);
    d.r3a_over_r3 = need_number(j, "r3a_over_r3", origin);
    d.d4 = need_number(j, "d4_mm", origin);
    if (j.contains("passage_height_mm")) {
        d.passage_height = need_number(j, "passage_height_mm", origin);
    } else {
        d.passage_height = 7.25;  // impeller exit blade height; assumption
        d.passage_height_assumed = true;
    }
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(origin + ": " + e.what());
    }
    return d;
}

PipeDiffuserDesign load_design(const std::string& path) {
    return parse_design(read_file(path), path);
}

StageConfig parse_stage_config(const std::string& text, const std::string& origin) {
    const json j = parse_strict(text, origin);
    if (!j.is_object()) {
        throw InputError(origin + ": stage config must be a JSON object");
    }
    reject_unknown_keys(j,
                        {"omega_rpm", "d2_m", "b2_m", "n_blades", "backsweep_deg",
                         "impeller_poly_eff", "inlet_p0_pa", "inlet_t0_k", "b_ref", "k_inc",
                         "stall_angle_deg", "friction_coeff", "exit_blockage"},
                        origin);
    StageConfig c;
    c.spec.omega_design = need_number(j, "omega_rpm", origin);
    c.spec.d2 = need_number(j, "d2_m", origin);
    c.spec.b2 = need_number(j, "b2_m", origin);
    c.spec.n_blades = need_int(j, "n_blades", origin);
    c.spec.backsweep = need_number(j, "backsweep_deg", origin);
    c.spec.impeller_poly_eff = need_number(j, "impeller_poly_eff", origin);
    c.spec.inlet_total.p0 = need_number(j, "inlet_p0_pa", origin);
    c.spec.inlet_total.t0 = need_number(j, "inlet_t0_k", origin);
    c.b_ref = need_number(j, "b_ref", origin);
    c.k_inc = need_number(j, "k_inc", origin);
    c.stall_angle = need_number(j, "stall_angle_deg", origin);
    c.friction_coeff = need_number(j, "friction_coeff", origin);
    if (j.contains("exit_blockage")) {
        c.exit_blockage = need_number(j, "exit_blockage", origin);
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(origin + ": " + e.what());
    }
    return c;
}

StageConfig load_stage_config(const std::string& path) {
    return parse_stage_config(read_file(path), path);
}

Json design_json(const PipeDiffuserDesign& d) {
    Json j = Json::object();
    j.set("n_pipes", Json::integer(d.n_pipes));
    j.set("d_th_mm", Json::number(d.d_th));
    j.set("alpha_deg", Json::number(d.alpha));
    j.set("two_theta_deg", Json::number(d.two_theta));
    if (d.length) j.set("length_mm", Json::number(*d.length));
    if (d.area_ratio) j.set("area_ratio", Json::number(*d.area_ratio));
    j.set("authoritative", Json::string(d.authoritative == AuthoritativeMode::Length
                                            ? "length"
                                            : "area_ratio"));
    j.set("d_tan_mm", Json::number(d.d_tan));
    j.set("r3a_over_r3", Json::number(d.r3a_over_r3));
    j.set("d4_mm", Json::number(d.d4));
    j.set("passage_height_mm", Json::number(d.passage_height));
    if (d.passage_height_assumed) {
        j.set("passage_height_assumed", Json::boolean(true));
    }
    return j;
}

Json stage_config_json(const StageConfig& c) {
    Json j = Json::object();
    j.set("omega_rpm", Json::number(c.spec.omega_design));
    j.set("d2_m", Json::number(c.spec.d2));
    j.set("b2_m", Json::number(c.spec.b2));
    j.set("n_blades", Json::integer(c.spec.n_blades));
    j.set("backsweep_deg", Json::number(c.spec.backsweep));
    j.set("impeller_poly_eff", Json::number(c.spec.impeller_poly_eff));
    j.set("inlet_p0_pa", Json::number(c.spec.inlet_total.p0));
    j.set("inlet_t0_k", Json::number(c.spec.inlet_total.t0));
    j.set("b_ref", Json::number(c.b_ref));
    j.set("k_inc", Json::number(c.k_inc));
    j.set("stall_angle_deg", Json::number(c.stall_angle));
    j.set("friction_coeff", Json::number(c.friction_coeff));
    j.set("exit_blockage", Json::number(c.exit_blockage));
    return j;
}

std::string stage_config_hash(const StageConfig& c) {
    return fnv1a_hex(stage_config_json(c).dump(0));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pipediff
