#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pipediff/cli.hpp"
#include "pipediff/gasdyn.hpp"

using namespace pipediff;
using nlohmann::json;

namespace {

const std::string kData = PIPEDIFF_DATA_DIR;

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/pipediff_test_" + name;
    std::ofstream f(path);
    f << text;
    return path;
}

const char* kAcosDesign = R"({
  "n_pipes": 23, "d_th_mm": 8.0, "alpha_deg": 20.0, "two_theta_deg": 6.0,
  "length_mm": 57.0, "area_ratio": 4.0, "authoritative": "length",
  "d_tan_mm": 145.0, "r3a_over_r3": 1.03, "d4_mm": 255.0, "passage_height_mm": 7.25
})";

}  // namespace

TEST_CASE("validate reports infeasible designs with exit 2") {
    const std::string path = write_temp("acos.json", kAcosDesign);
    const auto r = run({"validate", path, "--no-timestamp"});
    CHECK(r.code == 2);
    const json j = json::parse(r.out);
    CHECK(j["feasibility"]["feasible"] == false);
    CHECK(j["feasibility"]["reason"] == "AcosDomainViolation");
}

TEST_CASE("validate flags inconsistent-but-feasible designs with exit 3") {
    const auto r = run({"validate", kData + "/designs/p1.json", "--no-timestamp"});
    CHECK(r.code == 3);
    const json j = json::parse(r.out);
    CHECK(j["feasibility"]["feasible"] == true);
    CHECK(j["consistency_flags"].size() > 0);
}

TEST_CASE("derive emits the cone-derived area ratio and the conflict flag") {
    const auto r = run({"derive", kData + "/designs/p1.json", "--no-timestamp"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["derived"]["ar_actual"].get<double>() - 3.0513481623888930) < 1e-9);
    bool flagged = false;
    for (const auto& f : j["derived"]["consistency_flags"]) {
        flagged |= (f["name"] == "area_ratio");
    }
    CHECK(flagged);
    // Manifest and formula-correction flags ride along in every report.
    CHECK(j["manifest"]["appendix_b_sqrt_correction"] == true);
    CHECK(j["manifest"]["nmax_floor_inversion"] == true);
    CHECK(j["manifest"]["tool_version"] == "0.1.0");
    CHECK_FALSE(j["manifest"].contains("timestamp"));
}

TEST_CASE("numbers serialize with 17 significant digits") {
    const auto r = run({"derive", kData + "/designs/p1.json", "--no-timestamp"});
    CHECK(r.out.find("61.700000000000003") != std::string::npos);
}

TEST_CASE("blockage calculator reports zero for a perfectly effective throat") {
    const TotalState total{100830.0, 288.15};
    const double a_eff = effective_area(0.5, total, 0.5);
    char area[40];
    std::snprintf(area, sizeof area, "%.17g", a_eff);
    const auto r = run({"blockage", "--mdot", "0.5", "--p0", "100830", "--t0", "288.15",
                        "--mach", "0.5", "--area", area, "--no-timestamp"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["blockage"].get<double>()) < 1e-12);
}

TEST_CASE("malformed JSON exits 4 with line and column") {
    const std::string path = write_temp("broken.json", "{\n  \"n_pipes\": 23,,\n}");
    const auto r = run({"validate", path});
    CHECK(r.code == 4);
    CHECK(r.err.find("line 2") != std::string::npos);
    CHECK(r.err.find("column") != std::string::npos);
}

TEST_CASE("unknown design keys are rejected") {
    const std::string path = write_temp(
        "extra.json",
        R"({"n_pipes": 23, "d_th_mm": 8.0, "alpha_deg": 61.7, "two_theta_deg": 6.0,
            "length_mm": 57.0, "authoritative": "length", "d_tan_mm": 150.0,
            "r3a_over_r3": 1.03, "d4_mm": 255.0, "passage_height_mm": 7.25,
            "bogus_key": 1.0})");
    const auto r = run({"validate", path});
    CHECK(r.code == 4);
    CHECK(r.err.find("bogus_key") != std::string::npos);
}

TEST_CASE("usage errors exit 64") {
    CHECK(run({"frobnicate"}).code == 64);
    CHECK(run({"point", kData + "/designs/p1.json", kData + "/stage_baseline.json"}).code == 64);
    CHECK(run({"sweep", kData + "/designs/p1.json", kData + "/stage_baseline.json", "--param",
               "bogus", "--values", "1,2"})
              .code == 64);
    CHECK(run({"help"}).code == 0);
}

TEST_CASE("point command emits the calibrated design point") {
    const auto r = run({"point", kData + "/designs/p1.json", kData + "/stage_baseline.json",
                        "--mdot", "0.806", "--speed", "1.0", "--no-timestamp"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    const double pr = j["point"]["pr_tt"].get<double>();
    const double eta = j["point"]["eta_tt"].get<double>();
    CHECK(std::abs(pr - 4.33) / 4.33 < 0.02);
    CHECK(std::abs(eta - 0.8162) < 0.02);
    CHECK(j["calibration"]["exit_blockage"].get<double>() > 0.0);
}

TEST_CASE("mesh command writes a parseable STL") {
    const std::string design = write_temp("mesh_design.json", R"({
      "n_pipes": 4, "d_th_mm": 8.0, "alpha_deg": 61.7, "two_theta_deg": 6.0,
      "length_mm": 57.0, "authoritative": "length", "d_tan_mm": 145.0,
      "r3a_over_r3": 1.03, "d4_mm": 250.0, "passage_height_mm": 7.25})");
    const std::string stl = "/tmp/pipediff_test_mesh.stl";
    const auto r = run({"mesh", design, "--stl", stl, "--resolution", "8", "--no-timestamp"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["watertight"] == true);
    CHECK(j["triangles"].get<long long>() > 0);
    std::ifstream f(stl, std::ios::binary);
    CHECK(f.good());
    f.seekg(0, std::ios::end);
    CHECK(static_cast<long long>(f.tellg()) ==
          84 + 50 * j["triangles"].get<long long>());
    std::remove(stl.c_str());

    // Infeasible designs exit 2 before any meshing.
    const std::string bad = write_temp("mesh_bad.json", kAcosDesign);
    CHECK(run({"mesh", bad, "--stl", stl, "--resolution", "8"}).code == 2);
    // Too-coarse resolution is a configuration error.
    CHECK(run({"mesh", design, "--stl", stl, "--resolution", "4"}).code == 64);
}

TEST_CASE("speedline and table commands run end to end") {
    const auto line = run({"speedline", kData + "/designs/p1.json", kData + "/stage_baseline.json",
                           "--speed", "1.0", "--points", "9", "--no-timestamp"});
    CHECK(line.code == 0);
    const json lj = json::parse(line.out);
    CHECK(lj["speedline"]["surge_mdot_kg_s"].get<double>() <
          lj["speedline"]["choke_mdot_kg_s"].get<double>());

    const std::string csv = "/tmp/pipediff_test_table.csv";
    const auto table = run({"table", kData + "/designs/p1.json", kData + "/designs/p2.json",
                            "--stage", kData + "/stage_baseline.json", "--mdot", "0.806", "--csv",
                            csv, "--no-timestamp"});
    CHECK(table.code == 0);
    const json tj = json::parse(table.out);
    CHECK(tj["rows"].size() == 2);
    std::ifstream cf(csv);
    std::string header;
    std::getline(cf, header);
    CHECK(header.find("id,feasible,conflicts,eta_tt") == 0);
    std::remove(csv.c_str());
}

TEST_CASE("map and sweep reports are byte-identical across runs and worker counts") {
    const std::vector<std::string> map_args = {
        "map",      kData + "/designs/p2.json", kData + "/stage_baseline.json",
        "--speeds", "0.9,1.0",                  "--points",
        "7",        "--no-timestamp"};
    auto with_threads = [&](const std::vector<std::string>& base, const char* n) {
        std::vector<std::string> args = base;
        args.push_back("--threads");
        args.push_back(n);
        return run(args);
    };
    const auto m1 = with_threads(map_args, "1");
    const auto m2 = with_threads(map_args, "2");
    const auto m1b = with_threads(map_args, "1");
    CHECK(m1.code == 0);
    CHECK(m1.out == m2.out);
    CHECK(m1.out == m1b.out);

    const std::vector<std::string> sweep_args = {
        "sweep",    kData + "/designs/p2.json", kData + "/stage_baseline.json",
        "--param",  "two_theta_deg",            "--values",
        "5,6,7,8",  "--mdot", "0.806",          "--no-timestamp"};
    const auto s1 = with_threads(sweep_args, "1");
    const auto s2 = with_threads(sweep_args, "2");
    CHECK(s1.code == 0);
    CHECK(s1.out == s2.out);
}
