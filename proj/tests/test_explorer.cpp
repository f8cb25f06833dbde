#include <cmath>

#include "doctest.h"
#include "pipediff/explorer.hpp"
#include "pipediff/io.hpp"

using namespace pipediff;

namespace {

const std::string kData = PIPEDIFF_DATA_DIR;

StageConfig shipped_config() { return load_stage_config(kData + "/stage_baseline.json"); }

const DiffuserMap& demo_map() {
    static const DiffuserMap map = synthetic_demo_map();
    return map;
}

PipeDiffuserDesign load_p(const char* id) {
    return load_design(kData + "/designs/" + std::string(id) + ".json");
}

}  // namespace

TEST_CASE("sweeping a parameter to its base value reproduces the base evaluation") {
    const auto cfg = shipped_config();
    const auto base = load_p("p2");
    const CpSource cp = CpSource::from_map(demo_map());
    const auto rep = ofat_sweep(base, "d_tan_mm", {145.0}, cfg, cp, 0.806, 1.0);
    REQUIRE(rep.records.size() == 1);
    REQUIRE(rep.records[0].point.has_value());
    const auto direct = evaluate_point(cfg, base, derive_geometry(base), cp, 0.806, 1.0);
    CHECK(rep.records[0].point->pr_tt == direct.pr_tt);
    CHECK(rep.records[0].point->eta_tt == direct.eta_tt);
    CHECK(rep.records[0].point->cp == direct.cp);
    CHECK(rep.records[0].point->b_th == direct.b_th);
}

TEST_CASE("tangency-circle sweep prefers the smaller reference diameter") {
    const auto cfg = shipped_config();
    const auto base = load_p("p2");
    const CpSource cp = CpSource::from_map(demo_map());
    const auto rep = ofat_sweep(base, "d_tan_mm", {145.0, 150.0}, cfg, cp, 0.806, 1.0);
    REQUIRE(rep.records.size() == 2);
    REQUIRE(rep.records[0].point.has_value());
    REQUIRE(rep.records[1].point.has_value());
    CHECK(rep.records[0].point->eta_tt > rep.records[1].point->eta_tt);
}

TEST_CASE("inclination sweep records the formula's own feasibility verdicts") {
    const auto cfg = shipped_config();
    const auto base = load_p("p1");
    const CpSource cp = CpSource::from_map(demo_map());
    const auto rep = ofat_sweep(base, "alpha_deg", {61.7, 66.0}, cfg, cp, 0.806, 1.0);
    REQUIRE(rep.records.size() == 2);
    for (const auto& rec : rep.records) {
        PipeDiffuserDesign d = base;
        d.alpha = rec.value;
        const auto expect = check_feasibility(d);
        CHECK(rec.feasibility.feasible == expect.feasible);
        CHECK(rec.feasibility.reason == expect.reason);
        CHECK(rec.point.has_value() == expect.feasible);
    }
}

TEST_CASE("infeasible sweep values yield records without stage points") {
    const auto cfg = shipped_config();
    const auto base = load_p("p1");
    const CpSource cp = CpSource::from_map(demo_map());
    const auto rep = ofat_sweep(base, "alpha_deg", {20.0, 61.7}, cfg, cp, 0.806, 1.0);
    REQUIRE(rep.records.size() == 2);
    CHECK_FALSE(rep.records[0].feasibility.feasible);
    CHECK(rep.records[0].feasibility.reason == FeasibilityReason::AcosDomainViolation);
    CHECK_FALSE(rep.records[0].point.has_value());
    CHECK(rep.records[1].point.has_value());
}

TEST_CASE("sweep input validation") {
    const auto cfg = shipped_config();
    const auto base = load_p("p1");
    const CpSource cp = CpSource::from_map(demo_map());
    CHECK_THROWS_AS(ofat_sweep(base, "alpha_deg", {}, cfg, cp, 0.806, 1.0),
                    std::invalid_argument);
    try {
        ofat_sweep(base, "bogus", {1.0}, cfg, cp, 0.806, 1.0);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("alpha_deg") != std::string::npos);
        CHECK(msg.find("d_tan_mm") != std::string::npos);
    }
}

TEST_CASE("comparison table reproduces the published efficiency ordering") {
    const auto cfg = shipped_config();
    const CpSource cp = CpSource::from_map(demo_map());
    std::vector<std::pair<std::string, PipeDiffuserDesign>> designs;
    for (const char* id : {"p1", "p2", "p3", "p4"}) designs.emplace_back(id, load_p(id));
    const auto table = design_table(designs, cfg, cp, 0.806, 1.0);
    REQUIRE(table.rows.size() == 4);
    for (const auto& row : table.rows) {
        REQUIRE(row.point.has_value());
        CHECK(row.feasible);
    }
    const double e1 = table.rows[0].point->eta_tt;
    const double e2 = table.rows[1].point->eta_tt;
    const double e3 = table.rows[2].point->eta_tt;
    const double e4 = table.rows[3].point->eta_tt;
    CHECK(e2 > e4);
    CHECK(e4 > e1);
    CHECK(e1 > e3);

    // Baseline and reduced-span designs report physically small blockage;
    // the shipped closure puts both near the calibrated baseline value.
    CHECK(table.rows[1].point->b_th > 0.0);
    CHECK(table.rows[1].point->b_th < 0.1);
    CHECK(table.rows[3].point->b_th > table.rows[1].point->b_th);

    // P1 carries declared-vs-derived conflicts.
    CHECK(table.rows[0].n_conflicts > 0);
}

TEST_CASE("single-design table equals standalone evaluation") {
    const auto cfg = shipped_config();
    const CpSource cp = CpSource::from_map(demo_map());
    const auto design = load_p("p3");
    const auto table = design_table({{"p3", design}}, cfg, cp, 0.806, 1.0);
    REQUIRE(table.rows.size() == 1);
    const auto direct = evaluate_point(cfg, design, derive_geometry(design), cp, 0.806, 1.0);
    CHECK(table.rows[0].point->pr_tt == direct.pr_tt);
    CHECK(table.rows[0].point->eta_tt == direct.eta_tt);
    CHECK_THROWS_AS(design_table({}, cfg, cp, 0.806, 1.0), std::invalid_argument);
}

TEST_CASE("sweep reports are deterministic") {
    const auto cfg = shipped_config();
    const auto base = load_p("p2");
    const CpSource cp = CpSource::from_map(demo_map());
    const std::vector<double> values = {5.0, 6.0, 7.0, 8.0, 9.0};
    const auto a = ofat_sweep(base, "d_th_mm", values, cfg, cp, 0.806, 1.0);
    const auto b = ofat_sweep(base, "d_th_mm", values, cfg, cp, 0.806, 1.0);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].point.has_value() == b.records[i].point.has_value());
        if (a.records[i].point) {
            CHECK(a.records[i].point->pr_tt == b.records[i].point->pr_tt);
            CHECK(a.records[i].point->eta_tt == b.records[i].point->eta_tt);
        }
    }
}
