#include <cmath>

#include "doctest.h"
#include "pipediff/geometry.hpp"

using namespace pipediff;

namespace {

constexpr double kPi = 3.14159265358979323846;

PipeDiffuserDesign p_design(int n, double d_th, double alpha, double two_theta, double length,
                            double d_tan, double r3a = 1.03, double d4 = 250.0) {
    PipeDiffuserDesign d;
    d.n_pipes = n;
    d.d_th = d_th;
    d.alpha = alpha;
    d.two_theta = two_theta;
    d.length = length;
    d.area_ratio = 4.0;
    d.authoritative = AuthoritativeMode::Length;
    d.d_tan = d_tan;
    d.r3a_over_r3 = r3a;
    d.d4 = d4;
    d.passage_height = 7.25;
    return d;
}

}  // namespace

TEST_CASE("angular pitch matches the high-precision evaluation") {
    // 50-digit evaluation of the printed expression at (72.5, 8, 61.7 deg).
    CHECK(angular_pitch(72.5, 8.0, 61.7) ==
          doctest::Approx(0.060378274922594572).epsilon(1e-12));
}

TEST_CASE("angular pitch vanishes in the thin-pipe limit") {
    CHECK(angular_pitch(72.5, 1e-4, 61.7) < 2e-6);
    CHECK(angular_pitch(72.5, 1e-7, 61.7) < 2e-9);
}

TEST_CASE("angular pitch domain failures") {
    CHECK_THROWS_AS(angular_pitch(72.5, 8.0, 20.0), PitchDomainError);
    try {
        angular_pitch(72.5, 8.0, 20.0);
    } catch (const PitchDomainError& e) {
        CHECK(e.reason() == FeasibilityReason::AcosDomainViolation);
    }
    CHECK_THROWS_AS(angular_pitch(4.0, 8.0, 61.7), std::domain_error);   // r_tan <= d/2
    CHECK_THROWS_AS(angular_pitch(72.5, 8.0, 90.0), std::domain_error);  // alpha range
}

TEST_CASE("angular pitch is monotone in d_th and alpha over the feasible domain") {
    for (double alpha = 32.0; alpha <= 80.0; alpha += 4.0) {
        double prev = -1.0;
        for (double ratio = 0.02; ratio <= 0.30; ratio += 0.02) {
            const double d = ratio * 72.5;
            const double t = std::tan(alpha * kPi / 180.0);
            if (t * t < 2.0 * ratio) continue;  // outside the arccos domain
            const double beta = angular_pitch(72.5, d, alpha);
            if (prev >= 0.0) CHECK(beta > prev);
            prev = beta;
        }
    }
    for (double ratio : {0.05, 0.11}) {
        double prev = 1e9;
        const double d = ratio * 72.5;
        for (double alpha = 40.0; alpha <= 80.0; alpha += 2.0) {
            const double beta = angular_pitch(72.5, d, alpha);
            CHECK(beta < prev);
            prev = beta;
        }
    }
}

TEST_CASE("max pipe count semantics") {
    CHECK(max_pipe_count(kPi) == 2);
    CHECK(max_pipe_count(2.0 * kPi / 22.0) == 22);  // exact divisor boundary
    CHECK(max_pipe_count(0.27) == 23);              // 2 pi / 0.27 = 23.27
    CHECK_THROWS_AS(max_pipe_count(0.0), std::domain_error);
    CHECK_THROWS_AS(max_pipe_count(-1.0), std::domain_error);
}

TEST_CASE("pipe count is scale invariant") {
    for (double s : {0.5, 1.0, 2.0, 7.3}) {
        CHECK(max_pipe_count(angular_pitch(s * 72.5, s * 8.0, 61.7)) ==
              max_pipe_count(angular_pitch(72.5, 8.0, 61.7)));
    }
}

TEST_CASE("feasibility report for the baseline design") {
    const auto rep = check_feasibility(p_design(23, 8.0, 61.7, 6.0, 57.0, 150.0));
    CHECK(rep.feasible);
    CHECK(rep.reason == FeasibilityReason::OK);
    CHECK(rep.n_max == 107);
    CHECK(rep.beta == doctest::Approx(0.058334184978073912).epsilon(1e-12));
    CHECK(std::isfinite(rep.limiting_alpha));
    CHECK(rep.limiting_alpha < 61.7);
    CHECK(std::isfinite(rep.limiting_d_th));
    CHECK(rep.limiting_d_th > 8.0);
}

TEST_CASE("feasibility failure reasons") {
    const auto acos_rep = check_feasibility(p_design(23, 8.0, 20.0, 6.0, 57.0, 145.0));
    CHECK_FALSE(acos_rep.feasible);
    CHECK(acos_rep.reason == FeasibilityReason::AcosDomainViolation);
    CHECK(acos_rep.limiting_alpha > 20.0);

    // Just above the arccos boundary the pitch is real but too coarse for the
    // requested count.
    const auto coarse = check_feasibility(p_design(23, 8.0, 25.5, 6.0, 57.0, 145.0));
    CHECK_FALSE(coarse.feasible);
    CHECK(coarse.reason == FeasibilityReason::PitchExceedsRequest);
    CHECK(coarse.n_max < 23);
    CHECK(coarse.n_max > 0);

    CHECK_THROWS_AS(check_feasibility(p_design(23, 300.0, 61.7, 6.0, 57.0, 145.0)),
                    std::domain_error);
}

TEST_CASE("feasibility boundary in alpha matches the arccos-domain condition") {
    const double boundary = pitch_domain_alpha_boundary(72.5, 8.0);
    const double expect = std::atan(std::sqrt(2.0 * 8.0 / 72.5)) * 180.0 / kPi;
    CHECK(boundary == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("derived geometry: cone arithmetic and conflict flags") {
    // d_th 8, L 45, 2theta 10 -> AR 3.9372; within 2% of the declared 4.
    const auto g3 = derive_geometry(p_design(22, 8.0, 61.7, 10.0, 45.0, 145.0, 1.03, 232.0));
    CHECK(g3.ar_actual == doctest::Approx(3.9372380010360088).epsilon(1e-12));
    bool ar_flagged = false;
    for (const auto& f : g3.consistency_flags) ar_flagged |= (f.name == "area_ratio");
    CHECK_FALSE(ar_flagged);

    // d_th 8, L 57, 2theta 6 -> AR 3.0513; conflicts with the declared 4.
    const auto g1 = derive_geometry(p_design(23, 8.0, 61.7, 6.0, 57.0, 150.0, 1.03, 255.0));
    CHECK(g1.ar_actual == doctest::Approx(3.0513481623888930).epsilon(1e-12));
    ar_flagged = false;
    for (const auto& f : g1.consistency_flags) {
        if (f.name == "area_ratio") {
            ar_flagged = true;
            CHECK(f.rel_err > 0.02);
        }
    }
    CHECK(ar_flagged);
    CHECK(g1.a_th_total == doctest::Approx(23.0 * kPi * 64.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("derived geometry: straight pipe limit and AR-authoritative mode") {
    auto straight = p_design(22, 8.0, 61.7, 1e-6, 45.0, 145.0);
    const auto g = derive_geometry(straight);
    CHECK(g.ar_actual == doctest::Approx(1.0).epsilon(1e-6));

    auto by_ar = p_design(23, 8.0, 61.7, 6.0, 57.0, 150.0);
    by_ar.authoritative = AuthoritativeMode::AreaRatio;
    const auto ga = derive_geometry(by_ar);
    CHECK(ga.ar_actual == 4.0);
    const double expect_l = 8.0 * (std::sqrt(4.0) - 1.0) / (2.0 * std::tan(3.0 * kPi / 180.0));
    CHECK(ga.length_actual == doctest::Approx(expect_l).epsilon(1e-12));
    bool length_flagged = false;
    for (const auto& f : ga.consistency_flags) length_flagged |= (f.name == "length");
    CHECK(length_flagged);  // declared 57 mm vs 76.3 mm derived from AR
}

TEST_CASE("derived geometry is idempotent") {
    auto d = p_design(22, 8.0, 61.7, 6.0, 57.0, 145.0);
    const auto g = derive_geometry(d);
    d.area_ratio = g.ar_actual;
    d.d4 = g.d4_actual;
    const auto g2 = derive_geometry(d);
    CHECK(g2.consistency_flags.empty());
}

TEST_CASE("adjacent-axis intersection radius") {
    const auto g = derive_geometry(p_design(22, 8.0, 61.7, 6.0, 57.0, 145.0));
    CHECK(g.r_3b == doctest::Approx(72.5 / std::cos(kPi / 22.0)).epsilon(1e-12));
    CHECK(g.r_3 == 72.5);
    CHECK(g.r_3a == doctest::Approx(1.03 * 72.5).epsilon(1e-12));
}

TEST_CASE("packing oracle agrees with the closed form") {
    const double res = 2.0 * kPi / 256.0;
    for (double alpha : {45.0, 61.7}) {
        for (double d : {6.0, 10.0}) {
            for (double rt : {70.0, 75.0}) {
                const auto design = p_design(2, d, alpha, 6.0, 57.0, 2.0 * rt);
                const long closed = max_pipe_count(angular_pitch(rt, d, alpha));
                const long oracle = oracle_max_pipe_count(design, res);
                CHECK(std::labs(closed - oracle) <= 1);
            }
        }
    }
}

TEST_CASE("packing oracle trends") {
    const double res = 2.0 * kPi / 128.0;
    const long thick = oracle_max_pipe_count(p_design(2, 8.0, 61.7, 6.0, 57.0, 145.0), res);
    const long thin = oracle_max_pipe_count(p_design(2, 4.0, 61.7, 6.0, 57.0, 145.0), res);
    CHECK(thin > thick);

    const long base = oracle_max_pipe_count(p_design(2, 8.0, 55.0, 6.0, 57.0, 145.0), res);
    const long scaled = oracle_max_pipe_count(p_design(2, 16.0, 55.0, 6.0, 114.0, 290.0), res);
    CHECK(base == scaled);

    CHECK_THROWS_AS(oracle_max_pipe_count(p_design(2, 8.0, 61.7, 6.0, 57.0, 145.0), 0.2),
                    std::invalid_argument);
}

TEST_CASE("design validation") {
    auto d = p_design(23, 8.0, 61.7, 6.0, 57.0, 150.0);
    CHECK_NOTHROW(d.validate());
    d.n_pipes = 1;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = p_design(23, 8.0, 61.7, 6.0, 57.0, 150.0);
    d.length.reset();
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = p_design(23, 8.0, 61.7, 35.0, 57.0, 150.0);
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
