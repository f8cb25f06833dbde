#include <cmath>

#include "doctest.h"
#include "pipediff/gasdyn.hpp"

using namespace pipediff;

namespace {
const GasModel kAir{};
const TotalState kTotal{100830.0, 288.15};
}  // namespace

TEST_CASE("isentropic ratios at rest are unity") {
    const auto r = isentropic_ratios(0.0, kAir);
    CHECK(r.p0_over_p == 1.0);
    CHECK(r.t0_over_t == 1.0);
    CHECK(r.rho0_over_rho == 1.0);
}

TEST_CASE("isentropic ratios at sonic and M = 2") {
    // 1.2^3.5 evaluated at extended precision.
    const auto sonic = isentropic_ratios(1.0, kAir);
    CHECK(sonic.p0_over_p == doctest::Approx(1.8929291587378541).epsilon(1e-13));
    const auto m2 = isentropic_ratios(2.0, kAir);
    CHECK(m2.t0_over_t == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("isentropic ratios reject bad Mach and are monotone") {
    CHECK_THROWS_AS(isentropic_ratios(-0.1, kAir), std::domain_error);
    CHECK_THROWS_AS(isentropic_ratios(std::nan(""), kAir), std::domain_error);
    double prev_p = 0.0, prev_t = 0.0, prev_rho = 0.0;
    for (double m = 0.0; m <= 3.0; m += 0.01) {
        const auto r = isentropic_ratios(m, kAir);
        CHECK(r.p0_over_p >= prev_p);
        CHECK(r.t0_over_t >= prev_t);
        CHECK(r.rho0_over_rho >= prev_rho);
        prev_p = r.p0_over_p;
        prev_t = r.t0_over_t;
        prev_rho = r.rho0_over_rho;
    }
}

TEST_CASE("effective area matches the high-precision evaluation") {
    // Frozen from a 50-digit evaluation of the corrected closed form.
    const double a = effective_area(0.806, kTotal, 0.5, kAir);
    CHECK(a == doctest::Approx(0.0044985733059711475).epsilon(1e-12));
    const double a_star = sonic_area(0.806, kTotal, kAir);
    CHECK(a_star == doctest::Approx(0.0033575357618910022).epsilon(1e-12));
}

TEST_CASE("effective area is minimal at M = 1 and linear in mdot") {
    const double a1 = effective_area(0.806, kTotal, 1.0, kAir);
    for (double m = 0.05; m <= 1.0; m += 0.05) {
        CHECK(effective_area(0.806, kTotal, m, kAir) >= a1);
    }
    CHECK(effective_area(1.612, kTotal, 0.5, kAir) ==
          doctest::Approx(2.0 * effective_area(0.806, kTotal, 0.5, kAir)).epsilon(1e-15));
    CHECK_THROWS_AS(effective_area(0.806, kTotal, 0.0, kAir), std::domain_error);
    CHECK_THROWS_AS(effective_area(-1.0, kTotal, 0.5, kAir), std::domain_error);
}

TEST_CASE("effective area is strictly monotone on each branch") {
    double prev = effective_area(0.806, kTotal, 0.01, kAir);
    for (double m = 0.02; m < 1.0; m += 0.01) {
        const double a = effective_area(0.806, kTotal, m, kAir);
        CHECK(a < prev);
        prev = a;
    }
    prev = effective_area(0.806, kTotal, 1.0, kAir);
    for (double m = 1.01; m < 6.0; m += 0.01) {
        const double a = effective_area(0.806, kTotal, m, kAir);
        CHECK(a > prev);
        prev = a;
    }
}

TEST_CASE("throat blockage basics") {
    CHECK(throat_blockage(1e-3, 1e-3) == 0.0);
    // Fixed comparison constants for vaned-diffuser reports.
    CHECK(throat_blockage(0.84e-3, 1e-3) == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(throat_blockage(0.98e-3, 1e-3) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK_THROWS_AS(throat_blockage(1.01e-3, 1e-3), InfeasibleBlockage);
    CHECK_THROWS_AS(throat_blockage(0.0, 1e-3), std::domain_error);
}

TEST_CASE("Mach inversion round trips on both branches") {
    for (double m : {0.2, 0.5, 0.9}) {
        const double a = effective_area(0.806, kTotal, m, kAir);
        const double back = mach_from_effective_area(0.806, kTotal, a, kAir,
                                                     FlowBranch::Subsonic);
        CHECK(std::abs(back - m) < 1e-8);
    }
    for (double m : {1.4, 2.0, 3.5}) {
        const double a = effective_area(0.806, kTotal, m, kAir);
        const double back = mach_from_effective_area(0.806, kTotal, a, kAir,
                                                     FlowBranch::Supersonic);
        CHECK(std::abs(back - m) < 1e-8);
    }
}

TEST_CASE("Mach inversion at and below the sonic area") {
    const double a_star = sonic_area(0.806, kTotal, kAir);
    CHECK(mach_from_effective_area(0.806, kTotal, a_star, kAir, FlowBranch::Subsonic) == 1.0);
    CHECK(mach_from_effective_area(0.806, kTotal, a_star, kAir, FlowBranch::Supersonic) == 1.0);
    CHECK_THROWS_AS(
        mach_from_effective_area(0.806, kTotal, 0.99 * a_star, kAir, FlowBranch::Subsonic),
        ChokedError);
    try {
        mach_from_effective_area(0.806, kTotal, 0.99 * a_star, kAir, FlowBranch::Subsonic);
    } catch (const ChokedError& e) {
        CHECK(e.sonic_area() == doctest::Approx(a_star).epsilon(1e-12));
        CHECK(e.max_mdot() < 0.806);
    }
}

TEST_CASE("choke mass flow limits and scalings") {
    const double a_geo = 1.1561e-3;
    CHECK(choke_mass_flow(a_geo, 1.0 - 1e-12, kTotal, kAir) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(choke_mass_flow(2.0 * a_geo, 0.0, kTotal, kAir) ==
          doctest::Approx(2.0 * choke_mass_flow(a_geo, 0.0, kTotal, kAir)).epsilon(1e-15));
    CHECK_THROWS_AS(choke_mass_flow(a_geo, 1.0, kTotal, kAir), std::domain_error);
    CHECK_THROWS_AS(choke_mass_flow(a_geo, -0.1, kTotal, kAir), std::domain_error);

    // Linear in p0 and ~ 1/sqrt(t0).
    const double base = choke_mass_flow(a_geo, 0.1, kTotal, kAir);
    const double p2 = choke_mass_flow(a_geo, 0.1, {2.0 * kTotal.p0, kTotal.t0}, kAir);
    CHECK(p2 == doctest::Approx(2.0 * base).epsilon(1e-12));
    const double t4 = choke_mass_flow(a_geo, 0.1, {kTotal.p0, 4.0 * kTotal.t0}, kAir);
    CHECK(t4 == doctest::Approx(0.5 * base).epsilon(1e-12));
}

TEST_CASE("choke flow is consistent with the Mach inversion") {
    for (double b : {0.0, 0.02, 0.16, 0.5}) {
        const double a_geo = 1.1561e-3;
        const double mdot = choke_mass_flow(a_geo, b, kTotal, kAir);
        const double m =
            mach_from_effective_area(mdot, kTotal, a_geo * (1.0 - b), kAir, FlowBranch::Subsonic);
        CHECK(std::abs(m - 1.0) < 1e-6);
    }
}

TEST_CASE("blockage round trip identity on B in [0, 0.9]") {
    const double a_geo = 2.0e-3;
    for (double b = 0.0; b <= 0.9 + 1e-12; b += 0.05) {
        const double a_eff = a_geo * (1.0 - b);
        double mach;
        try {
            mach = mach_from_effective_area(0.806, kTotal, a_eff, kAir, FlowBranch::Subsonic);
        } catch (const ChokedError&) {
            continue;  // this blockage cannot pass 0.806 kg/s; not part of the identity
        }
        const double back = throat_blockage(effective_area(0.806, kTotal, mach, kAir), a_geo);
        CHECK(back == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("Sutherland viscosity reference point") {
    CHECK(sutherland_viscosity(273.15) == doctest::Approx(1.716e-5).epsilon(1e-12));
    CHECK(sutherland_viscosity(400.0) > sutherland_viscosity(300.0));
    CHECK_THROWS_AS(sutherland_viscosity(-1.0), std::domain_error);
}
