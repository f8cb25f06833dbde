#include "pipediff/gasdyn.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace pipediff {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void GasModel::validate() const {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("GasModel: gamma must be > 1, got " + fmt(gamma));
    }
    if (!(r_gas > 0.0) || !std::isfinite(r_gas)) {
        throw std::invalid_argument("GasModel: r_gas must be > 0, got " + fmt(r_gas));
    }
}

void TotalState::validate() const {
    if (!(p0 > 0.0) || !std::isfinite(p0)) {
        throw std::invalid_argument("TotalState: p0 must be > 0, got " + fmt(p0));
    }
    if (!(t0 > 0.0) || !std::isfinite(t0)) {
        throw std::invalid_argument("TotalState: t0 must be > 0, got " + fmt(t0));
    }
}

ChokedError::ChokedError(double sonic_area, double max_mdot)
    : std::runtime_error("choked: requested effective area below sonic minimum " +
                         fmt(sonic_area) + " m^2 (max mass flow " + fmt(max_mdot) + " kg/s)"),
      sonic_area_(sonic_area),
      max_mdot_(max_mdot) {}

InfeasibleBlockage::InfeasibleBlockage(double a_eff, double a_geo)
    : std::runtime_error("infeasible blockage: a_eff " + fmt(a_eff) + " m^2 exceeds a_geo " +
                         fmt(a_geo) + " m^2; the stated Mach cannot pass the stated mass flow") {}

IsentropicRatios isentropic_ratios(double mach, const GasModel& gas) {
    gas.validate();
    if (!std::isfinite(mach) || mach < 0.0) {
        throw std::domain_error("isentropic_ratios: mach must be finite and >= 0");
    }
    const double g = gas.gamma;
    IsentropicRatios r;
    r.t0_over_t = 1.0 + 0.5 * (g - 1.0) * mach * mach;
    r.p0_over_p = std::pow(r.t0_over_t, g / (g - 1.0));
    r.rho0_over_rho = std::pow(r.t0_over_t, 1.0 / (g - 1.0));
    return r;
}

double effective_area(double mdot, const TotalState& total, double mach, const GasModel& gas) {
    gas.validate();
    total.validate();
    if (!(mdot > 0.0) || !std::isfinite(mdot)) {
        throw std::domain_error("effective_area: mdot must be > 0");
    }
    if (!(mach > 0.0) || !std::isfinite(mach)) {
        throw std::domain_error("effective_area: mach must be > 0 (formula singular at M = 0)");
    }
    const double g = gas.gamma;
    const double t = 1.0 + 0.5 * (g - 1.0) * mach * mach;
    const double expo = (g + 1.0) / (2.0 * (g - 1.0));
    return (mdot * std::sqrt(total.t0) / total.p0) * std::sqrt(gas.r_gas / g) *
           std::pow(t, expo) / mach;
}

double sonic_area(double mdot, const TotalState& total, const GasModel& gas) {
    return effective_area(mdot, total, 1.0, gas);
}

double throat_blockage(double a_eff, double a_geo) {
    if (!(a_eff > 0.0) || !std::isfinite(a_eff)) {
        throw std::domain_error("throat_blockage: a_eff must be > 0");
    }
    if (!(a_geo > 0.0) || !std::isfinite(a_geo)) {
        throw std::domain_error("throat_blockage: a_geo must be > 0");
    }
    if (a_eff > a_geo) {
        throw InfeasibleBlockage(a_eff, a_geo);
    }
    return 1.0 - a_eff / a_geo;
}

double mach_from_effective_area(double mdot, const TotalState& total, double a_eff,
                                const GasModel& gas, FlowBranch branch) {
    if (!(a_eff > 0.0) || !std::isfinite(a_eff)) {
        throw std::domain_error("mach_from_effective_area: a_eff must be > 0");
    }
    const double a_star = sonic_area(mdot, total, gas);
    if (a_eff < a_star * (1.0 - 1e-12)) {
        throw ChokedError(a_star, choke_mass_flow(a_eff, 0.0, total, gas));
    }
    if (a_eff <= a_star * (1.0 + 1e-12)) {
        return 1.0;  // branch point
    }

    // Bracketed bisection; the target function is monotone on each branch and
    // dA/dM = 0 at M = 1, so no derivative-based method is used.
    double lo, hi;
    if (branch == FlowBranch::Subsonic) {
        lo = 1e-6;
        hi = 1.0;
    } else {
        lo = 1.0;
        hi = 50.0;
    }
    auto residual = [&](double m) { return effective_area(mdot, total, m, gas) - a_eff; };
    double f_lo = residual(lo);
    double f_hi = residual(hi);
    if (f_lo * f_hi > 0.0) {
        throw std::domain_error(
            "mach_from_effective_area: a_eff not bracketed on the requested branch");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if (std::abs(f_mid) / a_eff < 1e-10 || (hi - lo) < 1e-15) {
            return mid;
        }
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

double choke_mass_flow(double a_geo, double blockage, const TotalState& total,
                       const GasModel& gas) {
    gas.validate();
    total.validate();
    if (!(a_geo > 0.0) || !std::isfinite(a_geo)) {
        throw std::domain_error("choke_mass_flow: a_geo must be > 0");
    }
    if (!(blockage >= 0.0 && blockage < 1.0)) {
        throw std::domain_error("choke_mass_flow: blockage must be in [0, 1)");
    }
    const double g = gas.gamma;
    const double expo = (g + 1.0) / (2.0 * (g - 1.0));
    return a_geo * (1.0 - blockage) * (total.p0 / std::sqrt(total.t0)) *
           std::sqrt(g / gas.r_gas) * std::pow(2.0 / (g + 1.0), expo);
}

double sutherland_viscosity(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::domain_error("sutherland_viscosity: temperature must be > 0");
    }
    constexpr double mu_ref = 1.716e-5;  // Pa s at 273.15 K
    constexpr double t_ref = 273.15;
    constexpr double s = 110.4;
    return mu_ref * std::pow(t / t_ref, 1.5) * (t_ref + s) / (t + s);
}

}  // namespace pipediff
