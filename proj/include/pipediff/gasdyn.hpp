// One-dimensional isentropic compressible-flow relations for a calorically
// perfect gas: effective flow area, throat blockage, Mach inversion, and
// choking limits.
#pragma once

#include <stdexcept>
#include <string>

namespace pipediff {

struct GasModel {
    double gamma = 1.4;     // specific-heat ratio
    double r_gas = 287.06;  // specific gas constant [J/(kg K)]

    double cp() const { return gamma * r_gas / (gamma - 1.0); }
    void validate() const;
};

struct TotalState {
    double p0 = 0.0;  // stagnation pressure [Pa]
    double t0 = 0.0;  // stagnation temperature [K]

    void validate() const;
};

struct IsentropicRatios {
    double p0_over_p;
    double t0_over_t;
    double rho0_over_rho;
};

// Throat summary at one operating point.
struct ThroatState {
    double mach = 0.0;      // throat Mach number
    double a_eff = 0.0;     // effective flow area [m^2]
    double a_geo = 0.0;     // geometric throat area [m^2]
    double blockage = 0.0;  // 1 - a_eff/a_geo
    double re_d = 0.0;      // Reynolds number on throat diameter
};

// Requested effective area lies below the sonic minimum: the passage cannot
// pass the stated mass flow. Carries the sonic area and the maximum flow.
class ChokedError : public std::runtime_error {
public:
    ChokedError(double sonic_area, double max_mdot);
    double sonic_area() const { return sonic_area_; }
    double max_mdot() const { return max_mdot_; }

private:
    double sonic_area_;
    double max_mdot_;
};

// a_eff > a_geo: the stated Mach cannot pass the stated mass flow through
// the given geometric area.
class InfeasibleBlockage : public std::runtime_error {
public:
    InfeasibleBlockage(double a_eff, double a_geo);
};

enum class FlowBranch { Subsonic, Supersonic };

IsentropicRatios isentropic_ratios(double mach, const GasModel& gas = {});

// Effective (isentropic) flow area for the given mass flow, totals and Mach:
//   A_eff = (mdot sqrt(T0)/P0) sqrt(R/gamma) (1 + (g-1)/2 M^2)^((g+1)/(2(g-1))) / M
double effective_area(double mdot, const TotalState& total, double mach,
                      const GasModel& gas = {});

// Effective area at M = 1 (the minimum over all Mach).
double sonic_area(double mdot, const TotalState& total, const GasModel& gas = {});

// B_th = 1 - a_eff/a_geo. Throws InfeasibleBlockage when a_eff > a_geo.
double throat_blockage(double a_eff, double a_geo);

// Inverts effective_area on the requested branch by bracketed bisection,
// M in (1e-6, 1) or (1, 50). Throws ChokedError when a_eff is below sonic.
double mach_from_effective_area(double mdot, const TotalState& total, double a_eff,
                                const GasModel& gas = {},
                                FlowBranch branch = FlowBranch::Subsonic);

// Maximum mass flow through a_geo with the given blockage fraction:
//   mdot_max = a_geo (1-B) (p0/sqrt(t0)) sqrt(gamma/R) (2/(g+1))^((g+1)/(2(g-1)))
double choke_mass_flow(double a_geo, double blockage, const TotalState& total,
                       const GasModel& gas = {});

// Dynamic viscosity of air by Sutherland's law [Pa s].
double sutherland_viscosity(double t);

}  // namespace pipediff
