// One-dimensional stage model: impeller exit boundary state (Euler work,
// Wiesner slip, polytropic efficiency), vaneless-space march, throat solve
// with an incidence blockage model, conical-channel closure against a
// recovery map, speedlines and performance maps.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "pipediff/diffusermap.hpp"
#include "pipediff/gasdyn.hpp"
#include "pipediff/geometry.hpp"

namespace pipediff {

enum class SlipModel { Wiesner };

struct CompressorSpec {
    double omega_design = 0.0;      // shaft speed [rpm]
    double d2 = 0.0;                // impeller tip diameter [m]
    double b2 = 0.0;                // exit blade height [m]
    int n_blades = 0;
    double backsweep = 0.0;         // blade backsweep angle [deg]
    SlipModel slip_model = SlipModel::Wiesner;
    double impeller_poly_eff = 0.0; // polytropic efficiency
    TotalState inlet_total;

    void validate() const;
};

// Stage closure constants; the file interface carries these flat.
struct StageConfig {
    CompressorSpec spec;
    GasModel gas;
    double b_ref = 0.0;            // baseline throat blockage
    double k_inc = 0.0;            // incidence blockage gain [1/deg^2]
    double stall_angle = 78.0;     // surge proxy flow angle [deg from radial]
    double friction_coeff = 0.0;   // vaneless skin-friction coefficient
    double exit_blockage = 0.0;    // impeller exit wake blockage fraction

    void validate() const;
};

struct StationState {
    double radius = 0.0;       // m
    double flow_area = 0.0;    // m^2
    double mach = 0.0;
    double static_p = 0.0;     // Pa
    double static_t = 0.0;     // K
    double velocity = 0.0;     // m/s
    double c_theta = 0.0;      // tangential component [m/s]
    double c_r = 0.0;          // through-flow component [m/s]
    double flow_angle = 0.0;   // deg from radial
    TotalState total;
    double mdot = 0.0;         // kg/s
};

struct PointFlags {
    bool choked = false;
    bool surge = false;
};

struct StagePoint {
    double mdot = 0.0;
    double speed_fraction = 0.0;
    double pr_tt = 0.0;          // P_t4/P_t1
    double eta_tt = 0.0;         // total-to-total isentropic efficiency
    double cp = 0.0;             // diffuser recovery, station-3 referenced
    double cp0 = 0.0;            // diffuser total-pressure loss, station-3 referenced
    double b_th = 0.0;
    double mach_th = 0.0;
    double re_d = 0.0;
    double flow_angle3 = 0.0;    // deg from radial
    double p_s4_over_pt1 = 0.0;  // outlet static over inlet total
    PointFlags flags;
};

struct SpeedLine {
    double speed_fraction = 0.0;
    std::vector<StagePoint> points;  // ordered by mdot
    double choke_mdot = 0.0;
    double surge_mdot = 0.0;
};

struct PerformanceMap {
    std::vector<SpeedLine> lines;
};

// Channel recovery source: interpolated map, fixed value, or the lossless
// closure (isentropic diffusion, p_t4 = p_t3).
class CpSource {
public:
    static CpSource from_map(const DiffuserMap& map) { return CpSource(&map, 0.0, Kind::Map); }
    static CpSource fixed(double cp) { return CpSource(nullptr, cp, Kind::Fixed); }
    static CpSource lossless() { return CpSource(nullptr, 0.0, Kind::Lossless); }

    bool is_lossless() const { return kind_ == Kind::Lossless; }
    // Channel recovery for the query; fixed and lossless sources ignore it.
    double value(const MapQuery& q) const;

private:
    enum class Kind { Map, Fixed, Lossless };
    CpSource(const DiffuserMap* map, double cp, Kind kind) : map_(map), cp_(cp), kind_(kind) {}
    const DiffuserMap* map_;
    double cp_;
    Kind kind_;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> residuals);
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

// Impeller exit state from Euler work, Wiesner slip and a continuity
// iteration on the radial velocity.
StationState impeller_exit_state(const StageConfig& config, double mdot, double speed_fraction);

// Marches the vaneless space from the input radius to r_ratio times it.
// friction_coeff = 0 conserves r*Ctheta and total pressure.
StationState vaneless_evolve(const StationState& state2, double r_ratio, double passage_height,
                             double friction_coeff, const GasModel& gas = {}, int n_steps = 200);

// Flow angle from the radial direction [deg].
double flow_angle(const StationState& state);

struct ThroatResult {
    ThroatState throat;
    StationState station;
    bool choked = false;
    double capped_mdot = 0.0;  // mass flow actually passed when choked
};

// Throat blockage for the given design at the given inlet flow angle:
//   B = b_ref * span_factor(r3a_over_r3) + k_inc (angle - alpha)^2
double throat_blockage_model(const StageConfig& config, const PipeDiffuserDesign& design,
                             double flow_angle_deg);

ThroatResult throat_state(const StationState& state3, const PipeDiffuserDesign& design,
                          const DerivedGeometry& derived, const StageConfig& config);

// Conical-channel closure: static recovery from the cp source, outlet state
// from continuity on the geometric outlet area.
StationState channel_outlet(const ThroatResult& throat, const CpSource& cp_source,
                            const PipeDiffuserDesign& design, const DerivedGeometry& derived,
                            const GasModel& gas = {});

// pr_tt and eta_tt from inlet total state and outlet station.
std::pair<double, double> stage_performance(const TotalState& station1_total,
                                            const StationState& station4,
                                            const GasModel& gas = {});

// Full chain at one operating point.
StagePoint evaluate_point(const StageConfig& config, const PipeDiffuserDesign& design,
                          const DerivedGeometry& derived, const CpSource& cp_source, double mdot,
                          double speed_fraction);

// Evaluates a batch of operating points; the parallel kernel gives results
// identical to the serial reference for any worker count.
std::vector<StagePoint> evaluate_points_serial(const StageConfig& config,
                                               const PipeDiffuserDesign& design,
                                               const DerivedGeometry& derived,
                                               const CpSource& cp_source,
                                               const std::vector<double>& mdots,
                                               double speed_fraction);
std::vector<StagePoint> evaluate_points_parallel(const StageConfig& config,
                                                 const PipeDiffuserDesign& design,
                                                 const DerivedGeometry& derived,
                                                 const CpSource& cp_source,
                                                 const std::vector<double>& mdots,
                                                 double speed_fraction);

SpeedLine speedline(const StageConfig& config, const PipeDiffuserDesign& design,
                    const DerivedGeometry& derived, const CpSource& cp_source,
                    double speed_fraction, int n_points);

PerformanceMap performance_map(const StageConfig& config, const PipeDiffuserDesign& design,
                               const DerivedGeometry& derived, const CpSource& cp_source,
                               const std::vector<double>& speed_fractions, int n_points);

}  // namespace pipediff
