#include "pipediff/meanline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pipediff {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Reference leading-edge span ratio; the baseline blockage b_ref is anchored
// at R_3a/R_3 = 1.03 and scaled up for shorter ridge spans.
constexpr double kSpanRefRatio = 0.03;

// Incidence above the leading-edge axis angle grows the suction-side
// boundary layer; below it the choke limit governs instead, so the
// incidence term is one-sided.
constexpr double kBlockageCap = 0.35;

// Fraction of the inlet dynamic head lost between the leading edge and the
// throat per unit blockage (the semi-vaneless space produces loss, not
// recovery, once the throat blocks up).
constexpr double kSemiVanelessLoss = 1.0;

}  // namespace

void CompressorSpec::validate() const {
    if (!(omega_design > 0.0)) throw std::invalid_argument("spec: omega_design must be > 0 rpm");
    if (!(d2 > 0.0)) throw std::invalid_argument("spec: d2 must be > 0 m");
    if (!(b2 > 0.0)) throw std::invalid_argument("spec: b2 must be > 0 m");
    if (n_blades < 2) throw std::invalid_argument("spec: n_blades must be >= 2");
    if (!(backsweep >= 0.0 && backsweep < 90.0)) {
        throw std::invalid_argument("spec: backsweep must be in [0, 90) deg");
    }
    if (!(impeller_poly_eff > 0.0 && impeller_poly_eff <= 1.0)) {
        throw std::invalid_argument("spec: impeller_poly_eff must be in (0, 1]");
    }
    inlet_total.validate();
}

void StageConfig::validate() const {
    spec.validate();
    gas.validate();
    if (!(b_ref >= 0.0 && b_ref < 1.0)) throw std::invalid_argument("config: b_ref must be in [0, 1)");
    if (!(k_inc >= 0.0)) throw std::invalid_argument("config: k_inc must be >= 0");
    if (!(stall_angle > 0.0 && stall_angle < 90.0)) {
        throw std::invalid_argument("config: stall_angle must be in (0, 90) deg");
    }
    if (!(friction_coeff >= 0.0)) throw std::invalid_argument("config: friction_coeff must be >= 0");
    if (!(exit_blockage >= 0.0 && exit_blockage < 1.0)) {
        throw std::invalid_argument("config: exit_blockage must be in [0, 1)");
    }
}

double CpSource::value(const MapQuery& q) const {
    switch (kind_) {
        case Kind::Map: return map_->lookup_cp(q).cp;
        case Kind::Fixed: return cp_;
        case Kind::Lossless: return std::nan("");
    }
    return std::nan("");
}

NonConvergenceError::NonConvergenceError(const std::string& what, std::vector<double> residuals)
    : std::runtime_error(what), residuals_(std::move(residuals)) {}

namespace {

struct StaticState {
    double t, p, rho, mach;
};

// Static state from totals, velocity magnitude and the gas model.
StaticState static_from_total(const TotalState& total, double velocity, const GasModel& gas) {
    const double cp = gas.cp();
    const double t = total.t0 - velocity * velocity / (2.0 * cp);
    if (!(t > 0.0)) {
        throw NonConvergenceError("static state: velocity exceeds stagnation enthalpy", {});
    }
    const double p = total.p0 * std::pow(t / total.t0, gas.gamma / (gas.gamma - 1.0));
    const double rho = p / (gas.r_gas * t);
    const double mach = velocity / std::sqrt(gas.gamma * gas.r_gas * t);
    return {t, p, rho, mach};
}

// Damped fixed-point continuity solve for the through-flow velocity at a
// station with fixed tangential velocity and totals.
double solve_cr(double mdot, double area, double c_theta, const TotalState& total,
                const GasModel& gas, double guess, std::vector<double>* history = nullptr) {
    double cr = std::max(guess, 1e-3);
    for (int it = 0; it < 400; ++it) {
        const double c2 = c_theta * c_theta + cr * cr;
        const StaticState st = static_from_total(total, std::sqrt(c2), gas);
        const double cr_new = mdot / (st.rho * area);
        const double resid = std::abs(cr_new - cr) / std::max(1.0, std::abs(cr));
        if (history) history->push_back(resid);
        if (resid < 1e-13) {
            return cr_new;
        }
        cr += 0.5 * (cr_new - cr);
        if (!(cr > 0.0) || !std::isfinite(cr)) break;
    }
    throw NonConvergenceError("continuity iteration did not converge",
                              history ? *history : std::vector<double>{});
}

StationState station_from(double radius, double area, double c_theta, double cr,
                          const TotalState& total, double mdot, const GasModel& gas) {
    StationState s;
    s.radius = radius;
    s.flow_area = area;
    s.c_theta = c_theta;
    s.c_r = cr;
    s.velocity = std::hypot(c_theta, cr);
    const StaticState st = static_from_total(total, s.velocity, gas);
    s.static_p = st.p;
    s.static_t = st.t;
    s.mach = st.mach;
    s.flow_angle = rad2deg(std::atan2(c_theta, cr));
    s.total = total;
    s.mdot = mdot;
    return s;
}

}  // namespace

StationState impeller_exit_state(const StageConfig& config, double mdot, double speed_fraction) {
    config.validate();
    if (!(mdot > 0.0)) throw std::invalid_argument("impeller_exit_state: mdot must be > 0");
    if (!(speed_fraction > 0.0 && speed_fraction <= 1.1)) {
        throw std::invalid_argument("impeller_exit_state: speed_fraction must be in (0, 1.1]");
    }
    const CompressorSpec& sp = config.spec;
    const GasModel& gas = config.gas;
    const double u2 = kPi * (speed_fraction * sp.omega_design / 60.0) * sp.d2;
    const double sigma =
        1.0 - std::sqrt(std::cos(deg2rad(sp.backsweep))) / std::pow(sp.n_blades, 0.7);
    const double tan_bs = std::tan(deg2rad(sp.backsweep));
    const double area = kPi * sp.d2 * sp.b2 * (1.0 - config.exit_blockage);
    const double cp = gas.cp();

    std::vector<double> history;
    double cr = mdot / (sp.inlet_total.p0 / (gas.r_gas * sp.inlet_total.t0) * area);
    double c_theta = 0.0;
    TotalState total2{};
    bool converged = false;
    for (int it = 0; it < 400; ++it) {
        c_theta = sigma * u2 - cr * tan_bs;
        const double dh0 = u2 * c_theta;
        const double t_t2 = sp.inlet_total.t0 + dh0 / cp;
        if (!(t_t2 > 0.0)) {
            throw NonConvergenceError("impeller_exit_state: negative stagnation temperature",
                                      history);
        }
        const double p_t2 =
            sp.inlet_total.p0 *
            std::pow(t_t2 / sp.inlet_total.t0,
                     gas.gamma * sp.impeller_poly_eff / (gas.gamma - 1.0));
        total2 = {p_t2, t_t2};
        const double c2 = std::hypot(c_theta, cr);
        const StaticState st = static_from_total(total2, c2, gas);
        const double cr_new = mdot / (st.rho * area);
        const double resid = std::abs(cr_new - cr) / std::max(1.0, std::abs(cr));
        history.push_back(resid);
        if (resid < 1e-10) {
            cr = cr_new;
            converged = true;
            break;
        }
        cr += 0.5 * (cr_new - cr);
        if (!(cr > 0.0) || !std::isfinite(cr)) {
            throw NonConvergenceError("impeller_exit_state: continuity iteration diverged",
                                      history);
        }
    }
    if (!converged) {
        throw NonConvergenceError("impeller_exit_state: continuity iteration did not converge",
                                  history);
    }
    c_theta = sigma * u2 - cr * tan_bs;
    return station_from(0.5 * sp.d2, area, c_theta, cr, total2, mdot, gas);
}

StationState vaneless_evolve(const StationState& state2, double r_ratio, double passage_height,
                             double friction_coeff, const GasModel& gas, int n_steps) {
    if (!(r_ratio >= 1.0)) {
        throw std::domain_error("vaneless_evolve: r_ratio must be >= 1");
    }
    if (!(passage_height > 0.0)) {
        throw std::domain_error("vaneless_evolve: passage_height must be > 0");
    }
    n_steps = std::max(n_steps, 200);
    if (r_ratio == 1.0) {
        return state2;
    }

    const double r2 = state2.radius;
    const double r3 = r_ratio * r2;
    const double h = (r3 - r2) / n_steps;
    const double t_t = state2.total.t0;  // adiabatic, no work
    const double mdot = state2.mdot;

    // State y = (c_theta, p_t); the through-flow velocity is an algebraic
    // continuity closure at each evaluation.
    double c_theta = state2.c_theta;
    double p_t = state2.total.p0;
    double cr_hint = state2.c_r;

    auto rhs = [&](double r, double ct, double pt, double& cr_out) {
        const double area = 2.0 * kPi * r * passage_height;
        const TotalState tot{pt, t_t};
        const double cr = solve_cr(mdot, area, ct, tot, gas, cr_hint);
        cr_out = cr;
        const double c = std::hypot(ct, cr);
        const StaticState st = static_from_total(tot, c, gas);
        const double dct = -ct / r - friction_coeff * c * ct / (passage_height * cr);
        const double dpt = -friction_coeff * st.rho * c * c * c / (passage_height * cr);
        return std::pair<double, double>(dct, dpt);
    };

    for (int i = 0; i < n_steps; ++i) {
        const double r = r2 + i * h;
        double cr_stage = cr_hint;
        const auto k1 = rhs(r, c_theta, p_t, cr_stage);
        const auto k2 = rhs(r + 0.5 * h, c_theta + 0.5 * h * k1.first, p_t + 0.5 * h * k1.second,
                            cr_stage);
        const auto k3 = rhs(r + 0.5 * h, c_theta + 0.5 * h * k2.first, p_t + 0.5 * h * k2.second,
                            cr_stage);
        const auto k4 = rhs(r + h, c_theta + h * k3.first, p_t + h * k3.second, cr_stage);
        c_theta += h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
        p_t += h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
        cr_hint = cr_stage;
        if (!(p_t > 0.0) || !std::isfinite(c_theta)) {
            throw NonConvergenceError("vaneless_evolve: non-physical state during march", {});
        }
    }

    const double area3 = 2.0 * kPi * r3 * passage_height;
    const TotalState tot3{p_t, t_t};
    const double cr3 = solve_cr(mdot, area3, c_theta, tot3, gas, cr_hint);
    return station_from(r3, area3, c_theta, cr3, tot3, mdot, gas);
}

double flow_angle(const StationState& state) {
    if (!(state.velocity > 0.0)) {
        throw std::domain_error("flow_angle: velocity must be > 0");
    }
    if (!(state.c_r > 0.0)) {
        throw std::domain_error("flow_angle: reversed flow (through-flow component <= 0)");
    }
    return rad2deg(std::atan(state.c_theta / state.c_r));
}

double throat_blockage_model(const StageConfig& config, const PipeDiffuserDesign& design,
                             double flow_angle_deg) {
    double span_factor = 2.0;
    if (design.r3a_over_r3 > 1.0) {
        span_factor =
            std::clamp(std::sqrt(kSpanRefRatio / (design.r3a_over_r3 - 1.0)), 0.5, 2.0);
    }
    // Pipe axis inclination from radial at the leading-edge circle.
    const double ref_angle = rad2deg(std::asin(std::min(1.0, 1.0 / design.r3a_over_r3)));
    const double da = std::max(0.0, flow_angle_deg - ref_angle);
    const double b = config.b_ref * span_factor + config.k_inc * da * da;
    return std::clamp(b, 0.0, kBlockageCap);
}

ThroatResult throat_state(const StationState& state3, const PipeDiffuserDesign& design,
                          const DerivedGeometry& derived, const StageConfig& config) {
    const GasModel& gas = config.gas;
    const double a_geo = derived.a_th_total * 1e-6;  // mm^2 -> m^2
    const double b = throat_blockage_model(config, design, state3.flow_angle);
    const double a_eff = a_geo * (1.0 - b);

    // Blockage also destroys part of the inlet dynamic head between the
    // leading edge and the throat.
    const double q3 = state3.total.p0 - state3.static_p;
    const TotalState total_th{state3.total.p0 - kSemiVanelessLoss * b * q3, state3.total.t0};

    ThroatResult res;
    res.capped_mdot = state3.mdot;
    double mach;
    try {
        mach = mach_from_effective_area(state3.mdot, total_th, a_eff, gas, FlowBranch::Subsonic);
    } catch (const ChokedError&) {
        res.choked = true;
        mach = 1.0;
        res.capped_mdot = choke_mass_flow(a_geo, b, total_th, gas);
    }

    const IsentropicRatios ir = isentropic_ratios(mach, gas);
    const double t_th = total_th.t0 / ir.t0_over_t;
    const double p_th = total_th.p0 / ir.p0_over_p;
    const double rho_th = p_th / (gas.r_gas * t_th);
    const double v_th = mach * std::sqrt(gas.gamma * gas.r_gas * t_th);
    const double d_th_m = design.d_th * 1e-3;

    res.throat.mach = mach;
    res.throat.a_eff = a_eff;
    res.throat.a_geo = a_geo;
    res.throat.blockage = b;
    res.throat.re_d = rho_th * v_th * d_th_m / sutherland_viscosity(t_th);

    StationState st;
    st.radius = derived.throat_radius * 1e-3;
    st.flow_area = a_eff;
    st.mach = mach;
    st.static_p = p_th;
    st.static_t = t_th;
    st.velocity = v_th;
    // The flow follows the pipe axis; at the throat the axis subtends
    // asin(r_tan/r_throat) from the radial direction.
    const double chi = std::asin(std::min(1.0, design.r_tan() / derived.throat_radius));
    st.c_theta = v_th * std::sin(chi);
    st.c_r = v_th * std::cos(chi);
    st.flow_angle = rad2deg(chi);
    st.total = total_th;
    st.mdot = res.capped_mdot;
    res.station = st;
    return res;
}

StationState channel_outlet(const ThroatResult& throat, const CpSource& cp_source,
                            const PipeDiffuserDesign& design, const DerivedGeometry& derived,
                            const GasModel& gas) {
    const double a4 = derived.ar_actual * derived.a_th_total * 1e-6;  // m^2
    const double mdot = throat.station.mdot;
    const TotalState tot_in = throat.station.total;
    const double t_t = tot_in.t0;
    const double cp_gas = gas.cp();

    double p4, p_t4, c4;
    if (cp_source.is_lossless()) {
        // Isentropic diffusion: total pressure carries through, the outlet
        // Mach follows from the effective-area relation on the outlet area.
        const double m4 = mach_from_effective_area(mdot, tot_in, a4, gas, FlowBranch::Subsonic);
        const IsentropicRatios ir = isentropic_ratios(m4, gas);
        p_t4 = tot_in.p0;
        p4 = p_t4 / ir.p0_over_p;
        c4 = m4 * std::sqrt(gas.gamma * gas.r_gas * t_t / ir.t0_over_t);
    } else {
        MapQuery q;
        q.area_ratio = derived.ar_actual;
        q.l_over_d = derived.length_actual / design.d_th;
        q.blockage = throat.throat.blockage;
        q.mach_th = throat.throat.mach;
        q.re_d = throat.throat.re_d;
        const double cp_ch = cp_source.value(q);
        if (!(cp_ch < 1.0)) {
            throw std::domain_error("channel_outlet: channel recovery cp must be < 1, got " +
                                    fmt(cp_ch));
        }
        const double q_th = tot_in.p0 - throat.station.static_p;
        p4 = throat.station.static_p + cp_ch * q_th;

        // Outlet velocity from continuity at the fixed static pressure; the
        // mass-flux function is monotone in c4 below the stagnation limit.
        const double c_max = std::sqrt(2.0 * cp_gas * t_t) * 0.999;
        auto flux = [&](double c) {
            const double t = t_t - c * c / (2.0 * cp_gas);
            const double rho = p4 / (gas.r_gas * t);
            return rho * c * a4 - mdot;
        };
        double lo = 0.0, hi = c_max;
        if (flux(hi) < 0.0) {
            throw NonConvergenceError(
                "channel_outlet: continuity has no solution at the recovered pressure", {});
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (flux(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-12 * c_max) break;
        }
        c4 = 0.5 * (lo + hi);
        const double t4 = t_t - c4 * c4 / (2.0 * cp_gas);
        p_t4 = p4 * std::pow(t_t / t4, gas.gamma / (gas.gamma - 1.0));
    }

    const double t4 = t_t - c4 * c4 / (2.0 * cp_gas);
    StationState s4;
    s4.radius = 0.5 * derived.d4_actual * 1e-3;
    s4.flow_area = a4;
    s4.static_p = p4;
    s4.static_t = t4;
    s4.velocity = c4;
    s4.mach = c4 / std::sqrt(gas.gamma * gas.r_gas * t4);
    const double r_axis_out = std::hypot(design.r_tan(), derived.throat_s + derived.length_actual);
    const double chi = std::asin(std::min(1.0, design.r_tan() / r_axis_out));
    s4.c_theta = c4 * std::sin(chi);
    s4.c_r = c4 * std::cos(chi);
    s4.flow_angle = rad2deg(chi);
    s4.total = {p_t4, t_t};
    s4.mdot = mdot;
    return s4;
}

std::pair<double, double> stage_performance(const TotalState& station1_total,
                                            const StationState& station4, const GasModel& gas) {
    station1_total.validate();
    const double pr_tt = station4.total.p0 / station1_total.p0;
    const double t_ratio = station4.total.t0 / station1_total.t0;
    if (!(t_ratio > 1.0)) {
        throw std::domain_error("stage_performance: no work input (T_t4 <= T_t1)");
    }
    const double eta_tt =
        (std::pow(pr_tt, (gas.gamma - 1.0) / gas.gamma) - 1.0) / (t_ratio - 1.0);
    return {pr_tt, eta_tt};
}

StagePoint evaluate_point(const StageConfig& config, const PipeDiffuserDesign& design,
                          const DerivedGeometry& derived, const CpSource& cp_source, double mdot,
                          double speed_fraction) {
    const GasModel& gas = config.gas;
    const double r2 = 0.5 * config.spec.d2;
    const double r3a = derived.r_3a * 1e-3;
    if (!(r3a >= r2)) {
        throw std::domain_error("evaluate_point: leading-edge radius lies inside the impeller tip");
    }
    const double passage_height = design.passage_height * 1e-3;

    bool choked = false;
    double run_mdot = mdot;
    StationState s3;
    ThroatResult throat;
    for (int attempt = 0;; ++attempt) {
        const StationState s2 = impeller_exit_state(config, run_mdot, speed_fraction);
        s3 = vaneless_evolve(s2, r3a / r2, passage_height, config.friction_coeff, gas);
        throat = throat_state(s3, design, derived, config);
        if (!throat.choked || attempt >= 4) break;
        choked = true;
        run_mdot = throat.capped_mdot;
    }
    choked = choked || throat.choked;

    const StationState s4 = channel_outlet(throat, cp_source, design, derived, gas);
    const auto [pr_tt, eta_tt] = stage_performance(config.spec.inlet_total, s4, gas);

    StagePoint pt;
    pt.mdot = mdot;
    pt.speed_fraction = speed_fraction;
    pt.pr_tt = pr_tt;
    pt.eta_tt = eta_tt;
    const double q3 = s3.total.p0 - s3.static_p;
    pt.cp = (s4.static_p - s3.static_p) / q3;
    pt.cp0 = (s3.total.p0 - s4.total.p0) / q3;
    pt.b_th = throat.throat.blockage;
    pt.mach_th = throat.throat.mach;
    pt.re_d = throat.throat.re_d;
    pt.flow_angle3 = s3.flow_angle;
    pt.p_s4_over_pt1 = s4.static_p / config.spec.inlet_total.p0;
    pt.flags.choked = choked;
    pt.flags.surge = s3.flow_angle > config.stall_angle;
    return pt;
}

namespace {

std::vector<std::optional<StagePoint>> evaluate_optional(
    const StageConfig& config, const PipeDiffuserDesign& design, const DerivedGeometry& derived,
    const CpSource& cp_source, const std::vector<double>& mdots, double speed_fraction,
    bool parallel) {
    std::vector<std::optional<StagePoint>> out(mdots.size());
    const std::int64_t n = static_cast<std::int64_t>(mdots.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[i] = evaluate_point(config, design, derived, cp_source, mdots[i], speed_fraction);
        } catch (const std::exception&) {
            out[i] = std::nullopt;
        }
    }
#ifndef _OPENMP
    (void)parallel;
#endif
    return out;
}

std::vector<StagePoint> strict_points(std::vector<std::optional<StagePoint>> opts) {
    std::vector<StagePoint> out;
    out.reserve(opts.size());
    for (auto& o : opts) {
        if (!o) {
            throw NonConvergenceError("point evaluation failed in batch", {});
        }
        out.push_back(*o);
    }
    return out;
}

}  // namespace

std::vector<StagePoint> evaluate_points_serial(const StageConfig& config,
                                               const PipeDiffuserDesign& design,
                                               const DerivedGeometry& derived,
                                               const CpSource& cp_source,
                                               const std::vector<double>& mdots,
                                               double speed_fraction) {
    return strict_points(
        evaluate_optional(config, design, derived, cp_source, mdots, speed_fraction, false));
}

std::vector<StagePoint> evaluate_points_parallel(const StageConfig& config,
                                                 const PipeDiffuserDesign& design,
                                                 const DerivedGeometry& derived,
                                                 const CpSource& cp_source,
                                                 const std::vector<double>& mdots,
                                                 double speed_fraction) {
    return strict_points(
        evaluate_optional(config, design, derived, cp_source, mdots, speed_fraction, true));
}

SpeedLine speedline(const StageConfig& config, const PipeDiffuserDesign& design,
                    const DerivedGeometry& derived, const CpSource& cp_source,
                    double speed_fraction, int n_points) {
    if (n_points < 3) {
        throw std::invalid_argument("speedline: n_points must be >= 3");
    }

    // A point "passes" when it evaluates un-choked; evaluation failures at
    // high flow are treated as past the choke limit.
    auto passes = [&](double m) -> int {  // 1 pass, 0 choked/failed
        try {
            const StagePoint p =
                evaluate_point(config, design, derived, cp_source, m, speed_fraction);
            return p.flags.choked ? 0 : 1;
        } catch (const std::exception&) {
            return 0;
        }
    };

    // Upward scan for the highest passing flow, then bisection against the
    // first failure above it. Deep off-design incidence blockage can choke a
    // low-flow band as well, so the scan must not stop at the first failure.
    double lo = 0.0, hi = 0.0;
    for (double m = 0.02; m < 200.0; m *= 1.25) {
        if (passes(m)) {
            lo = m;
            hi = 0.0;
        } else if (lo > 0.0 && hi == 0.0) {
            hi = m;
        }
    }
    if (lo == 0.0) {
        throw NonConvergenceError("speedline: no un-choked point exists", {});
    }
    if (hi == 0.0) {
        throw NonConvergenceError("speedline: choke limit not found below 200 kg/s", {});
    }
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double choke = hi;

    std::vector<double> grid(n_points);
    const double m_start = 0.10 * choke;
    const double m_end = choke - 1e-4;
    for (int i = 0; i < n_points; ++i) {
        grid[i] = m_start + (m_end - m_start) * i / (n_points - 1);
    }
    auto opts = evaluate_optional(config, design, derived, cp_source, grid, speed_fraction, true);
    SpeedLine line;
    line.speed_fraction = speed_fraction;
    for (auto& o : opts) {
        if (o) line.points.push_back(*o);
    }
    if (line.points.empty()) {
        throw NonConvergenceError("speedline: every grid point failed to evaluate", {});
    }
    line.choke_mdot = choke;

    // Surge proxy: positive pressure-ratio slope or stall flow angle.
    double surge = line.points.front().mdot;
    for (std::size_t i = line.points.size(); i-- > 0;) {
        const StagePoint& p = line.points[i];
        bool fires = p.flags.surge;
        if (!fires && i + 1 < line.points.size()) {
            const StagePoint& next = line.points[i + 1];
            fires = (next.pr_tt - p.pr_tt) / (next.mdot - p.mdot) >= 0.0;
        }
        if (fires) {
            surge = p.mdot;
            // Refine a stall-angle crossing between this and the next point.
            if (p.flags.surge && i + 1 < line.points.size() &&
                !line.points[i + 1].flags.surge) {
                double a = p.mdot, b = line.points[i + 1].mdot;
                for (int it = 0; it < 30 && b - a > 1e-5; ++it) {
                    const double mid = 0.5 * (a + b);
                    try {
                        const StagePoint q = evaluate_point(config, design, derived, cp_source,
                                                            mid, speed_fraction);
                        if (q.flags.surge) {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    } catch (const std::exception&) {
                        break;
                    }
                }
                surge = a;
            }
            break;
        }
    }
    line.surge_mdot = std::min(surge, choke - 1e-4);
    return line;
}

PerformanceMap performance_map(const StageConfig& config, const PipeDiffuserDesign& design,
                               const DerivedGeometry& derived, const CpSource& cp_source,
                               const std::vector<double>& speed_fractions, int n_points) {
    PerformanceMap map;
    std::string last_error;
    for (double sf : speed_fractions) {
        try {
            map.lines.push_back(speedline(config, design, derived, cp_source, sf, n_points));
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    if (map.lines.empty()) {
        throw NonConvergenceError("performance_map: every speedline failed: " + last_error, {});
    }
    return map;
}

}  // namespace pipediff
