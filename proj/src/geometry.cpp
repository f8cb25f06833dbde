#include "pipediff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace pipediff {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

const char* to_string(FeasibilityReason r) {
    switch (r) {
        case FeasibilityReason::OK: return "OK";
        case FeasibilityReason::AcosDomainViolation: return "AcosDomainViolation";
        case FeasibilityReason::PitchExceedsRequest: return "PitchExceedsRequest";
        case FeasibilityReason::NonPositivePitch: return "NonPositivePitch";
    }
    return "unknown";
}

PitchDomainError::PitchDomainError(FeasibilityReason reason, const std::string& what)
    : std::runtime_error(what), reason_(reason) {}

void PipeDiffuserDesign::validate() const {
    if (n_pipes < 2) {
        throw std::invalid_argument("design: n_pipes must be >= 2, got " + std::to_string(n_pipes));
    }
    if (!(d_th > 0.0)) throw std::invalid_argument("design: d_th must be > 0 mm");
    if (!(d_tan > 0.0)) throw std::invalid_argument("design: d_tan must be > 0 mm");
    if (!(d4 > 0.0)) throw std::invalid_argument("design: d4 must be > 0 mm");
    if (!(passage_height > 0.0)) throw std::invalid_argument("design: passage_height must be > 0 mm");
    if (!(r3a_over_r3 > 0.0)) throw std::invalid_argument("design: r3a_over_r3 must be > 0");
    if (!(alpha > 0.0 && alpha < 90.0)) {
        throw std::invalid_argument("design: alpha must be in (0, 90) deg, got " + fmt(alpha));
    }
    if (!(two_theta > 0.0 && two_theta < 30.0)) {
        throw std::invalid_argument("design: two_theta must be in (0, 30) deg, got " + fmt(two_theta));
    }
    if (authoritative == AuthoritativeMode::Length) {
        if (!length.has_value()) {
            throw std::invalid_argument("design: authoritative mode 'length' requires length_mm");
        }
    } else {
        if (!area_ratio.has_value()) {
            throw std::invalid_argument("design: authoritative mode 'area_ratio' requires area_ratio");
        }
    }
    if (length.has_value() && !(*length > 0.0)) {
        throw std::invalid_argument("design: length must be > 0 mm");
    }
    if (area_ratio.has_value() && !(*area_ratio > 1.0)) {
        throw std::invalid_argument("design: area_ratio must be > 1");
    }
}

double angular_pitch(double r_tan, double d_th, double alpha_deg) {
    if (!(r_tan > 0.0) || !(d_th > 0.0)) {
        throw std::domain_error("angular_pitch: r_tan and d_th must be > 0");
    }
    if (!(r_tan > 0.5 * d_th)) {
        throw std::domain_error("angular_pitch: requires r_tan > d_th/2 (got r_tan " + fmt(r_tan) +
                                 " mm, d_th " + fmt(d_th) + " mm)");
    }
    if (!(alpha_deg > 0.0 && alpha_deg < 90.0)) {
        throw std::domain_error("angular_pitch: alpha must be in (0, 90) deg");
    }
    const double t = r_tan * std::tan(deg2rad(alpha_deg));
    const double inner = r_tan - 0.5 * d_th;
    const double outer = r_tan + 0.5 * d_th;
    const double rho = std::sqrt(inner * inner + t * t);
    const double arg = outer / rho;
    if (arg > 1.0) {
        throw PitchDomainError(FeasibilityReason::AcosDomainViolation,
                               "angular_pitch: arccos argument " + fmt(arg) +
                                   " > 1; no real pipe count at alpha " + fmt(alpha_deg) + " deg");
    }
    const double beta = std::atan(t / inner) - std::acos(arg);
    if (!(beta > 0.0)) {
        throw PitchDomainError(FeasibilityReason::NonPositivePitch,
                               "angular_pitch: non-positive pitch " + fmt(beta) + " rad");
    }
    return beta;
}

long max_pipe_count(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("max_pipe_count: beta must be > 0");
    }
    const double two_pi = 2.0 * kPi;
    long n = static_cast<long>(std::floor(two_pi / beta));
    // Exact divisors count as feasible despite floating-point drift.
    if (static_cast<double>(n + 1) * beta <= two_pi * (1.0 + 1e-12)) {
        ++n;
    }
    return n;
}

namespace {

// Full feasibility predicate at the given (alpha, d_th), other parameters from
// the design. Pitch failures and violated pitch preconditions are infeasible.
bool feasible_at(const PipeDiffuserDesign& design, double alpha_deg, double d_th) {
    if (!(alpha_deg > 0.0 && alpha_deg < 90.0)) return false;
    if (!(design.r_tan() > 0.5 * d_th) || !(d_th > 0.0)) return false;
    try {
        const double beta = angular_pitch(design.r_tan(), d_th, alpha_deg);
        return design.n_pipes <= max_pipe_count(beta);
    } catch (const PitchDomainError&) {
        return false;
    }
}

// Bisects the feasibility transition between a feasible and an infeasible
// abscissa; the predicate is monotone along each parameter.
double bisect_boundary(const std::function<bool(double)>& feasible, double x_feasible,
                       double x_infeasible) {
    double a = x_feasible;
    double b = x_infeasible;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        if (feasible(mid)) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

FeasibilityReport check_feasibility(const PipeDiffuserDesign& design) {
    design.validate();
    const double r_tan = design.r_tan();
    if (!(r_tan > 0.5 * design.d_th)) {
        throw std::domain_error("check_feasibility: d_th >= 2 r_tan is geometrically impossible");
    }

    FeasibilityReport rep;
    rep.beta = std::nan("");
    try {
        rep.beta = angular_pitch(r_tan, design.d_th, design.alpha);
        rep.n_max = max_pipe_count(rep.beta);
        if (design.n_pipes <= rep.n_max) {
            rep.feasible = true;
            rep.reason = FeasibilityReason::OK;
        } else {
            rep.feasible = false;
            rep.reason = FeasibilityReason::PitchExceedsRequest;
        }
    } catch (const PitchDomainError& e) {
        rep.feasible = false;
        rep.reason = e.reason();
        rep.n_max = 0;
    }

    // Boundary alpha: feasibility is an up-set in alpha.
    auto feas_alpha = [&](double a) { return feasible_at(design, a, design.d_th); };
    const double a_lo = 0.05, a_hi = 89.95;
    if (rep.feasible) {
        rep.limiting_alpha = feas_alpha(a_lo) ? a_lo : bisect_boundary(feas_alpha, design.alpha, a_lo);
    } else if (feas_alpha(a_hi)) {
        rep.limiting_alpha = bisect_boundary(feas_alpha, a_hi, design.alpha);
    } else {
        rep.limiting_alpha = std::nan("");
    }

    // Boundary d_th: feasibility is a down-set in d_th.
    auto feas_d = [&](double d) { return feasible_at(design, design.alpha, d); };
    const double d_lo = 1e-9, d_hi = 2.0 * r_tan * (1.0 - 1e-9);
    if (rep.feasible) {
        rep.limiting_d_th = feas_d(d_hi) ? d_hi : bisect_boundary(feas_d, design.d_th, d_hi);
    } else if (feas_d(d_lo)) {
        rep.limiting_d_th = bisect_boundary(feas_d, d_lo, design.d_th);
    } else {
        rep.limiting_d_th = std::nan("");
    }
    return rep;
}

DerivedGeometry derive_geometry(const PipeDiffuserDesign& design) {
    design.validate();
    const double r_tan = design.r_tan();
    const double d = design.d_th;
    const double tan_half = std::tan(deg2rad(0.5 * design.two_theta));

    DerivedGeometry g;
    g.a_th_total = design.n_pipes * kPi * d * d / 4.0;

    if (design.authoritative == AuthoritativeMode::Length) {
        g.length_actual = *design.length;
        const double d_out = d + 2.0 * g.length_actual * tan_half;
        g.ar_actual = (d_out / d) * (d_out / d);
    } else {
        g.ar_actual = *design.area_ratio;
        g.length_actual = d * (std::sqrt(g.ar_actual) - 1.0) / (2.0 * tan_half);
    }

    try {
        g.beta = angular_pitch(r_tan, d, design.alpha);
        g.n_max = max_pipe_count(g.beta);
    } catch (const PitchDomainError&) {
        g.beta = std::nan("");
        g.n_max = 0;
    }

    g.throat_s = r_tan * std::tan(deg2rad(design.alpha));
    g.throat_radius = std::hypot(r_tan, g.throat_s);

    // Outlet centre sits on the axis at streamwise length L past the throat;
    // the layout outlet diameter adds the cone outlet radius.
    const double s_out = g.throat_s + g.length_actual;
    const double outlet_radius = 0.5 * d + g.length_actual * tan_half;
    g.d4_actual = 2.0 * (std::hypot(r_tan, s_out) + outlet_radius);

    g.r_3 = r_tan;
    g.r_3a = design.r3a_over_r3 * g.r_3;
    g.r_3b = r_tan / std::cos(kPi / design.n_pipes);

    auto flag_if_off = [&g](const std::string& name, double declared, double derived) {
        const double rel = std::abs(declared - derived) / std::abs(declared);
        if (rel > 0.02) {
            g.consistency_flags.push_back({name, declared, derived, rel});
        }
    };
    if (design.authoritative == AuthoritativeMode::Length && design.area_ratio.has_value()) {
        flag_if_off("area_ratio", *design.area_ratio, g.ar_actual);
    }
    if (design.authoritative == AuthoritativeMode::AreaRatio && design.length.has_value()) {
        flag_if_off("length", *design.length, g.length_actual);
    }
    flag_if_off("d4", design.d4, g.d4_actual);
    return g;
}

namespace {

// Largest along-axis coordinate on pipe 0 at which its cylinder surface lies
// inside the neighbour cylinder rotated by phi, sampled over the
// circumferential angle. Returns -inf when the surfaces do not overlap.
double max_overlap_s(double r_tan, double pipe_r, double phi, int n_psi) {
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_psi; ++i) {
        const double psi = 2.0 * kPi * i / n_psi;
        const double cpsi = std::cos(psi);
        const double half_band = pipe_r * std::abs(cpsi);
        if (half_band <= 0.0) continue;
        const double px = r_tan + pipe_r * cpsi;
        // Signed in-plane distance to the neighbour axis: w = px cos(phi) + s sin(phi) - r_tan.
        // Surface point is inside the neighbour when |w| <= half_band.
        if (sphi > 0.0) {
            best = std::max(best, (half_band + r_tan - px * cphi) / sphi);
        } else if (sphi < 0.0) {
            best = std::max(best, (-half_band + r_tan - px * cphi) / sphi);
        }
    }
    return best;
}

}  // namespace

long oracle_max_pipe_count(const PipeDiffuserDesign& design, double angular_resolution) {
    design.validate();
    if (!(angular_resolution > 0.0) || angular_resolution > 2.0 * kPi / 64.0) {
        throw std::invalid_argument(
            "oracle_max_pipe_count: angular resolution must give at least 64 samples per revolution");
    }
    const double r_tan = design.r_tan();
    const double pipe_r = 0.5 * design.d_th;
    if (!(r_tan > pipe_r)) {
        throw std::domain_error("oracle_max_pipe_count: d_th >= 2 r_tan is geometrically impossible");
    }
    const double s_th = r_tan * std::tan(deg2rad(design.alpha));
    // Even count so the sample set contains psi = 0 and psi = pi exactly.
    int n_psi = static_cast<int>(std::ceil(2.0 * kPi / angular_resolution));
    if (n_psi % 2 != 0) ++n_psi;

    auto packs = [&](long n) {
        const double beta_c = 2.0 * kPi / static_cast<double>(n);
        const double s_plus = max_overlap_s(r_tan, pipe_r, beta_c, n_psi);
        const double s_minus = max_overlap_s(r_tan, pipe_r, -beta_c, n_psi);
        const double s_max = std::max(s_plus, s_minus);
        if (!std::isfinite(s_max)) return false;  // surfaces never intersect
        return s_max <= s_th * (1.0 + 1e-9) + 1e-12;
    };

    // Very small counts may not intersect at all (adjacent axes close to
    // parallel), so first locate any packing count, then walk the upper
    // boundary.
    const long cap = 1L << 22;
    long first = 0;
    for (long n = 2; n <= cap; n = (n < 32 ? n + 1 : 2 * n)) {
        if (packs(n)) {
            first = n;
            break;
        }
    }
    if (first == 0) return 0;
    long lo = first;
    long hi = 2 * first;
    while (hi <= cap && packs(hi)) {
        lo = hi;
        hi *= 2;
    }
    if (hi > cap) return lo;
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (packs(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double pitch_domain_alpha_boundary(double r_tan, double d_th) {
    if (!(r_tan > 0.5 * d_th) || !(d_th > 0.0)) {
        throw std::domain_error("pitch_domain_alpha_boundary: requires 0 < d_th < 2 r_tan");
    }
    auto in_domain = [&](double alpha_deg) {
        const double t = r_tan * std::tan(deg2rad(alpha_deg));
        const double inner = r_tan - 0.5 * d_th;
        const double outer = r_tan + 0.5 * d_th;
        return outer / std::sqrt(inner * inner + t * t) <= 1.0;
    };
    double lo = 1e-6, hi = 90.0 - 1e-6;
    if (in_domain(lo)) return lo;
    if (!in_domain(hi)) return std::nan("");
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (in_domain(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace pipediff
