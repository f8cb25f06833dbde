// Pipe-diffuser parametric geometry: the angular-pitch correlation and
// maximum pipe count, feasibility checking with limiting values, derived
// quantities with declared-vs-derived consistency flags, and a sampled
// cylinder-intersection oracle for the packing limit.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pipediff {

enum class AuthoritativeMode { Length, AreaRatio };

// User-declared design parameters. Lengths in mm, angles in degrees.
struct PipeDiffuserDesign {
    int n_pipes = 0;                   // pipe count N
    double d_th = 0.0;                 // throat diameter D_th [mm]
    double alpha = 0.0;                // inclination angle [deg]
    double two_theta = 0.0;            // divergence angle 2*theta [deg]
    std::optional<double> length;      // channel length L [mm]
    std::optional<double> area_ratio;  // AR = A_out/A_th
    AuthoritativeMode authoritative = AuthoritativeMode::Length;
    double d_tan = 0.0;                // tangential reference circle diameter [mm]
    double r3a_over_r3 = 0.0;          // leading-edge radius ratio R_3a/R_3
    double d4 = 0.0;                   // declared outlet diameter D_4 [mm]
    double passage_height = 0.0;       // axial span b [mm]
    bool passage_height_assumed = false;  // set when b was defaulted, not declared

    double r_tan() const { return 0.5 * d_tan; }

    // Throws std::invalid_argument on a violated basic invariant.
    void validate() const;
};

struct ConsistencyFlag {
    std::string name;  // e.g. "area_ratio", "d4"
    double declared = 0.0;
    double derived = 0.0;
    double rel_err = 0.0;
};

struct DerivedGeometry {
    double beta = 0.0;          // angular pitch of a single pipe [rad]; NaN if infeasible
    long n_max = 0;             // maximum pipe count; 0 if pitch infeasible
    double a_th_total = 0.0;    // N pi D_th^2/4 [mm^2]
    double ar_actual = 0.0;     // area ratio consistent with the cone geometry
    double length_actual = 0.0; // channel length consistent with declared AR [mm]
    double d4_actual = 0.0;     // outlet diameter from the layout [mm]
    double r_3 = 0.0;           // leading-edge base circle radius [mm]
    double r_3a = 0.0;          // leading-edge radius [mm]
    double r_3b = 0.0;          // radius at the intersection of two adjacent pipe axes [mm]
    double throat_s = 0.0;      // along-axis distance, tangency point to throat plane [mm]
    double throat_radius = 0.0; // radius of the throat centre [mm]
    std::vector<ConsistencyFlag> consistency_flags;
};

enum class FeasibilityReason { OK, AcosDomainViolation, PitchExceedsRequest, NonPositivePitch };

const char* to_string(FeasibilityReason r);

struct FeasibilityReport {
    bool feasible = false;
    FeasibilityReason reason = FeasibilityReason::OK;
    double beta = 0.0;             // NaN when the pitch expression has no real value
    long n_max = 0;
    double limiting_alpha = 0.0;   // boundary alpha at which feasibility is lost [deg]
    double limiting_d_th = 0.0;    // boundary D_th at which feasibility is lost [mm]
};

// Pitch expression failure: arccos argument > 1 ("imaginary" count) or a
// non-positive pitch.
class PitchDomainError : public std::runtime_error {
public:
    PitchDomainError(FeasibilityReason reason, const std::string& what);
    FeasibilityReason reason() const { return reason_; }

private:
    FeasibilityReason reason_;
};

// Angular pitch of a single pipe [rad]:
//   beta = atan(r tan(a)/(r - D/2)) - acos((r + D/2)/sqrt((r - D/2)^2 + (r tan(a))^2))
// Throws PitchDomainError (AcosDomainViolation / NonPositivePitch) and
// std::domain_error on violated preconditions.
double angular_pitch(double r_tan, double d_th, double alpha_deg);

// floor(2 pi / beta); exact divisors count as feasible.
long max_pipe_count(double beta);

FeasibilityReport check_feasibility(const PipeDiffuserDesign& design);

DerivedGeometry derive_geometry(const PipeDiffuserDesign& design);

// Numeric ground truth for the packing limit: straight pipe axes tangent to
// the r_tan circle at candidate pitch 2 pi/N, each pipe a cylinder of
// diameter d_th near the throat; returns the largest N whose adjacent
// cylinder surfaces still intersect at or before the throat section.
// angular_resolution is the circumferential sample step [rad]; must give at
// least 64 samples per revolution.
long oracle_max_pipe_count(const PipeDiffuserDesign& design, double angular_resolution);

// Bisected arccos-domain boundary in alpha for fixed (r_tan, d_th) [deg].
double pitch_domain_alpha_boundary(double r_tan, double d_th);

}  // namespace pipediff
