// OFAT parameter sweeps and multi-design comparison tables.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipediff/meanline.hpp"

namespace pipediff {

struct SweepRecord {
    double value = 0.0;
    FeasibilityReport feasibility;
    std::optional<DerivedGeometry> derived;
    std::optional<StagePoint> point;   // absent when infeasible or failed
    std::string note;                  // evaluation error, if any
};

struct SweepReport {
    std::string base_id;
    std::string parameter;
    double mdot = 0.0;
    double speed_fraction = 0.0;
    std::vector<SweepRecord> records;  // one per requested value, input order
};

struct TableRow {
    std::string id;
    bool feasible = false;
    int n_conflicts = 0;
    std::optional<StagePoint> point;
    std::string note;
};

struct ComparisonTable {
    double mdot = 0.0;
    double speed_fraction = 0.0;
    std::vector<TableRow> rows;
};

// Names accepted by ofat_sweep (the design-file keys).
const std::vector<std::string>& sweepable_parameters();

// Clones the base design, substitutes the parameter per value, and runs
// feasibility -> derive -> design-point evaluation. Infeasible values yield
// feasibility records without stage points.
SweepReport ofat_sweep(const PipeDiffuserDesign& base, const std::string& parameter,
                       const std::vector<double>& values, const StageConfig& config,
                       const CpSource& cp_source, double mdot, double speed_fraction,
                       const std::string& base_id = "base");

// One evaluated row per design, all under the same config.
ComparisonTable design_table(const std::vector<std::pair<std::string, PipeDiffuserDesign>>& designs,
                             const StageConfig& config, const CpSource& cp_source, double mdot,
                             double speed_fraction);

}  // namespace pipediff
