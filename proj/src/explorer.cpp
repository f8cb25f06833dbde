#include "pipediff/explorer.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pipediff {

namespace {

PipeDiffuserDesign with_parameter(const PipeDiffuserDesign& base, const std::string& name,
                                  double value) {
    PipeDiffuserDesign d = base;
    if (name == "n_pipes") {
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-9) {
            throw std::invalid_argument("ofat_sweep: n_pipes values must be integral");
        }
        d.n_pipes = static_cast<int>(r);
    } else if (name == "d_th_mm") {
        d.d_th = value;
    } else if (name == "alpha_deg") {
        d.alpha = value;
    } else if (name == "two_theta_deg") {
        d.two_theta = value;
    } else if (name == "length_mm") {
        d.length = value;
    } else if (name == "area_ratio") {
        d.area_ratio = value;
    } else if (name == "d_tan_mm") {
        d.d_tan = value;
    } else if (name == "r3a_over_r3") {
        d.r3a_over_r3 = value;
    } else if (name == "d4_mm") {
        d.d4 = value;
    } else if (name == "passage_height_mm") {
        d.passage_height = value;
        d.passage_height_assumed = false;
    } else {
        std::string names;
        for (const auto& n : sweepable_parameters()) {
            if (!names.empty()) names += ", ";
            names += n;
        }
        throw std::invalid_argument("ofat_sweep: unknown parameter \"" + name +
                                    "\"; valid names: " + names);
    }
    return d;
}

SweepRecord evaluate_record(const PipeDiffuserDesign& design, double value,
                            const StageConfig& config, const CpSource& cp_source, double mdot,
                            double speed_fraction) {
    SweepRecord rec;
    rec.value = value;
    try {
        design.validate();
        rec.feasibility = check_feasibility(design);
        rec.derived = derive_geometry(design);
        if (rec.feasibility.feasible) {
            rec.point = evaluate_point(config, design, *rec.derived, cp_source, mdot,
                                       speed_fraction);
        }
    } catch (const std::exception& e) {
        rec.note = e.what();
    }
    return rec;
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names = {
        "n_pipes",   "d_th_mm",     "alpha_deg", "two_theta_deg", "length_mm",
        "area_ratio", "d_tan_mm",   "r3a_over_r3", "d4_mm",       "passage_height_mm",
    };
    return names;
}

SweepReport ofat_sweep(const PipeDiffuserDesign& base, const std::string& parameter,
                       const std::vector<double>& values, const StageConfig& config,
                       const CpSource& cp_source, double mdot, double speed_fraction,
                       const std::string& base_id) {
    if (values.empty()) {
        throw std::invalid_argument("ofat_sweep: values list must not be empty");
    }
    base.validate();
    config.validate();
    with_parameter(base, parameter, values.front());  // reject unknown names up front

    SweepReport report;
    report.base_id = base_id;
    report.parameter = parameter;
    report.mdot = mdot;
    report.speed_fraction = speed_fraction;
    report.records.resize(values.size());

    const std::int64_t n = static_cast<std::int64_t>(values.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        SweepRecord rec;
        try {
            const PipeDiffuserDesign d = with_parameter(base, parameter, values[i]);
            rec = evaluate_record(d, values[i], config, cp_source, mdot, speed_fraction);
        } catch (const std::exception& e) {
            rec.value = values[i];
            rec.note = e.what();
        }
        report.records[i] = std::move(rec);
    }
    return report;
}

ComparisonTable design_table(
    const std::vector<std::pair<std::string, PipeDiffuserDesign>>& designs,
    const StageConfig& config, const CpSource& cp_source, double mdot, double speed_fraction) {
    if (designs.empty()) {
        throw std::invalid_argument("design_table: at least one design is required");
    }
    config.validate();

    ComparisonTable table;
    table.mdot = mdot;
    table.speed_fraction = speed_fraction;
    table.rows.resize(designs.size());

    const std::int64_t n = static_cast<std::int64_t>(designs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        TableRow row;
        row.id = designs[i].first;
        try {
            const PipeDiffuserDesign& d = designs[i].second;
            d.validate();
            const FeasibilityReport feas = check_feasibility(d);
            row.feasible = feas.feasible;
            const DerivedGeometry derived = derive_geometry(d);
            row.n_conflicts = static_cast<int>(derived.consistency_flags.size());
            if (feas.feasible) {
                row.point = evaluate_point(config, d, derived, cp_source, mdot, speed_fraction);
            }
        } catch (const std::exception& e) {
            row.note = e.what();
        }
        table.rows[i] = std::move(row);
    }
    return table;
}

}  // namespace pipediff
