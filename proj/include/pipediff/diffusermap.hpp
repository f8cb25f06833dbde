// Conical-diffuser pressure-recovery maps: CSV ingestion onto a complete
// rectilinear grid, multilinear lookup with clamping (Re interpolated in
// log10 space), ideal recovery and effectiveness.
#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pipediff {

struct DiffuserMapEntry {
    double area_ratio;
    double l_over_d;
    double blockage;
    double mach_th;
    double re_d;
    double cp;
};

struct MapQuery {
    double area_ratio;
    double l_over_d;
    double blockage;
    double mach_th;
    double re_d;
};

struct CpLookup {
    double cp;
    bool clamped;
};

class MapLoadError : public std::runtime_error {
public:
    explicit MapLoadError(const std::string& what) : std::runtime_error(what) {}
};

// Immutable after construction; concurrent lookups are safe.
class DiffuserMap {
public:
    static constexpr int kAxes = 5;

    // Builds the grid from entries; every axis-coordinate combination must be
    // present exactly once.
    explicit DiffuserMap(std::vector<DiffuserMapEntry> entries);

    std::size_t size() const { return cp_.size(); }
    const std::array<std::vector<double>, kAxes>& axes() const { return axes_; }

    CpLookup lookup_cp(const MapQuery& q) const;

private:
    std::array<std::vector<double>, kAxes> axes_;  // sorted unique coordinates
    std::vector<double> cp_;                       // row-major over the axes
};

// Parses the CSV schema "area_ratio,l_over_d,blockage,mach_th,re_d,cp".
// Throws MapLoadError with the offending row number.
DiffuserMap load_map(std::istream& csv);
DiffuserMap load_map_file(const std::string& path);

// Ideal (inviscid) pressure recovery of a diffuser with the given area ratio:
// 1 - 1/AR^2.
double ideal_cp(double area_ratio);

// cp normalised by the ideal recovery at the same area ratio.
double effectiveness(double cp, double area_ratio);

// Small synthetic demonstration map. The values are generated from a smooth
// analytic surrogate (peak recovery near a 6.5 deg equivalent cone angle,
// derated by blockage, mildly improving with Mach and Reynolds number); they
// are placeholders for user-supplied digitised map data.
DiffuserMap synthetic_demo_map();

// The same synthetic map in CSV form (matches load_map's schema).
std::string synthetic_demo_map_csv();

}  // namespace pipediff
