#include "pipediff/diffusermap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pipediff {

namespace {

constexpr const char* kHeader = "area_ratio,l_over_d,blockage,mach_th,re_d,cp";

std::array<double, DiffuserMap::kAxes> coords(const DiffuserMapEntry& e) {
    return {e.area_ratio, e.l_over_d, e.blockage, e.mach_th, e.re_d};
}

// Re_D spans decades; interpolate that axis in log10 space.
double axis_coordinate(int axis, double v) {
    return axis == 4 ? std::log10(v) : v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

DiffuserMap::DiffuserMap(std::vector<DiffuserMapEntry> entries) {
    if (entries.empty()) {
        throw MapLoadError("diffuser map: no entries");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const auto c = coords(e);
        for (double v : c) {
            if (!std::isfinite(v)) {
                throw MapLoadError("diffuser map: non-finite coordinate in entry " +
                                   std::to_string(i + 1));
            }
        }
        if (!(e.area_ratio > 1.0)) {
            throw MapLoadError("diffuser map: area_ratio must be > 1 in entry " +
                               std::to_string(i + 1));
        }
        if (!(e.cp >= 0.0 && e.cp < 1.0)) {
            throw MapLoadError("diffuser map: cp must be in [0, 1) in entry " +
                               std::to_string(i + 1));
        }
        if (!(e.re_d > 0.0)) {
            throw MapLoadError("diffuser map: re_d must be > 0 in entry " + std::to_string(i + 1));
        }
    }

    for (int a = 0; a < kAxes; ++a) {
        std::vector<double> vals;
        vals.reserve(entries.size());
        for (const auto& e : entries) vals.push_back(coords(e)[a]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        axes_[a] = std::move(vals);
    }

    std::size_t total = 1;
    for (const auto& ax : axes_) total *= ax.size();
    if (entries.size() != total) {
        throw MapLoadError("diffuser map: grid has holes (" + std::to_string(entries.size()) +
                           " entries for a " + std::to_string(total) + "-node grid)");
    }

    cp_.assign(total, std::nan(""));
    for (const auto& e : entries) {
        std::size_t idx = 0;
        const auto c = coords(e);
        for (int a = 0; a < kAxes; ++a) {
            const auto& ax = axes_[a];
            const auto it = std::lower_bound(ax.begin(), ax.end(), c[a]);
            idx = idx * ax.size() + static_cast<std::size_t>(it - ax.begin());
        }
        if (!std::isnan(cp_[idx])) {
            throw MapLoadError("diffuser map: duplicate grid point at area_ratio " +
                               fmt(e.area_ratio) + ", l_over_d " + fmt(e.l_over_d) +
                               ", blockage " + fmt(e.blockage) + ", mach_th " + fmt(e.mach_th) +
                               ", re_d " + fmt(e.re_d));
        }
        cp_[idx] = e.cp;
    }
    for (double v : cp_) {
        if (std::isnan(v)) {
            throw MapLoadError("diffuser map: grid has holes");
        }
    }
}

CpLookup DiffuserMap::lookup_cp(const MapQuery& q) const {
    const std::array<double, kAxes> raw = {q.area_ratio, q.l_over_d, q.blockage, q.mach_th, q.re_d};
    std::array<std::size_t, kAxes> i0{};
    std::array<double, kAxes> w{};  // weight of the upper node
    bool clamped = false;

    for (int a = 0; a < kAxes; ++a) {
        const auto& ax = axes_[a];
        const double x = axis_coordinate(a, raw[a]);
        if (ax.size() == 1) {
            i0[a] = 0;
            w[a] = 0.0;
            if (x != axis_coordinate(a, ax[0])) clamped = true;
            continue;
        }
        const double lo = axis_coordinate(a, ax.front());
        const double hi = axis_coordinate(a, ax.back());
        if (x <= lo) {
            i0[a] = 0;
            w[a] = 0.0;
            if (x < lo) clamped = true;
            continue;
        }
        if (x >= hi) {
            i0[a] = ax.size() - 2;
            w[a] = 1.0;
            if (x > hi) clamped = true;
            continue;
        }
        auto it = std::upper_bound(ax.begin(), ax.end(), raw[a]);
        std::size_t hi_idx = static_cast<std::size_t>(it - ax.begin());
        if (hi_idx == 0) hi_idx = 1;
        if (hi_idx >= ax.size()) hi_idx = ax.size() - 1;
        i0[a] = hi_idx - 1;
        const double c_lo = axis_coordinate(a, ax[i0[a]]);
        const double c_hi = axis_coordinate(a, ax[hi_idx]);
        w[a] = (x - c_lo) / (c_hi - c_lo);
    }

    double acc = 0.0;
    for (int corner = 0; corner < (1 << kAxes); ++corner) {
        double weight = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < kAxes; ++a) {
            const bool up = (corner >> a) & 1;
            const double wa = up ? w[a] : 1.0 - w[a];
            if (wa == 0.0) {
                weight = 0.0;
                break;
            }
            weight *= wa;
            std::size_t ia = i0[a] + (up ? 1 : 0);
            if (ia >= axes_[a].size()) ia = axes_[a].size() - 1;
            idx = idx * axes_[a].size() + ia;
        }
        if (weight != 0.0) acc += weight * cp_[idx];
    }
    return {acc, clamped};
}

DiffuserMap load_map(std::istream& csv) {
    std::string line;
    if (!std::getline(csv, line)) {
        throw MapLoadError("diffuser map: empty stream");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw MapLoadError(std::string("diffuser map: header must be exactly \"") + kHeader +
                           "\", got \"" + line + "\"");
    }
    std::vector<DiffuserMapEntry> entries;
    std::size_t row = 1;
    while (std::getline(csv, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = line.find(',', pos);
            cells.push_back(line.substr(pos, next == std::string::npos ? std::string::npos
                                                                       : next - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (cells.size() != 6) {
            throw MapLoadError("diffuser map: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " columns, expected 6");
        }
        std::array<double, 6> v{};
        for (int col = 0; col < 6; ++col) {
            try {
                std::size_t used = 0;
                v[col] = std::stod(cells[col], &used);
                while (used < cells[col].size() &&
                       std::isspace(static_cast<unsigned char>(cells[col][used]))) {
                    ++used;
                }
                if (used != cells[col].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw MapLoadError("diffuser map: row " + std::to_string(row) +
                                   ": non-numeric cell \"" + cells[col] + "\"");
            }
        }
        entries.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    if (entries.empty()) {
        throw MapLoadError("diffuser map: no data rows");
    }

    // Duplicate detection keyed on the textual coordinates so the error can
    // name the row.
    std::map<std::array<double, 5>, std::size_t> seen;
    std::size_t rownum = 1;
    for (const auto& e : entries) {
        ++rownum;
        const auto key = coords(e);
        const auto [it, inserted] = seen.emplace(key, rownum);
        if (!inserted) {
            throw MapLoadError("diffuser map: row " + std::to_string(rownum) +
                               " duplicates the grid point of row " + std::to_string(it->second));
        }
    }
    return DiffuserMap(std::move(entries));
}

DiffuserMap load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MapLoadError("diffuser map: cannot open " + path);
    }
    return load_map(in);
}

double ideal_cp(double area_ratio) {
    if (!(area_ratio >= 1.0)) {
        throw std::domain_error("ideal_cp: area_ratio must be >= 1");
    }
    return 1.0 - 1.0 / (area_ratio * area_ratio);
}

double effectiveness(double cp, double area_ratio) {
    if (!(area_ratio > 1.0)) {
        throw std::domain_error("effectiveness: area_ratio must be > 1");
    }
    return cp / (1.0 - 1.0 / (area_ratio * area_ratio));
}

namespace {

// Smooth surrogate for conical-diffuser recovery. Not measured data.
double synthetic_cp(double ar, double ld, double b, double ma, double re) {
    constexpr double kPi = 3.14159265358979323846;
    const double two_theta_deg =
        2.0 * std::atan((std::sqrt(ar) - 1.0) / (2.0 * ld)) * 180.0 / kPi;
    const double da = (two_theta_deg - 6.5) / 13.0;
    const double f_angle = std::exp(-da * da);
    const double f_b = std::max(0.0, 1.0 - 1.2 * b);
    const double f_ma = 0.70 + 0.45 * std::min(ma, 1.1);
    const double f_re = 0.90 + 0.065 * (std::log10(re) - 4.0);
    const double cp = ideal_cp(ar) * 0.79 * f_angle * f_b * f_ma * f_re;
    return std::clamp(cp, 0.0, 0.95);
}

const std::vector<double>& demo_axis(int a) {
    static const std::vector<double> ar = {1.5, 2.0, 3.0, 4.0, 6.0};
    static const std::vector<double> ld = {4.0, 7.0, 10.0, 14.0};
    static const std::vector<double> b = {0.0, 0.08, 0.2, 0.45};
    static const std::vector<double> ma = {0.2, 0.5, 0.8, 1.1};
    static const std::vector<double> re = {1e4, 1e5, 1e6};
    switch (a) {
        case 0: return ar;
        case 1: return ld;
        case 2: return b;
        case 3: return ma;
        default: return re;
    }
}

std::vector<DiffuserMapEntry> demo_entries() {
    std::vector<DiffuserMapEntry> entries;
    for (double ar : demo_axis(0))
        for (double ld : demo_axis(1))
            for (double b : demo_axis(2))
                for (double ma : demo_axis(3))
                    for (double re : demo_axis(4)) {
                        entries.push_back({ar, ld, b, ma, re, synthetic_cp(ar, ld, b, ma, re)});
                    }
    return entries;
}

}  // namespace

DiffuserMap synthetic_demo_map() { return DiffuserMap(demo_entries()); }

std::string synthetic_demo_map_csv() {
    std::ostringstream out;
    out << kHeader << "\n";
    char buf[160];
    for (const auto& e : demo_entries()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.area_ratio,
                      e.l_over_d, e.blockage, e.mach_th, e.re_d, e.cp);
        out << buf;
    }
    return out.str();
}

}  // namespace pipediff
