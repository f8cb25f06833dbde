#include "pipediff/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pipediff/diffusermap.hpp"
#include "pipediff/explorer.hpp"
#include "pipediff/gasdyn.hpp"
#include "pipediff/geometry.hpp"
#include "pipediff/io.hpp"
#include "pipediff/meanline.hpp"
#include "pipediff/mesh.hpp"
#include "pipediff/stl.hpp"

namespace pipediff {

namespace {

constexpr const char* kUsage =
    "usage: pipediff <command> [options]\n"
    "\n"
    "commands:\n"
    "  validate <design.json>                    feasibility + consistency flags\n"
    "  derive   <design.json>                    derived geometry JSON\n"
    "  mesh     <design.json> --stl <out.stl> --resolution <N>\n"
    "  point    <design.json> <stage.json> --mdot <X> [--speed <F>]\n"
    "  speedline <design.json> <stage.json> --speed <F> --points <N>\n"
    "  map      <design.json> <stage.json> --speeds 0.7,0.8,0.9,1.0 [--points <N>]\n"
    "  sweep    <design.json> <stage.json> --param <name> --values v1,v2,...\n"
    "           [--mdot <X>] [--speed <F>] [--csv <out.csv>]\n"
    "  table    <d1.json> [d2.json ...] --stage <stage.json> [--mdot <X>]\n"
    "           [--speed <F>] [--csv <out.csv>]\n"
    "  blockage --mdot <X> --p0 <Pa> --t0 <K> --mach <M> --area <m2>\n"
    "\n"
    "common options:\n"
    "  --map <csv>       diffuser recovery map (default: built-in synthetic map)\n"
    "  --cp <value>      fixed channel recovery override instead of the map\n"
    "  --no-timestamp    omit the timestamp from the report manifest\n"
    "  --threads <N>     worker count for parallel evaluations\n";

struct ParsedArgs {
    std::string command;
    std::vector<std::string> positional;
    std::map<std::string, std::string> options;
    bool no_timestamp = false;
};

const std::vector<std::string> kValueFlags = {
    "--stl",  "--resolution", "--mdot",  "--speed", "--points", "--speeds", "--param",
    "--values", "--csv",      "--stage", "--map",   "--cp",     "--p0",     "--t0",
    "--mach", "--area",       "--threads"};

ParsedArgs parse_args(const std::vector<std::string>& args) {
    ParsedArgs p;
    if (args.empty()) {
        throw std::invalid_argument("missing command");
    }
    p.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--no-timestamp") {
            p.no_timestamp = true;
        } else if (a.rfind("--", 0) == 0) {
            if (std::find(kValueFlags.begin(), kValueFlags.end(), a) == kValueFlags.end()) {
                throw std::invalid_argument("unknown option " + a);
            }
            if (i + 1 >= args.size()) {
                throw std::invalid_argument("option " + a + " requires a value");
            }
            p.options[a.substr(2)] = args[++i];
        } else {
            p.positional.push_back(a);
        }
    }
    return p;
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid numeric value for " + what + ": \"" + text + "\"");
    }
}

double need_option(const ParsedArgs& p, const std::string& name) {
    const auto it = p.options.find(name);
    if (it == p.options.end()) {
        throw std::invalid_argument("missing required option --" + name);
    }
    return parse_double(it->second, "--" + name);
}

double option_or(const ParsedArgs& p, const std::string& name, double fallback) {
    const auto it = p.options.find(name);
    return it == p.options.end() ? fallback : parse_double(it->second, "--" + name);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(',', pos);
        const std::string cell =
            text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!cell.empty()) out.push_back(parse_double(cell, what));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) {
        throw std::invalid_argument(what + " list must not be empty");
    }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunManifest make_manifest(const ParsedArgs& p, const std::string& config_hash) {
    RunManifest m;
    m.command = p.command;
    m.inputs = p.positional;
    for (const auto& key : {"stage", "map"}) {
        const auto it = p.options.find(key);
        if (it != p.options.end()) m.inputs.push_back(it->second);
    }
    m.config_hash = config_hash;
    if (!p.no_timestamp) {
        m.timestamp = iso8601_utc_now();
    }
    return m;
}

Json flags_json(const std::vector<ConsistencyFlag>& flags) {
    Json arr = Json::array();
    for (const auto& f : flags) {
        Json j = Json::object();
        j.set("name", Json::string(f.name));
        j.set("declared", Json::number(f.declared));
        j.set("derived", Json::number(f.derived));
        j.set("rel_err", Json::number(f.rel_err));
        arr.push(std::move(j));
    }
    return arr;
}

Json derived_json(const DerivedGeometry& g) {
    Json j = Json::object();
    j.set("beta_rad", Json::number(g.beta));
    j.set("n_max", Json::integer(g.n_max));
    j.set("a_th_total_mm2", Json::number(g.a_th_total));
    j.set("ar_actual", Json::number(g.ar_actual));
    j.set("length_actual_mm", Json::number(g.length_actual));
    j.set("d4_actual_mm", Json::number(g.d4_actual));
    j.set("r_3_mm", Json::number(g.r_3));
    j.set("r_3a_mm", Json::number(g.r_3a));
    j.set("r_3b_mm", Json::number(g.r_3b));
    j.set("throat_s_mm", Json::number(g.throat_s));
    j.set("throat_radius_mm", Json::number(g.throat_radius));
    j.set("consistency_flags", flags_json(g.consistency_flags));
    return j;
}

Json feasibility_json(const FeasibilityReport& r) {
    Json j = Json::object();
    j.set("feasible", Json::boolean(r.feasible));
    j.set("reason", Json::string(to_string(r.reason)));
    j.set("beta_rad", Json::number(r.beta));
    j.set("n_max", Json::integer(r.n_max));
    j.set("limiting_alpha_deg", Json::number(r.limiting_alpha));
    j.set("limiting_d_th_mm", Json::number(r.limiting_d_th));
    return j;
}

Json point_json(const StagePoint& p) {
    Json j = Json::object();
    j.set("mdot_kg_s", Json::number(p.mdot));
    j.set("speed_fraction", Json::number(p.speed_fraction));
    j.set("pr_tt", Json::number(p.pr_tt));
    j.set("eta_tt", Json::number(p.eta_tt));
    j.set("cp", Json::number(p.cp));
    j.set("cp0", Json::number(p.cp0));
    j.set("b_th", Json::number(p.b_th));
    j.set("mach_th", Json::number(p.mach_th));
    j.set("re_d", Json::number(p.re_d));
    j.set("flow_angle3_deg", Json::number(p.flow_angle3));
    j.set("p_s4_over_pt1", Json::number(p.p_s4_over_pt1));
    j.set("choked", Json::boolean(p.flags.choked));
    j.set("surge", Json::boolean(p.flags.surge));
    return j;
}

Json speedline_json(const SpeedLine& line) {
    Json j = Json::object();
    j.set("speed_fraction", Json::number(line.speed_fraction));
    j.set("choke_mdot_kg_s", Json::number(line.choke_mdot));
    j.set("surge_mdot_kg_s", Json::number(line.surge_mdot));
    Json pts = Json::array();
    for (const auto& p : line.points) pts.push(point_json(p));
    j.set("points", std::move(pts));
    return j;
}

// The channel recovery source for stage commands; the map object must
// outlive the returned CpSource.
struct CpSetup {
    std::optional<DiffuserMap> map;
    std::optional<CpSource> source;
};

CpSetup make_cp_source(const ParsedArgs& p) {
    CpSetup setup;
    const auto cp_it = p.options.find("cp");
    if (cp_it != p.options.end()) {
        setup.source = CpSource::fixed(parse_double(cp_it->second, "--cp"));
        return setup;
    }
    const auto map_it = p.options.find("map");
    if (map_it != p.options.end()) {
        setup.map = load_map_file(map_it->second);
    } else {
        setup.map = synthetic_demo_map();
    }
    setup.source = CpSource::from_map(*setup.map);
    return setup;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << text;
}

std::string sweep_csv(const SweepReport& rep) {
    std::ostringstream csv;
    csv << "parameter,value,feasible,reason,beta_rad,n_max,ar_actual,d4_actual_mm,eta_tt,pr_tt,"
           "cp,cp0,b_th,mach_th,re_d,flow_angle3_deg,choked,surge,note\n";
    for (const auto& r : rep.records) {
        csv << rep.parameter << ',' << fmt17(r.value) << ',' << (r.feasibility.feasible ? 1 : 0)
            << ',' << to_string(r.feasibility.reason) << ',' << fmt17(r.feasibility.beta) << ','
            << r.feasibility.n_max << ',';
        if (r.derived) {
            csv << fmt17(r.derived->ar_actual) << ',' << fmt17(r.derived->d4_actual) << ',';
        } else {
            csv << ",,";
        }
        if (r.point) {
            const StagePoint& p = *r.point;
            csv << fmt17(p.eta_tt) << ',' << fmt17(p.pr_tt) << ',' << fmt17(p.cp) << ','
                << fmt17(p.cp0) << ',' << fmt17(p.b_th) << ',' << fmt17(p.mach_th) << ','
                << fmt17(p.re_d) << ',' << fmt17(p.flow_angle3) << ',' << (p.flags.choked ? 1 : 0)
                << ',' << (p.flags.surge ? 1 : 0) << ',';
        } else {
            csv << ",,,,,,,,,,";
        }
        csv << r.note << '\n';
    }
    return csv.str();
}

std::string table_csv(const ComparisonTable& table) {
    std::ostringstream csv;
    csv << "id,feasible,conflicts,eta_tt,p_s4_ratio,p_t4_ratio,b_th,cp,cp0,mach_th,note\n";
    for (const auto& row : table.rows) {
        csv << row.id << ',' << (row.feasible ? 1 : 0) << ',' << row.n_conflicts << ',';
        if (row.point) {
            const StagePoint& p = *row.point;
            csv << fmt17(p.eta_tt) << ',' << fmt17(p.p_s4_over_pt1) << ',' << fmt17(p.pr_tt)
                << ',' << fmt17(p.b_th) << ',' << fmt17(p.cp) << ',' << fmt17(p.cp0) << ','
                << fmt17(p.mach_th) << ',';
        } else {
            csv << ",,,,,,,";
        }
        csv << row.note << '\n';
    }
    return csv.str();
}

int cmd_validate(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 1) {
        throw std::invalid_argument("validate takes exactly one design file");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const FeasibilityReport feas = check_feasibility(design);
    const DerivedGeometry derived = derive_geometry(design);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, fnv1a_hex(design_json(design).dump(0)))));
    j.set("design", design_json(design));
    j.set("feasibility", feasibility_json(feas));
    j.set("consistency_flags", flags_json(derived.consistency_flags));
    out << j.dump();
    if (!feas.feasible) return 2;
    return derived.consistency_flags.empty() ? 0 : 3;
}

int cmd_derive(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 1) {
        throw std::invalid_argument("derive takes exactly one design file");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const DerivedGeometry derived = derive_geometry(design);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, fnv1a_hex(design_json(design).dump(0)))));
    j.set("design", design_json(design));
    j.set("derived", derived_json(derived));
    out << j.dump();
    return 0;
}

int cmd_mesh(const ParsedArgs& p, std::ostream& out, std::ostream& err) {
    if (p.positional.size() != 1) {
        throw std::invalid_argument("mesh takes exactly one design file");
    }
    const auto stl_it = p.options.find("stl");
    if (stl_it == p.options.end()) {
        throw std::invalid_argument("mesh requires --stl <out.stl>");
    }
    const double resolution = option_or(p, "resolution", 16.0);
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const FeasibilityReport feas = check_feasibility(design);
    if (!feas.feasible) {
        err << "mesh: design is infeasible (" << to_string(feas.reason) << ")\n";
        return 2;
    }
    const TriangleMesh mesh = build_surface_mesh(design, resolution);
    export_stl_file(mesh, stl_it->second);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, fnv1a_hex(design_json(design).dump(0)))));
    j.set("stl_path", Json::string(stl_it->second));
    j.set("resolution_cells_per_diameter", Json::number(resolution));
    j.set("vertices", Json::integer(static_cast<long long>(mesh.vertices.size())));
    j.set("triangles", Json::integer(static_cast<long long>(mesh.triangles.size())));
    j.set("watertight", Json::boolean(is_watertight(mesh)));
    j.set("volume_mm3", Json::number(signed_volume(mesh)));
    out << j.dump();
    return 0;
}

int cmd_point(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 2) {
        throw std::invalid_argument("point takes <design.json> <stage.json>");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const StageConfig config = load_stage_config(p.positional[1]);
    const double mdot = need_option(p, "mdot");
    const double speed = option_or(p, "speed", 1.0);
    const CpSetup cp = make_cp_source(p);
    const DerivedGeometry derived = derive_geometry(design);
    const StagePoint pt = evaluate_point(config, design, derived, *cp.source, mdot, speed);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, stage_config_hash(config))));
    j.set("calibration", stage_config_json(config));
    j.set("point", point_json(pt));
    out << j.dump();
    return 0;
}

int cmd_speedline(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 2) {
        throw std::invalid_argument("speedline takes <design.json> <stage.json>");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const StageConfig config = load_stage_config(p.positional[1]);
    const double speed = need_option(p, "speed");
    const int n_points = static_cast<int>(option_or(p, "points", 25.0));
    const CpSetup cp = make_cp_source(p);
    const DerivedGeometry derived = derive_geometry(design);
    const SpeedLine line = speedline(config, design, derived, *cp.source, speed, n_points);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, stage_config_hash(config))));
    j.set("calibration", stage_config_json(config));
    j.set("speedline", speedline_json(line));
    out << j.dump();
    return 0;
}

int cmd_map(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 2) {
        throw std::invalid_argument("map takes <design.json> <stage.json>");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const StageConfig config = load_stage_config(p.positional[1]);
    const auto speeds_it = p.options.find("speeds");
    const std::vector<double> speeds = speeds_it == p.options.end()
                                           ? std::vector<double>{0.7, 0.8, 0.9, 1.0}
                                           : parse_list(speeds_it->second, "--speeds");
    const int n_points = static_cast<int>(option_or(p, "points", 25.0));
    const CpSetup cp = make_cp_source(p);
    const DerivedGeometry derived = derive_geometry(design);
    const PerformanceMap pm =
        performance_map(config, design, derived, *cp.source, speeds, n_points);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, stage_config_hash(config))));
    j.set("calibration", stage_config_json(config));
    Json lines = Json::array();
    for (const auto& line : pm.lines) lines.push(speedline_json(line));
    j.set("lines", std::move(lines));
    out << j.dump();
    return 0;
}

int cmd_sweep(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.size() != 2) {
        throw std::invalid_argument("sweep takes <design.json> <stage.json>");
    }
    const auto param_it = p.options.find("param");
    const auto values_it = p.options.find("values");
    if (param_it == p.options.end() || values_it == p.options.end()) {
        throw std::invalid_argument("sweep requires --param <name> and --values v1,v2,...");
    }
    const PipeDiffuserDesign design = load_design(p.positional[0]);
    const StageConfig config = load_stage_config(p.positional[1]);
    const std::vector<double> values = parse_list(values_it->second, "--values");
    const double mdot = option_or(p, "mdot", 0.806);
    const double speed = option_or(p, "speed", 1.0);
    const CpSetup cp = make_cp_source(p);
    const SweepReport rep = ofat_sweep(design, param_it->second, values, config, *cp.source, mdot,
                                       speed, p.positional[0]);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, stage_config_hash(config))));
    j.set("calibration", stage_config_json(config));
    j.set("parameter", Json::string(rep.parameter));
    j.set("mdot_kg_s", Json::number(rep.mdot));
    j.set("speed_fraction", Json::number(rep.speed_fraction));
    Json records = Json::array();
    for (const auto& r : rep.records) {
        Json rj = Json::object();
        rj.set("value", Json::number(r.value));
        rj.set("feasibility", feasibility_json(r.feasibility));
        if (r.derived) {
            rj.set("derived", derived_json(*r.derived));
        }
        if (r.point) {
            rj.set("point", point_json(*r.point));
        }
        if (!r.note.empty()) {
            rj.set("note", Json::string(r.note));
        }
        records.push(std::move(rj));
    }
    j.set("records", std::move(records));
    out << j.dump();

    const auto csv_it = p.options.find("csv");
    if (csv_it != p.options.end()) {
        write_text_file(csv_it->second, sweep_csv(rep));
    }
    return 0;
}

int cmd_table(const ParsedArgs& p, std::ostream& out) {
    if (p.positional.empty()) {
        throw std::invalid_argument("table takes one or more design files");
    }
    const auto stage_it = p.options.find("stage");
    if (stage_it == p.options.end()) {
        throw std::invalid_argument("table requires --stage <stage.json>");
    }
    const StageConfig config = load_stage_config(stage_it->second);
    std::vector<std::pair<std::string, PipeDiffuserDesign>> designs;
    for (const auto& path : p.positional) {
        std::string id = path;
        const std::size_t slash = id.find_last_of('/');
        if (slash != std::string::npos) id = id.substr(slash + 1);
        const std::size_t dot = id.find_last_of('.');
        if (dot != std::string::npos) id = id.substr(0, dot);
        designs.emplace_back(id, load_design(path));
    }
    const double mdot = option_or(p, "mdot", 0.806);
    const double speed = option_or(p, "speed", 1.0);
    const CpSetup cp = make_cp_source(p);
    const ComparisonTable table = design_table(designs, config, *cp.source, mdot, speed);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, stage_config_hash(config))));
    j.set("calibration", stage_config_json(config));
    j.set("mdot_kg_s", Json::number(table.mdot));
    j.set("speed_fraction", Json::number(table.speed_fraction));
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json rj = Json::object();
        rj.set("id", Json::string(row.id));
        rj.set("feasible", Json::boolean(row.feasible));
        rj.set("conflicts", Json::integer(row.n_conflicts));
        if (row.point) {
            rj.set("point", point_json(*row.point));
        }
        if (!row.note.empty()) {
            rj.set("note", Json::string(row.note));
        }
        rows.push(std::move(rj));
    }
    j.set("rows", std::move(rows));
    out << j.dump();

    const auto csv_it = p.options.find("csv");
    if (csv_it != p.options.end()) {
        write_text_file(csv_it->second, table_csv(table));
    }
    return 0;
}

int cmd_blockage(const ParsedArgs& p, std::ostream& out) {
    const double mdot = need_option(p, "mdot");
    const TotalState total{need_option(p, "p0"), need_option(p, "t0")};
    const double mach = need_option(p, "mach");
    const double a_geo = need_option(p, "area");
    const double a_eff = effective_area(mdot, total, mach);
    const double b = throat_blockage(a_eff, a_geo);

    Json j = Json::object();
    j.set("manifest", manifest_json(make_manifest(p, "")));
    j.set("a_eff_m2", Json::number(a_eff));
    j.set("a_geo_m2", Json::number(a_geo));
    j.set("blockage", Json::number(b));
    j.set("choke_mdot_kg_s", Json::number(choke_mass_flow(a_geo, b, total)));
    out << j.dump();
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ParsedArgs p;
    try {
        p = parse_args(args);
        const auto threads_it = p.options.find("threads");
        if (threads_it != p.options.end()) {
#ifdef _OPENMP
            omp_set_num_threads(
                std::max(1, static_cast<int>(parse_double(threads_it->second, "--threads"))));
#endif
        }

        if (p.command == "validate") return cmd_validate(p, out);
        if (p.command == "derive") return cmd_derive(p, out);
        if (p.command == "mesh") return cmd_mesh(p, out, err);
        if (p.command == "point") return cmd_point(p, out);
        if (p.command == "speedline") return cmd_speedline(p, out);
        if (p.command == "map") return cmd_map(p, out);
        if (p.command == "sweep") return cmd_sweep(p, out);
        if (p.command == "table") return cmd_table(p, out);
        if (p.command == "blockage") return cmd_blockage(p, out);
        if (p.command == "help" || p.command == "--help" || p.command == "-h") {
            out << kUsage;
            return 0;
        }
        throw std::invalid_argument("unknown command \"" + p.command + "\"");
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const MapLoadError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n" << kUsage;
        return 64;
    } catch (const std::exception& e) {
        err << "numeric failure in " << (p.command.empty() ? "command" : p.command) << ": "
            << e.what() << "\n";
        return 5;
    }
}

}  // namespace pipediff
