#include "pipediff/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pipediff {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Interpolation parameter is kept away from the endpoints and samples away
// from zero so no degenerate triangle can be emitted.
constexpr double kSnapFraction = 1e-3;
constexpr double kTClamp = 1e-3;

}  // namespace

DiffuserSolid::DiffuserSolid(const PipeDiffuserDesign& design, const DerivedGeometry& derived) {
    r_inner_ = derived.r_3;
    r_outer_ = 0.5 * derived.d4_actual;
    half_height_ = 0.5 * design.passage_height;
    r_tan_ = design.r_tan();
    pipe_r_ = 0.5 * design.d_th;
    tan_half_ = std::tan(0.5 * design.two_theta * kPi / 180.0);
    s_throat_ = derived.throat_s;
    s_end_ = s_throat_ + derived.length_actual;
    cos_phi_.resize(design.n_pipes);
    sin_phi_.resize(design.n_pipes);
    for (int k = 0; k < design.n_pipes; ++k) {
        const double phi = 2.0 * kPi * k / design.n_pipes;
        cos_phi_[k] = std::cos(phi);
        sin_phi_[k] = std::sin(phi);
    }
}

double DiffuserSolid::signed_distance(double x, double y, double z) const {
    const double rho = std::hypot(x, y);
    const double f_disk = std::max({rho - r_outer_, r_inner_ - rho, std::abs(z) - half_height_});
    if (f_disk >= 0.0) {
        return f_disk;  // outside the disk; holes cannot extend the solid
    }
    // Hole SDF: conical profile from the throat outward, cylindrical inward,
    // clipped to s in [0, s_end].
    double min_pipe = std::numeric_limits<double>::infinity();
    const std::size_t n = cos_phi_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double c = cos_phi_[k];
        const double s = sin_phi_[k];
        const double xl = x * c + y * s;        // toward the tangency point
        const double sl = -x * s + y * c;       // along the axis
        const double dx = xl - r_tan_;
        const double q = std::sqrt(dx * dx + z * z);
        const double radius = pipe_r_ + tan_half_ * std::max(0.0, std::min(sl, s_end_) - s_throat_);
        const double f = std::max({q - radius, -sl, sl - s_end_});
        min_pipe = std::min(min_pipe, f);
    }
    return std::max(f_disk, -min_pipe);
}

std::array<double, 3> DiffuserSolid::bbox_min() const {
    return {-r_outer_, -r_outer_, -half_height_};
}

std::array<double, 3> DiffuserSolid::bbox_max() const {
    return {r_outer_, r_outer_, half_height_};
}

GridSpec grid_for_solid(const DiffuserSolid& solid, double resolution_cells_per_diameter) {
    if (!(resolution_cells_per_diameter >= 8.0)) {
        throw std::invalid_argument("mesh resolution must be at least 8 cells per throat diameter");
    }
    const double cell = solid.throat_diameter() / resolution_cells_per_diameter;
    const auto lo = solid.bbox_min();
    const auto hi = solid.bbox_max();
    GridSpec g;
    g.cell = cell;
    for (int a = 0; a < 3; ++a) {
        g.origin[a] = lo[a] - 2.5 * cell;
    }
    g.nx = static_cast<int>(std::ceil((hi[0] - g.origin[0] + 2.5 * cell) / cell)) + 1;
    g.ny = static_cast<int>(std::ceil((hi[1] - g.origin[1] + 2.5 * cell) / cell)) + 1;
    g.nz = static_cast<int>(std::ceil((hi[2] - g.origin[2] + 2.5 * cell) / cell)) + 1;
    return g;
}

namespace {

double snapped(double f, double snap) {
    if (std::abs(f) < snap) {
        return f < 0.0 ? -snap : snap;  // exact zero counts as outside
    }
    return f;
}

void sample_plane_impl(const DiffuserSolid& solid, const GridSpec& grid, int k, double* out,
                       bool parallel) {
    const double z = grid.origin[2] + k * grid.cell;
    const double snap = kSnapFraction * grid.cell;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.origin[1] + j * grid.cell;
        double* row = out + static_cast<std::size_t>(j) * grid.nx;
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.origin[0] + i * grid.cell;
            row[i] = snapped(solid.signed_distance(x, y, z), snap);
        }
    }
#ifndef _OPENMP
    (void)parallel;
#endif
}

}  // namespace

void sample_plane_serial(const DiffuserSolid& solid, const GridSpec& grid, int k, double* out) {
    sample_plane_impl(solid, grid, k, out, false);
}

void sample_plane_parallel(const DiffuserSolid& solid, const GridSpec& grid, int k, double* out) {
    sample_plane_impl(solid, grid, k, out, true);
}

std::vector<double> sample_grid_serial(const DiffuserSolid& solid, const GridSpec& grid) {
    std::vector<double> field(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
    for (int k = 0; k < grid.nz; ++k) {
        sample_plane_serial(solid, grid, k,
                            field.data() + static_cast<std::size_t>(k) * grid.nx * grid.ny);
    }
    return field;
}

std::vector<double> sample_grid_parallel(const DiffuserSolid& solid, const GridSpec& grid) {
    std::vector<double> field(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
    for (int k = 0; k < grid.nz; ++k) {
        sample_plane_parallel(solid, grid, k,
                              field.data() + static_cast<std::size_t>(k) * grid.nx * grid.ny);
    }
    return field;
}

namespace {

// Freudenthal decomposition of a cube into six positively oriented
// tetrahedra sharing the main diagonal c0-c6; identical in every cell, so
// shared cube faces carry matching diagonals.
constexpr int kTets[6][4] = {
    {0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6},
};

// Corner offsets (i, j, k) of cube vertices 0..7.
constexpr int kCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Even-permutation companions: for inside vertex i, {A, B, C} such that
// (i, A, B, C) is an even permutation of (0, 1, 2, 3).
constexpr int kEvenOthers[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

// For the two-inside case {i, j} (i < j), (k, l) completing an even
// permutation (i, j, k, l).
struct QuadCase {
    int i, j, k, l;
};
constexpr QuadCase kQuadCases[6] = {
    {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 3, 0, 1},
};

struct Extractor {
    const GridSpec& grid;
    TriangleMesh mesh;
    // Edge-crossing vertices keyed by the global ids of the edge endpoints.
    // in_plane[0] holds edges inside plane k, in_plane[1] inside plane k+1,
    // cross holds edges spanning the two planes; in_plane[1] is carried over
    // to the next slab.
    std::unordered_map<std::uint64_t, std::uint32_t> in_plane[2];
    std::unordered_map<std::uint64_t, std::uint32_t> cross;

    explicit Extractor(const GridSpec& g) : grid(g) {}

    std::uint64_t gid(int i, int j, int k) const {
        return (static_cast<std::uint64_t>(k) * grid.ny + j) * grid.nx + i;
    }

    std::array<double, 3> point(int i, int j, int k) const {
        return {grid.origin[0] + i * grid.cell, grid.origin[1] + j * grid.cell,
                grid.origin[2] + k * grid.cell};
    }

    std::uint32_t vertex_for_edge(int ia, int ja, int ka, double fa, int ib, int jb, int kb,
                                  double fb) {
        std::uint64_t a = gid(ia, ja, ka);
        std::uint64_t b = gid(ib, jb, kb);
        if (a > b) {
            std::swap(a, b);
            std::swap(fa, fb);
            std::swap(ia, ib);
            std::swap(ja, jb);
            std::swap(ka, kb);
        }
        const std::uint64_t key = (a << 32) | b;
        auto& table = (ka == kb) ? in_plane[ka == slab_k ? 0 : 1] : cross;
        const auto it = table.find(key);
        if (it != table.end()) return it->second;

        double t = fa / (fa - fb);
        t = std::clamp(t, kTClamp, 1.0 - kTClamp);
        const auto pa = point(ia, ja, ka);
        const auto pb = point(ib, jb, kb);
        const std::array<double, 3> p = {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]),
                                         pa[2] + t * (pb[2] - pa[2])};
        const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        table.emplace(key, idx);
        return idx;
    }

    int slab_k = 0;

    // Marches one tetrahedron given its four corner grid indices and values.
    void tet(const int idx[4][3], const double f[4]) {
        int mask = 0;
        for (int v = 0; v < 4; ++v) {
            if (f[v] < 0.0) mask |= 1 << v;
        }
        if (mask == 0 || mask == 15) return;

        auto ev = [&](int a, int b) {
            return vertex_for_edge(idx[a][0], idx[a][1], idx[a][2], f[a], idx[b][0], idx[b][1],
                                   idx[b][2], f[b]);
        };

        const int inside = __builtin_popcount(static_cast<unsigned>(mask));
        if (inside == 1) {
            const int i = __builtin_ctz(static_cast<unsigned>(mask));
            const int* o = kEvenOthers[i];
            mesh.triangles.push_back({ev(i, o[0]), ev(i, o[1]), ev(i, o[2])});
        } else if (inside == 3) {
            const int j = __builtin_ctz(static_cast<unsigned>(~mask) & 0xF);
            const int* o = kEvenOthers[j];
            mesh.triangles.push_back({ev(j, o[0]), ev(j, o[2]), ev(j, o[1])});
        } else {
            for (const auto& qc : kQuadCases) {
                if (((mask >> qc.i) & 1) && ((mask >> qc.j) & 1)) {
                    const std::uint32_t q0 = ev(qc.i, qc.k);
                    const std::uint32_t q1 = ev(qc.i, qc.l);
                    const std::uint32_t q2 = ev(qc.j, qc.l);
                    const std::uint32_t q3 = ev(qc.j, qc.k);
                    mesh.triangles.push_back({q0, q1, q2});
                    mesh.triangles.push_back({q0, q2, q3});
                    return;
                }
            }
        }
    }

    void slab(int k, const double* lower, const double* upper) {
        slab_k = k;
        const int nx = grid.nx;
        auto sample = [&](int i, int j, int dz) {
            const double* plane = dz == 0 ? lower : upper;
            return plane[static_cast<std::size_t>(j) * nx + i];
        };
        for (int j = 0; j + 1 < grid.ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                double f[8];
                bool any_in = false, any_out = false;
                for (int c = 0; c < 8; ++c) {
                    f[c] = sample(i + kCorner[c][0], j + kCorner[c][1], kCorner[c][2]);
                    (f[c] < 0.0 ? any_in : any_out) = true;
                }
                if (!any_in || !any_out) continue;
                for (const auto& t : kTets) {
                    int idx[4][3];
                    double fv[4];
                    for (int v = 0; v < 4; ++v) {
                        const int c = t[v];
                        idx[v][0] = i + kCorner[c][0];
                        idx[v][1] = j + kCorner[c][1];
                        idx[v][2] = k + kCorner[c][2];
                        fv[v] = f[c];
                    }
                    tet(idx, fv);
                }
            }
        }
        in_plane[0] = std::move(in_plane[1]);
        in_plane[1].clear();
        cross.clear();
    }
};

}  // namespace

TriangleMesh extract_isosurface(const DiffuserSolid& solid, const GridSpec& grid) {
    const std::size_t plane_size = static_cast<std::size_t>(grid.nx) * grid.ny;
    std::vector<double> lower(plane_size);
    std::vector<double> upper(plane_size);
    sample_plane_parallel(solid, grid, 0, lower.data());

    Extractor ex(grid);
    for (int k = 0; k + 1 < grid.nz; ++k) {
        sample_plane_parallel(solid, grid, k + 1, upper.data());
        ex.slab(k, lower.data(), upper.data());
        std::swap(lower, upper);
    }
    return std::move(ex.mesh);
}

TriangleMesh build_surface_mesh(const PipeDiffuserDesign& design,
                                double resolution_cells_per_diameter) {
    design.validate();
    const FeasibilityReport feas = check_feasibility(design);
    if (!feas.feasible) {
        throw std::invalid_argument(std::string("build_surface_mesh: infeasible design (") +
                                    to_string(feas.reason) + ")");
    }
    const DerivedGeometry derived = derive_geometry(design);
    const DiffuserSolid solid(design, derived);
    const GridSpec grid = grid_for_solid(solid, resolution_cells_per_diameter);
    return extract_isosurface(solid, grid);
}

std::vector<std::array<std::uint32_t, 2>> boundary_edges(const TriangleMesh& mesh) {
    std::vector<std::uint64_t> keys;
    keys.reserve(mesh.triangles.size() * 3);
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const std::uint32_t a = t[e];
            const std::uint32_t b = t[(e + 1) % 3];
            keys.push_back((static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b));
        }
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::array<std::uint32_t, 2>> bad;
    std::size_t i = 0;
    while (i < keys.size()) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        if (j - i != 2) {
            bad.push_back({static_cast<std::uint32_t>(keys[i] >> 32),
                           static_cast<std::uint32_t>(keys[i] & 0xFFFFFFFFu)});
        }
        i = j;
    }
    return bad;
}

bool is_watertight(const TriangleMesh& mesh) {
    return !mesh.triangles.empty() && boundary_edges(mesh).empty();
}

double signed_volume(const TriangleMesh& mesh) {
    double vol = 0.0;
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        vol += a[0] * (b[1] * c[2] - b[2] * c[1]) + a[1] * (b[2] * c[0] - b[0] * c[2]) +
               a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return vol / 6.0;
}

double min_triangle_area(const TriangleMesh& mesh) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        const double cx = uy * vz - uz * vy;
        const double cy = uz * vx - ux * vz;
        const double cz = ux * vy - uy * vx;
        best = std::min(best, 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz));
    }
    return best;
}

namespace {

constexpr std::uint64_t kChunk = 65536;

double mc_volume_impl(const DiffuserSolid& solid, std::uint64_t n_samples, std::uint64_t seed,
                      bool parallel) {
    if (n_samples == 0) {
        throw std::invalid_argument("monte_carlo_volume: n_samples must be > 0");
    }
    const auto lo = solid.bbox_min();
    const auto hi = solid.bbox_max();
    const double box_vol =
        (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    const std::int64_t n_chunks = static_cast<std::int64_t>((n_samples + kChunk - 1) / kChunk);

    std::uint64_t inside = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : inside) if (parallel)
#endif
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(c + 1)));
        std::uniform_real_distribution<double> ux(lo[0], hi[0]);
        std::uniform_real_distribution<double> uy(lo[1], hi[1]);
        std::uniform_real_distribution<double> uz(lo[2], hi[2]);
        const std::uint64_t count =
            std::min(kChunk, n_samples - static_cast<std::uint64_t>(c) * kChunk);
        std::uint64_t local = 0;
        for (std::uint64_t s = 0; s < count; ++s) {
            const double x = ux(rng);
            const double y = uy(rng);
            const double z = uz(rng);
            if (solid.signed_distance(x, y, z) < 0.0) ++local;
        }
        inside += local;
    }
#ifndef _OPENMP
    (void)parallel;
#endif
    return box_vol * static_cast<double>(inside) / static_cast<double>(n_samples);
}

}  // namespace

double monte_carlo_volume_serial(const DiffuserSolid& solid, std::uint64_t n_samples,
                                 std::uint64_t seed) {
    return mc_volume_impl(solid, n_samples, seed, false);
}

double monte_carlo_volume_parallel(const DiffuserSolid& solid, std::uint64_t n_samples,
                                   std::uint64_t seed) {
    return mc_volume_impl(solid, n_samples, seed, true);
}

}  // namespace pipediff
