// Surface meshing of the diffuser solid: an annular disk minus the union of
// conical pipe passages, represented as a signed-distance field, sampled on a
// regular grid (serial reference and OpenMP kernels) and triangulated with a
// tetrahedral marching scheme that yields watertight meshes.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pipediff/geometry.hpp"

namespace pipediff {

struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;             // mm
    std::vector<std::array<std::uint32_t, 3>> triangles;     // outward wound
};

// Implicit solid, all lengths in mm. signed_distance < 0 inside.
class DiffuserSolid {
public:
    DiffuserSolid(const PipeDiffuserDesign& design, const DerivedGeometry& derived);

    double signed_distance(double x, double y, double z) const;

    std::array<double, 3> bbox_min() const;
    std::array<double, 3> bbox_max() const;
    double throat_diameter() const { return 2.0 * pipe_r_; }

private:
    double r_inner_, r_outer_, half_height_;
    double r_tan_, pipe_r_, tan_half_, s_throat_, s_end_;
    std::vector<double> cos_phi_, sin_phi_;
};

struct GridSpec {
    std::array<double, 3> origin;  // position of sample (0,0,0)
    double cell;                   // spacing [mm]
    int nx, ny, nz;                // sample counts per axis
};

GridSpec grid_for_solid(const DiffuserSolid& solid, double resolution_cells_per_diameter);

// Samples one z-plane of the field into out[nx*ny], row-major in (i, j).
void sample_plane_serial(const DiffuserSolid& solid, const GridSpec& grid, int k, double* out);
void sample_plane_parallel(const DiffuserSolid& solid, const GridSpec& grid, int k, double* out);

// Whole-grid sampling, z-major; serial reference and OpenMP kernel produce
// identical values.
std::vector<double> sample_grid_serial(const DiffuserSolid& solid, const GridSpec& grid);
std::vector<double> sample_grid_parallel(const DiffuserSolid& solid, const GridSpec& grid);

// Extracts the isosurface of the sampled field. Plane sampling may run in
// parallel; triangle emission order is fixed by cell order.
TriangleMesh extract_isosurface(const DiffuserSolid& solid, const GridSpec& grid);

// Full pipeline: validates the design, checks feasibility, builds the solid
// and extracts the surface at the given resolution (grid cells per throat
// diameter, at least 8).
TriangleMesh build_surface_mesh(const PipeDiffuserDesign& design,
                                double resolution_cells_per_diameter);

// Undirected edges not shared by exactly two triangles; empty means watertight.
std::vector<std::array<std::uint32_t, 2>> boundary_edges(const TriangleMesh& mesh);
bool is_watertight(const TriangleMesh& mesh);

// Divergence-theorem volume [mm^3]; positive for outward-wound surfaces.
double signed_volume(const TriangleMesh& mesh);

// Smallest triangle area [mm^2].
double min_triangle_area(const TriangleMesh& mesh);

// Monte-Carlo volume of the implicit solid [mm^3]. Sampling is split into
// fixed 64k chunks with per-chunk seeds, so the result is independent of the
// worker count.
double monte_carlo_volume_serial(const DiffuserSolid& solid, std::uint64_t n_samples,
                                 std::uint64_t seed);
double monte_carlo_volume_parallel(const DiffuserSolid& solid, std::uint64_t n_samples,
                                   std::uint64_t seed);

}  // namespace pipediff
