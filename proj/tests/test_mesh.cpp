#include <cmath>
#include <cstdint>
#include <sstream>

#include "doctest.h"
#include "pipediff/io.hpp"
#include "pipediff/mesh.hpp"
#include "pipediff/stl.hpp"

using namespace pipediff;

namespace {

const std::string kData = PIPEDIFF_DATA_DIR;

PipeDiffuserDesign p2() { return load_design(kData + "/designs/p2.json"); }

TriangleMesh unit_tetrahedron() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    // Outward wound faces.
    m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return m;
}

}  // namespace

TEST_CASE("serial and parallel field sampling agree bitwise") {
    const auto design = p2();
    const auto derived = derive_geometry(design);
    const DiffuserSolid solid(design, derived);
    GridSpec grid = grid_for_solid(solid, 8.0);
    // Shrink to a manageable probe region.
    grid.nx = 48;
    grid.ny = 48;
    grid.nz = 12;
    const auto a = sample_grid_serial(solid, grid);
    const auto b = sample_grid_parallel(solid, grid);
    CHECK(a == b);
}

TEST_CASE("meshed baseline design is watertight with positive volume") {
    const auto design = p2();
    const TriangleMesh mesh = build_surface_mesh(design, 8.0);
    CHECK(mesh.triangles.size() > 1000);
    CHECK(is_watertight(mesh));
    CHECK(boundary_edges(mesh).empty());
    const double vol = signed_volume(mesh);
    CHECK(vol > 0.0);
    CHECK(min_triangle_area(mesh) > 1e-9);

    // Monte-Carlo volume of the same implicit solid.
    const auto derived = derive_geometry(design);
    const DiffuserSolid solid(design, derived);
    const double mc = monte_carlo_volume_parallel(solid, 2'000'000, 20240809);
    CHECK(std::abs(mc - vol) / mc < 0.05);
}

TEST_CASE("monte-carlo volume is deterministic across worker counts") {
    const auto design = p2();
    const auto derived = derive_geometry(design);
    const DiffuserSolid solid(design, derived);
    const double a = monte_carlo_volume_serial(solid, 300'000, 7);
    const double b = monte_carlo_volume_parallel(solid, 300'000, 7);
    CHECK(a == b);
}

TEST_CASE("two-pipe smoke mesh") {
    auto design = p2();
    design.n_pipes = 2;
    const TriangleMesh mesh = build_surface_mesh(design, 8.0);
    CHECK(mesh.triangles.size() > 0);
    CHECK(is_watertight(mesh));
    CHECK(signed_volume(mesh) > 0.0);
}

TEST_CASE("mesh configuration and feasibility errors") {
    CHECK_THROWS_AS(build_surface_mesh(p2(), 4.0), std::invalid_argument);
    auto bad = p2();
    bad.alpha = 20.0;  // arccos domain violation
    CHECK_THROWS_AS(build_surface_mesh(bad, 8.0), std::invalid_argument);
}

TEST_CASE("tetrahedron exports to a 284-byte binary STL") {
    const auto tet = unit_tetrahedron();
    CHECK(is_watertight(tet));
    CHECK(signed_volume(tet) > 0.0);
    std::ostringstream out(std::ios::binary);
    export_stl(tet, out);
    CHECK(out.str().size() == 284);  // 80 + 4 + 4 * 50
}

TEST_CASE("non-watertight meshes are refused with boundary edges listed") {
    TriangleMesh open_mesh;
    open_mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    open_mesh.triangles = {{0, 1, 2}};
    std::ostringstream out(std::ios::binary);
    try {
        export_stl(open_mesh, out);
        FAIL("expected StlError");
    } catch (const StlError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3 boundary edges") != std::string::npos);
        CHECK(msg.find("(0,1)") != std::string::npos);
        CHECK(msg.find("(1,2)") != std::string::npos);
        CHECK(msg.find("(0,2)") != std::string::npos);
    }
}

TEST_CASE("STL write-parse round trip is bit-exact") {
    const auto tet = unit_tetrahedron();
    std::ostringstream out(std::ios::binary);
    export_stl(tet, out);
    std::istringstream in(out.str(), std::ios::binary);
    const TriangleMesh back = import_stl(in);
    REQUIRE(back.triangles.size() == tet.triangles.size());
    for (std::size_t t = 0; t < tet.triangles.size(); ++t) {
        for (int v = 0; v < 3; ++v) {
            const auto& orig = tet.vertices[tet.triangles[t][v]];
            const auto& got = back.vertices[back.triangles[t][v]];
            for (int d = 0; d < 3; ++d) {
                CHECK(static_cast<float>(got[d]) == static_cast<float>(orig[d]));
            }
        }
    }

    // Second write must reproduce the byte stream exactly.
    std::ostringstream out2(std::ios::binary);
    export_stl(tet, out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("meshed design round trips through STL") {
    auto design = p2();
    design.n_pipes = 4;
    const TriangleMesh mesh = build_surface_mesh(design, 8.0);
    std::ostringstream out(std::ios::binary);
    export_stl(mesh, out);
    CHECK(out.str().size() == 84 + 50 * mesh.triangles.size());
    std::istringstream in(out.str(), std::ios::binary);
    const TriangleMesh back = import_stl(in);
    CHECK(back.triangles.size() == mesh.triangles.size());
    bool all_match = true;
    for (std::size_t t = 0; t < mesh.triangles.size() && all_match; ++t) {
        for (int v = 0; v < 3; ++v) {
            const auto& orig = mesh.vertices[mesh.triangles[t][v]];
            const auto& got = back.vertices[back.triangles[t][v]];
            for (int d = 0; d < 3; ++d) {
                all_match &= (static_cast<float>(got[d]) == static_cast<float>(orig[d]));
            }
        }
    }
    CHECK(all_match);
}
