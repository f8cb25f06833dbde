#include "pipediff/stl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pipediff {

namespace {

void put_f32(char* dst, float v) { std::memcpy(dst, &v, 4); }

float get_f32(const char* src) {
    float v;
    std::memcpy(&v, src, 4);
    return v;
}

void put_u32(char* dst, std::uint32_t v) { std::memcpy(dst, &v, 4); }

std::uint32_t get_u32(const char* src) {
    std::uint32_t v;
    std::memcpy(&v, src, 4);
    return v;
}

static_assert(sizeof(float) == 4, "binary STL needs 32-bit floats");

}  // namespace

void export_stl(const TriangleMesh& mesh, std::ostream& out) {
    const auto bad = boundary_edges(mesh);
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "export_stl: mesh is not watertight; " << bad.size() << " boundary edge"
            << (bad.size() == 1 ? "" : "s") << ":";
        const std::size_t shown = std::min<std::size_t>(bad.size(), 16);
        for (std::size_t i = 0; i < shown; ++i) {
            msg << " (" << bad[i][0] << "," << bad[i][1] << ")";
        }
        if (shown < bad.size()) msg << " ...";
        throw StlError(msg.str());
    }
    if (mesh.triangles.size() > 0xFFFFFFFFull) {
        throw StlError("export_stl: too many triangles for binary STL");
    }

    char header[80] = {};
    std::snprintf(header, sizeof header, "pipediff binary STL (%zu triangles)",
                  mesh.triangles.size());
    out.write(header, 80);
    char count[4];
    put_u32(count, static_cast<std::uint32_t>(mesh.triangles.size()));
    out.write(count, 4);

    char rec[50];
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        double nx = uy * vz - uz * vy;
        double ny = uz * vx - ux * vz;
        double nz = ux * vy - uy * vx;
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len > 0.0) {
            nx /= len;
            ny /= len;
            nz /= len;
        }
        put_f32(rec + 0, static_cast<float>(nx));
        put_f32(rec + 4, static_cast<float>(ny));
        put_f32(rec + 8, static_cast<float>(nz));
        const std::array<double, 3>* verts[3] = {&a, &b, &c};
        for (int v = 0; v < 3; ++v) {
            for (int d = 0; d < 3; ++d) {
                put_f32(rec + 12 + 12 * v + 4 * d, static_cast<float>((*verts[v])[d]));
            }
        }
        rec[48] = 0;
        rec[49] = 0;
        out.write(rec, 50);
    }
    if (!out) {
        throw StlError("export_stl: write failed");
    }
}

void export_stl_file(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw StlError("export_stl: cannot open " + path);
    }
    export_stl(mesh, out);
}

TriangleMesh import_stl(std::istream& in) {
    char header[80];
    in.read(header, 80);
    char count_buf[4];
    in.read(count_buf, 4);
    if (!in) {
        throw StlError("import_stl: truncated header");
    }
    const std::uint32_t n = get_u32(count_buf);
    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(n) * 3);
    mesh.triangles.reserve(n);
    char rec[50];
    for (std::uint32_t t = 0; t < n; ++t) {
        in.read(rec, 50);
        if (!in) {
            throw StlError("import_stl: truncated at triangle " + std::to_string(t));
        }
        std::array<std::uint32_t, 3> tri;
        for (int v = 0; v < 3; ++v) {
            std::array<double, 3> p;
            for (int d = 0; d < 3; ++d) {
                p[d] = get_f32(rec + 12 + 12 * v + 4 * d);
            }
            tri[v] = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back(p);
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

TriangleMesh import_stl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StlError("import_stl: cannot open " + path);
    }
    return import_stl(in);
}

}  // namespace pipediff
