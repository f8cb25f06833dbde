// Binary STL export and import. Little-endian layout: 80-byte header, 32-bit
// triangle count, then 50 bytes per triangle (normal, three vertices as
// 32-bit floats, 16-bit attribute).
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pipediff/mesh.hpp"

namespace pipediff {

class StlError : public std::runtime_error {
public:
    explicit StlError(const std::string& what) : std::runtime_error(what) {}
};

// Refuses non-watertight meshes; the diagnostic lists the boundary edges.
void export_stl(const TriangleMesh& mesh, std::ostream& out);
void export_stl_file(const TriangleMesh& mesh, const std::string& path);

// Reads a binary STL back as a triangle soup (three vertices per triangle).
TriangleMesh import_stl(std::istream& in);
TriangleMesh import_stl_file(const std::string& path);

}  // namespace pipediff
