#pragma once

#include "hpfem/mesh.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace hpfem {

/**
 * Parse the ASCII mesh format:
 *
 *   nv nt nb
 *   x y            (nv lines)
 *   v0 v1 v2       (nt lines, counter-clockwise, 0-based)
 *   v0 v1 marker   (nb lines, marker 1 = Dirichlet)
 *
 * Everything after a '#' on a line is ignored.
 */
inline Mesh load_mesh(std::string_view text)
{
    std::string cleaned;
    cleaned.reserve(text.size());
    bool in_comment = false;
    for (char ch : text) {
        if (ch == '#')
            in_comment = true;
        if (ch == '\n')
            in_comment = false;
        cleaned.push_back(in_comment ? ' ' : ch);
    }

    std::istringstream in(cleaned);
    long long nv = 0, nt = 0, nb = 0;
    if (!(in >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 0)
        throw MeshError("mesh header must read 'nv nt nb' with nv >= 3 and nt >= 1");

    std::vector<Vertex> vertices(static_cast<std::size_t>(nv));
    for (auto& v : vertices)
        if (!(in >> v.x >> v.y))
            throw MeshError("truncated vertex list");

    auto read_index = [&](const char* what) {
        long long i = 0;
        if (!(in >> i))
            throw MeshError(std::string("truncated ") + what + " list");
        if (i < 0 || i >= nv)
            throw MeshError(std::string(what) + " references vertex out of range");
        return static_cast<VertexId>(i);
    };

    std::vector<std::array<VertexId, 3>> triangles(static_cast<std::size_t>(nt));
    for (auto& t : triangles)
        for (auto& id : t)
            id = read_index("triangle");

    std::vector<BoundaryEdge> boundary(static_cast<std::size_t>(nb));
    for (auto& be : boundary) {
        be.a = read_index("boundary");
        be.b = read_index("boundary");
        if (!(in >> be.marker))
            throw MeshError("truncated boundary list");
    }

    std::string extra;
    if (in >> extra)
        throw MeshError("unexpected trailing content in mesh document");

    return Mesh(std::move(vertices), triangles, boundary);
}

inline Mesh load_mesh_file(const std::string& path)
{
    std::ifstream file(path);
    if (!file)
        throw MeshError("cannot open mesh file " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return load_mesh(buffer.str());
}

} // namespace hpfem
