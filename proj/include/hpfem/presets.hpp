#pragma once

#include "hpfem/mesh_io.hpp"
#include "hpfem/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hpfem::presets {

/// Unit square split along the (0,0)-(1,1) diagonal.
inline constexpr std::string_view kSquareMesh = R"(# unit square, two triangles
4 2 4
0 0
1 0
1 1
0 1
0 1 2
0 2 3
0 1 1
1 2 1
2 3 1
3 0 1
)";

/// (-1,1)^2 minus [0,1)x(-1,0]: three unit squares, diagonals through the reentrant corner.
inline constexpr std::string_view kLShapeMesh = R"(# L-shape, six triangles
8 6 8
-1 -1
 0 -1
-1  0
 0  0
 1  0
-1  1
 0  1
 1  1
0 1 3
0 3 2
2 3 5
3 6 5
3 4 7
3 7 6
0 1 1
1 3 1
3 4 1
4 7 1
7 6 1
6 5 1
5 2 1
2 0 1
)";

/// Polar angle about the reentrant corner, in [0, 2 pi).
inline double corner_angle(Point p)
{
    double theta = std::atan2(p.y, p.x);
    if (theta < 0.0)
        theta += 2.0 * std::numbers::pi;
    return theta;
}

/// u = sin(pi x) sin(pi y) on the unit square, homogeneous Dirichlet data.
inline Problem square_smooth()
{
    using std::numbers::pi;
    Problem pr;
    pr.name = "square-smooth";
    pr.mesh = load_mesh(kSquareMesh);
    pr.f = [](Point p) { return 2.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); };
    pr.g = [](Point) { return 0.0; };
    pr.exact = [](Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
    pr.exact_gradient = [](Point p) {
        return std::array<double, 2>{pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                                     pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
    };
    return pr;
}

/// u = cos(2 pi x) cos(2 pi y) on the L-shape, Dirichlet data from the trace.
inline Problem lshape_smooth()
{
    using std::numbers::pi;
    Problem pr;
    pr.name = "lshape-smooth";
    pr.mesh = load_mesh(kLShapeMesh);
    auto u = [](Point p) { return std::cos(2.0 * pi * p.x) * std::cos(2.0 * pi * p.y); };
    pr.f = [u](Point p) { return 8.0 * pi * pi * u(p); };
    pr.g = u;
    pr.exact = u;
    pr.exact_gradient = [](Point p) {
        return std::array<double, 2>{-2.0 * pi * std::sin(2.0 * pi * p.x) * std::cos(2.0 * pi * p.y),
                                     -2.0 * pi * std::cos(2.0 * pi * p.x) * std::sin(2.0 * pi * p.y)};
    };
    return pr;
}

/// u = r^{2/3} sin(2 theta / 3) about the reentrant corner; harmonic, so f = 0.
inline Problem lshape_corner()
{
    Problem pr;
    pr.name = "lshape-corner";
    pr.mesh = load_mesh(kLShapeMesh);
    auto u = [](Point p) {
        const double r = std::hypot(p.x, p.y);
        return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * corner_angle(p) / 3.0);
    };
    pr.f = [](Point) { return 0.0; };
    pr.g = u;
    pr.exact = u;
    pr.exact_gradient = [](Point p) {
        const double r = std::hypot(p.x, p.y);
        if (r == 0.0)
            return std::array<double, 2>{0.0, 0.0};
        const double theta = corner_angle(p);
        const double s = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0);
        return std::array<double, 2>{-s * std::sin(theta / 3.0), s * std::cos(theta / 3.0)};
    };
    return pr;
}

inline const std::vector<std::string>& names()
{
    static const std::vector<std::string> all = {"square-smooth", "lshape-smooth", "lshape-corner"};
    return all;
}

inline Problem make(std::string_view name)
{
    if (name == "square-smooth")
        return square_smooth();
    if (name == "lshape-smooth")
        return lshape_smooth();
    if (name == "lshape-corner")
        return lshape_corner();
    throw std::invalid_argument("unknown problem preset '" + std::string(name) + "'");
}

} // namespace hpfem::presets
