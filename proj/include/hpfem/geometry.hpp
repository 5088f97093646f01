#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace hpfem {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Vertex = Point;

/// Local edge i of a triangle is the edge opposite local vertex i.
inline constexpr std::array<std::array<int, 2>, 3> kLocalEdgeVertices = {{{1, 2}, {2, 0}, {0, 1}}};

using ScalarFunction = std::function<double(Point)>;
using GradientFunction = std::function<std::array<double, 2>(Point)>;

/// Raised for malformed input meshes, invalid element ids and similar misuse.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a linear solve or factorization breaks down.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Twice the signed area of the triangle (a, b, c); positive when counter-clockwise.
inline double signed_area2(Point a, Point b, Point c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/**
 * Affine map from the reference triangle {(xi, eta) : xi, eta >= 0, xi + eta <= 1}
 * onto a physical triangle with vertices v0, v1, v2.  Reference vertex (0,0) maps
 * to v0, (1,0) to v1 and (0,1) to v2.
 */
class AffineMap {
public:
    AffineMap(Point v0, Point v1, Point v2)
        : origin_(v0)
    {
        jac_ = {v1.x - v0.x, v2.x - v0.x, v1.y - v0.y, v2.y - v0.y};
        det_ = jac_[0] * jac_[3] - jac_[1] * jac_[2];
        if (!(std::abs(det_) > 0.0) || !std::isfinite(det_))
            throw MeshError("degenerate triangle in affine map");
        inv_ = {jac_[3] / det_, -jac_[1] / det_, -jac_[2] / det_, jac_[0] / det_};
    }

    [[nodiscard]] double det() const { return det_; }
    [[nodiscard]] double abs_det() const { return std::abs(det_); }

    [[nodiscard]] Point to_physical(double xi, double eta) const
    {
        return {origin_.x + jac_[0] * xi + jac_[1] * eta, origin_.y + jac_[2] * xi + jac_[3] * eta};
    }

    [[nodiscard]] Point to_reference(Point p) const
    {
        const double dx = p.x - origin_.x;
        const double dy = p.y - origin_.y;
        return {inv_[0] * dx + inv_[1] * dy, inv_[2] * dx + inv_[3] * dy};
    }

    /// Physical gradient from a reference gradient: grad_x = J^{-T} grad_xi.
    [[nodiscard]] std::array<double, 2> gradient(double d_xi, double d_eta) const
    {
        return {inv_[0] * d_xi + inv_[2] * d_eta, inv_[1] * d_xi + inv_[3] * d_eta};
    }

    /// Physical Laplacian from the reference Hessian (h_xx, h_xy, h_yy).
    [[nodiscard]] double laplacian(double h_xx, double h_xy, double h_yy) const
    {
        // trace(G^T H G) = sum_ij H_ij (G G^T)_ij with G = J^{-1}
        const double m00 = inv_[0] * inv_[0] + inv_[1] * inv_[1];
        const double m01 = inv_[0] * inv_[2] + inv_[1] * inv_[3];
        const double m11 = inv_[2] * inv_[2] + inv_[3] * inv_[3];
        return h_xx * m00 + 2.0 * h_xy * m01 + h_yy * m11;
    }

private:
    Point origin_;
    std::array<double, 4> jac_{};  // row-major [dx/dxi dx/deta; dy/dxi dy/deta]
    std::array<double, 4> inv_{};
    double det_ = 0.0;
};

} // namespace hpfem
