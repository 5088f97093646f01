#pragma once

// Independent oracles for the test suites.  These deliberately avoid the
// library's quadrature, assembly and solver code paths: Gauss nodes come from
// Golub-Welsch, linear solves from plain Gaussian elimination, and conformity
// from an exhaustive geometric audit.

#include "hpfem/mesh.hpp"
#include "hpfem/space.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hpfem::probes {

using DenseMatrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b)
{
    const std::size_t n = b.size();
    if (a.size() != n)
        throw std::invalid_argument("dense_solve: size mismatch");
    if (n > 500)
        throw std::invalid_argument("dense_solve: oracle limited to n <= 500");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k]))
                piv = i;
        if (a[piv][k] == 0.0)
            throw std::runtime_error("dense_solve: singular matrix");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            if (f == 0.0)
                continue;
            for (std::size_t j = k; j < n; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

/**
 * Exhaustive edge audit: every edge of an active element is either shared by
 * exactly one other active element with the same endpoints, or lies on the
 * domain boundary; and no active vertex sits strictly inside an active edge.
 */
inline bool brute_conformity(const Mesh& mesh, std::optional<std::vector<ElementId>> active = std::nullopt)
{
    const std::vector<ElementId> ids = active ? *active : mesh.active_elements();
    std::map<std::pair<VertexId, VertexId>, int> count;
    std::vector<bool> used(mesh.num_vertices(), false);
    for (auto id : ids)
        for (int e = 0; e < 3; ++e) {
            const auto& v = mesh.element(id).vertex_ids;
            VertexId a = v[static_cast<std::size_t>(e)];
            VertexId b = v[static_cast<std::size_t>((e + 1) % 3)];
            if (a > b)
                std::swap(a, b);
            ++count[{a, b}];
            used[a] = used[b] = true;
        }
    for (const auto& [edge, c] : count) {
        if (c > 2)
            return false;
        if (c == 1 && !mesh.boundary_marker(make_edge(edge.first, edge.second)))
            return false;
        const Point a = mesh.vertex(edge.first);
        const Point b = mesh.vertex(edge.second);
        const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
        for (VertexId v = 0; v < mesh.num_vertices(); ++v) {
            if (!used[v] || v == edge.first || v == edge.second)
                continue;
            const Point p = mesh.vertex(v);
            const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            const double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / len2;
            if (std::abs(cross) <= 1e-12 * len2 && t > 1e-12 && t < 1.0 - 1e-12)
                return false;
        }
    }
    return true;
}

/// Gauss-Legendre on [0,1] from the eigen-decomposition of the Jacobi matrix.
inline void golub_welsch(int n, std::vector<double>& x, std::vector<double>& w)
{
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jm(k, k - 1) = beta;
        jm(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    x.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = 0.5 * (es.eigenvalues()(i) + 1.0);
        const double v0 = es.eigenvectors()(0, i);
        w[static_cast<std::size_t>(i)] = v0 * v0;  // 2 v0^2 on [-1,1], halved
    }
}

/**
 * Energy norm of (u_exact - u_hp) by splitting every element into four
 * congruent pieces and integrating each with a Golub-Welsch conical product of
 * degree 2 p_K + 6 + boost.  The discrete gradient comes from
 * HpSpace::eval_basis; the geometry is recomputed here from the corners.
 */
inline double fine_energy_norm(const HpSpace& space, std::span<const double> u, const GradientFunction& grad_exact,
                               int degree_boost)
{
    if (degree_boost < 4)
        throw std::invalid_argument("fine_energy_norm: boost must be >= 4");
    const Mesh& mesh = space.mesh();
    double total = 0.0;
    for (auto id : space.active_elements()) {
        const auto c = mesh.corners(id);
        const double j00 = c[1].x - c[0].x, j01 = c[2].x - c[0].x;
        const double j10 = c[1].y - c[0].y, j11 = c[2].y - c[0].y;
        const double det = j00 * j11 - j01 * j10;
        const auto& dofs = space.element_space(id).dofs;

        const int degree = 2 * space.degree(id) + 6 + degree_boost;
        const int n = degree / 2 + 2;
        std::vector<double> gx, gw;
        golub_welsch(n, gx, gw);

        // midpoint subdivision of the reference triangle
        const std::array<std::array<Point, 3>, 4> subs = {{{{{0, 0}, {0.5, 0}, {0, 0.5}}},
                                                           {{{0.5, 0}, {1, 0}, {0.5, 0.5}}},
                                                           {{{0, 0.5}, {0.5, 0.5}, {0, 1}}},
                                                           {{{0.5, 0.5}, {0, 0.5}, {0.5, 0}}}}};
        double local = 0.0;
        for (const auto& s : subs) {
            const double sub_det = std::abs((s[1].x - s[0].x) * (s[2].y - s[0].y) - (s[2].x - s[0].x) * (s[1].y - s[0].y));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double a = gx[static_cast<std::size_t>(i)];
                    const double b = gx[static_cast<std::size_t>(j)] * (1.0 - a);
                    const double w = gw[static_cast<std::size_t>(i)] * gw[static_cast<std::size_t>(j)] * (1.0 - a) * sub_det;
                    const Point ref{s[0].x + a * (s[1].x - s[0].x) + b * (s[2].x - s[0].x),
                                    s[0].y + a * (s[1].y - s[0].y) + b * (s[2].y - s[0].y)};
                    const BasisEval be = space.eval_basis(id, ref);
                    double dxi = 0.0, deta = 0.0;
                    for (std::size_t k = 0; k < dofs.size(); ++k) {
                        dxi += u[dofs[k]] * be.gradients[k][0];
                        deta += u[dofs[k]] * be.gradients[k][1];
                    }
                    // grad_x = J^{-T} grad_ref
                    const double ux = (j11 * dxi - j10 * deta) / det;
                    const double uy = (-j01 * dxi + j00 * deta) / det;
                    const Point x{c[0].x + j00 * ref.x + j01 * ref.y, c[0].y + j10 * ref.x + j11 * ref.y};
                    const auto ge = grad_exact(x);
                    local += w * ((ge[0] - ux) * (ge[0] - ux) + (ge[1] - uy) * (ge[1] - uy));
                }
        }
        total += local * std::abs(det);
    }
    return std::sqrt(total);
}

} // namespace hpfem::probes
