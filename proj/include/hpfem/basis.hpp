#pragma once

#include "hpfem/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace hpfem {

/// Value, gradient and Hessian of a function of the two reference coordinates.
struct Jet {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxx = 0.0;
    double dxy = 0.0;
    double dyy = 0.0;

    static Jet constant(double c) { return {c, 0, 0, 0, 0, 0}; }
    static Jet affine(double c, double gx, double gy) { return {c, gx, gy, 0, 0, 0}; }
};

inline Jet operator+(const Jet& a, const Jet& b)
{
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}

inline Jet operator-(const Jet& a, const Jet& b)
{
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}

inline Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy}; }

inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

/**
 * Scaled Jacobi polynomials t^n P_n^{(alpha,beta)}(x / t), n = 0..order, as
 * jets.  They are polynomials in (x, t); t = 1 gives the ordinary family.
 */
inline void scaled_jacobi_jets(const Jet& x, const Jet& t, int order, double alpha, double beta, std::vector<Jet>& out)
{
    out.resize(static_cast<std::size_t>(std::max(order + 1, 0)));
    if (order < 0)
        return;
    out[0] = Jet::constant(1.0);
    if (order == 0)
        return;
    out[1] = (0.5 * (alpha + beta + 2.0)) * x + (0.5 * (alpha - beta)) * t;
    const Jet t2 = t * t;
    for (int n = 2; n <= order; ++n) {
        const double s = 2.0 * n + alpha + beta;
        const double a1 = 2.0 * n * (n + alpha + beta) * (s - 2.0);
        const double a2 = (s - 1.0) * (alpha * alpha - beta * beta);
        const double a3 = (s - 2.0) * (s - 1.0) * s;
        const double a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * s;
        const auto nu = static_cast<std::size_t>(n);
        out[nu] = (1.0 / a1) * ((a3 * x + a2 * t) * out[nu - 1] - a4 * (t2 * out[nu - 2]));
    }
}

/// Trace parameterization of edge function k (k = 2..q) at edge coordinate s in [0,1].
inline void edge_trace_values(double s, int q, std::vector<double>& out)
{
    std::vector<Jet> poly;
    scaled_jacobi_jets(Jet::constant(2.0 * s - 1.0), Jet::constant(1.0), q - 2, 1.0, 1.0, poly);
    out.resize(static_cast<std::size_t>(std::max(q - 1, 0)));
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = s * (1.0 - s) * poly[k].v;
}

/**
 * Local layout of hierarchical shape functions on one triangle.
 *
 * Order: three vertex hats, then for local edges 0, 1, 2 the edge functions of
 * degree 2..edge_degree, then interior bubbles.  An edge function is oriented
 * from the edge endpoint with the smaller global vertex id, recorded in
 * `edge_flip` (false: local order kLocalEdgeVertices is already ascending).
 */
struct ShapeLayout {
    int degree = 1;
    std::array<int, 3> edge_degree{1, 1, 1};
    std::array<bool, 3> edge_flip{false, false, false};

    [[nodiscard]] static std::size_t bubble_count(int p)
    {
        return p >= 3 ? static_cast<std::size_t>((p - 1) * (p - 2) / 2) : 0U;
    }

    [[nodiscard]] std::size_t edge_offset(int e) const
    {
        std::size_t off = 3;
        for (int k = 0; k < e; ++k)
            off += static_cast<std::size_t>(edge_degree[static_cast<std::size_t>(k)] - 1);
        return off;
    }

    [[nodiscard]] std::size_t bubble_offset() const { return edge_offset(3); }
    [[nodiscard]] std::size_t size() const { return bubble_offset() + bubble_count(degree); }

    /// Full P_q layout with every edge at degree q, in local orientation.
    static ShapeLayout complete(int q) { return {q, {q, q, q}, {false, false, false}}; }
};

/// Evaluate every shape of `layout` at reference point (xi, eta).
inline void evaluate_shapes(const ShapeLayout& layout, double xi, double eta, std::vector<Jet>& out)
{
    out.resize(layout.size());
    const std::array<Jet, 3> lam = {Jet::affine(1.0 - xi - eta, -1.0, -1.0), Jet::affine(xi, 1.0, 0.0),
                                    Jet::affine(eta, 0.0, 1.0)};
    out[0] = lam[0];
    out[1] = lam[1];
    out[2] = lam[2];

    thread_local std::vector<Jet> poly;
    thread_local std::vector<Jet> poly2;
    // edge e, oriented s -> t: lambda_s lambda_t (lambda_s + lambda_t)^k P_k^{(1,1)}((lambda_t - lambda_s) / (lambda_s + lambda_t))
    for (int e = 0; e < 3; ++e) {
        const int q = layout.edge_degree[static_cast<std::size_t>(e)];
        if (q < 2)
            continue;
        auto s = static_cast<std::size_t>(kLocalEdgeVertices[static_cast<std::size_t>(e)][0]);
        auto t = static_cast<std::size_t>(kLocalEdgeVertices[static_cast<std::size_t>(e)][1]);
        if (layout.edge_flip[static_cast<std::size_t>(e)])
            std::swap(s, t);
        const Jet kernel = lam[s] * lam[t];
        scaled_jacobi_jets(lam[t] - lam[s], lam[s] + lam[t], q - 2, 1.0, 1.0, poly);
        const std::size_t off = layout.edge_offset(e);
        for (int k = 0; k <= q - 2; ++k)
            out[off + static_cast<std::size_t>(k)] = kernel * poly[static_cast<std::size_t>(k)];
    }

    // bubbles: lambda_0 lambda_1 lambda_2 * scaled P_a^{(2,2)}(lambda_1 - lambda_0; lambda_0 + lambda_1) * P_b^{(2a+5,2)}(2 lambda_2 - 1)
    const int p = layout.degree;
    if (p >= 3) {
        const Jet bubble = lam[0] * lam[1] * lam[2];
        const Jet one = Jet::constant(1.0);
        const Jet radial = 2.0 * lam[2] - one;
        scaled_jacobi_jets(lam[1] - lam[0], lam[0] + lam[1], p - 3, 2.0, 2.0, poly);
        std::size_t idx = layout.bubble_offset();
        for (int a = 0; a <= p - 3; ++a) {
            scaled_jacobi_jets(radial, one, p - 3 - a, 2.0 * a + 5.0, 2.0, poly2);
            const Jet lead = bubble * poly[static_cast<std::size_t>(a)];
            for (int b = 0; b <= p - 3 - a; ++b)
                out[idx++] = lead * poly2[static_cast<std::size_t>(b)];
        }
    }
}

} // namespace hpfem
