#pragma once

#include "hpfem/projection.hpp"
#include "hpfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>

namespace hpfem {

/// Per-element indicators eta_K and the global eta = sqrt(sum eta_K^2).
struct IndicatorField {
    std::map<ElementId, double> eta;
    double eta_global = 0.0;
};

inline double global_indicator(const std::map<ElementId, double>& eta)
{
    double s = 0.0;
    for (const auto& [id, e] : eta)
        s += e * e;
    return std::sqrt(s);
}

inline double global_indicator(const IndicatorField& field) { return global_indicator(field.eta); }

namespace detail {

// (h_K / p_K)^2 || f_{p_K - 1} + Laplacian(u_hp) ||^2_{L2(K)}
inline double volume_residual_sq(const HpSpace& space, std::span<const double> u, const ScalarFunction& f, ElementId id)
{
    const Mesh& mesh = space.mesh();
    const AffineMap map = mesh.affine_map(id);
    const int p = space.degree(id);
    const LocalPolynomial fp = project_local(f, map, p - 1);
    const auto& rule = triangle_rule(2 * p);
    std::vector<Jet> scratch;
    double norm_sq = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point ref = rule.points[q];
        const double r = fp(ref) + evaluate_solution(space, u, id, map, ref, scratch).laplacian;
        norm_sq += rule.weights[q] * r * r;
    }
    norm_sq *= map.abs_det();
    const double h = mesh.diameter(id);
    return (h * h) / (p * p) * norm_sq;
}

// h_f / (2 p_f) || [du/dn] ||^2_{L2(f)} for an interior edge with owners k1, k2.
inline double jump_term(const HpSpace& space, std::span<const double> u, EdgeKey edge, ElementId k1, ElementId k2)
{
    const Mesh& mesh = space.mesh();
    const Point a = mesh.vertex(edge.first);
    const Point b = mesh.vertex(edge.second);
    const double len = distance(a, b);
    const std::array<double, 2> normal = {(b.y - a.y) / len, -(b.x - a.x) / len};
    const int pf = std::max(space.degree(k1), space.degree(k2));
    const AffineMap m1 = mesh.affine_map(k1);
    const AffineMap m2 = mesh.affine_map(k2);
    const auto& rule = edge_rule(2 * pf + 2);
    std::vector<Jet> scratch;
    double jump_sq = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q].x;
        const Point x{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        const auto g1 = evaluate_solution(space, u, k1, m1, m1.to_reference(x), scratch).gradient;
        const auto g2 = evaluate_solution(space, u, k2, m2, m2.to_reference(x), scratch).gradient;
        const double jump = (g1[0] - g2[0]) * normal[0] + (g1[1] - g2[1]) * normal[1];
        jump_sq += rule.weights[q] * jump * jump;
    }
    jump_sq *= len;
    return len / (2.0 * pf) * jump_sq;
}

} // namespace detail

/**
 * Residual indicator of one element:
 *   eta_K^2 = (h_K/p_K)^2 ||f_{p_K-1} + Lap u||^2_K + sum_{interior f in dK} h_f/(2 p_f) ||[du/dn]||^2_f
 * with f_{p_K-1} the L2(K) projection of f and p_f the larger adjacent degree.
 */
inline double element_indicator(const HpSpace& space, std::span<const double> u, const ScalarFunction& f, ElementId id)
{
    const Mesh& mesh = space.mesh();
    double eta_sq = detail::volume_residual_sq(space, u, f, id);
    for (int e = 0; e < 3; ++e) {
        const EdgeKey edge = mesh.local_edge(id, e);
        const auto owners = mesh.elements_on_edge(edge);
        if (owners.size() != 2)
            continue;
        const ElementId other = owners[0] == id ? owners[1] : owners[0];
        eta_sq += detail::jump_term(space, u, edge, id, other);
    }
    return std::sqrt(eta_sq);
}

/// All element indicators; each interior edge term is computed once and credited to both owners.
inline IndicatorField compute_indicators(const HpSpace& space, std::span<const double> u, const ScalarFunction& f)
{
    std::map<ElementId, double> eta_sq;
    for (auto id : space.active_elements())
        eta_sq.emplace_hint(eta_sq.end(), id, detail::volume_residual_sq(space, u, f, id));
    for (const auto& [edge, owners] : space.mesh().active_edges()) {
        if (owners.size() != 2)
            continue;
        const double term = detail::jump_term(space, u, edge, owners[0], owners[1]);
        eta_sq[owners[0]] += term;
        eta_sq[owners[1]] += term;
    }
    IndicatorField field;
    for (const auto& [id, s] : eta_sq)
        field.eta.emplace_hint(field.eta.end(), id, std::sqrt(s));
    field.eta_global = global_indicator(field.eta);
    return field;
}

/// ||grad(u - u_hp)||_{L2}, per-element rule of degree 2 p_K + 6.
inline double energy_error(const HpSpace& space, std::span<const double> u, const GradientFunction& grad_exact)
{
    const Mesh& mesh = space.mesh();
    std::vector<Jet> scratch;
    double total = 0.0;
    for (auto id : space.active_elements()) {
        const AffineMap map = mesh.affine_map(id);
        const auto& rule = triangle_rule(2 * space.degree(id) + 6);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point ref = rule.points[q];
            const auto gh = evaluate_solution(space, u, id, map, ref, scratch).gradient;
            const auto ge = grad_exact(map.to_physical(ref.x, ref.y));
            const double dx = ge[0] - gh[0];
            const double dy = ge[1] - gh[1];
            local += rule.weights[q] * (dx * dx + dy * dy);
        }
        total += local * map.abs_det();
    }
    return std::sqrt(total);
}

} // namespace hpfem
