#pragma once

#include "hpfem/geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpfem {

/// Points and weights on a reference domain (unit triangle or [0,1]).
struct QuadratureRule {
    std::vector<Point> points;  ///< for edge rules only .x is used
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxQuadratureDegree = 120;

namespace detail {

/// n-point Gauss-Legendre nodes and weights on [0, 1], Newton on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        auto legendre = [n](double t, double& value, double& derivative) {
            double p0 = 1.0;
            double p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            value = p1;
            derivative = n * (t * p1 - p0) / (t * t - 1.0);
        };
        double p = 0.0;
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        legendre(x, p, dp);
        const auto idx = static_cast<std::size_t>(n - 1 - i);
        nodes[idx] = 0.5 * (x + 1.0);
        weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled by 1/2
    }
}

inline QuadratureRule make_edge_rule(int degree)
{
    const int n = degree / 2 + 1;
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        rule.points.push_back({x[static_cast<std::size_t>(i)], 0.0});
        rule.weights.push_back(w[static_cast<std::size_t>(i)]);
    }
    return rule;
}

// Collapsed (Duffy) product: xi = u, eta = v (1 - u), Jacobian (1 - u).
inline QuadratureRule make_triangle_rule(int degree)
{
    const int n = (degree + 3) / 2;
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        const double u = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double v = x[static_cast<std::size_t>(j)];
            rule.points.push_back({u, v * (1.0 - u)});
            rule.weights.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - u));
        }
    }
    return rule;
}

template <class Factory>
const QuadratureRule& cached_rule(std::map<int, QuadratureRule>& cache, std::mutex& mutex, int degree,
                                  Factory&& make)
{
    if (degree < 0 || degree > kMaxQuadratureDegree)
        throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree));
    std::lock_guard lock(mutex);
    auto it = cache.find(degree);
    if (it == cache.end())
        it = cache.emplace(degree, make(degree)).first;
    return it->second;
}

} // namespace detail

/// Rule on the unit triangle, exact for total degree <= `degree`.
inline const QuadratureRule& triangle_rule(int degree)
{
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    return detail::cached_rule(cache, mutex, degree, detail::make_triangle_rule);
}

/// Gauss rule on [0, 1], exact for degree <= `degree`.
inline const QuadratureRule& edge_rule(int degree)
{
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    return detail::cached_rule(cache, mutex, degree, detail::make_edge_rule);
}

} // namespace hpfem
