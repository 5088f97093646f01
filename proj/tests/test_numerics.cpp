#include "hpfem/projection.hpp"
#include "hpfem/quadrature.hpp"
#include "probes/probes.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hpfem;

namespace {

// Exact integral of xi^a eta^b over the reference triangle: a! b! / (a + b + 2)!
double monomial_integral(int a, int b)
{
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
}

double integrate(const QuadratureRule& r, int a, int b)
{
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
        s += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
    return s;
}

// Independent conical product rule on a physical triangle.
template <class F>
double integrate_physical(const std::array<Point, 3>& c, int n, F&& f)
{
    std::vector<double> x, w;
    probes::golub_welsch(n, x, w);
    const double det = std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[2].x - c[0].x) * (c[1].y - c[0].y));
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = x[static_cast<std::size_t>(i)];
            const double b = x[static_cast<std::size_t>(j)] * (1.0 - a);
            const double wt = w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - a) * det;
            const Point p{c[0].x + a * (c[1].x - c[0].x) + b * (c[2].x - c[0].x),
                          c[0].y + a * (c[1].y - c[0].y) + b * (c[2].y - c[0].y)};
            s += wt * f(p);
        }
    return s;
}

const std::array<Point, 3> kTri = {{{0.3, -0.2}, {1.4, 0.1}, {0.5, 0.9}}};

} // namespace

TEST(Quadrature, TriangleExamples)
{
    const auto& r = triangle_rule(3);
    EXPECT_NEAR(integrate(r, 0, 0), 0.5, 1e-15);
    EXPECT_NEAR(integrate(r, 1, 0), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(integrate(r, 2, 1), 1.0 / 60.0, 1e-15);
}

TEST(Quadrature, TriangleExactForAllMonomials)
{
    for (int deg : {0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 13, 18, 24, 31, 40, 55, 70}) {
        const auto& r = triangle_rule(deg);
        EXPECT_GE(r.degree, deg);
        double wsum = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) {
            wsum += r.weights[q];
            EXPECT_GT(r.weights[q], 0.0);
            EXPECT_GE(r.points[q].x, 0.0);
            EXPECT_GE(r.points[q].y, 0.0);
            EXPECT_LE(r.points[q].x + r.points[q].y, 1.0 + 1e-15);
        }
        EXPECT_NEAR(wsum, 0.5, 1e-14);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) {
                const double exact = monomial_integral(a, b);
                EXPECT_NEAR(integrate(r, a, b), exact, 1e-13 * exact) << "degree " << deg << " x^" << a << " y^" << b;
            }
    }
}

TEST(Quadrature, EdgeExamplesAndExactness)
{
    const auto& r = edge_rule(4);
    auto integ = [](const QuadratureRule& rule, int k) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            s += rule.weights[q] * std::pow(rule.points[q].x, k);
        return s;
    };
    EXPECT_NEAR(integ(r, 0), 1.0, 1e-15);
    EXPECT_NEAR(integ(r, 1), 0.5, 1e-15);
    EXPECT_NEAR(integ(r, 4), 0.2, 1e-15);
    for (int deg : {0, 1, 5, 9, 20, 41, 80, 120}) {
        const auto& rule = edge_rule(deg);
        for (int k = 0; k <= deg; ++k)
            EXPECT_NEAR(integ(rule, k), 1.0 / (k + 1.0), 1e-13 / (k + 1.0)) << deg << ' ' << k;
    }
}

TEST(Quadrature, UnsupportedDegreeThrows)
{
    EXPECT_THROW(triangle_rule(-1), std::invalid_argument);
    EXPECT_THROW(triangle_rule(kMaxQuadratureDegree + 1), std::invalid_argument);
    EXPECT_THROW(edge_rule(-3), std::invalid_argument);
    EXPECT_NO_THROW(triangle_rule(2 * 8 + 2));
}

TEST(Quadrature, CachedRulesAreStable)
{
    EXPECT_EQ(&triangle_rule(9), &triangle_rule(9));
    EXPECT_EQ(&edge_rule(9), &edge_rule(9));
}

TEST(Projection, ConstantAndLinearReproduction)
{
    const AffineMap map(kTri[0], kTri[1], kTri[2]);
    for (int q = 0; q <= 5; ++q) {
        const auto c = project_local([](Point) { return 2.5; }, map, q);
        EXPECT_NEAR(c({0.2, 0.3}), 2.5, 1e-13);
    }
    for (int q = 1; q <= 5; ++q) {
        const auto fx = project_local([](Point p) { return p.x; }, map, q);
        for (Point r : {Point{0.1, 0.1}, Point{0.6, 0.2}, Point{0.0, 1.0}})
            EXPECT_NEAR(fx(r), map.to_physical(r.x, r.y).x, 1e-13);
    }
    EXPECT_THROW(project_local([](Point) { return 1.0; }, map, -1), std::invalid_argument);
}

TEST(Projection, QuadraticOntoLinearMatchesMassSystem)
{
    // unit right triangle: x = xi, y = eta; basis {1, x, y}
    const AffineMap map({0, 0}, {1, 0}, {0, 1});
    const auto fq = project_local([](Point p) { return p.x * p.x; }, map, 1);

    const int e[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    probes::DenseMatrix mass(3, std::vector<double>(3));
    std::vector<double> rhs(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            mass[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                monomial_integral(e[i][0] + e[j][0], e[i][1] + e[j][1]);
        rhs[static_cast<std::size_t>(i)] = monomial_integral(e[i][0] + 2, e[i][1]);
    }
    const auto c = probes::dense_solve(mass, rhs);
    for (Point r : {Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{0.25, 0.4}})
        EXPECT_NEAR(fq(r), c[0] + c[1] * r.x + c[2] * r.y, 1e-13);
}

TEST(Projection, Idempotent)
{
    const AffineMap map(kTri[0], kTri[1], kTri[2]);
    const auto f = [](Point p) { return std::sin(3.0 * p.x) * std::exp(p.y); };
    for (int q = 0; q <= 6; ++q) {
        const auto once = project_local(f, map, q);
        const auto twice = project_local([&](Point p) { return once(map.to_reference(p)); }, map, q);
        for (Point r : {Point{0.1, 0.2}, Point{0.7, 0.1}, Point{0.3, 0.6}})
            EXPECT_NEAR(twice(r), once(r), 1e-12);
    }
}

TEST(Projection, Orthogonality)
{
    const AffineMap map(kTri[0], kTri[1], kTri[2]);
    // degree 4, so the projection rule integrates f times any test polynomial exactly
    const auto f = [](Point p) { return p.x * p.y * p.y + std::pow(p.x, 4) - 3.0 * p.x * p.x * p.y * p.y + p.y; };
    for (int q = 0; q <= 6; ++q) {
        const auto fq = project_local(f, map, q);
        const double scale = std::sqrt(integrate_physical(kTri, 20, [&](Point p) { return f(p) * f(p); }));
        for (int a = 0; a <= q; ++a)
            for (int b = 0; a + b <= q; ++b) {
                const double s = integrate_physical(kTri, 20, [&](Point p) {
                    return (f(p) - fq(map.to_reference(p))) * std::pow(p.x, a) * std::pow(p.y, b);
                });
                EXPECT_NEAR(s, 0.0, 1e-10 * scale) << "q " << q << " x^" << a << " y^" << b;
            }
    }
}
