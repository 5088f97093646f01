#include "hpfem/estimator.hpp"
#include "hpfem/mesh_io.hpp"
#include "hpfem/presets.hpp"
#include "hpfem/problem.hpp"
#include "hpfem/strategy.hpp"
#include "probes/probes.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace hpfem;

namespace {

std::shared_ptr<const Mesh> unit_triangle()
{
    return std::make_shared<const Mesh>(
        Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}));
}

// Coefficients of a polynomial of degree <= p on a single element, by collocation.
std::vector<double> collocate(const HpSpace& s, ElementId id, const ScalarFunction& f)
{
    const auto& dofs = s.element_space(id).dofs;
    const std::size_t n = dofs.size();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.05, 0.45);
    probes::DenseMatrix a(n, std::vector<double>(n));
    std::vector<double> rhs(n);
    const AffineMap map = s.mesh().affine_map(id);
    for (std::size_t i = 0; i < n; ++i) {
        const Point r{u(rng), u(rng)};
        const auto be = s.eval_basis(id, r);
        a[i] = be.values;
        rhs[i] = f(map.to_physical(r.x, r.y));
    }
    const auto c = probes::dense_solve(a, rhs);
    std::vector<double> coeffs(s.n_dof(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
        coeffs[dofs[k]] = c[k];
    return coeffs;
}

std::shared_ptr<Mesh> refined(std::string_view text, unsigned seed, int steps)
{
    auto m = std::make_shared<Mesh>(load_mesh(text));
    std::mt19937 rng(seed);
    std::bernoulli_distribution pick(0.3);
    for (int s = 0; s < steps; ++s) {
        std::vector<ElementId> mark;
        for (auto id : m->active_elements())
            if (pick(rng))
                mark.push_back(id);
        m->bisect(mark);
    }
    return m;
}

DegreeMap random_degrees(const Mesh& m, unsigned seed, int pmin, int pmax)
{
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> deg(pmin, pmax);
    DegreeMap d;
    for (auto id : m.active_elements())
        d[id] = deg(rng);
    return d;
}

} // namespace

TEST(Indicator, ZeroSolutionZeroLoad)
{
    const auto m = refined(presets::kSquareMesh, 1, 2);
    const HpSpace s(m, uniform_degrees(*m, 3));
    const std::vector<double> u(s.n_dof(), 0.0);
    const auto field = compute_indicators(s, u, [](Point) { return 0.0; });
    for (const auto& [id, e] : field.eta)
        EXPECT_EQ(e, 0.0);
    EXPECT_EQ(field.eta_global, 0.0);
}

TEST(Indicator, SingleElementHandValue)
{
    const auto m = unit_triangle();
    const HpSpace s(m, uniform_degrees(*m, 2));
    const auto u = collocate(s, 0, [](Point p) { return p.x * p.x; });
    // u reproduces x^2 away from the collocation points too
    const auto be = s.eval_basis(0, {0.7, 0.2});
    double v = 0.0;
    for (std::size_t k = 0; k < be.values.size(); ++k)
        v += u[s.element_space(0).dofs[k]] * be.values[k];
    ASSERT_NEAR(v, 0.49, 1e-13);

    // residual 1 + 2 = 3, (h/p)^2 = 2/4, |K| = 1/2
    EXPECT_NEAR(element_indicator(s, u, [](Point) { return 1.0; }, 0), 1.5, 1e-12);
    const auto field = compute_indicators(s, u, [](Point) { return 1.0; });
    EXPECT_NEAR(field.eta.at(0), 1.5, 1e-12);
}

TEST(Indicator, GlobalIndicator)
{
    EXPECT_DOUBLE_EQ(global_indicator(std::map<ElementId, double>{{0, 3.0}, {1, 4.0}}), 5.0);
    EXPECT_DOUBLE_EQ(global_indicator(std::map<ElementId, double>{{7, 0.25}}), 0.25);
    EXPECT_EQ(global_indicator(std::map<ElementId, double>{{0, 0.0}, {1, 0.0}}), 0.0);
}

TEST(Indicator, LinearSolutionHasNoResidual)
{
    const auto m = refined(presets::kLShapeMesh, 2, 3);
    const HpSpace s(m, random_degrees(*m, 2, 1, 4));
    const auto lin = [](Point p) { return 0.5 - p.x + 4.0 * p.y; };
    const auto zero = [](Point) { return 0.0; };
    const auto sol = solve_poisson(s, zero, lin, {.rel_tol = 1e-13});
    const auto field = compute_indicators(s, sol.u, zero);
    for (const auto& [id, e] : field.eta)
        EXPECT_NEAR(e, 0.0, 1e-9);
}

TEST(Indicator, FieldMatchesPerElementEvaluation)
{
    const auto m = refined(presets::kLShapeMesh, 5, 3);
    const HpSpace s(m, random_degrees(*m, 5, 1, 5));
    const auto f = [](Point p) { return std::sin(3 * p.x) + p.y; };
    const auto sol = solve_poisson(s, f, [](Point p) { return p.x * p.y; });
    const auto field = compute_indicators(s, sol.u, f);
    double sum = 0.0;
    for (const auto& [id, e] : field.eta) {
        EXPECT_GE(e, 0.0);
        EXPECT_NEAR(e, element_indicator(s, sol.u, f, id), 1e-12 * (1.0 + e));
        sum += e * e;
    }
    EXPECT_NEAR(field.eta_global * field.eta_global, sum, 1e-12 * sum);
}

TEST(Indicator, JumpTermIsSymmetric)
{
    const auto m = refined(presets::kSquareMesh, 6, 3);
    const HpSpace s(m, random_degrees(*m, 6, 1, 6));
    const auto f = [](Point p) { return p.x * p.x; };
    const auto sol = solve_poisson(s, f, [](Point) { return 0.0; });
    for (const auto& [edge, owners] : m->active_edges()) {
        if (owners.size() != 2)
            continue;
        const double a = detail::jump_term(s, sol.u, edge, owners[0], owners[1]);
        const double b = detail::jump_term(s, sol.u, edge, owners[1], owners[0]);
        EXPECT_NEAR(a, b, 1e-12 * (1.0 + a));
    }
}

TEST(Indicator, DecreasesUnderUniformRefinement)
{
    const Problem pr = presets::square_smooth();
    auto m = std::make_shared<Mesh>(pr.mesh);
    m->uniform_refine();
    double prev = 1e300;
    for (int step = 0; step < 4; ++step) {
        const HpSpace s(m, uniform_degrees(*m, 2));
        const auto sol = solve_poisson(s, pr.f, pr.g);
        const double eta = compute_indicators(s, sol.u, pr.f).eta_global;
        EXPECT_LT(eta, prev);
        prev = eta;
        auto next = std::make_shared<Mesh>(*m);
        next->uniform_refine();
        m = next;
    }
}

TEST(EnergyError, Examples)
{
    auto sq = std::make_shared<const Mesh>(load_mesh(presets::kSquareMesh));
    const HpSpace s(sq, uniform_degrees(*sq, 1));

    const std::vector<double> zero(s.n_dof(), 0.0);
    EXPECT_NEAR(energy_error(s, zero, [](Point) { return std::array<double, 2>{1.0, 0.0}; }), 1.0, 1e-14);

    std::vector<double> lin(s.n_dof());
    for (VertexId v = 0; v < sq->num_vertices(); ++v)
        lin[v] = 2.0 * sq->vertex(v).x - sq->vertex(v).y;
    EXPECT_NEAR(energy_error(s, lin, [](Point) { return std::array<double, 2>{2.0, -1.0}; }), 0.0, 1e-12);

    // u = x^2 against its p = 1 vertex interpolant
    std::vector<double> interp(s.n_dof());
    for (VertexId v = 0; v < sq->num_vertices(); ++v)
        interp[v] = sq->vertex(v).x * sq->vertex(v).x;
    const GradientFunction g = [](Point p) { return std::array<double, 2>{2.0 * p.x, 0.0}; };
    const double oracle = probes::fine_energy_norm(s, interp, g, 8);
    EXPECT_NEAR(energy_error(s, interp, g), oracle, 1e-12);
    EXPECT_NEAR(oracle, std::sqrt(1.0 / 3.0), 1e-12);  // int (2x - 1)^2 over the square
}

TEST(EnergyError, AgreesWithFineOracle)
{
    // gradient of degree <= 4: the 2p+6 rule is exact, so both must agree to rounding
    const auto u = [](Point p) { return p.x * p.x * p.y * p.y * p.y - 2.0 * p.x * p.y + std::pow(p.y, 4); };
    const GradientFunction grad = [](Point p) {
        return std::array<double, 2>{2.0 * p.x * std::pow(p.y, 3) - 2.0 * p.y,
                                     3.0 * p.x * p.x * p.y * p.y - 2.0 * p.x + 4.0 * std::pow(p.y, 3)};
    };
    const auto f = [](Point p) { return -(2.0 * std::pow(p.y, 3) + 6.0 * p.x * p.x * p.y + 12.0 * p.y * p.y); };
    for (auto text : {presets::kSquareMesh, presets::kLShapeMesh})
        for (unsigned seed = 1; seed <= 3; ++seed) {
            const auto m = refined(text, seed, 3);
            const HpSpace s(m, random_degrees(*m, seed, 1, 5));
            const auto sol = solve_poisson(s, f, u);
            EXPECT_NEAR(energy_error(s, sol.u, grad), probes::fine_energy_norm(s, sol.u, grad, 4), 1e-9);
        }
}

TEST(EnergyError, OracleGapVanishesOnSmoothAdaptiveRuns)
{
    // transcendental data: the gap is quadrature error and must shrink below 1e-9 as the run resolves u
    for (const auto& pr : {presets::square_smooth(), presets::lshape_smooth()}) {
        AdaptConfig cfg;
        cfg.max_iterations = 10;
        double last_gap = 1.0;
        adapt_loop(pr, cfg, [&](const IterationSnapshot& snap) {
            last_gap = std::abs(energy_error(snap.space, snap.solution.u, *pr.exact_gradient) -
                                probes::fine_energy_norm(snap.space, snap.solution.u, *pr.exact_gradient, 4));
        });
        EXPECT_LE(last_gap, 1e-9) << pr.name;
    }
}

TEST(EnergyError, EffectivityOnUniformSequence)
{
    const Problem pr = presets::lshape_smooth();
    auto m = std::make_shared<Mesh>(pr.mesh);
    for (int step = 0; step < 4; ++step) {
        const HpSpace s(m, uniform_degrees(*m, 3));
        const auto sol = solve_poisson(s, pr.f, pr.g);
        const double eta = compute_indicators(s, sol.u, pr.f).eta_global;
        const double err = energy_error(s, sol.u, *pr.exact_gradient);
        EXPECT_GE(eta / err, 0.1);
        EXPECT_LE(eta / err, 10.0);
        auto next = std::make_shared<Mesh>(*m);
        next->uniform_refine();
        m = next;
    }
}
