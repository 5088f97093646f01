#pragma once

#include "hpfem/basis.hpp"
#include "hpfem/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hpfem {

/// Polynomial of total degree <= q on one element, in the complete hierarchical basis.
class LocalPolynomial {
public:
    LocalPolynomial(int degree, Eigen::VectorXd coefficients)
        : degree_(degree), coefficients_(std::move(coefficients))
    {}

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coefficients_; }

    /// Value at reference coordinates of the element.
    [[nodiscard]] double operator()(Point ref) const
    {
        if (degree_ == 0)
            return coefficients_(0);
        thread_local std::vector<Jet> shapes;
        evaluate_shapes(ShapeLayout::complete(degree_), ref.x, ref.y, shapes);
        double s = 0.0;
        for (std::size_t k = 0; k < shapes.size(); ++k)
            s += coefficients_(static_cast<Eigen::Index>(k)) * shapes[k].v;
        return s;
    }

private:
    int degree_;
    Eigen::VectorXd coefficients_;
};

/// L2(K) projection of f onto polynomials of total degree <= q.
inline LocalPolynomial project_local(const ScalarFunction& f, const AffineMap& map, int q)
{
    if (q < 0)
        throw std::invalid_argument("projection degree must be >= 0");
    const auto& rule = triangle_rule(2 * q + 4);
    const double jac = map.abs_det();

    if (q == 0) {
        double integral = 0.0;
        double measure = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const Point ref = rule.points[i];
            integral += rule.weights[i] * jac * f(map.to_physical(ref.x, ref.y));
            measure += rule.weights[i] * jac;
        }
        return LocalPolynomial(0, Eigen::VectorXd::Constant(1, integral / measure));
    }

    const ShapeLayout layout = ShapeLayout::complete(q);
    const auto n = static_cast<Eigen::Index>(layout.size());
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<Jet> shapes;
    Eigen::VectorXd phi(n);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Point ref = rule.points[i];
        const double w = rule.weights[i] * jac;
        evaluate_shapes(layout, ref.x, ref.y, shapes);
        for (Eigen::Index k = 0; k < n; ++k)
            phi(k) = shapes[static_cast<std::size_t>(k)].v;
        mass.selfadjointView<Eigen::Lower>().rankUpdate(phi, w);
        rhs += (w * f(map.to_physical(ref.x, ref.y))) * phi;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(mass.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
        throw SolverError("singular local mass matrix (corrupt element geometry)");
    return LocalPolynomial(q, llt.solve(rhs));
}

} // namespace hpfem
