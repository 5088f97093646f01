#pragma once

#include "hpfem/sparse.hpp"
#include "hpfem/space.hpp"

#include <vector>

namespace hpfem {

/// Linear system over a subset of the global unknowns.
struct SparseSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<std::size_t> free_dofs;  ///< global index of each row/unknown

    [[nodiscard]] std::size_t size() const { return rhs.size(); }
};

/**
 * Stiffness matrix a(phi_j, phi_i) and load vector (f, phi_i) over all global
 * basis functions.  Stiffness uses a rule of degree 2 p_K, the load 2 p_K + 4.
 */
inline SparseSystem assemble(const HpSpace& space, const ScalarFunction& f)
{
    const Mesh& mesh = space.mesh();
    const std::size_t n = space.n_dof();
    SparseBuilder builder(n, n);
    std::vector<double> rhs(n, 0.0);

    std::vector<Jet> shapes;
    std::vector<std::array<double, 2>> grads;
    std::vector<double> local;
    for (auto id : space.active_elements()) {
        const auto& es = space.element_space(id);
        const AffineMap map = mesh.affine_map(id);
        const double jac = map.abs_det();
        const std::size_t m = es.dofs.size();
        const int p = es.layout.degree;

        local.assign(m * m, 0.0);
        const auto& krule = triangle_rule(2 * p);
        grads.resize(m);
        for (std::size_t q = 0; q < krule.size(); ++q) {
            const Point ref = krule.points[q];
            evaluate_shapes(es.layout, ref.x, ref.y, shapes);
            for (std::size_t k = 0; k < m; ++k)
                grads[k] = map.gradient(shapes[k].dx, shapes[k].dy);
            const double w = krule.weights[q] * jac;
            for (std::size_t i = 0; i < m; ++i) {
                const double gx = w * grads[i][0];
                const double gy = w * grads[i][1];
                for (std::size_t j = 0; j <= i; ++j)
                    local[i * m + j] += gx * grads[j][0] + gy * grads[j][1];
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                builder.add(es.dofs[i], es.dofs[j], local[i * m + j]);
                if (j != i)
                    builder.add(es.dofs[j], es.dofs[i], local[i * m + j]);
            }

        const auto& lrule = triangle_rule(2 * p + 4);
        for (std::size_t q = 0; q < lrule.size(); ++q) {
            const Point ref = lrule.points[q];
            const double fw = lrule.weights[q] * jac * f(map.to_physical(ref.x, ref.y));
            if (fw == 0.0)
                continue;
            evaluate_shapes(es.layout, ref.x, ref.y, shapes);
            for (std::size_t k = 0; k < m; ++k)
                rhs[es.dofs[k]] += fw * shapes[k].v;
        }
    }

    SparseSystem sys{builder.finalize(), std::move(rhs), {}};
    sys.free_dofs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sys.free_dofs[i] = i;
    return sys;
}

/**
 * Eliminate the Dirichlet unknowns of a full system.  `g_values` is ordered
 * like `space.dirichlet_dofs()`; their couplings move to the right-hand side.
 */
inline SparseSystem apply_dirichlet(const SparseSystem& full, const HpSpace& space, std::span<const double> g_values)
{
    const auto& constrained = space.dirichlet_dofs();
    if (g_values.size() != constrained.size())
        throw std::invalid_argument("Dirichlet value count does not match constrained DOFs");
    if (full.size() != space.n_dof() || full.free_dofs.size() != space.n_dof())
        throw std::invalid_argument("apply_dirichlet expects the full assembled system");

    const std::size_t n = full.size();
    std::vector<double> fixed(n, 0.0);
    std::vector<bool> is_fixed(n, false);
    for (std::size_t k = 0; k < constrained.size(); ++k) {
        is_fixed[constrained[k]] = true;
        fixed[constrained[k]] = g_values[k];
    }

    std::vector<std::size_t> reduced_index(n, HpSpace::npos);
    SparseSystem out;
    for (std::size_t i = 0; i < n; ++i)
        if (!is_fixed[i]) {
            reduced_index[i] = out.free_dofs.size();
            out.free_dofs.push_back(i);
        }

    const std::size_t nf = out.free_dofs.size();
    CsrMatrix& a = out.matrix;
    a.rows = nf;
    a.cols = nf;
    a.row_ptr.assign(nf + 1, 0);
    out.rhs.assign(nf, 0.0);
    const CsrMatrix& m = full.matrix;
    for (std::size_t r = 0; r < nf; ++r) {
        const std::size_t i = out.free_dofs[r];
        double b = full.rhs[i];
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            const std::size_t j = m.col[k];
            if (is_fixed[j]) {
                b -= m.val[k] * fixed[j];
            } else {
                a.col.push_back(reduced_index[j]);
                a.val.push_back(m.val[k]);
            }
        }
        out.rhs[r] = b;
        a.row_ptr[r + 1] = a.col.size();
    }
    return out;
}

/// Scatter a reduced solution and the Dirichlet values into a full coefficient vector.
inline std::vector<double> expand_solution(const HpSpace& space, const SparseSystem& reduced,
                                           std::span<const double> x, std::span<const double> g_values)
{
    std::vector<double> u(space.n_dof(), 0.0);
    for (std::size_t r = 0; r < reduced.free_dofs.size(); ++r)
        u[reduced.free_dofs[r]] = x[r];
    const auto& constrained = space.dirichlet_dofs();
    for (std::size_t k = 0; k < constrained.size(); ++k)
        u[constrained[k]] = g_values[k];
    return u;
}

} // namespace hpfem
