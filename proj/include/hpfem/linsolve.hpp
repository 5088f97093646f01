#pragma once

#include "hpfem/assembly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace hpfem {

/// Block Jacobi preconditioner: z = blockdiag(A)^{-1} r with Cholesky-factorized blocks.
class BlockJacobiPreconditioner {
public:
    struct Block {
        std::vector<std::size_t> indices;
        Eigen::LLT<Eigen::MatrixXd> factor;
    };

    BlockJacobiPreconditioner() = default;

    /// Blocks are index sets into the rows of `matrix`; together they must partition them.
    BlockJacobiPreconditioner(const CsrMatrix& matrix, std::vector<std::vector<std::size_t>> index_sets)
    {
        std::vector<int> seen(matrix.rows, 0);
        blocks_.reserve(index_sets.size());
        for (auto& idx : index_sets) {
            if (idx.empty())
                continue;
            const auto n = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd sub(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                const std::size_t i = idx[static_cast<std::size_t>(r)];
                if (i >= matrix.rows || seen[i]++ != 0)
                    throw SolverError("preconditioner blocks do not partition the unknowns");
                for (Eigen::Index c = 0; c < n; ++c)
                    sub(r, c) = matrix.at(i, idx[static_cast<std::size_t>(c)]);
            }
            Block b{std::move(idx), Eigen::LLT<Eigen::MatrixXd>(sub)};
            if (b.factor.info() != Eigen::Success)
                throw SolverError("preconditioner block is not symmetric positive definite");
            blocks_.push_back(std::move(b));
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw SolverError("preconditioner blocks do not cover every unknown");
    }

    [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }

    void apply(std::span<const double> r, std::span<double> z) const
    {
        Eigen::VectorXd local;
        for (const auto& b : blocks_) {
            const auto n = static_cast<Eigen::Index>(b.indices.size());
            if (n == 1) {
                const std::size_t i = b.indices[0];
                const double l = b.factor.matrixLLT()(0, 0);
                z[i] = r[i] / (l * l);
                continue;
            }
            local.resize(n);
            for (Eigen::Index k = 0; k < n; ++k)
                local(k) = r[b.indices[static_cast<std::size_t>(k)]];
            b.factor.solveInPlace(local);
            for (Eigen::Index k = 0; k < n; ++k)
                z[b.indices[static_cast<std::size_t>(k)]] = local(k);
        }
    }

private:
    std::vector<Block> blocks_;
};

/// Entity blocks of the space (vertex, edge, element interior) restricted to the free unknowns.
inline BlockJacobiPreconditioner build_preconditioner(const SparseSystem& system, const HpSpace& space)
{
    std::vector<std::size_t> reduced(space.n_dof(), HpSpace::npos);
    for (std::size_t r = 0; r < system.free_dofs.size(); ++r)
        reduced.at(system.free_dofs[r]) = r;
    std::vector<std::vector<std::size_t>> sets;
    for (auto& block : space.entity_blocks()) {
        std::vector<std::size_t> s;
        for (auto g : block)
            if (reduced[g] != HpSpace::npos)
                s.push_back(reduced[g]);
        if (!s.empty())
            sets.push_back(std::move(s));
    }
    return {system.matrix, std::move(sets)};
}

/// One singleton block per unknown (point Jacobi).
inline BlockJacobiPreconditioner point_jacobi(const CsrMatrix& matrix)
{
    std::vector<std::vector<std::size_t>> sets(matrix.rows);
    for (std::size_t i = 0; i < matrix.rows; ++i)
        sets[i] = {i};
    return {matrix, std::move(sets)};
}

struct PcgSettings {
    double rel_tol = 1e-10;
    /// 0 selects 10 n + 100.
    std::size_t max_iter = 0;
};

struct PcgResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

using PcgObserver = std::function<void(std::size_t iteration, std::span<const double> x)>;

/**
 * Preconditioned conjugate gradients from a zero initial guess.  Stops when
 * ||b - A x|| <= rel_tol ||b|| (checked against the true residual) or
 * after max_iter steps; the latter is reported through `converged`.
 */
inline PcgResult pcg(const CsrMatrix& a, std::span<const double> b, const BlockJacobiPreconditioner& precond,
                     PcgSettings settings = {}, const PcgObserver& observer = {})
{
    const std::size_t n = b.size();
    if (a.rows != n || a.cols != n)
        throw std::invalid_argument("pcg: matrix and right-hand side sizes differ");
    if (!(settings.rel_tol > 0.0 && settings.rel_tol < 1.0))
        throw std::invalid_argument("pcg: rel_tol must lie in (0, 1)");
    const std::size_t max_iter = settings.max_iter == 0 ? 10 * n + 100 : settings.max_iter;

    PcgResult res;
    res.x.assign(n, 0.0);
    auto dot = [](std::span<const double> u, std::span<const double> v) {
        return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    };
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), ap(n);
    precond.apply(r, z);
    p = z;
    double rz = dot(r, z);
    double rnorm = bnorm;
    while (res.iterations < max_iter) {
        a.multiply(p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0))
            throw SolverError("pcg: non-positive curvature, matrix is not SPD");
        const double alpha = rz / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ++res.iterations;
        if (observer)
            observer(res.iterations, res.x);
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= settings.rel_tol * bnorm) {
            // confirm with the true residual; restart from it if the recurrence drifted
            a.multiply(res.x, ap);
            for (std::size_t i = 0; i < n; ++i)
                r[i] = b[i] - ap[i];
            rnorm = std::sqrt(dot(r, r));
            if (rnorm <= settings.rel_tol * bnorm)
                break;
            precond.apply(r, z);
            p = z;
            rz = dot(r, z);
            continue;
        }
        precond.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    res.relative_residual = rnorm / bnorm;
    res.converged = res.relative_residual <= settings.rel_tol;
    return res;
}

inline PcgResult pcg(const SparseSystem& system, const BlockJacobiPreconditioner& precond, PcgSettings settings = {})
{
    return pcg(system.matrix, system.rhs, precond, settings);
}

} // namespace hpfem
