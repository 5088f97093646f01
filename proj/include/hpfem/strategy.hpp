#pragma once

#include "hpfem/estimator.hpp"
#include "hpfem/problem.hpp"
#include "hpfem/space.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpfem {

// ---------------------------------------------------------------------------
// Expected error reduction factors
// ---------------------------------------------------------------------------

/// Bisection-type h-refinement into `children` pieces in dimension d: (1/c)^{p/d}.
inline double lambda_h(int p, int children, int d)
{
    return std::pow(1.0 / children, static_cast<double>(p) / d);
}

/// Degree increase p -> p+1 with Sobolev index m = p/2 + 1: (p/(p+1))^{p/2}.
inline double lambda_p(int p)
{
    return std::pow(static_cast<double>(p) / (p + 1.0), 0.5 * p);
}

inline double lambda_hp(int p, int children, int d) { return lambda_p(p) * lambda_h(p, children, d); }

// ---------------------------------------------------------------------------
// Configuration and history
// ---------------------------------------------------------------------------

enum class RefinementTag { None, H, P, HP };
enum class Decision { H, P };
enum class StrategyKind { HpHistory, HOnly, UniformH, UniformP };

/// How an element came to be: the refinement that produced it and the
/// indicator and degree of the configuration it replaced.
struct HistoryRecord {
    RefinementTag tag = RefinementTag::None;
    double parent_eta = 0.0;
    int parent_degree = 0;
};

using History = std::map<ElementId, HistoryRecord>;

struct AdaptConfig {
    double alpha = 0.5;
    double epsilon = 0.0;
    int dimension = 2;  ///< d used in lambda_h / lambda_hp
    int children = Mesh::kChildrenPerBisection;
    std::size_t max_dof = 50000;
    int max_iterations = 100;
    StrategyKind strategy = StrategyKind::HpHistory;
    int initial_degree = 2;
    PcgSettings pcg;

    void validate() const
    {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("alpha must lie in (0, 1)");
        if (epsilon < 0.0)
            throw std::invalid_argument("tolerance must be non-negative");
        if (dimension != 2 && dimension != 3)
            throw std::invalid_argument("dimension must be 2 or 3");
        if (children < 2)
            throw std::invalid_argument("children count must be >= 2");
        if (initial_degree < 1)
            throw std::invalid_argument("initial degree must be >= 1");
        if (max_iterations < 1)
            throw std::invalid_argument("max_iterations must be >= 1");
    }
};

/// Maximum strategy: every element with eta_K >= alpha * max eta.
inline std::vector<ElementId> mark_max(const IndicatorField& field, double alpha)
{
    if (field.eta.empty())
        throw std::invalid_argument("mark_max on an empty indicator field");
    double top = 0.0;
    for (const auto& [id, e] : field.eta)
        top = std::max(top, e);
    const double threshold = alpha * top;
    std::vector<ElementId> marked;
    for (const auto& [id, e] : field.eta)
        if (e >= threshold)
            marked.push_back(id);
    return marked;
}

/**
 * p-refine when the last refinement achieved its expected reduction
 * (eta_K^2 <= lambda^2 eta_parent^2, lambda evaluated at the parent's degree),
 * h-refine otherwise.  Elements untouched in the previous step get p.
 */
inline Decision decide(double eta, const HistoryRecord& history, const AdaptConfig& config)
{
    double lambda = 0.0;
    switch (history.tag) {
    case RefinementTag::None:
        return Decision::P;
    case RefinementTag::H:
        lambda = lambda_h(history.parent_degree, config.children, config.dimension);
        break;
    case RefinementTag::P:
        lambda = lambda_p(history.parent_degree);
        break;
    case RefinementTag::HP:
        lambda = lambda_hp(history.parent_degree, config.children, config.dimension);
        break;
    }
    return eta * eta <= lambda * lambda * history.parent_eta * history.parent_eta ? Decision::P : Decision::H;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

struct RefinementCounts {
    std::size_t h = 0;   ///< bisected only
    std::size_t p = 0;   ///< degree raised only
    std::size_t hp = 0;  ///< degree raised and bisected by the closure
};

struct RefinementOutcome {
    HpSpace space;
    History history;
    RefinementCounts counts;
    RefinementReport report;
};

/**
 * Carry out h/p decisions on a copy of the mesh.  Children inherit the degree
 * of the element that was active before this step (plus one if it was
 * P-decided) and are tagged H, or HP when the closure also bisected a
 * P-decided element.  Unrefined P-decided elements are tagged P; everything
 * else restarts with tag None.
 */
inline RefinementOutcome apply_refinements(const HpSpace& space, const std::map<ElementId, Decision>& decisions,
                                           const IndicatorField& field)
{
    const Mesh& old_mesh = space.mesh();
    std::vector<ElementId> to_bisect;
    std::vector<bool> p_decided(old_mesh.num_elements(), false);
    for (const auto& [id, d] : decisions) {
        if (!space.is_active(id))
            throw MeshError("decision for inactive element " + std::to_string(id));
        if (d == Decision::H)
            to_bisect.push_back(id);
        else
            p_decided[id] = true;
    }

    auto mesh = std::make_shared<Mesh>(old_mesh);
    RefinementReport report = mesh->bisect(to_bisect);

    auto eta_of = [&](ElementId id) {
        auto it = field.eta.find(id);
        if (it == field.eta.end())
            throw std::invalid_argument("indicator missing for element " + std::to_string(id));
        return it->second;
    };

    RefinementCounts counts;
    for (auto id : space.active_elements())
        if (!mesh->element(id).active) {
            if (p_decided[id])
                ++counts.hp;
            else
                ++counts.h;
        } else if (p_decided[id]) {
            ++counts.p;
        }

    DegreeMap degrees;
    History history;
    const std::size_t old_count = old_mesh.num_elements();
    for (auto id : mesh->active_elements()) {
        ElementId origin = id;
        while (origin >= old_count || !space.is_active(origin))
            origin = *mesh->element(origin).parent;
        const int p_old = space.degree(origin);
        const bool raised = p_decided[origin];
        degrees.emplace_hint(degrees.end(), id, raised ? p_old + 1 : p_old);

        HistoryRecord rec;
        if (origin != id) {
            rec = {raised ? RefinementTag::HP : RefinementTag::H, eta_of(origin), p_old};
        } else if (raised) {
            rec = {RefinementTag::P, eta_of(origin), p_old};
        }
        history.emplace_hint(history.end(), id, rec);
    }

    return {HpSpace(std::move(mesh), degrees), std::move(history), counts, std::move(report)};
}

// ---------------------------------------------------------------------------
// Adaptive loop
// ---------------------------------------------------------------------------

struct IterationRecord {
    int iteration = 0;
    std::size_t n_elem = 0;
    std::size_t n_dof = 0;
    double eta = 0.0;
    std::optional<double> energy_error;
    RefinementCounts refinements;
    std::size_t pcg_iterations = 0;
    double pcg_residual = 0.0;
    bool pcg_converged = false;
    double seconds = 0.0;
};

enum class StopReason { Tolerance, DofBudget, IterationLimit };

struct ConvergenceLog {
    std::vector<IterationRecord> rows;
    StopReason stop = StopReason::IterationLimit;
};

/// Everything known about one pass of the loop, handed to an observer.
struct IterationSnapshot {
    int iteration;
    const HpSpace& space;
    const DiscreteSolution& solution;
    const IndicatorField& field;
    const History& history;
    const std::vector<ElementId>& marked;
    const std::map<ElementId, Decision>& decisions;
    const IterationRecord& record;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

/**
 * Solve, estimate, stop if eta <= epsilon, mark, decide, refine; repeat.
 * The loop also ends when the next space would exceed max_dof or after
 * max_iterations solves.
 */
inline ConvergenceLog adapt_loop(const Problem& problem, const AdaptConfig& config,
                                 const IterationObserver& observer = {})
{
    config.validate();
    using clock = std::chrono::steady_clock;

    auto mesh = std::make_shared<const Mesh>(problem.mesh);
    HpSpace space(mesh, uniform_degrees(*mesh, config.initial_degree));
    History history;
    for (auto id : space.active_elements())
        history.emplace_hint(history.end(), id, HistoryRecord{});

    ConvergenceLog log;
    for (int it = 1;; ++it) {
        if (space.n_dof() > config.max_dof) {
            log.stop = StopReason::DofBudget;
            break;
        }
        const auto start = clock::now();

        DiscreteSolution sol;
        try {
            sol = solve_poisson(space, problem.f, problem.g, config.pcg);
        } catch (const SolverError& e) {
            throw SolverError("iteration " + std::to_string(it) + ": " + e.what());
        }
        const IndicatorField field = compute_indicators(space, sol.u, problem.f);

        IterationRecord row;
        row.iteration = it;
        row.n_elem = space.active_elements().size();
        row.n_dof = space.n_dof();
        row.eta = field.eta_global;
        if (problem.exact_gradient)
            row.energy_error = energy_error(space, sol.u, *problem.exact_gradient);
        row.pcg_iterations = sol.pcg.iterations;
        row.pcg_residual = sol.pcg.relative_residual;
        row.pcg_converged = sol.pcg.converged;

        std::vector<ElementId> marked;
        std::map<ElementId, Decision> decisions;
        std::optional<StopReason> stop;
        if (field.eta_global <= config.epsilon)
            stop = StopReason::Tolerance;
        else if (it >= config.max_iterations)
            stop = StopReason::IterationLimit;

        std::optional<RefinementOutcome> outcome;
        if (!stop) {
            switch (config.strategy) {
            case StrategyKind::HpHistory:
                marked = mark_max(field, config.alpha);
                for (auto id : marked)
                    decisions.emplace(id, decide(field.eta.at(id), history.at(id), config));
                break;
            case StrategyKind::HOnly:
                marked = mark_max(field, config.alpha);
                for (auto id : marked)
                    decisions.emplace(id, Decision::H);
                break;
            case StrategyKind::UniformH:
            case StrategyKind::UniformP:
                marked = space.active_elements();
                for (auto id : marked)
                    decisions.emplace(id, config.strategy == StrategyKind::UniformH ? Decision::H : Decision::P);
                break;
            }
            outcome = apply_refinements(space, decisions, field);
            row.refinements = outcome->counts;
        }
        row.seconds = std::chrono::duration<double>(clock::now() - start).count();
        log.rows.push_back(row);

        if (observer)
            observer(IterationSnapshot{it, space, sol, field, history, marked, decisions, log.rows.back()});

        if (stop) {
            log.stop = *stop;
            break;
        }
        space = std::move(outcome->space);
        history = std::move(outcome->history);
    }
    return log;
}

} // namespace hpfem
