#pragma once

#include "hpfem/output.hpp"
#include "hpfem/presets.hpp"
#include "hpfem/strategy.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

namespace hpfem {

struct RunOptions {
    std::string problem = "square-smooth";
    StrategyKind strategy = StrategyKind::HpHistory;
    double alpha = 0.5;
    double tol = 0.0;
    std::size_t max_dof = 50000;
    int max_iters = 60;
    int initial_degree = 2;
    int dimension = 2;
    std::string out_dir = "out";
    bool export_mesh = false;
    double pcg_tol = 1e-10;
    bool timings = false;
};

/// Final-mesh summary alongside the full log.
struct RunReport {
    ConvergenceLog log;
    std::size_t n_elem = 0;
    std::size_t n_dof = 0;
    double eta = 0.0;
    std::optional<double> energy_error;
    std::string csv_path;
};

inline StrategyKind parse_strategy(const std::string& s)
{
    if (s == "hp")
        return StrategyKind::HpHistory;
    if (s == "h")
        return StrategyKind::HOnly;
    if (s == "uniform-h")
        return StrategyKind::UniformH;
    if (s == "uniform-p")
        return StrategyKind::UniformP;
    throw std::invalid_argument("unknown strategy '" + s + "' (expected hp, h, uniform-h or uniform-p)");
}

/// Process exit status: 0 when the tolerance was reached, 2 on a budget exit.
inline int exit_status(const ConvergenceLog& log) { return log.stop == StopReason::Tolerance ? 0 : 2; }

inline AdaptConfig make_config(const RunOptions& opt)
{
    AdaptConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.epsilon = opt.tol;
    cfg.dimension = opt.dimension;
    cfg.max_dof = opt.max_dof;
    cfg.max_iterations = opt.max_iters;
    cfg.strategy = opt.strategy;
    cfg.initial_degree = opt.initial_degree;
    cfg.pcg.rel_tol = opt.pcg_tol;
    cfg.validate();
    return cfg;
}

/// Run one adaptive computation and write convergence.csv, plot_convergence.py and optional meshes.
inline RunReport run(const RunOptions& opt)
{
    const AdaptConfig cfg = make_config(opt);
    const Problem problem = presets::make(opt.problem);

    namespace fs = std::filesystem;
    const fs::path out(opt.out_dir);
    fs::create_directories(out);

    IterationObserver observer;
    if (opt.export_mesh) {
        observer = [&](const IterationSnapshot& snap) {
            char name[32];
            std::snprintf(name, sizeof name, "mesh_%03d.vtk", snap.iteration);
            export_mesh(snap.space, &snap.field, (out / name).string());
        };
    }

    RunReport report;
    report.log = adapt_loop(problem, cfg, observer);
    if (!report.log.rows.empty()) {
        const auto& last = report.log.rows.back();
        report.n_elem = last.n_elem;
        report.n_dof = last.n_dof;
        report.eta = last.eta;
        report.energy_error = last.energy_error;
    }
    report.csv_path = (out / "convergence.csv").string();
    write_text(report.csv_path, convergence_csv(report.log, opt.timings));
    write_text((out / "plot_convergence.py").string(), plot_script("convergence.csv", 2));
    return report;
}

} // namespace hpfem
