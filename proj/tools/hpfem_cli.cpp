#include "hpfem/driver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

int main(int argc, char** argv)
{
    hpfem::RunOptions opt;
    std::string strategy = "hp";

    CLI::App app{"hp-adaptive finite elements for the 2D Poisson problem"};
    app.add_option("--problem", opt.problem, "problem preset")
        ->check(CLI::IsMember(hpfem::presets::names()))
        ->required();
    app.add_option("--strategy", strategy, "hp | h | uniform-h | uniform-p")
        ->check(CLI::IsMember({"hp", "h", "uniform-h", "uniform-p"}));
    app.add_option("--alpha", opt.alpha, "maximum-marking parameter")->check(CLI::Range(0.0, 1.0));
    app.add_option("--tol", opt.tol, "stop once the global indicator is <= tol")->check(CLI::NonNegativeNumber);
    app.add_option("--max-dof", opt.max_dof, "degree-of-freedom budget");
    app.add_option("--max-iters", opt.max_iters, "maximum number of solves")->check(CLI::PositiveNumber);
    app.add_option("--initial-degree", opt.initial_degree, "starting polynomial degree")
        ->check(CLI::PositiveNumber);
    app.add_option("--d", opt.dimension, "dimension used in the reduction factors")->check(CLI::IsMember({2, 3}));
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_flag("--export-mesh", opt.export_mesh, "write mesh_NNN.vtk for every iteration");
    app.add_option("--pcg-tol", opt.pcg_tol, "relative residual tolerance of PCG");
    app.add_flag("--timings", opt.timings, "fill the seconds column (output is then not reproducible)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        opt.strategy = hpfem::parse_strategy(strategy);
        const auto report = hpfem::run(opt);
        std::printf("%s: %zu iterations, %zu elements, %zu dofs, eta %.3e", opt.problem.c_str(),
                    report.log.rows.size(), report.n_elem, report.n_dof, report.eta);
        if (report.energy_error)
            std::printf(", energy error %.3e", *report.energy_error);
        std::printf("\nwrote %s\n", report.csv_path.c_str());
        return hpfem::exit_status(report.log);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
