#pragma once

#include "hpfem/assembly.hpp"
#include "hpfem/linsolve.hpp"
#include "hpfem/mesh.hpp"

#include <optional>
#include <string>

namespace hpfem {

/// -Lap u = f in the domain, u = g on marker-1 boundary edges.
struct Problem {
    std::string name;
    Mesh mesh;
    ScalarFunction f;
    ScalarFunction g;
    std::optional<ScalarFunction> exact;
    std::optional<GradientFunction> exact_gradient;
};

struct DiscreteSolution {
    std::vector<double> u;  ///< full coefficient vector, Dirichlet values included
    SparseSystem reduced;
    PcgResult pcg;
};

/// Assemble, lift the Dirichlet data, and solve with entity-block PCG.
inline DiscreteSolution solve_poisson(const HpSpace& space, const ScalarFunction& f, const ScalarFunction& g,
                                      PcgSettings settings = {})
{
    const SparseSystem full = assemble(space, f);
    const std::vector<double> gv = interpolate_dirichlet(space, g);
    DiscreteSolution sol;
    sol.reduced = apply_dirichlet(full, space, gv);
    const auto precond = build_preconditioner(sol.reduced, space);
    sol.pcg = pcg(sol.reduced, precond, settings);
    sol.u = expand_solution(space, sol.reduced, sol.pcg.x, gv);
    return sol;
}

} // namespace hpfem
