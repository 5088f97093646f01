#pragma once

#include "hpfem/estimator.hpp"
#include "hpfem/space.hpp"
#include "hpfem/strategy.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace hpfem {

inline constexpr std::string_view kCsvHeader = "iter,n_elem,n_dof,eta,energy_error,n_h,n_p,n_hp,pcg_iters,seconds";

namespace detail {
inline std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}
} // namespace detail

/// Convergence log as CSV.  `seconds` is left empty unless `with_timings`.
inline std::string convergence_csv(const ConvergenceLog& log, bool with_timings)
{
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : log.rows) {
        out << r.iteration << ',' << r.n_elem << ',' << r.n_dof << ',' << detail::format_real(r.eta) << ',';
        if (r.energy_error)
            out << detail::format_real(*r.energy_error);
        out << ',' << r.refinements.h << ',' << r.refinements.p << ',' << r.refinements.hp << ','
            << r.pcg_iterations << ',';
        if (with_timings) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

/// Legacy ASCII VTK unstructured grid of the active elements with cell data `degree` and `eta`.
inline std::string mesh_vtk(const HpSpace& space, const IndicatorField* field)
{
    const Mesh& mesh = space.mesh();
    const auto& active = space.active_elements();
    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n"
        << "hp mesh\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices())
        out << detail::format_real(v.x) << ' ' << detail::format_real(v.y) << " 0\n";
    out << "CELLS " << active.size() << ' ' << 4 * active.size() << '\n';
    for (auto id : active) {
        const auto& vid = mesh.element(id).vertex_ids;
        out << "3 " << vid[0] << ' ' << vid[1] << ' ' << vid[2] << '\n';
    }
    out << "CELL_TYPES " << active.size() << '\n';
    for (std::size_t i = 0; i < active.size(); ++i)
        out << "5\n";
    out << "CELL_DATA " << active.size() << '\n';
    out << "SCALARS degree int 1\nLOOKUP_TABLE default\n";
    for (auto id : active)
        out << space.degree(id) << '\n';
    out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
    for (auto id : active) {
        double e = 0.0;
        if (field) {
            auto it = field->eta.find(id);
            if (it != field->eta.end())
                e = it->second;
        }
        out << detail::format_real(e) << '\n';
    }
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f)
        throw std::runtime_error("write failed for " + path);
}

inline void export_mesh(const HpSpace& space, const IndicatorField* field, const std::string& path)
{
    write_text(path, mesh_vtk(space, field));
}

/// matplotlib script plotting log10(error) against N_d^{1/(2d-1)} from the CSV next to it.
inline std::string plot_script(const std::string& csv_name, int dimension)
{
    const int denom = 2 * dimension - 1;
    std::ostringstream s;
    s << "import csv\n"
      << "import math\n"
      << "import os\n"
      << "import matplotlib\n"
      << "matplotlib.use('Agg')\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "here = os.path.dirname(os.path.abspath(__file__))\n"
      << "with open(os.path.join(here, '" << csv_name << "')) as fh:\n"
      << "    rows = list(csv.DictReader(fh))\n"
      << "use_error = all(r['energy_error'] for r in rows)\n"
      << "key = 'energy_error' if use_error else 'eta'\n"
      << "x = [int(r['n_dof']) ** (1.0 / " << denom << ") for r in rows]\n"
      << "y = [math.log10(float(r[key])) for r in rows]\n"
      << "plt.plot(x, y, 'o-')\n"
      << "plt.xlabel('N_d^(1/" << denom << ")')\n"
      << "plt.ylabel('log10(' + key + ')')\n"
      << "plt.grid(True)\n"
      << "plt.savefig(os.path.join(here, 'convergence.png'), dpi=150)\n";
    return s.str();
}

} // namespace hpfem
