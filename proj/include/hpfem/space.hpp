#pragma once

#include "hpfem/basis.hpp"
#include "hpfem/mesh.hpp"
#include "hpfem/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace hpfem {

using DegreeMap = std::map<ElementId, int>;

/// Shape values and reference-coordinate gradients at one point.
struct BasisEval {
    std::vector<double> values;
    std::vector<std::array<double, 2>> gradients;
};

/// Degree and global numbering of the hierarchical functions attached to one edge.
struct EdgeDofs {
    int degree = 1;
    std::size_t first = 0;  ///< first global index; degree - 1 consecutive indices
    [[nodiscard]] std::size_t count() const { return static_cast<std::size_t>(degree - 1); }
};

struct ElementSpace {
    ShapeLayout layout;
    std::vector<std::size_t> dofs;  ///< global index of each local shape
};

/**
 * Variable-degree H1-conforming space on the active elements of a mesh.
 *
 * Global numbering: vertex functions first (index == vertex id), then edge
 * functions by ascending edge key, then interior bubbles by ascending element
 * id.  Edge degrees follow the minimum rule so traces match without
 * constraints.  The space shares ownership of an immutable mesh snapshot.
 */
class HpSpace {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    HpSpace(std::shared_ptr<const Mesh> mesh, const DegreeMap& degrees)
        : mesh_(std::move(mesh))
    {
        if (!mesh_)
            throw MeshError("space needs a mesh");
        const Mesh& m = *mesh_;
        active_ = m.active_elements();
        slot_.assign(m.num_elements(), npos);
        degree_.assign(m.num_elements(), 0);
        for (std::size_t i = 0; i < active_.size(); ++i) {
            const ElementId id = active_[i];
            auto it = degrees.find(id);
            if (it == degrees.end())
                throw MeshError("missing degree for active element " + std::to_string(id));
            if (it->second < 1)
                throw MeshError("polynomial degree must be >= 1 (element " + std::to_string(id) + ")");
            slot_[id] = i;
            degree_[id] = it->second;
        }

        std::vector<bool> used(m.num_vertices(), false);
        for (auto id : active_)
            for (auto v : m.element(id).vertex_ids)
                used[v] = true;
        if (std::find(used.begin(), used.end(), false) != used.end())
            throw MeshError("mesh has vertices not touched by any active element");

        std::size_t next = m.num_vertices();
        for (const auto& [key, owners] : m.active_edges()) {
            int q = std::numeric_limits<int>::max();
            for (auto id : owners)
                q = std::min(q, degree_[id]);
            edges_.emplace(key, EdgeDofs{q, next});
            next += static_cast<std::size_t>(q - 1);
        }

        local_.resize(active_.size());
        for (std::size_t i = 0; i < active_.size(); ++i) {
            const ElementId id = active_[i];
            const auto& vids = m.element(id).vertex_ids;
            ElementSpace& es = local_[i];
            es.layout.degree = degree_[id];
            for (int e = 0; e < 3; ++e) {
                const auto& lv = kLocalEdgeVertices[static_cast<std::size_t>(e)];
                const VertexId a = vids[static_cast<std::size_t>(lv[0])];
                const VertexId b = vids[static_cast<std::size_t>(lv[1])];
                es.layout.edge_degree[static_cast<std::size_t>(e)] = edges_.at(make_edge(a, b)).degree;
                es.layout.edge_flip[static_cast<std::size_t>(e)] = a > b;
            }
            es.dofs.reserve(es.layout.size());
            for (auto v : vids)
                es.dofs.push_back(v);
            for (int e = 0; e < 3; ++e) {
                const auto& ed = edges_.at(m.local_edge(id, e));
                for (std::size_t k = 0; k < ed.count(); ++k)
                    es.dofs.push_back(ed.first + k);
            }
            const std::size_t nb = ShapeLayout::bubble_count(degree_[id]);
            for (std::size_t k = 0; k < nb; ++k)
                es.dofs.push_back(next + k);
            next += nb;
        }
        n_dof_ = next;

        std::vector<std::size_t> constrained;
        for (const auto& [key, marker] : m.boundary_edges()) {
            if (marker != 1)
                continue;
            constrained.push_back(key.first);
            constrained.push_back(key.second);
            const auto& ed = edges_.at(key);
            for (std::size_t k = 0; k < ed.count(); ++k)
                constrained.push_back(ed.first + k);
        }
        std::sort(constrained.begin(), constrained.end());
        constrained.erase(std::unique(constrained.begin(), constrained.end()), constrained.end());
        dirichlet_ = std::move(constrained);
    }

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    [[nodiscard]] std::size_t n_dof() const { return n_dof_; }
    [[nodiscard]] const std::vector<ElementId>& active_elements() const { return active_; }
    [[nodiscard]] bool is_active(ElementId id) const { return id < slot_.size() && slot_[id] != npos; }

    [[nodiscard]] int degree(ElementId id) const
    {
        if (slot(id) == npos)
            throw MeshError("element " + std::to_string(id) + " is not active");
        return degree_[id];
    }

    [[nodiscard]] DegreeMap degrees() const
    {
        DegreeMap out;
        for (auto id : active_)
            out.emplace_hint(out.end(), id, degree_[id]);
        return out;
    }

    [[nodiscard]] int edge_degree(EdgeKey edge) const
    {
        auto it = edges_.find(edge);
        if (it == edges_.end())
            throw MeshError("edge is not part of the active triangulation");
        return it->second.degree;
    }

    [[nodiscard]] const std::map<EdgeKey, EdgeDofs>& edges() const { return edges_; }

    [[nodiscard]] const ElementSpace& element_space(ElementId id) const
    {
        const std::size_t s = slot(id);
        if (s == npos)
            throw MeshError("element " + std::to_string(id) + " is not active");
        return local_[s];
    }

    /// Sorted global indices fixed by Dirichlet data (marker 1 boundary edges).
    [[nodiscard]] const std::vector<std::size_t>& dirichlet_dofs() const { return dirichlet_; }

    /// Index sets of the entity blocks: each vertex, each edge interior, each element interior.
    [[nodiscard]] std::vector<std::vector<std::size_t>> entity_blocks() const
    {
        std::vector<std::vector<std::size_t>> blocks;
        blocks.reserve(mesh_->num_vertices() + edges_.size() + active_.size());
        for (std::size_t v = 0; v < mesh_->num_vertices(); ++v)
            blocks.push_back({v});
        for (const auto& [key, ed] : edges_) {
            if (ed.count() == 0)
                continue;
            std::vector<std::size_t> b(ed.count());
            for (std::size_t k = 0; k < ed.count(); ++k)
                b[k] = ed.first + k;
            blocks.push_back(std::move(b));
        }
        for (const auto& es : local_) {
            const std::size_t off = es.layout.bubble_offset();
            if (es.dofs.size() > off)
                blocks.emplace_back(es.dofs.begin() + static_cast<std::ptrdiff_t>(off), es.dofs.end());
        }
        return blocks;
    }

    /// Local shape values and reference gradients at a point of the unit triangle.
    [[nodiscard]] BasisEval eval_basis(ElementId id, Point ref) const
    {
        constexpr double tol = 1e-12;
        if (ref.x < -tol || ref.y < -tol || ref.x + ref.y > 1.0 + tol)
            throw std::invalid_argument("point lies outside the reference triangle");
        std::vector<Jet> jets;
        evaluate_shapes(element_space(id).layout, ref.x, ref.y, jets);
        BasisEval out;
        out.values.reserve(jets.size());
        out.gradients.reserve(jets.size());
        for (const auto& j : jets) {
            out.values.push_back(j.v);
            out.gradients.push_back({j.dx, j.dy});
        }
        return out;
    }

    /// New space with the degree of each listed element raised by one.
    [[nodiscard]] HpSpace increase_degree(std::span<const ElementId> elems) const
    {
        DegreeMap d = degrees();
        for (auto id : elems) {
            auto it = d.find(id);
            if (it == d.end())
                throw MeshError("cannot raise degree of inactive element " + std::to_string(id));
            ++it->second;
        }
        return HpSpace(mesh_, d);
    }

private:
    [[nodiscard]] std::size_t slot(ElementId id) const { return id < slot_.size() ? slot_[id] : npos; }

    std::shared_ptr<const Mesh> mesh_;
    std::vector<ElementId> active_;
    std::vector<std::size_t> slot_;
    std::vector<int> degree_;
    std::map<EdgeKey, EdgeDofs> edges_;
    std::vector<ElementSpace> local_;
    std::vector<std::size_t> dirichlet_;
    std::size_t n_dof_ = 0;
};

inline HpSpace build_space(std::shared_ptr<const Mesh> mesh, const DegreeMap& degrees)
{
    return HpSpace(std::move(mesh), degrees);
}

/// Same degree on every active element.
inline DegreeMap uniform_degrees(const Mesh& mesh, int p)
{
    DegreeMap d;
    for (auto id : mesh.active_elements())
        d.emplace_hint(d.end(), id, p);
    return d;
}

/// Value and physical gradient of a discrete function at a reference point of one element.
struct PointValue {
    double value = 0.0;
    std::array<double, 2> gradient{};
    double laplacian = 0.0;
};

inline PointValue evaluate_solution(const HpSpace& space, std::span<const double> u, ElementId id,
                                    const AffineMap& map, Point ref, std::vector<Jet>& scratch)
{
    const auto& es = space.element_space(id);
    evaluate_shapes(es.layout, ref.x, ref.y, scratch);
    double v = 0.0, gx = 0.0, gy = 0.0, hxx = 0.0, hxy = 0.0, hyy = 0.0;
    for (std::size_t k = 0; k < scratch.size(); ++k) {
        const double c = u[es.dofs[k]];
        const Jet& j = scratch[k];
        v += c * j.v;
        gx += c * j.dx;
        gy += c * j.dy;
        hxx += c * j.dxx;
        hxy += c * j.dxy;
        hyy += c * j.dyy;
    }
    return {v, map.gradient(gx, gy), map.laplacian(hxx, hxy, hyy)};
}

/**
 * Values of the Dirichlet-constrained coefficients, ordered like
 * `space.dirichlet_dofs()`.  Vertices take g; edge coefficients are the L2(edge)
 * projection of g minus its linear interpolant onto the edge functions.
 */
inline std::vector<double> interpolate_dirichlet(const HpSpace& space, const ScalarFunction& g)
{
    const Mesh& mesh = space.mesh();
    std::map<std::size_t, double> values;
    for (const auto& [key, marker] : mesh.boundary_edges()) {
        if (marker != 1)
            continue;
        const Point a = mesh.vertex(key.first);
        const Point b = mesh.vertex(key.second);
        const double ga = g(a);
        const double gb = g(b);
        values[key.first] = ga;
        values[key.second] = gb;

        const int q = space.edge_degree(key);
        if (q < 2)
            continue;
        const auto n = static_cast<Eigen::Index>(q - 1);
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        const auto& rule = edge_rule(2 * q + 6);
        std::vector<double> trace;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double t = rule.points[i].x;
            const double w = rule.weights[i];
            const Point x{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
            const double r = g(x) - (ga * (1.0 - t) + gb * t);
            edge_trace_values(t, q, trace);
            for (Eigen::Index k = 0; k < n; ++k) {
                rhs(k) += w * r * trace[static_cast<std::size_t>(k)];
                for (Eigen::Index l = 0; l < n; ++l)
                    mass(k, l) += w * trace[static_cast<std::size_t>(k)] * trace[static_cast<std::size_t>(l)];
            }
        }
        const Eigen::VectorXd c = mass.llt().solve(rhs);
        const auto& ed = space.edges().at(key);
        for (Eigen::Index k = 0; k < n; ++k)
            values[ed.first + static_cast<std::size_t>(k)] = c(k);
    }

    std::vector<double> out;
    out.reserve(space.dirichlet_dofs().size());
    for (auto dof : space.dirichlet_dofs())
        out.push_back(values.at(dof));
    return out;
}

} // namespace hpfem
