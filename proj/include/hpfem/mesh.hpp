#pragma once

#include "hpfem/geometry.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hpfem {

using VertexId = std::size_t;
using ElementId = std::size_t;

/// Undirected edge identified by its sorted vertex pair.
struct EdgeKey {
    VertexId first = 0;
    VertexId second = 0;

    auto operator<=>(const EdgeKey&) const = default;
};

inline EdgeKey make_edge(VertexId u, VertexId v) { return u < v ? EdgeKey{u, v} : EdgeKey{v, u}; }

struct Element {
    std::array<VertexId, 3> vertex_ids{};
    int refinement_edge = 0;
    std::optional<ElementId> parent;
    std::optional<std::array<ElementId, 2>> children;
    int generation = 0;
    bool active = true;
};

struct BoundaryEdge {
    VertexId a = 0;
    VertexId b = 0;
    int marker = 1;
};

struct RefinementReport {
    std::vector<ElementId> created;   ///< new elements, in creation order
    std::vector<ElementId> parents;   ///< parents[i] is the parent of created[i]
    std::vector<ElementId> bisected;  ///< elements that were split (now inactive)

    [[nodiscard]] bool empty() const { return created.empty(); }
};

/**
 * Conforming triangulation refined by newest-vertex bisection.
 *
 * Elements are never deleted: bisection deactivates the parent and appends two
 * children, so the element list doubles as the refinement forest.  Every
 * bisection of an edge is recorded, and the closure keeps bisecting until no
 * active element carries an edge that has already been split.
 */
class Mesh {
public:
    static constexpr int kChildrenPerBisection = 2;

    Mesh() = default;

    Mesh(std::vector<Vertex> vertices, const std::vector<std::array<VertexId, 3>>& triangles,
         const std::vector<BoundaryEdge>& boundary)
        : vertices_(std::move(vertices))
    {
        if (triangles.empty())
            throw MeshError("mesh needs at least one triangle");
        for (const auto& v : vertices_)
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw MeshError("non-finite vertex coordinate");

        elements_.reserve(triangles.size());
        for (const auto& tri : triangles) {
            for (auto id : tri)
                if (id >= vertices_.size())
                    throw MeshError("triangle references vertex " + std::to_string(id) + " out of range");
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
                throw MeshError("triangle has repeated vertex ids");
            if (!(signed_area2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) > 0.0))
                throw MeshError("triangle with zero or negative area");
            Element e;
            e.vertex_ids = tri;
            e.refinement_edge = initial_refinement_edge(tri);
            elements_.push_back(e);
        }

        for (ElementId id = 0; id < elements_.size(); ++id)
            attach(id);

        for (const auto& [key, owners] : edge_elements_)
            if (owners.size() > 2)
                throw MeshError("non-conforming input: edge shared by more than two triangles");

        for (const auto& be : boundary) {
            const auto key = make_edge(be.a, be.b);
            auto it = edge_elements_.find(key);
            if (it == edge_elements_.end() || it->second.size() != 1)
                throw MeshError("boundary entry does not match a boundary edge of the triangulation");
            boundary_[key] = be.marker;
        }

        // A vertex lying inside a one-sided edge means a hanging node.
        for (const auto& [key, owners] : edge_elements_) {
            if (owners.size() != 1)
                continue;
            const Point a = vertices_[key.first];
            const Point b = vertices_[key.second];
            const double len = distance(a, b);
            for (VertexId v = 0; v < vertices_.size(); ++v) {
                if (v == key.first || v == key.second)
                    continue;
                const Point p = vertices_[v];
                const double cross = std::abs(signed_area2(a, b, p)) / len;
                const double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
                if (cross <= 1e-12 * len && t > 1e-12 && t < 1.0 - 1e-12)
                    throw MeshError("non-conforming input: hanging vertex " + std::to_string(v));
            }
        }
    }

    [[nodiscard]] const std::vector<Vertex>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
    [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_elements() const { return elements_.size(); }
    [[nodiscard]] const Vertex& vertex(VertexId id) const { return vertices_.at(id); }

    [[nodiscard]] const Element& element(ElementId id) const
    {
        if (id >= elements_.size())
            throw MeshError("element id " + std::to_string(id) + " out of range");
        return elements_[id];
    }

    /// Active element ids in ascending order.
    [[nodiscard]] std::vector<ElementId> active_elements() const
    {
        std::vector<ElementId> ids;
        ids.reserve(num_active_);
        for (ElementId id = 0; id < elements_.size(); ++id)
            if (elements_[id].active)
                ids.push_back(id);
        return ids;
    }

    [[nodiscard]] std::size_t num_active() const { return num_active_; }

    [[nodiscard]] std::array<Point, 3> corners(ElementId id) const
    {
        const auto& v = element(id).vertex_ids;
        return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
    }

    [[nodiscard]] AffineMap affine_map(ElementId id) const
    {
        const auto c = corners(id);
        return {c[0], c[1], c[2]};
    }

    [[nodiscard]] EdgeKey local_edge(ElementId id, int local) const
    {
        const auto& e = element(id);
        const auto& lv = kLocalEdgeVertices[static_cast<std::size_t>(local)];
        return make_edge(e.vertex_ids[lv[0]], e.vertex_ids[lv[1]]);
    }

    [[nodiscard]] double area(ElementId id) const
    {
        const auto c = corners(id);
        return 0.5 * signed_area2(c[0], c[1], c[2]);
    }

    /// h_K: longest edge of the triangle.
    [[nodiscard]] double diameter(ElementId id) const
    {
        const auto c = corners(id);
        return std::max({distance(c[0], c[1]), distance(c[1], c[2]), distance(c[2], c[0])});
    }

    /// h_f: length of the edge.
    [[nodiscard]] double edge_length(EdgeKey edge) const
    {
        return distance(vertices_.at(edge.first), vertices_.at(edge.second));
    }

    /// Active elements having `edge` as one of their three edges.
    [[nodiscard]] std::vector<ElementId> elements_on_edge(EdgeKey edge) const
    {
        auto it = edge_elements_.find(edge);
        if (it == edge_elements_.end())
            return {};
        return it->second;
    }

    /// Edge table of the active triangulation (edge -> one or two active elements).
    [[nodiscard]] const std::map<EdgeKey, std::vector<ElementId>>& active_edges() const { return edge_elements_; }

    [[nodiscard]] const std::map<EdgeKey, int>& boundary_edges() const { return boundary_; }

    [[nodiscard]] std::optional<int> boundary_marker(EdgeKey edge) const
    {
        auto it = boundary_.find(edge);
        if (it == boundary_.end())
            return std::nullopt;
        return it->second;
    }

    /// True when the edge has been split by some earlier bisection.
    [[nodiscard]] bool is_split(EdgeKey edge) const { return midpoints_.contains(edge); }

    /**
     * Bisect every marked element across its refinement edge and close the
     * result with further newest-vertex bisections until it is conforming.
     */
    RefinementReport bisect(std::span<const ElementId> marked)
    {
        for (auto id : marked)
            if (!element(id).active)
                throw MeshError("cannot bisect inactive element " + std::to_string(id));

        RefinementReport report;
        std::deque<ElementId> pending(marked.begin(), marked.end());
        while (!pending.empty()) {
            const ElementId id = pending.front();
            pending.pop_front();
            if (!elements_[id].active)
                continue;
            bisect_one(id, report, pending);
        }
        return report;
    }

    RefinementReport uniform_refine()
    {
        const auto ids = active_elements();
        return bisect(ids);
    }

private:
    // Longest edge; ties go to the edge whose opposite vertex has the smallest global id.
    [[nodiscard]] int initial_refinement_edge(const std::array<VertexId, 3>& tri) const
    {
        int best = -1;
        double best_len = -1.0;
        for (int e = 0; e < 3; ++e) {
            const auto& lv = kLocalEdgeVertices[static_cast<std::size_t>(e)];
            const double len = distance(vertices_[tri[lv[0]]], vertices_[tri[lv[1]]]);
            if (best < 0 || len > best_len * (1.0 + 1e-12)) {
                best = e;
                best_len = len;
            } else if (len >= best_len * (1.0 - 1e-12) && tri[e] < tri[best]) {
                best = e;
                best_len = std::max(best_len, len);
            }
        }
        return best;
    }

    void attach(ElementId id)
    {
        for (int e = 0; e < 3; ++e)
            edge_elements_[local_edge(id, e)].push_back(id);
        ++num_active_;
    }

    void detach(ElementId id)
    {
        for (int e = 0; e < 3; ++e) {
            auto it = edge_elements_.find(local_edge(id, e));
            auto& owners = it->second;
            owners.erase(std::remove(owners.begin(), owners.end(), id), owners.end());
            if (owners.empty())
                edge_elements_.erase(it);
        }
        --num_active_;
    }

    VertexId midpoint(VertexId a, VertexId b)
    {
        const auto key = make_edge(a, b);
        if (auto it = midpoints_.find(key); it != midpoints_.end())
            return it->second;
        const Point pa = vertices_[a];
        const Point pb = vertices_[b];
        const VertexId m = vertices_.size();
        vertices_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
        midpoints_.emplace(key, m);
        if (auto bit = boundary_.find(key); bit != boundary_.end()) {
            const int marker = bit->second;
            boundary_.erase(bit);
            boundary_[make_edge(a, m)] = marker;
            boundary_[make_edge(m, b)] = marker;
        }
        return m;
    }

    void bisect_one(ElementId id, RefinementReport& report, std::deque<ElementId>& pending)
    {
        const Element parent = elements_[id];
        const int r = parent.refinement_edge;
        // (c, a, b) is a rotation of the parent's vertex order with (a, b) the refinement edge.
        const VertexId c = parent.vertex_ids[static_cast<std::size_t>(r)];
        const VertexId a = parent.vertex_ids[static_cast<std::size_t>((r + 1) % 3)];
        const VertexId b = parent.vertex_ids[static_cast<std::size_t>((r + 2) % 3)];
        const VertexId m = midpoint(a, b);

        detach(id);
        elements_[id].active = false;

        Element left;
        left.vertex_ids = {c, a, m};
        left.refinement_edge = 2;
        Element right;
        right.vertex_ids = {c, m, b};
        right.refinement_edge = 1;
        for (Element* child : {&left, &right}) {
            child->parent = id;
            child->generation = parent.generation + 1;
        }

        const ElementId left_id = elements_.size();
        const ElementId right_id = left_id + 1;
        elements_.push_back(left);
        elements_.push_back(right);
        elements_[id].children = std::array<ElementId, 2>{left_id, right_id};
        attach(left_id);
        attach(right_id);

        report.created.push_back(left_id);
        report.parents.push_back(id);
        report.created.push_back(right_id);
        report.parents.push_back(id);
        report.bisected.push_back(id);

        // The neighbour across (a, b) now has a hanging node.
        for (auto other : elements_on_edge(make_edge(a, b)))
            pending.push_back(other);
        // A child may inherit an edge its neighbour already split.
        for (auto child : {left_id, right_id})
            for (int e = 0; e < 3; ++e)
                if (is_split(local_edge(child, e))) {
                    pending.push_back(child);
                    break;
                }
    }

    std::vector<Vertex> vertices_;
    std::vector<Element> elements_;
    std::map<EdgeKey, int> boundary_;
    std::map<EdgeKey, VertexId> midpoints_;
    std::map<EdgeKey, std::vector<ElementId>> edge_elements_;
    std::size_t num_active_ = 0;
};

} // namespace hpfem
