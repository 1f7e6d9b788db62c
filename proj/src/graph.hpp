// Simple undirected graphs with dense 0-based vertex ids and sorted adjacency
// lists, plus the neighborhood/boundary helpers the mixing machinery needs.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace ssmix {

using Vertex = uint32_t;

// Unreachable marker for distance vectors; kept an explicit sentinel rather
// than a large magic value.
inline constexpr int64_t kUnreachable = -1;

// Sorted, duplicate-free set of vertex ids.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::vector<Vertex> items);

    bool contains(Vertex v) const;
    void insert(Vertex v);
    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<Vertex>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    bool operator==(const VertexSet&) const = default;

private:
    std::vector<Vertex> items_;
};

struct Graph {
    std::vector<std::vector<Vertex>> adj;  // sorted neighbor lists
    size_t m = 0;

    uint32_t n() const { return static_cast<uint32_t>(adj.size()); }
    uint32_t degree(Vertex v) const { return static_cast<uint32_t>(adj[v].size()); }
    bool has_edge(Vertex u, Vertex v) const;
    const std::vector<Vertex>& neighbors(Vertex v) const { return adj[v]; }

    // Validates ids, rejects self-loops and duplicate edges.
    static Graph from_edges(uint32_t n, const std::vector<std::pair<Vertex, Vertex>>& edges);
    std::vector<std::pair<Vertex, Vertex>> edges() const;  // canonical u < v, sorted
};

// Erdos-Renyi G(n, d/n) by geometric skips over the C(n,2) pair stream;
// O(n + m) draws, deterministic for a given seed.
Graph generate_gnp(uint32_t n, double avg_degree, uint64_t seed);

std::vector<int64_t> bfs_distances(const Graph& g, Vertex source);
std::vector<int64_t> bfs_distances(const Graph& g, const VertexSet& sources);  // multi-source

// Vertices outside s with a neighbor in s.
VertexSet vertex_boundary(const Graph& g, const VertexSet& s);
// Edges (u, v) with u in s, v outside, sorted by (u, v).
std::vector<std::pair<Vertex, Vertex>> edge_boundary(const Graph& g, const VertexSet& s);
// Closed ball: all vertices at distance <= radius from v.
VertexSet ball(const Graph& g, Vertex v, uint32_t radius);

// Text format: "n m" header, then one "u v" line per edge with u < v, both
// 0-based, newline terminated. Reader rejects malformed input, bad ids,
// self-loops and duplicates.
std::string format_graph(const Graph& g);
Graph parse_graph(const std::string& text);

}  // namespace ssmix
