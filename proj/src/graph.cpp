#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace ssmix {

VertexSet::VertexSet(std::vector<Vertex> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool VertexSet::contains(Vertex v) const {
    return std::binary_search(items_.begin(), items_.end(), v);
}

void VertexSet::insert(Vertex v) {
    auto it = std::lower_bound(items_.begin(), items_.end(), v);
    if (it == items_.end() || *it != v) items_.insert(it, v);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    if (u >= n() || v >= n()) return false;
    const auto& a = adj[u];
    return std::binary_search(a.begin(), a.end(), v);
}

Graph Graph::from_edges(uint32_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
    Graph g;
    g.adj.assign(n, {});
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) fail(ErrorCode::invalid_argument, "edge endpoint out of range");
        if (u == v) fail(ErrorCode::invalid_argument, "self-loop rejected");
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            fail(ErrorCode::invalid_argument, "duplicate edge rejected");
    }
    g.m = edges.size();
    return g;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(m);
    for (Vertex u = 0; u < n(); ++u)
        for (Vertex v : adj[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph generate_gnp(uint32_t n, double avg_degree, uint64_t seed) {
    if (n == 0) fail(ErrorCode::invalid_argument, "gnp: n must be positive");
    if (!(avg_degree >= 0.0) || avg_degree > static_cast<double>(n))
        fail(ErrorCode::invalid_argument, "gnp: need 0 <= d <= n");
    const double p = avg_degree / n;
    std::vector<std::pair<Vertex, Vertex>> edges;
    if (p > 0.0) {
        Rng rng = make_stream(seed, kStreamGnp);
        const uint64_t total = static_cast<uint64_t>(n) * (n - 1) / 2;
        if (p >= 1.0) {
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        } else {
            const double log_skip = std::log1p(-p);
            // walk the ordered pair stream (0,1),(0,2),...,(1,2),... with
            // geometric gaps between successes
            uint64_t idx = 0;  // next candidate pair index
            uint64_t row = 0, row_start = 0;
            while (idx < total) {
                const double u01 = uniform_open01(rng);
                const double skip = std::floor(std::log(u01) / log_skip);
                if (skip >= static_cast<double>(total - idx)) break;  // past the end
                idx += static_cast<uint64_t>(skip);
                while (idx >= row_start + (n - 1 - row)) {
                    row_start += n - 1 - row;
                    ++row;
                }
                const Vertex a = static_cast<Vertex>(row);
                const Vertex b = static_cast<Vertex>(row + 1 + (idx - row_start));
                edges.emplace_back(a, b);
                ++idx;
            }
        }
    }
    return Graph::from_edges(n, edges);
}

std::vector<int64_t> bfs_distances(const Graph& g, Vertex source) {
    if (source >= g.n()) fail(ErrorCode::invalid_argument, "bfs: source out of range");
    return bfs_distances(g, VertexSet({source}));
}

std::vector<int64_t> bfs_distances(const Graph& g, const VertexSet& sources) {
    std::vector<int64_t> dist(g.n(), kUnreachable);
    std::deque<Vertex> queue;
    for (Vertex s : sources) {
        if (s >= g.n()) fail(ErrorCode::invalid_argument, "bfs: source out of range");
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const Vertex u = queue.front();
        queue.pop_front();
        for (Vertex w : g.adj[u]) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

VertexSet vertex_boundary(const Graph& g, const VertexSet& s) {
    std::vector<char> in_s(g.n(), 0);
    for (Vertex v : s) {
        if (v >= g.n()) fail(ErrorCode::invalid_argument, "vertex_boundary: id out of range");
        in_s[v] = 1;
    }
    std::vector<Vertex> out;
    for (Vertex v : s)
        for (Vertex w : g.adj[v])
            if (!in_s[w]) out.push_back(w);
    return VertexSet(std::move(out));
}

std::vector<std::pair<Vertex, Vertex>> edge_boundary(const Graph& g, const VertexSet& s) {
    std::vector<char> in_s(g.n(), 0);
    for (Vertex v : s) {
        if (v >= g.n()) fail(ErrorCode::invalid_argument, "edge_boundary: id out of range");
        in_s[v] = 1;
    }
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex v : s)
        for (Vertex w : g.adj[v])
            if (!in_s[w]) out.emplace_back(v, w);
    std::sort(out.begin(), out.end());
    return out;
}

VertexSet ball(const Graph& g, Vertex v, uint32_t radius) {
    if (v >= g.n()) fail(ErrorCode::invalid_argument, "ball: center out of range");
    const auto dist = bfs_distances(g, v);
    std::vector<Vertex> out;
    for (Vertex u = 0; u < g.n(); ++u)
        if (dist[u] != kUnreachable && dist[u] <= static_cast<int64_t>(radius)) out.push_back(u);
    return VertexSet(std::move(out));
}

std::string format_graph(const Graph& g) {
    std::ostringstream os;
    os << g.n() << ' ' << g.m << '\n';
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
    return os.str();
}

Graph parse_graph(const std::string& text) {
    std::istringstream is(text);
    uint64_t n = 0, m = 0;
    if (!(is >> n >> m)) fail(ErrorCode::parse_error, "graph: bad header, expected 'n m'");
    if (n > UINT32_MAX) fail(ErrorCode::parse_error, "graph: n too large");
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(m);
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t u = 0, v = 0;
        if (!(is >> u >> v)) fail(ErrorCode::parse_error, "graph: truncated edge list");
        if (u >= n || v >= n) fail(ErrorCode::parse_error, "graph: edge endpoint out of range");
        if (u >= v) fail(ErrorCode::parse_error, "graph: edges must satisfy u < v");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    std::string trailing;
    if (is >> trailing) fail(ErrorCode::parse_error, "graph: trailing content after edge list");
    try {
        return Graph::from_edges(static_cast<uint32_t>(n), edges);
    } catch (const Error& e) {
        fail(ErrorCode::parse_error, std::string("graph: ") + e.what());
    }
}

}  // namespace ssmix
