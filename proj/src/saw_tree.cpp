#include "saw_tree.hpp"

#include <algorithm>
#include <sstream>

namespace ssmix {

SawTree build_saw_tree(const Graph& g, Vertex root, uint32_t depth_limit, uint64_t node_cap) {
    if (root >= g.n()) fail(ErrorCode::invalid_argument, "saw tree: root out of range");
    SawTree tree;
    tree.root = root;
    tree.depth_limit = depth_limit;
    tree.nodes.push_back({root, -1, 0, 0, 0});
    std::vector<char> on_walk(g.n(), 0);
    std::vector<Vertex> walk;
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
        // nodes are appended in BFS order, so children stay contiguous
        if (tree.nodes[i].depth >= depth_limit) continue;
        walk.clear();
        for (int32_t a = static_cast<int32_t>(i); a != -1; a = tree.nodes[a].parent) {
            walk.push_back(tree.nodes[a].vertex);
            on_walk[tree.nodes[a].vertex] = 1;
        }
        tree.nodes[i].first_child = static_cast<uint32_t>(tree.nodes.size());
        for (Vertex w : g.adj[tree.nodes[i].vertex]) {
            if (on_walk[w]) continue;
            if (tree.nodes.size() >= node_cap)
                fail(ErrorCode::budget_exceeded, "saw tree: node cap exceeded");
            tree.nodes.push_back({w, static_cast<int32_t>(i), tree.nodes[i].depth + 1, 0, 0});
            ++tree.nodes[i].num_children;
        }
        for (Vertex v : walk) on_walk[v] = 0;
    }
    return tree;
}

bool is_permissive(const ListColoringInstance& inst, Vertex u) {
    if (u >= inst.g.n()) fail(ErrorCode::invalid_argument, "is_permissive: vertex out of range");
    if (inst.slack(u) <= 0) return false;
    for (Vertex w : inst.g.adj[u])
        if (inst.slack(w) <= 0) return false;
    return true;
}

std::optional<Cutset> find_permissive_cutset(const ListColoringInstance& inst,
                                             const SawTree& tree, const VertexSet& delta,
                                             uint32_t t) {
    if (t < 1) fail(ErrorCode::invalid_argument, "cutset: t must be >= 1");
    if (tree.depth_limit < 2 * t)
        fail(ErrorCode::invalid_argument, "cutset: tree depth limit below 2t");
    const auto dist_delta = delta.empty()
                                ? std::vector<int64_t>(inst.g.n(), kUnreachable)
                                : bfs_distances(inst.g, delta);
    // unreachable-from-delta counts as infinitely far
    auto far_from_delta = [&](Vertex v, int64_t need) {
        return dist_delta[v] == kUnreachable || dist_delta[v] >= need;
    };
    if (!far_from_delta(tree.root, 2 * static_cast<int64_t>(t) + 1))
        fail(ErrorCode::invalid_argument, "cutset: dist(v, delta) must exceed 2t");
    // cache per graph vertex: permissive and at distance >= 2 from delta
    std::vector<int8_t> qualifies(inst.g.n(), -1);
    auto node_qualifies = [&](Vertex v) {
        if (qualifies[v] < 0)
            qualifies[v] = far_from_delta(v, 2) && is_permissive(inst, v) ? 1 : 0;
        return qualifies[v] == 1;
    };
    Cutset cutset;
    // walk down; the shallowest qualifying node per path closes its subtree
    std::vector<uint32_t> stack{0};
    while (!stack.empty()) {
        const uint32_t id = stack.back();
        stack.pop_back();
        const SawNode& node = tree.nodes[id];
        if (id != 0 && node.depth >= t && node.depth < 2 * t && node_qualifies(node.vertex)) {
            cutset.push_back(id);
            continue;
        }
        if (node.depth >= 2 * t) return std::nullopt;  // walk escaped the window
        for (uint32_t k = 0; k < node.num_children; ++k) stack.push_back(node.first_child + k);
    }
    std::sort(cutset.begin(), cutset.end());
    return cutset;
}

double decay_bound(const ListColoringInstance& inst, const SawTree& tree, const Cutset& cutset) {
    std::vector<char> in_cutset(tree.nodes.size(), 0);
    for (uint32_t id : cutset) {
        if (id >= tree.nodes.size())
            fail(ErrorCode::invalid_argument, "decay_bound: cutset node out of range");
        in_cutset[id] = 1;
    }
    auto delta_weight = [&](Vertex u) {
        const int64_t s = inst.slack(u);
        return s > 0 ? 1.0 / static_cast<double>(s) : 1.0;
    };
    // children precede nothing: nodes are in BFS order, so a reverse sweep
    // sees every child before its parent
    std::vector<double> value(tree.nodes.size(), 0.0);
    for (size_t i = tree.nodes.size(); i-- > 0;) {
        if (in_cutset[i]) {
            value[i] = 3.0 * static_cast<double>(inst.q);
            continue;
        }
        const SawNode& node = tree.nodes[i];
        double sum = 0;
        for (uint32_t k = 0; k < node.num_children; ++k) {
            const uint32_t child = node.first_child + k;
            sum += delta_weight(tree.nodes[child].vertex) * value[child];
        }
        value[i] = sum;
    }
    return value.empty() ? 0.0 : value[0];
}

SawDecayReport verify_saw_decay(const ListColoringInstance& inst, Vertex v,
                                const VertexSet& lambda, const VertexSet& delta,
                                const PartialColoring& sigma, const PartialColoring& tau,
                                uint32_t t, uint64_t node_cap) {
    if (sigma.domain() != lambda || tau.domain() != lambda)
        fail(ErrorCode::invalid_argument, "verify_saw_decay: sigma/tau must assign exactly lambda");
    if (lambda.contains(v))
        fail(ErrorCode::invalid_argument, "verify_saw_decay: lambda must not contain v");
    for (Vertex u : delta)
        if (!lambda.contains(u))
            fail(ErrorCode::invalid_argument, "verify_saw_decay: delta must be a subset of lambda");
    for (auto [u, c] : sigma.items())
        if (auto ct = tau.get(u); ct && *ct != c && !delta.contains(u))
            fail(ErrorCode::invalid_argument,
                 "verify_saw_decay: sigma and tau differ outside delta");
    const SawTree tree = build_saw_tree(inst.g, v, 2 * t, node_cap);
    auto cutset = find_permissive_cutset(inst, tree, delta, t);
    if (!cutset) fail(ErrorCode::no_cutset, "verify_saw_decay: no permissive cutset found");
    SawDecayReport report;
    report.cutset = *cutset;
    const Marginal ms = exact_marginal(inst, v, sigma);
    const Marginal mt = exact_marginal(inst, v, tau);
    report.lhs = error_function(ms, mt);
    report.rhs = decay_bound(inst, tree, *cutset);
    report.holds = report.lhs <= report.rhs + 1e-9;
    return report;
}

std::string format_saw_tree(const SawTree& tree, const Cutset* cutset) {
    std::vector<char> mark(tree.nodes.size(), 0);
    if (cutset)
        for (uint32_t id : *cutset)
            if (id < mark.size()) mark[id] = 1;
    std::ostringstream os;
    // depth-first so the dump reads as an indented outline
    std::vector<uint32_t> stack{0};
    while (!stack.empty()) {
        const uint32_t id = stack.back();
        stack.pop_back();
        const SawNode& node = tree.nodes[id];
        for (uint32_t i = 0; i < node.depth; ++i) os << "  ";
        os << node.depth << ' ' << node.vertex;
        if (mark[id]) os << " [S]";
        os << '\n';
        for (uint32_t k = node.num_children; k-- > 0;) stack.push_back(node.first_child + k);
    }
    return os.str();
}

}  // namespace ssmix
