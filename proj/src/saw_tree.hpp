// Self-avoiding-walk trees, permissive cutsets and the cutset decay bound
// E_{T,L,S} they certify.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coloring.hpp"
#include "graph.hpp"

namespace ssmix {

inline constexpr uint64_t kDefaultNodeCap = 10'000'000;

struct SawNode {
    Vertex vertex = 0;       // graph vertex this walk endpoint is identified with
    int32_t parent = -1;     // index into SawTree::nodes, -1 for the root
    uint32_t depth = 0;
    uint32_t first_child = 0;
    uint32_t num_children = 0;
};

// Truncated tree of self-avoiding walks from `root`; nodes are stored in BFS
// order so the children of a node are contiguous.
struct SawTree {
    std::vector<SawNode> nodes;
    Vertex root = 0;
    uint32_t depth_limit = 0;

    size_t size() const { return nodes.size(); }
};

// A cutset is a set of tree-node ids (a graph vertex can appear in several
// walks and belong to the cutset in some of them only).
using Cutset = std::vector<uint32_t>;

// Builds the SAW tree down to depth_limit; aborts with budget_exceeded when
// the node count passes node_cap.
SawTree build_saw_tree(const Graph& g, Vertex root, uint32_t depth_limit,
                       uint64_t node_cap = kDefaultNodeCap);

// |L(w)| > d(w) + 1 for u and every neighbor w of u.
bool is_permissive(const ListColoringInstance& inst, Vertex u);

// Greedy search for a permissive cutset in the depth window [t, 2t): walking
// down from the root, the shallowest node per path whose graph vertex is
// permissive and at distance >= 2 from delta joins the cutset and closes its
// subtree. Absent (nullopt) iff some walk reaches depth 2t with no such node.
// Walks that die before depth 2t never reach delta and need no cutset node.
std::optional<Cutset> find_permissive_cutset(const ListColoringInstance& inst,
                                             const SawTree& tree, const VertexSet& delta,
                                             uint32_t t);

// E_{T,L,S}: 3q at a cutset node, otherwise sum over children of
// delta(child) * E(subtree), where delta(u) = 1/(|L(u)| - d(u) - 1) for open
// vertices and 1 otherwise (list size and degree in the original graph).
// Subtrees that end below the depth limit without a cutset node contribute 0.
double decay_bound(const ListColoringInstance& inst, const SawTree& tree, const Cutset& cutset);

struct SawDecayReport {
    double lhs = 0;  // error_function of the two conditioned marginals at v
    double rhs = 0;  // E_{T,L,S}
    bool holds = false;
    Cutset cutset;
};

// Checks the tree bound: builds the SAW tree to depth 2t, finds a permissive
// cutset (error no_cutset when the search fails) and compares
// error_function(mu_v^sigma, mu_v^tau) <= E_{T,L,S} + 1e-9 for feasible
// sigma, tau on lambda differing only inside delta.
SawDecayReport verify_saw_decay(const ListColoringInstance& inst, Vertex v,
                                const VertexSet& lambda, const VertexSet& delta,
                                const PartialColoring& sigma, const PartialColoring& tau,
                                uint32_t t, uint64_t node_cap = kDefaultNodeCap);

// Debug dump: one node per line, indented two spaces per level,
// "depth graph_vertex" with " [S]" appended on cutset nodes.
std::string format_saw_tree(const SawTree& tree, const Cutset* cutset = nullptr);

}  // namespace ssmix
