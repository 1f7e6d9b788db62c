// Permissive blocks, boundary surgery and the block-level verification
// harness: telescopic product identity, single-vertex marginal bounds and the
// one-step block decay inequality.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coloring.hpp"
#include "graph.hpp"

namespace ssmix {

struct PermissiveBlock {
    VertexSet block;  // B, contains the seed vertex
    // boundary edges (u_i in B, v_i outside B), sorted by (u_i, v_i);
    // the order fixes the index i used by surgery
    std::vector<std::pair<Vertex, Vertex>> boundary_edges;
};

// Closure of {v} under "absorb any adjacent vertex u with |L(u)| <= d(u)+1".
// Every boundary vertex of the result is open by construction. Error
// block_spans_graph when the closure absorbs all of V.
PermissiveBlock minimal_permissive_block(const ListColoringInstance& inst, Vertex v);

// Instance after deleting B and removing pi(u_k) from L(v_k) for k < i and
// rho(u_k) from L(v_k) for k > i (nothing at k = i); removals that miss a
// list are no-ops. The instance keeps the original vertex numbering: block
// vertices are isolated and pinned to a single color, so every count picks up
// a factor of exactly 1 for them and marginals of surviving vertices match
// the vertex-deleted instance.
struct SurgeryResult {
    ListColoringInstance instance;
    std::vector<std::pair<Vertex, Color>> removed_colors;  // (vertex, color) actually removed
};

SurgeryResult surgery(const ListColoringInstance& inst, const PermissiveBlock& block, size_t i,
                      const PartialColoring& pi, const PartialColoring& rho);

struct TelescopicReport {
    Rational lhs;  // mu_B^sigma(pi) / mu_B^sigma(rho)
    Rational rhs;  // product over boundary edges of (1 - P_i(pi_i)) / (1 - P_i(rho_i))
    bool equal = false;
};

// Exact rational identity check of the telescopic product. sigma must live at
// distance >= 2 from B; pi, rho must be proper on B. `drop_factor` (1-based)
// omits one factor from the product — a fault-injection hook used to confirm
// the harness can fail; 0 checks the real identity.
TelescopicReport verify_telescopic_recursion(const ListColoringInstance& inst,
                                             const PermissiveBlock& block,
                                             const PartialColoring& pi, const PartialColoring& rho,
                                             const VertexSet& lambda, const PartialColoring& sigma,
                                             size_t drop_factor = 0);

struct MarginalBoundsReport {
    bool upper_applicable = false;  // |L(v)| > d(v)+1 and v not conditioned
    bool upper_ok = false;          // mu(x) <= 1/(|L(v)| - d(v)) for all x in L(v)
    bool lower_applicable = false;  // v permissive and dist(v, domain(cond)) >= 2
    bool lower_ok = false;          // mu(x) >= 1/(|L(v)| * 2^{d(v)}) for all x in L(v)
    std::string note;               // which precondition ruled a bound out
};

MarginalBoundsReport check_marginal_bounds(const ListColoringInstance& inst, Vertex v,
                                           const PartialColoring& cond);

struct BlockDecayReport {
    double lhs = 0;  // error_function at v under sigma vs tau
    double rhs = 0;  // sum over boundary edges of the weighted surgered errors
    bool holds = false;
    PartialColoring pi_star, rho_star;  // maximizing pair over L*(B)
};

// One step of the block recursion: brute-forces (pi, rho) over the proper
// block colorings L*(B) to maximize the block error function, then compares
// error_function(mu_v^sigma, mu_v^tau) against
// sum_i [1/(|L(v_i)| - d(v_i) - 1)] * error_function(mu_i^sigma, mu_i^tau),
// where mu_i is the marginal of v_i in the i-th surgered instance and the
// weight uses the original instance's list size and degree at v_i.
BlockDecayReport verify_block_decay_step(const ListColoringInstance& inst, Vertex v,
                                         const PermissiveBlock& block, const VertexSet& lambda,
                                         const VertexSet& delta, const PartialColoring& sigma,
                                         const PartialColoring& tau);

// All proper colorings of `block` drawn from the lists (L*(B)), in
// lexicographic order; guarded by a budget on |L(B)|.
std::vector<PartialColoring> enumerate_proper_block_colorings(const ListColoringInstance& inst,
                                                              const VertexSet& block,
                                                              uint64_t budget = 4'000'000);

}  // namespace ssmix
