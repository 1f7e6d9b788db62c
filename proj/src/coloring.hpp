// List-coloring instances and the exact oracle: proper-extension counting
// (arbitrary precision), exact rational marginals, exact uniform sampling,
// total variation and the two-sided log error function.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "numbers.hpp"

namespace ssmix {

using Color = uint32_t;        // colors are 1..q
using ColorMask = uint64_t;    // bit c-1 set  <=>  color c allowed

inline constexpr uint32_t kMaxColors = 64;

inline int mask_size(ColorMask m) { return __builtin_popcountll(m); }
inline ColorMask color_bit(Color c) { return ColorMask{1} << (c - 1); }
inline bool mask_has(ColorMask m, Color c) { return (m & color_bit(c)) != 0; }
// All colors 1..c as a mask.
inline ColorMask mask_upto(Color c) {
    return c >= kMaxColors ? ~ColorMask{0} : (ColorMask{1} << c) - 1;
}

// A graph plus one color list per vertex, palette {1..q}, q <= 64.
struct ListColoringInstance {
    Graph g;
    uint32_t q = 0;
    std::vector<ColorMask> lists;

    static ListColoringInstance q_coloring(Graph graph, uint32_t q);

    uint32_t list_size(Vertex v) const { return static_cast<uint32_t>(mask_size(lists[v])); }
    bool has_color(Vertex v, Color c) const { return (lists[v] & color_bit(c)) != 0; }
    // list-size slack |L(v)| - d(v) - 1; a vertex is "open" when this is > 0
    int64_t slack(Vertex v) const {
        return static_cast<int64_t>(list_size(v)) - static_cast<int64_t>(g.degree(v)) - 1;
    }
    void validate() const;
};

// Assignment of colors to a subset of vertices, kept sorted by vertex id.
// Invariant: assigned colors are in 1..q of the instance it is used with;
// list membership is checked at use sites.
class PartialColoring {
public:
    PartialColoring() = default;

    void set(Vertex v, Color c);
    std::optional<Color> get(Vertex v) const;
    bool assigned(Vertex v) const { return get(v).has_value(); }
    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<std::pair<Vertex, Color>>& items() const { return items_; }
    VertexSet domain() const;
    PartialColoring restricted_to(const VertexSet& s) const;
    // union of two colorings with disjoint-or-agreeing domains
    static PartialColoring merge(const PartialColoring& a, const PartialColoring& b);
    bool operator==(const PartialColoring&) const = default;

private:
    std::vector<std::pair<Vertex, Color>> items_;
};

// Exact single-vertex marginal; probabilities are exact rationals over the
// palette (0 for colors outside the support).
struct Marginal {
    uint32_t q = 0;
    std::vector<Rational> p;  // size q, index c-1

    const Rational& prob(Color c) const { return p[c - 1]; }
    double prob_double(Color c) const { return to_double(p[c - 1]); }
    ColorMask support() const;
};

// True iff `coloring` (whose domain must equal s) has no monochromatic edge
// inside s. Colors outside the vertex's list are an error, not `false`.
bool is_proper(const ListColoringInstance& inst, const PartialColoring& coloring,
               const VertexSet& s);

// Number of full proper list-colorings extending `cond`. Backtracking in
// descending-degree order with forward pruning, factorized over the connected
// components of the unassigned subgraph after every assignment; acyclic
// components are finished by a per-color subtree DP.
BigInt count_extensions(const ListColoringInstance& inst, const PartialColoring& cond);

bool is_feasible(const ListColoringInstance& inst, const PartialColoring& cond);

// Exact marginal of vertex v given cond (cond must not assign v). Signals
// `infeasible` when cond admits no proper extension.
Marginal exact_marginal(const ListColoringInstance& inst, Vertex v, const PartialColoring& cond);

// Exact uniform sample from the proper extensions of cond (full coloring,
// cond included). Same infeasibility behavior as exact_marginal.
PartialColoring sample_proper(const ListColoringInstance& inst, const PartialColoring& cond,
                              Rng& rng);

// Total variation distance between two marginals over the same palette.
double tv_distance(const Marginal& a, const Marginal& b);

// Two-sided log-ratio error: max_{x,y} [log(a(x)/b(x)) - log(a(y)/b(y))],
// natural log, with 0/0 treated as ratio 1 and inf - inf = 0. Finite exactly
// when the supports coincide; +inf when one support strictly contains a color
// the other lacks.
double error_function(const Marginal& a, const Marginal& b);

// Induced sub-instance on `keep` with compact renumbering; to_new[v] is the
// new id of old vertex v or kUnreachable.
struct InducedInstance {
    ListColoringInstance instance;
    std::vector<Vertex> to_old;
    std::vector<int64_t> to_new;
};
InducedInstance induced_instance(const ListColoringInstance& inst, const VertexSet& keep);

// Instance text format: "q <palette>" header, graph block as in format_graph,
// then one "v: c1,c2,..." line per vertex in id order.
std::string format_instance(const ListColoringInstance& inst);
ListColoringInstance parse_instance(const std::string& text);

}  // namespace ssmix
