#include "coloring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ssmix {

namespace {

int bit_index(ColorMask mask, Color c) {
    // position of color c among the set bits of mask
    return mask_size(mask & (color_bit(c) - 1));
}

Color nth_color(ColorMask mask, int k) {
    for (Color c = 1; c <= 64; ++c) {
        if (mask & color_bit(c)) {
            if (k == 0) return c;
            --k;
        }
    }
    fail(ErrorCode::internal, "nth_color: index out of range");
}

// Mutable counting state shared by count/marginal/sample. Works on the
// original vertex ids; assigned or surgically removed vertices are dead
// (live = 0, avail = 0).
struct Worker {
    const Graph& g;
    uint32_t q;
    std::vector<ColorMask> avail;
    std::vector<char> live;
    std::vector<char> seen;  // scratch for component walks

    explicit Worker(const ListColoringInstance& inst)
        : g(inst.g), q(inst.q), avail(inst.lists), live(inst.g.n(), 1), seen(inst.g.n(), 0) {}

    // Folds cond into the state. Returns false on a direct conflict between
    // two adjacent assignments; throws when an assignment is outside a list.
    bool apply(const ListColoringInstance& inst, const PartialColoring& cond) {
        for (auto [v, c] : cond.items()) {
            if (v >= g.n()) fail(ErrorCode::invalid_argument, "condition vertex out of range");
            if (c < 1 || c > inst.q || !inst.has_color(v, c))
                fail(ErrorCode::invalid_argument, "condition assigns a color outside the list");
        }
        for (auto [v, c] : cond.items()) {
            live[v] = 0;
            avail[v] = 0;
        }
        bool ok = true;
        for (auto [v, c] : cond.items()) {
            for (Vertex w : g.adj[v]) {
                if (live[w]) {
                    avail[w] &= ~color_bit(c);
                } else if (auto cw = cond.get(w); cw && *cw == c) {
                    ok = false;
                }
            }
        }
        return ok;
    }

    std::vector<Vertex> component_of(Vertex s) {
        std::vector<Vertex> comp{s};
        seen[s] = 1;
        for (size_t head = 0; head < comp.size(); ++head)
            for (Vertex w : g.adj[comp[head]])
                if (live[w] && !seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
        for (Vertex v : comp) seen[v] = 0;
        return comp;
    }

    // Components of the live subgraph restricted to `scope`.
    std::vector<std::vector<Vertex>> split(const std::vector<Vertex>& scope) {
        std::vector<std::vector<Vertex>> out;
        for (Vertex v : scope)
            if (live[v] && !seen[v]) {
                out.push_back({v});
                auto& comp = out.back();
                seen[v] = 1;
                for (size_t head = 0; head < comp.size(); ++head)
                    for (Vertex w : g.adj[comp[head]])
                        if (live[w] && !seen[w]) {
                            seen[w] = 1;
                            comp.push_back(w);
                        }
            }
        for (auto& comp : out)
            for (Vertex v : comp) seen[v] = 0;
        return out;
    }

    bool is_tree(const std::vector<Vertex>& comp) const {
        size_t twice_edges = 0;
        for (Vertex v : comp)
            for (Vertex w : g.adj[v])
                if (live[w]) ++twice_edges;
        return twice_edges / 2 == comp.size() - 1;
    }

    Vertex pick_pivot(const std::vector<Vertex>& comp) const {
        Vertex best = comp[0];
        size_t best_deg = 0;
        for (Vertex v : comp) {
            size_t deg = 0;
            for (Vertex w : g.adj[v])
                if (live[w]) ++deg;
            if (deg > best_deg || (deg == best_deg && v < best)) {
                best = v;
                best_deg = deg;
            }
        }
        return best;
    }

    // Rooted subtree color weights for an acyclic component.
    // weights[i][k]: proper colorings of the subtree at order[i] when order[i]
    // takes the k-th color of its availability mask.
    struct TreeTables {
        std::vector<Vertex> order;
        std::vector<int32_t> parent;  // index into order, -1 for the root
        std::vector<std::vector<BigInt>> weights;
    };

    TreeTables tree_tables(Vertex root) {
        TreeTables t;
        t.order.push_back(root);
        t.parent.push_back(-1);
        seen[root] = 1;
        for (size_t head = 0; head < t.order.size(); ++head)
            for (Vertex w : g.adj[t.order[head]])
                if (live[w] && !seen[w]) {
                    seen[w] = 1;
                    t.order.push_back(w);
                    t.parent.push_back(static_cast<int32_t>(head));
                }
        for (Vertex v : t.order) seen[v] = 0;
        t.weights.resize(t.order.size());
        for (size_t i = 0; i < t.order.size(); ++i)
            t.weights[i].assign(mask_size(avail[t.order[i]]), BigInt(1));
        // children are folded into parents in reverse BFS order
        for (size_t i = t.order.size(); i-- > 1;) {
            const Vertex v = t.order[i];
            const Vertex pv = t.order[t.parent[i]];
            BigInt sum = 0;
            for (const BigInt& w : t.weights[i]) sum += w;
            auto& pw = t.weights[t.parent[i]];
            const ColorMask pmask = avail[pv];
            int k = 0;
            for (Color c = 1; c <= 64; ++c) {
                const ColorMask bit = color_bit(c);
                if (!(pmask & bit)) continue;
                if (avail[v] & bit)
                    pw[k] *= sum - t.weights[i][bit_index(avail[v], c)];
                else
                    pw[k] *= sum;
                ++k;
            }
        }
        return t;
    }

    BigInt count_tree(const std::vector<Vertex>& comp) {
        TreeTables t = tree_tables(comp[0]);
        BigInt total = 0;
        for (const BigInt& w : t.weights[0]) total += w;
        return total;
    }

    // Live edges of the component that are outside the table's BFS tree.
    std::vector<std::pair<Vertex, Vertex>> non_tree_edges(const TreeTables& t,
                                                          const std::vector<Vertex>& comp) {
        std::vector<int64_t> par(g.n(), -2);
        for (size_t i = 0; i < t.order.size(); ++i)
            par[t.order[i]] = t.parent[i] < 0 ? -1 : static_cast<int64_t>(t.order[t.parent[i]]);
        std::vector<std::pair<Vertex, Vertex>> out;
        for (Vertex u : comp)
            for (Vertex w : g.adj[u])
                if (live[w] && u < w && par[w] != static_cast<int64_t>(u) &&
                    par[u] != static_cast<int64_t>(w))
                    out.emplace_back(u, w);
        return out;
    }

    // Cyclic component: deletion-contraction on an edge outside a spanning
    // tree. Both branches lose a cycle, so the recursion tree has 2^surplus
    // leaves, each a forest handled by the tree fast path; contraction can
    // collapse parallel edges, which only prunes further.
    BigInt count_cyclic(const std::vector<Vertex>& comp) {
        TreeTables t = tree_tables(comp[0]);
        const auto surplus = non_tree_edges(t, comp);
        if (surplus.empty()) fail(ErrorCode::internal, "cyclic component without surplus edge");
        const auto [eu, ev] = surplus.front();

        std::vector<int64_t> idx(g.n(), -1);
        for (size_t i = 0; i < comp.size(); ++i) idx[comp[i]] = static_cast<int64_t>(i);
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (Vertex u : comp)
            for (Vertex w : g.adj[u])
                if (live[w] && u < w)
                    edges.emplace_back(static_cast<Vertex>(idx[u]), static_cast<Vertex>(idx[w]));

        // G - e
        ListColoringInstance del;
        {
            std::vector<std::pair<Vertex, Vertex>> kept;
            const auto cut = std::pair<Vertex, Vertex>(static_cast<Vertex>(idx[eu]),
                                                       static_cast<Vertex>(idx[ev]));
            for (auto e : edges)
                if (e != cut) kept.push_back(e);
            del.g = Graph::from_edges(static_cast<uint32_t>(comp.size()), kept);
            del.q = q;
            del.lists.resize(comp.size());
            for (size_t i = 0; i < comp.size(); ++i) del.lists[i] = avail[comp[i]];
        }
        BigInt total = count_extensions(del, PartialColoring{});

        // G / e: merge ev into eu; an empty merged list kills the branch
        const ColorMask merged = avail[eu] & avail[ev];
        if (merged != 0) {
            const Vertex keep = static_cast<Vertex>(idx[eu]);
            const Vertex gone = static_cast<Vertex>(idx[ev]);
            auto remap = [&](Vertex x) {
                if (x == gone) return keep > gone ? keep - 1 : keep;
                return x > gone ? x - 1 : x;
            };
            std::vector<std::pair<Vertex, Vertex>> kept;
            for (auto [a, b] : edges) {
                const Vertex ra = remap(a), rb = remap(b);
                if (ra == rb) continue;  // the contracted edge itself
                kept.emplace_back(std::min(ra, rb), std::max(ra, rb));
            }
            std::sort(kept.begin(), kept.end());
            kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
            ListColoringInstance con;
            con.g = Graph::from_edges(static_cast<uint32_t>(comp.size()) - 1, kept);
            con.q = q;
            con.lists.resize(comp.size() - 1);
            for (size_t i = 0; i < comp.size(); ++i) {
                const Vertex r = remap(static_cast<Vertex>(i));
                con.lists[r] = avail[comp[i]];
            }
            con.lists[keep > gone ? keep - 1 : keep] = merged;
            total -= count_extensions(con, PartialColoring{});
        }
        return total;
    }

    // Sums over the colors of `pivot`; per_color (when given) receives one
    // weight per set bit of avail[pivot].
    BigInt pivot_sum(Vertex pivot, std::vector<BigInt>* per_color) {
        live[pivot] = 0;
        const auto subcomps = split(g.adj[pivot]);
        BigInt total = 0;
        std::vector<Vertex> stripped;
        const ColorMask pmask = avail[pivot];
        for (Color c = 1; c <= 64; ++c) {
            const ColorMask bit = color_bit(c);
            if (!(pmask & bit)) continue;
            stripped.clear();
            bool dead = false;
            for (Vertex w : g.adj[pivot])
                if (live[w] && (avail[w] & bit)) {
                    avail[w] &= ~bit;
                    stripped.push_back(w);
                    if (avail[w] == 0) dead = true;
                }
            BigInt prod = dead ? BigInt(0) : BigInt(1);
            if (!dead)
                for (const auto& sub : subcomps) {
                    prod *= count_component(sub);
                    if (prod == 0) break;
                }
            total += prod;
            if (per_color) per_color->push_back(std::move(prod));
            for (Vertex w : stripped) avail[w] |= bit;
        }
        live[pivot] = 1;
        return total;
    }

    BigInt count_component(const std::vector<Vertex>& comp) {
        if (comp.size() == 1) return BigInt(mask_size(avail[comp[0]]));
        for (Vertex v : comp)
            if (avail[v] == 0) return BigInt(0);
        if (is_tree(comp)) return count_tree(comp);
        // Deletion-contraction resolves one cycle edge at a time, so its node
        // count grows with the cycle surplus; the color-branching pivot grows
        // with list sizes instead.  Near-forests (the sparse windows, where
        // lists are huge) go to deletion-contraction, denser components to the
        // pivot.
        size_t twice_edges = 0;
        for (Vertex v : comp)
            for (Vertex w : g.adj[v])
                if (live[w]) ++twice_edges;
        const size_t surplus = twice_edges / 2 - (comp.size() - 1);
        if (surplus <= 3) return count_cyclic(comp);
        return pivot_sum(pick_pivot(comp), nullptr);
    }

    BigInt count_all() {
        BigInt total = 1;
        for (Vertex v = 0; v < g.n(); ++v)
            if (live[v] && avail[v] == 0) return BigInt(0);
        // dedupe marks live outside `seen`: the counters below use `seen` as
        // transient BFS scratch and need it clean
        std::vector<char> done(g.n(), 0);
        for (Vertex v = 0; v < g.n(); ++v) {
            if (!live[v] || done[v]) continue;
            auto comp = component_of(v);
            for (Vertex u : comp) done[u] = 1;
            total *= count_component(comp);
            if (total == 0) return total;
        }
        return total;
    }

    // Per-color extension weights at `target` (one entry per set bit of
    // avail[target]); the product of the other components' counts is folded
    // into `other`, which lets the caller detect global infeasibility.
    std::vector<BigInt> marginal_weights(Vertex target, BigInt& other) {
        std::vector<BigInt> w;
        other = 1;
        std::vector<char> done(g.n(), 0);
        for (Vertex v = 0; v < g.n(); ++v) {
            if (!live[v] || done[v]) continue;
            auto comp = component_of(v);
            for (Vertex u : comp) done[u] = 1;
            const bool mine =
                std::find(comp.begin(), comp.end(), target) != comp.end();
            if (mine) {
                bool empty_avail = false;
                for (Vertex u : comp)
                    if (avail[u] == 0) empty_avail = true;
                if (empty_avail) {
                    w.assign(mask_size(avail[target]), BigInt(0));
                } else if (comp.size() > 1 && is_tree(comp)) {
                    TreeTables t = tree_tables(target);
                    w = std::move(t.weights[0]);
                } else if (comp.size() == 1) {
                    w.assign(mask_size(avail[target]), BigInt(1));
                } else {
                    pivot_sum(target, &w);
                }
            } else {
                other *= count_component(comp);
                if (other == 0) return {};
            }
        }
        return w;
    }

    // Draws a uniform proper coloring of the table's spanning tree; colors
    // land in `chosen`, indexed like t.order.
    void draw_tree(const TreeTables& t, std::vector<Color>& chosen, Rng& rng) {
        chosen.assign(t.order.size(), 0);
        for (size_t i = 0; i < t.order.size(); ++i) {
            const Vertex v = t.order[i];
            const ColorMask banned = i == 0 ? 0 : color_bit(chosen[t.parent[i]]);
            BigInt sum = 0;
            int k = 0;
            for (Color c = 1; c <= 64; ++c) {
                if (!(avail[v] & color_bit(c))) continue;
                if (!(color_bit(c) & banned)) sum += t.weights[i][k];
                ++k;
            }
            if (sum == 0) fail(ErrorCode::internal, "tree sampling hit a zero branch");
            BigInt draw = uniform_bigint_below(rng, sum);
            k = 0;
            for (Color c = 1; c <= 64; ++c) {
                if (!(avail[v] & color_bit(c))) continue;
                if (!(color_bit(c) & banned)) {
                    if (draw < t.weights[i][k]) {
                        chosen[i] = c;
                        break;
                    }
                    draw -= t.weights[i][k];
                }
                ++k;
            }
            if (chosen[i] == 0) fail(ErrorCode::internal, "tree sampling draw overflow");
        }
    }

    void sample_component(const std::vector<Vertex>& comp, PartialColoring& out, Rng& rng) {
        if (comp.size() == 1) {
            const ColorMask mask = avail[comp[0]];
            const int count = mask_size(mask);
            if (count == 0) fail(ErrorCode::infeasible, "no proper extension exists");
            out.set(comp[0], nth_color(mask, static_cast<int>(uniform_below(rng, count))));
            live[comp[0]] = 0;
            return;
        }
        for (Vertex v : comp)
            if (avail[v] == 0) fail(ErrorCode::infeasible, "no proper extension exists");
        if (is_tree(comp)) {
            TreeTables t = tree_tables(comp[0]);
            BigInt total = 0;
            for (const BigInt& w : t.weights[0]) total += w;
            if (total == 0) fail(ErrorCode::infeasible, "no proper extension exists");
            std::vector<Color> chosen;
            draw_tree(t, chosen, rng);
            for (size_t i = 0; i < t.order.size(); ++i) out.set(t.order[i], chosen[i]);
            for (Vertex v : t.order) live[v] = 0;
            return;
        }
        // cyclic: rejection against the spanning-forest relaxation. The tree
        // tables ignore non-tree edges, so a forest draw is uniform over the
        // component's proper colorings conditioned on acceptance, and the
        // acceptance rate stays near (1-1/|L|)^surplus when lists are ample.
        {
            TreeTables t = tree_tables(comp[0]);
            BigInt total = 0;
            for (const BigInt& w : t.weights[0]) total += w;
            if (total == 0) fail(ErrorCode::infeasible, "no proper extension exists");
            const auto surplus = non_tree_edges(t, comp);
            std::vector<int64_t> at(g.n(), -1);
            for (size_t i = 0; i < t.order.size(); ++i) at[t.order[i]] = static_cast<int64_t>(i);
            std::vector<Color> chosen;
            for (int round = 0; round < 200; ++round) {
                draw_tree(t, chosen, rng);
                bool ok = true;
                for (auto [u, w] : surplus)
                    if (chosen[at[u]] == chosen[at[w]]) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                for (size_t i = 0; i < t.order.size(); ++i) out.set(t.order[i], chosen[i]);
                for (Vertex v : t.order) live[v] = 0;
                return;
            }
        }
        // tight lists defeat rejection: pick the pivot color from its exact
        // weights, then recurse
        const Vertex pivot = pick_pivot(comp);
        std::vector<BigInt> per_color;
        const BigInt total = pivot_sum(pivot, &per_color);
        if (total == 0) fail(ErrorCode::infeasible, "no proper extension exists");
        BigInt draw = uniform_bigint_below(rng, total);
        const ColorMask pmask = avail[pivot];
        Color chosen = 0;
        int k = 0;
        for (Color c = 1; c <= 64; ++c) {
            if (!(pmask & color_bit(c))) continue;
            if (draw < per_color[k]) {
                chosen = c;
                break;
            }
            draw -= per_color[k];
            ++k;
        }
        if (chosen == 0) fail(ErrorCode::internal, "pivot sampling draw overflow");
        out.set(pivot, chosen);
        live[pivot] = 0;
        avail[pivot] = 0;
        for (Vertex w : g.adj[pivot])
            if (live[w]) avail[w] &= ~color_bit(chosen);
        for (const auto& sub : split(g.adj[pivot])) sample_component(sub, out, rng);
    }
};

}  // namespace

ListColoringInstance ListColoringInstance::q_coloring(Graph graph, uint32_t q) {
    ListColoringInstance inst;
    inst.g = std::move(graph);
    inst.q = q;
    inst.lists.assign(inst.g.n(), mask_upto(q));
    inst.validate();
    return inst;
}

void ListColoringInstance::validate() const {
    if (q < 1 || q > 64) fail(ErrorCode::invalid_argument, "palette size must be in 1..64");
    if (lists.size() != g.n())
        fail(ErrorCode::invalid_argument, "one color list per vertex required");
    for (ColorMask m : lists)
        if (m & ~mask_upto(q)) fail(ErrorCode::invalid_argument, "list color exceeds palette");
}

void PartialColoring::set(Vertex v, Color c) {
    auto it = std::lower_bound(items_.begin(), items_.end(), std::make_pair(v, Color{0}),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != items_.end() && it->first == v)
        it->second = c;
    else
        items_.insert(it, {v, c});
}

std::optional<Color> PartialColoring::get(Vertex v) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), std::make_pair(v, Color{0}),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != items_.end() && it->first == v) return it->second;
    return std::nullopt;
}

VertexSet PartialColoring::domain() const {
    std::vector<Vertex> vs;
    vs.reserve(items_.size());
    for (auto& [v, c] : items_) vs.push_back(v);
    return VertexSet(std::move(vs));
}

PartialColoring PartialColoring::restricted_to(const VertexSet& s) const {
    PartialColoring out;
    for (auto& [v, c] : items_)
        if (s.contains(v)) out.set(v, c);
    return out;
}

PartialColoring PartialColoring::merge(const PartialColoring& a, const PartialColoring& b) {
    PartialColoring out = a;
    for (auto& [v, c] : b.items()) {
        if (auto cur = out.get(v); cur && *cur != c)
            fail(ErrorCode::invalid_argument, "merge: conflicting assignments");
        out.set(v, c);
    }
    return out;
}

ColorMask Marginal::support() const {
    ColorMask s = 0;
    for (Color c = 1; c <= q; ++c)
        if (p[c - 1] > 0) s |= color_bit(c);
    return s;
}

bool is_proper(const ListColoringInstance& inst, const PartialColoring& coloring,
               const VertexSet& s) {
    if (coloring.domain() != s)
        fail(ErrorCode::invalid_argument, "is_proper: coloring must assign exactly s");
    for (auto [v, c] : coloring.items()) {
        if (v >= inst.g.n()) fail(ErrorCode::invalid_argument, "is_proper: vertex out of range");
        if (c < 1 || c > inst.q || !inst.has_color(v, c))
            fail(ErrorCode::invalid_argument, "is_proper: color outside the vertex list");
    }
    for (auto [v, c] : coloring.items())
        for (Vertex w : inst.g.adj[v])
            if (w > v)
                if (auto cw = coloring.get(w); cw && *cw == c) return false;
    return true;
}

BigInt count_extensions(const ListColoringInstance& inst, const PartialColoring& cond) {
    inst.validate();
    Worker worker(inst);
    if (!worker.apply(inst, cond)) return BigInt(0);
    return worker.count_all();
}

bool is_feasible(const ListColoringInstance& inst, const PartialColoring& cond) {
    return count_extensions(inst, cond) > 0;
}

Marginal exact_marginal(const ListColoringInstance& inst, Vertex v, const PartialColoring& cond) {
    inst.validate();
    if (v >= inst.g.n()) fail(ErrorCode::invalid_argument, "exact_marginal: vertex out of range");
    if (cond.assigned(v))
        fail(ErrorCode::invalid_argument, "exact_marginal: vertex is fixed by the condition");
    Worker worker(inst);
    if (!worker.apply(inst, cond))
        fail(ErrorCode::infeasible, "condition admits no proper extension");
    BigInt other = 1;
    std::vector<BigInt> weights = worker.marginal_weights(v, other);
    BigInt total = 0;
    for (const BigInt& w : weights) total += w;
    if (other == 0 || total == 0)
        fail(ErrorCode::infeasible, "condition admits no proper extension");
    Marginal m;
    m.q = inst.q;
    m.p.assign(inst.q, Rational(0));
    int k = 0;
    for (Color c = 1; c <= inst.q; ++c) {
        if (!(worker.avail[v] & color_bit(c))) continue;
        m.p[c - 1] = Rational(weights[k], total);
        ++k;
    }
    return m;
}

PartialColoring sample_proper(const ListColoringInstance& inst, const PartialColoring& cond,
                              Rng& rng) {
    inst.validate();
    Worker worker(inst);
    if (!worker.apply(inst, cond))
        fail(ErrorCode::infeasible, "condition admits no proper extension");
    PartialColoring out = cond;
    for (Vertex v = 0; v < inst.g.n(); ++v) {
        if (!worker.live[v]) continue;
        worker.sample_component(worker.component_of(v), out, rng);
    }
    return out;
}

double tv_distance(const Marginal& a, const Marginal& b) {
    if (a.q != b.q) fail(ErrorCode::invalid_argument, "tv_distance: palette mismatch");
    Rational sum = 0;
    for (Color c = 1; c <= a.q; ++c) {
        Rational d = a.prob(c) - b.prob(c);
        if (d < 0) d = -d;
        sum += d;
    }
    return to_double(sum / 2);
}

double error_function(const Marginal& a, const Marginal& b) {
    if (a.q != b.q) fail(ErrorCode::invalid_argument, "error_function: palette mismatch");
    // Per-color log ratios L(c) = log(a(c)/b(c)) with 0/0 treated as ratio 1;
    // E = max_{x,y} L(x) - L(y) where two infinities of the same sign cancel.
    // A color in one support but not the other forces E = +inf (there is
    // always a color with both probabilities positive or both zero to pair
    // against, since each marginal sums to 1).
    if (a.support() != b.support()) return std::numeric_limits<double>::infinity();
    bool any = false;
    double lo = 0, hi = 0;
    for (Color c = 1; c <= a.q; ++c) {
        if (a.prob(c) == 0) continue;
        const double L = log_rational(a.prob(c) / b.prob(c));
        if (!any) {
            lo = hi = L;
            any = true;
        } else {
            lo = std::min(lo, L);
            hi = std::max(hi, L);
        }
    }
    if (!any) fail(ErrorCode::invalid_argument, "error_function: empty support");
    return hi - lo;
}

InducedInstance induced_instance(const ListColoringInstance& inst, const VertexSet& keep) {
    InducedInstance out;
    out.to_new.assign(inst.g.n(), kUnreachable);
    for (Vertex v : keep) {
        if (v >= inst.g.n()) fail(ErrorCode::invalid_argument, "induced_instance: id out of range");
        out.to_new[v] = static_cast<int64_t>(out.to_old.size());
        out.to_old.push_back(v);
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v : keep)
        for (Vertex w : inst.g.adj[v])
            if (v < w && out.to_new[w] != kUnreachable)
                edges.emplace_back(static_cast<Vertex>(out.to_new[v]),
                                   static_cast<Vertex>(out.to_new[w]));
    out.instance.g = Graph::from_edges(static_cast<uint32_t>(out.to_old.size()), edges);
    out.instance.q = inst.q;
    out.instance.lists.reserve(out.to_old.size());
    for (Vertex v : out.to_old) out.instance.lists.push_back(inst.lists[v]);
    return out;
}

std::string format_instance(const ListColoringInstance& inst) {
    std::ostringstream os;
    os << "q " << inst.q << '\n';
    os << format_graph(inst.g);
    for (Vertex v = 0; v < inst.g.n(); ++v) {
        os << v << ':';
        bool first = true;
        for (Color c = 1; c <= inst.q; ++c)
            if (inst.has_color(v, c)) {
                os << (first ? " " : ",") << c;
                first = false;
            }
        os << '\n';
    }
    return os.str();
}

ListColoringInstance parse_instance(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    uint32_t q = 0;
    if (!(is >> tag >> q) || tag != "q")
        fail(ErrorCode::parse_error, "instance: expected 'q <palette>' header");
    if (q < 1 || q > 64) fail(ErrorCode::parse_error, "instance: palette size must be in 1..64");
    uint64_t n = 0, m = 0;
    if (!(is >> n >> m)) fail(ErrorCode::parse_error, "instance: bad graph header");
    std::ostringstream graph_text;
    graph_text << n << ' ' << m << '\n';
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t u = 0, v = 0;
        if (!(is >> u >> v)) fail(ErrorCode::parse_error, "instance: truncated edge list");
        graph_text << u << ' ' << v << '\n';
    }
    ListColoringInstance inst;
    inst.g = parse_graph(graph_text.str());
    inst.q = q;
    inst.lists.assign(inst.g.n(), 0);
    std::string line;
    std::getline(is, line);  // consume rest of the last edge line
    for (Vertex v = 0; v < inst.g.n(); ++v) {
        if (!std::getline(is, line)) fail(ErrorCode::parse_error, "instance: missing list line");
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            fail(ErrorCode::parse_error, "instance: list line must be 'v: c1,c2,...'");
        uint64_t id = 0;
        try {
            size_t used = 0;
            id = std::stoull(line.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument("");
        } catch (const std::exception&) {
            fail(ErrorCode::parse_error, "instance: bad vertex id on list line");
        }
        if (id != v) fail(ErrorCode::parse_error, "instance: list lines must be in id order");
        std::string rest = line.substr(colon + 1);
        std::istringstream ls(rest);
        std::string item;
        while (std::getline(ls, item, ',')) {
            // tolerate surrounding spaces
            const auto a = item.find_first_not_of(" \t");
            if (a == std::string::npos) continue;
            const auto b = item.find_last_not_of(" \t");
            uint64_t c = 0;
            try {
                size_t used = 0;
                c = std::stoull(item.substr(a, b - a + 1), &used);
                if (used != b - a + 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(ErrorCode::parse_error, "instance: bad color on list line");
            }
            if (c < 1 || c > q) fail(ErrorCode::parse_error, "instance: color outside palette");
            if (inst.lists[v] & color_bit(static_cast<Color>(c)))
                fail(ErrorCode::parse_error, "instance: duplicate color in list");
            inst.lists[v] |= color_bit(static_cast<Color>(c));
        }
    }
    std::string trailing;
    if (is >> trailing) fail(ErrorCode::parse_error, "instance: trailing content");
    inst.validate();
    return inst;
}

}  // namespace ssmix
