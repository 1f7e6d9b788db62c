#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "coloring.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace ssmix;
using ssmix::testing::brute_count;
using ssmix::testing::brute_marginal_counts;
using ssmix::testing::chromatic_count_dc;
using ssmix::testing::SmallGraph;

namespace {

ListColoringInstance cycle_instance(uint32_t n, uint32_t q) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
    edges.emplace_back(0, n - 1);
    return ListColoringInstance::q_coloring(Graph::from_edges(n, edges), q);
}

// Random small instance; lists thinned but never empty unless allow_empty.
ListColoringInstance random_instance(Rng& rng, uint32_t n_max, uint32_t q_max, bool allow_empty) {
    const uint32_t n = 2 + static_cast<uint32_t>(uniform_below(rng, n_max - 1));
    const uint32_t q = 2 + static_cast<uint32_t>(uniform_below(rng, q_max - 1));
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (uniform_below(rng, 100) < 35) edges.emplace_back(u, v);
    ListColoringInstance inst = ListColoringInstance::q_coloring(Graph::from_edges(n, edges), q);
    for (Vertex v = 0; v < n; ++v) {
        ColorMask m = 0;
        for (Color c = 1; c <= q; ++c)
            if (uniform_below(rng, 100) < 70) m |= color_bit(c);
        if (m == 0 && !allow_empty) m = color_bit(1 + static_cast<Color>(uniform_below(rng, q)));
        inst.lists[v] = m;
    }
    return inst;
}

PartialColoring random_condition(const ListColoringInstance& inst, Rng& rng, uint32_t max_size) {
    PartialColoring cond;
    const uint32_t want = static_cast<uint32_t>(uniform_below(rng, max_size + 1));
    for (uint32_t k = 0; k < want; ++k) {
        const Vertex v = static_cast<Vertex>(uniform_below(rng, inst.g.n()));
        if (cond.assigned(v) || inst.lists[v] == 0) continue;
        std::vector<Color> options;
        for (Color c = 1; c <= inst.q; ++c)
            if (inst.has_color(v, c)) options.push_back(c);
        cond.set(v, options[uniform_below(rng, options.size())]);
    }
    return cond;
}

}  // namespace

TEST_CASE("mask helpers") {
    CHECK(mask_size(0) == 0);
    CHECK(mask_size(mask_upto(5)) == 5);
    CHECK(mask_upto(64) == ~ColorMask{0});
    CHECK(mask_has(mask_upto(3), 3));
    CHECK_FALSE(mask_has(mask_upto(3), 4));
    CHECK(color_bit(1) == 1);
    CHECK(color_bit(64) == (ColorMask{1} << 63));
}

TEST_CASE("instance validation") {
    ListColoringInstance inst = cycle_instance(4, 3);
    CHECK(inst.list_size(0) == 3);
    CHECK(inst.slack(0) == 0);  // |L| - d - 1 = 3 - 2 - 1
    CHECK_NOTHROW(inst.validate());
    inst.lists[2] |= color_bit(4);  // outside the palette
    CHECK_THROWS_AS(inst.validate(), Error);
    inst.lists.pop_back();
    CHECK_THROWS_AS(inst.validate(), Error);
    CHECK_THROWS_AS(ListColoringInstance::q_coloring(Graph{}, 65), Error);
    CHECK_THROWS_AS(ListColoringInstance::q_coloring(Graph{}, 0), Error);
}

TEST_CASE("partial coloring basics") {
    PartialColoring pc;
    CHECK(pc.empty());
    pc.set(4, 2);
    pc.set(1, 3);
    pc.set(4, 1);  // overwrite
    CHECK(pc.size() == 2);
    CHECK(pc.get(4) == Color{1});
    CHECK(pc.get(1) == Color{3});
    CHECK_FALSE(pc.get(0).has_value());
    CHECK(pc.domain().items() == std::vector<Vertex>{1, 4});
    CHECK(pc.items() == std::vector<std::pair<Vertex, Color>>{{1, 3}, {4, 1}});

    const PartialColoring r = pc.restricted_to(VertexSet(std::vector<Vertex>{4, 9}));
    CHECK(r.size() == 1);
    CHECK(r.get(4) == Color{1});

    PartialColoring other;
    other.set(7, 2);
    other.set(1, 3);  // agrees
    const PartialColoring merged = PartialColoring::merge(pc, other);
    CHECK(merged.size() == 3);
    other.set(1, 2);  // now conflicts
    CHECK_THROWS_AS(PartialColoring::merge(pc, other), Error);
}

TEST_CASE("is_proper semantics") {
    const ListColoringInstance inst = cycle_instance(4, 3);
    PartialColoring pc;
    pc.set(0, 1);
    pc.set(1, 2);
    CHECK(is_proper(inst, pc, VertexSet(std::vector<Vertex>{0, 1})));
    pc.set(1, 1);
    CHECK_FALSE(is_proper(inst, pc, VertexSet(std::vector<Vertex>{0, 1})));
    // domain mismatch and out-of-list colors are errors, not false
    CHECK_THROWS_AS(is_proper(inst, pc, VertexSet(std::vector<Vertex>{0})), Error);
    PartialColoring bad;
    bad.set(0, 7);
    CHECK_THROWS_AS(is_proper(inst, bad, VertexSet(std::vector<Vertex>{0})), Error);
}

TEST_CASE("frozen counting values") {
    CHECK(count_extensions(cycle_instance(4, 3), {}) == 18);
    CHECK(count_extensions(cycle_instance(3, 3), {}) == 6);
    CHECK(count_extensions(cycle_instance(5, 2), {}) == 0);  // odd cycle, 2 colors

    // K4 with 3 colors has none
    ListColoringInstance k4 = ListColoringInstance::q_coloring(
        Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}), 3);
    CHECK(count_extensions(k4, {}) == 0);

    // empty graph: independent palettes
    CHECK(count_extensions(ListColoringInstance::q_coloring(Graph::from_edges(3, {}), 2), {}) == 8);

    // path a-b-c with lists {1}, {1,2}, {2}: a forces b=2, clashing with c
    ListColoringInstance path = ListColoringInstance::q_coloring(
        Graph::from_edges(3, {{0, 1}, {1, 2}}), 2);
    path.lists[0] = color_bit(1);
    path.lists[2] = color_bit(2);
    CHECK(count_extensions(path, {}) == 0);

    // conditioned count: C4, q=3, one corner pinned
    PartialColoring pin;
    pin.set(0, 1);
    CHECK(count_extensions(cycle_instance(4, 3), pin) == 6);
}

TEST_CASE("counting matches plain enumeration on random instances") {
    Rng rng = make_stream(2024, 90, 1);
    for (int it = 0; it < 150; ++it) {
        const ListColoringInstance inst = random_instance(rng, 8, 6, true);
        const PartialColoring cond = random_condition(inst, rng, 2);
        CHECK(count_extensions(inst, cond) == brute_count(inst, cond));
    }
}

TEST_CASE("counting matches deletion-contraction on full palettes") {
    Rng rng = make_stream(2024, 90, 2);
    for (int it = 0; it < 60; ++it) {
        const uint32_t n = 3 + static_cast<uint32_t>(uniform_below(rng, 6));
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (uniform_below(rng, 100) < 40) edges.emplace_back(u, v);
        const Graph g = Graph::from_edges(n, edges);
        for (uint32_t q : {2u, 3u, 4u}) {
            const ListColoringInstance inst = ListColoringInstance::q_coloring(g, q);
            CHECK(count_extensions(inst, {}) == chromatic_count_dc(SmallGraph::from(g), q));
        }
    }
}

TEST_CASE("frozen marginal: opposite corner of C4") {
    PartialColoring pin;
    pin.set(0, 1);
    const Marginal m = exact_marginal(cycle_instance(4, 3), 2, pin);
    CHECK(m.prob(1) == Rational(2, 3));
    CHECK(m.prob(2) == Rational(1, 6));
    CHECK(m.prob(3) == Rational(1, 6));
    CHECK(m.support() == mask_upto(3));
}

TEST_CASE("marginals match brute-force counts on random instances") {
    Rng rng = make_stream(2024, 90, 3);
    int done = 0;
    for (int it = 0; it < 200 && done < 80; ++it) {
        const ListColoringInstance inst = random_instance(rng, 8, 6, false);
        const PartialColoring cond = random_condition(inst, rng, 2);
        const Vertex v = static_cast<Vertex>(uniform_below(rng, inst.g.n()));
        if (cond.assigned(v)) continue;
        const std::vector<BigInt> counts = brute_marginal_counts(inst, v, cond);
        BigInt total = 0;
        for (const BigInt& c : counts) total += c;
        if (total == 0) {
            CHECK_THROWS_AS(exact_marginal(inst, v, cond), Error);
            continue;
        }
        const Marginal m = exact_marginal(inst, v, cond);
        for (Color c = 1; c <= inst.q; ++c) CHECK(m.prob(c) == Rational(counts[c - 1], total));
        ++done;
    }
    CHECK(done >= 50);
}

TEST_CASE("marginal precondition errors") {
    PartialColoring pin;
    pin.set(0, 1);
    CHECK_THROWS_AS(exact_marginal(cycle_instance(4, 3), 0, pin), Error);  // v conditioned
    CHECK_THROWS_AS(exact_marginal(cycle_instance(4, 3), 9, {}), Error);   // out of range
    ListColoringInstance dead = cycle_instance(3, 3);
    dead.lists[1] = 0;
    CHECK_THROWS_AS(exact_marginal(dead, 0, {}), Error);  // infeasible
}

TEST_CASE("uniform sampling: properness, conditioning, uniformity") {
    const ListColoringInstance inst = cycle_instance(4, 3);
    PartialColoring cond;
    cond.set(1, 2);
    Rng rng = make_stream(2024, 90, 4);
    std::map<std::vector<Color>, int> seen;
    const int trials = 6000;
    for (int it = 0; it < trials; ++it) {
        const PartialColoring full = sample_proper(inst, cond, rng);
        REQUIRE(full.size() == inst.g.n());
        CHECK(full.get(1) == Color{2});
        std::vector<Color> key;
        for (Vertex v = 0; v < inst.g.n(); ++v) {
            const Color c = *full.get(v);
            for (Vertex u : inst.g.neighbors(v)) CHECK(*full.get(u) != c);
            key.push_back(c);
        }
        seen[key] += 1;
    }
    // C4 with one vertex pinned: 6 extensions, each should get ~1/6.
    REQUIRE(seen.size() == 6);
    for (const auto& [key, count] : seen)
        CHECK(std::abs(count / double(trials) - 1.0 / 6) < 0.03);
}

TEST_CASE("sampling matches exact marginals on a random instance") {
    Rng gen = make_stream(2024, 90, 5);
    const ListColoringInstance inst = random_instance(gen, 7, 5, false);
    if (count_extensions(inst, {}) == 0) return;  // draw again next seed bump if ever hit
    const Marginal m = exact_marginal(inst, 0, {});
    Rng rng = make_stream(2024, 90, 6);
    std::vector<int> counts(inst.q + 1, 0);
    const int trials = 4000;
    for (int it = 0; it < trials; ++it) ++counts[*sample_proper(inst, {}, rng).get(0)];
    double tv = 0;
    for (Color c = 1; c <= inst.q; ++c)
        tv += std::abs(counts[c] / double(trials) - m.prob_double(c));
    CHECK(tv / 2 < 0.03);
}

TEST_CASE("sampling an infeasible condition fails loudly") {
    ListColoringInstance dead = cycle_instance(3, 3);
    dead.lists[0] = color_bit(1);
    dead.lists[1] = color_bit(1);
    Rng rng = make_stream(1, 2, 3);
    CHECK_THROWS_AS(sample_proper(dead, {}, rng), Error);
}

TEST_CASE("tv distance and error function: frozen pairs and conventions") {
    Marginal a, b;
    a.q = b.q = 2;
    a.p = {Rational(1, 2), Rational(1, 2)};
    b.p = {Rational(1, 4), Rational(3, 4)};
    CHECK(tv_distance(a, b) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(error_function(a, b) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(error_function(a, a) == 0.0);
    CHECK(tv_distance(a, a) == 0.0);

    // shared zero colors: the 0/0 = 1 convention keeps things finite
    Marginal c, d;
    c.q = d.q = 3;
    c.p = {Rational(1, 2), Rational(1, 2), Rational(0)};
    d.p = {Rational(1, 4), Rational(3, 4), Rational(0)};
    CHECK(error_function(c, d) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    // support mismatch is +infinity in both directions
    Marginal e;
    e.q = 3;
    e.p = {Rational(1, 2), Rational(1, 4), Rational(1, 4)};
    CHECK(std::isinf(error_function(c, e)));
    CHECK(std::isinf(error_function(e, c)));
    CHECK(error_function(c, e) > 0);
}

TEST_CASE("error function is symmetric and triangle-ish on random marginals") {
    Rng rng = make_stream(2024, 90, 7);
    for (int it = 0; it < 50; ++it) {
        const ListColoringInstance inst = random_instance(rng, 6, 5, false);
        if (!is_feasible(inst, {})) continue;
        const Marginal m1 = exact_marginal(inst, 0, {});
        PartialColoring cond = random_condition(inst, rng, 1);
        if (cond.assigned(0) || !is_feasible(inst, cond)) continue;
        const Marginal m2 = exact_marginal(inst, 0, cond);
        const double e12 = error_function(m1, m2);
        const double e21 = error_function(m2, m1);
        if (std::isinf(e12)) {
            CHECK(std::isinf(e21));
            continue;
        }
        CHECK(e12 == doctest::Approx(e21).epsilon(1e-9));
        CHECK(e12 >= 0);
        // TV is controlled by the error function: TV <= (e^E - 1)
        CHECK(tv_distance(m1, m2) <= std::expm1(e12) + 1e-12);
    }
}

TEST_CASE("induced instance remaps vertices, edges and lists") {
    ListColoringInstance inst = cycle_instance(5, 4);
    inst.lists[3] = color_bit(2) | color_bit(4);
    const InducedInstance sub = induced_instance(inst, VertexSet(std::vector<Vertex>{1, 3, 4}));
    CHECK(sub.instance.g.n() == 3);
    CHECK(sub.to_old == std::vector<Vertex>{1, 3, 4});
    CHECK(sub.to_new[3] == 1);
    CHECK(sub.to_new[0] == kUnreachable);
    // surviving edges: (3,4) and (4,0 dropped), (0,1 dropped), (1,2 dropped), (2,3 dropped)
    CHECK(sub.instance.g.edges() == std::vector<std::pair<Vertex, Vertex>>{{1, 2}});
    CHECK(sub.instance.lists[1] == (color_bit(2) | color_bit(4)));
}

TEST_CASE("instance text roundtrip") {
    ListColoringInstance inst = cycle_instance(4, 3);
    inst.lists[2] = color_bit(1) | color_bit(3);
    const std::string text = format_instance(inst);
    CHECK(text == "q 3\n4 4\n0 1\n0 3\n1 2\n2 3\n0: 1,2,3\n1: 1,2,3\n2: 1,3\n3: 1,2,3\n");
    const ListColoringInstance back = parse_instance(text);
    CHECK(back.q == inst.q);
    CHECK(back.lists == inst.lists);
    CHECK(back.g.edges() == inst.g.edges());

    Rng rng = make_stream(2024, 90, 8);
    for (int it = 0; it < 30; ++it) {
        const ListColoringInstance r = random_instance(rng, 9, 7, false);
        const ListColoringInstance rr = parse_instance(format_instance(r));
        CHECK(rr.lists == r.lists);
        CHECK(rr.g.edges() == r.g.edges());
    }
}

TEST_CASE("instance parser rejects malformed input") {
    CHECK_THROWS_AS(parse_instance(""), Error);
    CHECK_THROWS_AS(parse_instance("p 3\n1 0\n0: 1\n"), Error);       // bad tag
    CHECK_THROWS_AS(parse_instance("q 0\n1 0\n0: 1\n"), Error);       // bad palette
    CHECK_THROWS_AS(parse_instance("q 3\n1 0\n1: 1\n"), Error);       // wrong vertex id
    CHECK_THROWS_AS(parse_instance("q 3\n1 0\n0: 4\n"), Error);       // color beyond palette
    CHECK_THROWS_AS(parse_instance("q 3\n1 0\n0: 1,1\n"), Error);     // duplicate color
    CHECK_THROWS_AS(parse_instance("q 3\n1 0\n0: 1\nx\n"), Error);    // trailing garbage
    CHECK_THROWS_AS(parse_instance("q 3\n2 0\n0: 1\n"), Error);       // missing list line
}
