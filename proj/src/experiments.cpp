#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "binomial.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace ssmix {

namespace {

using ordered_json = nlohmann::ordered_json;

// Runs fn(0..count-1) on `jobs` threads; cells must be independent.
void parallel_for(uint32_t jobs, size_t count, const std::function<void(size_t)>& fn) {
    jobs = static_cast<uint32_t>(std::min<size_t>(std::max<uint32_t>(jobs, 1), count));
    if (jobs <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (uint32_t j = 0; j < jobs; ++j) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<Vertex> random_subset(const std::vector<Vertex>& pool, Rng& rng, double keep_prob) {
    std::vector<Vertex> out;
    for (Vertex v : pool)
        if (uniform_open01(rng) < keep_prob) out.push_back(v);
    return out;
}

std::vector<Vertex> random_nonempty_subset(const std::vector<Vertex>& pool, Rng& rng) {
    auto out = random_subset(pool, rng, 0.5);
    if (out.empty() && !pool.empty()) out.push_back(pool[uniform_below(rng, pool.size())]);
    return out;
}

Color random_list_color(ColorMask list, uint32_t q, Rng& rng) {
    uint32_t pick = static_cast<uint32_t>(uniform_below(rng, mask_size(list)));
    for (Color c = 1; c <= q; ++c) {
        if (!mask_has(list, c)) continue;
        if (pick == 0) return c;
        --pick;
    }
    fail(ErrorCode::internal, "random color from empty list");
}

// JSON has no inf/nan literals; encode them as strings.
ordered_json json_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

uint64_t pair_cell(uint32_t radius, uint32_t pair) {
    return static_cast<uint64_t>(radius) * 1000000u + pair;
}

uint64_t corpus_cell(uint32_t family, uint32_t index, uint32_t attempt) {
    return (static_cast<uint64_t>(family) << 40) | (static_cast<uint64_t>(index) << 12) | attempt;
}

}  // namespace

std::vector<uint64_t> ExperimentConfig::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<uint64_t> out;
    out.reserve(seed_count);
    for (uint32_t i = 0; i < seed_count; ++i) out.push_back(seed + i);
    return out;
}

void ExperimentConfig::validate() const {
    if (profile != "assumption" && profile != "explore")
        fail(ErrorCode::invalid_argument, "profile must be \"assumption\" or \"explore\"");
    if (graph != "gnp" && graph != "frozen_path")
        fail(ErrorCode::invalid_argument, "graph must be \"gnp\" or \"frozen_path\"");
    if (n == 0) fail(ErrorCode::invalid_argument, "n must be positive");
    if (q == 0 || q > kMaxColors) fail(ErrorCode::invalid_argument, "q out of range");
    if (d < 0) fail(ErrorCode::invalid_argument, "d must be nonnegative");
    if (gadget_length < 2) fail(ErrorCode::invalid_argument, "gadget_length must be at least 2");
    if (n_min < 2 || n_min > n_max) fail(ErrorCode::invalid_argument, "bad corpus size range");
    if (q_min < 3 || q_min > q_max || q_max > kMaxColors)
        fail(ErrorCode::invalid_argument, "bad corpus palette range");
    if (d_min < 1 || d_min > d_max) fail(ErrorCode::invalid_argument, "bad degree range");
    if (fq_n == 0) fail(ErrorCode::invalid_argument, "fq_n must be positive");
    if (spacing == 0) fail(ErrorCode::invalid_argument, "spacing must be positive");
    const bool gate = q >= alpha * d + beta && alpha > 2.0 && beta >= 23.0;
    if (!gate) {
        std::ostringstream msg;
        msg << "parameters violate the q >= alpha*d + beta regime (q=" << q << ", alpha=" << alpha
            << ", beta=" << beta << ", d=" << d << ")";
        if (profile == "assumption") fail(ErrorCode::invalid_argument, msg.str());
        std::cerr << "warning: " << msg.str() << "\n";
    }
}

namespace {

// json's get<unsigned> happily wraps negative inputs, so gate by type first
template <typename T>
T json_unsigned(const ordered_json& v, const std::string& key) {
    if (!v.is_number_unsigned())
        fail(ErrorCode::parse_error, "config: \"" + key + "\" must be a nonnegative integer");
    const uint64_t raw = v.get<uint64_t>();
    if (raw > std::numeric_limits<T>::max())
        fail(ErrorCode::parse_error, "config: \"" + key + "\" is out of range");
    return static_cast<T>(raw);
}

template <typename T>
std::vector<T> json_unsigned_vec(const ordered_json& v, const std::string& key) {
    if (!v.is_array())
        fail(ErrorCode::parse_error, "config: \"" + key + "\" must be an array");
    std::vector<T> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(json_unsigned<T>(e, key));
    return out;
}

double json_double(const ordered_json& v, const std::string& key) {
    if (!v.is_number())
        fail(ErrorCode::parse_error, "config: \"" + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        fail(ErrorCode::parse_error, std::string("config: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::parse_error, "config: top level must be an object");
    ExperimentConfig cfg;
    try {
        for (auto& [key, value] : j.items()) {
            if (key == "seed") cfg.seed = json_unsigned<uint64_t>(value, key);
            else if (key == "seed_count") cfg.seed_count = json_unsigned<uint32_t>(value, key);
            else if (key == "seeds") cfg.seeds = json_unsigned_vec<uint64_t>(value, key);
            else if (key == "n") cfg.n = json_unsigned<uint32_t>(value, key);
            else if (key == "d") cfg.d = json_double(value, key);
            else if (key == "q") cfg.q = json_unsigned<uint32_t>(value, key);
            else if (key == "alpha") cfg.alpha = json_double(value, key);
            else if (key == "beta") cfg.beta = json_double(value, key);
            else if (key == "profile") cfg.profile = value.get<std::string>();
            else if (key == "graph") cfg.graph = value.get<std::string>();
            else if (key == "gadget_length") cfg.gadget_length = json_unsigned<uint32_t>(value, key);
            else if (key == "radii") cfg.radii = json_unsigned_vec<uint32_t>(value, key);
            else if (key == "pairs_per_radius") cfg.pairs_per_radius = json_unsigned<uint32_t>(value, key);
            else if (key == "t_values") cfg.t_values = json_unsigned_vec<uint32_t>(value, key);
            else if (key == "instances") cfg.instances = json_unsigned<uint32_t>(value, key);
            else if (key == "n_min") cfg.n_min = json_unsigned<uint32_t>(value, key);
            else if (key == "n_max") cfg.n_max = json_unsigned<uint32_t>(value, key);
            else if (key == "q_min") cfg.q_min = json_unsigned<uint32_t>(value, key);
            else if (key == "q_max") cfg.q_max = json_unsigned<uint32_t>(value, key);
            else if (key == "node_cap") cfg.node_cap = json_unsigned<uint64_t>(value, key);
            else if (key == "oracle_budget") cfg.oracle_budget = json_unsigned<uint32_t>(value, key);
            else if (key == "burnin") cfg.burnin = json_unsigned<uint64_t>(value, key);
            else if (key == "samples") cfg.samples = json_unsigned<uint64_t>(value, key);
            else if (key == "spacing") cfg.spacing = json_unsigned<uint64_t>(value, key);
            else if (key == "glauber_instances") cfg.glauber_instances = json_unsigned<uint32_t>(value, key);
            else if (key == "d_min") cfg.d_min = json_unsigned<uint32_t>(value, key);
            else if (key == "d_max") cfg.d_max = json_unsigned<uint32_t>(value, key);
            else if (key == "fq_n") cfg.fq_n = json_unsigned<uint64_t>(value, key);
            else if (key == "jobs") cfg.jobs = json_unsigned<uint32_t>(value, key);
            else fail(ErrorCode::parse_error, "config: unknown key \"" + key + "\"");
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::parse_error, std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ListColoringInstance frozen_path_gadget(uint32_t path_length, uint32_t q) {
    if (path_length < 2) fail(ErrorCode::invalid_argument, "gadget path needs at least 2 vertices");
    if (q < 3 || q > kMaxColors) fail(ErrorCode::invalid_argument, "gadget needs 3 <= q <= 64");
    const uint32_t pendants = q - 2;
    const uint32_t n = path_length + path_length * pendants;
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<ColorMask> lists(n, mask_upto(q));
    for (uint32_t i = 0; i + 1 < path_length; ++i) edges.emplace_back(i, i + 1);
    for (uint32_t i = 0; i < path_length; ++i) {
        for (uint32_t p = 0; p < pendants; ++p) {
            const Vertex w = path_length + i * pendants + p;
            edges.emplace_back(i, w);
            lists[w] = color_bit(3 + p);  // pendant pinned to color 3+p
        }
    }
    ListColoringInstance inst;
    inst.g = Graph::from_edges(n, edges);
    inst.q = q;
    inst.lists = std::move(lists);
    inst.validate();
    return inst;
}

namespace {

ListColoringInstance make_experiment_instance(const ExperimentConfig& cfg, uint64_t seed) {
    if (cfg.graph == "frozen_path") return frozen_path_gadget(cfg.gadget_length, cfg.q);
    return ListColoringInstance::q_coloring(generate_gnp(cfg.n, cfg.d, seed), cfg.q);
}

// Boundary-pair sampling works entirely inside the window G[ball + boundary]:
// conditioning on the full boundary localizes the marginal at v, so window
// feasibility is the operative notion. sigma restricts an exact uniform
// proper coloring of the window to the boundary; tau redraws the Delta colors
// from the raw lists and is kept once it is proper on the boundary subgraph
// and extends to a proper coloring of the window (exact count).
struct PairSample {
    PartialColoring sigma, tau;
    VertexSet delta;
};

std::optional<PairSample> sample_boundary_pair(const ListColoringInstance& window,
                                               const VertexSet& boundary, Rng& rng) {
    PartialColoring psi;
    try {
        psi = sample_proper(window, PartialColoring{}, rng);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::infeasible) return std::nullopt;
        throw;
    }
    PairSample out;
    out.sigma = psi.restricted_to(boundary);
    out.delta = VertexSet(random_nonempty_subset(boundary.items(), rng));
    for (int attempt = 0; attempt < 30; ++attempt) {
        PartialColoring tau = out.sigma;
        for (Vertex w : out.delta) tau.set(w, random_list_color(window.lists[w], window.q, rng));
        if (tau == out.sigma) continue;
        bool proper = true;
        for (Vertex w : out.delta) {
            for (Vertex u : window.g.neighbors(w)) {
                const std::optional<Color> cu = tau.get(u);
                if (cu && *cu == *tau.get(w)) {
                    proper = false;
                    break;
                }
            }
            if (!proper) break;
        }
        if (!proper) continue;
        if (!is_feasible(window, tau)) continue;
        out.tau = std::move(tau);
        return out;
    }
    return std::nullopt;
}

double fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0, sxx = 0;
    for (const auto& [x, y] : points) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / sxx;
}

}  // namespace

DecayResult run_decay_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto seeds = cfg.seed_list();
    std::vector<std::vector<DecayRecord>> per_seed(seeds.size());

    parallel_for(cfg.jobs, seeds.size(), [&](size_t si) {
        const uint64_t seed = seeds[si];
        const ListColoringInstance inst = make_experiment_instance(cfg, seed);
        const Vertex v = 0;
        uint32_t r_max = 0;
        for (uint32_t r : cfg.radii) r_max = std::max(r_max, r);
        {
            VertexSet probe = ball(inst.g, v, r_max);
            for (Vertex w : vertex_boundary(inst.g, probe)) probe.insert(w);
            if (probe.size() > cfg.oracle_budget)
                fail(ErrorCode::budget_exceeded,
                     "largest ball plus boundary exceeds the oracle budget");
        }
        std::vector<DecayRecord>& records = per_seed[si];
        for (uint32_t r : cfg.radii) {
            DecayRecord rec;
            rec.seed = seed;
            rec.n = inst.g.n();
            rec.radius = r;
            const VertexSet region = ball(inst.g, v, r);
            const VertexSet boundary = vertex_boundary(inst.g, region);
            if (!boundary.empty()) {
                VertexSet window = region;
                for (Vertex w : boundary) window.insert(w);
                const InducedInstance sub = induced_instance(inst, window);
                const Vertex v_sub = static_cast<Vertex>(sub.to_new[v]);
                std::vector<Vertex> bd_sub;
                for (Vertex w : boundary) bd_sub.push_back(static_cast<Vertex>(sub.to_new[w]));
                const VertexSet boundary_sub{std::move(bd_sub)};
                for (uint32_t p = 0; p < cfg.pairs_per_radius; ++p) {
                    Rng rng = make_stream(seed, kStreamPairs, pair_cell(r, p));
                    const auto pair = sample_boundary_pair(sub.instance, boundary_sub, rng);
                    if (!pair) {
                        ++rec.skipped;
                        continue;
                    }
                    const Marginal ms = exact_marginal(sub.instance, v_sub, pair->sigma);
                    const Marginal mt = exact_marginal(sub.instance, v_sub, pair->tau);
                    rec.max_tv = std::max(rec.max_tv, tv_distance(ms, mt));
                    rec.max_error = std::max(rec.max_error, error_function(ms, mt));
                    ++rec.pairs;
                }
            }
            const uint32_t t = r / 2;
            if (t >= 1) {
                try {
                    const SawTree tree = build_saw_tree(inst.g, v, 2 * t, cfg.node_cap);
                    const auto cutset = find_permissive_cutset(inst, tree, boundary, t);
                    if (cutset) rec.bound = decay_bound(inst, tree, *cutset);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::budget_exceeded) throw;
                }
            }
            records.push_back(std::move(rec));
        }
    });

    DecayResult result;
    for (size_t si = 0; si < seeds.size(); ++si) {
        std::vector<std::pair<double, double>> points;
        for (const DecayRecord& rec : per_seed[si])
            if (rec.pairs > 0 && rec.max_tv > 0)
                points.emplace_back(static_cast<double>(rec.radius), std::log(rec.max_tv));
        const double slope = fit_slope(points);
        result.slope_by_seed[seeds[si]] = slope;
        for (DecayRecord rec : per_seed[si]) {
            rec.slope = slope;
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

std::string decay_csv(const DecayResult& result, const ExperimentConfig& cfg) {
    std::string out = "seed,n,d,q,radius,pairs,skipped,max_tv,max_error_fn,decay_bound,fitted_slope\n";
    for (const DecayRecord& rec : result.records) {
        out += std::to_string(rec.seed) + ',' + std::to_string(rec.n) + ',' + format_double(cfg.d) +
               ',' + std::to_string(cfg.q) + ',' + std::to_string(rec.radius) + ',' +
               std::to_string(rec.pairs) + ',' + std::to_string(rec.skipped) + ',' +
               format_double(rec.max_tv) + ',' + format_double(rec.max_error) + ',' +
               (rec.bound ? format_double(*rec.bound) : std::string()) + ',' +
               format_double(rec.slope) + '\n';
    }
    return out;
}

std::vector<CutsetRecord> run_cutset_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto seeds = cfg.seed_list();
    std::vector<CutsetRecord> rows(cfg.t_values.size());
    for (size_t ti = 0; ti < cfg.t_values.size(); ++ti) rows[ti].t = cfg.t_values[ti];

    enum : uint8_t { kFail = 0, kSuccess = 1, kSkip = 2 };
    std::vector<std::vector<uint8_t>> outcome(cfg.t_values.size(),
                                              std::vector<uint8_t>(seeds.size(), kFail));

    parallel_for(cfg.jobs, seeds.size(), [&](size_t si) {
        const ListColoringInstance inst = make_experiment_instance(cfg, seeds[si]);
        const Vertex v = 0;
        const std::vector<int64_t> dist = bfs_distances(inst.g, v);
        for (size_t ti = 0; ti < cfg.t_values.size(); ++ti) {
            const uint32_t t = cfg.t_values[ti];
            std::vector<Vertex> far;
            for (Vertex u = 0; u < inst.g.n(); ++u)
                if (dist[u] == kUnreachable || dist[u] > 2 * static_cast<int64_t>(t))
                    far.push_back(u);
            try {
                const SawTree tree = build_saw_tree(inst.g, v, 2 * t, cfg.node_cap);
                const auto cutset = find_permissive_cutset(inst, tree, VertexSet(far), t);
                outcome[ti][si] = cutset ? kSuccess : kFail;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::budget_exceeded) throw;
                outcome[ti][si] = kSkip;
            }
        }
    });

    for (size_t ti = 0; ti < cfg.t_values.size(); ++ti) {
        CutsetRecord& row = rows[ti];
        for (uint8_t o : outcome[ti]) {
            ++row.seeds_run;
            if (o == kSuccess) ++row.successes;
            if (o == kSkip) ++row.skipped;
        }
        const uint32_t usable = row.seeds_run - row.skipped;
        row.frequency = usable ? static_cast<double>(row.successes) / usable : 0.0;
    }
    return rows;
}

std::string cutset_csv(const std::vector<CutsetRecord>& rows, const ExperimentConfig& cfg) {
    std::string out = "t,n,d,q,seeds,successes,skipped,frequency\n";
    for (const CutsetRecord& row : rows) {
        out += std::to_string(row.t) + ',' + std::to_string(cfg.n) + ',' + format_double(cfg.d) +
               ',' + std::to_string(cfg.q) + ',' + std::to_string(row.seeds_run) + ',' +
               std::to_string(row.successes) + ',' + std::to_string(row.skipped) + ',' +
               format_double(row.frequency) + '\n';
    }
    return out;
}

namespace {

// Random small corpus instance: G(n, d/n) with either full palettes or
// per-vertex thinned lists. Retries until feasible.
struct CorpusDraw {
    ListColoringInstance inst;
    uint32_t n = 0, q = 0;
    double d = 0;
    bool full_lists = true;
};

CorpusDraw draw_corpus_instance(uint32_t n_min, uint32_t n_max, uint32_t q_min, uint32_t q_max,
                                Rng& rng) {
    for (;;) {
        CorpusDraw out;
        out.n = n_min + static_cast<uint32_t>(uniform_below(rng, n_max - n_min + 1));
        out.q = q_min + static_cast<uint32_t>(uniform_below(rng, q_max - q_min + 1));
        out.d = 1.0 + 1.5 * uniform_open01(rng);
        out.inst = ListColoringInstance::q_coloring(generate_gnp(out.n, out.d, rng()), out.q);
        out.full_lists = uniform_open01(rng) < 0.5;
        if (!out.full_lists) {
            for (Vertex v = 0; v < out.n; ++v) {
                // Drop up to q-2 random colors, keeping lists of size >= 2.
                const uint32_t drops = static_cast<uint32_t>(uniform_below(rng, out.q - 1));
                for (uint32_t k = 0; k < drops; ++k) {
                    const Color c = 1 + static_cast<Color>(uniform_below(rng, out.q));
                    if (mask_size(out.inst.lists[v]) > 2) out.inst.lists[v] &= ~color_bit(c);
                }
            }
        }
        if (is_feasible(out.inst, PartialColoring{})) return out;
    }
}

ordered_json corpus_params(const CorpusDraw& draw) {
    ordered_json p = ordered_json::object();
    p["n"] = draw.n;
    p["q"] = draw.q;
    p["d"] = draw.d;
    p["m"] = draw.inst.g.m;
    p["full_lists"] = draw.full_lists;
    return p;
}

void emit(LemmaCorpusResult& result, const char* corpus, uint32_t index, const char* lemma,
          ordered_json params, double lhs, double rhs, bool verdict) {
    ordered_json line = ordered_json::object();
    line["schema"] = 1;
    line["corpus"] = corpus;
    line["instance"] = index;
    line["lemma"] = lemma;
    line["params"] = std::move(params);
    line["lhs"] = json_number(lhs);
    line["rhs"] = json_number(rhs);
    line["verdict"] = verdict;
    result.lines.push_back(line.dump());
    ++result.checks;
    if (!verdict) ++result.failures;
}

// Corpus A: SAW-tree decay bound (strong and weak variants) on instances where
// a permissive cutset exists for the chosen t.
void corpus_saw(const ExperimentConfig& cfg, LemmaCorpusResult& result) {
    for (uint32_t index = 0; index < cfg.instances; ++index) {
        for (uint32_t attempt = 0;; ++attempt) {
            if (attempt >= 400)
                fail(ErrorCode::internal, "corpus generation stalled (saw family)");
            Rng rng = make_stream(cfg.seed, kStreamCorpus, corpus_cell(1, index, attempt));
            CorpusDraw draw = draw_corpus_instance(cfg.n_min, cfg.n_max, cfg.q_min, cfg.q_max, rng);
            const ListColoringInstance& inst = draw.inst;
            const Vertex v = 0;
            const std::vector<int64_t> dist = bfs_distances(inst.g, v);
            std::vector<Vertex> far;
            for (Vertex u = 1; u < inst.g.n(); ++u)
                if (dist[u] == kUnreachable || dist[u] >= 3) far.push_back(u);
            if (far.empty()) continue;
            const VertexSet delta(random_nonempty_subset(far, rng));
            std::vector<Vertex> extra_pool;
            for (Vertex u = 1; u < inst.g.n(); ++u)
                if (!delta.contains(u)) extra_pool.push_back(u);
            VertexSet lambda = delta;
            for (Vertex u : random_subset(extra_pool, rng, 0.3)) lambda.insert(u);

            const uint32_t t = 1;
            SawTree tree;
            try {
                tree = build_saw_tree(inst.g, v, 2 * t, cfg.node_cap);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::budget_exceeded) throw;
                continue;
            }
            if (!find_permissive_cutset(inst, tree, delta, t)) continue;

            const PartialColoring psi = sample_proper(inst, PartialColoring{}, rng);
            const PartialColoring sigma = psi.restricted_to(lambda);
            PartialColoring agree;
            for (const auto& [u, c] : sigma.items())
                if (!delta.contains(u)) agree.set(u, c);
            const PartialColoring phi = sample_proper(inst, agree, rng);
            const PartialColoring tau = phi.restricted_to(lambda);

            ordered_json params = corpus_params(draw);
            params["t"] = t;
            params["delta_size"] = delta.size();
            params["lambda_size"] = lambda.size();

            const SawDecayReport strong =
                verify_saw_decay(inst, v, lambda, delta, sigma, tau, t, cfg.node_cap);
            emit(result, "saw", index, "saw_decay_ssm", params, strong.lhs, strong.rhs,
                 strong.holds);
            const SawDecayReport weak =
                verify_saw_decay(inst, v, delta, delta, psi.restricted_to(delta),
                                 phi.restricted_to(delta), t, cfg.node_cap);
            emit(result, "saw", index, "saw_decay_wsm", params, weak.lhs, weak.rhs, weak.holds);
            break;
        }
    }
}

// Corpus B: block-level lemmas around the minimal permissive block of vertex 0
// (telescopic identity, surgery gap invariant, marginal bounds, local
// feasibility of block colorings, and the one-step block decay bound).
void corpus_block(const ExperimentConfig& cfg, LemmaCorpusResult& result) {
    const uint32_t count = std::max<uint32_t>(100, cfg.instances / 2);
    for (uint32_t index = 0; index < count; ++index) {
        for (uint32_t attempt = 0;; ++attempt) {
            if (attempt >= 400)
                fail(ErrorCode::internal, "corpus generation stalled (block family)");
            Rng rng = make_stream(cfg.seed, kStreamCorpus, corpus_cell(2, index, attempt));
            CorpusDraw draw = draw_corpus_instance(cfg.n_min, cfg.n_max, cfg.q_min, cfg.q_max, rng);
            const ListColoringInstance& inst = draw.inst;
            const Vertex v = 0;
            PermissiveBlock block;
            try {
                block = minimal_permissive_block(inst, v);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::block_spans_graph) throw;
                continue;
            }
            if (block.boundary_edges.empty()) continue;
            const std::vector<int64_t> dist = bfs_distances(inst.g, block.block);
            std::vector<Vertex> far;
            for (Vertex u = 0; u < inst.g.n(); ++u)
                if (dist[u] == kUnreachable || dist[u] >= 2) far.push_back(u);
            if (far.empty()) continue;
            const VertexSet delta(random_nonempty_subset(far, rng));

            // keep L*(B) enumerations (here and inside the decay step) cheap
            double block_assignments = 1;
            for (Vertex b : block.block) block_assignments *= inst.list_size(b);
            if (block_assignments > 2e5) continue;

            const PartialColoring sigma =
                sample_proper(inst, PartialColoring{}, rng).restricted_to(delta);
            const PartialColoring tau =
                sample_proper(inst, PartialColoring{}, rng).restricted_to(delta);

            std::vector<PartialColoring> block_colorings =
                enumerate_proper_block_colorings(inst, block.block);
            if (block_colorings.empty()) continue;  // cannot happen on feasible instances
            const PartialColoring& pi = block_colorings[uniform_below(rng, block_colorings.size())];
            const PartialColoring& rho =
                block_colorings[uniform_below(rng, block_colorings.size())];

            ordered_json params = corpus_params(draw);
            params["block_size"] = block.block.size();
            params["boundary_edges"] = block.boundary_edges.size();
            params["delta_size"] = delta.size();

            const TelescopicReport tel =
                verify_telescopic_recursion(inst, block, pi, rho, delta, sigma);
            emit(result, "block", index, "telescopic_identity", params, to_double(tel.lhs),
                 to_double(tel.rhs), tel.equal);

            // Surgery must not shrink any survivor's list-size-minus-degree gap.
            int64_t min_gap_change = std::numeric_limits<int64_t>::max();
            for (size_t i = 1; i <= block.boundary_edges.size(); ++i) {
                const SurgeryResult s = surgery(inst, block, i, pi, rho);
                for (Vertex u = 0; u < inst.g.n(); ++u) {
                    if (block.block.contains(u)) continue;
                    const int64_t before = static_cast<int64_t>(inst.list_size(u)) -
                                           static_cast<int64_t>(inst.g.degree(u));
                    const int64_t after = static_cast<int64_t>(s.instance.list_size(u)) -
                                          static_cast<int64_t>(s.instance.g.degree(u));
                    min_gap_change = std::min(min_gap_change, after - before);
                }
            }
            emit(result, "block", index, "surgery_gap", params,
                 static_cast<double>(min_gap_change), 0.0, min_gap_change >= 0);

            bool bounds_ok = true;
            uint32_t bounds_checked = 0;
            for (Vertex u = 0; u < inst.g.n(); ++u) {
                if (delta.contains(u)) continue;
                const MarginalBoundsReport rep = check_marginal_bounds(inst, u, sigma);
                if (rep.upper_applicable || rep.lower_applicable) ++bounds_checked;
                if (rep.upper_applicable && !rep.upper_ok) bounds_ok = false;
                if (rep.lower_applicable && !rep.lower_ok) bounds_ok = false;
            }
            {
                ordered_json p2 = params;
                p2["vertices_checked"] = bounds_checked;
                emit(result, "block", index, "marginal_bounds", p2, bounds_ok ? 1.0 : 0.0, 1.0,
                     bounds_ok);
            }

            // Every list assignment of the block that is proper on the block
            // must extend to the whole instance when the condition sits at
            // distance >= 2 from the block.
            {
                double assignments = 1;
                for (Vertex b : block.block) assignments *= static_cast<double>(inst.list_size(b));
                if (assignments <= 100000) {
                    const std::vector<Vertex>& bverts = block.block.items();
                    std::vector<Color> colors(bverts.size(), 0);
                    bool local_ok = true;
                    uint32_t tested = 0;
                    std::function<void(size_t)> walk = [&](size_t i) {
                        if (!local_ok) return;
                        if (i == bverts.size()) {
                            PartialColoring pc;
                            for (size_t k = 0; k < bverts.size(); ++k) pc.set(bverts[k], colors[k]);
                            const bool proper = is_proper(inst, pc, block.block);
                            const bool extends =
                                count_extensions(inst, PartialColoring::merge(sigma, pc)) > 0;
                            ++tested;
                            if (proper != extends) local_ok = false;
                            return;
                        }
                        for (Color c = 1; c <= inst.q; ++c) {
                            if (!inst.has_color(bverts[i], c)) continue;
                            colors[i] = c;
                            walk(i + 1);
                        }
                    };
                    walk(0);
                    ordered_json p2 = params;
                    p2["assignments"] = tested;
                    emit(result, "block", index, "local_feasibility", p2, local_ok ? 1.0 : 0.0,
                         1.0, local_ok);
                }
            }

            const BlockDecayReport step =
                verify_block_decay_step(inst, v, block, delta, delta, sigma, tau);
            emit(result, "block", index, "block_decay_step", params, step.lhs, step.rhs,
                 step.holds);
            break;
        }
    }
}

// Corpus C: whenever the open vertices outside {v} and Lambda separate v from
// Lambda, the error function between any two feasible conditionings is finite.
void corpus_finiteness(const ExperimentConfig& cfg, LemmaCorpusResult& result) {
    const uint32_t count = std::max<uint32_t>(50, cfg.instances / 4);
    for (uint32_t index = 0; index < count; ++index) {
        for (uint32_t attempt = 0;; ++attempt) {
            if (attempt >= 600)
                fail(ErrorCode::internal, "corpus generation stalled (finiteness family)");
            Rng rng = make_stream(cfg.seed, kStreamCorpus, corpus_cell(3, index, attempt));
            CorpusDraw draw = draw_corpus_instance(cfg.n_min, std::min<uint32_t>(cfg.n_max, 8),
                                                   cfg.q_min, cfg.q_max, rng);
            const ListColoringInstance& inst = draw.inst;
            const Vertex v = 0;
            std::vector<Vertex> pool;
            for (Vertex u = 1; u < inst.g.n(); ++u) pool.push_back(u);
            const uint32_t lam_size = 1 + static_cast<uint32_t>(uniform_below(rng, 3));
            if (pool.size() < lam_size) continue;
            std::vector<Vertex> lam_vec;
            for (uint32_t k = 0; k < lam_size; ++k) {
                const size_t pick = uniform_below(rng, pool.size());
                lam_vec.push_back(pool[pick]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            std::sort(lam_vec.begin(), lam_vec.end());
            const VertexSet lambda(lam_vec);

            // The candidate separator: open vertices outside {v} and Lambda.
            std::vector<uint8_t> blocked(inst.g.n(), 0);
            for (Vertex u = 0; u < inst.g.n(); ++u)
                if (u != v && !lambda.contains(u) && inst.slack(u) > 0) blocked[u] = 1;
            // BFS from v avoiding the separator: no Lambda vertex may be reached.
            std::vector<uint8_t> seen(inst.g.n(), 0);
            std::vector<Vertex> queue{v};
            seen[v] = 1;
            bool separated = true;
            for (size_t head = 0; head < queue.size() && separated; ++head) {
                for (Vertex w : inst.g.neighbors(queue[head])) {
                    if (seen[w] || blocked[w]) continue;
                    if (lambda.contains(w)) {
                        separated = false;
                        break;
                    }
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
            if (!separated) continue;

            // Enumerate all feasible conditionings of Lambda.
            double assignments = 1;
            for (Vertex u : lam_vec) assignments *= static_cast<double>(inst.list_size(u));
            if (assignments > 4096) continue;
            std::vector<Marginal> marginals;
            std::vector<Color> colors(lam_vec.size(), 0);
            std::function<void(size_t)> walk = [&](size_t i) {
                if (i == lam_vec.size()) {
                    PartialColoring pc;
                    for (size_t k = 0; k < lam_vec.size(); ++k) pc.set(lam_vec[k], colors[k]);
                    try {
                        marginals.push_back(exact_marginal(inst, v, pc));
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::infeasible) throw;
                    }
                    return;
                }
                for (Color c = 1; c <= inst.q; ++c) {
                    if (!inst.has_color(lam_vec[i], c)) continue;
                    colors[i] = c;
                    walk(i + 1);
                }
            };
            walk(0);
            if (marginals.size() < 2) continue;

            double max_err = 0;
            bool all_finite = true;
            for (size_t a = 0; a < marginals.size(); ++a)
                for (size_t b = a + 1; b < marginals.size(); ++b) {
                    const double e = error_function(marginals[a], marginals[b]);
                    if (!std::isfinite(e)) all_finite = false;
                    max_err = std::max(max_err, e);
                }

            ordered_json params = corpus_params(draw);
            params["lambda_size"] = lam_vec.size();
            params["conditionings"] = marginals.size();
            emit(result, "finiteness", index, "separator_finiteness", params, max_err,
                 std::numeric_limits<double>::infinity(), all_finite);
            break;
        }
    }
}

}  // namespace

LemmaCorpusResult run_lemma_corpus(const ExperimentConfig& cfg) {
    cfg.validate();
    LemmaCorpusResult result;
    corpus_saw(cfg, result);
    corpus_block(cfg, result);
    corpus_finiteness(cfg, result);
    return result;
}

std::vector<FqRow> run_fq_table(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<FqRow> rows;
    for (uint32_t d = cfg.d_min; d <= cfg.d_max; ++d) {
        FqRow row;
        row.d = d;
        row.n = cfg.fq_n;
        row.q = 2 * d + 4;
        row.expected_f = expected_f(BinomialSpec::near_degree(d, cfg.fq_n), row.q);
        row.margin = 1.0 / d - row.expected_f;
        rows.push_back(row);
    }
    return rows;
}

std::string fq_csv(const std::vector<FqRow>& rows) {
    std::string out = "d,n,q,expected_f,1/d,margin\n";
    for (const FqRow& row : rows) {
        out += std::to_string(row.d) + ',' + std::to_string(row.n) + ',' + std::to_string(row.q) +
               ',' + format_double(row.expected_f) + ',' + format_double(1.0 / row.d) + ',' +
               format_double(row.margin) + '\n';
    }
    return out;
}

namespace {

// Greedy high-degree-first proper coloring with chronological backtracking,
// as a flat color vector (0 = unassigned). cond is pre-assigned and fixed.
std::vector<Color> initial_coloring_vector(const ListColoringInstance& inst,
                                           const PartialColoring& cond) {
    std::vector<Color> state(inst.g.n(), 0);
    for (const auto& [v, c] : cond.items()) {
        if (!inst.has_color(v, c)) fail(ErrorCode::invalid_argument, "condition color not in list");
        state[v] = c;
    }
    for (const auto& [v, c] : cond.items())
        for (Vertex u : inst.g.neighbors(v))
            if (state[u] == c) fail(ErrorCode::invalid_argument, "condition is not proper");
    std::vector<Vertex> order;
    for (Vertex v = 0; v < inst.g.n(); ++v)
        if (!cond.assigned(v)) order.push_back(v);
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return inst.g.degree(a) > inst.g.degree(b); });
    std::vector<Color> chosen(order.size(), 0);
    uint64_t budget = 2000000;
    size_t i = 0;
    while (i < order.size()) {
        const Vertex v = order[i];
        ColorMask avail = inst.lists[v];
        for (Vertex u : inst.g.neighbors(v))
            if (state[u] != 0) avail &= ~color_bit(state[u]);
        // Resume after the previously tried color when backtracking.
        avail &= ~mask_upto(chosen[i]);
        if (avail != 0) {
            if (budget-- == 0)
                fail(ErrorCode::no_initial_coloring, "initial coloring budget exhausted");
            const Color c = static_cast<Color>(__builtin_ctzll(avail)) + 1;
            chosen[i] = c;
            state[v] = c;
            ++i;
        } else {
            if (budget-- == 0)
                fail(ErrorCode::no_initial_coloring, "initial coloring budget exhausted");
            chosen[i] = 0;
            if (i == 0) fail(ErrorCode::no_initial_coloring, "no proper initial coloring found");
            --i;
            state[order[i]] = 0;
        }
    }
    return state;
}

Color heat_bath_update(const ListColoringInstance& inst, std::vector<Color>& state, Vertex v,
                       Rng& rng) {
    ColorMask avail = inst.lists[v];
    for (Vertex u : inst.g.neighbors(v)) avail &= ~color_bit(state[u]);
    // The current color is unconstrained by its own neighbors, so avail != 0.
    const Color c = random_list_color(avail, inst.q, rng);
    state[v] = c;
    return c;
}

}  // namespace

PartialColoring glauber_sample(const ListColoringInstance& inst, const PartialColoring& cond,
                               uint64_t steps, uint64_t seed) {
    inst.validate();
    std::vector<Color> state = initial_coloring_vector(inst, cond);
    std::vector<Vertex> free;
    for (Vertex v = 0; v < inst.g.n(); ++v)
        if (!cond.assigned(v)) free.push_back(v);
    if (!free.empty()) {
        Rng rng = make_stream(seed, kStreamGlauber);
        for (uint64_t step = 0; step < steps; ++step)
            heat_bath_update(inst, state, free[uniform_below(rng, free.size())], rng);
    }
    PartialColoring out;
    for (Vertex v = 0; v < inst.g.n(); ++v) out.set(v, state[v]);
    return out;
}

std::vector<GlauberRecord> run_glauber_check(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<GlauberRecord> rows(cfg.glauber_instances);
    parallel_for(cfg.jobs, rows.size(), [&](size_t idx) {
        // Small full-palette instance with q >= maxdeg + 2 so the chain mixes.
        ListColoringInstance inst;
        for (uint32_t attempt = 0;; ++attempt) {
            if (attempt >= 200) fail(ErrorCode::internal, "glauber instance generation stalled");
            Rng rng = make_stream(cfg.seed, kStreamCorpus,
                                  corpus_cell(4, static_cast<uint32_t>(idx), attempt));
            const uint32_t n =
                cfg.n_min + static_cast<uint32_t>(uniform_below(rng, cfg.n_max - cfg.n_min + 1));
            const double d = 1.0 + 1.5 * uniform_open01(rng);
            const Graph g = generate_gnp(n, d, rng());
            uint32_t maxdeg = 0;
            for (Vertex v = 0; v < n; ++v) maxdeg = std::max(maxdeg, g.degree(v));
            const uint32_t q_floor = std::max(cfg.q_min, maxdeg + 2);
            if (q_floor > cfg.q_max) continue;
            const uint32_t q =
                q_floor + static_cast<uint32_t>(uniform_below(rng, cfg.q_max - q_floor + 1));
            inst = ListColoringInstance::q_coloring(g, q);
            break;
        }
        const Marginal exact = exact_marginal(inst, 0, PartialColoring{});
        std::vector<Color> state = initial_coloring_vector(inst, PartialColoring{});
        Rng rng = make_stream(cfg.seed, kStreamGlauber, idx);
        std::vector<uint64_t> counts(inst.q + 1, 0);
        const uint64_t total_steps = cfg.burnin + cfg.samples * cfg.spacing;
        uint64_t taken = 0;
        for (uint64_t step = 0; step < total_steps; ++step) {
            heat_bath_update(inst, state, static_cast<Vertex>(uniform_below(rng, inst.g.n())), rng);
            if (step >= cfg.burnin && (step - cfg.burnin) % cfg.spacing == 0 &&
                taken < cfg.samples) {
                ++counts[state[0]];
                ++taken;
            }
        }
        double tv = 0;
        for (Color c = 1; c <= inst.q; ++c) {
            const double emp = static_cast<double>(counts[c]) / static_cast<double>(taken);
            tv += std::abs(emp - exact.prob_double(c));
        }
        tv /= 2;
        GlauberRecord row;
        row.instance = static_cast<uint32_t>(idx);
        row.n = inst.g.n();
        row.q = inst.q;
        row.burnin = cfg.burnin;
        row.samples = taken;
        row.spacing = cfg.spacing;
        row.tv = tv;
        row.ok = tv < 0.02;
        rows[idx] = row;
    });
    return rows;
}

std::string glauber_csv(const std::vector<GlauberRecord>& rows) {
    std::string out = "instance,n,q,burnin,samples,spacing,tv,ok\n";
    for (const GlauberRecord& row : rows) {
        out += std::to_string(row.instance) + ',' + std::to_string(row.n) + ',' +
               std::to_string(row.q) + ',' + std::to_string(row.burnin) + ',' +
               std::to_string(row.samples) + ',' + std::to_string(row.spacing) + ',' +
               format_double(row.tv) + ',' + (row.ok ? "1" : "0") + '\n';
    }
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace ssmix
