// C boundary of the shared library: opaque handles over the core types,
// exceptions mapped to status codes, strings passed out as malloc'd copies.
#include "ssmix.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "block_decay.hpp"
#include "coloring.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "graph.hpp"
#include "saw_tree.hpp"

using namespace ssmix;

struct ssmix_graph {
    Graph g;
};

struct ssmix_instance {
    ListColoringInstance inst;
};

namespace {

thread_local std::string g_last_error;

ssmix_status status_of(ErrorCode code) { return static_cast<ssmix_status>(code); }

template <typename Fn>
ssmix_status guard(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return SSMIX_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SSMIX_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SSMIX_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SSMIX_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) fail(ErrorCode::invalid_argument, what);
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string read_file(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, std::string("cannot open ") + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorCode::io_error, std::string("cannot read ") + path);
    return buf.str();
}

void write_file(const char* path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, std::string("cannot open ") + path + " for writing");
    out << text;
    out.flush();
    if (!out) fail(ErrorCode::io_error, std::string("cannot write ") + path);
}

PartialColoring make_cond(const uint32_t* vertices, const uint32_t* colors, size_t len) {
    require(len == 0 || (vertices && colors), "null conditioning arrays");
    PartialColoring cond;
    for (size_t i = 0; i < len; ++i) {
        if (cond.assigned(vertices[i]))
            fail(ErrorCode::invalid_argument, "conditioning repeats a vertex");
        cond.set(vertices[i], colors[i]);
    }
    return cond;
}

}  // namespace

extern "C" {

const char* ssmix_status_name(ssmix_status status) {
    switch (status) {
        case SSMIX_OK: return "ok";
        case SSMIX_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case SSMIX_ERR_PARSE: return "parse_error";
        case SSMIX_ERR_IO: return "io_error";
        case SSMIX_ERR_INFEASIBLE: return "infeasible";
        case SSMIX_ERR_BUDGET_EXCEEDED: return "budget_exceeded";
        case SSMIX_ERR_NO_CUTSET: return "no_cutset";
        case SSMIX_ERR_BLOCK_SPANS_GRAPH: return "block_spans_graph";
        case SSMIX_ERR_NO_INITIAL_COLORING: return "no_initial_coloring";
        case SSMIX_ERR_CHECK_FAILED: return "check_failed";
        case SSMIX_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ssmix_last_error(void) { return g_last_error.c_str(); }

void ssmix_string_free(char* text) { std::free(text); }

ssmix_status ssmix_graph_gnp(uint32_t n, double avg_degree, uint64_t seed, ssmix_graph** out) {
    return guard([&] {
        require(out != nullptr, "null output pointer");
        *out = new ssmix_graph{generate_gnp(n, avg_degree, seed)};
    });
}

ssmix_status ssmix_graph_from_text(const char* text, ssmix_graph** out) {
    return guard([&] {
        require(text != nullptr && out != nullptr, "null argument");
        *out = new ssmix_graph{parse_graph(text)};
    });
}

ssmix_status ssmix_graph_to_text(const ssmix_graph* g, char** out_text) {
    return guard([&] {
        require(g != nullptr && out_text != nullptr, "null argument");
        *out_text = copy_string(format_graph(g->g));
    });
}

ssmix_status ssmix_graph_read(const char* path, ssmix_graph** out) {
    return guard([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new ssmix_graph{parse_graph(read_file(path))};
    });
}

ssmix_status ssmix_graph_write(const ssmix_graph* g, const char* path) {
    return guard([&] {
        require(g != nullptr && path != nullptr, "null argument");
        write_file(path, format_graph(g->g));
    });
}

ssmix_status ssmix_graph_counts(const ssmix_graph* g, uint32_t* out_n, uint64_t* out_m) {
    return guard([&] {
        require(g != nullptr, "null graph");
        if (out_n) *out_n = g->g.n();
        if (out_m) *out_m = g->g.m;
    });
}

void ssmix_graph_free(ssmix_graph* g) { delete g; }

ssmix_status ssmix_instance_q_coloring(const ssmix_graph* g, uint32_t q, ssmix_instance** out) {
    return guard([&] {
        require(g != nullptr && out != nullptr, "null argument");
        *out = new ssmix_instance{ListColoringInstance::q_coloring(g->g, q)};
    });
}

ssmix_status ssmix_instance_frozen_path_gadget(uint32_t path_length, uint32_t q,
                                               ssmix_instance** out) {
    return guard([&] {
        require(out != nullptr, "null output pointer");
        *out = new ssmix_instance{frozen_path_gadget(path_length, q)};
    });
}

ssmix_status ssmix_instance_from_text(const char* text, ssmix_instance** out) {
    return guard([&] {
        require(text != nullptr && out != nullptr, "null argument");
        *out = new ssmix_instance{parse_instance(text)};
    });
}

ssmix_status ssmix_instance_to_text(const ssmix_instance* inst, char** out_text) {
    return guard([&] {
        require(inst != nullptr && out_text != nullptr, "null argument");
        *out_text = copy_string(format_instance(inst->inst));
    });
}

ssmix_status ssmix_instance_read(const char* path, ssmix_instance** out) {
    return guard([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new ssmix_instance{parse_instance(read_file(path))};
    });
}

ssmix_status ssmix_instance_write(const ssmix_instance* inst, const char* path) {
    return guard([&] {
        require(inst != nullptr && path != nullptr, "null argument");
        write_file(path, format_instance(inst->inst));
    });
}

ssmix_status ssmix_instance_counts(const ssmix_instance* inst, uint32_t* out_n, uint64_t* out_m,
                                   uint32_t* out_q) {
    return guard([&] {
        require(inst != nullptr, "null instance");
        if (out_n) *out_n = inst->inst.g.n();
        if (out_m) *out_m = inst->inst.g.m;
        if (out_q) *out_q = inst->inst.q;
    });
}

void ssmix_instance_free(ssmix_instance* inst) { delete inst; }

ssmix_status ssmix_count_extensions(const ssmix_instance* inst, const uint32_t* cond_vertices,
                                    const uint32_t* cond_colors, size_t cond_len,
                                    char** out_decimal) {
    return guard([&] {
        require(inst != nullptr && out_decimal != nullptr, "null argument");
        const BigInt count =
            count_extensions(inst->inst, make_cond(cond_vertices, cond_colors, cond_len));
        *out_decimal = copy_string(count.str());
    });
}

ssmix_status ssmix_exact_marginal(const ssmix_instance* inst, uint32_t v,
                                  const uint32_t* cond_vertices, const uint32_t* cond_colors,
                                  size_t cond_len, double* out_probs) {
    return guard([&] {
        require(inst != nullptr && out_probs != nullptr, "null argument");
        const Marginal m =
            exact_marginal(inst->inst, v, make_cond(cond_vertices, cond_colors, cond_len));
        for (Color c = 1; c <= m.q; ++c) out_probs[c - 1] = m.prob_double(c);
    });
}

ssmix_status ssmix_exact_marginal_text(const ssmix_instance* inst, uint32_t v,
                                       const uint32_t* cond_vertices, const uint32_t* cond_colors,
                                       size_t cond_len, char** out_text) {
    return guard([&] {
        require(inst != nullptr && out_text != nullptr, "null argument");
        const Marginal m =
            exact_marginal(inst->inst, v, make_cond(cond_vertices, cond_colors, cond_len));
        std::ostringstream os;
        for (Color c = 1; c <= m.q; ++c) {
            const Rational& p = m.prob(c);
            os << c << ' ' << boost::multiprecision::numerator(p) << '/'
               << boost::multiprecision::denominator(p) << '\n';
        }
        *out_text = copy_string(os.str());
    });
}

ssmix_status ssmix_saw_report(const ssmix_instance* inst, uint32_t root, uint32_t t,
                              const uint32_t* delta, size_t delta_len, uint64_t node_cap,
                              char** out_text) {
    return guard([&] {
        require(inst != nullptr && out_text != nullptr, "null argument");
        require(delta_len == 0 || delta != nullptr, "null delta array");
        require(t >= 1, "t must be at least 1");
        std::vector<Vertex> delta_vec(delta, delta + delta_len);
        const VertexSet delta_set(std::move(delta_vec));
        if (node_cap == 0) node_cap = kDefaultNodeCap;
        const SawTree tree = build_saw_tree(inst->inst.g, root, 2 * t, node_cap);
        const auto cutset = find_permissive_cutset(inst->inst, tree, delta_set, t);
        if (!cutset)
            fail(ErrorCode::no_cutset, "no permissive cutset in the depth window [t, 2t)");
        std::ostringstream os;
        os << format_saw_tree(tree, &*cutset);
        os << "cutset_size " << cutset->size() << '\n';
        os << "decay_bound " << format_double(decay_bound(inst->inst, tree, *cutset)) << '\n';
        os << "node_count " << tree.size() << '\n';
        *out_text = copy_string(os.str());
    });
}

ssmix_status ssmix_run_decay(const char* config_json, const char* out_path) {
    return guard([&] {
        require(config_json != nullptr && out_path != nullptr, "null argument");
        const ExperimentConfig cfg = config_from_json(config_json);
        write_file(out_path, decay_csv(run_decay_experiment(cfg), cfg));
    });
}

ssmix_status ssmix_run_cutset_sweep(const char* config_json, const char* out_path) {
    return guard([&] {
        require(config_json != nullptr && out_path != nullptr, "null argument");
        const ExperimentConfig cfg = config_from_json(config_json);
        write_file(out_path, cutset_csv(run_cutset_experiment(cfg), cfg));
    });
}

ssmix_status ssmix_run_lemma_corpus(const char* config_json, const char* out_path,
                                    uint32_t* out_checks, uint32_t* out_failures) {
    return guard([&] {
        require(config_json != nullptr && out_path != nullptr, "null argument");
        const ExperimentConfig cfg = config_from_json(config_json);
        const LemmaCorpusResult result = run_lemma_corpus(cfg);
        std::string text;
        for (const std::string& line : result.lines) {
            text += line;
            text += '\n';
        }
        write_file(out_path, text);
        if (out_checks) *out_checks = result.checks;
        if (out_failures) *out_failures = result.failures;
    });
}

ssmix_status ssmix_run_fq_table(const char* config_json, const char* out_path) {
    return guard([&] {
        require(config_json != nullptr && out_path != nullptr, "null argument");
        const ExperimentConfig cfg = config_from_json(config_json);
        write_file(out_path, fq_csv(run_fq_table(cfg)));
    });
}

ssmix_status ssmix_run_glauber_check(const char* config_json, const char* out_path,
                                     uint32_t* out_failures) {
    return guard([&] {
        require(config_json != nullptr && out_path != nullptr, "null argument");
        const ExperimentConfig cfg = config_from_json(config_json);
        const auto rows = run_glauber_check(cfg);
        write_file(out_path, glauber_csv(rows));
        if (out_failures) {
            uint32_t fails = 0;
            for (const auto& row : rows)
                if (!row.ok) ++fails;
            *out_failures = fails;
        }
    });
}

}  // extern "C"
