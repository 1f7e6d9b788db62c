// ssmix command-line front end. Every computation goes through the public C
// API in ssmix.h; this file only parses arguments, overlays CLI flags onto an
// optional JSON config file and routes file/stdout output.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssmix.h"

namespace {

using ordered_json = nlohmann::ordered_json;

int report(ssmix_status status) {
    if (status == SSMIX_OK) return 0;
    std::cerr << "error: " << ssmix_status_name(status) << ": " << ssmix_last_error() << "\n";
    return static_cast<int>(status);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CLI::ValidationError("cannot open " + path + " for writing");
    out << text;
}

// "u=c" pairs from --cond flags.
void parse_cond(const std::vector<std::string>& specs, std::vector<uint32_t>& vertices,
                std::vector<uint32_t>& colors) {
    for (const std::string& s : specs) {
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--cond expects vertex=color, got \"" + s + "\"");
        try {
            vertices.push_back(static_cast<uint32_t>(std::stoul(s.substr(0, eq))));
            colors.push_back(static_cast<uint32_t>(std::stoul(s.substr(eq + 1))));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--cond expects vertex=color, got \"" + s + "\"");
        }
    }
}

// Overlay of CLI flags onto an optional config file; flags win.
class ConfigBuilder {
public:
    explicit ConfigBuilder(CLI::App* app) : app_(app) {
        app->add_option("--config", config_path_, "JSON config file (flags override it)");
    }

    template <typename T>
    void add(const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app_->add_option(flag, *value, help);
        if constexpr (std::is_same_v<T, std::vector<uint32_t>> ||
                      std::is_same_v<T, std::vector<uint64_t>>)
            opt->delimiter(',');
        setters_.push_back([key, value, opt](ordered_json& cfg) {
            if (opt->count()) cfg[key] = *value;
        });
    }

    std::string build() const {
        ordered_json cfg = ordered_json::object();
        if (!config_path_.empty()) {
            cfg = ordered_json::parse(read_text_file(config_path_), nullptr, false);
            if (cfg.is_discarded() || !cfg.is_object())
                throw CLI::ValidationError("config file is not a JSON object: " + config_path_);
        }
        for (const auto& set : setters_) set(cfg);
        return cfg.dump();
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::vector<std::function<void(ordered_json&)>> setters_;
};

void add_common(ConfigBuilder& cfg) {
    cfg.add<uint64_t>("--seed", "seed", "base seed");
    cfg.add<uint32_t>("--jobs", "jobs", "worker threads");
    cfg.add<std::string>("--profile", "profile", "assumption|explore");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact marginals, cutset certificates and decay experiments for random "
                 "list colorings"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a graph or list-coloring instance");
    struct {
        uint32_t n = 500;
        double d = 2.0;
        uint64_t seed = 1;
        uint32_t q = 0;
        std::string graph = "gnp";
        uint32_t gadget_length = 8;
        std::string out;
    } gen_opt;
    gen->add_option("--n", gen_opt.n, "vertex count");
    gen->add_option("--d", gen_opt.d, "average degree");
    gen->add_option("--seed", gen_opt.seed, "seed");
    gen->add_option("--q", gen_opt.q, "palette size; 0 writes a bare graph");
    gen->add_option("--graph", gen_opt.graph, "gnp|frozen_path")
        ->check(CLI::IsMember({"gnp", "frozen_path"}));
    gen->add_option("--gadget-length", gen_opt.gadget_length, "frozen path length");
    gen->add_option("--out", gen_opt.out, "output path (- for stdout)")->required();

    // marginal
    auto* marginal = app.add_subcommand("marginal", "exact conditioned marginal of one vertex");
    struct {
        std::string instance;
        uint32_t vertex = 0;
        std::vector<std::string> cond;
        bool rational = false;
        bool count = false;
        std::string out = "-";
    } mar_opt;
    marginal->add_option("--instance", mar_opt.instance, "instance file")->required();
    marginal->add_option("--vertex", mar_opt.vertex, "target vertex")->required();
    marginal->add_option("--cond", mar_opt.cond, "conditioning, vertex=color (repeatable)");
    marginal->add_flag("--rational", mar_opt.rational, "print exact rationals");
    marginal->add_flag("--count", mar_opt.count, "also print the proper-extension count");
    marginal->add_option("--out", mar_opt.out, "output path (- for stdout)");

    // saw
    auto* saw = app.add_subcommand("saw", "self-avoiding-walk tree, cutset and decay bound");
    struct {
        std::string instance;
        uint32_t root = 0;
        uint32_t t = 1;
        std::vector<uint32_t> delta;
        uint64_t node_cap = 0;
        std::string out = "-";
    } saw_opt;
    saw->add_option("--instance", saw_opt.instance, "instance file")->required();
    saw->add_option("--root", saw_opt.root, "root vertex");
    saw->add_option("--t", saw_opt.t, "cutset window parameter (tree depth 2t)")->required();
    saw->add_option("--delta", saw_opt.delta, "conditioned vertices (comma separated)")
        ->delimiter(',');
    saw->add_option("--node-cap", saw_opt.node_cap, "tree node budget (0 = default)");
    saw->add_option("--out", saw_opt.out, "output path (- for stdout)");

    // decay
    auto* decay = app.add_subcommand("decay", "boundary-pair correlation decay experiment (CSV)");
    ConfigBuilder decay_cfg(decay);
    add_common(decay_cfg);
    decay_cfg.add<uint32_t>("--seed-count", "seed_count", "number of consecutive seeds");
    decay_cfg.add<std::vector<uint64_t>>("--seeds", "seeds", "explicit seed list");
    decay_cfg.add<uint32_t>("--n", "n", "vertex count");
    decay_cfg.add<double>("--d", "d", "average degree");
    decay_cfg.add<uint32_t>("--q", "q", "palette size");
    decay_cfg.add<double>("--alpha", "alpha", "regime slope");
    decay_cfg.add<double>("--beta", "beta", "regime offset");
    decay_cfg.add<std::string>("--graph", "graph", "gnp|frozen_path");
    decay_cfg.add<uint32_t>("--gadget-length", "gadget_length", "frozen path length");
    decay_cfg.add<std::vector<uint32_t>>("--radii", "radii", "ball radii (comma separated)");
    decay_cfg.add<uint32_t>("--pairs-per-radius", "pairs_per_radius", "boundary pairs per radius");
    decay_cfg.add<uint32_t>("--oracle-budget", "oracle_budget", "max vertices for the oracle");
    decay_cfg.add<uint64_t>("--node-cap", "node_cap", "tree node budget");
    std::string decay_out;
    decay->add_option("--out", decay_out, "CSV output path")->required();

    // cutset-sweep
    auto* sweep = app.add_subcommand("cutset-sweep", "cutset existence frequency over seeds (CSV)");
    ConfigBuilder sweep_cfg(sweep);
    add_common(sweep_cfg);
    sweep_cfg.add<uint32_t>("--seed-count", "seed_count", "number of consecutive seeds");
    sweep_cfg.add<std::vector<uint64_t>>("--seeds", "seeds", "explicit seed list");
    sweep_cfg.add<uint32_t>("--n", "n", "vertex count");
    sweep_cfg.add<double>("--d", "d", "average degree");
    sweep_cfg.add<uint32_t>("--q", "q", "palette size");
    sweep_cfg.add<std::vector<uint32_t>>("--t-values", "t_values", "window parameters");
    sweep_cfg.add<uint64_t>("--node-cap", "node_cap", "tree node budget");
    std::string sweep_out;
    sweep->add_option("--out", sweep_out, "CSV output path")->required();

    // lemma-corpus
    auto* corpus = app.add_subcommand("lemma-corpus",
                                      "randomized lemma checks against the exact oracle (JSONL)");
    ConfigBuilder corpus_cfg(corpus);
    add_common(corpus_cfg);
    corpus_cfg.add<uint32_t>("--instances", "instances", "corpus size");
    corpus_cfg.add<uint32_t>("--n-min", "n_min", "min instance size");
    corpus_cfg.add<uint32_t>("--n-max", "n_max", "max instance size");
    corpus_cfg.add<uint32_t>("--q-min", "q_min", "min palette");
    corpus_cfg.add<uint32_t>("--q-max", "q_max", "max palette");
    std::string corpus_out;
    corpus->add_option("--out", corpus_out, "JSONL output path")->required();

    // fq-table
    auto* fq = app.add_subcommand("fq-table", "expected truncated-reciprocal table (CSV)");
    ConfigBuilder fq_cfg(fq);
    add_common(fq_cfg);
    fq_cfg.add<uint32_t>("--d-min", "d_min", "first degree row");
    fq_cfg.add<uint32_t>("--d-max", "d_max", "last degree row");
    fq_cfg.add<uint64_t>("--fq-n", "fq_n", "binomial trial count n");
    std::string fq_out;
    fq->add_option("--out", fq_out, "CSV output path")->required();

    // glauber-check
    auto* glauber = app.add_subcommand("glauber-check",
                                       "Glauber dynamics vs exact marginals (CSV)");
    ConfigBuilder glauber_cfg(glauber);
    add_common(glauber_cfg);
    glauber_cfg.add<uint64_t>("--burnin", "burnin", "burn-in updates");
    glauber_cfg.add<uint64_t>("--samples", "samples", "samples after burn-in");
    glauber_cfg.add<uint64_t>("--spacing", "spacing", "updates between samples");
    glauber_cfg.add<uint32_t>("--instances", "glauber_instances", "instances to check");
    glauber_cfg.add<uint32_t>("--n-min", "n_min", "min instance size");
    glauber_cfg.add<uint32_t>("--n-max", "n_max", "max instance size");
    glauber_cfg.add<uint32_t>("--q-min", "q_min", "min palette");
    glauber_cfg.add<uint32_t>("--q-max", "q_max", "max palette");
    std::string glauber_out;
    glauber->add_option("--out", glauber_out, "CSV output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            char* text = nullptr;
            if (gen_opt.graph == "frozen_path" || gen_opt.q > 0) {
                ssmix_instance* inst = nullptr;
                ssmix_status st;
                if (gen_opt.graph == "frozen_path") {
                    st = ssmix_instance_frozen_path_gadget(gen_opt.gadget_length,
                                                           gen_opt.q ? gen_opt.q : 3, &inst);
                } else {
                    ssmix_graph* g = nullptr;
                    st = ssmix_graph_gnp(gen_opt.n, gen_opt.d, gen_opt.seed, &g);
                    if (st == SSMIX_OK) {
                        st = ssmix_instance_q_coloring(g, gen_opt.q, &inst);
                        ssmix_graph_free(g);
                    }
                }
                if (st == SSMIX_OK) st = ssmix_instance_to_text(inst, &text);
                ssmix_instance_free(inst);
                if (st != SSMIX_OK) return report(st);
            } else {
                ssmix_graph* g = nullptr;
                ssmix_status st = ssmix_graph_gnp(gen_opt.n, gen_opt.d, gen_opt.seed, &g);
                if (st == SSMIX_OK) st = ssmix_graph_to_text(g, &text);
                ssmix_graph_free(g);
                if (st != SSMIX_OK) return report(st);
            }
            write_output(gen_opt.out, text);
            ssmix_string_free(text);
            return 0;
        }

        if (marginal->parsed()) {
            std::vector<uint32_t> cv, cc;
            parse_cond(mar_opt.cond, cv, cc);
            ssmix_instance* inst = nullptr;
            ssmix_status st = ssmix_instance_read(mar_opt.instance.c_str(), &inst);
            if (st != SSMIX_OK) return report(st);
            std::ostringstream os;
            if (mar_opt.rational) {
                char* text = nullptr;
                st = ssmix_exact_marginal_text(inst, mar_opt.vertex, cv.data(), cc.data(),
                                               cv.size(), &text);
                if (st == SSMIX_OK) {
                    os << text;
                    ssmix_string_free(text);
                }
            } else {
                uint32_t q = 0;
                st = ssmix_instance_counts(inst, nullptr, nullptr, &q);
                if (st == SSMIX_OK) {
                    std::vector<double> probs(q, 0.0);
                    st = ssmix_exact_marginal(inst, mar_opt.vertex, cv.data(), cc.data(),
                                              cv.size(), probs.data());
                    if (st == SSMIX_OK) {
                        char buf[64];
                        for (uint32_t c = 1; c <= q; ++c) {
                            std::snprintf(buf, sizeof(buf), "%.12g", probs[c - 1]);
                            os << c << ' ' << buf << '\n';
                        }
                    }
                }
            }
            if (st == SSMIX_OK && mar_opt.count) {
                char* decimal = nullptr;
                st = ssmix_count_extensions(inst, cv.data(), cc.data(), cv.size(), &decimal);
                if (st == SSMIX_OK) {
                    os << "extensions " << decimal << '\n';
                    ssmix_string_free(decimal);
                }
            }
            ssmix_instance_free(inst);
            if (st != SSMIX_OK) return report(st);
            write_output(mar_opt.out, os.str());
            return 0;
        }

        if (saw->parsed()) {
            ssmix_instance* inst = nullptr;
            ssmix_status st = ssmix_instance_read(saw_opt.instance.c_str(), &inst);
            if (st != SSMIX_OK) return report(st);
            char* text = nullptr;
            st = ssmix_saw_report(inst, saw_opt.root, saw_opt.t, saw_opt.delta.data(),
                                  saw_opt.delta.size(), saw_opt.node_cap, &text);
            ssmix_instance_free(inst);
            if (st != SSMIX_OK) return report(st);
            write_output(saw_opt.out, text);
            ssmix_string_free(text);
            return 0;
        }

        if (decay->parsed()) {
            const std::string cfg = decay_cfg.build();
            const ssmix_status st = ssmix_run_decay(cfg.c_str(), decay_out.c_str());
            if (st != SSMIX_OK) return report(st);
            std::cout << "wrote " << decay_out << "\n";
            return 0;
        }

        if (sweep->parsed()) {
            const std::string cfg = sweep_cfg.build();
            const ssmix_status st = ssmix_run_cutset_sweep(cfg.c_str(), sweep_out.c_str());
            if (st != SSMIX_OK) return report(st);
            std::cout << "wrote " << sweep_out << "\n";
            return 0;
        }

        if (corpus->parsed()) {
            const std::string cfg = corpus_cfg.build();
            uint32_t checks = 0, failures = 0;
            const ssmix_status st =
                ssmix_run_lemma_corpus(cfg.c_str(), corpus_out.c_str(), &checks, &failures);
            if (st != SSMIX_OK) return report(st);
            std::cout << "wrote " << corpus_out << "\nchecks " << checks << "\nfailures "
                      << failures << "\n";
            return failures == 0 ? 0 : static_cast<int>(SSMIX_ERR_CHECK_FAILED);
        }

        if (fq->parsed()) {
            const std::string cfg = fq_cfg.build();
            const ssmix_status st = ssmix_run_fq_table(cfg.c_str(), fq_out.c_str());
            if (st != SSMIX_OK) return report(st);
            std::cout << "wrote " << fq_out << "\n";
            return 0;
        }

        if (glauber->parsed()) {
            const std::string cfg = glauber_cfg.build();
            uint32_t failures = 0;
            const ssmix_status st =
                ssmix_run_glauber_check(cfg.c_str(), glauber_out.c_str(), &failures);
            if (st != SSMIX_OK) return report(st);
            std::cout << "wrote " << glauber_out << "\nfailures " << failures << "\n";
            return failures == 0 ? 0 : static_cast<int>(SSMIX_ERR_CHECK_FAILED);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
