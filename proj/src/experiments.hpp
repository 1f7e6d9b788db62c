// Experiment drivers behind the CLI: decay measurements on G(n, d/n), cutset
// existence sweeps, the randomized lemma-check corpus, the expectation table
// and a Glauber-dynamics sanity check. All runs are seed-deterministic and
// their artifacts are byte-stable.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "block_decay.hpp"
#include "coloring.hpp"
#include "saw_tree.hpp"

namespace ssmix {

struct ExperimentConfig {
    uint64_t seed = 1;
    uint32_t seed_count = 1;          // seeds seed, seed+1, ...
    std::vector<uint64_t> seeds;      // explicit list; overrides seed_count
    uint32_t n = 500;
    double d = 2.0;
    uint32_t q = 28;
    double alpha = 2.5;               // q >= alpha*d + beta gate
    double beta = 23.0;
    std::string profile = "assumption";  // "assumption" enforces the gate, "explore" warns
    std::string graph = "gnp";           // "gnp" | "frozen_path"
    uint32_t gadget_length = 8;
    std::vector<uint32_t> radii = {1, 2, 3, 4};  // exact-oracle cost grows fast past 4
    uint32_t pairs_per_radius = 50;
    std::vector<uint32_t> t_values = {2, 3, 4};
    uint32_t instances = 200;         // lemma corpus size (saw family)
    uint32_t n_min = 4, n_max = 10;   // corpus instance sizes
    uint32_t q_min = 4, q_max = 8;    // corpus palettes
    uint64_t node_cap = kDefaultNodeCap;
    uint32_t oracle_budget = 4000;    // max vertices handed to the exact oracle
    uint64_t burnin = 100000;         // glauber
    uint64_t samples = 20000;
    uint64_t spacing = 10;
    uint32_t glauber_instances = 20;
    uint32_t d_min = 2, d_max = 30;   // fq table rows
    uint64_t fq_n = 100000;
    uint32_t jobs = 1;

    std::vector<uint64_t> seed_list() const;
    void validate() const;  // profile gate; invalid_argument on bad fields
};

// Strict JSON object -> config; unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& json_text);

// The frozen-path counterexample: a path of `path_length` vertices, each with
// q-2 pendant neighbors pinned (by singleton lists) to the colors 3..q, so
// the path itself is effectively 2-colored and carries correlations forever.
ListColoringInstance frozen_path_gadget(uint32_t path_length, uint32_t q);

struct DecayRecord {
    uint64_t seed = 0;
    uint32_t n = 0;  // actual instance size (gadget runs ignore cfg.n)
    uint32_t radius = 0;
    uint32_t pairs = 0;    // feasible boundary pairs measured
    uint32_t skipped = 0;  // sampling attempts abandoned
    double max_tv = 0;
    double max_error = 0;              // can be +inf
    std::optional<double> bound;       // E_{T,L,S} when a cutset exists
    double slope = 0;                  // per-seed fitted slope (repeated per row)
};

struct DecayResult {
    std::vector<DecayRecord> records;
    std::map<uint64_t, double> slope_by_seed;  // NaN when under two usable radii
};

DecayResult run_decay_experiment(const ExperimentConfig& cfg);
std::string decay_csv(const DecayResult& result, const ExperimentConfig& cfg);

struct CutsetRecord {
    uint32_t t = 0;
    uint32_t seeds_run = 0;
    uint32_t successes = 0;
    uint32_t skipped = 0;  // tree build over node cap
    double frequency = 0;
};

std::vector<CutsetRecord> run_cutset_experiment(const ExperimentConfig& cfg);
std::string cutset_csv(const std::vector<CutsetRecord>& rows, const ExperimentConfig& cfg);

struct LemmaCorpusResult {
    std::vector<std::string> lines;  // JSON-lines, one verdict record each
    uint32_t checks = 0;
    uint32_t failures = 0;
};

LemmaCorpusResult run_lemma_corpus(const ExperimentConfig& cfg);

struct FqRow {
    uint32_t d = 0;
    uint64_t n = 0;
    uint32_t q = 0;
    double expected_f = 0;
    double margin = 0;  // 1/d - expected_f
};

std::vector<FqRow> run_fq_table(const ExperimentConfig& cfg);
std::string fq_csv(const std::vector<FqRow>& rows);

struct GlauberRecord {
    uint32_t instance = 0;
    uint32_t n = 0;
    uint32_t q = 0;
    uint64_t burnin = 0, samples = 0, spacing = 0;
    double tv = 0;  // empirical vs exact marginal at vertex 0
    bool ok = false;
};

std::vector<GlauberRecord> run_glauber_check(const ExperimentConfig& cfg);
std::string glauber_csv(const std::vector<GlauberRecord>& rows);

// Single-site heat-bath dynamics after a greedy/backtracking initial proper
// coloring (error no_initial_coloring when the initializer's budget runs
// out). cond vertices stay frozen. Returns the state after `steps` updates.
PartialColoring glauber_sample(const ListColoringInstance& inst, const PartialColoring& cond,
                               uint64_t steps, uint64_t seed);

// Stable formatting for CSV artifacts ("%.12g"; "inf"/"nan" spelled out).
std::string format_double(double x);

}  // namespace ssmix
