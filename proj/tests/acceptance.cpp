// Acceptance gate: one PASS/FAIL line per criterion, pinned tolerances, exit
// code = number of failed criteria. argv[1] is the CLI binary; artifacts land
// in ./acceptance_artifacts (reruns for the reproducibility check included).
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binomial.hpp"
#include "coloring.hpp"
#include "graph.hpp"
#include "numbers.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace {

using namespace ssmix;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// pinned gates
constexpr double kFqLimitSeconds = 10.0;       // criterion 1
constexpr double kResidualTol = 1e-10;         // criterion 2
constexpr double kCorpusLimitSeconds = 300.0;  // criterion 3
constexpr double kDecayTol = 1e-9;             // criteria 3 and 6
constexpr double kDecayLimitSeconds = 1800.0;  // criterion 8
constexpr uint32_t kMinPairsPerRadius = 30;    // criterion 8
constexpr uint32_t kDecayOracleBudget = 150;   // criterion 8, keeps runs terminating
constexpr double kCutsetFrequencyGate = 0.9;   // criterion 9
constexpr double kGlauberTvGate = 0.02;        // criterion 10

const std::string kDir = "acceptance_artifacts";
std::string g_cli;
int g_failures = 0;

void verdict(const std::string& id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS: " : "FAIL: ") << id << " - " << detail << std::endl;
    if (!ok) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// cli helpers ---------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >> " + kDir + "/cli_log.txt 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// The command lines are built once per artifact so the reproducibility
// criterion reruns byte-for-byte identical configurations.
std::string fq_args(const std::string& out) {
    return "fq-table --d-min 2 --d-max 30 --fq-n 100000 --out " + out;
}
std::string corpus_args(const std::string& out) {
    return "lemma-corpus --seed 1 --instances 200 --n-min 4 --n-max 10 --q-min 4 --q-max 8 "
           "--out " +
           out;
}
std::string gadget_args(const std::string& out) {
    return "decay --graph frozen_path --q 3 --gadget-length 8 --profile explore --seeds 1 "
           "--radii 1,2,3,4,5,6 --pairs-per-radius 75 --out " +
           out;
}
std::string sweep_args(const std::string& out) {
    return "cutset-sweep --n 500 --d 2 --q 27 --profile explore --seed-count 50 "
           "--t-values 2,3,4 --out " +
           out;
}
std::string glauber_args(const std::string& out) {
    return "glauber-check --seed 1 --instances 20 --n-min 4 --n-max 8 --out " + out;
}

// csv / jsonl parsing -------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<size_t> col(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
    // NaN on missing column/row or an unparsable cell (empty cells included).
    double num(size_t row, const std::string& name) const {
        const auto c = col(name);
        if (!c || row >= rows.size() || *c >= rows[row].size())
            return std::numeric_limits<double>::quiet_NaN();
        const std::string& cell = rows[row][*c];
        char* end = nullptr;
        const double x = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) return std::numeric_limits<double>::quiet_NaN();
        return x;
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<Table> load_csv(const std::string& path) {
    const auto text = slurp(path);
    if (!text) return std::nullopt;
    Table t;
    std::istringstream in(*text);
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    t.header = split_csv(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split_csv(line));
    return t;
}

double num_of(const ordered_json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    return v.get<double>();
}

// one corpus run feeds criteria 3-6
struct LemmaAgg {
    uint32_t count = 0;
    uint32_t failed = 0;
    double worst_gap = -std::numeric_limits<double>::infinity();  // max lhs - rhs
};

struct CorpusState {
    int rc = -1;
    double seconds = 0;
    bool parsed = false;
    std::map<std::string, LemmaAgg> agg;
} g_corpus;

const LemmaAgg& agg_of(const std::string& lemma) {
    static const LemmaAgg empty;
    const auto it = g_corpus.agg.find(lemma);
    return it == g_corpus.agg.end() ? empty : it->second;
}

bool clean(const std::string& lemma, uint32_t min_count) {
    const LemmaAgg& a = agg_of(lemma);
    return g_corpus.parsed && a.count >= min_count && a.failed == 0;
}

// criteria -------------------------------------------------------------------

void criterion1() {
    const auto t0 = Clock::now();
    const int rc = run_cli(fq_args(kDir + "/fq_table.csv"));
    const double dt = since(t0);
    const auto csv = load_csv(kDir + "/fq_table.csv");
    bool ok = rc == 0 && csv && csv->rows.size() == 29;
    double min_margin = std::numeric_limits<double>::infinity();
    if (ok) {
        for (size_t i = 0; i < csv->rows.size(); ++i) {
            const double d = csv->num(i, "d");
            const double ef = csv->num(i, "expected_f");
            const double margin = csv->num(i, "margin");
            if (!(ef < 1.0 / d) || !(margin > 0)) ok = false;
            min_margin = std::min(min_margin, margin);
        }
    }
    ok = ok && dt < kFqLimitSeconds;
    verdict("C1", ok,
            "E[f_q] < 1/d on all 29 rows d in [2,30], n=1e5, q=2d+4 (min margin " +
                fmt(min_margin) + "; " + fmt(dt) + "s < " + fmt(kFqLimitSeconds) + "s)");
}

void criterion2() {
    bool exact_ok = true, double_ok = true, order_ok = true, endpoint_ok = true;
    uint32_t points = 0;
    double worst = 0;
    for (int d = 2; d <= 10; ++d) {
        const int last = 4 * (2 * d + 2);  // x = k/4 walks [0, 2d+2]
        for (int k = 0; k <= last; ++k) {
            ++points;
            const Rational dr(d), xr(k, 4);
            const Rational diff = g_rational(dr, xr) - g_tilde_rational(dr, xr);
            const Rational res = g_residual_rational(dr, xr);
            if (diff != res) exact_ok = false;
            if (res < 0) order_ok = false;  // g~ <= g up to the endpoint
            if (k == last && res != 0) endpoint_ok = false;
            const double dd = g(d, k / 4.0) - g_tilde(d, k / 4.0);
            const double rr = g_residual(d, k / 4.0);
            const double err = std::abs(dd - rr) / std::max(1.0, std::abs(rr));
            worst = std::max(worst, err);
            if (err > kResidualTol) double_ok = false;
        }
    }
    verdict("C2", exact_ok && double_ok && order_ok && endpoint_ok,
            "residual identity exact in rationals on " + std::to_string(points) +
                " grid points, double route off by " + fmt(worst) + " <= " + fmt(kResidualTol) +
                ", g~ <= g with equality at x = 2d+2");
}

void run_corpus_once() {
    const auto t0 = Clock::now();
    g_corpus.rc = run_cli(corpus_args(kDir + "/lemma_corpus.jsonl"));
    g_corpus.seconds = since(t0);
    const auto text = slurp(kDir + "/lemma_corpus.jsonl");
    if (!text) return;
    std::istringstream in(*text);
    std::string line;
    try {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const ordered_json j = ordered_json::parse(line);
            LemmaAgg& a = g_corpus.agg[j.at("lemma").get<std::string>()];
            ++a.count;
            if (!j.at("verdict").get<bool>()) ++a.failed;
            const double gap = num_of(j.at("lhs")) - num_of(j.at("rhs"));
            if (!std::isnan(gap)) a.worst_gap = std::max(a.worst_gap, gap);
        }
        g_corpus.parsed = true;
    } catch (const std::exception&) {
        g_corpus.parsed = false;
    }
}

void criterion3() {
    run_corpus_once();
    const LemmaAgg& ssm = agg_of("saw_decay_ssm");
    const LemmaAgg& wsm = agg_of("saw_decay_wsm");
    const double gap = std::max(ssm.worst_gap, wsm.worst_gap);
    const bool ok = g_corpus.rc == 0 && clean("saw_decay_ssm", 200) &&
                    clean("saw_decay_wsm", 200) && gap <= kDecayTol &&
                    g_corpus.seconds < kCorpusLimitSeconds;
    verdict("C3", ok,
            "walk-tree decay bound holds on " + std::to_string(ssm.count) + "+" +
                std::to_string(wsm.count) +
                " corpus checks (strong+weak), worst error-bound gap " + fmt(gap) + " <= " +
                fmt(kDecayTol) + " (corpus run " + fmt(g_corpus.seconds) + "s < " +
                fmt(kCorpusLimitSeconds) + "s)");
}

void criterion4() {
    const LemmaAgg& tel = agg_of("telescopic_identity");
    const LemmaAgg& sur = agg_of("surgery_gap");
    const bool ok = clean("telescopic_identity", 100) && clean("surgery_gap", 100);
    verdict("C4", ok,
            "telescopic ratio identity exact on " + std::to_string(tel.count) +
                " instances; surgery keeps feasibility and the list-degree gap on " +
                std::to_string(sur.count));
}

void criterion5() {
    const LemmaAgg& bounds = agg_of("marginal_bounds");
    const LemmaAgg& local = agg_of("local_feasibility");
    const LemmaAgg& fin = agg_of("separator_finiteness");
    const bool ok =
        clean("marginal_bounds", 1) && clean("local_feasibility", 1) &&
        clean("separator_finiteness", 50);
    verdict("C5", ok,
            "marginal bounds (" + std::to_string(bounds.count) + "), local-feasibility (" +
                std::to_string(local.count) + ") and separator finiteness (" +
                std::to_string(fin.count) + " exhaustive n<=8 instances) all hold");
}

void criterion6() {
    const LemmaAgg& step = agg_of("block_decay_step");
    const bool ok = clean("block_decay_step", 100) && step.worst_gap <= kDecayTol;
    verdict("C6", ok,
            "one-step block decay bound holds on " + std::to_string(step.count) +
                " instances with brute-forced maximizing coloring pairs, worst gap " +
                fmt(step.worst_gap) + " <= " + fmt(kDecayTol));
}

void criterion7() {
    bool ok = true;
    uint64_t connected = 0;
    for (uint32_t n = 1; n <= 6 && ok; ++n) {
        std::vector<std::pair<Vertex, Vertex>> pairs;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
        for (uint32_t mask = 0; mask < (1u << pairs.size()) && ok; ++mask) {
            std::array<uint32_t, 6> adj{};
            std::vector<std::pair<Vertex, Vertex>> edges;
            for (size_t e = 0; e < pairs.size(); ++e) {
                if (!(mask >> e & 1u)) continue;
                edges.push_back(pairs[e]);
                adj[pairs[e].first] |= 1u << pairs[e].second;
                adj[pairs[e].second] |= 1u << pairs[e].first;
            }
            uint32_t reach = 1, frontier = 1;
            while (frontier) {
                uint32_t next = 0;
                for (uint32_t v = 0; v < n; ++v)
                    if (frontier >> v & 1u) next |= adj[v];
                frontier = next & ~reach;
                reach |= next;
            }
            if (reach != (1u << n) - 1) continue;
            ++connected;
            const Graph g = Graph::from_edges(n, edges);
            const auto sg = testing::SmallGraph::from(g);
            for (uint32_t q : {3u, 4u}) {
                const BigInt lhs =
                    count_extensions(ListColoringInstance::q_coloring(g, q), PartialColoring{});
                if (lhs != testing::chromatic_count_dc(sg, q)) ok = false;
            }
        }
    }
    // 1 + 1 + 4 + 38 + 728 + 26704 labeled connected graphs on n <= 6
    ok = ok && connected == 27476;

    uint32_t randoms = 0;
    Rng rng = make_stream(2024, kStreamLists, 7);
    for (int i = 0; i < 50 && ok; ++i) {
        const uint32_t n = 4 + static_cast<uint32_t>(uniform_below(rng, 5));
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (uniform_open01(rng) < 0.35) edges.emplace_back(u, v);
        const uint32_t q = 2 + static_cast<uint32_t>(uniform_below(rng, 4));
        const Graph g = Graph::from_edges(n, edges);
        const BigInt lhs =
            count_extensions(ListColoringInstance::q_coloring(g, q), PartialColoring{});
        if (lhs != testing::chromatic_count_dc(testing::SmallGraph::from(g), q)) ok = false;
        ++randoms;
    }
    verdict("C7", ok,
            "count_extensions matches deletion-contraction on all " + std::to_string(connected) +
                " connected graphs n<=6 (q=3,4) and " + std::to_string(randoms) +
                " random graphs n<=8");
}

void criterion8() {
    const auto t0 = Clock::now();

    // regime half: per-seed runs so one intractable window cannot stall the rest
    uint32_t negative = 0, aborted = 0, completed_bad = 0;
    for (int seed = 1; seed <= 10; ++seed) {
        const std::string out = kDir + "/decay_gnp_seed" + std::to_string(seed) + ".csv";
        const int rc = run_cli("decay --n 500 --d 2 --q 28 --profile assumption --seeds " +
                               std::to_string(seed) +
                               " --radii 1,2,3,4,5,6 --pairs-per-radius 50 --oracle-budget " +
                               std::to_string(kDecayOracleBudget) + " --out " + out);
        if (rc != 0) {
            ++aborted;
            continue;
        }
        const auto csv = load_csv(out);
        bool good = csv && csv->rows.size() == 6;
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (good) {
            for (size_t i = 0; i < csv->rows.size(); ++i)
                if (!(csv->num(i, "pairs") >= kMinPairsPerRadius)) good = false;
            slope = csv->num(0, "fitted_slope");
            good = good && slope < 0;
        }
        good ? ++negative : ++completed_bad;
    }

    // gadget half: frozen-path instance must show maximal disagreement forever
    const int grc = run_cli(gadget_args(kDir + "/decay_gadget.csv"));
    const auto gadget = load_csv(kDir + "/decay_gadget.csv");
    bool gadget_ok = grc == 0 && gadget && gadget->rows.size() == 6;
    double gadget_min_tv = std::numeric_limits<double>::infinity();
    if (gadget_ok) {
        for (size_t i = 0; i < gadget->rows.size(); ++i) {
            if (!(gadget->num(i, "pairs") >= kMinPairsPerRadius)) gadget_ok = false;
            gadget_min_tv = std::min(gadget_min_tv, gadget->num(i, "max_tv"));
        }
        gadget_ok = gadget_ok && gadget_min_tv == 1.0;
    }

    const double dt = since(t0);
    const bool ok = negative >= 9 && gadget_ok && dt < kDecayLimitSeconds;
    verdict("C8", ok,
            "negative fitted slope for " + std::to_string(negative) + "/10 seeds (need 9; " +
                std::to_string(aborted) + " aborted: the radius-6 window around vertex 0 " +
                "lands in the giant component and exceeds the " +
                std::to_string(kDecayOracleBudget) +
                "-vertex exact-oracle budget, and no exact method fits those windows; " +
                std::to_string(completed_bad) + " completed without the full pair quota); " +
                "gadget max TV per radius min " + fmt(gadget_min_tv) + " (need 1.0 at all 6 " +
                "radii with >= " + std::to_string(kMinPairsPerRadius) + " pairs): " +
                (gadget_ok ? "yes" : "no") + "; " + fmt(dt) + "s < " +
                fmt(kDecayLimitSeconds) + "s");
}

void criterion9() {
    const int rc = run_cli(sweep_args(kDir + "/cutset_sweep.csv"));
    const auto csv = load_csv(kDir + "/cutset_sweep.csv");
    bool ok = rc == 0 && csv && csv->rows.size() == 3;
    std::string freqs;
    double freq4 = std::numeric_limits<double>::quiet_NaN();
    if (ok) {
        for (size_t i = 0; i < csv->rows.size(); ++i) {
            const double t = csv->num(i, "t");
            const double freq = csv->num(i, "frequency");
            if (!(csv->num(i, "seeds") == 50.0)) ok = false;
            if (t == 4.0) freq4 = freq;
            freqs += (freqs.empty() ? "" : ", ") + ("t=" + fmt(t) + ": " + fmt(freq));
        }
        ok = ok && freq4 >= kCutsetFrequencyGate;
    }
    verdict("C9", ok,
            "permissive-cutset frequency over 50 seeds (" + freqs + "); gate " +
                fmt(kCutsetFrequencyGate) + " at t=4");
}

void criterion10() {
    const int rc = run_cli(glauber_args(kDir + "/glauber.csv"));
    const auto csv = load_csv(kDir + "/glauber.csv");
    bool ok = rc == 0 && csv && csv->rows.size() == 20;
    double max_tv = 0;
    if (ok) {
        for (size_t i = 0; i < csv->rows.size(); ++i) {
            const double tv = csv->num(i, "tv");
            max_tv = std::max(max_tv, tv);
            if (!(tv < kGlauberTvGate)) ok = false;
        }
    }
    verdict("C10", ok,
            "heat-bath sampled marginal within " + fmt(kGlauberTvGate) +
                " TV of exact on 20 instances n<=8 (max " + fmt(max_tv) + ")");
}

void criterion11() {
    struct Pair {
        std::string name, first, rerun, args_rerun;
    };
    const std::vector<Pair> pairs = {
        {"fq-table", kDir + "/fq_table.csv", kDir + "/fq_table_rerun.csv",
         fq_args(kDir + "/fq_table_rerun.csv")},
        {"lemma-corpus", kDir + "/lemma_corpus.jsonl", kDir + "/lemma_corpus_rerun.jsonl",
         corpus_args(kDir + "/lemma_corpus_rerun.jsonl")},
        {"decay", kDir + "/decay_gadget.csv", kDir + "/decay_gadget_rerun.csv",
         gadget_args(kDir + "/decay_gadget_rerun.csv")},
        {"cutset-sweep", kDir + "/cutset_sweep.csv", kDir + "/cutset_sweep_rerun.csv",
         sweep_args(kDir + "/cutset_sweep_rerun.csv")},
        {"glauber-check", kDir + "/glauber.csv", kDir + "/glauber_rerun.csv",
         glauber_args(kDir + "/glauber_rerun.csv")},
    };
    bool ok = true;
    std::string bad;
    for (const Pair& p : pairs) {
        run_cli(p.args_rerun);
        const auto a = slurp(p.first);
        const auto b = slurp(p.rerun);
        if (!a || !b || *a != *b || a->empty()) {
            ok = false;
            bad += (bad.empty() ? "" : ", ") + p.name;
        }
    }
    verdict("C11", ok,
            ok ? "all five artifact commands rerun byte-identical"
               : "artifacts differ between reruns: " + bad);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: ssmix_acceptance <path-to-cli>\n";
        return 64;
    }
    g_cli = argv[1];
    std::error_code ec;
    std::filesystem::create_directories(kDir, ec);
    std::remove((kDir + "/cli_log.txt").c_str());

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();

    if (g_failures == 0)
        std::cout << "all 11 criteria passed" << std::endl;
    else
        std::cout << g_failures << " of 11 criteria failed" << std::endl;
    return g_failures;
}
