// Acceptance gate: one pass/fail line per shipped guarantee.  Each check is
// self-contained and uses its own reference implementations where the claim
// is about agreement with an independent computation.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hisd/core.hpp"
#include "hisd/eval.hpp"
#include "hisd/grammar.hpp"
#include "hisd/io.hpp"
#include "hisd/ot.hpp"
#include "hisd/synth.hpp"

using namespace hisd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool ok = false;
    std::string detail;
};

// ─── Reference implementations (set arithmetic, exhaustive search) ───────────

namespace ref {

/// Exhaustive best total matched count over injective partial mappings.
void best_total_dfs(const ContingencyMatrix& m, int p, std::vector<char>& used,
                    long long acc, long long& best) {
    if (p == m.n_pred) {
        best = std::max(best, acc);
        return;
    }
    for (int g = 0; g < m.n_truth; ++g) {
        if (used[g]) continue;
        used[g] = 1;
        best_total_dfs(m, p + 1, used, acc + m.counts[p][g], best);
        used[g] = 0;
    }
    best_total_dfs(m, p + 1, used, acc, best);   // leave p unmatched
}

long long best_total(const ContingencyMatrix& m) {
    long long best = 0;
    std::vector<char> used(m.n_truth, 0);
    best_total_dfs(m, 0, used, 0, best);
    return best;
}

/// Canonical optimal mapping: explore assignments for pred 0,1,2,… trying
/// truth classes in ascending order before "unmatched"; the first complete
/// assignment reaching the optimal total is the canonical one.
bool canonical_dfs(const ContingencyMatrix& m, int p, std::vector<char>& used,
                   long long acc, long long target, std::vector<int>& cur,
                   std::vector<int>& out) {
    if (p == m.n_pred) {
        if (acc != target) return false;
        out = cur;
        return true;
    }
    for (int g = 0; g < m.n_truth; ++g) {
        if (used[g]) continue;
        used[g] = 1;
        cur[p] = g;
        if (canonical_dfs(m, p + 1, used, acc + m.counts[p][g], target, cur, out))
            return true;
        used[g] = 0;
    }
    cur[p] = -1;
    return canonical_dfs(m, p + 1, used, acc, target, cur, out);
}

std::vector<int> canonical_mapping(const ContingencyMatrix& m) {
    std::vector<int> out(m.n_pred, -1), cur(m.n_pred, -1);
    std::vector<char> used(m.n_truth, 0);
    canonical_dfs(m, 0, used, 0, best_total(m), cur, out);
    return out;
}

long long isect(const std::vector<int>& a, const std::vector<int>& b, int va, int vb) {
    long long n = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] == va && b[i] == vb) n++;
    return n;
}

long long count_of(const std::vector<int>& v, int val) {
    return std::count(v.begin(), v.end(), val);
}

double mof(const std::vector<std::vector<int>>& pred,
           const std::vector<std::vector<int>>& truth, const std::vector<int>& map) {
    long long hit = 0, total = 0;
    for (size_t e = 0; e < pred.size(); ++e)
        for (size_t i = 0; i < pred[e].size(); ++i) {
            total++;
            const int p = pred[e][i];
            if (p < static_cast<int>(map.size()) && map[p] == truth[e][i]) hit++;
        }
    return total ? static_cast<double>(hit) / total : 0.0;
}

double miou(const std::vector<std::vector<int>>& pred,
            const std::vector<std::vector<int>>& truth, const std::vector<int>& map,
            int G) {
    // invert the injective mapping
    std::vector<int> src(G, -1);
    for (size_t p = 0; p < map.size(); ++p)
        if (map[p] >= 0) src[map[p]] = static_cast<int>(p);

    double sum = 0;
    int classes = 0;
    for (int g = 0; g < G; ++g) {
        long long inter = 0, pcount = 0, tcount = 0;
        for (size_t e = 0; e < pred.size(); ++e) {
            tcount += count_of(truth[e], g);
            if (src[g] >= 0) {
                pcount += count_of(pred[e], src[g]);
                inter += isect(pred[e], truth[e], src[g], g);
            }
        }
        const long long uni = tcount + pcount - inter;
        if (uni == 0) continue;
        sum += static_cast<double>(inter) / static_cast<double>(uni);
        classes++;
    }
    return classes ? sum / classes : 0.0;
}

struct Seg {
    int label, start, end;   // inclusive
};

std::vector<Seg> segs(const std::vector<int>& labels) {
    std::vector<Seg> out;
    for (size_t i = 0; i < labels.size();) {
        size_t j = i;
        while (j + 1 < labels.size() && labels[j + 1] == labels[i]) j++;
        out.push_back({labels[i], static_cast<int>(i), static_cast<int>(j)});
        i = j + 1;
    }
    return out;
}

/// Pooled F1@50: greedy per-episode claiming of truth segments by mapped
/// predicted segments with IoU strictly greater than one half.
double f1(const std::vector<std::vector<int>>& pred,
          const std::vector<std::vector<int>>& truth, const std::vector<int>& map) {
    long long tp = 0, fp = 0, fn = 0;
    bool any_pred = false, any_truth = false;
    for (size_t e = 0; e < pred.size(); ++e) {
        std::vector<Seg> ps = segs(pred[e]), ts = segs(truth[e]);
        if (!ps.empty()) any_pred = true;
        if (!ts.empty()) any_truth = true;
        std::vector<char> claimed(ts.size(), 0);
        for (const Seg& s : ps) {
            const int mapped =
                s.label < static_cast<int>(map.size()) ? map[s.label] : -1;
            bool hit = false;
            for (size_t t = 0; t < ts.size() && !hit; ++t) {
                if (claimed[t] || ts[t].label != mapped) continue;
                const int inter = std::max(
                    0, std::min(s.end, ts[t].end) - std::max(s.start, ts[t].start) + 1);
                const int uni = (s.end - s.start + 1) + (ts[t].end - ts[t].start + 1) -
                                inter;
                if (2 * inter > uni) {   // IoU > 0.5 with integer arithmetic
                    claimed[t] = 1;
                    tp++;
                    hit = true;
                }
            }
            if (!hit) fp++;
        }
        for (size_t t = 0; t < ts.size(); ++t)
            if (!claimed[t]) fn++;
    }
    if (!any_pred || !any_truth) return 0.0;
    const double prec = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
}

} // namespace ref

std::vector<FrameLabeling> to_labelings(const std::vector<std::vector<int>>& raw, int k) {
    std::vector<FrameLabeling> out;
    for (const auto& v : raw) {
        FrameLabeling lab;
        lab.labels = v;
        lab.k_skills = k;
        out.push_back(std::move(lab));
    }
    return out;
}

// ─── Criterion 1: grammar round-trip and invariants at scale ─────────────────

Outcome criterion_round_trip() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    const int corpora = 10000;

    for (int trial = 0; trial < corpora; ++trial) {
        const int alphabet = 2 + static_cast<int>(rng() % 9);          // 2..10
        const int episodes = 1 + static_cast<int>(rng() % 21);        // 0..20 boundaries
        const int max_len = std::max(1, 500 / episodes);
        std::vector<SkillSequence> seqs(episodes);
        for (int e = 0; e < episodes; ++e) {
            seqs[e].episode_id = e;
            const int len = 1 + static_cast<int>(rng() % max_len);
            for (int i = 0; i < len; ++i)
                seqs[e].symbols.push_back(static_cast<int>(rng() % alphabet));
        }

        Corpus c = build_corpus(seqs);
        Grammar g = induce(c);
        validate_grammar(g);
        for (const auto& [id, body] : g.rules)
            for (const Symbol& s : body)
                if (s.is_boundary())
                    return {false, "boundary symbol inside rule body"};
        Corpus back = expand(g);
        if (back.symbols != c.symbols || back.episode_count != c.episode_count) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "round-trip mismatch at trial %d", trial);
            return {false, buf};
        }
    }

    const double secs = seconds_since(t0);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d corpora round-tripped in %.1f s", corpora, secs);
    if (secs >= 60.0) return {false, std::string(buf) + " (limit 60 s)"};
    return {true, buf};
}

// ─── Criterion 2: near-linear induction time ─────────────────────────────────

Outcome criterion_near_linear() {
    std::mt19937_64 rng(2);
    auto make_corpus = [&rng](int len) {
        SkillSequence s;
        for (int i = 0; i < len; ++i)
            s.symbols.push_back(static_cast<int>(rng() % 8));
        return build_corpus({s});
    };

    // each timed sample batches several inductions so the ratio is taken over
    // comfortably measurable intervals
    auto median_time = [&make_corpus](int len) {
        const int batch = 8;
        std::vector<double> samples;
        Corpus c = make_corpus(len);
        for (int trial = 0; trial < 5; ++trial) {
            const auto t0 = Clock::now();
            for (int b = 0; b < batch; ++b) {
                Grammar g = induce(c);
                if (g.start.empty()) std::abort();   // defeat dead-code elimination
            }
            samples.push_back(seconds_since(t0));
        }
        std::sort(samples.begin(), samples.end());
        return samples[2];
    };

    const double t_base = median_time(10000);
    const double t_double = median_time(20000);
    const double ratio = t_double / t_base;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "median 10k: %.4f s, 20k: %.4f s, ratio %.2f (limit 2.50)", t_base,
                  t_double, ratio);
    return {ratio <= 2.5, buf};
}

// ─── Criterion 3: assignment equals exhaustive search ────────────────────────

Outcome criterion_assignment() {
    std::mt19937_64 rng(3);
    const int cases = 1500;
    for (int trial = 0; trial < cases; ++trial) {
        ContingencyMatrix m;
        m.n_pred = 1 + static_cast<int>(rng() % 6);
        m.n_truth = 1 + static_cast<int>(rng() % 6);
        m.counts.assign(m.n_pred, std::vector<long long>(m.n_truth, 0));
        for (auto& row : m.counts)
            for (auto& v : row) v = static_cast<long long>(rng() % 10);

        std::vector<int> got = hungarian_mapping(m);
        long long got_total = 0;
        for (int p = 0; p < m.n_pred; ++p)
            if (got[p] >= 0) got_total += m.counts[p][got[p]];
        const long long want_total = ref::best_total(m);
        if (got_total != want_total) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "trial %d: total %lld, exhaustive %lld",
                          trial, got_total, want_total);
            return {false, buf};
        }
        if (got != ref::canonical_mapping(m))
            return {false, "tie-break differs from canonical enumeration"};
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d random matrices up to 6x6", cases);
    return {true, buf};
}

// ─── Criterion 4: metric oracles ─────────────────────────────────────────────

Outcome criterion_metric_oracles() {
    // worked example: 4 frames, one misassigned
    {
        std::vector<FrameLabeling> truth = to_labelings({{0, 0, 1, 1}}, 2);
        std::vector<FrameLabeling> pred = to_labelings({{0, 0, 0, 1}}, 2);
        SegMetricsReport r = evaluate_segmentation(pred, truth);
        if (std::abs(r.miou_full - 7.0 / 12) > 1e-12)
            return {false, "worked example: mIoU != 7/12"};
        if (std::abs(r.f1_full - 0.5) > 1e-12)
            return {false, "worked example: F1@50 != 0.5"};
        if (std::abs(r.mof_full - 0.75) > 1e-12)
            return {false, "worked example: MoF != 3/4"};
    }

    std::mt19937_64 rng(4);
    const int cases = 1200;
    for (int trial = 0; trial < cases; ++trial) {
        const int episodes = 1 + static_cast<int>(rng() % 3);
        const int G = 1 + static_cast<int>(rng() % 4);
        const int P = 1 + static_cast<int>(rng() % 4);
        std::vector<std::vector<int>> pv(episodes), tv(episodes);
        for (int e = 0; e < episodes; ++e) {
            const int n = 1 + static_cast<int>(rng() % 30);
            for (int i = 0; i < n; ++i) {
                pv[e].push_back(static_cast<int>(rng() % P));
                tv[e].push_back(static_cast<int>(rng() % G));
            }
        }
        std::vector<FrameLabeling> pred = to_labelings(pv, P);
        std::vector<FrameLabeling> truth = to_labelings(tv, G);
        SegMetricsReport r = evaluate_segmentation(pred, truth);

        // full protocol: one global mapping over pooled counts
        const std::vector<int> gmap = ref::canonical_mapping(contingency(pred, truth));
        if (std::abs(r.mof_full - ref::mof(pv, tv, gmap)) > 1e-12 ||
            std::abs(r.miou_full - ref::miou(pv, tv, gmap, G)) > 1e-12 ||
            std::abs(r.f1_full - ref::f1(pv, tv, gmap)) > 1e-12) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "full metrics differ at trial %d", trial);
            return {false, buf};
        }

        // per protocol: per-episode mapping, uniform average over episodes
        double mof_per = 0, miou_per = 0, f1_per = 0;
        for (int e = 0; e < episodes; ++e) {
            std::vector<FrameLabeling> p1{pred[e]}, t1{truth[e]};
            const std::vector<int> emap = ref::canonical_mapping(contingency(p1, t1));
            mof_per += ref::mof({pv[e]}, {tv[e]}, emap);
            miou_per += ref::miou({pv[e]}, {tv[e]}, emap, G);
            f1_per += ref::f1({pv[e]}, {tv[e]}, emap);
        }
        mof_per /= episodes;
        miou_per /= episodes;
        f1_per /= episodes;
        if (std::abs(r.mof_per - mof_per) > 1e-12 ||
            std::abs(r.miou_per - miou_per) > 1e-12 ||
            std::abs(r.f1_per - f1_per) > 1e-12) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "per metrics differ at trial %d", trial);
            return {false, buf};
        }
        if (std::abs(r.avg_miou - (r.miou_per + r.miou_full) / 2) > 1e-12)
            return {false, "avg_miou is not the mean of per and full"};
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worked examples plus %d random episode sets", cases);
    return {true, buf};
}

// ─── Criterion 5: reported average arithmetic ────────────────────────────────

Outcome criterion_average_arithmetic() {
    const struct {
        double per, full;
        int percent;
    } rows[] = {{0.68, 0.58, 63}, {0.78, 0.72, 75}, {0.67, 0.65, 66}};
    for (const auto& row : rows) {
        const double avg = average_miou(row.per, row.full);
        if (static_cast<int>(std::lround(avg * 100)) != row.percent) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "(%.2f, %.2f) -> %.4f, expected 0.%d",
                          row.per, row.full, avg, row.percent);
            return {false, buf};
        }
    }
    return {true, "three published rows round to the expected percent"};
}

// ─── Criterion 6: transport solver feasibility ───────────────────────────────

Outcome criterion_solver_feasibility() {
    std::mt19937_64 rng(6);
    const double eps_grid[] = {0.001, 0.002, 0.005, 0.02, 0.07, 0.2, 0.5};
    const int shapes[][2] = {{5, 2}, {17, 3}, {40, 4}, {3, 6}};

    for (const auto& shape : shapes) {
        const int n = shape[0], K = shape[1];
        Eigen::MatrixXd cost(n, K);
        for (int t = 0; t < n; ++t)
            for (int k = 0; k < K; ++k) cost(t, k) = 2.0 * (rng() % 10000) / 9999.0;

        for (double eps : eps_grid) {
            TransportPlan bal = sinkhorn_solve(cost, eps, 0.05, 0.05, false, false, 100);
            if (!bal.gamma.allFinite()) return {false, "non-finite balanced plan"};
            const double row_err =
                (bal.gamma.rowwise().sum().array() - 1.0 / n).abs().maxCoeff();
            const double col_err =
                (bal.gamma.colwise().sum().array() - 1.0 / K).abs().maxCoeff();
            if (row_err > 1e-6 || col_err > 1e-6) {
                char buf[96];
                std::snprintf(buf, sizeof(buf),
                              "eps %.3f n %d K %d: marginal error %.2e", eps, n, K,
                              std::max(row_err, col_err));
                return {false, buf};
            }
            for (bool uf : {false, true})
                for (bool ua : {false, true}) {
                    TransportPlan p = sinkhorn_solve(cost, eps, 0.05, 0.05, uf, ua, 100);
                    if (!p.gamma.allFinite())
                        return {false, "non-finite plan in a relaxed mode"};
                }
        }
    }

    for (int n : {1, 4, 9, 33}) {
        Eigen::MatrixXd cost(n, 1);
        for (int t = 0; t < n; ++t) cost(t, 0) = 2.0 * (rng() % 10000) / 9999.0;
        TransportPlan p = sinkhorn_solve(cost, 0.01, 0.05, 0.05, false, true, 50);
        for (int t = 0; t < n; ++t)
            if (p.gamma(t, 0) != 1.0 / n)
                return {false, "single-skill column is not exactly the row marginal"};
    }
    return {true, "marginals within 1e-6 across the eps range; K=1 exact"};
}

// ─── Criteria 7/8: end-to-end recovery ──────────────────────────────────────

SynthSpec recovery_spec(std::uint64_t seed) {
    SynthSpec spec;
    spec.k_skills = 3;
    spec.dim = 16;
    spec.noise_sigma = 0.05;
    spec.n_episodes = 100;
    spec.templates.push_back({{0, 1, 0, 1}, 1.0});
    spec.templates.push_back({{0, 2, 1}, 1.0});
    spec.seed = seed;
    return spec;
}

int unique_trees_of(const std::vector<FrameLabeling>& labels) {
    std::vector<SkillSequence> seqs;
    for (size_t e = 0; e < labels.size(); ++e)
        seqs.push_back(run_length_collapse(labels[e], static_cast<int>(e)));
    Grammar g = induce(build_corpus(seqs));
    return summarize_trees(parse_trees(g)).unique_trees;
}

Outcome criterion_recovery() {
    const auto t0 = Clock::now();
    int successes = 0;
    double worst_miou = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthOutput data = generate(recovery_spec(seed));
        SolverConfig cfg;
        cfg.k_skills = 3;
        cfg.seed = seed;
        // Most episodes omit one skill entirely, so the column-marginal KL
        // weight sits at the bottom of its range: a stronger pull toward
        // uniform column mass steals the cheapest frame for the absent skill
        // and fabricates a one-frame segment.
        cfg.lambda_actions_train = 0.01;
        cfg.lambda_actions_eval = 0.01;
        SegmentationResult result = run_segmentation(data.dataset, cfg);

        SegMetricsReport rep =
            evaluate_segmentation(result.labels, *data.dataset.ground_truth);
        const int pred_trees = unique_trees_of(result.labels);
        const int truth_trees = unique_trees_of(*data.dataset.ground_truth);
        worst_miou = std::min(worst_miou, rep.miou_full);
        if (rep.miou_full >= 0.95 && pred_trees == truth_trees) successes++;
    }
    const double secs = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "%d/10 seeds recovered (worst full mIoU %.3f) in %.0f s", successes,
                  worst_miou, secs);
    if (secs >= 300.0) return {false, std::string(buf) + " (limit 300 s)"};
    return {successes >= 9, buf};
}

Outcome criterion_overclustering() {
    SynthOutput data = generate(recovery_spec(0));
    SolverConfig cfg;
    cfg.k_skills = 5;   // more clusters than generating skills
    cfg.lambda_actions_train = 0.01;   // same dataset, same absent-skill regime
    cfg.lambda_actions_eval = 0.01;
    SegmentationResult result = run_segmentation(data.dataset, cfg);
    SegMetricsReport rep =
        evaluate_segmentation(result.labels, *data.dataset.ground_truth);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "K=5 full mIoU %.3f (floor 0.600)", rep.miou_full);
    return {rep.miou_full >= 0.6, buf};
}

// ─── Criterion 9: byte-identical reruns through the CLI ─────────────────────

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome criterion_determinism() {
    const fs::path tmp =
        fs::temp_directory_path() / ("hisd_accept_" + std::to_string(::getpid()));
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    {
        std::ofstream cfg(tmp / "synth.cfg");
        cfg << "k_skills = 3\ndim = 8\ntemplate = 0 1 0 1\ntemplate = 0 2 1\n"
               "n_episodes = 12\nnoise_sigma = 0.05\nseed = 11\n";
        std::ofstream sol(tmp / "solver.cfg");
        sol << "k_skills = 3\nn_epochs = 4\n";
    }

    auto run = [&tmp](const std::string& args, const std::string& tag) {
        const std::string cmd = std::string(HISD_CLI_PATH) + " " + args + " > " +
                                (tmp / (tag + ".out")).string() + " 2> " +
                                (tmp / (tag + ".err")).string();
        const int status = std::system(cmd.c_str());
        return status >= 0 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };

    if (!run("synth --config " + (tmp / "synth.cfg").string() + " --out " +
                 (tmp / "data").string(),
             "synth"))
        return {false, "synth run failed"};

    for (const char* tag : {"a", "b"}) {
        const std::string args = "pipeline --dataset " + (tmp / "data").string() +
                                 " --config " + (tmp / "solver.cfg").string() +
                                 " --out " + (tmp / tag).string() + " --seed 3";
        if (!run(args, tag)) return {false, std::string("pipeline run ") + tag + " failed"};
    }

    std::vector<std::string> rel = {"grammar.txt", "summary.txt"};
    for (int e = 0; e < 12; ++e) {
        char name[40];
        std::snprintf(name, sizeof(name), "labels/ep%05d.labels", e);
        rel.push_back(name);
    }
    for (const std::string& r : rel)
        if (slurp(tmp / "a" / r) != slurp(tmp / "b" / r))
            return {false, "output file differs between reruns: " + r};
    if (slurp(tmp / "a.out") != slurp(tmp / "b.out"))
        return {false, "stdout differs between reruns"};

    fs::remove_all(tmp);
    return {true, "two same-seed pipeline runs byte-identical (14 files + stdout)"};
}

// ─── Criterion 10: hierarchy protocol on a fixed-shape dataset ───────────────

Outcome criterion_hierarchy_protocol() {
    std::mt19937_64 rng(10);
    std::vector<FrameLabeling> labels;
    for (int e = 0; e < 25; ++e) {
        FrameLabeling lab;
        lab.k_skills = 2;
        for (int part = 0; part < 4; ++part) {
            const int skill = part % 2;   // w s w s
            const int len = 2 + static_cast<int>(rng() % 7);
            for (int i = 0; i < len; ++i) lab.labels.push_back(skill);
        }
        labels.push_back(std::move(lab));
    }

    auto [grammar, trees] = ground_truth_hierarchy(labels);
    TreeMetricsReport rep = summarize_trees(trees);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "unique trees %d (want 1), max branching %.2f (want 2)",
                  rep.unique_trees, rep.max_branching);
    return {rep.unique_trees == 1 && rep.max_branching == 2.0, buf};
}

} // namespace

int main() {
    struct Row {
        int id;
        const char* label;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {1, "grammar round-trip and invariants on 10k random corpora", criterion_round_trip},
        {2, "grammar induction time stays near-linear", criterion_near_linear},
        {3, "cluster assignment equals exhaustive search", criterion_assignment},
        {4, "segmentation metrics match set-arithmetic references", criterion_metric_oracles},
        {5, "reported average rounds to the published percents", criterion_average_arithmetic},
        {6, "transport solver feasibility across the eps range", criterion_solver_feasibility},
        {7, "end-to-end skill and hierarchy recovery on 10 seeds", criterion_recovery},
        {8, "over-clustered solve stays usable", criterion_overclustering},
        {9, "same-seed pipeline reruns are byte-identical", criterion_determinism},
        {10, "fixed-shape dataset yields one tree with branching two",
         criterion_hierarchy_protocol},
    };

    int failures = 0;
    for (const Row& row : rows) {
        Outcome out;
        try {
            out = row.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %d: %s — %s\n", out.ok ? "PASS" : "FAIL", row.id,
                    row.label, out.detail.c_str());
        std::fflush(stdout);
        if (!out.ok) failures++;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
