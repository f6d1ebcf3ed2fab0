#include "hisd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "hisd/errors.hpp"

namespace hisd {

// ─── Contingency ─────────────────────────────────────────────────────────────

namespace {

void check_paired(const std::vector<FrameLabeling>& pred,
                  const std::vector<FrameLabeling>& truth) {
    if (pred.empty() || pred.size() != truth.size())
        throw InputError("prediction/truth episode counts disagree");
    for (size_t e = 0; e < pred.size(); ++e) {
        validate_labeling(pred[e]);
        validate_labeling(truth[e]);
        if (pred[e].labels.size() != truth[e].labels.size())
            throw InputError("prediction/truth frame counts disagree");
    }
}

} // namespace

ContingencyMatrix contingency(const std::vector<FrameLabeling>& pred,
                              const std::vector<FrameLabeling>& truth) {
    check_paired(pred, truth);
    ContingencyMatrix m;
    for (const auto& l : pred) m.n_pred = std::max(m.n_pred, l.k_skills);
    for (const auto& l : truth) m.n_truth = std::max(m.n_truth, l.k_skills);
    m.counts.assign(m.n_pred, std::vector<long long>(m.n_truth, 0));
    for (size_t e = 0; e < pred.size(); ++e)
        for (size_t t = 0; t < pred[e].labels.size(); ++t)
            m.counts[pred[e].labels[t]][truth[e].labels[t]]++;
    return m;
}

// ─── Assignment ──────────────────────────────────────────────────────────────

namespace {

/// Maximum-total one-to-one assignment value over weight matrix rows/cols
/// restricted to the given index subsets; the smaller side is fully matched
/// (shortest-augmenting-path algorithm on the square-padded complement).
long long max_match_total(const std::vector<std::vector<long long>>& w,
                          const std::vector<int>& rows, const std::vector<int>& cols) {
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(cols.size());
    const int n = std::max(nr, nc);
    if (n == 0) return 0;

    long long maxw = 0;
    for (int r : rows)
        for (int c : cols) maxw = std::max(maxw, w[r][c]);

    // cost[i][j] = maxw − weight, pads cost maxw: minimizing over a square
    // perfect matching maximizes the total weight of real pairs.
    auto cost = [&](int i, int j) -> long long {
        if (i < nr && j < nc) return maxw - w[rows[i]][cols[j]];
        return maxw;
    };

    const long long INF = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, INF);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = 0;
            long long delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    long long total = 0;
    for (int j = 1; j <= n; ++j) {
        int i = match[j];
        if (i >= 1 && i <= nr && j <= nc) total += w[rows[i - 1]][cols[j - 1]];
    }
    return total;
}

} // namespace

std::vector<int> hungarian_mapping(const ContingencyMatrix& m) {
    const int P = m.n_pred, G = m.n_truth;
    std::vector<int> mapping(P, -1);
    if (P == 0 || G == 0) return mapping;

    std::vector<int> all_rows(P), all_cols(G);
    for (int i = 0; i < P; ++i) all_rows[i] = i;
    for (int j = 0; j < G; ++j) all_cols[j] = j;
    const long long best = max_match_total(m.counts, all_rows, all_cols);

    // Fix predictions in index order to the lowest feasible truth class, so
    // the optimum with the lexicographically smallest assignment vector wins.
    std::vector<char> used(G, 0);
    long long fixed_total = 0;
    std::vector<int> rest_rows(all_rows.begin() + 1, all_rows.end());
    for (int p = 0; p < P; ++p) {
        std::vector<int> free_cols;
        for (int g = 0; g < G; ++g)
            if (!used[g]) free_cols.push_back(g);
        bool assigned = false;
        for (int g : free_cols) {
            std::vector<int> rem_cols;
            for (int c : free_cols)
                if (c != g) rem_cols.push_back(c);
            long long t = fixed_total + m.counts[p][g] +
                          max_match_total(m.counts, rest_rows, rem_cols);
            if (t == best) {
                mapping[p] = g;
                used[g] = 1;
                fixed_total += m.counts[p][g];
                assigned = true;
                break;
            }
        }
        if (!assigned) {
            // optimal alignments leave p unmatched (only possible when
            // predictions outnumber truth classes)
            mapping[p] = -1;
        }
        if (!rest_rows.empty()) rest_rows.erase(rest_rows.begin());
    }
    return mapping;
}

// ─── Frame metrics ───────────────────────────────────────────────────────────

double mof(const std::vector<FrameLabeling>& pred,
           const std::vector<FrameLabeling>& truth,
           const std::vector<int>& mapping) {
    check_paired(pred, truth);
    long long correct = 0, total = 0;
    for (size_t e = 0; e < pred.size(); ++e)
        for (size_t t = 0; t < pred[e].labels.size(); ++t) {
            int p = pred[e].labels[t];
            int mapped = p < static_cast<int>(mapping.size()) ? mapping[p] : -1;
            if (mapped == truth[e].labels[t]) correct++;
            total++;
        }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double miou(const std::vector<FrameLabeling>& pred,
            const std::vector<FrameLabeling>& truth,
            const std::vector<int>& mapping) {
    check_paired(pred, truth);
    int G = 0;
    for (const auto& l : truth) G = std::max(G, l.k_skills);
    std::vector<long long> inter(G, 0), pred_ct(G, 0), truth_ct(G, 0);
    for (size_t e = 0; e < pred.size(); ++e)
        for (size_t t = 0; t < pred[e].labels.size(); ++t) {
            int p = pred[e].labels[t];
            int mapped = p < static_cast<int>(mapping.size()) ? mapping[p] : -1;
            int g = truth[e].labels[t];
            truth_ct[g]++;
            if (mapped >= 0 && mapped < G) {
                pred_ct[mapped]++;
                if (mapped == g) inter[g]++;
            }
        }
    double sum = 0;
    int classes = 0;
    for (int g = 0; g < G; ++g) {
        long long uni = truth_ct[g] + pred_ct[g] - inter[g];
        if (uni == 0) continue;    // absent from both sides
        sum += static_cast<double>(inter[g]) / static_cast<double>(uni);
        classes++;
    }
    return classes ? sum / classes : 0.0;
}

double f1_at_50(const std::vector<FrameLabeling>& pred,
                const std::vector<FrameLabeling>& truth,
                const std::vector<int>& mapping) {
    check_paired(pred, truth);
    long long tp = 0, n_pred_segs = 0, n_truth_segs = 0;
    for (size_t e = 0; e < pred.size(); ++e) {
        auto psegs = segments_of(pred[e]);
        auto tsegs = segments_of(truth[e]);
        n_pred_segs += static_cast<long long>(psegs.size());
        n_truth_segs += static_cast<long long>(tsegs.size());
        std::vector<char> claimed(tsegs.size(), 0);
        for (const Segment& ps : psegs) {
            int mapped = ps.label < static_cast<int>(mapping.size()) ? mapping[ps.label] : -1;
            if (mapped < 0) continue;
            for (size_t j = 0; j < tsegs.size(); ++j) {
                if (claimed[j] || tsegs[j].label != mapped) continue;
                int lo = std::max(ps.start, tsegs[j].start);
                int hi = std::min(ps.end, tsegs[j].end);
                long long inter = hi >= lo ? hi - lo + 1 : 0;
                long long uni = ps.length() + tsegs[j].length() - inter;
                if (2 * inter > uni) {   // IoU strictly above 0.5
                    claimed[j] = 1;
                    tp++;
                    break;
                }
            }
        }
    }
    if (n_pred_segs == 0 || n_truth_segs == 0) return 0.0;
    double precision = static_cast<double>(tp) / static_cast<double>(n_pred_segs);
    double recall = static_cast<double>(tp) / static_cast<double>(n_truth_segs);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

// ─── Combined report ─────────────────────────────────────────────────────────

double average_miou(double miou_per, double miou_full) {
    return (miou_per + miou_full) / 2.0;
}

SegMetricsReport evaluate_segmentation(const std::vector<FrameLabeling>& pred,
                                       const std::vector<FrameLabeling>& truth) {
    check_paired(pred, truth);
    SegMetricsReport r;

    const auto full_map = hungarian_mapping(contingency(pred, truth));
    r.mof_full = mof(pred, truth, full_map);
    r.miou_full = miou(pred, truth, full_map);
    r.f1_full = f1_at_50(pred, truth, full_map);

    const int E = static_cast<int>(pred.size());
    for (int e = 0; e < E; ++e) {
        std::vector<FrameLabeling> pe{pred[e]}, te{truth[e]};
        const auto em = hungarian_mapping(contingency(pe, te));
        r.mof_per += mof(pe, te, em);
        r.miou_per += miou(pe, te, em);
        r.f1_per += f1_at_50(pe, te, em);
    }
    r.mof_per /= E;
    r.miou_per /= E;
    r.f1_per /= E;
    r.avg_miou = average_miou(r.miou_per, r.miou_full);
    return r;
}

// ─── Tree metrics ────────────────────────────────────────────────────────────

namespace {

void walk_stats(const TreeNode& n, int depth, TreeStats& s,
                long long& child_sum, long long& internal_count) {
    s.size++;
    if (n.leaf) {
        s.depth = std::max(s.depth, depth);
        return;
    }
    internal_count++;
    child_sum += static_cast<long long>(n.children.size());
    s.max_branching = std::max(s.max_branching, static_cast<int>(n.children.size()));
    // an internal node with no children still terminates a path
    if (n.children.empty()) s.depth = std::max(s.depth, depth);
    for (const TreeNode& c : n.children) walk_stats(c, depth + 1, s, child_sum, internal_count);
}

void canonical_shape(const TreeNode& n, std::string& out) {
    if (n.leaf) {
        out += 'L';
        out += std::to_string(n.id);
        out += ';';
        return;
    }
    out += '(';
    for (const TreeNode& c : n.children) canonical_shape(c, out);
    out += ')';
}

} // namespace

TreeStats tree_stats(const EpisodeTree& tree) {
    TreeStats s;
    long long child_sum = 0, internal_count = 0;
    walk_stats(tree.root, 1, s, child_sum, internal_count);
    s.mean_branching = internal_count
                           ? static_cast<double>(child_sum) / static_cast<double>(internal_count)
                           : 0.0;
    return s;
}

int unique_tree_count(const std::vector<EpisodeTree>& trees) {
    std::set<std::string> shapes;
    for (const auto& t : trees) {
        std::string s;
        canonical_shape(t.root, s);
        shapes.insert(std::move(s));
    }
    return static_cast<int>(shapes.size());
}

TreeMetricsReport summarize_trees(const std::vector<EpisodeTree>& trees) {
    TreeMetricsReport r;
    if (trees.empty()) return r;
    r.unique_trees = unique_tree_count(trees);
    for (const auto& t : trees) {
        TreeStats s = tree_stats(t);
        r.avg_depth += s.depth;
        r.avg_size += s.size;
        r.avg_branching += s.mean_branching;
        r.max_branching = std::max(r.max_branching, static_cast<double>(s.max_branching));
    }
    const double n = static_cast<double>(trees.size());
    r.avg_depth /= n;
    r.avg_size /= n;
    r.avg_branching /= n;
    return r;
}

std::pair<Grammar, std::vector<EpisodeTree>>
ground_truth_hierarchy(const std::vector<FrameLabeling>& truth) {
    if (truth.empty()) throw InputError("no episodes to build a hierarchy from");
    std::vector<SkillSequence> seqs;
    for (size_t e = 0; e < truth.size(); ++e) {
        validate_labeling(truth[e]);
        seqs.push_back(run_length_collapse(truth[e], static_cast<int>(e)));
    }
    Grammar g = induce(build_corpus(seqs));
    auto trees = parse_trees(g);
    return {std::move(g), std::move(trees)};
}

} // namespace hisd
