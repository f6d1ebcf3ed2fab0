#pragma once

#include <utility>
#include <vector>

#include "hisd/core.hpp"
#include "hisd/grammar.hpp"

namespace hisd {

// ─── Cluster/class alignment ─────────────────────────────────────────────────

/// Frame-count overlap between predicted clusters (rows) and ground-truth
/// classes (columns).
struct ContingencyMatrix {
    std::vector<std::vector<long long>> counts;   // n_pred × n_truth
    int n_pred = 0;
    int n_truth = 0;
};

/// Pooled contingency matrix over paired labelings (same frame counts).
ContingencyMatrix contingency(const std::vector<FrameLabeling>& pred,
                              const std::vector<FrameLabeling>& truth);

/// Optimal one-to-one alignment of predicted clusters to truth classes,
/// maximizing total matched frame count.  The smaller side is always fully
/// matched; surplus predicted clusters map to -1 ("no class").  Among optimal
/// alignments the one whose (pred → truth) assignment vector is
/// lexicographically smallest is returned, so ties resolve to the lowest
/// index pairs.
std::vector<int> hungarian_mapping(const ContingencyMatrix& counts);

// ─── Frame and segment metrics ───────────────────────────────────────────────

/// Fraction of frames whose mapped predicted label equals the truth label.
double mof(const std::vector<FrameLabeling>& pred,
           const std::vector<FrameLabeling>& truth,
           const std::vector<int>& mapping);

/// Mean intersection-over-union across ground-truth classes, computed on
/// frames pooled over the given episodes.  Classes absent from both the truth
/// and the mapped prediction are skipped; a truth class that is never
/// predicted contributes 0.
double miou(const std::vector<FrameLabeling>& pred,
            const std::vector<FrameLabeling>& truth,
            const std::vector<int>& mapping);

/// Segmental F1 with an IoU threshold of 0.5: a predicted segment counts as a
/// true positive when its IoU with an unclaimed truth segment of the same
/// mapped label strictly exceeds 0.5 (segments claimed greedily in temporal
/// order).  Precision is over predicted segments, recall over truth segments;
/// returns 0 when either side has no segments.
double f1_at_50(const std::vector<FrameLabeling>& pred,
                const std::vector<FrameLabeling>& truth,
                const std::vector<int>& mapping);

/// Segmentation quality under the two standard alignment protocols:
///   *_per:  Hungarian alignment recomputed per episode, metric averaged
///           uniformly over episodes;
///   *_full: one global Hungarian alignment, metric over pooled frames.
struct SegMetricsReport {
    double mof_per = 0, mof_full = 0;
    double f1_per = 0, f1_full = 0;
    double miou_per = 0, miou_full = 0;
    double avg_miou = 0;   // (miou_per + miou_full) / 2
};

double average_miou(double miou_per, double miou_full);

SegMetricsReport evaluate_segmentation(const std::vector<FrameLabeling>& pred,
                                       const std::vector<FrameLabeling>& truth);

// ─── Hierarchy metrics ───────────────────────────────────────────────────────

/// Per-tree statistics.  Depth counts nodes on the longest root-to-leaf path
/// (a root with a single leaf child has depth 2); size counts all nodes
/// including the synthetic root; branching is over internal nodes only.
struct TreeStats {
    int depth = 0;
    int size = 0;
    double mean_branching = 0;
    int max_branching = 0;
};

TreeStats tree_stats(const EpisodeTree& tree);

/// Number of structurally distinct trees: shape and leaf skill ids matter,
/// internal rule identities do not.
int unique_tree_count(const std::vector<EpisodeTree>& trees);

struct TreeMetricsReport {
    int unique_trees = 0;
    double avg_depth = 0;       // per-tree depth, averaged over trees
    double avg_size = 0;        // per-tree size, averaged over trees
    double avg_branching = 0;   // per-tree mean branching, averaged over trees
    double max_branching = 0;   // maximum over trees of per-tree max branching
};

TreeMetricsReport summarize_trees(const std::vector<EpisodeTree>& trees);

/// Reference hierarchy induced from ground-truth labels: collapse, join with
/// boundaries, induce, parse.
std::pair<Grammar, std::vector<EpisodeTree>>
ground_truth_hierarchy(const std::vector<FrameLabeling>& truth);

} // namespace hisd
