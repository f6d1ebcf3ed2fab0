#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hisd {

// ─── Feature data ────────────────────────────────────────────────────────────

/// One episode of observed features: a dense (n_frames × dim) matrix, one row
/// per time step.  All entries must be finite and n_frames, dim ≥ 1.
struct FeatureTrajectory {
    Eigen::MatrixXd features;   // n_frames × dim, row t = feature vector at step t
    int episode_id = 0;

    int n_frames() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
};

/// Validate a trajectory (shape and finiteness).  Throws InputError on failure.
void validate_trajectory(const FeatureTrajectory& traj);

/// A per-frame skill labeling for one episode.  Labels are zero-based and
/// every label is < k_skills.
struct FrameLabeling {
    std::vector<int> labels;
    int k_skills = 0;
};

void validate_labeling(const FrameLabeling& lab);

/// A set of episodes sharing a feature dimensionality, with optional per-frame
/// ground-truth labels (one labeling per episode, frame counts matching).
struct Dataset {
    std::vector<FeatureTrajectory> episodes;
    int dim = 0;
    std::optional<std::vector<FrameLabeling>> ground_truth;
    std::vector<std::string> skill_names;   // optional, for display only

    int n_episodes() const { return static_cast<int>(episodes.size()); }
};

void validate_dataset(const Dataset& ds);

// ─── Segments and skill sequences ───────────────────────────────────────────

/// A maximal run of identical labels; start/end are inclusive frame indices.
struct Segment {
    int label = 0;
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
    bool operator==(const Segment&) const = default;
};

/// The order of distinct skills in an episode after collapsing repeats.
struct SkillSequence {
    std::vector<int> symbols;
    int episode_id = 0;
};

/// Collapse consecutive duplicate labels to the sequence of distinct runs.
/// E.g. [0,0,1,1,1,0] → [0,1,0].  An empty labeling collapses to [].
SkillSequence run_length_collapse(const FrameLabeling& lab, int episode_id = 0);

/// Decompose a labeling into maximal constant segments, in temporal order.
/// Segment boundaries are inclusive; segments tile [0, n_frames).
std::vector<Segment> segments_of(const FrameLabeling& lab);

/// Inverse of segments_of: expand segments back to per-frame labels.
/// Segments must tile [0, n) contiguously; throws InputError otherwise.
FrameLabeling labels_of(const std::vector<Segment>& segments, int k_skills);

// ─── Feature preprocessing ───────────────────────────────────────────────────

/// Standardize every feature dimension to zero mean / unit variance, with the
/// statistics pooled over all frames of all episodes (population variance).
/// Dimensions with zero variance are left centred at 0.
Dataset standardize_features(const Dataset& ds);

} // namespace hisd
