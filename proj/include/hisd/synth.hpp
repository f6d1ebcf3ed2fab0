#pragma once

#include <cstdint>
#include <vector>

#include "hisd/core.hpp"

namespace hisd {

// ─── Synthetic data specification ────────────────────────────────────────────

/// A candidate episode script: an ordered skill-id sequence and a sampling
/// weight.  Adjacent duplicate symbols are rejected (they would merge under
/// run-length collapse and the episode could no longer reproduce its script).
struct EpisodeTemplate {
    std::vector<int> symbols;
    double weight = 1.0;
};

struct SynthSpec {
    int k_skills = 3;
    int dim = 16;
    std::vector<EpisodeTemplate> templates;
    int duration_min = 5;        // frames per skill segment, inclusive bounds
    int duration_max = 15;
    double noise_sigma = 0.05;   // iid Gaussian noise per frame
    double drift_sigma = 0.0;    // random-walk drift accumulated within a segment
    int n_episodes = 100;
    std::uint64_t seed = 0;
};

/// Validate ranges and template contents; throws InputError (message
/// "invalid duration range" when duration_min > duration_max, "cannot
/// separate prototypes" when dim < 2 with k_skills ≥ 3).
void validate_spec(const SynthSpec& spec);

/// Generated dataset plus the sampled generating structure.
struct SynthOutput {
    Dataset dataset;                         // ground_truth always present
    Eigen::MatrixXd skill_means;             // k × dim unit rows
    std::vector<int> template_choice;        // per episode, index into spec.templates
};

/// Sample a dataset: unit-norm skill means with pairwise angles ≥ 60° when
/// dim ≥ k (resampled until satisfied); per episode a weighted template
/// choice, uniform segment durations in [duration_min, duration_max], and
/// frames μ_k + noise + cumulative within-segment drift.  Deterministic given
/// spec.seed.
SynthOutput generate(const SynthSpec& spec);

/// Exhaustive upper bound on the pooled (Full) mean IoU achievable by ANY
/// one-to-one partial mapping of predicted clusters to truth classes.
/// Independent of the Hungarian evaluation path; throws InputError
/// ("oracle limited to ≤6 classes") when either side exceeds 6 classes.
double oracle_best_miou(const std::vector<FrameLabeling>& truth,
                        const std::vector<FrameLabeling>& pred);

} // namespace hisd
