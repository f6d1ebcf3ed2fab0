#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hisd/core.hpp"

namespace hisd {

// ─── Solver configuration ────────────────────────────────────────────────────

enum class SolveMode { Train, Eval };

/// Hyperparameters for the transport-based segmenter.  Train/eval variants of
/// the continuous knobs allow a smoother objective during prototype learning
/// and a sharper one at labeling time.
struct SolverConfig {
    int k_skills = 3;

    double alpha_train = 0.3;    // structure blend weight, [0.01, 1.0]
    double alpha_eval = 0.6;
    double eps_train = 0.07;     // entropic regularization, [0.001, 0.5]
    double eps_eval = 0.04;
    double lambda_frames_train = 0.05;   // row-marginal KL weight, [0.01, 0.1]
    double lambda_frames_eval = 0.05;
    double lambda_actions_train = 0.05;  // column-marginal KL weight, [0.01, 0.1]
    double lambda_actions_eval = 0.05;
    double radius_gw = 0.04;     // temporal band radius (fraction of frames), [0.001, 0.1]
    double rho = 0.15;           // diagonal order-prior weight, [0.001, 0.3]

    bool ub_frames = false;      // relax the row (frame) marginal
    bool ub_actions = true;      // relax the column (skill) marginal
    bool std_feats = true;       // standardize features before fitting

    double learning_rate = 0.05; // prototype step size (0 disables updates)
    double weight_decay = 1e-4;  // decoupled shrinkage applied with the step
    int n_epochs = 15;           // passes over the dataset during fit
    int n_frames = 256;          // training crop length (frames per episode)

    int n_outer = 10;            // structure linearization iterations
    int n_inner = 100;           // scaling iterations per linearization
    std::uint64_t seed = 0;

    double alpha(SolveMode m) const { return m == SolveMode::Train ? alpha_train : alpha_eval; }
    double eps(SolveMode m) const { return m == SolveMode::Train ? eps_train : eps_eval; }
    double lambda_frames(SolveMode m) const {
        return m == SolveMode::Train ? lambda_frames_train : lambda_frames_eval;
    }
    double lambda_actions(SolveMode m) const {
        return m == SolveMode::Train ? lambda_actions_train : lambda_actions_eval;
    }
};

/// Check every field against its allowed range; throws InputError naming the
/// offending key.
void validate_config(const SolverConfig& cfg);

// ─── Prototypes and transport plans ──────────────────────────────────────────

/// Learned skill prototypes, one row per skill (k_skills × dim).
struct Prototypes {
    Eigen::MatrixXd vectors;

    int k() const { return static_cast<int>(vectors.rows()); }
    int dim() const { return static_cast<int>(vectors.cols()); }
};

/// Soft assignment of frames to skills: a dense nonnegative (n_frames ×
/// k_skills) coupling whose row marginals target 1/n and column marginals 1/K
/// (exactly when the corresponding marginal is balanced, KL-relaxed
/// otherwise).
struct TransportPlan {
    Eigen::MatrixXd gamma;
};

// ─── Cost construction ───────────────────────────────────────────────────────

/// Cosine-distance cost: C[t,k] = 1 − cos(x_t, p_k), clipped to [0, 2].
/// Zero vectors are treated as having cosine similarity 0 (cost 1).
Eigen::MatrixXd build_cost_matrix(const FeatureTrajectory& traj, const Prototypes& protos);

/// Diagonal progress prior: P[t,k] = |t/max(n−1,1) − k/max(K−1,1)|.
Eigen::MatrixXd order_prior(int n_frames, int k_skills);

/// Value of the banded label-disagreement penalty
///   R(Γ) = (1/n) · Σ_{0<|t−t'|≤w} Σ_{k≠k'} Γ[t,k]·Γ[t',k']
/// with w = max(1, ceil(radius_gw · n)).
double gw_value(const Eigen::MatrixXd& gamma, double radius_gw);

/// Gradient of gw_value: (2/n) · A·Γ·B where A is the 0/1 band matrix of
/// width w with zero diagonal and B = 1 − I.
Eigen::MatrixXd gw_gradient(const Eigen::MatrixXd& gamma, double radius_gw);

// ─── Solvers ─────────────────────────────────────────────────────────────────

/// Entropic scaling solver in the log domain.  Row target is uniform 1/n,
/// column target uniform 1/K.  A balanced marginal is enforced to 1e-6; a
/// relaxed marginal uses KL scaling with exponent λ/(λ+ε).  All entries of
/// the result are strictly positive.  Throws InputError on non-finite costs
/// and NumericError("solver diverged") on overflow.
TransportPlan sinkhorn_solve(const Eigen::MatrixXd& cost, double eps,
                             double lambda_frames, double lambda_actions,
                             bool ub_frames, bool ub_actions, int n_inner);

/// Full segmentation solve: alternates between linearizing the temporal
/// penalty at the current plan and re-solving the resulting transport problem,
///   C_lin = (1−α)·(C_feat + ρ·order_prior) + α·gw_gradient(Γ_prev),
/// for n_outer rounds.  When objective_log is given it receives
/// ⟨C_lin, Γ⟩ per round (non-increasing as the alternation converges).
TransportPlan solve_asot(const FeatureTrajectory& traj, const Prototypes& protos,
                         const SolverConfig& cfg, SolveMode mode,
                         std::vector<double>* objective_log = nullptr);

/// Per-frame argmax of the plan; ties resolve to the lowest skill id.
FrameLabeling hard_assign(const TransportPlan& plan);

// ─── Prototype learning ──────────────────────────────────────────────────────

/// k-means++ seeding followed by 25 Lloyd iterations over all frames pooled
/// across episodes.  Deterministic given the seed.  When the data holds fewer
/// distinct frames than k, centroids repeat and a warning is emitted.
Prototypes init_prototypes(const Dataset& ds, int k, std::uint64_t seed);

/// Mini-batch prototype learning: n_epochs passes over episodes in seeded
/// shuffled order, each episode cropped to a random contiguous window of at
/// most n_frames frames; prototypes take a gradient step on the feature-cost
/// term with decoupled weight decay and are renormalized to unit norm after
/// each step.  Deterministic given cfg.seed.
Prototypes fit(const Dataset& ds, const SolverConfig& cfg);

/// End-to-end segmentation: optional standardization, fit, then an eval-mode
/// solve + hard assignment per full episode.  `threads` > 1 parallelizes the
/// per-episode eval solves (results are independent of thread count).
struct SegmentationResult {
    Prototypes prototypes;
    std::vector<FrameLabeling> labels;
};

SegmentationResult run_segmentation(const Dataset& ds, const SolverConfig& cfg,
                                    int threads = 1);

} // namespace hisd
