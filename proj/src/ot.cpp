#include "hisd/ot.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "hisd/errors.hpp"
#include "hisd/log.hpp"
#include "rng.hpp"

namespace hisd {

using detail::rand_int;
using detail::rand_u01;

// ─── Validation ──────────────────────────────────────────────────────────────

namespace {

void require_range(double v, double lo, double hi, const char* key) {
    if (!(v >= lo && v <= hi))
        throw InputError(std::string(key) + " out of range");
}

} // namespace

void validate_config(const SolverConfig& cfg) {
    if (cfg.k_skills < 1) throw InputError("k_skills out of range");
    require_range(cfg.alpha_train, 0.01, 1.0, "alpha_train");
    require_range(cfg.alpha_eval, 0.01, 1.0, "alpha_eval");
    require_range(cfg.eps_train, 0.001, 0.5, "eps_train");
    require_range(cfg.eps_eval, 0.001, 0.5, "eps_eval");
    require_range(cfg.lambda_frames_train, 0.01, 0.1, "lambda_frames_train");
    require_range(cfg.lambda_frames_eval, 0.01, 0.1, "lambda_frames_eval");
    require_range(cfg.lambda_actions_train, 0.01, 0.1, "lambda_actions_train");
    require_range(cfg.lambda_actions_eval, 0.01, 0.1, "lambda_actions_eval");
    require_range(cfg.radius_gw, 0.001, 0.1, "radius_gw");
    require_range(cfg.rho, 0.001, 0.3, "rho");
    if (!(cfg.learning_rate >= 0.0)) throw InputError("learning_rate out of range");
    if (!(cfg.weight_decay >= 0.0)) throw InputError("weight_decay out of range");
    if (cfg.n_epochs < 1) throw InputError("n_epochs out of range");
    if (cfg.n_frames < 1) throw InputError("n_frames out of range");
    if (cfg.n_outer < 1) throw InputError("n_outer out of range");
    if (cfg.n_inner < 1) throw InputError("n_inner out of range");
}

// ─── Cost construction ───────────────────────────────────────────────────────

Eigen::MatrixXd build_cost_matrix(const FeatureTrajectory& traj, const Prototypes& protos) {
    validate_trajectory(traj);
    if (protos.k() < 1) throw InputError("prototypes are empty");
    if (protos.dim() != traj.dim())
        throw InputError("prototype dimension does not match features");

    const int n = traj.n_frames(), K = protos.k();
    const Eigen::VectorXd xn = traj.features.rowwise().norm();
    const Eigen::VectorXd pn = protos.vectors.rowwise().norm();
    const Eigen::MatrixXd dots = traj.features * protos.vectors.transpose();

    Eigen::MatrixXd c(n, K);
    for (int t = 0; t < n; ++t)
        for (int k = 0; k < K; ++k) {
            const double denom = xn(t) * pn(k);
            const double cosine = denom > 0.0 ? dots(t, k) / denom : 0.0;
            c(t, k) = std::clamp(1.0 - cosine, 0.0, 2.0);
        }
    return c;
}

Eigen::MatrixXd order_prior(int n_frames, int k_skills) {
    if (n_frames < 1 || k_skills < 1)
        throw InputError("order prior needs at least one frame and one skill");
    Eigen::MatrixXd p(n_frames, k_skills);
    const double tden = std::max(n_frames - 1, 1);
    const double kden = std::max(k_skills - 1, 1);
    for (int t = 0; t < n_frames; ++t)
        for (int k = 0; k < k_skills; ++k)
            p(t, k) = std::abs(t / tden - k / kden);
    return p;
}

// ─── Temporal penalty ────────────────────────────────────────────────────────

Eigen::MatrixXd gw_gradient(const Eigen::MatrixXd& gamma, double radius_gw) {
    const int n = static_cast<int>(gamma.rows());
    const int K = static_cast<int>(gamma.cols());
    if (n < 1 || K < 1) throw InputError("empty transport plan");
    const int w = std::max(1, static_cast<int>(std::ceil(radius_gw * n)));

    // Prefix sums over frames let each banded neighborhood sum come out in
    // O(K) instead of O(w·K).
    Eigen::MatrixXd cum(n, K);
    cum.row(0) = gamma.row(0);
    for (int t = 1; t < n; ++t) cum.row(t) = cum.row(t - 1) + gamma.row(t);

    Eigen::MatrixXd grad(n, K);
    for (int t = 0; t < n; ++t) {
        const int hi = std::min(n - 1, t + w);
        const int lo = t - w - 1;
        Eigen::RowVectorXd band = cum.row(hi);
        if (lo >= 0) band -= cum.row(lo);
        band -= gamma.row(t);
        const double total = band.sum();
        grad.row(t) = (Eigen::RowVectorXd::Constant(K, total) - band) * (2.0 / n);
    }
    return grad;
}

double gw_value(const Eigen::MatrixXd& gamma, double radius_gw) {
    return 0.5 * (gw_gradient(gamma, radius_gw).array() * gamma.array()).sum();
}

// ─── Entropic scaling solver ─────────────────────────────────────────────────

TransportPlan sinkhorn_solve(const Eigen::MatrixXd& cost, double eps,
                             double lambda_frames, double lambda_actions,
                             bool ub_frames, bool ub_actions, int n_inner) {
    const int n = static_cast<int>(cost.rows());
    const int K = static_cast<int>(cost.cols());
    if (n < 1 || K < 1) throw InputError("empty cost matrix");
    if (!cost.allFinite()) throw InputError("non-finite cost matrix");
    if (!(eps > 0.0)) throw InputError("eps must be positive");
    if (ub_frames && !(lambda_frames > 0.0))
        throw InputError("lambda_frames must be positive for a relaxed marginal");
    if (ub_actions && !(lambda_actions > 0.0))
        throw InputError("lambda_actions must be positive for a relaxed marginal");
    if (n_inner < 1) throw InputError("n_inner must be positive");

    TransportPlan plan;

    // With a hard row marginal and a single column, every feasible plan is the
    // uniform column; return it exactly.
    if (K == 1 && !ub_frames) {
        plan.gamma = Eigen::MatrixXd::Constant(n, 1, 1.0 / n);
        return plan;
    }

    const double log_p = -std::log(static_cast<double>(n));
    const double log_q = -std::log(static_cast<double>(K));
    const double kf = ub_frames ? lambda_frames / (lambda_frames + eps) : 1.0;
    const double kg = ub_actions ? lambda_actions / (lambda_actions + eps) : 1.0;

    const Eigen::ArrayXXd negc = (-cost).array();
    Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(K);

    auto update_f = [&]() {
        Eigen::ArrayXXd a = (negc.rowwise() + g.transpose()) / eps;
        Eigen::ArrayXd m = a.rowwise().maxCoeff();
        Eigen::ArrayXd lse = m + (a.colwise() - m).exp().rowwise().sum().log();
        f = kf * (eps * log_p - eps * lse);
    };
    auto update_g = [&]() {
        Eigen::ArrayXXd a = (negc.colwise() + f) / eps;
        Eigen::Array<double, 1, Eigen::Dynamic> m = a.colwise().maxCoeff();
        Eigen::ArrayXd lse =
            (m + (a.rowwise() - m).exp().colwise().sum().log()).transpose();
        g = kg * (eps * log_q - eps * lse);
    };
    auto make_plan = [&]() -> Eigen::ArrayXXd {
        Eigen::ArrayXXd e = ((negc.colwise() + f).rowwise() + g.transpose()) / eps;
        return e.exp().max(DBL_MIN);
    };

    for (int it = 0; it < n_inner; ++it) {
        update_f();
        update_g();
    }

    if (!ub_frames && !ub_actions) {
        // Both marginals are hard: alternate further until the row residual is
        // negligible (columns are exact after every g update).  Small eps on a
        // wide cost range converges at a flat geometric rate, so allow many
        // rounds; the feasibility projection below cleans up whatever residual
        // remains if the rate is too flat to reach the exit threshold.
        constexpr int kPolishCap = 30000;
        for (int it = 0; it < kPolishCap; ++it) {
            Eigen::ArrayXXd gamma = make_plan();
            const double resid = (gamma.rowwise().sum() - 1.0 / n).abs().maxCoeff();
            if (resid <= 1e-9) break;
            update_f();
            update_g();
        }
    } else if (!ub_frames && ub_actions) {
        update_f();   // finish on the hard marginal so rows are exact
    }

    if (!f.allFinite() || !g.allFinite()) throw NumericError("solver diverged");
    Eigen::ArrayXXd gamma = make_plan();
    if (!ub_frames && !ub_actions) {
        // Project the almost-feasible plan onto exact marginals: scale rows,
        // then columns, down to their targets, and spread the missing mass as
        // a rank-one correction.  The perturbation is bounded by the remaining
        // residual, and every entry stays strictly positive.
        const double p = 1.0 / n, q = 1.0 / K;
        const Eigen::ArrayXd rs = gamma.rowwise().sum();
        for (int t = 0; t < n; ++t)
            if (rs(t) > p) gamma.row(t) *= p / rs(t);
        const Eigen::ArrayXd cs = gamma.colwise().sum().transpose();
        for (int j = 0; j < K; ++j)
            if (cs(j) > q) gamma.col(j) *= q / cs(j);
        const Eigen::ArrayXd er = (p - gamma.rowwise().sum()).max(0.0);
        const Eigen::ArrayXd ec =
            (q - gamma.colwise().sum().transpose()).max(0.0);
        const double missing = er.sum();
        if (missing > 0.0)
            gamma += (er.matrix() * ec.matrix().transpose()).array() / missing;
    }
    plan.gamma = gamma.matrix();
    if (!plan.gamma.allFinite()) throw NumericError("solver diverged");
    return plan;
}

// ─── Alternating segmentation solve ──────────────────────────────────────────

TransportPlan solve_asot(const FeatureTrajectory& traj, const Prototypes& protos,
                         const SolverConfig& cfg, SolveMode mode,
                         std::vector<double>* objective_log) {
    validate_config(cfg);
    const int n = traj.n_frames();
    const int K = protos.k();
    const double alpha = cfg.alpha(mode);
    const double eps = cfg.eps(mode);

    const Eigen::MatrixXd base =
        (1.0 - alpha) * (build_cost_matrix(traj, protos) + cfg.rho * order_prior(n, K));

    TransportPlan plan;
    plan.gamma = Eigen::MatrixXd::Constant(n, K, 1.0 / (static_cast<double>(n) * K));
    for (int outer = 0; outer < cfg.n_outer; ++outer) {
        const Eigen::MatrixXd c_lin = base + alpha * gw_gradient(plan.gamma, cfg.radius_gw);
        plan = sinkhorn_solve(c_lin, eps, cfg.lambda_frames(mode), cfg.lambda_actions(mode),
                              cfg.ub_frames, cfg.ub_actions, cfg.n_inner);
        if (objective_log)
            objective_log->push_back((c_lin.array() * plan.gamma.array()).sum());
    }
    return plan;
}

FrameLabeling hard_assign(const TransportPlan& plan) {
    const int n = static_cast<int>(plan.gamma.rows());
    const int K = static_cast<int>(plan.gamma.cols());
    if (n < 1 || K < 1) throw InputError("empty transport plan");
    FrameLabeling out;
    out.k_skills = K;
    out.labels.resize(n);
    for (int t = 0; t < n; ++t) {
        int arg = 0;
        for (int k = 1; k < K; ++k)
            if (plan.gamma(t, k) > plan.gamma(t, arg)) arg = k;
        out.labels[t] = arg;
    }
    return out;
}

// ─── Prototype learning ──────────────────────────────────────────────────────

Prototypes init_prototypes(const Dataset& ds, int k, std::uint64_t seed) {
    validate_dataset(ds);
    if (k < 1) throw InputError("k_skills out of range");

    long long total = 0;
    for (const auto& ep : ds.episodes) total += ep.n_frames();
    Eigen::MatrixXd pool(total, ds.dim);
    long long row = 0;
    for (const auto& ep : ds.episodes) {
        pool.middleRows(row, ep.n_frames()) = ep.features;
        row += ep.n_frames();
    }
    const int N = static_cast<int>(total);

    std::mt19937_64 rng(seed);
    bool warned = false;

    // One k-means++ seeding pass followed by 25 Lloyd iterations; returns the
    // resulting within-cluster sum of squared distances (inertia).
    const auto run_once = [&](Eigen::MatrixXd& centers) -> double {
        std::vector<int> chosen;
        chosen.push_back(rand_int(rng, 0, N - 1));
        Eigen::VectorXd d2 =
            (pool.rowwise() - pool.row(chosen[0])).rowwise().squaredNorm();
        while (static_cast<int>(chosen.size()) < k) {
            const double mass = d2.sum();
            if (!(mass > 0.0)) {
                // every frame coincides with a chosen centroid: repeat centroids
                if (!warned) {
                    log_warn("fewer distinct frames than skills; repeating centroids");
                    warned = true;
                }
                const int m = static_cast<int>(chosen.size());
                while (static_cast<int>(chosen.size()) < k)
                    chosen.push_back(chosen[chosen.size() % m]);
                break;
            }
            const double r = rand_u01(rng) * mass;
            double acc = 0.0;
            int pick = N - 1;
            for (int i = 0; i < N; ++i) {
                acc += d2(i);
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
            chosen.push_back(pick);
            d2 = d2.cwiseMin(
                (pool.rowwise() - pool.row(pick)).rowwise().squaredNorm());
        }

        for (int j = 0; j < k; ++j) centers.row(j) = pool.row(chosen[j]);

        std::vector<int> assign(N, 0);
        for (int iter = 0; iter < 25; ++iter) {
            for (int i = 0; i < N; ++i) {
                int arg = 0;
                double best = (pool.row(i) - centers.row(0)).squaredNorm();
                for (int j = 1; j < k; ++j) {
                    const double d = (pool.row(i) - centers.row(j)).squaredNorm();
                    if (d < best) {
                        best = d;
                        arg = j;
                    }
                }
                assign[i] = arg;
            }
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, ds.dim);
            std::vector<long long> counts(k, 0);
            for (int i = 0; i < N; ++i) {
                sums.row(assign[i]) += pool.row(i);
                counts[assign[i]]++;
            }
            for (int j = 0; j < k; ++j)
                if (counts[j] > 0) centers.row(j) = sums.row(j) / static_cast<double>(counts[j]);
        }

        double inertia = 0.0;
        for (int i = 0; i < N; ++i) {
            double best = (pool.row(i) - centers.row(0)).squaredNorm();
            for (int j = 1; j < k; ++j)
                best = std::min(best, (pool.row(i) - centers.row(j)).squaredNorm());
            inertia += best;
        }
        return inertia;
    };

    // A single run can settle into a poor local optimum (two centroids
    // splitting one cluster while another centroid covers two clusters), so
    // restart the seeding several times and keep the lowest-inertia solution.
    constexpr int kRestarts = 8;
    Eigen::MatrixXd best_centers(k, ds.dim);
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kRestarts; ++r) {
        Eigen::MatrixXd centers(k, ds.dim);
        const double inertia = run_once(centers);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_centers = std::move(centers);
        }
    }

    Prototypes p;
    p.vectors = std::move(best_centers);
    return p;
}

Prototypes fit(const Dataset& ds, const SolverConfig& cfg) {
    validate_dataset(ds);
    validate_config(cfg);

    Prototypes protos = init_prototypes(ds, cfg.k_skills, cfg.seed);
    if (cfg.learning_rate == 0.0) return protos;

    const int E = static_cast<int>(ds.episodes.size());
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> order(E);

    for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        for (int i = 0; i < E; ++i) order[i] = i;
        for (int i = E - 1; i >= 1; --i)
            std::swap(order[i], order[rand_int(rng, 0, i)]);

        for (int idx : order) {
            const FeatureTrajectory& full = ds.episodes[idx];
            FeatureTrajectory crop;
            crop.episode_id = full.episode_id;
            if (full.n_frames() > cfg.n_frames) {
                const int start = rand_int(rng, 0, full.n_frames() - cfg.n_frames);
                crop.features = full.features.middleRows(start, cfg.n_frames);
            } else {
                crop.features = full.features;
            }

            const TransportPlan plan = solve_asot(crop, protos, cfg, SolveMode::Train);

            // Gradient of <C_feat, Γ> in the prototypes, with unit-normalized
            // frames (zero frames contribute a constant cost and drop out).
            const int n = crop.n_frames();
            Eigen::MatrixXd xhat = crop.features;
            for (int t = 0; t < n; ++t) {
                const double norm = xhat.row(t).norm();
                if (norm > 0.0)
                    xhat.row(t) /= norm;
                else
                    xhat.row(t).setZero();
            }
            const Eigen::MatrixXd w = plan.gamma.transpose() * xhat;   // K×dim
            for (int k = 0; k < cfg.k_skills; ++k) {
                const double pnorm = protos.vectors.row(k).norm();
                if (pnorm <= 0.0) continue;
                const double s = w.row(k).dot(protos.vectors.row(k));
                const Eigen::RowVectorXd grad =
                    -w.row(k) / pnorm + (s / (pnorm * pnorm * pnorm)) * protos.vectors.row(k);
                Eigen::RowVectorXd updated =
                    (1.0 - cfg.learning_rate * cfg.weight_decay) * protos.vectors.row(k) -
                    cfg.learning_rate * grad;
                const double unorm = updated.norm();
                if (unorm > 1e-12) protos.vectors.row(k) = updated / unorm;
            }
        }
    }
    return protos;
}

// ─── End-to-end segmentation ─────────────────────────────────────────────────

SegmentationResult run_segmentation(const Dataset& ds, const SolverConfig& cfg,
                                    int threads) {
    validate_dataset(ds);
    validate_config(cfg);
    if (threads < 1) throw InputError("threads must be at least 1");

    const Dataset work = cfg.std_feats ? standardize_features(ds) : ds;

    SegmentationResult result;
    result.prototypes = fit(work, cfg);

    const int E = static_cast<int>(work.episodes.size());
    result.labels.resize(E);

    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            const int e = next.fetch_add(1);
            if (e >= E) return;
            try {
                const TransportPlan plan =
                    solve_asot(work.episodes[e], result.prototypes, cfg, SolveMode::Eval);
                result.labels[e] = hard_assign(plan);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::min(threads, std::max(E, 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

} // namespace hisd
