#include "hisd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hisd/errors.hpp"
#include "hisd/log.hpp"
#include "rng.hpp"

namespace hisd {

using detail::rand_int;
using detail::rand_normal;
using detail::rand_u01;

// ─── Validation ──────────────────────────────────────────────────────────────

void validate_spec(const SynthSpec& spec) {
    if (spec.k_skills < 1) throw InputError("k_skills must be at least 1");
    if (spec.dim < 1) throw InputError("dim must be at least 1");
    if (spec.dim < 2 && spec.k_skills >= 3)
        throw InputError("cannot separate prototypes: dim < 2 with k_skills >= 3");
    if (spec.duration_min < 1) throw InputError("duration_min must be at least 1");
    if (spec.duration_min > spec.duration_max)
        throw InputError("invalid duration range");
    if (spec.noise_sigma < 0.0) throw InputError("noise_sigma must be non-negative");
    if (spec.drift_sigma < 0.0) throw InputError("drift_sigma must be non-negative");
    if (spec.n_episodes < 1) throw InputError("n_episodes must be at least 1");
    if (spec.templates.empty()) throw InputError("at least one template is required");
    for (const auto& tpl : spec.templates) {
        if (tpl.symbols.empty()) throw InputError("template must contain at least one symbol");
        if (!(tpl.weight > 0.0)) throw InputError("template weight must be positive");
        for (size_t i = 0; i < tpl.symbols.size(); ++i) {
            if (tpl.symbols[i] < 0 || tpl.symbols[i] >= spec.k_skills)
                throw InputError("template symbol out of range");
            if (i > 0 && tpl.symbols[i] == tpl.symbols[i - 1])
                throw InputError("template repeats a symbol back-to-back");
        }
    }
}

// ─── Skill means ─────────────────────────────────────────────────────────────

namespace {

/// Unit-norm skill means; when the space is wide enough to hold them apart
/// (dim >= k) resample until every pairwise angle is at least 60 degrees.
Eigen::MatrixXd draw_means(int k, int dim, std::mt19937_64& rng) {
    const bool enforce_angles = dim >= k;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Eigen::MatrixXd m(k, dim);
        bool degenerate = false;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < dim; ++j) m(i, j) = rand_normal(rng);
            double norm = m.row(i).norm();
            if (norm < 1e-12) {
                degenerate = true;
                break;
            }
            m.row(i) /= norm;
        }
        if (degenerate) continue;
        if (enforce_angles) {
            bool ok = true;
            for (int i = 0; i < k && ok; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (m.row(i).dot(m.row(j)) > 0.5 + 1e-9) {   // cos 60°
                        ok = false;
                        break;
                    }
            if (!ok) continue;
        }
        return m;
    }
    throw NumericError("failed to draw separated skill means");
}

int pick_template(const std::vector<EpisodeTemplate>& templates, std::mt19937_64& rng) {
    double total = 0.0;
    for (const auto& t : templates) total += t.weight;
    const double r = rand_u01(rng) * total;
    double acc = 0.0;
    for (size_t i = 0; i < templates.size(); ++i) {
        acc += templates[i].weight;
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(templates.size()) - 1;
}

} // namespace

// ─── Generation ──────────────────────────────────────────────────────────────

SynthOutput generate(const SynthSpec& spec) {
    validate_spec(spec);
    std::mt19937_64 rng(spec.seed);

    SynthOutput out;
    out.skill_means = draw_means(spec.k_skills, spec.dim, rng);

    out.dataset.dim = spec.dim;
    out.dataset.ground_truth.emplace();
    Eigen::VectorXd drift(spec.dim);

    for (int e = 0; e < spec.n_episodes; ++e) {
        const int tpl_idx = pick_template(spec.templates, rng);
        out.template_choice.push_back(tpl_idx);
        const auto& symbols = spec.templates[tpl_idx].symbols;

        std::vector<int> durations(symbols.size());
        int n_frames = 0;
        for (size_t s = 0; s < symbols.size(); ++s) {
            durations[s] = rand_int(rng, spec.duration_min, spec.duration_max);
            n_frames += durations[s];
        }

        FeatureTrajectory traj;
        traj.episode_id = e;
        traj.features.resize(n_frames, spec.dim);
        FrameLabeling labels;
        labels.k_skills = spec.k_skills;
        labels.labels.reserve(n_frames);

        int row = 0;
        for (size_t s = 0; s < symbols.size(); ++s) {
            const int skill = symbols[s];
            drift.setZero();
            for (int t = 0; t < durations[s]; ++t) {
                Eigen::VectorXd x = out.skill_means.row(skill).transpose();
                if (spec.noise_sigma > 0.0)
                    for (int d = 0; d < spec.dim; ++d)
                        x(d) += spec.noise_sigma * rand_normal(rng);
                if (spec.drift_sigma > 0.0) {
                    for (int d = 0; d < spec.dim; ++d)
                        drift(d) += spec.drift_sigma * rand_normal(rng);
                    x += drift;
                }
                traj.features.row(row++) = x.transpose();
                labels.labels.push_back(skill);
            }
        }

        out.dataset.episodes.push_back(std::move(traj));
        out.dataset.ground_truth->push_back(std::move(labels));
    }

    validate_dataset(out.dataset);
    return out;
}

// ─── Achievability oracle ────────────────────────────────────────────────────

namespace {

struct OracleCounts {
    int P = 0, G = 0;
    std::vector<std::vector<long long>> inter;   // [p][g]
    std::vector<long long> pred_ct, truth_ct;
};

double mapped_miou(const OracleCounts& c, const std::vector<int>& map_pg) {
    // invert: which pred feeds each truth class (at most one, injective)
    std::vector<int> src(c.G, -1);
    for (int p = 0; p < c.P; ++p)
        if (map_pg[p] >= 0) src[map_pg[p]] = p;
    double sum = 0.0;
    int classes = 0;
    for (int g = 0; g < c.G; ++g) {
        long long inter = 0, pred = 0;
        if (src[g] >= 0) {
            inter = c.inter[src[g]][g];
            pred = c.pred_ct[src[g]];
        }
        const long long uni = c.truth_ct[g] + pred - inter;
        if (uni == 0) continue;
        sum += static_cast<double>(inter) / static_cast<double>(uni);
        classes++;
    }
    return classes ? sum / classes : 0.0;
}

void search_mappings(const OracleCounts& c, int p, std::vector<int>& map_pg,
                     std::vector<char>& used, double& best) {
    if (p == c.P) {
        best = std::max(best, mapped_miou(c, map_pg));
        return;
    }
    map_pg[p] = -1;
    search_mappings(c, p + 1, map_pg, used, best);
    for (int g = 0; g < c.G; ++g) {
        if (used[g]) continue;
        used[g] = 1;
        map_pg[p] = g;
        search_mappings(c, p + 1, map_pg, used, best);
        map_pg[p] = -1;
        used[g] = 0;
    }
}

} // namespace

double oracle_best_miou(const std::vector<FrameLabeling>& truth,
                        const std::vector<FrameLabeling>& pred) {
    if (pred.empty() || pred.size() != truth.size())
        throw InputError("prediction/truth episode counts disagree");

    OracleCounts c;
    for (const auto& l : pred) c.P = std::max(c.P, l.k_skills);
    for (const auto& l : truth) c.G = std::max(c.G, l.k_skills);
    if (c.P > 6 || c.G > 6) throw InputError("oracle limited to <= 6 classes");

    c.inter.assign(c.P, std::vector<long long>(c.G, 0));
    c.pred_ct.assign(c.P, 0);
    c.truth_ct.assign(c.G, 0);
    for (size_t e = 0; e < pred.size(); ++e) {
        validate_labeling(pred[e]);
        validate_labeling(truth[e]);
        if (pred[e].labels.size() != truth[e].labels.size())
            throw InputError("prediction/truth frame counts disagree");
        for (size_t t = 0; t < pred[e].labels.size(); ++t) {
            const int p = pred[e].labels[t], g = truth[e].labels[t];
            c.inter[p][g]++;
            c.pred_ct[p]++;
            c.truth_ct[g]++;
        }
    }

    double best = 0.0;
    std::vector<int> map_pg(c.P, -1);
    std::vector<char> used(c.G, 0);
    search_mappings(c, 0, map_pg, used, best);
    return best;
}

} // namespace hisd
