#include "hisd/core.hpp"

#include <cmath>

#include "hisd/errors.hpp"

namespace hisd {

void validate_trajectory(const FeatureTrajectory& traj) {
    if (traj.features.rows() < 1 || traj.features.cols() < 1)
        throw InputError("trajectory must have at least one frame and one dimension");
    if (!traj.features.allFinite())
        throw InputError("trajectory contains non-finite features");
}

void validate_labeling(const FrameLabeling& lab) {
    if (lab.k_skills < 1) throw InputError("labeling must have k_skills >= 1");
    for (int v : lab.labels)
        if (v < 0 || v >= lab.k_skills)
            throw InputError("label out of range [0, k_skills)");
}

void validate_dataset(const Dataset& ds) {
    if (ds.episodes.empty()) throw InputError("dataset has no episodes");
    if (ds.dim < 1) throw InputError("dataset dim must be >= 1");
    for (const auto& ep : ds.episodes) {
        validate_trajectory(ep);
        if (ep.dim() != ds.dim)
            throw InputError("episode dimensionality disagrees with dataset");
    }
    if (ds.ground_truth) {
        if (ds.ground_truth->size() != ds.episodes.size())
            throw InputError("ground truth count disagrees with episode count");
        for (size_t i = 0; i < ds.episodes.size(); ++i) {
            validate_labeling((*ds.ground_truth)[i]);
            if (static_cast<int>((*ds.ground_truth)[i].labels.size()) != ds.episodes[i].n_frames())
                throw InputError("ground truth frame count disagrees with episode");
        }
    }
}

SkillSequence run_length_collapse(const FrameLabeling& lab, int episode_id) {
    SkillSequence seq;
    seq.episode_id = episode_id;
    for (int v : lab.labels)
        if (seq.symbols.empty() || seq.symbols.back() != v) seq.symbols.push_back(v);
    return seq;
}

std::vector<Segment> segments_of(const FrameLabeling& lab) {
    std::vector<Segment> out;
    const int n = static_cast<int>(lab.labels.size());
    int start = 0;
    for (int t = 1; t <= n; ++t) {
        if (t == n || lab.labels[t] != lab.labels[start]) {
            out.push_back({lab.labels[start], start, t - 1});
            start = t;
        }
    }
    return out;
}

FrameLabeling labels_of(const std::vector<Segment>& segments, int k_skills) {
    FrameLabeling lab;
    lab.k_skills = k_skills;
    int expect = 0;
    for (const auto& s : segments) {
        if (s.start != expect || s.end < s.start)
            throw InputError("segments must tile the episode contiguously");
        for (int t = s.start; t <= s.end; ++t) lab.labels.push_back(s.label);
        expect = s.end + 1;
    }
    return lab;
}

Dataset standardize_features(const Dataset& ds) {
    validate_dataset(ds);
    const int d = ds.dim;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    long long total = 0;
    for (const auto& ep : ds.episodes) {
        mean += ep.features.colwise().sum().transpose();
        total += ep.n_frames();
    }
    mean /= static_cast<double>(total);

    Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
    for (const auto& ep : ds.episodes) {
        Eigen::MatrixXd centred = ep.features.rowwise() - mean.transpose();
        var += centred.array().square().colwise().sum().matrix().transpose();
    }
    var /= static_cast<double>(total);   // population variance

    Eigen::VectorXd scale(d);
    for (int j = 0; j < d; ++j) scale[j] = var[j] > 0.0 ? 1.0 / std::sqrt(var[j]) : 1.0;

    Dataset out = ds;
    for (auto& ep : out.episodes) {
        ep.features.rowwise() -= mean.transpose();
        ep.features *= scale.asDiagonal();
    }
    return out;
}

} // namespace hisd
