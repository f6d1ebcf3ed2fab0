#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hisd/core.hpp"
#include "hisd/errors.hpp"
#include "hisd/eval.hpp"
#include "hisd/grammar.hpp"
#include "hisd/io.hpp"
#include "hisd/log.hpp"
#include "hisd/ot.hpp"
#include "hisd/synth.hpp"

namespace fs = std::filesystem;
using namespace hisd;

namespace {

// ─── Helpers ─────────────────────────────────────────────────────────────────

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << text;
    if (!out) throw InputError("failed writing file: " + path.string());
}

/// A dataset argument may be a manifest file or a directory holding one.
fs::path resolve_manifest(const fs::path& p) {
    if (fs::is_directory(p)) return p / "manifest.txt";
    return p;
}

/// Read a directory of `*.labels` files in name order; every labeling gets the
/// same k (the largest seen) so class counts agree across episodes.
std::vector<FrameLabeling> load_label_dir(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw InputError("not a directory of label files: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".labels")
            files.push_back(entry.path());
    if (files.empty())
        throw InputError("no .labels files in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<FrameLabeling> out;
    int k = 0;
    for (const auto& f : files) {
        out.push_back(read_label_file(f));
        k = std::max(k, out.back().k_skills);
    }
    for (auto& lab : out) lab.k_skills = k;
    return out;
}

/// Labels from either a manifest(-holding directory) with ground truth or a
/// plain directory of .labels files.
std::vector<FrameLabeling> load_labels_any(const fs::path& p) {
    const bool is_manifest =
        fs::is_regular_file(p) || (fs::is_directory(p) && fs::exists(p / "manifest.txt"));
    if (is_manifest) {
        Dataset ds = load_dataset(resolve_manifest(p));
        if (!ds.ground_truth)
            throw InputError("dataset has no labels: " + p.string());
        return *ds.ground_truth;
    }
    return load_label_dir(p);
}

void write_labels(const fs::path& dir, const std::vector<FrameLabeling>& labels) {
    fs::create_directories(dir);
    char name[32];
    for (size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(name, sizeof(name), "ep%05zu.labels", i);
        write_label_file(dir / name, labels[i]);
    }
}

Grammar induce_from_labels(const std::vector<FrameLabeling>& labels) {
    std::vector<SkillSequence> seqs;
    seqs.reserve(labels.size());
    for (size_t i = 0; i < labels.size(); ++i)
        seqs.push_back(run_length_collapse(labels[i], static_cast<int>(i)));
    return induce(build_corpus(seqs));
}

void write_dot_trees(const fs::path& dir, const std::vector<EpisodeTree>& trees,
                     const std::vector<std::string>& skill_names) {
    fs::create_directories(dir);
    char name[32];
    for (const auto& tree : trees) {
        std::snprintf(name, sizeof(name), "ep%05d.dot", tree.episode_index);
        write_text_file(dir / name, tree_to_dot(tree, skill_names));
    }
}

std::string dataset_section(const Dataset& ds) {
    long long frames = 0;
    for (const auto& ep : ds.episodes) frames += ep.n_frames();
    std::ostringstream out;
    out << "[dataset]\n"
        << "dim = " << ds.dim << '\n'
        << "episodes = " << ds.episodes.size() << '\n'
        << "frames = " << frames << '\n';
    return out.str();
}

// ─── Subcommands ─────────────────────────────────────────────────────────────

struct CommonOpts {
    std::string config_path;
    std::string dataset_path;
    std::string out_path;
    std::string dot_dir;
    long long seed = -1;   // <0 means "use the config's seed"
    int threads = 1;
    std::string mode = "both";
};

int cmd_synth(const CommonOpts& opt) {
    FlatConfig raw = load_flat_config(opt.config_path);
    SynthSpec spec = synth_spec_from(raw);
    if (opt.seed >= 0) spec.seed = static_cast<std::uint64_t>(opt.seed);

    SynthOutput out = generate(spec);
    fs::create_directories(opt.out_path);
    save_dataset(opt.out_path, out.dataset);

    long long frames = 0;
    for (const auto& ep : out.dataset.episodes) frames += ep.n_frames();
    std::cout << "episodes = " << out.dataset.episodes.size() << '\n'
              << "frames = " << frames << '\n';
    log_info("wrote dataset to " + fs::path(opt.out_path).string());
    return 0;
}

int cmd_segment(const CommonOpts& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    Dataset ds = load_dataset(resolve_manifest(opt.dataset_path));
    SolverConfig cfg = solver_config_from(load_flat_config(opt.config_path));
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);

    SegmentationResult result = run_segmentation(ds, cfg, opt.threads);

    fs::create_directories(opt.out_path);
    write_labels(fs::path(opt.out_path) / "labels", result.labels);

    std::ostringstream summary;
    summary << dataset_section(ds) << "\n[config]\n" << solver_config_to_text(cfg);
    write_text_file(fs::path(opt.out_path) / "summary.txt", summary.str());

    char msg[96];
    std::snprintf(msg, sizeof(msg), "segmentation finished in %.2fs", seconds_since(t0));
    log_info(msg);
    return 0;
}

int cmd_induce(const CommonOpts& opt) {
    std::vector<FrameLabeling> labels = load_labels_any(opt.dataset_path);
    Grammar g = induce_from_labels(labels);
    write_text_file(opt.out_path, grammar_to_text(g));
    if (!opt.dot_dir.empty()) write_dot_trees(opt.dot_dir, parse_trees(g), {});
    std::cout << "episodes = " << labels.size() << '\n'
              << "rules = " << g.rules.size() << '\n';
    return 0;
}

int cmd_eval(const CommonOpts& opt, const std::string& pred_path,
             const std::string& truth_path) {
    if (opt.mode != "seg" && opt.mode != "tree" && opt.mode != "both")
        throw InputError("mode must be one of: seg, tree, both");
    std::vector<FrameLabeling> pred = load_labels_any(pred_path);
    std::vector<FrameLabeling> truth = load_labels_any(truth_path);

    if (opt.mode == "seg" || opt.mode == "both")
        std::cout << seg_report_table(evaluate_segmentation(pred, truth));
    if (opt.mode == "tree" || opt.mode == "both") {
        auto [tg, ttrees] = ground_truth_hierarchy(truth);
        auto [pg, ptrees] = ground_truth_hierarchy(pred);
        std::cout << tree_report_table(summarize_trees(ttrees), summarize_trees(ptrees));
    }
    return 0;
}

int cmd_pipeline(const CommonOpts& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    Dataset ds = load_dataset(resolve_manifest(opt.dataset_path));
    SolverConfig cfg = solver_config_from(load_flat_config(opt.config_path));
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);

    SegmentationResult result = run_segmentation(ds, cfg, opt.threads);
    fs::create_directories(opt.out_path);
    write_labels(fs::path(opt.out_path) / "labels", result.labels);

    Grammar g = induce_from_labels(result.labels);
    write_text_file(fs::path(opt.out_path) / "grammar.txt", grammar_to_text(g));
    std::vector<EpisodeTree> pred_trees = parse_trees(g);
    if (!opt.dot_dir.empty()) write_dot_trees(opt.dot_dir, pred_trees, ds.skill_names);

    std::ostringstream summary;
    summary << dataset_section(ds) << "\n[config]\n" << solver_config_to_text(cfg)
            << "\n[grammar]\nrules = " << g.rules.size() << '\n';

    if (ds.ground_truth) {
        const SegMetricsReport seg = evaluate_segmentation(result.labels, *ds.ground_truth);
        auto [tg, truth_trees] = ground_truth_hierarchy(*ds.ground_truth);
        summary << "\n[segmentation]\n" << seg_report_text(seg) << "\n[hierarchy]\n"
                << tree_report_text("truth", summarize_trees(truth_trees))
                << tree_report_text("predicted", summarize_trees(pred_trees));
        std::cout << seg_report_table(seg);
    }
    write_text_file(fs::path(opt.out_path) / "summary.txt", summary.str());

    char msg[96];
    std::snprintf(msg, sizeof(msg), "pipeline finished in %.2fs", seconds_since(t0));
    log_info(msg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    init_log_from_env();

    CLI::App app{"unsupervised skill segmentation and hierarchy induction"};
    app.require_subcommand(1);
    CommonOpts opt;
    std::string pred_path, truth_path;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", opt.config_path, "generator config file")->required();
    synth->add_option("--out", opt.out_path, "output dataset directory")->required();
    synth->add_option("--seed", opt.seed, "override the config seed");

    CLI::App* segment = app.add_subcommand("segment", "segment a dataset into skills");
    segment->add_option("--dataset", opt.dataset_path, "manifest or dataset directory")
        ->required();
    segment->add_option("--config", opt.config_path, "solver config file")->required();
    segment->add_option("--out", opt.out_path, "output directory")->required();
    segment->add_option("--seed", opt.seed, "override the config seed");
    segment->add_option("--threads", opt.threads, "worker threads for labeling");

    CLI::App* induce_cmd = app.add_subcommand("induce", "induce a grammar from labels");
    induce_cmd->add_option("--dataset", opt.dataset_path, "labels directory or dataset")
        ->required();
    induce_cmd->add_option("--out", opt.out_path, "grammar output file")->required();
    induce_cmd->add_option("--dot", opt.dot_dir, "directory for per-episode DOT trees");

    CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against truth");
    eval_cmd->add_option("pred", pred_path, "predicted labels directory")->required();
    eval_cmd->add_option("truth", truth_path, "truth labels (directory or manifest)")
        ->required();
    eval_cmd->add_option("--mode", opt.mode, "seg, tree, or both");

    CLI::App* pipeline = app.add_subcommand("pipeline", "segment, induce and score");
    pipeline->add_option("--dataset", opt.dataset_path, "manifest or dataset directory")
        ->required();
    pipeline->add_option("--config", opt.config_path, "solver config file")->required();
    pipeline->add_option("--out", opt.out_path, "output directory")->required();
    pipeline->add_option("--seed", opt.seed, "override the config seed");
    pipeline->add_option("--threads", opt.threads, "worker threads for labeling");
    pipeline->add_option("--dot", opt.dot_dir, "directory for per-episode DOT trees");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(opt);
        if (segment->parsed()) return cmd_segment(opt);
        if (induce_cmd->parsed()) return cmd_induce(opt);
        if (eval_cmd->parsed()) return cmd_eval(opt, pred_path, truth_path);
        if (pipeline->parsed()) return cmd_pipeline(opt);
        std::cerr << "[error] no subcommand given\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "[error] " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[error] " << e.what() << '\n';
        return 1;
    }
}
