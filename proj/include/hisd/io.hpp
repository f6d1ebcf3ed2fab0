#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hisd/core.hpp"
#include "hisd/eval.hpp"
#include "hisd/ot.hpp"
#include "hisd/synth.hpp"

namespace hisd {

// ─── Flat key/value config files ─────────────────────────────────────────────

/// Parsed flat config: `key = value` lines, '#' comments, blank lines ignored.
/// Repeated keys are preserved in order (used for synth templates).
struct FlatConfig {
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    /// Last value for key (conventional scalar lookup); throws InputError if absent.
    const std::string& get(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;
};

FlatConfig parse_flat_config(const std::string& text);
FlatConfig load_flat_config(const std::filesystem::path& path);

/// Typed readers with range/format errors naming the key.
long long config_int(const FlatConfig& cfg, const std::string& key, long long fallback);
double config_real(const FlatConfig& cfg, const std::string& key, double fallback);
bool config_bool(const FlatConfig& cfg, const std::string& key, bool fallback);

/// Build a SolverConfig from a config file; unknown keys are errors.
SolverConfig solver_config_from(const FlatConfig& cfg);
/// Serialize every field back to flat text (sorted keys), for run summaries.
std::string solver_config_to_text(const SolverConfig& cfg);

/// Build a SynthSpec from a config file; templates are given as repeated
///   template = <id> <id> ... [@ <weight>]
/// lines.  Unknown keys are errors.
SynthSpec synth_spec_from(const FlatConfig& cfg);

// ─── Feature files ───────────────────────────────────────────────────────────
//
// Binary layout: 4 magic bytes 'H','I','S','D', then three little-endian
// u32 values (version = 1, n_frames, dim), then n_frames·dim little-endian
// float32 features in row-major order.

void write_feature_file(const std::filesystem::path& path, const FeatureTrajectory& traj);
FeatureTrajectory read_feature_file(const std::filesystem::path& path);

// ─── Label files (one decimal integer per line) ───────────────────────────────

void write_label_file(const std::filesystem::path& path, const FrameLabeling& lab);
/// k_skills is inferred as max(label)+1 unless a larger k_hint is given.
FrameLabeling read_label_file(const std::filesystem::path& path, int k_hint = 0);

// ─── Dataset manifests ───────────────────────────────────────────────────────
//
// Flat text: `dim = <d>`, optional `skill_names = a,b,c`, then one
//   episode = <features_path> <labels_path|-> <n_frames>
// line per episode, paths relative to the manifest's directory.

struct ManifestEntry {
    std::string features_path;
    std::string labels_path;    // empty when absent
    int n_frames = 0;
};

struct Manifest {
    int dim = 0;
    std::vector<std::string> skill_names;
    std::vector<ManifestEntry> episodes;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Load every episode referenced by a manifest, validating that header frame
/// counts, label line counts and dimensions agree with it.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Write a dataset (features + labels + manifest) under out_dir.
void save_dataset(const std::filesystem::path& out_dir, const Dataset& ds);

// ─── Reports ─────────────────────────────────────────────────────────────────

/// One-row table mirroring the segmentation metric columns.
std::string seg_report_table(const SegMetricsReport& r);
/// Key/value form for files.
std::string seg_report_text(const SegMetricsReport& r);
std::string seg_report_json(const SegMetricsReport& r);

/// Two-row (truth/predicted) hierarchy metric table.
std::string tree_report_table(const TreeMetricsReport& truth, const TreeMetricsReport& pred);
std::string tree_report_text(const std::string& prefix, const TreeMetricsReport& r);
std::string tree_report_json(const TreeMetricsReport& truth, const TreeMetricsReport& pred);

} // namespace hisd
