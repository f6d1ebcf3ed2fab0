#include "hisd/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hisd/errors.hpp"

namespace hisd {

namespace fs = std::filesystem;

// ─── Flat key/value config files ─────────────────────────────────────────────

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_real_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

bool FlatConfig::has(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return true;
    return false;
}

const std::string& FlatConfig::get(const std::string& key) const {
    const std::string* found = nullptr;
    for (const auto& [k, v] : entries)
        if (k == key) found = &v;
    if (!found) throw InputError("missing config key: " + key);
    return *found;
}

std::vector<std::string> FlatConfig::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v);
    return out;
}

FlatConfig parse_flat_config(const std::string& text) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(line_no) + " is not 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw InputError("config line " + std::to_string(line_no) + " has an empty key");
        cfg.entries.emplace_back(std::move(key), std::move(value));
    }
    return cfg;
}

FlatConfig load_flat_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_flat_config(buf.str());
}

long long config_int(const FlatConfig& cfg, const std::string& key, long long fallback) {
    if (!cfg.has(key)) return fallback;
    const std::string& v = cfg.get(key);
    errno = 0;
    char* end = nullptr;
    long long out = std::strtoll(v.c_str(), &end, 10);
    if (errno != 0 || end == v.c_str() || *end != '\0')
        throw InputError("config key " + key + " is not an integer: " + v);
    return out;
}

double config_real(const FlatConfig& cfg, const std::string& key, double fallback) {
    if (!cfg.has(key)) return fallback;
    const std::string& v = cfg.get(key);
    errno = 0;
    char* end = nullptr;
    double out = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0' || !std::isfinite(out))
        throw InputError("config key " + key + " is not a finite real: " + v);
    return out;
}

bool config_bool(const FlatConfig& cfg, const std::string& key, bool fallback) {
    if (!cfg.has(key)) return fallback;
    const std::string& v = cfg.get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InputError("config key " + key + " is not a boolean: " + v);
}

// ─── Solver / synth config assembly ──────────────────────────────────────────

namespace {

const std::set<std::string> kSolverKeys = {
    "k_skills", "alpha_train", "alpha_eval", "eps_train", "eps_eval",
    "lambda_frames_train", "lambda_frames_eval", "lambda_actions_train",
    "lambda_actions_eval", "radius_gw", "rho", "ub_frames", "ub_actions",
    "std_feats", "learning_rate", "weight_decay", "n_epochs", "n_frames",
    "n_outer", "n_inner", "seed"};

const std::set<std::string> kSynthKeys = {
    "k_skills", "dim", "duration_min", "duration_max", "noise_sigma",
    "drift_sigma", "n_episodes", "seed", "template"};

void reject_unknown(const FlatConfig& cfg, const std::set<std::string>& known) {
    for (const auto& [k, v] : cfg.entries)
        if (!known.count(k)) throw InputError("unknown config key: " + k);
}

int config_int32(const FlatConfig& cfg, const std::string& key, int fallback) {
    long long v = config_int(cfg, key, fallback);
    if (v < INT32_MIN || v > INT32_MAX)
        throw InputError("config key " + key + " is out of range");
    return static_cast<int>(v);
}

} // namespace

SolverConfig solver_config_from(const FlatConfig& cfg) {
    reject_unknown(cfg, kSolverKeys);
    SolverConfig c;
    c.k_skills = config_int32(cfg, "k_skills", c.k_skills);
    c.alpha_train = config_real(cfg, "alpha_train", c.alpha_train);
    c.alpha_eval = config_real(cfg, "alpha_eval", c.alpha_eval);
    c.eps_train = config_real(cfg, "eps_train", c.eps_train);
    c.eps_eval = config_real(cfg, "eps_eval", c.eps_eval);
    c.lambda_frames_train = config_real(cfg, "lambda_frames_train", c.lambda_frames_train);
    c.lambda_frames_eval = config_real(cfg, "lambda_frames_eval", c.lambda_frames_eval);
    c.lambda_actions_train = config_real(cfg, "lambda_actions_train", c.lambda_actions_train);
    c.lambda_actions_eval = config_real(cfg, "lambda_actions_eval", c.lambda_actions_eval);
    c.radius_gw = config_real(cfg, "radius_gw", c.radius_gw);
    c.rho = config_real(cfg, "rho", c.rho);
    c.ub_frames = config_bool(cfg, "ub_frames", c.ub_frames);
    c.ub_actions = config_bool(cfg, "ub_actions", c.ub_actions);
    c.std_feats = config_bool(cfg, "std_feats", c.std_feats);
    c.learning_rate = config_real(cfg, "learning_rate", c.learning_rate);
    c.weight_decay = config_real(cfg, "weight_decay", c.weight_decay);
    c.n_epochs = config_int32(cfg, "n_epochs", c.n_epochs);
    c.n_frames = config_int32(cfg, "n_frames", c.n_frames);
    c.n_outer = config_int32(cfg, "n_outer", c.n_outer);
    c.n_inner = config_int32(cfg, "n_inner", c.n_inner);
    long long seed = config_int(cfg, "seed", static_cast<long long>(c.seed));
    if (seed < 0) throw InputError("config key seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    validate_config(c);
    return c;
}

std::string solver_config_to_text(const SolverConfig& c) {
    std::ostringstream out;
    out << "alpha_eval = " << fmt_real(c.alpha_eval) << '\n'
        << "alpha_train = " << fmt_real(c.alpha_train) << '\n'
        << "eps_eval = " << fmt_real(c.eps_eval) << '\n'
        << "eps_train = " << fmt_real(c.eps_train) << '\n'
        << "k_skills = " << c.k_skills << '\n'
        << "lambda_actions_eval = " << fmt_real(c.lambda_actions_eval) << '\n'
        << "lambda_actions_train = " << fmt_real(c.lambda_actions_train) << '\n'
        << "lambda_frames_eval = " << fmt_real(c.lambda_frames_eval) << '\n'
        << "lambda_frames_train = " << fmt_real(c.lambda_frames_train) << '\n'
        << "learning_rate = " << fmt_real(c.learning_rate) << '\n'
        << "n_epochs = " << c.n_epochs << '\n'
        << "n_frames = " << c.n_frames << '\n'
        << "n_inner = " << c.n_inner << '\n'
        << "n_outer = " << c.n_outer << '\n'
        << "radius_gw = " << fmt_real(c.radius_gw) << '\n'
        << "rho = " << fmt_real(c.rho) << '\n'
        << "seed = " << c.seed << '\n'
        << "std_feats = " << (c.std_feats ? "true" : "false") << '\n'
        << "ub_actions = " << (c.ub_actions ? "true" : "false") << '\n'
        << "ub_frames = " << (c.ub_frames ? "true" : "false") << '\n'
        << "weight_decay = " << fmt_real(c.weight_decay) << '\n';
    return out.str();
}

SynthSpec synth_spec_from(const FlatConfig& cfg) {
    reject_unknown(cfg, kSynthKeys);
    SynthSpec s;
    s.k_skills = config_int32(cfg, "k_skills", s.k_skills);
    s.dim = config_int32(cfg, "dim", s.dim);
    s.duration_min = config_int32(cfg, "duration_min", s.duration_min);
    s.duration_max = config_int32(cfg, "duration_max", s.duration_max);
    s.noise_sigma = config_real(cfg, "noise_sigma", s.noise_sigma);
    s.drift_sigma = config_real(cfg, "drift_sigma", s.drift_sigma);
    s.n_episodes = config_int32(cfg, "n_episodes", s.n_episodes);
    long long seed = config_int(cfg, "seed", static_cast<long long>(s.seed));
    if (seed < 0) throw InputError("config key seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);

    for (const std::string& line : cfg.get_all("template")) {
        EpisodeTemplate tpl;
        std::string body = line;
        size_t at = line.find('@');
        if (at != std::string::npos) {
            body = line.substr(0, at);
            std::string wtext = trim(line.substr(at + 1));
            errno = 0;
            char* end = nullptr;
            tpl.weight = std::strtod(wtext.c_str(), &end);
            if (errno != 0 || end == wtext.c_str() || *end != '\0' ||
                !std::isfinite(tpl.weight))
                throw InputError("template weight is not a finite real: " + wtext);
        }
        for (const std::string& tok : split_ws(body)) {
            errno = 0;
            char* end = nullptr;
            long long id = std::strtoll(tok.c_str(), &end, 10);
            if (errno != 0 || end == tok.c_str() || *end != '\0')
                throw InputError("template symbol is not an integer: " + tok);
            tpl.symbols.push_back(static_cast<int>(id));
        }
        s.templates.push_back(std::move(tpl));
    }
    if (s.templates.empty()) {
        // default: one forward pass over all skills
        EpisodeTemplate tpl;
        for (int k = 0; k < s.k_skills; ++k) tpl.symbols.push_back(k);
        s.templates.push_back(std::move(tpl));
    }
    validate_spec(s);
    return s;
}

// ─── Feature files ───────────────────────────────────────────────────────────

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const fs::path& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw InputError("truncated feature file: " + path.string());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void write_feature_file(const fs::path& path, const FeatureTrajectory& traj) {
    validate_trajectory(traj);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write feature file: " + path.string());
    out.write("HISD", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(traj.n_frames()));
    put_u32(out, static_cast<std::uint32_t>(traj.dim()));
    for (int t = 0; t < traj.n_frames(); ++t)
        for (int d = 0; d < traj.dim(); ++d) {
            const float f = static_cast<float>(traj.features(t, d));
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(out, bits);
        }
    if (!out) throw InputError("failed writing feature file: " + path.string());
}

FeatureTrajectory read_feature_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open feature file: " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "HISD", 4) != 0)
        throw InputError("not a feature file: " + path.string());
    const std::uint32_t version = get_u32(in, path);
    if (version != 1)
        throw InputError("unsupported feature file version: " + path.string());
    const std::uint32_t n = get_u32(in, path);
    const std::uint32_t d = get_u32(in, path);
    if (n == 0 || d == 0)
        throw InputError("feature file has empty shape: " + path.string());

    FeatureTrajectory traj;
    traj.features.resize(n, d);
    std::vector<unsigned char> buf(static_cast<size_t>(n) * d * 4);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw InputError("truncated feature file: " + path.string());
    if (in.get() != std::ifstream::traits_type::eof())
        throw InputError("trailing bytes in feature file: " + path.string());
    size_t off = 0;
    for (std::uint32_t t = 0; t < n; ++t)
        for (std::uint32_t c = 0; c < d; ++c) {
            std::uint32_t bits = static_cast<std::uint32_t>(buf[off]) |
                                 (static_cast<std::uint32_t>(buf[off + 1]) << 8) |
                                 (static_cast<std::uint32_t>(buf[off + 2]) << 16) |
                                 (static_cast<std::uint32_t>(buf[off + 3]) << 24);
            off += 4;
            float f;
            std::memcpy(&f, &bits, 4);
            if (!std::isfinite(f))
                throw InputError("non-finite value in feature file: " + path.string());
            traj.features(t, c) = static_cast<double>(f);
        }
    return traj;
}

// ─── Label files ─────────────────────────────────────────────────────────────

void write_label_file(const fs::path& path, const FrameLabeling& lab) {
    validate_labeling(lab);
    std::ofstream out(path);
    if (!out) throw InputError("cannot write label file: " + path.string());
    for (int l : lab.labels) out << l << '\n';
    if (!out) throw InputError("failed writing label file: " + path.string());
}

FrameLabeling read_label_file(const fs::path& path, int k_hint) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open label file: " + path.string());
    FrameLabeling lab;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        line = trim(line);
        if (line.empty()) continue;
        errno = 0;
        char* end = nullptr;
        long long v = std::strtoll(line.c_str(), &end, 10);
        if (errno != 0 || end == line.c_str() || *end != '\0' || v < 0 || v > INT32_MAX)
            throw InputError("bad label at " + path.string() + ":" + std::to_string(line_no));
        lab.labels.push_back(static_cast<int>(v));
        lab.k_skills = std::max(lab.k_skills, static_cast<int>(v) + 1);
    }
    lab.k_skills = std::max(lab.k_skills, k_hint);
    if (lab.labels.empty()) throw InputError("empty label file: " + path.string());
    return lab;
}

// ─── Dataset manifests ───────────────────────────────────────────────────────

void write_manifest(const fs::path& path, const Manifest& m) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write manifest: " + path.string());
    out << "dim = " << m.dim << '\n';
    if (!m.skill_names.empty()) {
        out << "skill_names = ";
        for (size_t i = 0; i < m.skill_names.size(); ++i) {
            if (i) out << ',';
            out << m.skill_names[i];
        }
        out << '\n';
    }
    for (const auto& e : m.episodes)
        out << "episode = " << e.features_path << ' '
            << (e.labels_path.empty() ? "-" : e.labels_path) << ' ' << e.n_frames << '\n';
    if (!out) throw InputError("failed writing manifest: " + path.string());
}

Manifest read_manifest(const fs::path& path) {
    FlatConfig cfg = load_flat_config(path);
    Manifest m;
    for (const auto& [k, v] : cfg.entries) {
        if (k == "dim") {
            errno = 0;
            char* end = nullptr;
            long long d = std::strtoll(v.c_str(), &end, 10);
            if (errno != 0 || end == v.c_str() || *end != '\0' || d < 1 || d > INT32_MAX)
                throw InputError("bad manifest dim: " + v);
            m.dim = static_cast<int>(d);
        } else if (k == "skill_names") {
            std::istringstream in(v);
            std::string name;
            while (std::getline(in, name, ',')) {
                name = trim(name);
                if (name.empty()) throw InputError("empty skill name in manifest");
                m.skill_names.push_back(name);
            }
        } else if (k == "episode") {
            auto toks = split_ws(v);
            if (toks.size() != 3)
                throw InputError("manifest episode line needs 3 fields: " + v);
            ManifestEntry e;
            e.features_path = toks[0];
            e.labels_path = toks[1] == "-" ? "" : toks[1];
            errno = 0;
            char* end = nullptr;
            long long n = std::strtoll(toks[2].c_str(), &end, 10);
            if (errno != 0 || end == toks[2].c_str() || *end != '\0' || n < 1 || n > INT32_MAX)
                throw InputError("bad manifest frame count: " + toks[2]);
            e.n_frames = static_cast<int>(n);
            m.episodes.push_back(std::move(e));
        } else {
            throw InputError("unknown manifest key: " + k);
        }
    }
    if (m.dim < 1) throw InputError("manifest is missing dim");
    if (m.episodes.empty()) throw InputError("manifest lists no episodes");
    return m;
}

Dataset load_dataset(const fs::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();

    Dataset ds;
    ds.dim = m.dim;
    ds.skill_names = m.skill_names;
    const bool any_labels =
        std::any_of(m.episodes.begin(), m.episodes.end(),
                    [](const ManifestEntry& e) { return !e.labels_path.empty(); });
    if (any_labels) ds.ground_truth.emplace();

    int max_label_k = 0;
    for (size_t i = 0; i < m.episodes.size(); ++i) {
        const auto& e = m.episodes[i];
        FeatureTrajectory traj = read_feature_file(base / e.features_path);
        traj.episode_id = static_cast<int>(i);
        if (traj.n_frames() != e.n_frames)
            throw InputError("frame count mismatch for " + e.features_path);
        if (traj.dim() != m.dim)
            throw InputError("dimension mismatch for " + e.features_path);
        ds.episodes.push_back(std::move(traj));

        if (any_labels) {
            if (e.labels_path.empty())
                throw InputError("episode " + std::to_string(i) + " is missing labels");
            FrameLabeling lab = read_label_file(base / e.labels_path);
            if (static_cast<int>(lab.labels.size()) != e.n_frames)
                throw InputError("label count mismatch for " + e.labels_path);
            max_label_k = std::max(max_label_k, lab.k_skills);
            ds.ground_truth->push_back(std::move(lab));
        }
    }
    if (any_labels)
        for (auto& lab : *ds.ground_truth) lab.k_skills = max_label_k;
    validate_dataset(ds);
    return ds;
}

void save_dataset(const fs::path& out_dir, const Dataset& ds) {
    validate_dataset(ds);
    fs::create_directories(out_dir / "features");
    const bool labels = ds.ground_truth.has_value();
    if (labels) fs::create_directories(out_dir / "labels");

    Manifest m;
    m.dim = ds.dim;
    m.skill_names = ds.skill_names;
    char name[64];
    for (size_t i = 0; i < ds.episodes.size(); ++i) {
        ManifestEntry e;
        std::snprintf(name, sizeof(name), "features/ep%05zu.feat", i);
        e.features_path = name;
        write_feature_file(out_dir / e.features_path, ds.episodes[i]);
        if (labels) {
            std::snprintf(name, sizeof(name), "labels/ep%05zu.labels", i);
            e.labels_path = name;
            write_label_file(out_dir / e.labels_path, (*ds.ground_truth)[i]);
        }
        e.n_frames = ds.episodes[i].n_frames();
        m.episodes.push_back(std::move(e));
    }
    write_manifest(out_dir / "manifest.txt", m);
}

// ─── Reports ─────────────────────────────────────────────────────────────────

std::string seg_report_table(const SegMetricsReport& r) {
    std::ostringstream out;
    out << "mof_per mof_full f1_per f1_full miou_per miou_full avg_miou\n"
        << fmt_real_short(r.mof_per) << ' ' << fmt_real_short(r.mof_full) << ' '
        << fmt_real_short(r.f1_per) << ' ' << fmt_real_short(r.f1_full) << ' '
        << fmt_real_short(r.miou_per) << ' ' << fmt_real_short(r.miou_full) << ' '
        << fmt_real_short(r.avg_miou) << '\n';
    return out.str();
}

std::string seg_report_text(const SegMetricsReport& r) {
    std::ostringstream out;
    out << "avg_miou = " << fmt_real(r.avg_miou) << '\n'
        << "f1_full = " << fmt_real(r.f1_full) << '\n'
        << "f1_per = " << fmt_real(r.f1_per) << '\n'
        << "miou_full = " << fmt_real(r.miou_full) << '\n'
        << "miou_per = " << fmt_real(r.miou_per) << '\n'
        << "mof_full = " << fmt_real(r.mof_full) << '\n'
        << "mof_per = " << fmt_real(r.mof_per) << '\n';
    return out.str();
}

std::string seg_report_json(const SegMetricsReport& r) {
    std::ostringstream out;
    out << "{\n"
        << "  \"avg_miou\": " << fmt_real(r.avg_miou) << ",\n"
        << "  \"f1_full\": " << fmt_real(r.f1_full) << ",\n"
        << "  \"f1_per\": " << fmt_real(r.f1_per) << ",\n"
        << "  \"miou_full\": " << fmt_real(r.miou_full) << ",\n"
        << "  \"miou_per\": " << fmt_real(r.miou_per) << ",\n"
        << "  \"mof_full\": " << fmt_real(r.mof_full) << ",\n"
        << "  \"mof_per\": " << fmt_real(r.mof_per) << "\n"
        << "}\n";
    return out.str();
}

namespace {

std::string tree_row(const std::string& name, const TreeMetricsReport& r) {
    std::ostringstream out;
    out << name << ' ' << r.unique_trees << ' ' << fmt_real_short(r.avg_depth) << ' '
        << fmt_real_short(r.avg_size) << ' ' << fmt_real_short(r.avg_branching) << ' '
        << fmt_real_short(r.max_branching) << '\n';
    return out.str();
}

std::string tree_json_obj(const TreeMetricsReport& r, const char* indent) {
    std::ostringstream out;
    out << "{\n"
        << indent << "  \"unique_trees\": " << r.unique_trees << ",\n"
        << indent << "  \"avg_depth\": " << fmt_real(r.avg_depth) << ",\n"
        << indent << "  \"avg_size\": " << fmt_real(r.avg_size) << ",\n"
        << indent << "  \"avg_branching\": " << fmt_real(r.avg_branching) << ",\n"
        << indent << "  \"max_branching\": " << fmt_real(r.max_branching) << "\n"
        << indent << "}";
    return out.str();
}

} // namespace

std::string tree_report_table(const TreeMetricsReport& truth, const TreeMetricsReport& pred) {
    std::ostringstream out;
    out << "side unique_trees avg_depth avg_size avg_branching max_branching\n"
        << tree_row("truth", truth) << tree_row("predicted", pred);
    return out.str();
}

std::string tree_report_text(const std::string& prefix, const TreeMetricsReport& r) {
    std::ostringstream out;
    out << prefix << "_avg_branching = " << fmt_real(r.avg_branching) << '\n'
        << prefix << "_avg_depth = " << fmt_real(r.avg_depth) << '\n'
        << prefix << "_avg_size = " << fmt_real(r.avg_size) << '\n'
        << prefix << "_max_branching = " << fmt_real(r.max_branching) << '\n'
        << prefix << "_unique_trees = " << r.unique_trees << '\n';
    return out.str();
}

std::string tree_report_json(const TreeMetricsReport& truth, const TreeMetricsReport& pred) {
    std::ostringstream out;
    out << "{\n  \"truth\": " << tree_json_obj(truth, "  ") << ",\n  \"predicted\": "
        << tree_json_obj(pred, "  ") << "\n}\n";
    return out.str();
}

} // namespace hisd
