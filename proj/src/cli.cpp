#include "vesselbez/cli.hpp"

#include "vesselbez/bte.hpp"
#include "vesselbez/cfstats.hpp"
#include "vesselbez/encode.hpp"
#include "vesselbez/features.hpp"
#include "vesselbez/hint.hpp"
#include "vesselbez/image_io.hpp"
#include "vesselbez/perturb.hpp"
#include "vesselbez/rng.hpp"
#include "vesselbez/synth.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#ifndef VESSELBEZ_VERSION
#define VESSELBEZ_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace vesselbez::cli {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    double gamma = kDefaultGamma;
    std::vector<std::string> configs;  // empty: the 13-configuration grid
    int workers = 0;
    int working_size = kWorkingResolution;  // 0 keeps masks at native size
    double thick_threshold = kDefaultThickThreshold;
    bool preview = false;
    bool strict = false;
    double strict_threshold = kStrictSubsetThreshold;
    SynthSpec synth;

    std::vector<std::string> inputs;
    std::string out;
    std::string mask_dir;
    std::string labels;
    std::string report;
    std::string name;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Everything that can change an output byte except file locations.
std::string canonical(const RunConfig& c) {
    std::ostringstream s;
    s << "command=" << c.command << "\nseed=" << c.seed << "\ngamma=" << fmt_double(c.gamma) << "\nconfigs=";
    for (const auto& n : c.configs) {
        s << n << ';';
    }
    s << "\nworking_size=" << c.working_size << "\nthick_threshold=" << fmt_double(c.thick_threshold)
      << "\nstrict=" << c.strict << "\nstrict_threshold=" << fmt_double(c.strict_threshold)
      << "\ndepth=" << c.synth.depth << "\nn_branches=" << c.synth.n_branches
      << "\nroot_radius=" << fmt_double(c.synth.root_radius) << "\nradius_decay=" << fmt_double(c.synth.radius_decay)
      << "\ncanvas=" << c.synth.canvas << '\n';
    return s.str();
}

std::string provenance(const RunConfig& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "vesselbez %s seed=%llu config=%016llx", VESSELBEZ_VERSION,
                  static_cast<unsigned long long>(c.seed), static_cast<unsigned long long>(fnv1a64(canonical(c))));
    return buf;
}

bool is_mask_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::vector<fs::path> collect(const std::vector<std::string>& inputs, bool (*keep)(const fs::path&)) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && keep(e.path())) {
                    found.push_back(e.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw ConfigError("input not found: " + in);
        }
    }
    if (files.empty()) {
        throw ConfigError("no input files");
    }
    return files;
}

fs::path output_dir(const RunConfig& c) {
    if (c.out.empty()) {
        throw ConfigError("--out is required");
    }
    fs::create_directories(c.out);
    return c.out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
    } else {
        write_file_atomic(path, text);
    }
}

VesselMask load_working(const fs::path& path, int working_size) {
    auto mask = load_mask(path);
    if (working_size > 0 && (mask.width() != working_size || mask.height() != working_size)) {
        mask = resample_to_working(mask, working_size);
    }
    return mask;
}

fs::path find_mask(const fs::path& bte, const std::string& mask_dir) {
    const fs::path dir = mask_dir.empty() ? bte.parent_path() : fs::path(mask_dir);
    for (const char* ext : {".png", ".pgm", ".ppm"}) {
        const auto p = dir / (bte.stem().string() + ext);
        if (fs::exists(p)) {
            return p;
        }
    }
    throw std::runtime_error("missing mask for start " + bte.stem().string());
}

std::vector<PerturbationConfig> resolve_configs(const RunConfig& c, std::uint64_t seed, std::ostream& err) {
    std::vector<PerturbationConfig> out;
    if (c.configs.empty()) {
        return standard_grid(seed, c.gamma);
    }
    for (const auto& name : c.configs) {
        PerturbationConfig cfg;
        try {
            cfg = config_from_name(name, seed, c.gamma);
            if (const auto w = validate(cfg)) {
                err << "warning: " << *w << '\n';
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        out.push_back(cfg);
    }
    return out;
}

struct ItemResult {
    std::string line;
    std::string error;
};

// Runs items in parallel and reports them in input order.
template <class F>
int run_batch(std::size_t n, const std::vector<std::string>& labels, F&& work, std::ostream& out, std::ostream& err,
              const std::string& noun) {
    std::vector<ItemResult> results(n);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            results[i].line = work(i);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    }
    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!results[i].error.empty()) {
            ++failed;
            err << "error: " << labels[i] << ": " << results[i].error << '\n';
        } else if (!results[i].line.empty()) {
            out << results[i].line << '\n';
        }
    }
    out << noun << ": " << (n - failed) << " of " << n << " succeeded\n";
    return failed == 0 ? kExitOk : kExitItemFailed;
}

int cmd_encode(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto files = collect(c.inputs, is_mask_file);
    const auto dir = output_dir(c);
    const auto prov = provenance(c);
    std::vector<std::string> labels;
    for (const auto& f : files) {
        labels.push_back(f.string());
    }
    return run_batch(
        files.size(), labels,
        [&](std::size_t i) {
            const auto mask = load_working(files[i], c.working_size);
            auto enc = encode_mask(mask);
            enc.tree.provenance = prov;
            write_bte(dir / (files[i].stem().string() + ".bte"), enc.tree);
            const auto& d = enc.diagnostics;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s segments=%zu rms=%.4f discarded=%d degenerate=%d junctions=%d",
                          files[i].stem().string().c_str(), enc.tree.segments.size(), d.mean_rms_residual,
                          d.discarded_polylines, d.degenerate_chunks, d.junctions);
            return std::string(buf);
        },
        out, err, "encode");
}

std::map<std::string, int> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read labels file " + path);
    }
    std::map<std::string, int> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || (lineno == 1 && line.rfind("image_id", 0) == 0)) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": expected image_id,label");
        }
        const auto value = line.substr(comma + 1);
        if (value != "0" && value != "1") {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": label must be 0 or 1");
        }
        labels[line.substr(0, comma)] = value == "1";
    }
    return labels;
}

int cmd_features(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto files = collect(c.inputs, is_mask_file);
    if (c.out.empty()) {
        throw ConfigError("--out is required");
    }
    const auto labels = c.labels.empty() ? std::map<std::string, int>{} : read_labels(c.labels);
    std::vector<std::optional<FeatureRow>> rows(files.size());
    std::vector<std::string> names;
    for (const auto& f : files) {
        names.push_back(f.string());
    }
    FeatureOptions options;
    options.thick_threshold = c.thick_threshold;
    const int code = run_batch(
        files.size(), names,
        [&](std::size_t i) {
            const auto id = files[i].stem().string();
            int label = 0;
            if (!labels.empty()) {
                const auto it = labels.find(id);
                if (it == labels.end()) {
                    throw std::runtime_error("no label for " + id);
                }
                label = it->second;
            }
            rows[i] = FeatureRow{id, features_from_mask(load_working(files[i], c.working_size), options), label};
            return std::string();
        },
        out, err, "features");
    std::vector<FeatureRow> ok;
    for (auto& r : rows) {
        if (r) {
            ok.push_back(std::move(*r));
        }
    }
    write_features_csv(fs::path(c.out), ok, {provenance(c)});
    return code;
}

struct StartItem {
    fs::path bte;
    PerturbationConfig config;
    std::string start;
};

std::vector<StartItem> start_items(const RunConfig& c, std::ostream& err) {
    const auto files = collect(c.inputs, [](const fs::path& p) { return p.extension() == ".bte"; });
    std::vector<StartItem> items;
    for (const auto& f : files) {
        const auto start = f.stem().string();
        for (const auto& cfg : resolve_configs(c, item_seed(c.seed, start), err)) {
            items.push_back({f, cfg, start});
        }
    }
    return items;
}

// Per-start inputs are loaded once per item; items of one start share nothing mutable.
PerturbedInputs perturbed(const StartItem& item, const RunConfig& c) {
    const auto tree = parse_bte(item.bte);
    const auto mask = load_working(find_mask(item.bte, c.mask_dir), c.working_size);
    return apply(item.config, tree, distance_transform(mask), mask);
}

int cmd_perturb(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto items = start_items(c, err);
    const auto dir = output_dir(c);
    const auto prov = provenance(c);
    std::vector<std::string> labels;
    for (const auto& it : items) {
        labels.push_back(it.start + "_" + it.config.name());
    }
    return run_batch(
        items.size(), labels,
        [&](std::size_t i) {
            auto p = perturbed(items[i], c);
            p.tree.provenance = prov + " config_name=" + items[i].config.name();
            write_bte(dir / (labels[i] + ".bte"), p.tree);
            if (items[i].config.family == Family::pixel_drop) {
                save_mask(p.mask, dir / (labels[i] + ".png"));
            }
            return labels[i] + " segments=" + std::to_string(p.tree.segments.size());
        },
        out, err, "perturb");
}

int cmd_hint(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto items = start_items(c, err);
    const auto dir = output_dir(c);
    const auto prov = provenance(c);
    std::vector<std::string> labels;
    for (const auto& it : items) {
        labels.push_back(it.start + "_" + it.config.name());
    }
    return run_batch(
        items.size(), labels,
        [&](std::size_t i) {
            const auto p = perturbed(items[i], c);
            const auto hint = render_hint(p.tree, p.field);
            write_btef(dir / (labels[i] + ".btef"), hint, prov + " start=" + items[i].start +
                                                             " config_name=" + items[i].config.name());
            if (c.preview) {
                write_hint_preview(dir / (labels[i] + ".png"), hint);
            }
            return labels[i];
        },
        out, err, "hint");
}

const std::string& single_input(const RunConfig& c) {
    if (c.inputs.size() != 1) {
        throw ConfigError(c.command + " takes exactly one input file");
    }
    if (!fs::exists(c.inputs[0])) {
        throw ConfigError("input not found: " + c.inputs[0]);
    }
    return c.inputs[0];
}

int cmd_score(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto& path = single_input(c);
    ScoreTable scores;
    try {
        scores = read_scores_csv(fs::path(path));
    } catch (const std::exception& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return kExitItemFailed;
    }
    std::optional<std::set<std::string>> subset;
    if (c.strict) {
        subset = strict_subset(scores, c.strict_threshold);
        out << "strict subset: " << subset->size() << " of " << scores.starts().size() << " starts\n";
    }
    std::map<std::string, PairedEffect> effects;
    int code = kExitOk;
    for (const auto& name : causal_table_order()) {
        if (name == "baseline" || !scores.configs().count(name)) {
            continue;
        }
        try {
            effects[name] = paired_delta(scores, name, subset);
            if (effects[name].skipped_missing_baseline > 0) {
                err << "warning: " << name << ": " << effects[name].skipped_missing_baseline
                    << " starts without a baseline record skipped\n";
            }
        } catch (const StatsError& e) {
            err << "warning: " << name << ": " << e.what() << '\n';
        }
    }
    std::ostringstream csv;
    csv << "# " << provenance(c) << '\n';
    write_causal_csv(csv, effects);
    write_text(c.out, csv.str(), out);
    write_causal_text(out, effects);
    for (const char* pix : {"pixdrop_10", "pixdrop_20", "pixdrop_30"}) {
        if (effects.count(pix) && effects.count("tortuosity_4x")) {
            const auto r = contrast_ratio(effects, pix, "tortuosity_4x");
            out << "contrast " << pix << "/tortuosity_4x: " << (r ? std::to_string(*r) : std::string("n/a")) << '\n';
        }
    }
    return code;
}

int cmd_obs(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto& path = single_input(c);
    std::vector<FeatureRow> rows;
    try {
        rows = read_features_csv(fs::path(path));
    } catch (const std::exception& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return kExitItemFailed;
    }
    const auto table = observational_table(rows);
    std::ostringstream csv;
    csv << "# " << provenance(c) << '\n';
    write_observational_csv(csv, table);
    write_text(c.out, csv.str(), out);
    write_observational_text(out, table);
    return kExitOk;
}

int cmd_dedupe(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto& path = single_input(c);
    DedupeResult result;
    try {
        result = dedupe_cohort(read_cohort_csv(fs::path(path)));
    } catch (const std::exception& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return kExitItemFailed;
    }
    std::ostringstream csv, rep;
    csv << "# " << provenance(c) << '\n';
    write_cohort_csv(csv, result.rows);
    rep << "# " << provenance(c) << '\n';
    write_dedupe_report(rep, result.report);
    write_text(c.out, csv.str(), out);
    write_text(c.report, rep.str(), out);
    return kExitOk;
}

int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto dir = output_dir(c);
    SynthSpec spec = c.synth;
    spec.seed = c.seed;
    const auto name = c.name.empty() ? "synth_" + std::to_string(c.seed) : c.name;
    auto st = generate_tree(spec);
    st.tree.provenance = provenance(c);
    save_mask(rasterize_tree(st.tree, spec.canvas, spec.canvas), dir / (name + ".png"));
    write_bte(dir / (name + ".bte"), st.tree);
    std::ostringstream gt;
    gt << "# " << provenance(c) << '\n';
    write_ground_truth_csv(gt, st.truth);
    write_file_atomic(dir / (name + "_truth.csv"), gt.str());
    out << name << " segments=" << st.tree.segments.size() << " branches=" << st.truth.branch_count << '\n';
    return kExitOk;
}

int cmd_roundtrip(const RunConfig& c, std::ostream& out, std::ostream&) {
    SynthSpec spec = c.synth;
    spec.seed = c.seed;
    std::ostringstream rep;
    rep << "# " << provenance(c) << '\n';
    write_roundtrip_report(rep, roundtrip_report(spec));
    write_text(c.out, rep.str(), out);
    return kExitOk;
}

void validate_config(const RunConfig& c) {
    if (c.workers < 0) {
        throw ConfigError("--workers must be >= 0");
    }
    if (c.working_size < 0) {
        throw ConfigError("--working-size must be >= 0");
    }
    if (!(c.gamma > 0.0)) {
        throw ConfigError("--gamma must be positive");
    }
    for (const auto& n : c.configs) {
        if (!is_known_config(n)) {
            try {
                config_from_name(n);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (c.command == "synth" || c.command == "roundtrip") {
        try {
            validate(c.synth);
        } catch (const SynthError& e) {
            throw ConfigError(e.what());
        }
    }
}

class ThreadScope {
public:
    explicit ThreadScope(int workers) : saved_(omp_get_max_threads()) {
        if (workers > 0) {
            omp_set_num_threads(workers);
        }
    }
    ~ThreadScope() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

}  // namespace

std::string version() { return VESSELBEZ_VERSION; }

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t item_seed(std::uint64_t seed, std::string_view item) { return mix64(seed ^ fnv1a64(item)); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Bezier vessel-tree encoding, counterfactual perturbation and hint rendering", "vesselbez"};
    app.set_version_flag("--version", VESSELBEZ_VERSION);
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    app.add_option("--seed", c.seed, "Run seed");
    app.add_option("--gamma", c.gamma, "Tortuosity base displacement coefficient");
    app.add_option("--configs", c.configs, "Perturbation configs (default: the 13-config grid)")->delimiter(',');
    app.add_option("--workers", c.workers, "OpenMP threads (0: runtime default)");
    app.add_option("--working-size", c.working_size, "Resample masks to NxN (0: native)");
    app.add_option("--thick-threshold", c.thick_threshold, "Radius threshold for thick_vessel_ratio (px)");
    app.add_flag("--preview", c.preview, "Also write 8-bit PNG previews of hints");
    app.add_flag("--strict", c.strict, "Restrict paired effects to the strict reverse-counterfactual subset");
    app.add_option("--strict-threshold", c.strict_threshold, "Baseline probability cut for --strict");
    app.add_option("--depth", c.synth.depth, "Synthetic tree depth");
    app.add_option("--n-branches", c.synth.n_branches, "Children per synthetic branch node");
    app.add_option("--root-radius", c.synth.root_radius, "Synthetic root radius (px)");
    app.add_option("--radius-decay", c.synth.radius_decay, "Synthetic radius ratio per level");
    app.add_option("--canvas", c.synth.canvas, "Synthetic canvas size (px)");

    struct Command {
        const char* name;
        const char* help;
        bool inputs;
        int (*fn)(const RunConfig&, std::ostream&, std::ostream&);
    };
    const Command commands[] = {
        {"encode", "Encode masks (files or directories) as BTE files", true, cmd_encode},
        {"features", "Write the 20-feature CSV for masks", true, cmd_features},
        {"perturb", "Write perturbed BTE files per start and config", true, cmd_perturb},
        {"hint", "Render <start>_<config>.btef hints per start and config", true, cmd_hint},
        {"score", "Causal table from a scores CSV", true, cmd_score},
        {"obs", "Observational table from a features CSV with labels", true, cmd_obs},
        {"dedupe", "Deduplicate a cohort CSV", true, cmd_dedupe},
        {"synth", "Write a synthetic mask, BTE and ground-truth CSV", false, cmd_synth},
        {"roundtrip", "Synthetic roundtrip error report", false, cmd_roundtrip},
    };
    std::map<std::string, const Command*> by_name;
    for (const auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help)->fallthrough();
        if (cmd.inputs) {
            sub->add_option("inputs", c.inputs, "Input files or directories")->required();
        }
        sub->add_option("-o,--out", c.out, "Output file or directory");
        if (std::string(cmd.name) == "perturb" || std::string(cmd.name) == "hint") {
            sub->add_option("--mask-dir", c.mask_dir, "Directory holding <start>.png masks (default: next to the BTE)");
        }
        if (std::string(cmd.name) == "features") {
            sub->add_option("--labels", c.labels, "CSV of image_id,label");
        }
        if (std::string(cmd.name) == "dedupe") {
            sub->add_option("--report", c.report, "Removal report path (default: stdout)");
        }
        if (std::string(cmd.name) == "synth") {
            sub->add_option("--name", c.name, "Output file stem");
        }
        by_name[cmd.name] = &cmd;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        validate_config(c);
        ThreadScope threads(c.workers);
        return by_name.at(c.command)->fn(c, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitItemFailed;
    }
}

}  // namespace vesselbez::cli
