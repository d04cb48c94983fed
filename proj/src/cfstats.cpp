#include "vesselbez/cfstats.hpp"

#include "vesselbez/tdist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace vesselbez {
namespace {

constexpr const char* kMissingCell = "—";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line, const char* column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw StatsError("line " + std::to_string(line) + ": bad " + column + " value '" + s + "'");
    }
    return v;
}

std::string fmt(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    if (buf[0] == '-' && std::strspn(buf + 1, "0.") == std::strlen(buf + 1)) {
        return buf + 1;  // no "-0.0000"
    }
    return buf;
}

std::string fmt_p(double p) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", p);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

const std::vector<std::string>& causal_table_order() {
    static const std::vector<std::string> order = {
        "tortuosity_4x", "tortuosity_2x", "tortuosity_1x", "arc_drop_30",  "arc_drop_20",
        "arc_drop_10",   "radius_x0.55",  "radius_x0.70",  "radius_x0.85", "pixdrop_30",
        "pixdrop_20",    "pixdrop_10",    "baseline",
    };
    return order;
}

bool is_known_config(const std::string& name) {
    const auto& order = causal_table_order();
    return std::find(order.begin(), order.end(), name) != order.end();
}

ScoreTable::ScoreTable(std::vector<ScoreRecord> records) {
    for (auto& r : records) {
        add(std::move(r));
    }
}

void ScoreTable::add(ScoreRecord record) {
    if (!is_known_config(record.config)) {
        throw StatsError("unknown configuration '" + record.config + "'");
    }
    if (!(record.prob >= 0.0 && record.prob <= 1.0)) {
        throw StatsError("probability outside [0, 1] for start '" + record.start_id + "'");
    }
    auto key = std::make_pair(record.start_id, record.config);
    if (index_.contains(key)) {
        throw StatsError("duplicate record for start '" + record.start_id + "', config '" + record.config + "'");
    }
    index_.emplace(std::move(key), records_.size());
    records_.push_back(std::move(record));
}

const ScoreRecord* ScoreTable::find(const std::string& start_id, const std::string& config) const {
    const auto it = index_.find({start_id, config});
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::set<std::string> ScoreTable::starts() const {
    std::set<std::string> out;
    for (const auto& r : records_) {
        out.insert(r.start_id);
    }
    return out;
}

std::set<std::string> ScoreTable::configs() const {
    std::set<std::string> out;
    for (const auto& r : records_) {
        out.insert(r.config);
    }
    return out;
}

ScoreTable read_scores_csv(std::istream& in) {
    ScoreTable table;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto cells = split_csv(line);
        if (!header) {
            const std::vector<std::string> expected = {"start_id",      "config",        "prob",
                                                       "mean_intensity", "std_intensity", "rg_ratio"};
            if (cells != expected) {
                throw StatsError("line " + std::to_string(line_no) + ": unexpected scores header");
            }
            header = true;
            continue;
        }
        if (cells.size() != 6) {
            throw StatsError("line " + std::to_string(line_no) + ": expected 6 cells, found " +
                             std::to_string(cells.size()));
        }
        ScoreRecord r;
        r.start_id = cells[0];
        r.config = cells[1];
        r.prob = parse_double(cells[2], line_no, "prob");
        r.mean_intensity = parse_double(cells[3], line_no, "mean_intensity");
        r.std_intensity = parse_double(cells[4], line_no, "std_intensity");
        r.rg_ratio = parse_double(cells[5], line_no, "rg_ratio");
        try {
            table.add(std::move(r));
        } catch (const StatsError& e) {
            throw StatsError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) {
        throw StatsError("scores CSV has no header");
    }
    return table;
}

ScoreTable read_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw StatsError("cannot open " + path.string());
    }
    try {
        return read_scores_csv(in);
    } catch (const StatsError& e) {
        throw StatsError(path.string() + ": " + e.what());
    }
}

std::pair<double, double> t_confidence_interval(double mean, double sem, int n, double level) {
    if (n < 2) {
        throw StatsError("confidence interval needs n >= 2");
    }
    const double q = student_t_upper_quantile(0.5 * (1.0 - level), n - 1);
    return {mean - q * sem, mean + q * sem};
}

PairedEffect summarize_deltas(const std::vector<double>& deltas, const std::string& config) {
    const int n = static_cast<int>(deltas.size());
    if (n < 2) {
        throw StatsError("paired effect for '" + config + "' needs at least 2 starts, found " + std::to_string(n));
    }
    PairedEffect e;
    e.config = config;
    e.n = n;
    e.delta_mean = mean_of(deltas);
    double ss = 0.0;
    for (double d : deltas) {
        ss += (d - e.delta_mean) * (d - e.delta_mean);
    }
    e.sem = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    if (e.sem > 0.0) {
        std::tie(e.ci_low, e.ci_high) = t_confidence_interval(e.delta_mean, e.sem, n);
        e.p_value = student_t_two_sided_p(e.delta_mean / e.sem, n - 1);
    } else {
        e.ci_low = e.ci_high = e.delta_mean;
        e.p_value = e.delta_mean == 0.0 ? 1.0 : 0.0;
    }
    return e;
}

std::vector<double> paired_differences(const ScoreTable& scores, const std::string& config,
                                       const std::optional<std::set<std::string>>& subset, int* skipped) {
    std::vector<double> deltas;
    int missing = 0;
    for (const auto& start : scores.starts()) {
        if (subset && !subset->contains(start)) {
            continue;
        }
        const auto* pert = scores.find(start, config);
        if (!pert) {
            continue;
        }
        const auto* base = scores.find(start, "baseline");
        if (!base) {
            ++missing;
            continue;
        }
        deltas.push_back(pert->prob - base->prob);
    }
    if (skipped) {
        *skipped = missing;
    }
    return deltas;
}

PairedEffect paired_delta(const ScoreTable& scores, const std::string& config,
                          const std::optional<std::set<std::string>>& subset) {
    if (!is_known_config(config)) {
        throw StatsError("unknown configuration '" + config + "'");
    }
    int skipped = 0;
    const auto deltas = paired_differences(scores, config, subset, &skipped);
    auto e = summarize_deltas(deltas, config);
    e.skipped_missing_baseline = skipped;
    return e;
}

FidelityVerdict fidelity_filter(const ScoreRecord& r) {
    if (!std::isfinite(r.mean_intensity) || !std::isfinite(r.std_intensity) || !std::isfinite(r.rg_ratio)) {
        throw StatsError("missing image statistics for start '" + r.start_id + "'");
    }
    if (r.mean_intensity < kFidelityMeanLow) {
        return {false, "near-black collapse"};
    }
    if (r.mean_intensity > kFidelityMeanHigh) {
        return {false, "bright-white collapse"};
    }
    if (!(r.std_intensity > kFidelityStdMin)) {
        return {false, "monochromatic collapse"};
    }
    if (!(r.rg_ratio > kFidelityRedGreenMin)) {
        return {false, "gray/blue drift"};
    }
    return {true, {}};
}

std::set<std::string> fidelity_pass_set(const ScoreTable& scores) {
    std::set<std::string> out;
    for (const auto& start : scores.starts()) {
        const auto* base = scores.find(start, "baseline");
        if (base && fidelity_filter(*base).pass) {
            out.insert(start);
        }
    }
    return out;
}

std::set<std::string> strict_subset(const ScoreTable& scores, double threshold) {
    std::set<std::string> out;
    for (const auto& start : fidelity_pass_set(scores)) {
        if (scores.find(start, "baseline")->prob < threshold) {
            out.insert(start);
        }
    }
    return out;
}

std::optional<double> contrast_ratio(const std::map<std::string, PairedEffect>& effects, const std::string& a,
                                     const std::string& b) {
    const auto ia = effects.find(a);
    const auto ib = effects.find(b);
    if (ia == effects.end() || ib == effects.end()) {
        throw StatsError("contrast ratio needs effects for '" + a + "' and '" + b + "'");
    }
    const double denom = std::abs(ib->second.delta_mean);
    if (denom < 1e-9) {
        return std::nullopt;
    }
    return std::abs(ia->second.delta_mean) / denom;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw StatsError("spearman: vectors differ in length");
    }
    const auto n = x.size();
    if (n < 3) {
        throw StatsError("spearman needs at least 3 observations");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw StatsError("spearman is undefined for a constant vector");
    }
    SpearmanResult r;
    r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n) - 2.0;
    if (std::abs(r.rho) >= 1.0) {
        r.p_value = 0.0;
    } else if (df > 0.0) {
        r.p_value = student_t_two_sided_p(r.rho * std::sqrt(df / (1.0 - r.rho * r.rho)), df);
    }
    return r;
}

OddsRatio logistic_or(const std::vector<double>& feature, const std::vector<int>& label) {
    if (feature.size() != label.size()) {
        throw StatsError("logistic_or: feature and label lengths differ");
    }
    const auto n = feature.size();
    if (n < 10) {
        throw StatsError("logistic_or needs at least 10 observations");
    }
    int positives = 0;
    for (int y : label) {
        if (y != 0 && y != 1) {
            throw StatsError("labels must be 0 or 1");
        }
        positives += y;
    }
    if (positives == 0 || positives == static_cast<int>(n)) {
        throw StatsError("logistic_or needs both classes present");
    }
    const double mu = mean_of(feature);
    double ss = 0.0;
    for (double v : feature) {
        ss += (v - mu) * (v - mu);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        throw StatsError("logistic_or: constant feature");
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = (feature[i] - mu) / sd;
    }
    // Complete separation has no finite maximum likelihood estimate.
    double max0 = -INFINITY, min0 = INFINITY, max1 = -INFINITY, min1 = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i]) {
            max1 = std::max(max1, z[i]);
            min1 = std::min(min1, z[i]);
        } else {
            max0 = std::max(max0, z[i]);
            min0 = std::min(min0, z[i]);
        }
    }
    if (max0 < min1 || max1 < min0) {
        throw StatsError("logistic_or: perfect separation");
    }

    double b0 = 0.0, b1 = 0.0;
    double h00 = 0.0, h01 = 0.0, h11 = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
        double g0 = 0.0, g1 = 0.0;
        h00 = h01 = h11 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = b0 + b1 * z[i];
            const double p = 1.0 / (1.0 + std::exp(-eta));
            const double w = p * (1.0 - p);
            const double r = label[i] - p;
            g0 += r;
            g1 += r * z[i];
            h00 += w;
            h01 += w * z[i];
            h11 += w * z[i] * z[i];
        }
        const double det = h00 * h11 - h01 * h01;
        if (!(det > 0.0)) {
            throw StatsError("logistic_or: singular information matrix");
        }
        const double d0 = (h11 * g0 - h01 * g1) / det;
        const double d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if (std::abs(b1) > 30.0) {
            throw StatsError("logistic_or: slope diverged (quasi-separation)");
        }
        if (std::max(std::abs(d0), std::abs(d1)) < 1e-8) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw StatsError("logistic_or: IRLS did not converge in 50 iterations");
    }
    // Information matrix at the final estimate.
    h00 = h01 = h11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * z[i])));
        const double w = p * (1.0 - p);
        h00 += w;
        h01 += w * z[i];
        h11 += w * z[i] * z[i];
    }
    const double det = h00 * h11 - h01 * h01;
    OddsRatio out;
    out.log_or = b1;
    out.se_log_or = std::sqrt(h00 / det);
    const double zc = normal_quantile(0.975);
    out.odds_ratio = std::exp(b1);
    out.ci_low = std::exp(b1 - zc * out.se_log_or);
    out.ci_high = std::exp(b1 + zc * out.se_log_or);
    return out;
}

std::vector<int> quintile_bins(const std::vector<double>& feature) {
    const auto n = feature.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return feature[a] < feature[b]; });
    std::vector<int> bins(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && feature[order[j + 1]] == feature[order[i]]) {
            ++j;
        }
        // Tied values share the lowest bin their ranks reach.
        const int bin = static_cast<int>(5 * i / n);
        for (std::size_t k = i; k <= j; ++k) {
            bins[order[k]] = bin;
        }
        i = j + 1;
    }
    return bins;
}

OddsRatio quintile_or(const std::vector<double>& feature, const std::vector<int>& label) {
    if (feature.size() != label.size()) {
        throw StatsError("quintile_or: feature and label lengths differ");
    }
    if (feature.size() < 50) {
        throw StatsError("quintile_or needs at least 50 observations");
    }
    const auto bins = quintile_bins(feature);
    double d5 = 0, h5 = 0, d1 = 0, h1 = 0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (label[i] != 0 && label[i] != 1) {
            throw StatsError("labels must be 0 or 1");
        }
        if (bins[i] == 4) {
            (label[i] ? d5 : h5) += 1;
        } else if (bins[i] == 0) {
            (label[i] ? d1 : h1) += 1;
        }
    }
    if (d5 + h5 == 0 || d1 + h1 == 0) {
        throw StatsError("quintile_or: empty quintile");
    }
    if (d5 == 0 || h5 == 0 || d1 == 0 || h1 == 0) {
        d5 += 0.5;
        h5 += 0.5;
        d1 += 0.5;
        h1 += 0.5;
    }
    OddsRatio out;
    out.odds_ratio = (d5 / h5) / (d1 / h1);
    out.log_or = std::log(out.odds_ratio);
    out.se_log_or = std::sqrt(1.0 / d5 + 1.0 / h5 + 1.0 / d1 + 1.0 / h1);
    const double zc = normal_quantile(0.975);
    out.ci_low = std::exp(out.log_or - zc * out.se_log_or);
    out.ci_high = std::exp(out.log_or + zc * out.se_log_or);
    return out;
}

std::vector<ObservationalRow> observational_table(const std::vector<FeatureRow>& rows) {
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (const auto& r : rows) {
        labels.push_back(r.label);
    }
    std::vector<double> label_values(labels.begin(), labels.end());
    std::vector<ObservationalRow> table;
    for (std::size_t f = 0; f < kFeatureNames.size(); ++f) {
        ObservationalRow row;
        row.feature = std::string(kFeatureNames[f]);
        std::vector<double> x;
        x.reserve(rows.size());
        for (const auto& r : rows) {
            x.push_back(r.features.values[f]);
        }
        std::vector<std::string> notes;
        try {
            row.spearman = spearman(x, label_values);
        } catch (const StatsError& e) {
            notes.push_back(std::string("spearman: ") + e.what());
        }
        try {
            row.or_per_sd = logistic_or(x, labels);
        } catch (const StatsError& e) {
            notes.push_back(e.what());
        }
        try {
            row.q5_q1 = quintile_or(x, labels);
        } catch (const StatsError& e) {
            notes.push_back(e.what());
        }
        for (std::size_t i = 0; i < notes.size(); ++i) {
            row.note += (i ? "; " : "") + notes[i];
        }
        table.push_back(std::move(row));
    }
    return table;
}

void write_observational_csv(std::ostream& out, const std::vector<ObservationalRow>& table) {
    out << "feature,spearman_rho,spearman_p,or_per_sd,or_per_sd_ci_low,or_per_sd_ci_high,q5q1_or_2x2,q5q1_ci_low,"
           "q5q1_ci_high,note\n";
    for (const auto& r : table) {
        out << r.feature << ',';
        if (r.spearman) {
            out << fmt(r.spearman->rho) << ',' << fmt_p(r.spearman->p_value) << ',';
        } else {
            out << ",,";
        }
        for (const auto* o : {&r.or_per_sd, &r.q5_q1}) {
            if (*o) {
                out << fmt((*o)->odds_ratio, 3) << ',' << fmt((*o)->ci_low, 3) << ',' << fmt((*o)->ci_high, 3) << ',';
            } else {
                out << ",,,";
            }
        }
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << note << '\n';
    }
}

void write_observational_text(std::ostream& out, const std::vector<ObservationalRow>& table) {
    out << std::left << std::setw(22) << "feature" << std::right << std::setw(10) << "rho" << std::setw(11) << "p"
        << std::setw(24) << "OR/SD (95% CI)" << std::setw(30) << "Q5/Q1 2x2 OR (95% CI)" << '\n';
    for (const auto& r : table) {
        out << std::left << std::setw(22) << r.feature << std::right;
        out << std::setw(10) << (r.spearman ? fmt(r.spearman->rho, 3) : std::string(kMissingCell));
        out << std::setw(11) << (r.spearman ? fmt_p(r.spearman->p_value) : std::string(kMissingCell));
        for (const auto* o : {&r.or_per_sd, &r.q5_q1}) {
            const std::string cell = *o ? fmt((*o)->odds_ratio, 3) + " (" + fmt((*o)->ci_low, 2) + ", " +
                                              fmt((*o)->ci_high, 2) + ")"
                                        : std::string(kMissingCell);
            out << std::setw(o == &r.or_per_sd ? 24 : 30) << cell;
        }
        if (!r.note.empty()) {
            out << "  [" << r.note << ']';
        }
        out << '\n';
    }
}

void write_causal_csv(std::ostream& out, const std::map<std::string, PairedEffect>& effects) {
    out << "config,n,delta_mean,sem,ci_low,ci_high,p_value\n";
    for (const auto& name : causal_table_order()) {
        out << name << ',';
        if (name == "baseline") {
            out << ",0,,,,\n";
            continue;
        }
        const auto it = effects.find(name);
        if (it == effects.end()) {
            for (int k = 0; k < 6; ++k) {
                out << kMissingCell << (k < 5 ? "," : "\n");
            }
            continue;
        }
        const auto& e = it->second;
        out << e.n << ',' << fmt(e.delta_mean) << ',' << fmt(e.sem) << ',' << fmt(e.ci_low) << ','
            << fmt(e.ci_high) << ',' << fmt_p(e.p_value) << '\n';
    }
}

void write_causal_text(std::ostream& out, const std::map<std::string, PairedEffect>& effects) {
    out << std::left << std::setw(16) << "config" << std::right << std::setw(6) << "n" << std::setw(10) << "delta"
        << std::setw(9) << "sem" << std::setw(22) << "95% CI" << std::setw(11) << "p" << '\n';
    for (const auto& name : causal_table_order()) {
        out << std::left << std::setw(16) << name << std::right;
        if (name == "baseline") {
            out << std::setw(6) << "" << std::setw(10) << "0" << "  (by definition)\n";
            continue;
        }
        const auto it = effects.find(name);
        if (it == effects.end()) {
            out << std::setw(6) << kMissingCell << std::setw(10) << kMissingCell << '\n';
            continue;
        }
        const auto& e = it->second;
        out << std::setw(6) << e.n << std::setw(10) << fmt(e.delta_mean, 3) << std::setw(9) << fmt(e.sem, 3)
            << std::setw(22) << ("[" + fmt(e.ci_low, 3) + ", " + fmt(e.ci_high, 3) + "]") << std::setw(11)
            << fmt_p(e.p_value) << '\n';
    }
}

std::string split_name(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

DedupeResult dedupe_cohort(const std::vector<CohortRow>& rows) {
    std::set<std::string> ids;
    std::set<std::string> test_bases;
    for (const auto& r : rows) {
        if (!ids.insert(r.image_id).second) {
            throw StatsError("duplicate image id '" + r.image_id + "'");
        }
        if (r.split == Split::test) {
            test_bases.insert(r.base_id);
        }
    }
    // Representative per (split, base_id) for val/test: smallest image id.
    std::map<std::pair<Split, std::string>, std::string> keep;
    for (const auto& r : rows) {
        if (r.split == Split::train) {
            continue;
        }
        auto [it, inserted] = keep.try_emplace({r.split, r.base_id}, r.image_id);
        if (!inserted && r.image_id < it->second) {
            it->second = r.image_id;
        }
    }
    DedupeResult out;
    out.report.input_rows = static_cast<int>(rows.size());
    for (const auto& r : rows) {
        if (r.split == Split::train) {
            if (test_bases.contains(r.base_id)) {
                ++out.report.train_leakage_removed;
                continue;
            }
        } else if (keep.at({r.split, r.base_id}) != r.image_id) {
            ++(r.split == Split::val ? out.report.val_collapsed : out.report.test_collapsed);
            continue;
        }
        out.rows.push_back(r);
    }
    out.report.output_rows = static_cast<int>(out.rows.size());
    return out;
}

std::vector<CohortRow> read_cohort_csv(std::istream& in) {
    std::vector<CohortRow> rows;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto cells = split_csv(line);
        if (!header) {
            if (cells != std::vector<std::string>{"image_id", "base_id", "split", "label"}) {
                throw StatsError("line " + std::to_string(line_no) + ": unexpected cohort header");
            }
            header = true;
            continue;
        }
        if (cells.size() != 4) {
            throw StatsError("line " + std::to_string(line_no) + ": expected 4 cells");
        }
        CohortRow r;
        r.image_id = cells[0];
        r.base_id = cells[1];
        if (cells[2] == "train") {
            r.split = Split::train;
        } else if (cells[2] == "val") {
            r.split = Split::val;
        } else if (cells[2] == "test") {
            r.split = Split::test;
        } else {
            throw StatsError("line " + std::to_string(line_no) + ": unknown split '" + cells[2] + "'");
        }
        if (cells[3] != "0" && cells[3] != "1") {
            throw StatsError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        r.label = cells[3] == "1" ? 1 : 0;
        rows.push_back(std::move(r));
    }
    if (!header) {
        throw StatsError("cohort CSV has no header");
    }
    return rows;
}

std::vector<CohortRow> read_cohort_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw StatsError("cannot open " + path.string());
    }
    try {
        return read_cohort_csv(in);
    } catch (const StatsError& e) {
        throw StatsError(path.string() + ": " + e.what());
    }
}

void write_cohort_csv(std::ostream& out, const std::vector<CohortRow>& rows) {
    out << "image_id,base_id,split,label\n";
    for (const auto& r : rows) {
        out << r.image_id << ',' << r.base_id << ',' << split_name(r.split) << ',' << r.label << '\n';
    }
}

void write_dedupe_report(std::ostream& out, const DedupeReport& report) {
    out << "operation,rows\n";
    out << "input," << report.input_rows << '\n';
    out << "train_cross_split_leakage_removed," << report.train_leakage_removed << '\n';
    out << "val_in_split_collapse_removed," << report.val_collapsed << '\n';
    out << "test_in_split_collapse_removed," << report.test_collapsed << '\n';
    out << "total_removed," << report.total_removed() << '\n';
    out << "output," << report.output_rows << '\n';
}

}  // namespace vesselbez
