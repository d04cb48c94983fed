#pragma once

#include "vesselbez/features.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesselbez {

class StatsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The 13 configuration names in causal-table order (strongest tortuosity first, baseline last).
const std::vector<std::string>& causal_table_order();
bool is_known_config(const std::string& name);

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

struct ScoreRecord {
    std::string start_id;
    std::string config;
    double prob = 0.0;
    double mean_intensity = 0.0;  // 0-255
    double std_intensity = 0.0;   // 0-255
    double rg_ratio = 0.0;
};

/// Records keyed by (start_id, config).
class ScoreTable {
public:
    ScoreTable() = default;
    explicit ScoreTable(std::vector<ScoreRecord> records);

    /// Throws StatsError on duplicate (start, config), unknown config or prob outside [0, 1].
    void add(ScoreRecord record);
    const ScoreRecord* find(const std::string& start_id, const std::string& config) const;
    std::set<std::string> starts() const;
    std::set<std::string> configs() const;
    const std::vector<ScoreRecord>& records() const { return records_; }

private:
    std::vector<ScoreRecord> records_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

/// Header: start_id,config,prob,mean_intensity,std_intensity,rg_ratio. Errors carry the line number.
ScoreTable read_scores_csv(std::istream& in);
ScoreTable read_scores_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Paired effects
// ---------------------------------------------------------------------------

struct PairedEffect {
    std::string config;
    int n = 0;
    double delta_mean = 0.0;
    double sem = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    int skipped_missing_baseline = 0;
};

/// Mean, SEM (sample std / sqrt n), two-sided 95% t interval and p-value of a set of paired
/// differences. Throws StatsError when n < 2.
PairedEffect summarize_deltas(const std::vector<double>& deltas, const std::string& config = {});

/// CI from summary values: mean +/- t_{0.025, n-1} * sem.
std::pair<double, double> t_confidence_interval(double mean, double sem, int n, double level = 0.95);

/// Delta_i = prob(config, i) - prob(baseline, i) over starts having both records (optionally limited
/// to `subset`). Starts with the config record but no baseline are skipped and tallied.
PairedEffect paired_delta(const ScoreTable& scores, const std::string& config,
                          const std::optional<std::set<std::string>>& subset = std::nullopt);

/// Per-start differences in start-id order; exposed for the bias-cancellation property.
std::vector<double> paired_differences(const ScoreTable& scores, const std::string& config,
                                       const std::optional<std::set<std::string>>& subset = std::nullopt,
                                       int* skipped = nullptr);

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

inline constexpr double kFidelityMeanLow = 50.0;
inline constexpr double kFidelityMeanHigh = 170.0;
inline constexpr double kFidelityStdMin = 25.0;
inline constexpr double kFidelityRedGreenMin = 1.3;
inline constexpr double kStrictSubsetThreshold = 0.3;

struct FidelityVerdict {
    bool pass = true;
    std::string reason;  // empty on pass
};

/// mean in [50, 170], std > 25, red/green > 1.3. Throws StatsError for non-finite stats.
FidelityVerdict fidelity_filter(const ScoreRecord& record);

/// Starts whose baseline record passes fidelity_filter.
std::set<std::string> fidelity_pass_set(const ScoreTable& scores);

/// Starts whose baseline prob < threshold and whose baseline record passes fidelity_filter.
std::set<std::string> strict_subset(const ScoreTable& scores, double threshold = kStrictSubsetThreshold);

/// |delta(a)| / |delta(b)|; std::nullopt when |delta(b)| < 1e-9. Throws StatsError for missing configs.
std::optional<double> contrast_ratio(const std::map<std::string, PairedEffect>& effects, const std::string& a,
                                     const std::string& b);

// ---------------------------------------------------------------------------
// Observational statistics
// ---------------------------------------------------------------------------

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
};

/// Average ranks for ties (1-based).
std::vector<double> average_ranks(const std::vector<double>& values);

/// Pearson correlation of average ranks; p from t = rho sqrt((n-2)/(1-rho^2)) with n-2 df.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

struct OddsRatio {
    double odds_ratio = 1.0;
    double ci_low = 1.0;
    double ci_high = 1.0;
    double log_or = 0.0;
    double se_log_or = 0.0;
};

/// Univariate logistic regression on the z-scored feature by IRLS; OR per SD = exp(slope) with a
/// Wald 95% interval. Throws StatsError on separation (|slope| > 30) or non-convergence.
OddsRatio logistic_or(const std::vector<double>& feature, const std::vector<int>& label);

/// Top- vs bottom-quintile odds ratio from the 2x2 counts, Haldane-Anscombe 0.5 correction when any
/// cell is zero, Wald interval on log OR. Quintiles by stable rank.
OddsRatio quintile_or(const std::vector<double>& feature, const std::vector<int>& label);

/// Quintile index (0..4) per observation: rank-ordered with a stable sort, bin = floor(5 * rank / n).
std::vector<int> quintile_bins(const std::vector<double>& feature);

struct ObservationalRow {
    std::string feature;
    std::optional<SpearmanResult> spearman;
    std::optional<OddsRatio> or_per_sd;
    std::optional<OddsRatio> q5_q1;
    std::string note;  // error text for failed analyses
};

/// One row per feature, in kFeatureNames order. Failed analyses leave the cell empty with a note.
std::vector<ObservationalRow> observational_table(const std::vector<FeatureRow>& rows);

void write_observational_csv(std::ostream& out, const std::vector<ObservationalRow>& table);
void write_observational_text(std::ostream& out, const std::vector<ObservationalRow>& table);

// ---------------------------------------------------------------------------
// Causal table
// ---------------------------------------------------------------------------

/// Rows in causal_table_order(); baseline is always 0, missing configs render as "—".
void write_causal_csv(std::ostream& out, const std::map<std::string, PairedEffect>& effects);
void write_causal_text(std::ostream& out, const std::map<std::string, PairedEffect>& effects);

// ---------------------------------------------------------------------------
// Cohort deduplication
// ---------------------------------------------------------------------------

enum class Split { train, val, test };

struct CohortRow {
    std::string image_id;
    std::string base_id;
    Split split = Split::train;
    int label = 0;
    bool operator==(const CohortRow&) const = default;
};

std::string split_name(Split split);

struct DedupeReport {
    int input_rows = 0;
    int train_leakage_removed = 0;
    int val_collapsed = 0;
    int test_collapsed = 0;
    int output_rows = 0;
    int total_removed() const { return train_leakage_removed + val_collapsed + test_collapsed; }
};

struct DedupeResult {
    std::vector<CohortRow> rows;  // input order preserved
    DedupeReport report;
};

/// Drops train rows whose base_id occurs in test, then keeps one row per base_id (smallest image_id)
/// within val and within test. Throws StatsError on duplicate image ids.
DedupeResult dedupe_cohort(const std::vector<CohortRow>& rows);

/// Header: image_id,base_id,split,label.
std::vector<CohortRow> read_cohort_csv(std::istream& in);
std::vector<CohortRow> read_cohort_csv(const std::filesystem::path& path);
void write_cohort_csv(std::ostream& out, const std::vector<CohortRow>& rows);
void write_dedupe_report(std::ostream& out, const DedupeReport& report);

}  // namespace vesselbez
