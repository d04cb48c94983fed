#include "vesselbez/features.hpp"

#include "vesselbez/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace vesselbez {
namespace {

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Population statistics.
Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) {
        return m;
    }
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m.mean) * (x - m.mean);
    }
    m.std = std::sqrt(ss / static_cast<double>(v.size()));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    m.min = *lo;
    m.max = *hi;
    return m;
}

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

}  // namespace

std::optional<std::size_t> feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (kFeatureNames[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

double& FeatureVector::operator[](std::string_view name) {
    const auto i = feature_index(name);
    if (!i) {
        throw std::out_of_range("unknown feature '" + std::string(name) + "'");
    }
    return values[*i];
}

double FeatureVector::operator[](std::string_view name) const {
    const auto i = feature_index(name);
    if (!i) {
        throw std::out_of_range("unknown feature '" + std::string(name) + "'");
    }
    return values[*i];
}

double field_at(const RadiusField& field, Point2 p) {
    if (field.empty()) {
        return 0.0;
    }
    const int r = std::clamp(static_cast<int>(std::lround(p.y)), 0, field.height() - 1);
    const int c = std::clamp(static_cast<int>(std::lround(p.x)), 0, field.width() - 1);
    return field(r, c);
}

double mean_radius_along(const CubicBezier& curve, const RadiusField& field, int samples) {
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        sum += field_at(field, eval(curve, static_cast<double>(i) / (samples - 1)));
    }
    return sum / samples;
}

std::optional<SegmentMetrics> segment_metrics(const CubicBezier& curve, const RadiusField& field) {
    SegmentMetrics m;
    m.chord = curve.chord();
    if (m.chord < 1e-6) {
        return std::nullopt;
    }
    m.arc = arc_length(curve);
    m.tortuosity = std::max(1.0, m.arc / m.chord);
    double ksum = 0.0;
    int kn = 0;
    for (int i = 0; i < kCurvatureSamples; ++i) {
        const auto k = curvature(curve, static_cast<double>(i) / (kCurvatureSamples - 1));
        if (k) {
            ksum += *k;
            ++kn;
        } else {
            ++m.curvature_samples_dropped;
        }
    }
    m.mean_curvature = kn > 0 ? ksum / kn : 0.0;
    double rsum = 0.0;
    for (int i = 0; i < kRadiusSamples; ++i) {
        m.radius_samples[i] = field_at(field, eval(curve, static_cast<double>(i) / (kRadiusSamples - 1)));
        rsum += m.radius_samples[i];
    }
    m.mean_radius = rsum / kRadiusSamples;
    return m;
}

FeatureVector compute_features(const BezierTree& tree, const RadiusField& field, const VesselMask& mask,
                               int branch_count, const FeatureOptions& options, FeatureDiagnostics* diagnostics) {
    if (tree.segments.empty()) {
        throw std::invalid_argument("cannot compute features of an empty tree");
    }
    std::vector<double> arcs, chords, torts, curvs, radii;
    std::size_t radius_samples = 0;
    std::size_t thick_samples = 0;
    FeatureDiagnostics diag;
    for (const auto& seg : tree.segments) {
        const auto m = segment_metrics(seg.curve, field);
        if (!m) {
            ++diag.excluded_segments;
            continue;
        }
        arcs.push_back(m->arc);
        chords.push_back(m->chord);
        torts.push_back(m->tortuosity);
        curvs.push_back(m->mean_curvature);
        radii.push_back(m->mean_radius);
        diag.dropped_curvature_samples += m->curvature_samples_dropped;
        for (double r : m->radius_samples) {
            ++radius_samples;
            thick_samples += r >= options.thick_threshold ? 1 : 0;
        }
    }
    if (diagnostics) {
        *diagnostics = diag;
    }
    if (arcs.empty()) {
        throw std::invalid_argument("every segment of the tree is degenerate");
    }
    const auto a = moments(arcs);
    const auto ch = moments(chords);
    const auto t = moments(torts);
    const auto k = moments(curvs);
    const auto r = moments(radii);
    const double total_arc = std::accumulate(arcs.begin(), arcs.end(), 0.0);

    FeatureVector f;
    f["total_arc_length"] = total_arc;
    f["n_segments"] = static_cast<double>(arcs.size());
    f["mean_segment_length"] = a.mean;
    f["std_segment_length"] = a.std;
    f["mean_chord_length"] = ch.mean;
    f["std_chord_length"] = ch.std;
    f["mean_tortuosity"] = t.mean;
    f["std_tortuosity"] = t.std;
    f["max_tortuosity"] = t.max;
    f["mean_curvature"] = k.mean;
    f["std_curvature"] = k.std;
    f["max_curvature"] = k.max;
    f["mean_radius"] = r.mean;
    f["std_radius"] = r.std;
    f["min_radius"] = r.min;
    f["max_radius"] = r.max;
    f["radius_cv"] = r.mean > 0.0 ? r.std / r.mean : 0.0;
    f["thick_vessel_ratio"] = static_cast<double>(thick_samples) / static_cast<double>(radius_samples);
    f["branching_density"] = total_arc > 0.0 ? branch_count / total_arc : 0.0;
    f["coverage_ratio"] =
        mask.empty() ? 0.0 : static_cast<double>(mask.foreground_count()) / static_cast<double>(mask.bits().size());
    return f;
}

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows,
                        const std::vector<std::string>& comments) {
    std::set<std::string> seen;
    for (const auto& row : rows) {
        if (!seen.insert(row.image_id).second) {
            throw FeatureCsvError("duplicate image id '" + row.image_id + "'");
        }
        for (std::size_t i = 0; i < row.features.values.size(); ++i) {
            if (!std::isfinite(row.features.values[i])) {
                throw FeatureCsvError("non-finite " + std::string(kFeatureNames[i]) + " for image '" + row.image_id +
                                      "'");
            }
        }
        if (row.image_id.find_first_of(",\n") != std::string::npos) {
            throw FeatureCsvError("image id '" + row.image_id + "' contains a separator");
        }
    }
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    out << "image_id";
    for (auto name : kFeatureNames) {
        out << ',' << name;
    }
    out << ",label\n";
    char buf[40];
    for (const auto& row : rows) {
        out << row.image_id;
        for (double v : row.features.values) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << ',' << row.label << '\n';
    }
}

void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows,
                        const std::vector<std::string>& comments) {
    std::ostringstream ss;
    write_features_csv(ss, rows, comments);
    write_file_atomic(path, ss.str());
}

std::vector<FeatureRow> read_features_csv(std::istream& in) {
    std::vector<FeatureRow> rows;
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
            if (cells.size() != kFeatureCount + 2 || cells.front() != "image_id" || cells.back() != "label") {
                throw FeatureCsvError("line " + std::to_string(line_no) + ": unexpected features header");
            }
            for (int i = 0; i < kFeatureCount; ++i) {
                if (cells[i + 1] != kFeatureNames[i]) {
                    throw FeatureCsvError("line " + std::to_string(line_no) + ": column " + std::to_string(i + 2) +
                                          " should be " + std::string(kFeatureNames[i]));
                }
            }
            header = true;
            continue;
        }
        if (cells.size() != kFeatureCount + 2) {
            throw FeatureCsvError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(kFeatureCount + 2) + " cells");
        }
        FeatureRow row;
        row.image_id = cells[0];
        for (int i = 0; i < kFeatureCount; ++i) {
            const auto& s = cells[i + 1];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw FeatureCsvError("line " + std::to_string(line_no) + ": bad value '" + s + "'");
            }
            row.features.values[i] = v;
        }
        const auto& lab = cells.back();
        if (lab != "0" && lab != "1") {
            throw FeatureCsvError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        row.label = lab == "1" ? 1 : 0;
        rows.push_back(std::move(row));
    }
    if (!header) {
        throw FeatureCsvError("features CSV has no header");
    }
    return rows;
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FeatureCsvError("cannot open " + path.string());
    }
    return read_features_csv(in);
}

}  // namespace vesselbez
