#include "vesselbez/bte.hpp"

#include "vesselbez/image_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vesselbez {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

long parse_int(const std::string& tok, int line, const char* what) {
    long v = 0;
    const auto* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw BteParseError(line, std::string("non-integer ") + what + " '" + tok + "'");
    }
    return v;
}

double parse_real(const std::string& tok, int line) {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw BteParseError(line, "non-numeric field '" + tok + "'");
    }
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_bte(std::ostream& out, const BezierTree& tree, const std::vector<std::string>& comments) {
    out << "BTE 1\n";
    out << "# source_dims " << tree.source_width << ' ' << tree.source_height << '\n';
    if (!tree.provenance.empty()) {
        out << "# provenance " << tree.provenance << '\n';
    }
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    char buf[64];
    for (const auto& s : tree.segments) {
        out << s.id << ' ' << s.parent;
        for (const auto& p : s.curve.p) {
            std::snprintf(buf, sizeof(buf), " %.6f %.6f", p.x, p.y);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), " %.6f", s.radius);
        out << buf << '\n';
    }
}

std::string to_bte_string(const BezierTree& tree, const std::vector<std::string>& comments) {
    std::ostringstream ss;
    write_bte(ss, tree, comments);
    return ss.str();
}

void write_bte(const std::filesystem::path& path, const BezierTree& tree, const std::vector<std::string>& comments) {
    write_file_atomic(path, to_bte_string(tree, comments));
}

BezierTree parse_bte(std::istream& in) {
    BezierTree tree;
    std::string raw;
    int line_no = 0;
    bool header = false;
    std::map<int, int> id_line;
    std::vector<int> record_lines;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (!header) {
            const auto tok = split_ws(line);
            if (tok.size() != 2 || tok[0] != "BTE") {
                throw BteParseError(line_no, "missing 'BTE <version>' header");
            }
            if (tok[1] != "1") {
                throw BteParseError(line_no, "unknown BTE version '" + tok[1] + "'");
            }
            header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto body = trim(line.substr(1));
            if (body.rfind("source_dims", 0) == 0) {
                const auto tok = split_ws(body);
                if (tok.size() != 3) {
                    throw BteParseError(line_no, "malformed source_dims comment");
                }
                tree.source_width = static_cast<int>(parse_int(tok[1], line_no, "width"));
                tree.source_height = static_cast<int>(parse_int(tok[2], line_no, "height"));
            } else if (body.rfind("provenance ", 0) == 0) {
                tree.provenance = trim(body.substr(11));
            }
            continue;
        }
        const auto tok = split_ws(line);
        if (tok.size() != 11) {
            throw BteParseError(line_no, "expected 11 fields, found " + std::to_string(tok.size()));
        }
        Segment seg;
        const long id = parse_int(tok[0], line_no, "id");
        const long parent = parse_int(tok[1], line_no, "parent");
        if (id <= 0 || id > std::numeric_limits<int>::max()) {
            throw BteParseError(line_no, "segment id must be a positive integer");
        }
        if (parent < -1 || parent == 0 || parent > std::numeric_limits<int>::max()) {
            throw BteParseError(line_no, "parent must be -1 or a positive id");
        }
        seg.id = static_cast<int>(id);
        seg.parent = static_cast<int>(parent);
        for (int k = 0; k < 4; ++k) {
            seg.curve.p[k] = {parse_real(tok[2 + 2 * k], line_no), parse_real(tok[3 + 2 * k], line_no)};
        }
        seg.radius = parse_real(tok[10], line_no);
        if (seg.radius < 0.0) {
            throw BteParseError(line_no, "negative radius");
        }
        if (id_line.contains(seg.id)) {
            throw BteParseError(line_no, "duplicate segment id " + std::to_string(seg.id) + " (first on line " +
                                             std::to_string(id_line[seg.id]) + ")");
        }
        id_line[seg.id] = line_no;
        record_lines.push_back(line_no);
        tree.segments.push_back(seg);
    }
    if (!header) {
        throw BteParseError(line_no + 1, "missing 'BTE <version>' header");
    }
    for (std::size_t i = 0; i < tree.segments.size(); ++i) {
        const int parent = tree.segments[i].parent;
        if (parent != kNoParent && !id_line.contains(parent)) {
            throw BteParseError(record_lines[i], "dangling parent id " + std::to_string(parent));
        }
    }
    if (!parents_acyclic(tree)) {
        throw BteParseError(line_no, "parent links form a cycle");
    }
    return tree;
}

BezierTree parse_bte(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_bte(in);
}

BezierTree parse_bte_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_bte(ss);
}

}  // namespace vesselbez
