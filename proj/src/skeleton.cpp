#include "vesselbez/skeleton.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace vesselbez {
namespace {

// Clockwise from north: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDr = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};

using Raster = Grid<std::uint8_t>;

std::array<int, 8> ring(const Raster& g, int r, int c) {
    std::array<int, 8> p{};
    for (int k = 0; k < 8; ++k) {
        const int rr = r + kDr[k];
        const int cc = c + kDc[k];
        p[k] = g.contains(rr, cc) && g(rr, cc) ? 1 : 0;
    }
    return p;
}

int count_on(const std::array<int, 8>& p) {
    int n = 0;
    for (int v : p) {
        n += v;
    }
    return n;
}

// Zhang-Suen deletion test. p[0..7] = P2..P9.
bool zhang_suen_candidate(const std::array<int, 8>& p, int pass) {
    const int b = count_on(p);
    if (b < 2 || b > 6) {
        return false;
    }
    int a = 0;
    for (int k = 0; k < 8; ++k) {
        if (p[k] == 0 && p[(k + 1) % 8] == 1) {
            ++a;
        }
    }
    if (a != 1) {
        return false;
    }
    const int n = p[0], e = p[2], s = p[4], w = p[6];
    if (pass == 0) {
        return n * e * s == 0 && e * s * w == 0;
    }
    return n * e * w == 0 && n * s * w == 0;
}

// 8-connectivity Yokoi number over (E, NE, N, NW, W, SW, S, SE).
int yokoi8(const std::array<int, 8>& p) {
    const std::array<int, 8> x = {p[2], p[1], p[0], p[7], p[6], p[5], p[4], p[3]};
    int n = 0;
    for (int k = 0; k < 8; k += 2) {
        const int a = 1 - x[k];
        const int b = 1 - x[(k + 1) % 8];
        const int c = 1 - x[(k + 2) % 8];
        n += a - a * b * c;
    }
    return n;
}

// A pixel whose only two neighbours touch each other is the tip of a line; removing it would
// let the line erode from its end one pixel per sweep.
bool is_tip(const std::array<int, 8>& p) {
    for (int k = 0; k < 8; ++k) {
        if (p[k] && p[(k + 1) % 8]) {
            return true;
        }
    }
    return false;
}

bool removable(const Raster& g, int r, int c, bool keep_tips) {
    const auto p = ring(g, r, c);
    const int n = count_on(p);
    if (n < 2 || (keep_tips && n == 2 && is_tip(p))) {
        return false;
    }
    return yokoi8(p) == 1;
}

// Marks for one subiteration; the marking reads only the pre-pass raster.
void mark_serial(const Raster& g, Raster& marks, int pass) {
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            marks(r, c) = g(r, c) && zhang_suen_candidate(ring(g, r, c), pass) ? 1 : 0;
        }
    }
}

void mark_parallel(const Raster& g, Raster& marks, int pass) {
    const int h = g.height();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < g.width(); ++c) {
            marks(r, c) = g(r, c) && zhang_suen_candidate(ring(g, r, c), pass) ? 1 : 0;
        }
    }
}

// Marked pixels are deleted in raster order and re-tested against the current raster, which
// keeps 2-pixel-thick structures (that plain parallel Zhang-Suen erases) connected.
// Tips on pixels away from the original boundary (interior, 4-neighbours all foreground) are kept:
// Zhang-Suen otherwise eats diagonal bands from their ends.
bool apply_marks(Raster& g, const Raster& marks, const Raster& interior) {
    bool changed = false;
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            if (marks(r, c) && removable(g, r, c, interior(r, c) != 0)) {
                g(r, c) = 0;
                changed = true;
            }
        }
    }
    return changed;
}

// Higher-degree simple pixels go first so that corner triangles at line tips collapse onto the tip.
void cleanup(Raster& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int min_degree : {3, 2}) {
            for (int r = 0; r < g.height(); ++r) {
                for (int c = 0; c < g.width(); ++c) {
                    if (g(r, c) && count_on(ring(g, r, c)) >= min_degree && removable(g, r, c, true)) {
                        g(r, c) = 0;
                        changed = true;
                    }
                }
            }
        }
    }
}

// Short side branches ending in a junction within kMaxSpur pixels are removed. On wide vessels the
// kept interior tips otherwise leave one-pixel teeth along diagonal centre lines.
constexpr int kMaxSpur = 3;

bool prune_spurs(Raster& g) {
    std::vector<Pixel> doomed;
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            if (!g(r, c)) {
                continue;
            }
            const auto p = ring(g, r, c);
            const int n = count_on(p);
            if (n != 1 && !(n == 2 && is_tip(p))) {
                continue;
            }
            std::vector<Pixel> path{{r, c}};
            while (int(path.size()) <= kMaxSpur) {
                const Pixel cur = path.back();
                std::vector<Pixel> next;
                bool junction = false;
                for (int k = 0; k < 8; ++k) {
                    const Pixel q{cur.row + kDr[k], cur.col + kDc[k]};
                    if (!g.contains(q.row, q.col) || !g(q.row, q.col) ||
                        std::find(path.begin(), path.end(), q) != path.end()) {
                        continue;
                    }
                    next.push_back(q);
                    junction = junction || count_on(ring(g, q.row, q.col)) >= 3;
                }
                if (junction) {
                    doomed.insert(doomed.end(), path.begin(), path.end());
                    break;
                }
                if (next.size() != 1) {
                    break;
                }
                path.push_back(next[0]);
            }
        }
    }
    for (const auto& q : doomed) {
        g(q.row, q.col) = 0;
    }
    return !doomed.empty();
}

Skeleton thin(const VesselMask& mask, const std::function<void(const Raster&, Raster&, int)>& mark) {
    Raster g(mask.width(), mask.height(), std::vector<std::uint8_t>(mask.bits().begin(), mask.bits().end()));
    Raster marks(mask.width(), mask.height(), 0);
    Raster interior(mask.width(), mask.height(), 0);
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            const auto p = ring(g, r, c);
            interior(r, c) = g(r, c) && p[0] && p[2] && p[4] && p[6] ? 1 : 0;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            mark(g, marks, pass);
            changed = apply_marks(g, marks, interior) || changed;
        }
    }
    cleanup(g);
    for (int round = 0; round < 3 && prune_spurs(g); ++round) {
        cleanup(g);
    }
    return Skeleton(std::move(g));
}

}  // namespace

std::vector<Pixel> Skeleton::pixels() const {
    std::vector<Pixel> out;
    for (int r = 0; r < height(); ++r) {
        for (int c = 0; c < width(); ++c) {
            if (raster_(r, c)) {
                out.push_back({r, c});
            }
        }
    }
    return out;
}

std::size_t Skeleton::size() const {
    std::size_t n = 0;
    for (auto v : raster_.values()) {
        n += v ? 1 : 0;
    }
    return n;
}

int Skeleton::degree(Pixel p) const { return count_on(ring(raster_, p.row, p.col)); }

bool is_simple_pixel(const Grid<std::uint8_t>& raster, int row, int col) {
    return yokoi8(ring(raster, row, col)) == 1;
}

Skeleton skeletonize(const VesselMask& mask) { return thin(mask, mark_parallel); }

Skeleton skeletonize_serial(const VesselMask& mask) { return thin(mask, mark_serial); }

NodeSets classify_nodes(const Skeleton& skeleton) {
    NodeSets out;
    for (const auto& p : skeleton.pixels()) {
        const int d = skeleton.degree(p);
        if (d == 1) {
            out.endpoints.push_back(p);
        } else if (d >= 3) {
            out.branch_nodes.push_back(p);
        }
    }
    return out;
}

int count_junctions(const Skeleton& skeleton) {
    // Branch pixels up to two pixels apart belong to one junction; wide vessels split a fork into
    // several nearby degree-3 pixels.
    constexpr int kJunctionReach = 2;
    Raster branch(skeleton.width(), skeleton.height(), 0);
    for (const auto& p : classify_nodes(skeleton).branch_nodes) {
        branch(p.row, p.col) = 1;
    }
    int clusters = 0;
    std::vector<Pixel> stack;
    for (int r = 0; r < branch.height(); ++r) {
        for (int c = 0; c < branch.width(); ++c) {
            if (branch(r, c) != 1) {
                continue;
            }
            ++clusters;
            branch(r, c) = 2;
            stack.push_back({r, c});
            while (!stack.empty()) {
                const auto p = stack.back();
                stack.pop_back();
                for (int dr = -kJunctionReach; dr <= kJunctionReach; ++dr) {
                    for (int dc = -kJunctionReach; dc <= kJunctionReach; ++dc) {
                        const int rr = p.row + dr;
                        const int cc = p.col + dc;
                        if (branch.contains(rr, cc) && branch(rr, cc) == 1) {
                            branch(rr, cc) = 2;
                            stack.push_back({rr, cc});
                        }
                    }
                }
            }
        }
    }
    return clusters;
}

std::vector<Polyline> extract_polylines(const Skeleton& skeleton) {
    const auto& g = skeleton.raster();
    Grid<int> degree(skeleton.width(), skeleton.height(), -1);
    for (const auto& p : skeleton.pixels()) {
        degree(p.row, p.col) = skeleton.degree(p);
    }
    Raster visited(skeleton.width(), skeleton.height(), 0);
    auto is_terminal = [&](Pixel p) { return degree(p.row, p.col) >= 0 && degree(p.row, p.col) != 2; };
    auto neighbours = [&](Pixel p) {
        std::vector<Pixel> out;
        for (int k = 0; k < 8; ++k) {
            const Pixel q{p.row + kDr[k], p.col + kDc[k]};
            if (g.contains(q.row, q.col) && g(q.row, q.col)) {
                out.push_back(q);
            }
        }
        return out;
    };

    std::vector<Polyline> out;
    for (const auto& t : skeleton.pixels()) {
        if (!is_terminal(t)) {
            continue;
        }
        for (const auto& n : neighbours(t)) {
            if (is_terminal(n)) {
                if (t < n) {
                    out.push_back({{t, n}});
                }
                continue;
            }
            if (visited(n.row, n.col)) {
                continue;
            }
            Polyline line{{t, n}};
            visited(n.row, n.col) = 1;
            Pixel prev = t;
            Pixel cur = n;
            while (true) {
                const auto nb = neighbours(cur);
                const Pixel next = nb[0] == prev ? nb[1] : nb[0];
                line.points.push_back(next);
                if (is_terminal(next) || visited(next.row, next.col)) {
                    break;
                }
                visited(next.row, next.col) = 1;
                prev = cur;
                cur = next;
            }
            out.push_back(std::move(line));
        }
    }

    // Remaining unvisited degree-2 pixels belong to pure cycles.
    for (const auto& s : skeleton.pixels()) {
        if (degree(s.row, s.col) != 2 || visited(s.row, s.col)) {
            continue;
        }
        Polyline line{{s}};
        visited(s.row, s.col) = 1;
        Pixel prev = s;
        Pixel cur = neighbours(s)[0];
        while (!visited(cur.row, cur.col)) {
            visited(cur.row, cur.col) = 1;
            line.points.push_back(cur);
            const auto nb = neighbours(cur);
            const Pixel next = nb[0] == prev ? nb[1] : nb[0];
            prev = cur;
            cur = next;
        }
        out.push_back(std::move(line));
    }
    return out;
}

void write_polylines_text(std::ostream& out, const std::vector<Polyline>& polylines) {
    for (std::size_t i = 0; i < polylines.size(); ++i) {
        out << i << ':';
        for (const auto& p : polylines[i].points) {
            out << " (" << p.row << ',' << p.col << ')';
        }
        out << '\n';
    }
}

}  // namespace vesselbez
