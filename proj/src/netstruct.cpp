#include "octaseg/netstruct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace octaseg {

namespace {

constexpr std::array<Pixel, 4> kN4 = {{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
constexpr std::array<Pixel, 8> kN8 = {{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

std::size_t flat(int width, int row, int col) { return static_cast<std::size_t>(row) * width + col; }

int neighbour_count(const BinaryMask& m, int r, int c) {
    int n = 0;
    for (const auto& d : kN8) n += m.at_or_false(r + d.row, c + d.col) ? 1 : 0;
    return n;
}

}  // namespace

std::vector<std::size_t> ComponentLabels::sizes() const {
    std::vector<std::size_t> s(static_cast<std::size_t>(count) + 1, 0);
    for (int l : labels) {
        if (l > 0) ++s[static_cast<std::size_t>(l)];
    }
    return s;
}

ComponentLabels connected_components(const BinaryMask& mask, Connectivity conn) {
    const int W = mask.width(), H = mask.height();
    ComponentLabels out{W, H, std::vector<int>(mask.size(), 0), 0};
    const std::span<const Pixel> steps =
        conn == Connectivity::Four ? std::span<const Pixel>(kN4) : std::span<const Pixel>(kN8);
    std::vector<Pixel> stack;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!mask.at(r, c) || out.labels[flat(W, r, c)] != 0) continue;
            const int label = ++out.count;
            out.labels[flat(W, r, c)] = label;
            stack.push_back({r, c});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                for (const auto& d : steps) {
                    const int rr = p.row + d.row, cc = p.col + d.col;
                    if (rr < 0 || cc < 0 || rr >= H || cc >= W) continue;
                    if (!mask.at(rr, cc) || out.labels[flat(W, rr, cc)] != 0) continue;
                    out.labels[flat(W, rr, cc)] = label;
                    stack.push_back({rr, cc});
                }
            }
        }
    }
    return out;
}

std::vector<Pixel> disc_offsets(double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("disc radius must be non-negative");
    const int R = static_cast<int>(std::floor(radius + 1e-9));
    const double r2 = radius * radius + 1e-9;
    std::vector<Pixel> out;
    for (int dy = -R; dy <= R; ++dy) {
        for (int dx = -R; dx <= R; ++dx) {
            if (dx * dx + dy * dy <= r2) out.push_back({dy, dx});
        }
    }
    return out;
}

BinaryMask dilate_disc(const BinaryMask& mask, double radius) {
    const auto disc = disc_offsets(radius);
    const int W = mask.width(), H = mask.height();
    BinaryMask out(W, H);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!mask.at(r, c)) continue;
            for (const auto& d : disc) {
                const int rr = r + d.row, cc = c + d.col;
                if (rr >= 0 && cc >= 0 && rr < H && cc < W) out.set(rr, cc, true);
            }
        }
    }
    return out;
}

BettiPair betti_numbers(const BinaryMask& mask) {
    BettiPair b;
    b.b0 = connected_components(mask, Connectivity::Eight).count;
    const auto bg = connected_components(mask_complement(mask), Connectivity::Four);
    std::vector<bool> touches(static_cast<std::size_t>(bg.count) + 1, false);
    const int W = mask.width(), H = mask.height();
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (r == 0 || c == 0 || r == H - 1 || c == W - 1) touches[static_cast<std::size_t>(bg.at(r, c))] = true;
        }
    }
    for (int l = 1; l <= bg.count; ++l) b.b1 += touches[static_cast<std::size_t>(l)] ? 0 : 1;
    return b;
}

namespace {

// Simple-point table indexed by the 8-neighbour bit pattern (bit i = kN8[i] set).
std::array<bool, 256> build_simple_table() {
    std::array<bool, 256> table{};
    for (int cfg = 0; cfg < 256; ++cfg) {
        auto set = [&](int i) { return ((cfg >> i) & 1) != 0; };
        auto adjacent = [](int i, int j, bool four) {
            const int dr = std::abs(kN8[i].row - kN8[j].row), dc = std::abs(kN8[i].col - kN8[j].col);
            if (four) return dr + dc == 1;
            return std::max(dr, dc) == 1;
        };
        auto components = [&](bool foreground, bool four, bool only_touching_centre) {
            std::array<int, 8> comp{};
            comp.fill(-1);
            int n = 0;
            for (int s = 0; s < 8; ++s) {
                if (set(s) != foreground || comp[s] >= 0) continue;
                std::vector<int> stack{s};
                comp[s] = n;
                while (!stack.empty()) {
                    const int i = stack.back();
                    stack.pop_back();
                    for (int j = 0; j < 8; ++j) {
                        if (set(j) == foreground && comp[j] < 0 && adjacent(i, j, four)) {
                            comp[j] = n;
                            stack.push_back(j);
                        }
                    }
                }
                ++n;
            }
            if (!only_touching_centre) return n;
            // Count components containing a 4-neighbour of the centre (even indices).
            std::vector<bool> hit(static_cast<std::size_t>(n), false);
            for (int i = 0; i < 8; i += 2) {
                if (comp[i] >= 0) hit[static_cast<std::size_t>(comp[i])] = true;
            }
            return static_cast<int>(std::count(hit.begin(), hit.end(), true));
        };
        const int t8 = components(true, false, false);
        const int t4bar = components(false, true, true);
        table[static_cast<std::size_t>(cfg)] = (t8 == 1 && t4bar == 1);
    }
    return table;
}

const std::array<bool, 256>& simple_table() {
    static const auto table = build_simple_table();
    return table;
}

int neighbour_pattern(const BinaryMask& m, int r, int c) {
    int cfg = 0;
    for (int i = 0; i < 8; ++i) {
        if (m.at_or_false(r + kN8[static_cast<std::size_t>(i)].row, c + kN8[static_cast<std::size_t>(i)].col)) {
            cfg |= 1 << i;
        }
    }
    return cfg;
}

}  // namespace

bool is_simple_point(const BinaryMask& mask, int row, int col) {
    return simple_table()[static_cast<std::size_t>(neighbour_pattern(mask, row, col))];
}

BinaryMask skeletonize(const BinaryMask& mask) {
    BinaryMask m = mask;
    const int W = m.width(), H = m.height();
    std::vector<Pixel> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Pixel& dir : kN4) {
            candidates.clear();
            for (int r = 0; r < H; ++r) {
                for (int c = 0; c < W; ++c) {
                    if (m.at(r, c) && !m.at_or_false(r + dir.row, c + dir.col)) candidates.push_back({r, c});
                }
            }
            for (const Pixel& p : candidates) {
                if (neighbour_count(m, p.row, p.col) == 1) continue;
                if (!is_simple_point(m, p.row, p.col)) continue;
                m.set(p.row, p.col, false);
                changed = true;
            }
        }
    }
    return m;
}

std::size_t largest_component_length(const BinaryMask& skeleton) {
    const auto sizes = connected_components(skeleton, Connectivity::Eight).sizes();
    return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

// --- graph extraction ----------------------------------------------------------

namespace {

bool linked(const BinaryMask& m, Pixel p, Pixel q) {
    const int dr = q.row - p.row, dc = q.col - p.col;
    if (dr != 0 && dc != 0) {
        return !m.at_or_false(p.row + dr, p.col) && !m.at_or_false(p.row, p.col + dc);
    }
    if (dr == 0) {
        // Horizontal link that closes the bottom of a full 2x2 block.
        const int c = std::min(p.col, q.col);
        return !(m.at_or_false(p.row - 1, c) && m.at_or_false(p.row - 1, c + 1));
    }
    return true;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

int VesselGraph::component_count() const {
    DisjointSet ds(nodes.size());
    for (const auto& e : edges) ds.unite(e.a, e.b);
    int n = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) n += ds.find(static_cast<int>(i)) == static_cast<int>(i) ? 1 : 0;
    return n;
}

int VesselGraph::cycle_rank() const {
    return static_cast<int>(edges.size()) - static_cast<int>(nodes.size()) + component_count();
}

VesselGraph skeleton_to_graph(const BinaryMask& skel) {
    const int W = skel.width(), H = skel.height();
    VesselGraph g;
    g.width = W;
    g.height = H;

    std::vector<std::vector<Pixel>> adj(skel.size());
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!skel.at(r, c)) continue;
            for (const auto& d : kN8) {
                const Pixel q{r + d.row, c + d.col};
                if (skel.at_or_false(q.row, q.col) && linked(skel, {r, c}, q)) adj[flat(W, r, c)].push_back(q);
            }
        }
    }

    std::vector<int> node_of(skel.size(), -1);
    auto add_node = [&](Pixel p, NodeKind kind) {
        node_of[flat(W, p.row, p.col)] = static_cast<int>(g.nodes.size());
        g.nodes.push_back({p, kind});
        g.incidence.emplace_back();
    };
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!skel.at(r, c)) continue;
            const auto deg = adj[flat(W, r, c)].size();
            if (deg == 0) add_node({r, c}, NodeKind::Isolated);
            else if (deg == 1) add_node({r, c}, NodeKind::Endpoint);
            else if (deg >= 3) add_node({r, c}, NodeKind::Junction);
        }
    }

    std::unordered_set<std::uint64_t> used_links;
    auto link_key = [&](Pixel p, Pixel q) {
        auto a = static_cast<std::uint64_t>(flat(W, p.row, p.col));
        auto b = static_cast<std::uint64_t>(flat(W, q.row, q.col));
        if (a > b) std::swap(a, b);
        return (a << 32) | b;
    };
    std::vector<bool> visited(skel.size(), false);

    auto trace = [&](int start_node, Pixel first) {
        const Pixel origin = g.nodes[static_cast<std::size_t>(start_node)].pos;
        GraphEdge e;
        e.a = start_node;
        e.chain = {origin, first};
        used_links.insert(link_key(origin, first));
        Pixel prev = origin, cur = first;
        while (node_of[flat(W, cur.row, cur.col)] < 0) {
            visited[flat(W, cur.row, cur.col)] = true;
            const auto& nb = adj[flat(W, cur.row, cur.col)];
            const Pixel next = (nb[0] == prev) ? nb[1] : nb[0];
            used_links.insert(link_key(cur, next));
            e.chain.push_back(next);
            prev = cur;
            cur = next;
        }
        e.b = node_of[flat(W, cur.row, cur.col)];
        e.length = e.chain.size() - (e.a == e.b ? 1 : 0);
        const int id = static_cast<int>(g.edges.size());
        g.incidence[static_cast<std::size_t>(e.a)].push_back(id);
        g.incidence[static_cast<std::size_t>(e.b)].push_back(id);
        g.edges.push_back(std::move(e));
    };

    const std::size_t base_nodes = g.nodes.size();
    for (std::size_t n = 0; n < base_nodes; ++n) {
        const Pixel p = g.nodes[n].pos;
        for (const Pixel& q : adj[flat(W, p.row, p.col)]) {
            if (!used_links.contains(link_key(p, q))) trace(static_cast<int>(n), q);
        }
    }
    // Remaining unvisited pixels lie on node-free cycles.
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!skel.at(r, c) || visited[flat(W, r, c)] || node_of[flat(W, r, c)] >= 0) continue;
            add_node({r, c}, NodeKind::LoopAnchor);
            trace(node_of[flat(W, r, c)], adj[flat(W, r, c)].front());
        }
    }
    return g;
}

// --- FAZ -----------------------------------------------------------------------

std::vector<Pixel> trace_outer_contour(const BinaryMask& region, Pixel start) {
    auto inside = [&](Pixel p) { return region.at_or_false(p.row, p.col); };
    auto dir_index = [](int dr, int dc) {
        for (int i = 0; i < 8; ++i) {
            if (kN8[static_cast<std::size_t>(i)].row == dr && kN8[static_cast<std::size_t>(i)].col == dc) return i;
        }
        return -1;
    };
    std::vector<Pixel> contour{start};
    Pixel cur = start;
    int back = 6;  // west of the first raster pixel is outside
    int first_move = -1;
    for (std::size_t guard = 0; guard < 4 * region.size() + 8; ++guard) {
        int move = -1;
        Pixel last_out{};
        for (int i = 1; i <= 8; ++i) {
            const int d = (back + i) % 8;
            const Pixel q{cur.row + kN8[static_cast<std::size_t>(d)].row, cur.col + kN8[static_cast<std::size_t>(d)].col};
            if (inside(q)) {
                move = d;
                break;
            }
            last_out = q;
        }
        if (move < 0) break;  // isolated pixel
        if (cur == start && move == first_move) break;
        if (first_move < 0) first_move = move;
        const Pixel next{cur.row + kN8[static_cast<std::size_t>(move)].row, cur.col + kN8[static_cast<std::size_t>(move)].col};
        // The last outside cell checked becomes the backtrack position for the next step.
        if (move == (back + 1) % 8) {
            last_out = {cur.row + kN8[static_cast<std::size_t>(back)].row, cur.col + kN8[static_cast<std::size_t>(back)].col};
        }
        back = dir_index(last_out.row - next.row, last_out.col - next.col);
        cur = next;
        contour.push_back(cur);
    }
    if (contour.back() != start) contour.push_back(start);
    return contour;
}

double contour_length(const std::vector<Pixel>& closed) {
    double len = 0.0;
    for (std::size_t i = 1; i < closed.size(); ++i) {
        const int dr = std::abs(closed[i].row - closed[i - 1].row);
        const int dc = std::abs(closed[i].col - closed[i - 1].col);
        len += (dr != 0 && dc != 0) ? std::sqrt(2.0) : static_cast<double>(dr + dc);
    }
    return len;
}

FazRegion detect_faz(const BinaryMask& skeleton) {
    const int W = skeleton.width(), H = skeleton.height();
    const auto faces = connected_components(mask_complement(skeleton), Connectivity::Four);
    std::vector<bool> touches(static_cast<std::size_t>(faces.count) + 1, false);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (r == 0 || c == 0 || r == H - 1 || c == W - 1) touches[static_cast<std::size_t>(faces.at(r, c))] = true;
        }
    }
    const auto sizes = faces.sizes();
    int best = 0;
    for (int l = 1; l <= faces.count; ++l) {
        if (touches[static_cast<std::size_t>(l)]) continue;
        if (best == 0 || sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
    }
    if (best == 0) throw NoLoopError("skeleton encloses no bounded face");

    BinaryMask region(W, H);
    Pixel first{-1, -1};
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (faces.at(r, c) != best) continue;
            region.set(r, c, true);
            if (first.row < 0) first = {r, c};
        }
    }
    FazRegion faz;
    faz.face_id = best;
    faz.area = static_cast<double>(sizes[static_cast<std::size_t>(best)]);
    faz.boundary = trace_outer_contour(region, first);
    faz.perimeter = contour_length(faz.boundary);
    return faz;
}

}  // namespace octaseg
