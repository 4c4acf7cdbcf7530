#include <doctest.h>

#include <algorithm>
#include <map>
#include <numbers>
#include <random>

#include "octaseg/netstruct.hpp"
#include "support.hpp"

using namespace octaseg;
using testing::mask_from;

TEST_CASE("connected components on small cases") {
    CHECK(connected_components(BinaryMask(6, 4)).count == 0);

    const BinaryMask checker = mask_from({"#.", ".#"});
    CHECK(connected_components(checker, Connectivity::Eight).count == 1);
    CHECK(connected_components(checker, Connectivity::Four).count == 2);
}

TEST_CASE("connected components match flood fill on random masks") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const BinaryMask m = testing::random_mask(32, 32, 0.2 + 0.006 * i, rng);
        std::vector<int> oracle;
        const int n8 = testing::flood_count(m, true, 8, &oracle);
        const ComponentLabels lab = connected_components(m, Connectivity::Eight);
        REQUIRE(lab.count == n8);
        // same partition: label pairs map one to one
        std::map<int, int> fwd;
        for (std::size_t k = 0; k < oracle.size(); ++k) {
            if (oracle[k] == 0) {
                CHECK(lab.labels[k] == 0);
                continue;
            }
            auto [it, fresh] = fwd.emplace(oracle[k], lab.labels[k]);
            if (!fresh) CHECK(it->second == lab.labels[k]);
        }
        CHECK(connected_components(m, Connectivity::Four).count == testing::flood_count(m, true, 4));
    }
}

TEST_CASE("dilate_disc") {
    BinaryMask dot(7, 7);
    dot.set(3, 3, true);
    const BinaryMask plus = dilate_disc(dot, 1.0);
    CHECK(plus.count() == 5);
    CHECK(plus == mask_from({".......", ".......", "...#...", "..###..", "...#...", ".......", "......."}));
    CHECK(dilate_disc(dot, 0.0) == dot);
    CHECK_THROWS(dilate_disc(dot, -1.0));

    std::mt19937_64 rng(5);
    for (double radius : {1.0, 1.5, 2.0, 2.9}) {
        const BinaryMask m = testing::random_mask(20, 17, 0.05, rng);
        const BinaryMask d = dilate_disc(m, radius);
        for (int r = 0; r < m.height(); ++r) {
            for (int c = 0; c < m.width(); ++c) {
                double best = 1e9;
                for (int rr = 0; rr < m.height(); ++rr) {
                    for (int cc = 0; cc < m.width(); ++cc) {
                        if (m.at(rr, cc)) best = std::min(best, std::hypot(rr - r, cc - c));
                    }
                }
                CHECK(d.at(r, c) == (best <= radius));
            }
        }
    }
}

TEST_CASE("betti numbers of simple shapes") {
    BinaryMask square(7, 7);
    for (int r = 1; r < 6; ++r) {
        for (int c = 1; c < 6; ++c) square.set(r, c, true);
    }
    CHECK(betti_numbers(square) == BettiPair{1, 0});

    const BinaryMask ring = mask_from({".....", ".###.", ".#.#.", ".###.", "....."});
    CHECK(betti_numbers(ring) == BettiPair{1, 1});

    // diagonal gaps do not open a hole under 8/4 duality
    const BinaryMask diamond = mask_from({"..#..", ".#.#.", "..#.."});
    CHECK(betti_numbers(diamond) == BettiPair{1, 1});

    // a background region touching the border is not a hole
    const BinaryMask cup = mask_from({"#.#", "#.#", "###"});
    CHECK(betti_numbers(cup) == BettiPair{1, 0});
}

TEST_CASE("betti b1 matches the Euler characteristic on random masks") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const BinaryMask m = testing::random_mask(32, 32, 0.1 + 0.8 * (i % 50) / 49.0, rng);
        const BettiPair b = betti_numbers(m);
        const int b0 = testing::flood_count(m, true, 8);
        CHECK(b.b0 == b0);
        CHECK(b.b1 == b0 - testing::euler_closed_squares(m));
    }
}

TEST_CASE("skeleton basics") {
    BinaryMask dot(5, 5);
    dot.set(2, 2, true);
    CHECK(skeletonize(dot) == dot);
    CHECK(skeletonize(BinaryMask(4, 4)).count() == 0);

    BinaryMask bar(36, 9);
    for (int r = 3; r < 6; ++r) {
        for (int c = 3; c < 33; ++c) bar.set(r, c, true);
    }
    const BinaryMask sk = skeletonize(bar);
    CHECK(connected_components(sk).count == 1);
    // one pixel per column along the bar's interior
    for (int c = 5; c < 31; ++c) {
        int n = 0;
        for (int r = 0; r < 9; ++r) n += sk.at(r, c) ? 1 : 0;
        CHECK(n == 1);
    }
}

TEST_CASE("skeletons are thin, stable and homotopic") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 60; ++i) {
        const BinaryMask m = testing::random_blobs(40, 40, rng);
        const BinaryMask sk = skeletonize(m);
        CHECK(betti_numbers(sk) == betti_numbers(m));
        CHECK(skeletonize(sk) == sk);
        for (std::size_t k = 0; k < sk.size(); ++k) {
            if (sk[k]) CHECK(m[k]);
        }
        // nothing left that thinning could still remove
        for (int r = 0; r < sk.height(); ++r) {
            for (int c = 0; c < sk.width(); ++c) {
                if (!sk.at(r, c)) continue;
                int nb = 0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) nb += (dr || dc) && sk.at_or_false(r + dr, c + dc);
                }
                if (nb > 1) CHECK_FALSE(is_simple_point(sk, r, c));
            }
        }
    }
}

TEST_CASE("largest component length") {
    BinaryMask m(60, 5);
    for (int c = 0; c < 40; ++c) m.set(1, c, true);
    for (int c = 45; c < 52; ++c) m.set(3, c, true);
    CHECK(largest_component_length(m) == 40);
    CHECK(largest_component_length(BinaryMask(3, 3)) == 0);

    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
        const BinaryMask sk = skeletonize(testing::random_blobs(32, 32, rng));
        std::vector<int> lab;
        const int n = testing::flood_count(sk, true, 8, &lab);
        std::vector<std::size_t> sizes(static_cast<std::size_t>(n) + 1, 0);
        for (int l : lab) {
            if (l) ++sizes[static_cast<std::size_t>(l)];
        }
        sizes[0] = 0;
        CHECK(largest_component_length(sk) == *std::max_element(sizes.begin(), sizes.end()));
    }
}

TEST_CASE("graph of a straight chain and a plus sign") {
    BinaryMask chain(14, 3);
    for (int c = 2; c < 12; ++c) chain.set(1, c, true);
    const VesselGraph g = skeleton_to_graph(chain);
    REQUIRE(g.nodes.size() == 2);
    CHECK(g.nodes[0].kind == NodeKind::Endpoint);
    CHECK(g.nodes[1].kind == NodeKind::Endpoint);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].length == 10);

    const BinaryMask plus = mask_from({"..#..", "..#..", "#####", "..#..", "..#.."});
    const VesselGraph p = skeleton_to_graph(plus);
    const auto junctions = std::count_if(p.nodes.begin(), p.nodes.end(),
                                         [](const GraphNode& n) { return n.kind == NodeKind::Junction; });
    const auto ends = std::count_if(p.nodes.begin(), p.nodes.end(),
                                    [](const GraphNode& n) { return n.kind == NodeKind::Endpoint; });
    CHECK(junctions == 1);
    CHECK(ends == 4);
    CHECK(p.edges.size() == 4);
}

TEST_CASE("a lone cycle becomes a self-loop") {
    const BinaryMask ring = mask_from({"......", ".####.", ".#..#.", ".#..#.", ".####.", "......"});
    const VesselGraph g = skeleton_to_graph(ring);
    REQUIRE(g.nodes.size() == 1);
    CHECK(g.nodes[0].kind == NodeKind::LoopAnchor);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].a == g.edges[0].b);
    CHECK(g.edges[0].length == 12);
    CHECK(g.cycle_rank() == 1);
}

TEST_CASE("graph cycle rank equals b1 and every pixel is covered") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 80; ++i) {
        const BinaryMask sk = skeletonize(testing::random_blobs(40, 40, rng));
        const VesselGraph g = skeleton_to_graph(sk);
        CHECK(g.cycle_rank() == betti_numbers(sk).b1);
        CHECK(g.component_count() == betti_numbers(sk).b0);
        BinaryMask covered(sk.width(), sk.height());
        for (const auto& n : g.nodes) covered.set(n.pos.row, n.pos.col, true);
        for (const auto& e : g.edges) {
            for (const auto& px : e.chain) covered.set(px.row, px.col, true);
        }
        CHECK(covered == sk);
    }
}

TEST_CASE("FAZ of a square ring") {
    BinaryMask ring(16, 16);
    for (int k = 2; k <= 13; ++k) {
        ring.set(2, k, true);
        ring.set(13, k, true);
        ring.set(k, 2, true);
        ring.set(k, 13, true);
    }
    const FazRegion faz = detect_faz(ring);
    CHECK(faz.area == 100);
    // boundary pixels of a 10x10 block, all axis steps
    CHECK(faz.perimeter == doctest::Approx(36.0).epsilon(1e-12));
    CHECK(faz.boundary.front() == faz.boundary.back());
    CHECK(faz.boundary.front() == Pixel{3, 3});
}

TEST_CASE("FAZ picks the enlarged grid cell") {
    BinaryMask grid(41, 41);
    for (int p = 0; p < 41; p += 8) {
        for (int k = 0; k < 41; ++k) {
            grid.set(p, k, true);
            grid.set(k, p, true);
        }
    }
    // merge the four cells around (16, 16) by cutting the cross between them
    for (int k = 9; k <= 23; ++k) {
        grid.set(16, k, false);
        grid.set(k, 16, false);
    }
    const BinaryMask& sk = grid;
    const FazRegion faz = detect_faz(sk);

    std::vector<int> lab;
    testing::flood_count(sk, false, 4, &lab);
    const int centre_label = lab[static_cast<std::size_t>(16) * 41 + 16];
    const auto oracle = std::count(lab.begin(), lab.end(), centre_label);
    CHECK(faz.area == static_cast<double>(oracle));
    CHECK(faz.area == 225.0);
}

TEST_CASE("FAZ needs a loop") {
    BinaryMask arc(12, 12);
    for (int c = 1; c < 11; ++c) arc.set(5, c, true);
    for (int r = 1; r < 5; ++r) arc.set(r, 1, true);
    CHECK_THROWS_AS(detect_faz(arc), NoLoopError);
}

TEST_CASE("cutting a skeleton edge can only grow the face") {
    BinaryMask two(20, 11);
    for (int c = 1; c < 19; ++c) {
        two.set(1, c, true);
        two.set(9, c, true);
    }
    for (int r = 1; r < 10; ++r) {
        two.set(r, 1, true);
        two.set(r, 8, true);
        two.set(r, 18, true);
    }
    const double before = detect_faz(two).area;
    two.set(5, 8, false);
    CHECK(detect_faz(two).area > before);
}

TEST_CASE("contour length with diagonal steps") {
    const std::vector<Pixel> tri{{0, 0}, {1, 1}, {1, 0}, {0, 0}};
    CHECK(contour_length(tri) == doctest::Approx(2.0 + std::numbers::sqrt2).epsilon(1e-12));
}
