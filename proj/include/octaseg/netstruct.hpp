#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "octaseg/image.hpp"

namespace octaseg {

enum class Connectivity { Four = 4, Eight = 8 };

struct ComponentLabels {
    int width{};
    int height{};
    /// 0 = background, otherwise 1..count in raster order of first pixel.
    std::vector<int> labels;
    int count{};

    int at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
    /// Pixel count per label; index 0 is unused.
    std::vector<std::size_t> sizes() const;
};

ComponentLabels connected_components(const BinaryMask& mask, Connectivity conn = Connectivity::Eight);

/// Discrete Euclidean disc: offsets with dx^2 + dy^2 <= radius^2.
std::vector<Pixel> disc_offsets(double radius);
BinaryMask dilate_disc(const BinaryMask& mask, double radius);

/// 8-connected foreground / 4-connected background topology.
struct BettiPair {
    int b0{};
    int b1{};
    friend bool operator==(const BettiPair&, const BettiPair&) = default;
};

BettiPair betti_numbers(const BinaryMask& mask);

/// True when deleting the pixel preserves (8,4) topology (both crossing counts are 1).
bool is_simple_point(const BinaryMask& mask, int row, int col);

/**
 * Homotopy-preserving thinning to a fixpoint. Border pixels are examined in
 * four directional sub-passes (N, S, E, W); within a pass candidates are
 * removed one at a time and only while they stay simple, so no step can
 * change the Betti numbers. Endpoints (exactly one 8-neighbour) are kept.
 */
BinaryMask skeletonize(const BinaryMask& mask);

/// Pixel count of the largest 8-connected component (0 when empty).
std::size_t largest_component_length(const BinaryMask& skeleton);

enum class NodeKind { Endpoint, Junction, Isolated, LoopAnchor };

struct GraphNode {
    Pixel pos;
    NodeKind kind;
};

struct GraphEdge {
    int a{};
    int b{};
    /// Pixel chain from node a to node b, both end pixels included; a
    /// self-loop starts and ends at its anchor.
    std::vector<Pixel> chain;
    /// Distinct pixels on the chain.
    std::size_t length{};
};

/// Undirected multigraph over a skeleton.
struct VesselGraph {
    int width{};
    int height{};
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    /// Edge ids incident to each node (a self-loop appears twice).
    std::vector<std::vector<int>> incidence;

    int component_count() const;
    /// edges - nodes + components
    int cycle_rank() const;
};

/**
 * Pixels are linked by m-adjacency (diagonal links only where both shared
 * 4-neighbours are background), and inside fully set 2x2 blocks the bottom
 * link is dropped. On this pixel graph the cycle rank equals b1 of the
 * skeleton. Nodes are pixels of graph degree != 2; maximal degree-2 runs
 * become edges, and a cycle without nodes gets one pixel promoted to a
 * LoopAnchor carrying a self-loop.
 */
VesselGraph skeleton_to_graph(const BinaryMask& skeleton);

class NoLoopError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FazRegion {
    double area{};
    double perimeter{};
    /// Closed 8-connected outer contour of the face, first pixel repeated at the end.
    std::vector<Pixel> boundary;
    /// Label of the face among the 4-connected background components.
    int face_id{};
};

/// Largest bounded 4-connected background component of the skeleton raster.
FazRegion detect_faz(const BinaryMask& skeleton);

/// Moore-neighbour trace of the outer contour of the component containing start
/// (start must be its first pixel in raster order). Length uses unit axis
/// steps and sqrt(2) diagonal steps.
std::vector<Pixel> trace_outer_contour(const BinaryMask& region, Pixel start);
double contour_length(const std::vector<Pixel>& closed_contour);

}  // namespace octaseg
