#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tagnn/array.hpp"

namespace tagnn {

enum class Layout { Vrhands14, Reinterhand21 };

std::string layout_name(Layout l);
Layout parse_layout(const std::string& s);

// Hand topology: ordered joints and undirected parent-child chain edges.
// Immutable after construction.
class HandSkeleton {
public:
    static HandSkeleton vrhands14();
    static HandSkeleton reinterhand21();
    static HandSkeleton custom(std::vector<std::string> joints,
                               std::vector<std::pair<std::string, std::string>> edges);

    std::size_t joint_count() const { return joints_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& joints() const { return joints_; }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

    // joint-major, axis-minor: J11_x, J11_y, J11_z, J12_x, ...
    std::vector<std::string> channel_names() const;

    std::string to_string() const;
    static HandSkeleton parse(const std::string& text);

private:
    std::vector<std::string> joints_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

HandSkeleton build_skeleton(Layout layout);

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I. Symmetric,
// nonnegative, spectral radius <= 1.
Array normalized_adjacency(const HandSkeleton& skel);

// Unnormalized skeletal adjacency with self-loops (A + I). Without the
// self-loops a joint's own features would vanish from its update.
Array raw_adjacency(const HandSkeleton& skel);

}  // namespace tagnn
