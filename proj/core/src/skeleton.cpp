#include "tagnn/skeleton.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "tagnn/errors.hpp"

namespace tagnn {

std::string layout_name(Layout l) {
    return l == Layout::Vrhands14 ? "vrhands14" : "reinterhand21";
}

Layout parse_layout(const std::string& s) {
    if (s == "vrhands14") return Layout::Vrhands14;
    if (s == "reinterhand21") return Layout::Reinterhand21;
    throw ConfigError("unknown layout '" + s + "' (expected vrhands14 or reinterhand21)");
}

HandSkeleton HandSkeleton::vrhands14() {
    // Finger i in [1,5] from thumb to little, phalanx j in [1,3] from palm to
    // fingertip; the thumb carries two recorded joints. Chains are not
    // connected at the palm.
    std::vector<std::string> joints = {"J11", "J12", "J21", "J22", "J23", "J31", "J32",
                                       "J33", "J41", "J42", "J43", "J51", "J52", "J53"};
    std::vector<std::pair<std::string, std::string>> edges = {{"J11", "J12"}};
    for (int finger = 2; finger <= 5; ++finger) {
        const std::string f = std::to_string(finger);
        edges.emplace_back("J" + f + "1", "J" + f + "2");
        edges.emplace_back("J" + f + "2", "J" + f + "3");
    }
    return custom(std::move(joints), std::move(edges));
}

HandSkeleton HandSkeleton::reinterhand21() {
    // Wrist-rooted keypoint layout: five 4-joint chains hanging off the wrist.
    const char* fingers[] = {"Thumb", "Index", "Middle", "Ring", "Little"};
    std::vector<std::string> joints = {"Wrist"};
    std::vector<std::pair<std::string, std::string>> edges;
    for (const char* f : fingers) {
        std::string prev = "Wrist";
        for (int k = 1; k <= 4; ++k) {
            std::string j = std::string(f) + std::to_string(k);
            joints.push_back(j);
            edges.emplace_back(prev, j);
            prev = std::move(j);
        }
    }
    return custom(std::move(joints), std::move(edges));
}

HandSkeleton HandSkeleton::custom(std::vector<std::string> joints,
                                  std::vector<std::pair<std::string, std::string>> edges) {
    HandSkeleton s;
    std::unordered_map<std::string, std::uint32_t> idx;
    for (std::size_t i = 0; i < joints.size(); ++i) {
        if (idx.count(joints[i]))
            throw ContractError("skeleton: duplicate joint '" + joints[i] + "'");
        idx.emplace(joints[i], static_cast<std::uint32_t>(i));
    }
    s.joints_ = std::move(joints);
    for (const auto& [a, b] : edges) {
        auto ia = idx.find(a);
        auto ib = idx.find(b);
        if (ia == idx.end() || ib == idx.end())
            throw ContractError("skeleton: edge references unknown joint '" +
                                (ia == idx.end() ? a : b) + "'");
        if (ia->second == ib->second)
            throw ContractError("skeleton: self-edge on joint '" + a + "'");
        s.edges_.emplace_back(ia->second, ib->second);
    }
    return s;
}

HandSkeleton build_skeleton(Layout layout) {
    return layout == Layout::Vrhands14 ? HandSkeleton::vrhands14()
                                       : HandSkeleton::reinterhand21();
}

std::vector<std::string> HandSkeleton::channel_names() const {
    static const char* axes[] = {"_x", "_y", "_z"};
    std::vector<std::string> names;
    names.reserve(joints_.size() * 3);
    for (const std::string& j : joints_)
        for (const char* a : axes) names.push_back(j + a);
    return names;
}

std::string HandSkeleton::to_string() const {
    std::ostringstream os;
    os << "joints";
    for (const std::string& j : joints_) os << ' ' << j;
    os << "\nedges";
    for (const auto& [a, b] : edges_) os << ' ' << joints_[a] << ':' << joints_[b];
    os << '\n';
    return os.str();
}

HandSkeleton HandSkeleton::parse(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    if (!(is >> tag) || tag != "joints")
        throw IngestionError("skeleton: expected 'joints' section");
    std::vector<std::string> joints;
    std::string tok;
    while (is >> tok && tok != "edges") joints.push_back(tok);
    if (tok != "edges") throw IngestionError("skeleton: expected 'edges' section");
    std::vector<std::pair<std::string, std::string>> edges;
    while (is >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw IngestionError("skeleton: malformed edge '" + tok + "'");
        edges.emplace_back(tok.substr(0, colon), tok.substr(colon + 1));
    }
    return custom(std::move(joints), std::move(edges));
}

Array raw_adjacency(const HandSkeleton& skel) {
    const std::size_t j = skel.joint_count();
    Array a({j, j});
    for (std::size_t i = 0; i < j; ++i) a.at(i, i) = 1.0;
    for (const auto& [p, q] : skel.edges()) {
        a.at(p, q) = 1.0;
        a.at(q, p) = 1.0;
    }
    return a;
}

Array normalized_adjacency(const HandSkeleton& skel) {
    const std::size_t j = skel.joint_count();
    Array a = raw_adjacency(skel);
    std::vector<double> dinv(j);
    for (std::size_t i = 0; i < j; ++i) {
        double deg = 0.0;
        for (std::size_t k = 0; k < j; ++k) deg += a.at(i, k);
        dinv[i] = 1.0 / std::sqrt(deg);
    }
    for (std::size_t i = 0; i < j; ++i)
        for (std::size_t k = 0; k < j; ++k) a.at(i, k) *= dinv[i] * dinv[k];
    return a;
}

}  // namespace tagnn
