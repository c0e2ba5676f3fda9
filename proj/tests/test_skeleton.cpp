#include <doctest.h>

#include <cmath>

#include "tagnn/rng.hpp"
#include "tagnn/skeleton.hpp"

using namespace tagnn;

TEST_CASE("vrhands layout: 14 joints in five unconnected chains") {
    const HandSkeleton s = HandSkeleton::vrhands14();
    CHECK(s.joint_count() == 14);
    // one thumb edge plus two edges for each of the four fingers
    CHECK(s.edge_count() == 9);
    CHECK(s.joints().front() == "J11");
    CHECK(s.joints().back() == "J53");
    CHECK(s.channel_names().size() == 42);
    CHECK(s.channel_names()[0] == "J11_x");
    CHECK(s.channel_names()[5] == "J12_z");
}

TEST_CASE("reinterhand layout: 21 joints, 20 edges from the wrist root") {
    const HandSkeleton s = HandSkeleton::reinterhand21();
    CHECK(s.joint_count() == 21);
    CHECK(s.edge_count() == 20);
    CHECK(s.channel_names().size() == 63);
}

TEST_CASE("custom single joint is a valid one-node skeleton") {
    const HandSkeleton s = HandSkeleton::custom({"only"}, {});
    CHECK(s.joint_count() == 1);
    CHECK(s.edge_count() == 0);
    const Array a = normalized_adjacency(s);
    CHECK(a.numel() == 1);
    CHECK(a[0] == doctest::Approx(1.0));
}

TEST_CASE("custom edges referencing unknown joints fail") {
    CHECK_THROWS_WITH_AS(HandSkeleton::custom({"a", "b"}, {{"a", "zz"}}),
                         doctest::Contains("zz"), ContractError);
}

TEST_CASE("two-node chain normalizes to one half everywhere") {
    const HandSkeleton s = HandSkeleton::custom({"a", "b"}, {{"a", "b"}});
    const Array a = normalized_adjacency(s);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("a constant vector is a unit eigenvector of the two-node chain") {
    const HandSkeleton s = HandSkeleton::custom({"a", "b"}, {{"a", "b"}});
    const Array a = normalized_adjacency(s);
    // A_hat * [1,1]^T = [1,1]^T
    CHECK(a.at(0, 0) + a.at(0, 1) == doctest::Approx(1.0));
    CHECK(a.at(1, 0) + a.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("vrhands normalized adjacency: symmetry, support, hand-checked entry") {
    const HandSkeleton s = HandSkeleton::vrhands14();
    const Array a = normalized_adjacency(s);
    const std::size_t j = s.joint_count();
    for (std::size_t r = 0; r < j; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < j; ++c) {
            CHECK(a.at(r, c) == a.at(c, r));
            CHECK(a.at(r, c) >= 0.0);
            row_sum += a.at(r, c);
        }
        CHECK(row_sum > 0.0);
    }
    // J21 (index 2) has self-loop degree 2, J22 (index 3) degree 3
    CHECK(a.at(2, 3) == doctest::Approx(1.0 / std::sqrt(2.0 * 3.0)).epsilon(1e-12));
    // support is exactly self-loops plus skeletal edges
    CHECK(a.at(0, 1) > 0.0);   // J11-J12
    CHECK(a.at(0, 2) == 0.0);  // thumb does not touch the index finger
    CHECK(a.at(1, 2) == 0.0);
}

TEST_CASE("spectral radius of the normalized adjacency is at most one") {
    const Array a = normalized_adjacency(HandSkeleton::vrhands14());
    const std::size_t j = a.extent(0);
    Rng rng(2);
    std::vector<double> v(j);
    for (double& x : v) x = rng.uniform(0.1, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::vector<double> w(j, 0.0);
        for (std::size_t r = 0; r < j; ++r)
            for (std::size_t c = 0; c < j; ++c) w[r] += a.at(r, c) * v[c];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        lambda = norm;
        for (std::size_t r = 0; r < j; ++r) v[r] = w[r] / norm;
    }
    CHECK(lambda <= 1.0 + 1e-12);
}

TEST_CASE("raw adjacency keeps self-loops so isolated joints pass through") {
    const HandSkeleton s = HandSkeleton::custom({"only"}, {});
    const Array a = raw_adjacency(s);
    CHECK(a[0] == 1.0);
}

TEST_CASE("serialization round trip preserves joint ordering") {
    const HandSkeleton s = HandSkeleton::vrhands14();
    const HandSkeleton r = HandSkeleton::parse(s.to_string());
    CHECK(r.joints() == s.joints());
    CHECK(r.edges() == s.edges());
}

TEST_CASE("layout parsing") {
    CHECK(parse_layout("vrhands14") == Layout::Vrhands14);
    CHECK(parse_layout("reinterhand21") == Layout::Reinterhand21);
    CHECK_THROWS_AS(parse_layout("bogus"), ConfigError);
}
