#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tagnn {

// Seeded generator with fixed, implementation-independent draw algorithms so
// that runs reproduce bit-exactly across platforms and standard libraries.
// One instance drives parameter init, shuffling, dropout, and data synthesis.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform in [0,1) with 53-bit resolution
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    std::size_t index(std::size_t n);

    // Fisher-Yates; spelled out instead of std::shuffle to pin the draw order
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::string serialize() const;
    void deserialize(const std::string& s);

private:
    std::mt19937_64 gen_;
};

}  // namespace tagnn
