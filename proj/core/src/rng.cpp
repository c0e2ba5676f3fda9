#include "tagnn/rng.hpp"

#include <sstream>

#include "tagnn/errors.hpp"

namespace tagnn {

std::size_t Rng::index(std::size_t n) {
    if (n == 0) return 0;
    // rejection sampling keeps the distribution exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

std::string Rng::serialize() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
}

void Rng::deserialize(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
    if (is.fail()) throw IoError("rng: malformed serialized generator state");
}

}  // namespace tagnn
