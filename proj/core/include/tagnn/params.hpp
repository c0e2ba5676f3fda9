#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tagnn/array.hpp"

namespace tagnn {

// Ordered, named collection of learnable arrays. Registration order is the
// canonical iteration order for optimizer updates and serialization, which
// keeps every reduction deterministic.
class ParamSet {
public:
    std::size_t add(std::string name, Array value);

    std::size_t count() const { return entries_.size(); }
    std::size_t total_scalars() const;

    const std::string& name(std::size_t i) const { return names_[i]; }
    Array& value(std::size_t i) { return entries_[i]; }
    const Array& value(std::size_t i) const { return entries_[i]; }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    std::size_t index_of(const std::string& name) const;
    Array& at(const std::string& name) { return entries_[index_of(name)]; }
    const Array& at(const std::string& name) const { return entries_[index_of(name)]; }

private:
    std::vector<Array> entries_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Gradient accumulators parallel to a ParamSet.
class GradStore {
public:
    explicit GradStore(const ParamSet& params);
    GradStore() = default;

    void zero();
    Array& operator[](std::size_t i) { return grads_[i]; }
    const Array& operator[](std::size_t i) const { return grads_[i]; }
    std::size_t count() const { return grads_.size(); }

private:
    std::vector<Array> grads_;
};

}  // namespace tagnn
