#include "tagnn/params.hpp"

#include "tagnn/errors.hpp"

namespace tagnn {

std::size_t ParamSet::add(std::string name, Array value) {
    if (index_.count(name))
        throw ContractError("params: duplicate parameter name '" + name + "'");
    const std::size_t i = entries_.size();
    index_.emplace(name, i);
    names_.push_back(std::move(name));
    entries_.push_back(std::move(value));
    return i;
}

std::size_t ParamSet::total_scalars() const {
    std::size_t n = 0;
    for (const Array& a : entries_) n += a.numel();
    return n;
}

std::size_t ParamSet::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractError("params: unknown parameter '" + name + "'");
    return it->second;
}

GradStore::GradStore(const ParamSet& params) {
    grads_.reserve(params.count());
    for (std::size_t i = 0; i < params.count(); ++i) grads_.emplace_back(params.value(i).shape());
}

void GradStore::zero() {
    for (Array& g : grads_) g.fill(0.0);
}

}  // namespace tagnn
