#include "tagnn/adam.hpp"

#include <cmath>

#include "tagnn/errors.hpp"

namespace tagnn {

AdamState::AdamState(const ParamSet& params, AdamConfig cfg) : cfg_(cfg) {
    m_.reserve(params.count());
    v_.reserve(params.count());
    for (std::size_t i = 0; i < params.count(); ++i) {
        m_.emplace_back(params.value(i).shape());
        v_.emplace_back(params.value(i).shape());
    }
}

void AdamState::step(ParamSet& params, const GradStore& grads, double lr) {
    if (grads.count() != params.count() || m_.size() != params.count())
        throw StructuralError("adam: gradient/moment layout does not match parameters");
    t_ += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.count(); ++p) {
        Array& w = params.value(p);
        const Array& g = grads[p];
        if (!w.same_shape(g))
            throw StructuralError("adam: gradient shape " + g.shape_str() + " vs parameter '" +
                                  params.name(p) + "' " + w.shape_str());
        double* wd = w.data();
        const double* gd = g.data();
        double* md = m_[p].data();
        double* vd = v_[p].data();
        for (std::size_t i = 0; i < w.numel(); ++i) {
            double gi = gd[i];
            if (!std::isfinite(gi))
                throw TrainingError("adam: non-finite gradient in parameter '" + params.name(p) +
                                    "' at element " + std::to_string(i));
            if (cfg_.weight_decay != 0.0) gi += cfg_.weight_decay * wd[i];
            md[i] = cfg_.beta1 * md[i] + (1.0 - cfg_.beta1) * gi;
            vd[i] = cfg_.beta2 * vd[i] + (1.0 - cfg_.beta2) * gi * gi;
            const double mhat = md[i] / bc1;
            const double vhat = vd[i] / bc2;
            wd[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

}  // namespace tagnn
