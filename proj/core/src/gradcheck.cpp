#include "tagnn/gradcheck.hpp"

#include <cmath>
#include <vector>

#include "tagnn/errors.hpp"
#include "tagnn/rng.hpp"

namespace tagnn {

GradCheckResult gradient_check(const std::function<double(const ParamSet&)>& loss_fn,
                               const std::function<void(const ParamSet&, GradStore&)>& grad_fn,
                               ParamSet& params, double eps, std::size_t max_coords,
                               std::uint64_t seed) {
    if (eps <= 0.0) throw ContractError("gradient_check: eps must be positive");

    GradStore grads(params);
    grads.zero();
    grad_fn(params, grads);

    // flat coordinate index -> (param, element)
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    const std::size_t total = params.total_scalars();
    coords.reserve(std::min(total, max_coords));
    if (total <= max_coords) {
        for (std::size_t p = 0; p < params.count(); ++p)
            for (std::size_t i = 0; i < params.value(p).numel(); ++i) coords.emplace_back(p, i);
    } else {
        Rng rng(seed);
        for (std::size_t k = 0; k < max_coords; ++k) {
            std::size_t flat = rng.index(total);
            std::size_t p = 0;
            while (flat >= params.value(p).numel()) {
                flat -= params.value(p).numel();
                ++p;
            }
            coords.emplace_back(p, flat);
        }
    }

    GradCheckResult res;
    res.coords_checked = coords.size();
    for (auto [p, i] : coords) {
        double& w = params.value(p).data()[i];
        const double orig = w;
        w = orig + eps;
        const double fp = loss_fn(params);
        w = orig - eps;
        const double fm = loss_fn(params);
        w = orig;
        const double fd = (fp - fm) / (2.0 * eps);
        const double ad = grads[p].data()[i];
        const double denom = std::max(std::abs(fd) + std::abs(ad), 1e-3);
        const double rel = std::abs(fd - ad) / denom;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_param = params.name(p);
            res.worst_index = i;
        }
    }
    return res;
}

}  // namespace tagnn
