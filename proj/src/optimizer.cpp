#include "proxyforge/optimizer.hpp"

#include <cmath>

#include "proxyforge/errors.hpp"

namespace proxyforge {

void adamw_step(const std::vector<double*>& params, const std::vector<double>& grads,
                AdamWState& state, const GroupConfig& cfg) {
    if (params.size() != grads.size()) {
        throw CountMismatchError("adamw: " + std::to_string(params.size()) + " params vs " +
                                 std::to_string(grads.size()) + " grads");
    }
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw CountMismatchError("adamw: state size does not match parameter count");
    }

    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        double& p = *params[i];
        p -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * p);
    }
}

void adamw_step(std::vector<double>& params, const std::vector<double>& grads, AdamWState& state,
                const GroupConfig& cfg) {
    std::vector<double*> ptrs;
    ptrs.reserve(params.size());
    for (double& p : params) ptrs.push_back(&p);
    adamw_step(ptrs, grads, state, cfg);
}

PlateauScheduler::PlateauScheduler(LearningRates initial, int patience, double factor)
    : rates_(initial), patience_(patience), factor_(factor) {
    if (patience < 0) throw ValidationError("scheduler: patience must be nonnegative");
    if (!(factor > 0.0) || factor > 1.0) {
        throw ValidationError("scheduler: factor must be in (0, 1]");
    }
}

bool PlateauScheduler::report(double value) {
    if (!std::isfinite(value)) throw ValidationError("scheduler: monitored value must be finite");
    if (!has_best_ || value < best_) {
        best_ = value;
        has_best_ = true;
        wait_ = 0;
        return false;
    }
    ++wait_;
    if (wait_ > patience_) {
        rates_.trunk *= factor_;
        rates_.fc *= factor_;
        rates_.proxy *= factor_;
        wait_ = 0;
        return true;
    }
    return false;
}

void PlateauScheduler::restore(LearningRates rates, double best, bool has_best, int wait) {
    rates_ = rates;
    best_ = best;
    has_best_ = has_best;
    wait_ = wait;
}

} // namespace proxyforge
