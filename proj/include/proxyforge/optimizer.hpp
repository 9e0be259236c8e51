#pragma once

#include <cstdint>
#include <vector>

namespace proxyforge {

// Per-group AdamW hyperparameters; lr is the effective rate for the step.
struct GroupConfig {
    double lr = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Optimizer defaults for the three parameter groups plus the schedule knobs.
struct OptimizerConfig {
    GroupConfig trunk{1e-5, 0.2, 0.9, 0.999, 1e-8};
    GroupConfig fc{1e-3, 0.001, 0.9, 0.999, 1e-8};
    GroupConfig proxy{50.0, 0.0, 0.9, 0.999, 1.0};
    int epochs = 25;
    int plateau_patience = 4;
    double plateau_factor = 0.25;
    double sigma = 0.06;
};

// First/second moments plus the shared step counter for one group.
struct AdamWState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

// Decoupled-weight-decay Adam with bias correction:
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
//   p -= lr * (mhat / (sqrt(vhat) + eps) + wd * p)
// state moments are lazily sized on the first call.
void adamw_step(const std::vector<double*>& params, const std::vector<double>& grads,
                AdamWState& state, const GroupConfig& cfg);

// Convenience overload for contiguous parameter vectors.
void adamw_step(std::vector<double>& params, const std::vector<double>& grads, AdamWState& state,
                const GroupConfig& cfg);

struct LearningRates {
    double trunk = 0.0;
    double fc = 0.0;
    double proxy = 0.0;
};

// Reduce-on-plateau over a minimized quantity: a report strictly below the
// best seen resets the wait counter; once wait exceeds patience, all rates
// are multiplied by factor (rates never increase).
class PlateauScheduler {
  public:
    PlateauScheduler(LearningRates initial, int patience, double factor);

    // Returns true when this report triggered a reduction.
    bool report(double value);

    const LearningRates& rates() const { return rates_; }
    int wait() const { return wait_; }
    double best() const { return best_; }
    bool has_best() const { return has_best_; }

    // For exact checkpoint resume.
    void restore(LearningRates rates, double best, bool has_best, int wait);

  private:
    LearningRates rates_;
    int patience_;
    double factor_;
    double best_ = 0.0;
    bool has_best_ = false;
    int wait_ = 0;
};

} // namespace proxyforge
