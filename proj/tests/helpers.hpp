#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "proxyforge/embedding.hpp"
#include "proxyforge/rng.hpp"

namespace testutil {

// |a - n| / max(|a|, |n|, floor): symmetric relative error with an absolute
// floor so near-zero pairs compare cleanly.
inline double rel_err(double analytic, double numeric, double floor = 1e-6) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

// Central finite difference of a scalar function along one coordinate slot.
inline double central_diff(const std::function<double()>& f, double& slot, double step = 1e-5) {
    const double orig = slot;
    slot = orig + step;
    const double hi = f();
    slot = orig - step;
    const double lo = f();
    slot = orig;
    return (hi - lo) / (2.0 * step);
}

// Checks every coordinate of `params` against the analytic gradient returned
// by `analytic` (recomputed once up front). Returns the worst relative error.
inline double max_grad_rel_err(std::vector<double*> slots, const std::vector<double>& analytic,
                               const std::function<double()>& f, double step = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double numeric = central_diff(f, *slots[i], step);
        worst = std::max(worst, rel_err(analytic[i], numeric));
    }
    return worst;
}

inline proxyforge::Vec random_vec(proxyforge::Rng& rng, std::size_t dim, double scale = 1.0) {
    proxyforge::Vec v(dim);
    for (auto& x : v) x = rng.normal() * scale;
    return v;
}

// Scratch directory unique to one test binary run; removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

} // namespace testutil
