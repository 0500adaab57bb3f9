#include "finslerkit/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace fk {

bool Box::contains(const std::vector<double>& p) const {
    if (p.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < bounds[i].first || p[i] > bounds[i].second) return false;
    }
    return true;
}

bool Box::contains_origin() const { return contains(std::vector<double>(bounds.size(), 0.0)); }

double Box::scale() const {
    double s = 0.0;
    for (const auto& [lo, hi] : bounds) s = std::max({s, std::abs(lo), std::abs(hi)});
    return s;
}

void validate(const SamplingConfig& config) {
    if (config.count <= 0) throw ConfigError("sampling count must be positive");
    if (config.x_box.dimension() == 0 || config.x_box.dimension() != config.y_box.dimension()) {
        throw ConfigError("sampling boxes must be nonempty and of equal dimension");
    }
    for (const Box* box : {&config.x_box, &config.y_box}) {
        for (const auto& [lo, hi] : box->bounds) {
            if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("sampling box is empty");
        }
    }
    if (config.y_box.contains_origin()) throw ConfigError("fiber box must exclude origin");
}

std::vector<ChartPoint> sample_points(const SamplingConfig& config) {
    validate(config);
    SplitMix64 rng(config.seed);
    const int n = config.x_box.dimension();
    const double min_norm = 0.1 * config.y_box.scale();
    std::vector<ChartPoint> points;
    points.reserve(static_cast<std::size_t>(config.count));
    while (static_cast<int>(points.size()) < config.count) {
        std::vector<double> x(static_cast<std::size_t>(n));
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(config.x_box.bounds[i].first, config.x_box.bounds[i].second);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            y[i] = rng.uniform(config.y_box.bounds[i].first, config.y_box.bounds[i].second);
            norm2 += y[i] * y[i];
        }
        if (std::sqrt(norm2) < min_norm) continue;
        points.emplace_back(std::move(x), std::move(y));
    }
    return points;
}

}  // namespace fk
