#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "finslerkit/chart_point.hpp"

namespace fk {

// splitmix64; identical streams on every platform for a given seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

// Axis-aligned box, one closed interval per coordinate.
struct Box {
    std::vector<std::pair<double, double>> bounds;

    int dimension() const { return static_cast<int>(bounds.size()); }
    bool contains(const std::vector<double>& p) const;
    bool contains_origin() const;
    // max |bound| over all coordinates.
    double scale() const;
};

struct SamplingConfig {
    std::uint64_t seed = 42;
    int count = 32;
    Box x_box;
    Box y_box;
};

// Validates the boxes (ConfigError) and draws `count` points: x first, then
// y, redrawing the whole point while |y| < 0.1 * y_box.scale().
std::vector<ChartPoint> sample_points(const SamplingConfig& config);

void validate(const SamplingConfig& config);

}  // namespace fk
