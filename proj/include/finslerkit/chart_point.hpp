#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "finslerkit/errors.hpp"

namespace fk {

// A point (x, y) of the slit tangent bundle in one chart. The fiber part y is
// never the zero vector.
class ChartPoint {
public:
    ChartPoint(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.empty() || x_.size() != y_.size()) {
            throw DomainError("chart point: base and fiber coordinates must have equal positive length");
        }
        double norm2 = 0.0;
        for (double v : y_) norm2 += v * v;
        if (!(norm2 > 0.0)) throw DomainError("chart point: fiber vector y must be nonzero");
    }

    int dimension() const { return static_cast<int>(x_.size()); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

    // Coordinate v of the 2n-tuple (x^1..x^n, y^1..y^n).
    double coordinate(int v) const {
        const int n = dimension();
        return v < n ? x_[v] : y_[v - n];
    }

    std::vector<double> coordinates() const {
        std::vector<double> all(x_);
        all.insert(all.end(), y_.begin(), y_.end());
        return all;
    }

    friend bool operator==(const ChartPoint&, const ChartPoint&) = default;

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

}  // namespace fk
