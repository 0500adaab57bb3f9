#pragma once

// Central finite differences of arbitrary mixed order, independent of the
// Taylor machinery. Each derivative order is taken by a nested 2-point
// central stencil.

#include <functional>
#include <vector>

namespace fktest {

using Fn = std::function<double(const std::vector<double>&)>;

inline double central_partial(const Fn& f, std::vector<double> u, std::vector<int> alpha, double h) {
    int var = -1;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > 0) {
            var = static_cast<int>(i);
            break;
        }
    }
    if (var < 0) return f(u);
    alpha[static_cast<std::size_t>(var)] -= 1;
    std::vector<double> up = u, dn = u;
    up[static_cast<std::size_t>(var)] += h;
    dn[static_cast<std::size_t>(var)] -= h;
    return (central_partial(f, up, alpha, h) - central_partial(f, dn, alpha, h)) / (2.0 * h);
}

// Richardson-extrapolated central difference, O(h^4).
inline double richardson_partial(const Fn& f, const std::vector<double>& u, const std::vector<int>& alpha, double h) {
    const double coarse = central_partial(f, u, alpha, h);
    const double fine = central_partial(f, u, alpha, h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace fktest
