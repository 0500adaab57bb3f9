#pragma once

// Reference values produced by tests/oracles/*.py (sympy for the Riemannian
// surfaces, 60-digit mpmath differentiation for the Funk metric).

#include <array>
#include <cmath>

#include "finslerkit/chart_point.hpp"

namespace oracle {

inline fk::ChartPoint funk_point() { return fk::ChartPoint({0.2, -0.1}, {0.7, 0.4}); }

inline constexpr std::array<double, 2> funk_G = {0.32868646480074741156, 0.18782083702899852089};

// G^i_{jkl}, index ((i*2 + j)*2 + k)*2 + l
inline constexpr std::array<double, 16> funk_G3 = {
    0.11387768548706956896,  -0.19928594960237174569, -0.19928594960237174569, 0.34875041180415055495,
    -0.19928594960237174569, 0.34875041180415055495,  0.34875041180415055495,  -0.61031322065726347116,
    -0.21082760691525041822, 0.36894831210168823188,  0.36894831210168823188,  -0.64565954617795440578,
    0.36894831210168823188,  -0.64565954617795440578, -0.64565954617795440578, 1.1299042058114202101};

inline constexpr std::array<double, 8> funk_L = {
    -0.021677637372067341448, 0.037935865401117847533,  0.037935865401117847533,  -0.066387764451956233183,
    0.037935865401117847533,  -0.066387764451956233183, -0.066387764451956233183, 0.11617858779092340807};

inline constexpr double funk_K = -0.25;
inline constexpr double funk_I = -0.26086883432287676705;
inline constexpr double funk_SI = 0.12249150704325463244;

// y = (1, 1) lies on the symmetry axis of the quartic indicatrix.
inline constexpr double quartic_cartan_norm_at_11 = 0.0;

inline fk::ChartPoint halfplane_point() { return fk::ChartPoint({0.3, 1.4}, {0.4, -0.9}); }
inline constexpr std::array<double, 2> halfplane_G = {0.25714285714285714, -0.23214285714285714};

inline fk::ChartPoint sphere_point() { return fk::ChartPoint({1.2, 0.5}, {0.7, -0.3}); }
inline constexpr std::array<double, 2> sphere_G = {-0.015197921562400896, -0.081643709567323031};

inline double conformal_K(double x1) { return -std::exp(-x1 * x1 / 5.0) / 5.0; }

}  // namespace oracle
