#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "finslerkit/catalog.hpp"
#include "finslerkit/flows.hpp"

using namespace fk;

namespace {

std::vector<ChartPoint> samples_of(const std::string& name, int count = 32) {
    return sample_points(default_sampling(catalog_get(name), 42, count));
}

Model sphere() {
    return instantiate(catalog_get("sphere2"), samples_of("sphere2", 4));
}

// Signed angle from a to b in the orthonormal frame (d_theta, sin(theta) d_phi), in [0, 2pi).
double frame_angle(const std::vector<double>& a, const std::vector<double>& b, double theta) {
    const double s = std::sin(theta);
    const double ang = std::atan2(b[1] * s, b[0]) - std::atan2(a[1] * s, a[0]);
    return std::fmod(ang + 4 * std::numbers::pi, 2 * std::numbers::pi);
}

double round_norm(const std::vector<double>& v, double theta) {
    return std::sqrt(v[0] * v[0] + std::pow(std::sin(theta) * v[1], 2));
}

}  // namespace

TEST_CASE("flat geodesics are straight lines") {
    const Trajectory t = integrate_geodesic(Spray::flat(2), ChartPoint({0, 0}, {1, 2}), 1.0);
    const ChartPoint& end = t.states.back();
    CHECK(t.t.back() == doctest::Approx(1.0));
    CHECK(end.x()[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(end.x()[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(end.y() == std::vector<double>{1, 2});
}

TEST_CASE("sphere great circle closes after 2 pi") {
    const Model m = sphere();
    const double half = std::numbers::pi / 2;
    const ChartPoint v0({half, 0.3}, {0.5, std::sqrt(0.75)});
    const Trajectory t = integrate_geodesic(m.spray, v0, 2 * std::numbers::pi);
    const ChartPoint& end = t.states.back();
    CHECK(std::abs(end.x()[0] - half) < 1e-5);
    CHECK(std::abs(end.x()[1] - (0.3 + 2 * std::numbers::pi)) < 1e-5);
    CHECK(std::abs(end.y()[0] - 0.5) < 1e-5);
    CHECK(std::abs(end.y()[1] - std::sqrt(0.75)) < 1e-5);
}

TEST_CASE("geodesics preserve F and E on every catalog metric") {
    for (const auto& name : catalog_names()) {
        const auto pts = samples_of(name, 4);
        const Model m = instantiate(catalog_get(name), pts);
        INFO(name);
        CHECK(check_geodesic_invariance(m.metric->F(), m.spray, pts, 0.3) < 1e-6);
        CHECK(check_geodesic_invariance(m.metric->E(), m.spray, pts, 0.3) < 1e-6);
    }
}

TEST_CASE("geodesic invariance on the flat spray") {
    const auto pts = samples_of("euclidean2", 4);
    const Spray flat = Spray::flat(2);
    CHECK(check_geodesic_invariance(ScalarField::from_expr(parse("y1", 2)), flat, pts, 1.0) == 0.0);
    double expected = 0.0;
    for (const auto& p : pts) expected = std::max(expected, p.y()[0] * p.y()[0]);
    CHECK(check_geodesic_invariance(ScalarField::from_expr(parse("x1*y1", 2)), flat, pts, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("flat transport is the identity") {
    const Curve c = Curve::parse({"cos(3*t) + t^2", "sin(t)*exp(t)"});
    const std::vector<double> v0{0.3, -1.7};
    CHECK(parallel_transport(Spray::flat(2), c, v0) == v0);
}

TEST_CASE("latitude loop on the sphere") {
    const Model m = sphere();
    const double theta = 1.0;
    const Curve loop = Curve::parse({"1", "6.283185307179586*t"});
    const std::vector<double> v0{0.6, 0.4};
    const std::vector<double> v1 = parallel_transport(m.spray, loop, v0);
    CHECK(std::abs(frame_angle(v0, v1, theta) - 2 * std::numbers::pi * (1 - std::cos(theta))) < 1e-4);
    CHECK(std::abs(round_norm(v1, theta) - round_norm(v0, theta)) < 1e-6);

    const std::vector<double> back = parallel_transport(m.spray, loop.reversed(), v1);
    CHECK(std::hypot(back[0] - v0[0], back[1] - v0[1]) < 1e-8);
}

TEST_CASE("transport preserves F on a generic sphere path") {
    const Model m = sphere();
    const Curve c = Curve::parse({"1.2 + 0.3*sin(2*t)", "t^2 - 0.5*t"});
    const std::vector<double> v0{0.2, 0.9};
    const std::vector<double> v1 = parallel_transport(m.spray, c, v0);
    const auto x0 = c.position(0.0), x1 = c.position(1.0);
    CHECK(std::abs(round_norm(v1, x1[0]) - round_norm(v0, x0[0])) < 1e-6);
}

TEST_CASE("RK4 convergence order on the sphere loop") {
    const Model m = sphere();
    const Curve loop = Curve::parse({"1", "6.283185307179586*t"});
    const std::vector<double> v0{0.6, 0.4};
    IntegratorConfig fine;
    fine.step = 1e-3;
    const auto ref = parallel_transport(m.spray, loop, v0, fine);
    auto defect = [&](double h) {
        IntegratorConfig cfg;
        cfg.step = h;
        const auto v = parallel_transport(m.spray, loop, v0, cfg);
        return std::hypot(v[0] - ref[0], v[1] - ref[1]);
    };
    const double ratio = defect(0.02) / defect(0.01);
    INFO("ratio " << ratio);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("integration errors") {
    IntegratorConfig cfg;
    cfg.chart = Box{{{-1, 1}, {-1, 1}}};
    CHECK_THROWS_AS(integrate_geodesic(Spray::flat(2), ChartPoint({0, 0}, {1, 0}), 2.0, cfg), IntegrationError);
    CHECK_THROWS(integrate_geodesic(Spray::flat(2), ChartPoint({0, 0}, {1, 0}), 1.0, IntegratorConfig{-1.0}));
}

TEST_CASE("trajectory CSV") {
    IntegratorConfig cfg;
    cfg.step = 0.5;
    const Trajectory t = integrate_geodesic(Spray::flat(2), ChartPoint({0, 0}, {1, 2}), 1.0, cfg);
    std::ostringstream out;
    write_csv(out, t);
    const std::string s = out.str();
    CHECK(s.rfind("t,x1,x2,y1,y2\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
