#include "doctest.h"

#include <cmath>

#include "finslerkit/catalog.hpp"
#include "finslerkit/spray.hpp"
#include "oracle_values.hpp"

using namespace fk;

namespace {

std::vector<ChartPoint> samples_of(const std::string& name, int count = 32) {
    return sample_points(default_sampling(catalog_get(name), 42, count));
}

std::vector<Expr> exprs(std::initializer_list<const char*> texts) {
    std::vector<Expr> out;
    for (const char* t : texts) out.push_back(parse(t, 2));
    return out;
}

}  // namespace

TEST_CASE("spray construction validates homogeneity") {
    const auto pts = samples_of("hyperbolic_halfplane2", 16);
    CHECK_NOTHROW(Spray::from_exprs(exprs({"0", "0"}), pts));
    CHECK_NOTHROW(Spray::from_exprs(exprs({"-y1*y2/x2", "(y1^2 - y2^2)/(2*x2)"}), pts));
    CHECK_THROWS_AS(Spray::from_exprs(exprs({"x1*y1", "0"}), pts), HomogeneityError);
    try {
        Spray::from_exprs(exprs({"x1*y1", "0"}), pts);
    } catch (const HomogeneityError& e) {
        CHECK(std::string(e.what()).find("G1") != std::string::npos);
    }
}

TEST_CASE("flat spray geometry is trivial") {
    const Spray s = Spray::flat(2);
    const Connection c = connection(s);
    const Curvature k = curvature(s, c);
    CHECK(c.N.is_zero());
    CHECK(k.R.is_zero());
    CHECK(k.Phi.is_zero());
    EvalContext ctx(ChartPoint({0.1, 0.2}, {1, 2}), 3);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(4, 4);
    h(0, 0) = h(1, 1) = 1.0;
    CHECK(evaluate(ctx, c.h) == h);
    const BerwaldTensors b = berwald_y_derivatives(s);
    CHECK(b.G3.is_zero());
}

TEST_CASE("half-plane geodesic spray matches its Christoffel symbols") {
    const auto pts = samples_of("hyperbolic_halfplane2");
    const Model m = instantiate(catalog_get("hyperbolic_halfplane2"), pts);
    for (const auto& p : pts) {
        EvalContext ctx(p, 8);
        const double X2 = p.x()[1], Y1 = p.y()[0], Y2 = p.y()[1];
        CHECK(relative_residual(ctx.value(m.spray.G(0)), -Y1 * Y2 / X2) < 1e-12);
        CHECK(relative_residual(ctx.value(m.spray.G(1)), (Y1 * Y1 - Y2 * Y2) / (2 * X2)) < 1e-12);
    }
}

TEST_CASE("sphere connection is linear in y with the round Christoffel symbols") {
    const auto pts = samples_of("sphere2");
    const Model m = instantiate(catalog_get("sphere2"), pts);
    const Connection c = connection(m.spray);
    const Curvature k = curvature(m.spray, c);
    for (const auto& p : pts) {
        EvalContext ctx(p, 8);
        const double th = p.x()[0], Y1 = p.y()[0], Y2 = p.y()[1];
        const double s = std::sin(th), co = std::cos(th);
        CHECK(relative_residual(ctx.value(m.spray.G(0)), -0.5 * s * co * Y2 * Y2) < 1e-12);
        CHECK(relative_residual(ctx.value(m.spray.G(1)), co / s * Y1 * Y2) < 1e-12);
        CHECK(std::abs(ctx.value(c.N(0, 0))) < 1e-12);
        CHECK(relative_residual(ctx.value(c.N(0, 1)), -s * co * Y2) < 1e-12);
        CHECK(relative_residual(ctx.value(c.N(1, 0)), co / s * Y2) < 1e-12);
        CHECK(relative_residual(ctx.value(c.N(1, 1)), co / s * Y1) < 1e-12);
        // K = 1: Phi^i_j = F^2 delta^i_j - y^i y_j with y_j = g_jk y^k.
        const double g[2] = {1.0, s * s};
        const double F2 = Y1 * Y1 + s * s * Y2 * Y2;
        const double y[2] = {Y1, Y2};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double expected = (i == j ? F2 : 0.0) - y[i] * g[j] * y[j];
                CHECK(relative_residual(ctx.value(k.Phi(i, j)), expected) < 1e-10);
            }
        }
    }
}

TEST_CASE("Berwald tensors of Riemannian sprays vanish in third order") {
    for (const char* name : {"sphere2", "hyperbolic_halfplane2", "conformal_bump2"}) {
        const auto pts = samples_of(name, 8);
        const Model m = instantiate(catalog_get(name), pts);
        const BerwaldTensors b = berwald_y_derivatives(m.spray);
        for (const auto& p : pts) {
            EvalContext ctx(p, 8);
            CHECK(evaluate(ctx, b.G3).cwiseAbs().maxCoeff() < 1e-9);
            // symmetry in the lower indices
            for (int i = 0; i < 2; ++i)
                CHECK(ctx.value(b.G2(i, 0, 1)) == ctx.value(b.G2(i, 1, 0)));
        }
    }
}

TEST_CASE("structure identities hold for every catalog spray") {
    for (const auto& name : catalog_names()) {
        const auto pts = samples_of(name);
        const Model m = instantiate(catalog_get(name), pts);
        const auto residuals = structure_residuals(m.spray, pts);
        for (const auto& [check, value] : residuals) {
            INFO(name << " " << check << " = " << value);
            CHECK(value < 1e-8);
        }
    }
}

TEST_CASE("geodesic sprays agree with the symbolic reference points") {
    struct Case {
        const char* name;
        ChartPoint point;
        std::array<double, 2> G;
    };
    for (const auto& c : {Case{"hyperbolic_halfplane2", oracle::halfplane_point(), oracle::halfplane_G},
                          Case{"sphere2", oracle::sphere_point(), oracle::sphere_G}}) {
        const Model m = instantiate(catalog_get(c.name), {c.point});
        EvalContext ctx(c.point, 8);
        CHECK(ctx.value(m.spray.G(0)) == doctest::Approx(c.G[0]).epsilon(1e-13));
        CHECK(ctx.value(m.spray.G(1)) == doctest::Approx(c.G[1]).epsilon(1e-13));
    }
}
