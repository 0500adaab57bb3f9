#include "doctest.h"

#include <cmath>

#include "finslerkit/catalog.hpp"
#include "finslerkit/finsler_metric.hpp"
#include "oracle_values.hpp"

using namespace fk;

namespace {

std::vector<ChartPoint> samples_of(const std::string& name, int count = 32) {
    return sample_points(default_sampling(catalog_get(name), 42, count));
}

}  // namespace

TEST_CASE("regularity validation") {
    const auto pts = samples_of("euclidean2", 8);
    CHECK_NOTHROW(FinslerMetric::from_expr(parse("sqrt(y1^2+y2^2)", 2), pts));
    CHECK_THROWS_AS(FinslerMetric::from_expr(parse("y1^2+y2^2", 2), pts), HomogeneityError);
    CHECK_THROWS_AS(FinslerMetric::from_expr(parse("-sqrt(y1^2+y2^2)", 2), pts), RegularityError);
    // F = |y1| smoothly written on y1 > 0: g is rank one.
    CHECK_THROWS_AS(FinslerMetric::from_expr(parse("sqrt(y1^2)", 2), pts), RegularityError);
}

TEST_CASE("flat metrics have vanishing sprays") {
    for (const char* name : {"euclidean2", "minkowski_quartic2"}) {
        const auto pts = samples_of(name, 16);
        const Model m = instantiate(catalog_get(name), pts);
        for (const auto& p : pts) {
            EvalContext ctx(p, 8);
            CHECK(ctx.value(m.spray.G(0)) == 0.0);
            CHECK(ctx.value(m.spray.G(1)) == 0.0);
        }
    }
}

TEST_CASE("metric identities on the catalog") {
    for (const auto& name : catalog_names()) {
        const auto pts = samples_of(name);
        const Model m = instantiate(catalog_get(name), pts);
        const auto r = metric_residuals(*m.metric, m.spray, pts);
        for (const auto& [check, value] : r) {
            INFO(name << " " << check << " = " << value);
            const double tol = check == "inverse_metric" ? 1e-12
                             : check == "metric_contracts_to_F2" ? 1e-10
                             : check == "spray_preserves_F" ? 1e-9
                                                            : 1e-8;
            CHECK(value < tol);
        }
    }
}

TEST_CASE("Euler-Lagrange form detects a wrong spray") {
    const auto pts = samples_of("sphere2", 8);
    const Model m = instantiate(catalog_get("sphere2"), pts);
    const auto r = metric_residuals(*m.metric, Spray::flat(2), pts);
    CHECK(r.at("euler_lagrange") > 1e-3);
    CHECK(r.at("spray_preserves_F") > 1e-3);
}

TEST_CASE("Riemannian detection") {
    auto test = [](const char* name) {
        const auto pts = samples_of(name, 16);
        const Model m = instantiate(catalog_get(name), pts);
        return is_riemannian(*m.metric, pts);
    };
    const RiemannianTest e = test("euclidean2");
    CHECK(e.riemannian);
    CHECK(e.max_cartan_norm < 1e-14);
    CHECK(test("hyperbolic_halfplane2").riemannian);
    CHECK(test("sphere2").riemannian);
    const RiemannianTest q = test("minkowski_quartic2");
    CHECK_FALSE(q.riemannian);
    CHECK(q.max_cartan_norm > 0.01);
    CHECK_FALSE(test("funk_disk2").riemannian);

    const FinslerMetric quartic = FinslerMetric::unchecked(ScalarField::from_expr(parse("(y1^4 + y2^4)^(1/4)", 2)), 2);
    EvalContext ctx(ChartPoint({0, 0}, {1, 1}), 8);
    CHECK(cartan_norm(quartic, ctx) == doctest::Approx(oracle::quartic_cartan_norm_at_11).epsilon(1e-12));
}

TEST_CASE("Landsberg tensor") {
    for (const char* name : {"sphere2", "minkowski_quartic2", "conformal_bump2"}) {
        const auto pts = samples_of(name, 8);
        const Model m = instantiate(catalog_get(name), pts);
        const FieldTensor L = landsberg_tensor(*m.metric, m.spray);
        for (const auto& p : pts) {
            EvalContext ctx(p, 8);
            CHECK(evaluate(ctx, L).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    const auto pts = samples_of("funk_disk2", 16);
    const Model funk = instantiate(catalog_get("funk_disk2"), pts);
    const FieldTensor L = landsberg_tensor(*funk.metric, funk.spray);
    double worst = 0.0;
    for (const auto& p : pts) {
        EvalContext ctx(p, 8);
        worst = std::max(worst, evaluate(ctx, L).cwiseAbs().maxCoeff());
    }
    CHECK(worst > 1e-4);

    EvalContext ctx(oracle::funk_point(), 8);
    const Eigen::VectorXd Lv = evaluate(ctx, L);
    const Eigen::VectorXd G3 = evaluate(ctx, berwald_y_derivatives(funk.spray).G3);
    for (int k = 0; k < 8; ++k) CHECK(Lv[k] == doctest::Approx(oracle::funk_L[k]).epsilon(1e-10).scale(1.0));
    for (int k = 0; k < 16; ++k) CHECK(G3[k] == doctest::Approx(oracle::funk_G3[k]).epsilon(1e-10).scale(1.0));
    CHECK(G3.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("Funk spray against its closed form and the high-precision oracle") {
    const auto pts = samples_of("funk_disk2", 16);
    const Model funk = instantiate(catalog_get("funk_disk2"), pts);
    for (const auto& p : pts) {
        EvalContext ctx(p, 8);
        const double F = ctx.value(funk.metric->F());
        for (int i = 0; i < 2; ++i) CHECK(relative_residual(ctx.value(funk.spray.G(i)), 0.5 * F * p.y()[i]) < 1e-12);
    }
    EvalContext ctx(oracle::funk_point(), 8);
    CHECK(ctx.value(funk.spray.G(0)) == doctest::Approx(oracle::funk_G[0]).epsilon(1e-13));
    CHECK(ctx.value(funk.spray.G(1)) == doctest::Approx(oracle::funk_G[1]).epsilon(1e-13));
}
