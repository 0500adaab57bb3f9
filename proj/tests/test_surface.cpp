#include "doctest.h"

#include <cmath>
#include <sstream>

#include "finslerkit/catalog.hpp"
#include "finslerkit/surface.hpp"
#include "oracle_values.hpp"

using namespace fk;

namespace {

struct Surface {
    std::vector<ChartPoint> samples;
    Model model;

    explicit Surface(const std::string& name, int count = 32)
        : samples(sample_points(default_sampling(catalog_get(name), 42, count))),
          model(instantiate(catalog_get(name), samples)) {}

    const FinslerMetric& metric() const { return *model.metric; }
    const Spray& spray() const { return model.spray; }
    SurfaceReport report() const { return analyze_surface(metric(), spray(), samples); }
};

double conformal_dK(double x1) { return -0.4 * x1 * oracle::conformal_K(x1); }

}  // namespace

TEST_CASE("flag curvature of the catalog surfaces") {
    struct Case {
        const char* name;
        double K;
        double tol;
    };
    for (const auto& c : {Case{"sphere2", 1.0, 1e-6}, Case{"hyperbolic_halfplane2", -1.0, 1e-6},
                          Case{"funk_disk2", -0.25, 1e-5}, Case{"euclidean2", 0.0, 1e-9},
                          Case{"minkowski_quartic2", 0.0, 1e-9}}) {
        const Surface s(c.name);
        const ScalarField K = flag_curvature(s.metric(), s.spray());
        INFO(c.name);
        for (const auto& p : s.samples) {
            EvalContext ctx(p, 8);
            CHECK(std::abs(ctx.value(K) - c.K) < c.tol);
        }
        CHECK(scalar_flag_residual(s.metric(), s.spray(), K, s.samples) < 1e-7);
    }
    const Surface bump("conformal_bump2");
    const ScalarField K = flag_curvature(bump.metric(), bump.spray());
    for (const auto& p : bump.samples) {
        EvalContext ctx(p, 8);
        CHECK(relative_residual(ctx.value(K), oracle::conformal_K(p.x()[0])) < 1e-12);
    }
}

TEST_CASE("Funk invariants against the high-precision oracle") {
    const Surface s("funk_disk2", 8);
    const BerwaldFrame fr = berwald_frame(s.metric(), s.spray());
    const ScalarField I = main_scalar(s.metric(), fr);
    EvalContext ctx(oracle::funk_point(), 8);
    CHECK(ctx.value(flag_curvature(s.metric(), s.spray())) == doctest::Approx(oracle::funk_K).epsilon(1e-12));
    CHECK(ctx.value(I) == doctest::Approx(oracle::funk_I).epsilon(1e-12));
    CHECK(ctx.value(fr.S(I)) == doctest::Approx(oracle::funk_SI).epsilon(1e-10));
}

TEST_CASE("Berwald frame") {
    const Surface flat("euclidean2", 8);
    const ScalarField K0 = flag_curvature(flat.metric(), flat.spray());
    CHECK_THROWS_AS(berwald_frame(flat.metric(), flat.spray(), K0, flat.samples), FrameUndefinedError);

    for (const char* name : {"sphere2", "hyperbolic_halfplane2"}) {
        const Surface s(name, 16);
        const ScalarField K = flag_curvature(s.metric(), s.spray());
        const BerwaldFrame fr = berwald_frame(s.metric(), s.spray(), K, s.samples);
        const VectorField SH = lie_bracket(fr.S, fr.H);
        const double expected = catalog_get(name).flag_curvature.value();
        for (const auto& p : indicatrix_points(s.metric(), s.samples)) {
            EvalContext ctx(p, 8);
            const FrameDecomposition d = decompose_in_frame(ctx, fr, SH);
            CHECK(std::abs(d.coefficients[3] - expected) < 1e-10);
            CHECK(d.coefficients.head<3>().cwiseAbs().maxCoeff() < 1e-10);
            // det(l, m) > 0
            const double l1 = ctx.value(fr.ell[0]), l2 = ctx.value(fr.ell[1]);
            const double m1 = ctx.value(fr.m[0]), m2 = ctx.value(fr.m[1]);
            CHECK(l1 * m2 - l2 * m1 > 0.0);
        }
    }
}

TEST_CASE("main scalar and the [H, V] decomposition") {
    for (const char* name : {"sphere2", "conformal_bump2"}) {
        const Surface s(name, 16);
        const BerwaldFrame fr = berwald_frame(s.metric(), s.spray());
        const VectorField HV = lie_bracket(fr.H, fr.V);
        for (const auto& p : indicatrix_points(s.metric(), s.samples)) {
            EvalContext ctx(p, 8);
            CHECK(std::abs(ctx.value(main_scalar(s.metric(), fr))) < 1e-12);
            const Eigen::Vector4d c = decompose_in_frame(ctx, fr, HV).coefficients;
            CHECK(relative_residual(Eigen::VectorXd(c), Eigen::VectorXd(Eigen::Vector4d(1, 0, 0, 0))) < 1e-10);
        }
    }
    const Surface funk("funk_disk2", 16);
    const SurfaceReport rep = funk.report();
    CHECK(rep.residuals.at("hv_h_coefficient") < 1e-6);
    CHECK(rep.residuals.at("hv_v_coefficient") < 1e-6);
    CHECK(rep.residuals.at("hv_s_coefficient") < 1e-7);
    double max_i = 0.0;
    for (const auto& p : rep.points) max_i = std::max(max_i, std::abs(p.main_scalar));
    CHECK(max_i > 0.1);
}

TEST_CASE("classification matches the catalog") {
    for (const auto& name : catalog_names()) {
        const Surface s(name);
        const Classification c = classify(s.metric(), s.spray(), s.samples);
        INFO(name);
        CHECK(c.label == catalog_get(name).classification);
        const bool curved = catalog_get(name).flag_curvature.value_or(1.0) != 0.0;
        CHECK(c.used_frame == curved);
    }
    const Surface funk("funk_disk2");
    CHECK(classify(funk.metric(), funk.spray(), funk.samples).landsberg_measure > 1e-3);
}

TEST_CASE("Bianchi identity") {
    for (const char* name : {"sphere2", "hyperbolic_halfplane2", "conformal_bump2", "funk_disk2"}) {
        const Surface s(name);
        INFO(name);
        CHECK(bianchi_check(s.metric(), s.spray(), s.samples) < 1e-6);
    }
    const Surface flat("euclidean2", 4);
    CHECK_THROWS_AS(bianchi_check(flat.metric(), flat.spray(), flat.samples), FrameUndefinedError);
}

TEST_CASE("beta machinery") {
    for (const char* name : {"sphere2", "hyperbolic_halfplane2"}) {
        const Surface s(name);
        const BetaReport b = beta_machinery(s.metric(), s.spray(), s.samples);
        CHECK(b.landsberg_precondition);
        CHECK(b.max_abs_beta < 1e-8);
        CHECK(b.h_of_k_residual < 1e-8);
        CHECK(b.identity_residual < 1e-8);
    }
    const Surface bump("conformal_bump2");
    const BetaReport b = beta_machinery(bump.metric(), bump.spray(), bump.samples);
    CHECK(b.landsberg_precondition);
    CHECK(b.max_abs_beta > 1e-3);
    CHECK(b.h_of_k_residual < 1e-6);
    CHECK(b.identity_residual < 1e-5);

    const Surface funk("funk_disk2");
    const BetaReport bf = beta_machinery(funk.metric(), funk.spray(), funk.samples);
    CHECK_FALSE(bf.landsberg_precondition);
    CHECK(bf.max_abs_beta < 1e-7);
}

TEST_CASE("V^2(beta) against finite differences") {
    const Surface bump("conformal_bump2", 4);
    const FinslerMetric& m = bump.metric();
    const BerwaldFrame fr = berwald_frame(m, bump.spray());
    const ScalarField K = flag_curvature(m, bump.spray());
    const ScalarField beta = fr.S(K) / K;
    const ChartPoint p = indicatrix_points(m, bump.samples)[0];
    auto shifted = [&](const Eigen::Vector4d& d) {
        return ChartPoint({p.x()[0] + d[0], p.x()[1] + d[1]}, {p.y()[0] + d[2], p.y()[1] + d[3]});
    };
    auto beta_at = [&](const Eigen::Vector4d& d) {
        EvalContext ctx(shifted(d), 8);
        return ctx.value(beta);
    };
    auto V_at = [&](const Eigen::Vector4d& d) {
        EvalContext ctx(shifted(d), 8);
        return Eigen::Vector4d(evaluate(ctx, fr.V));
    };
    // V^2 f = D^2 f (V, V) + Df (D_V V) along straight lines.
    const double h = 1e-3;
    const Eigen::Vector4d V = V_at(Eigen::Vector4d::Zero());
    const double b0 = beta_at(Eigen::Vector4d::Zero());
    const double second = (beta_at(h * V) - 2 * b0 + beta_at(-h * V)) / (h * h);
    const Eigen::Vector4d w = (V_at(h * V) - V_at(-h * V)) / (2 * h);
    const double first = (beta_at(h * w) - beta_at(-h * w)) / (2 * h);
    EvalContext ctx(p, 8);
    const double ad = ctx.value(fr.V(fr.V(beta)));
    CHECK(std::abs(ad) > 1e-3);
    CHECK(std::abs((second + first) - ad) < 1e-5);
}

TEST_CASE("surface theorems are consistent") {
    for (const auto& name : catalog_names()) {
        const Surface s(name);
        for (const auto& t : theorem_checks(s.metric(), s.spray(), s.samples)) {
            INFO(name << " " << t.name << ": " << t.detail);
            CHECK(t.consistent);
        }
    }
    const Surface bump("conformal_bump2");
    const SurfaceReport rep = bump.report();
    double max_sk = 0.0, max_hk = 0.0;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const ChartPoint& p = rep.samples[i];
        const double dK = conformal_dK(p.x()[0]);
        CHECK(std::abs(rep.points[i].s_of_k - p.y()[0] * dK) < 1e-12);
        CHECK(std::abs(rep.points[i].h_of_k + p.y()[1] * dK) < 1e-12);
        max_sk = std::max(max_sk, std::abs(rep.points[i].s_of_k));
        max_hk = std::max(max_hk, std::abs(rep.points[i].h_of_k));
    }
    CHECK(max_sk > 1e-6);
    CHECK(max_hk > 1e-6);
}

TEST_CASE("every reported surface check passes on the catalog") {
    for (const auto& name : catalog_names()) {
        const SurfaceReport rep = Surface(name).report();
        for (const auto& [check, value] : rep.residuals) {
            INFO(name << " " << check << " = " << value);
            CHECK(std::isfinite(value));
            CHECK(rep.passed(check));
        }
    }
}

TEST_CASE("surface CSV") {
    const SurfaceReport rep = Surface("euclidean2", 3).report();
    std::ostringstream out;
    write_csv(out, rep);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header ==
          "k,main_scalar,s_of_i,h_of_i,s_of_k,h_of_k,v_of_k,beta,bianchi_residual,beta_identity_residual,classification");
    std::getline(in, row);
    CHECK(row.find(",,") != std::string::npos);
    CHECK(row.substr(row.rfind(',') + 1) == "riemannian");
}
