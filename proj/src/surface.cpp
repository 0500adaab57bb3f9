#include "finslerkit/surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "finslerkit/forms.hpp"
#include "finslerkit/linalg.hpp"

namespace fk {

namespace {

void require_surface(const FinslerMetric& m) {
    if (m.dimension() != 2) throw DomainError("surface analysis requires dimension 2");
}

ScalarField g_pair(const FinslerMetric& m, const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
    ScalarField sum = ScalarField::constant(0.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) sum = sum + m.g()(i, j) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    }
    return sum;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Every field the surface analysis touches, built once per (metric, spray).
struct Fields {
    ScalarField F;
    ScalarField K;
    FieldTensor Phi;
    BerwaldFrame frame;
    ScalarField I, SI, S2I, HI;
    ScalarField SK, HK, VK, CK;
    std::vector<ScalarField> dK_dy;
    std::vector<ScalarField> dF_dy;
    std::optional<ScalarField> beta, Vbeta, V2beta;
    VectorField SV_plus_H, SH, JH, HV;
    ScalarField g_lm, g_mm, g_ll;
    FieldTensor landsberg;
    FieldTensor G3;

    Fields(const FinslerMetric& m, const Spray& s) {
        F = m.F();
        const Curvature k = curvature(s, connection(s));
        Phi = k.Phi;
        K = (Phi(0, 0) + Phi(1, 1)) / (F * F);
        frame = berwald_frame(m, s);
        I = main_scalar(m, frame);
        SI = frame.S(I);
        S2I = frame.S(SI);
        HI = frame.H(I);
        SK = frame.S(K);
        HK = frame.H(K);
        VK = frame.V(K);
        CK = frame.C(K);
        for (int i = 0; i < 2; ++i) {
            dK_dy.push_back(partial(K, 2 + i));
            dF_dy.push_back(partial(F, 2 + i));
        }
        if (!K.is_zero()) {
            beta = SK / K;
            Vbeta = frame.V(*beta);
            V2beta = frame.V(*Vbeta);
        }
        SV_plus_H = lie_bracket(frame.S, frame.V) + frame.H;
        SH = lie_bracket(frame.S, frame.H);
        JH = tangent_structure(2).apply(frame.H);
        HV = lie_bracket(frame.H, frame.V);
        g_lm = g_pair(m, frame.ell, frame.m);
        g_mm = g_pair(m, frame.m, frame.m);
        g_ll = g_pair(m, frame.ell, frame.ell);
        landsberg = landsberg_tensor(m, s);
        G3 = berwald_y_derivatives(s).G3;
    }
};

struct PointResult {
    SurfacePoint point;
    std::map<std::string, double> residuals;
    double cartan = 0.0;
    double landsberg = 0.0;
    double g3 = 0.0;
    double abs_i = 0.0;
};

PointResult evaluate_point(const FinslerMetric& m, const Fields& f, const ChartPoint& p, bool frame_defined,
                           int order) {
    EvalContext ctx(p, order);
    PointResult r;
    SurfacePoint& sp = r.point;
    const double F = ctx.value(f.F);
    const double K = ctx.value(f.K);
    sp.k = K;
    sp.main_scalar = ctx.value(f.I);
    sp.s_of_i = ctx.value(f.SI);
    sp.h_of_i = ctx.value(f.HI);
    sp.s_of_k = ctx.value(f.SK);
    sp.h_of_k = ctx.value(f.HK);
    sp.v_of_k = ctx.value(f.VK);
    sp.bianchi_residual = std::abs(ctx.value(f.S2I) + sp.v_of_k + sp.main_scalar * K) / (1.0 + std::abs(K));
    if (f.beta && K != 0.0) {
        sp.beta = ctx.value(*f.beta);
        sp.v_of_beta = ctx.value(*f.Vbeta);
        sp.v2_of_beta = ctx.value(*f.V2beta);
        sp.beta_identity_residual =
            std::abs(*sp.beta + sp.main_scalar * *sp.v_of_beta + sp.h_of_i + *sp.v2_of_beta);
    }

    auto& res = r.residuals;
    double phi = 0.0;
    const double y[2] = {p.y()[0], p.y()[1]};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double Fj = ctx.value(f.dF_dy[static_cast<std::size_t>(j)]);
            const double expected = K * ((i == j ? F * F : 0.0) - F * y[i] * Fj);
            phi = std::max(phi, relative_residual(ctx.value(f.Phi(i, j)), expected));
        }
    }
    res["scalar_flag_form"] = phi;
    res["k_homogeneity"] = std::abs(ctx.value(f.CK));
    res["k_fiber_derivative"] = std::max(std::abs(ctx.value(f.dK_dy[0])), std::abs(ctx.value(f.dK_dy[1])));
    res["bianchi"] = sp.bianchi_residual;

    res["frame_s_v_plus_h"] = max_abs(evaluate(ctx, f.SV_plus_H));
    const Eigen::VectorXd H = evaluate(ctx, f.frame.H);
    const Eigen::VectorXd V = evaluate(ctx, f.frame.V);
    res["frame_s_h_minus_kv"] = relative_residual(evaluate(ctx, f.SH), Eigen::VectorXd(K * V));
    res["frame_j_h_is_v"] = relative_residual(evaluate(ctx, f.JH), V);
    res["frame_h_of_f"] = std::abs(ctx.value(f.frame.H(f.F))) / (1.0 + F);
    res["frame_v_of_f"] = std::abs(ctx.value(f.frame.V(f.F))) / (1.0 + F);
    res["frame_unit_pair"] = std::max({std::abs(ctx.value(f.g_lm)), std::abs(ctx.value(f.g_mm) - 1.0),
                                       std::abs(ctx.value(f.g_ll) - 1.0)});
    if (frame_defined) {
        Eigen::Matrix4d M;
        M.col(0) = evaluate(ctx, f.frame.S);
        M.col(1) = H;
        M.col(2) = evaluate(ctx, f.frame.C);
        M.col(3) = V;
        res["frame_rank_deficit"] = 4.0 - numeric_rank(M).rank;
        const FrameDecomposition d = decompose_in_frame(ctx, f.frame, f.HV);
        res["hv_s_coefficient"] = std::abs(d.coefficients[0] - 1.0);
        res["hv_h_coefficient"] = std::abs(d.coefficients[1] - sp.main_scalar);
        res["hv_c_coefficient"] = std::abs(d.coefficients[2]);
        res["hv_v_coefficient"] = std::abs(d.coefficients[3] - sp.s_of_i);
        if (sp.v_of_beta) res["beta_h_of_k"] = std::abs(sp.h_of_k - *sp.v_of_beta * K);
        if (sp.beta_identity_residual) res["beta_identity"] = *sp.beta_identity_residual;
    }

    r.cartan = cartan_norm(m, ctx);
    r.landsberg = max_abs(evaluate(ctx, f.landsberg));
    r.g3 = max_abs(evaluate(ctx, f.G3));
    r.abs_i = std::abs(sp.main_scalar);
    return r;
}

double max_of(const std::vector<SurfacePoint>& pts, double SurfacePoint::*field) {
    double v = 0.0;
    for (const auto& p : pts) v = std::max(v, std::abs(p.*field));
    return v;
}

std::vector<TheoremCheck> build_theorems(const SurfaceReport& rep, const SurfaceOptions& o) {
    const double tol = o.classify_tol;
    const Classification& c = rep.classification;
    double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin, kabs = 0.0;
    for (const auto& p : rep.points) {
        kmin = std::min(kmin, p.k);
        kmax = std::max(kmax, p.k);
        kabs = std::max(kabs, std::abs(p.k));
    }
    double kabs_min = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.points) kabs_min = std::min(kabs_min, std::abs(p.k));
    const bool nonvanishing = kabs_min > o.frame_k;
    const bool k_constant = (kmax - kmin) < tol * (1.0 + kabs);
    const bool sk_zero = max_of(rep.points, &SurfacePoint::s_of_k) < tol;
    const bool hk_zero = max_of(rep.points, &SurfacePoint::h_of_k) < tol;
    const bool vk_zero = max_of(rep.points, &SurfacePoint::v_of_k) < tol;
    const bool i_zero = max_of(rep.points, &SurfacePoint::main_scalar) < tol;
    const bool k_zero = kabs < tol;

    std::vector<TheoremCheck> out;
    auto add = [&](std::string name, bool applicable, bool consistent, std::string detail) {
        out.push_back(TheoremCheck{std::move(name), applicable, !applicable || consistent, std::move(detail)});
    };
    add("s_invariant_curvature_forces_riemannian", c.landsberg && sk_zero, c.riemannian || k_zero,
        !(c.landsberg && sk_zero) ? "hypothesis fails"
        : k_zero                  ? "vanishing flag curvature branch"
        : c.riemannian            ? "riemannian branch"
                                  : "landsberg, S(K) = 0, K != 0 but not riemannian");
    add("s_invariant_curvature_iff_constant", c.landsberg && nonvanishing,
        sk_zero == k_constant && (!k_constant || c.riemannian),
        std::string("S(K) = 0: ") + (sk_zero ? "yes" : "no") + ", K constant: " + (k_constant ? "yes" : "no"));
    add("h_invariant_curvature_iff_constant", c.berwald && nonvanishing, hk_zero == k_constant,
        std::string("H(K) = 0: ") + (hk_zero ? "yes" : "no") + ", K constant: " + (k_constant ? "yes" : "no"));
    add("basic_curvature_landsberg_dichotomy", c.landsberg && vk_zero, k_zero || i_zero,
        std::string("K = 0: ") + (k_zero ? "yes" : "no") + ", I = 0: " + (i_zero ? "yes" : "no"));
    return out;
}

}  // namespace

std::vector<ChartPoint> indicatrix_points(const FinslerMetric& m, const std::vector<ChartPoint>& samples, int order) {
    std::vector<ChartPoint> out;
    out.reserve(samples.size());
    for (const auto& p : samples) {
        EvalContext ctx(p, order);
        const double F = ctx.value(m.F());
        std::vector<double> y = p.y();
        for (double& v : y) v /= F;
        out.emplace_back(p.x(), std::move(y));
    }
    return out;
}

ScalarField flag_curvature(const FinslerMetric& m, const Spray& s) {
    require_surface(m);
    const Curvature k = curvature(s, connection(s));
    return (k.Phi(0, 0) + k.Phi(1, 1)) / (m.F() * m.F());
}

double scalar_flag_residual(const FinslerMetric& m, const Spray& s, const ScalarField& K,
                            const std::vector<ChartPoint>& samples, int order) {
    require_surface(m);
    const Curvature k = curvature(s, connection(s));
    const ScalarField& F = m.F();
    double worst = 0.0;
    for (const auto& p : samples) {
        EvalContext ctx(p, order);
        const double f = ctx.value(F), kv = ctx.value(K);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double expected =
                    kv * ((i == j ? f * f : 0.0) - f * p.y()[static_cast<std::size_t>(i)] * ctx.value(partial(F, 2 + j)));
                worst = std::max(worst, relative_residual(ctx.value(k.Phi(i, j)), expected));
            }
        }
    }
    return worst;
}

BerwaldFrame berwald_frame(const FinslerMetric& m, const Spray& s) {
    require_surface(m);
    const ScalarField& F = m.F();
    const FieldTensor& g = m.g();
    const ScalarField root = sqrt(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0));
    BerwaldFrame fr;
    fr.S = s.field();
    fr.C = liouville(2);
    fr.ell = {ScalarField::coordinate(2) / F, ScalarField::coordinate(3) / F};
    fr.m = {-partial(F, 3) / root, partial(F, 2) / root};
    fr.V = VectorField::zero(2);
    for (int i = 0; i < 2; ++i) fr.V[2 + i] = F * fr.m[static_cast<std::size_t>(i)];
    fr.H = -lie_bracket(fr.S, fr.V);
    return fr;
}

BerwaldFrame berwald_frame(const FinslerMetric& m, const Spray& s, const ScalarField& K,
                           const std::vector<ChartPoint>& samples, double threshold, int order) {
    for (std::size_t p = 0; p < samples.size(); ++p) {
        EvalContext ctx(samples[p], order);
        const double k = ctx.value(K);
        if (!(std::abs(k) > threshold)) {
            std::ostringstream msg;
            msg << "Berwald frame undefined: |K| = " << std::abs(k) << " at sample " << p
                << " is below the frame threshold " << threshold << "; use the Landsberg tensor path";
            throw FrameUndefinedError(msg.str());
        }
    }
    return berwald_frame(m, s);
}

ScalarField main_scalar(const FinslerMetric& m, const BerwaldFrame& frame) {
    require_surface(m);
    ScalarField sum = ScalarField::constant(0.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const ScalarField& C = m.cartan()(i, j, k);
                if (C.is_zero()) continue;
                sum = sum + C * frame.m[static_cast<std::size_t>(i)] * frame.m[static_cast<std::size_t>(j)] *
                                frame.m[static_cast<std::size_t>(k)];
            }
        }
    }
    return m.F() * sum;
}

FrameDecomposition decompose_in_frame(EvalContext& ctx, const BerwaldFrame& frame, const VectorField& X) {
    Eigen::Matrix4d M;
    M.col(0) = evaluate(ctx, frame.S);
    M.col(1) = evaluate(ctx, frame.H);
    M.col(2) = evaluate(ctx, frame.C);
    M.col(3) = evaluate(ctx, frame.V);
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    FrameDecomposition d;
    d.condition = sv[3] > 0.0 ? sv[0] / sv[3] : std::numeric_limits<double>::infinity();
    if (!(d.condition < 1e12)) {
        std::ostringstream msg;
        msg << "Berwald frame matrix is singular (condition number " << d.condition << ")";
        throw FrameUndefinedError(msg.str());
    }
    d.coefficients = svd.solve(Eigen::Vector4d(evaluate(ctx, X)));
    return d;
}

SurfaceReport analyze_surface(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                              const SurfaceOptions& options, Exec exec) {
    require_surface(m);
    const Fields f(m, s);
    SurfaceReport rep;
    rep.samples = indicatrix_points(m, samples, options.order);
    const std::vector<ChartPoint>& pts = rep.samples;

    const auto kvals = map_points(pts, [&](const ChartPoint& p) {
        EvalContext ctx(p, options.order);
        return ctx.value(f.K);
    }, exec);
    rep.frame_defined = !pts.empty() &&
                        std::all_of(kvals.begin(), kvals.end(), [&](double k) { return std::abs(k) > options.frame_k; });

    const auto results = map_points(pts, [&](const ChartPoint& p) {
        return evaluate_point(m, f, p, rep.frame_defined, options.order);
    }, exec);

    Classification& c = rep.classification;
    double max_si = 0.0, max_hi = 0.0;
    for (const auto& r : results) {
        rep.points.push_back(r.point);
        for (const auto& [name, value] : r.residuals) {
            auto [it, inserted] = rep.residuals.emplace(name, value);
            if (!inserted) it->second = std::isnan(value) ? value : std::max(it->second, value);
        }
        c.cartan_measure = std::max(c.cartan_measure, r.cartan);
        max_si = std::max(max_si, std::abs(r.point.s_of_i));
        max_hi = std::max(max_hi, std::abs(r.point.h_of_i));
        c.landsberg_measure = std::max(c.landsberg_measure, r.landsberg);
        c.berwald_measure = std::max(c.berwald_measure, r.g3);
    }

    const double tol = options.classify_tol;
    c.used_frame = rep.frame_defined;
    if (c.used_frame) {
        c.landsberg_measure = max_si;
        c.berwald_measure = std::max(max_si, max_hi);
    }
    c.riemannian = c.cartan_measure < tol;
    c.landsberg = c.riemannian || c.landsberg_measure < tol;
    c.berwald = c.riemannian || (c.landsberg && c.berwald_measure < tol);
    if (pts.empty()) c.label = "flat_curvature_unclassified_frame";
    else if (c.riemannian) c.label = "riemannian";
    else if (c.berwald) c.label = "berwald_non_riemannian";
    else if (c.landsberg) c.label = "landsberg_non_berwald";
    else c.label = "non_landsberg";
    rep.landsberg_precondition = rep.frame_defined && c.landsberg;

    // Checks that only make sense under their hypotheses are dropped otherwise.
    if (!c.riemannian) rep.residuals.erase("k_fiber_derivative");
    if (!rep.frame_defined) {
        for (const char* name : {"frame_s_v_plus_h", "frame_s_h_minus_kv", "frame_j_h_is_v", "frame_h_of_f",
                                 "frame_v_of_f", "frame_unit_pair", "bianchi"}) {
            rep.residuals.erase(name);
        }
    }
    if (!rep.landsberg_precondition) {
        rep.residuals.erase("beta_h_of_k");
        rep.residuals.erase("beta_identity");
    }

    const std::map<std::string, double> tolerances = {
        {"scalar_flag_form", 1e-7},   {"k_homogeneity", 1e-8},       {"k_fiber_derivative", 1e-7},
        {"bianchi", 1e-6},            {"frame_s_v_plus_h", 1e-12},   {"frame_s_h_minus_kv", 1e-6},
        {"frame_j_h_is_v", 1e-8},     {"frame_h_of_f", 1e-8},        {"frame_v_of_f", 1e-8},
        {"frame_unit_pair", 1e-10},   {"frame_rank_deficit", 0.5},   {"hv_s_coefficient", 1e-7},
        {"hv_h_coefficient", 1e-6},   {"hv_c_coefficient", 1e-6},    {"hv_v_coefficient", 1e-6},
        {"beta_h_of_k", 1e-6},        {"beta_identity", 1e-5}};
    for (const auto& [name, value] : rep.residuals) {
        (void)value;
        rep.tolerances[name] = tolerances.at(name);
    }
    rep.theorems = build_theorems(rep, options);
    return rep;
}

Classification classify(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                        const SurfaceOptions& options) {
    return analyze_surface(m, s, samples, options).classification;
}

double bianchi_check(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                     const SurfaceOptions& options) {
    const ScalarField K = flag_curvature(m, s);
    berwald_frame(m, s, K, samples, options.frame_k, options.order);
    return analyze_surface(m, s, samples, options).residuals.at("bianchi");
}

BetaReport beta_machinery(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                          const SurfaceOptions& options) {
    const ScalarField K = flag_curvature(m, s);
    berwald_frame(m, s, K, samples, options.frame_k, options.order);
    const SurfaceReport rep = analyze_surface(m, s, samples, options);
    BetaReport b;
    b.landsberg_precondition = rep.landsberg_precondition;
    for (const auto& p : rep.points) {
        b.max_abs_beta = std::max(b.max_abs_beta, std::abs(p.beta.value_or(0.0)));
        if (p.v_of_beta) b.h_of_k_residual = std::max(b.h_of_k_residual, std::abs(p.h_of_k - *p.v_of_beta * p.k));
        b.identity_residual = std::max(b.identity_residual, p.beta_identity_residual.value_or(0.0));
    }
    return b;
}

std::vector<TheoremCheck> theorem_checks(const FinslerMetric& m, const Spray& s,
                                         const std::vector<ChartPoint>& samples, const SurfaceOptions& options) {
    return analyze_surface(m, s, samples, options).theorems;
}

void write_csv(std::ostream& out, const SurfaceReport& report) {
    out << "k,main_scalar,s_of_i,h_of_i,s_of_k,h_of_k,v_of_k,beta,bianchi_residual,beta_identity_residual,"
           "classification\n";
    out << std::setprecision(17);
    auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    for (const auto& p : report.points) {
        out << p.k << ',' << p.main_scalar << ',' << p.s_of_i << ',' << p.h_of_i << ',' << p.s_of_k << ','
            << p.h_of_k << ',' << p.v_of_k << ',';
        opt(p.beta);
        out << ',' << p.bianchi_residual << ',';
        opt(p.beta_identity_residual);
        out << ',' << report.classification.label << '\n';
    }
}

}  // namespace fk
