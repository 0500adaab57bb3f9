#pragma once

// Two-dimensional Finsler geometry: flag curvature, the Berwald frame, the
// main scalar, Bianchi and beta identities, Landsberg/Berwald classification
// and consistency of the surface theorems at sampled points.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "finslerkit/batch.hpp"
#include "finslerkit/finsler_metric.hpp"

namespace fk {

struct SurfaceOptions {
    double frame_k = 1e-6;       // |K| needed at every sample to use the frame
    double classify_tol = 1e-7;
    int order = 8;
};

// (x, y / F(x, y)). The frame relations and the Bianchi identity are stated on
// the indicatrix bundle; off it they pick up powers of F by homogeneity.
std::vector<ChartPoint> indicatrix_points(const FinslerMetric& m, const std::vector<ChartPoint>& samples,
                                          int order = 8);

// K = tr(Phi) / F^2
ScalarField flag_curvature(const FinslerMetric& m, const Spray& s);

// Max relative residual of Phi - K (F^2 J - F d_J F (x) C) on the vertical block.
double scalar_flag_residual(const FinslerMetric& m, const Spray& s, const ScalarField& K,
                            const std::vector<ChartPoint>& samples, int order = 8);

// {S, H, C, V} with V = F m^i d/dy^i and H = -[S, V]. The unit pair is
// l = y / F and m = (-dF/dy^2, dF/dy^1) / sqrt(det g), so det(l, m) > 0.
struct BerwaldFrame {
    VectorField S, H, C, V;
    std::vector<ScalarField> ell;
    std::vector<ScalarField> m;
};

BerwaldFrame berwald_frame(const FinslerMetric& m, const Spray& s);
// Throws FrameUndefinedError when |K| <= threshold at some sample.
BerwaldFrame berwald_frame(const FinslerMetric& m, const Spray& s, const ScalarField& K,
                           const std::vector<ChartPoint>& samples, double threshold = 1e-6, int order = 8);

// I = F C_ijk m^i m^j m^k
ScalarField main_scalar(const FinslerMetric& m, const BerwaldFrame& frame);

// Coefficients of X in the basis (S, H, C, V) at the context point. Throws
// FrameUndefinedError when the frame matrix is numerically singular.
struct FrameDecomposition {
    Eigen::Vector4d coefficients;
    double condition = 0.0;
};
FrameDecomposition decompose_in_frame(EvalContext& ctx, const BerwaldFrame& frame, const VectorField& X);

struct Classification {
    std::string label;
    bool used_frame = false;
    bool riemannian = false;
    bool berwald = false;
    bool landsberg = false;
    double cartan_measure = 0.0;     // max F |C|_g
    double landsberg_measure = 0.0;  // max |S(I)|, or max |L_ijk| on the tensor path
    double berwald_measure = 0.0;    // max(|S(I)|, |H(I)|), or max |G^i_jkl|
};

struct SurfacePoint {
    double k = 0.0;
    double main_scalar = 0.0;
    double s_of_i = 0.0;
    double h_of_i = 0.0;
    double s_of_k = 0.0;
    double h_of_k = 0.0;
    double v_of_k = 0.0;
    std::optional<double> beta;
    std::optional<double> v_of_beta;
    std::optional<double> v2_of_beta;
    double bianchi_residual = 0.0;
    std::optional<double> beta_identity_residual;
};

struct TheoremCheck {
    std::string name;
    bool applicable = false;
    bool consistent = true;
    std::string detail;
};

struct SurfaceReport {
    std::vector<ChartPoint> samples;  // the input samples moved to the indicatrix
    std::vector<SurfacePoint> points;
    bool frame_defined = false;
    bool landsberg_precondition = false;  // beta identities are derived for Landsberg surfaces
    std::map<std::string, double> residuals;
    std::map<std::string, double> tolerances;
    Classification classification;
    std::vector<TheoremCheck> theorems;

    bool passed(const std::string& check) const { return residuals.at(check) < tolerances.at(check); }
};

SurfaceReport analyze_surface(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                              const SurfaceOptions& options = {}, Exec exec = Exec::Parallel);

Classification classify(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                        const SurfaceOptions& options = {});

// max |S^2(I) + V(K) + I K| / (1 + |K|). Throws FrameUndefinedError.
double bianchi_check(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                     const SurfaceOptions& options = {});

struct BetaReport {
    bool landsberg_precondition = false;
    double max_abs_beta = 0.0;
    double h_of_k_residual = 0.0;     // max |H(K) - V(beta) K|
    double identity_residual = 0.0;   // max |beta + I V(beta) + H(I) + V^2(beta)|
};
// Throws FrameUndefinedError.
BetaReport beta_machinery(const FinslerMetric& m, const Spray& s, const std::vector<ChartPoint>& samples,
                          const SurfaceOptions& options = {});

std::vector<TheoremCheck> theorem_checks(const FinslerMetric& m, const Spray& s,
                                         const std::vector<ChartPoint>& samples, const SurfaceOptions& options = {});

// One row per sample; beta columns are empty where K = 0.
void write_csv(std::ostream& out, const SurfaceReport& report);

}  // namespace fk
