#pragma once

// Distributions cut out of the canonical splitting by a k-homogeneous
// invariant function P.

#include <map>
#include <string>
#include <vector>

#include "finslerkit/linalg.hpp"
#include "finslerkit/spray.hpp"

namespace fk {

class InvariantCandidate {
public:
    // Throws PreconditionError for k = 0.
    InvariantCandidate(ScalarField P, double degree, double floor = 1e-8);

    const ScalarField& P() const { return P_; }
    double degree() const { return k_; }
    double floor() const { return floor_; }

    // |P| > floor and C(P) = k P at every sample.
    void validate(const std::vector<ChartPoint>& samples, double tol = 1e-8, int order = 8) const;

    InvariantCandidate scaled(double c) const { return InvariantCandidate(c * P_, k_, floor_); }

private:
    ScalarField P_;
    double k_;
    double floor_;
};

struct PDistributions {
    int n = 0;
    InvariantCandidate candidate;
    std::vector<ScalarField> ratio;  // P_i / (k P), P_i = dP/dy^i
    std::vector<VectorField> h;      // h_i = delta_i - ratio_i S
    std::vector<VectorField> v;      // v_i = d/dy^i - ratio_i C
    VectorOneForm hP;                // h - (d_J P / kP) (x) S
    VectorOneForm vP;                // v - (d_v P / kP) (x) C
};

PDistributions build_p_distributions(const InvariantCandidate& P, const Spray& s, const Connection& c);
PDistributions build_p_distributions(const InvariantCandidate& P, const Spray& s);

Eigen::MatrixXd evaluate(EvalContext& ctx, const std::vector<VectorField>& fields);

// max over samples of |S(P)| / (1 + |P|)
double check_s_invariance(const InvariantCandidate& P, const Spray& s, const std::vector<ChartPoint>& samples,
                          int order = 8);

struct InvolutivityReport {
    double closed_form_residual = 0.0;
    int max_rank_increase = 0;  // augmented rank minus base rank, worst over pairs and samples
};

InvolutivityReport check_involutive(const PDistributions& pd, const std::vector<ChartPoint>& samples, int order = 8,
                                    double rank_tol = 1e-8);

struct DecompositionReport {
    int full_rank = 0;           // rank of [H_P | S | V_P | C]
    int rank_VP = 0;
    int rank_HP = 0;
    bool liouville_outside_VP = false;
    bool spray_outside_HP = false;
    Eigen::VectorXd singular_values;
};

DecompositionReport check_decompositions(const PDistributions& pd, const Spray& s, const ChartPoint& point,
                                         int order = 8, double rank_tol = 1e-8);

// max over samples and j < k of |R^i_{jk} dP/dy^i| / (1 + |P|)
double check_dr_p(const InvariantCandidate& P, const Spray& s, const Curvature& k,
                  const std::vector<ChartPoint>& samples, int order = 8);

struct DegreeEstimate {
    double degree = 0.0;
    double residual = 0.0;
};

DegreeEstimate homogeneity_degree(const ScalarField& P, const std::vector<ChartPoint>& samples, double floor = 1e-8);

struct LemmaReport {
    std::map<std::string, double> residuals;
    int min_rank_VP = 0, max_rank_VP = 0;
    int min_rank_HP = 0, max_rank_HP = 0;
    int min_full_rank = 0;
    bool liouville_outside_VP = true;
    bool spray_outside_HP = true;
    bool scaled_generators_identical = true;
};

// Every pointwise property of the P-distributions at the samples. The
// annihilation checks delta_i(P) = 0 apply when P is holonomy invariant and
// are reported separately as "horizontal_annihilates_P".
LemmaReport lemma_suite(const InvariantCandidate& P, const Spray& s, const std::vector<ChartPoint>& samples,
                        int order = 8, double rank_tol = 1e-8);

}  // namespace fk
