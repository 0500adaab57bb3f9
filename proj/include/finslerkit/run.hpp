#pragma once

// Batch runs: a JSON configuration names a model, a sample set and the
// analyses to execute; the result is a JSON report, a list of checks and an
// exit code (0 all checks pass, 1 a check failed; input errors throw
// ConfigError and map to 2 in the front-end).

#include <string>
#include <vector>

#include "finslerkit/batch.hpp"
#include "finslerkit/report.hpp"
#include "finslerkit/sampling.hpp"

namespace fk {

struct CandidateSpec {
    std::string name;
    std::string expression;
    double degree = 1.0;
};

struct Tolerances {
    double rank = 1e-8;
    double residual = 1e-7;
    double classify = 1e-7;
    double frame_k = 1e-6;
};

struct GeodesicSpec {
    double t_end = 0.5;
    double step = 1e-3;
    int starts = 4;
    double drift = 1e-6;
};

struct TransportSpec {
    std::vector<std::string> curve;  // one expression in t per base coordinate
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> v0;
    double step = 1e-3;
};

struct RunConfig {
    int dimension = 2;
    std::string catalog;              // exactly one of catalog, finsler, spray
    std::string finsler;
    std::vector<std::string> spray;
    std::vector<CandidateSpec> candidates;
    SamplingConfig sampling;
    Tolerances tolerances;
    int taylor_order = 8;
    int bracket_depth = 4;
    std::vector<std::string> analyses;
    GeodesicSpec geodesic;
    TransportSpec transport;
    std::string output;
    std::string surface_csv;
    std::string geodesic_csv;

    bool has_metric() const { return !catalog.empty() || !finsler.empty(); }
};

const std::vector<std::string>& analysis_names();

// Throws ConfigError on any schema violation.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
// Analyses run when the configuration lists none.
std::vector<std::string> default_analyses(const RunConfig& config);
void validate(const RunConfig& config);
// The fully defaulted configuration.
Json config_echo(const RunConfig& config);

struct RunResult {
    Json report;
    std::vector<Check> checks;
    int exit_code = 0;
    std::string summary;
};

// Throws ConfigError when the model or a candidate is rejected on the samples.
RunResult run(const RunConfig& config, Exec exec = Exec::Parallel);

}  // namespace fk
