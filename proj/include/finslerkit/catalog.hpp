#pragma once

// Built-in surfaces with known ground truth.

#include <optional>
#include <string>
#include <vector>

#include "finslerkit/finsler_metric.hpp"
#include "finslerkit/sampling.hpp"

namespace fk {

enum class Provenance { Trivial, Derived };

struct ExpectedFact {
    std::string name;
    std::string value;
    Provenance provenance = Provenance::Trivial;
    std::string oracle;  // named oracle for derived facts
};

struct CatalogEntry {
    std::string name;
    int dimension = 2;
    std::string finsler;
    std::string description;
    Box x_box;
    Box y_box;

    std::optional<double> flag_curvature;  // empty when nonconstant
    std::string classification;
    int ms_estimate = 0;
    int vhol_rank = 0;
    bool flat_spray = false;

    std::vector<ExpectedFact> facts;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_get(const std::string& name);
std::vector<std::string> catalog_names();

SamplingConfig default_sampling(const CatalogEntry& entry, std::uint64_t seed = 42, int count = 32);

struct Model {
    std::string name;
    int dimension = 0;
    std::optional<FinslerMetric> metric;
    Spray spray;
};

// Builds the metric and its geodesic spray, validating regularity and the
// spray's homogeneity on the samples.
Model instantiate(const CatalogEntry& entry, const std::vector<ChartPoint>& samples);

const char* to_string(Provenance p);

}  // namespace fk
