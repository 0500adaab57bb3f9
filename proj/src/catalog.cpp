#include "finslerkit/catalog.hpp"

namespace fk {

namespace {

Box box(std::initializer_list<std::pair<double, double>> b) { return Box{std::vector<std::pair<double, double>>(b)}; }

ExpectedFact trivial(std::string name, std::string value) {
    return {std::move(name), std::move(value), Provenance::Trivial, ""};
}

ExpectedFact derived(std::string name, std::string value, std::string oracle) {
    return {std::move(name), std::move(value), Provenance::Derived, std::move(oracle)};
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> entries;
    const Box generic_fiber = box({{0.25, 1.5}, {-1.5, 1.5}});

    {
        CatalogEntry e;
        e.name = "euclidean2";
        e.finsler = "sqrt(y1^2 + y2^2)";
        e.description = "Euclidean plane";
        e.x_box = box({{-1, 1}, {-1, 1}});
        e.y_box = generic_fiber;
        e.flag_curvature = 0.0;
        e.classification = "riemannian";
        e.ms_estimate = 2;
        e.vhol_rank = 0;
        e.flat_spray = true;
        e.facts = {trivial("flag_curvature", "0"), trivial("classification", "riemannian"),
                   trivial("ms_estimate", "2"), trivial("vhol_rank", "0")};
        entries.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "minkowski_quartic2";
        e.finsler = "(y1^4 + y2^4)^(1/4)";
        e.description = "quartic Minkowski plane (fibers kept off the axes, where g degenerates)";
        e.x_box = box({{-1, 1}, {-1, 1}});
        e.y_box = box({{0.3, 1.5}, {0.3, 1.5}});
        e.flag_curvature = 0.0;
        e.classification = "berwald_non_riemannian";
        e.ms_estimate = 2;
        e.vhol_rank = 0;
        e.flat_spray = true;
        e.facts = {trivial("flag_curvature", "0"),
                   derived("classification", "berwald_non_riemannian", "hand Cartan tensor at y=(1,1)"),
                   trivial("ms_estimate", "2"), trivial("vhol_rank", "0")};
        entries.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "sphere2";
        e.finsler = "sqrt(y1^2 + sin(x1)^2*y2^2)";
        e.description = "unit sphere, x1 colatitude, x2 longitude";
        e.x_box = box({{0.5, 2.6}, {-3, 3}});
        e.y_box = generic_fiber;
        e.flag_curvature = 1.0;
        e.classification = "riemannian";
        e.ms_estimate = 1;
        e.vhol_rank = 1;
        e.facts = {derived("flag_curvature", "1", "Christoffel/Gauss curvature of the round metric"),
                   trivial("classification", "riemannian"),
                   derived("ms_estimate", "1", "nonzero curvature gives one vertical bracket direction"),
                   derived("vhol_rank", "1", "nonzero curvature gives one vertical bracket direction")};
        entries.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "hyperbolic_halfplane2";
        e.finsler = "sqrt(y1^2 + y2^2)/x2";
        e.description = "Poincare half-plane";
        e.x_box = box({{-1, 1}, {0.5, 2}});
        e.y_box = generic_fiber;
        e.flag_curvature = -1.0;
        e.classification = "riemannian";
        e.ms_estimate = 1;
        e.vhol_rank = 1;
        e.facts = {derived("flag_curvature", "-1", "Gauss curvature of (dx1^2+dx2^2)/x2^2"),
                   trivial("classification", "riemannian"),
                   derived("ms_estimate", "1", "nonzero curvature gives one vertical bracket direction"),
                   derived("vhol_rank", "1", "nonzero curvature gives one vertical bracket direction")};
        entries.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "conformal_bump2";
        e.finsler = "exp(0.1*x1^2)*sqrt(y1^2 + y2^2)";
        e.description = "conformally flat, phi = 0.1 x1^2, K = -0.2 exp(-0.2 x1^2)";
        e.x_box = box({{-1.5, 1.5}, {-1, 1}});
        e.y_box = generic_fiber;
        e.classification = "riemannian";
        e.ms_estimate = 1;
        e.vhol_rank = 1;
        e.facts = {derived("flag_curvature", "nonconstant", "Gauss curvature -exp(-2 phi) Laplacian(phi)"),
                   trivial("classification", "riemannian"),
                   derived("ms_estimate", "1", "nonzero curvature gives one vertical bracket direction"),
                   derived("vhol_rank", "1", "nonzero curvature gives one vertical bracket direction")};
        entries.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "funk_disk2";
        e.finsler = "(sqrt((1 - x1^2 - x2^2)*(y1^2 + y2^2) + (x1*y1 + x2*y2)^2) + x1*y1 + x2*y2)/(1 - x1^2 - x2^2)";
        e.description = "Funk metric of the unit disk, sampled on |x| < 0.9";
        e.x_box = box({{-0.6, 0.6}, {-0.6, 0.6}});
        e.y_box = generic_fiber;
        e.flag_curvature = -0.25;
        e.classification = "non_landsberg";
        e.ms_estimate = 1;
        e.vhol_rank = 1;
        e.facts = {derived("flag_curvature", "-0.25", "CAS trace of the Jacobi endomorphism over F^2"),
                   derived("classification", "non_landsberg", "CAS main scalar derivative S(I)"),
                   derived("ms_estimate", "1", "nonzero curvature gives one vertical bracket direction"),
                   derived("vhol_rank", "1", "nonzero curvature gives one vertical bracket direction")};
        entries.push_back(e);
    }
    return entries;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry& catalog_get(const std::string& name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return e;
    }
    throw ConfigError("unknown catalog entry '" + name + "'");
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (const auto& e : catalog()) names.push_back(e.name);
    return names;
}

SamplingConfig default_sampling(const CatalogEntry& entry, std::uint64_t seed, int count) {
    SamplingConfig cfg;
    cfg.seed = seed;
    cfg.count = count;
    cfg.x_box = entry.x_box;
    cfg.y_box = entry.y_box;
    return cfg;
}

Model instantiate(const CatalogEntry& entry, const std::vector<ChartPoint>& samples) {
    Model m;
    m.name = entry.name;
    m.dimension = entry.dimension;
    m.metric = FinslerMetric::from_expr(parse(entry.finsler, entry.dimension), samples);
    const Spray s = m.metric->geodesic_spray();
    m.spray = Spray::from_coefficients(s.coefficients(), samples);
    return m;
}

const char* to_string(Provenance p) { return p == Provenance::Trivial ? "trivial" : "derived"; }

}  // namespace fk
