#include "finslerkit/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "finslerkit/catalog.hpp"
#include "finslerkit/flows.hpp"
#include "finslerkit/holonomy.hpp"
#include "finslerkit/surface.hpp"

namespace fk {

const std::vector<std::string>& analysis_names() {
    static const std::vector<std::string> names = {"analyze",    "classify", "holonomy",
                                                   "invariance", "geodesic", "transport"};
    return names;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

template <typename T>
T get(const Json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

Box parse_box(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array of [lo, hi] pairs");
    Box box;
    for (const auto& b : j) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
            throw ConfigError(where + " must be a nonempty array of [lo, hi] pairs");
        }
        box.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
    }
    return box;
}

Json box_json(const Box& b) {
    Json j = Json::array();
    for (const auto& [lo, hi] : b.bounds) j.push_back(Json::array({lo, hi}));
    return j;
}

void set_model_from_string(RunConfig& c, const std::string& text) {
    const std::string prefix = "catalog:";
    if (text.rfind(prefix, 0) == 0) {
        c.catalog = text.substr(prefix.size());
    } else {
        c.catalog = text;
    }
}

}  // namespace

RunConfig parse_config(const Json& j) {
    allow_keys(j,
               {"dimension", "catalog", "model", "candidates", "sampling", "tolerances", "taylor_order",
                "bracket_depth", "analyses", "geodesic", "transport", "output", "surface_csv", "geodesic_csv"},
               "config");
    RunConfig c;
    int models = 0;
    if (j.contains("catalog")) {
        set_model_from_string(c, get<std::string>(j, "catalog", "", "config"));
        ++models;
    }
    if (j.contains("model")) {
        const Json& m = j.at("model");
        if (m.is_string()) {
            set_model_from_string(c, m.get<std::string>());
            ++models;
        } else {
            allow_keys(m, {"catalog", "finsler", "spray"}, "model");
            if (m.size() != 1) throw ConfigError("model needs exactly one of catalog, finsler, spray");
            c.catalog = get<std::string>(m, "catalog", "", "model");
            if (!c.catalog.empty()) set_model_from_string(c, c.catalog);
            c.finsler = get<std::string>(m, "finsler", "", "model");
            c.spray = get<std::vector<std::string>>(m, "spray", {}, "model");
            ++models;
        }
    }
    if (models != 1) throw ConfigError("config needs exactly one model (catalog, finsler expression or spray)");

    std::optional<int> dimension;
    if (j.contains("dimension")) dimension = get<int>(j, "dimension", 2, "config");
    if (!c.catalog.empty()) {
        const CatalogEntry& e = catalog_get(c.catalog);
        if (dimension && *dimension != e.dimension) throw ConfigError("dimension does not match the catalog entry");
        c.dimension = e.dimension;
        c.sampling.x_box = e.x_box;
        c.sampling.y_box = e.y_box;
    } else if (!c.spray.empty()) {
        c.dimension = dimension.value_or(static_cast<int>(c.spray.size()));
        if (c.dimension != static_cast<int>(c.spray.size())) {
            throw ConfigError("spray needs one coefficient per dimension");
        }
    } else {
        c.dimension = dimension.value_or(2);
    }
    if (c.dimension < 1) throw ConfigError("dimension must be positive");

    if (j.contains("candidates")) {
        const Json& cs = j.at("candidates");
        if (!cs.is_array()) throw ConfigError("candidates must be an array");
        for (const auto& cj : cs) {
            allow_keys(cj, {"name", "expression", "degree"}, "candidate");
            CandidateSpec spec;
            spec.expression = get<std::string>(cj, "expression", "", "candidate");
            if (spec.expression.empty()) throw ConfigError("candidate needs an expression");
            spec.name = get<std::string>(cj, "name", "P" + std::to_string(c.candidates.size() + 1), "candidate");
            spec.degree = get<double>(cj, "degree", 1.0, "candidate");
            for (const auto& other : c.candidates) {
                if (other.name == spec.name) throw ConfigError("duplicate candidate name '" + spec.name + "'");
            }
            c.candidates.push_back(spec);
        }
    }

    if (j.contains("sampling")) {
        const Json& s = j.at("sampling");
        allow_keys(s, {"seed", "count", "x_box", "y_box"}, "sampling");
        c.sampling.seed = get<std::uint64_t>(s, "seed", 42, "sampling");
        c.sampling.count = get<int>(s, "count", 32, "sampling");
        if (s.contains("x_box")) c.sampling.x_box = parse_box(s.at("x_box"), "sampling.x_box");
        if (s.contains("y_box")) c.sampling.y_box = parse_box(s.at("y_box"), "sampling.y_box");
    }
    if (c.sampling.x_box.bounds.empty() || c.sampling.y_box.bounds.empty()) {
        throw ConfigError("sampling needs x_box and y_box for a non-catalog model");
    }

    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        allow_keys(t, {"rank", "residual", "classify", "frame_k"}, "tolerances");
        c.tolerances.rank = get<double>(t, "rank", c.tolerances.rank, "tolerances");
        c.tolerances.residual = get<double>(t, "residual", c.tolerances.residual, "tolerances");
        c.tolerances.classify = get<double>(t, "classify", c.tolerances.classify, "tolerances");
        c.tolerances.frame_k = get<double>(t, "frame_k", c.tolerances.frame_k, "tolerances");
    }
    c.taylor_order = get<int>(j, "taylor_order", c.taylor_order, "config");
    c.bracket_depth = get<int>(j, "bracket_depth", c.bracket_depth, "config");
    c.analyses = get<std::vector<std::string>>(j, "analyses", {}, "config");

    if (j.contains("geodesic")) {
        const Json& g = j.at("geodesic");
        allow_keys(g, {"t_end", "step", "starts", "drift"}, "geodesic");
        c.geodesic.t_end = get<double>(g, "t_end", c.geodesic.t_end, "geodesic");
        c.geodesic.step = get<double>(g, "step", c.geodesic.step, "geodesic");
        c.geodesic.starts = get<int>(g, "starts", c.geodesic.starts, "geodesic");
        c.geodesic.drift = get<double>(g, "drift", c.geodesic.drift, "geodesic");
    }
    if (j.contains("transport")) {
        const Json& t = j.at("transport");
        allow_keys(t, {"curve", "t0", "t1", "v0", "step"}, "transport");
        c.transport.curve = get<std::vector<std::string>>(t, "curve", {}, "transport");
        c.transport.t0 = get<double>(t, "t0", 0.0, "transport");
        c.transport.t1 = get<double>(t, "t1", 1.0, "transport");
        c.transport.v0 = get<std::vector<double>>(t, "v0", {}, "transport");
        c.transport.step = get<double>(t, "step", c.transport.step, "transport");
    }
    c.output = get<std::string>(j, "output", "", "config");
    c.surface_csv = get<std::string>(j, "surface_csv", "", "config");
    c.geodesic_csv = get<std::string>(j, "geodesic_csv", "", "config");
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

std::vector<std::string> default_analyses(const RunConfig& c) {
    std::vector<std::string> a = {"analyze"};
    if (c.has_metric() && c.dimension == 2) a.push_back("classify");
    a.push_back("holonomy");
    if (c.has_metric() || !c.candidates.empty()) a.push_back("invariance");
    return a;
}

void validate(const RunConfig& c) {
    fk::validate(c.sampling);
    if (c.sampling.x_box.dimension() != c.dimension) throw ConfigError("sampling boxes must match the dimension");
    if (c.tolerances.rank <= 0 || c.tolerances.residual <= 0 || c.tolerances.classify <= 0 ||
        c.tolerances.frame_k <= 0) {
        throw ConfigError("tolerances must be positive");
    }
    if (c.taylor_order < 1) throw ConfigError("taylor_order must be at least 1");
    if (c.bracket_depth < 0) throw ConfigError("bracket_depth must be nonnegative");
    for (const auto& a : c.analyses) {
        if (std::find(analysis_names().begin(), analysis_names().end(), a) == analysis_names().end()) {
            throw ConfigError("unknown analysis '" + a + "'");
        }
        if (a == "classify" && (!c.has_metric() || c.dimension != 2)) {
            throw ConfigError("classify needs a Finsler function on a surface");
        }
        if (a == "invariance" && !c.has_metric() && c.candidates.empty()) {
            throw ConfigError("invariance needs candidates or a Finsler function");
        }
        if (a == "transport") {
            if (static_cast<int>(c.transport.curve.size()) != c.dimension ||
                static_cast<int>(c.transport.v0.size()) != c.dimension) {
                throw ConfigError("transport needs a curve and v0 with one entry per dimension");
            }
            if (!(c.transport.step > 0)) throw ConfigError("transport step must be positive");
        }
        if (a == "geodesic" && (!(c.geodesic.step > 0) || c.geodesic.starts < 1 || !(c.geodesic.t_end > 0))) {
            throw ConfigError("geodesic needs a positive step, t_end and start count");
        }
    }
}

Json config_echo(const RunConfig& c) {
    Json j;
    j["dimension"] = c.dimension;
    Json model;
    if (!c.catalog.empty()) model["catalog"] = c.catalog;
    if (!c.finsler.empty()) model["finsler"] = c.finsler;
    if (!c.spray.empty()) model["spray"] = c.spray;
    j["model"] = model;
    j["candidates"] = Json::array();
    for (const auto& cand : c.candidates) {
        j["candidates"].push_back({{"name", cand.name}, {"expression", cand.expression}, {"degree", cand.degree}});
    }
    j["sampling"] = {{"seed", c.sampling.seed},
                     {"count", c.sampling.count},
                     {"x_box", box_json(c.sampling.x_box)},
                     {"y_box", box_json(c.sampling.y_box)}};
    j["tolerances"] = {{"rank", c.tolerances.rank},
                       {"residual", c.tolerances.residual},
                       {"classify", c.tolerances.classify},
                       {"frame_k", c.tolerances.frame_k}};
    j["taylor_order"] = c.taylor_order;
    j["bracket_depth"] = c.bracket_depth;
    j["analyses"] = c.analyses.empty() ? default_analyses(c) : c.analyses;
    j["geodesic"] = {{"t_end", c.geodesic.t_end},
                     {"step", c.geodesic.step},
                     {"starts", c.geodesic.starts},
                     {"drift", c.geodesic.drift}};
    if (!c.transport.curve.empty()) {
        j["transport"] = {{"curve", c.transport.curve},
                          {"t0", c.transport.t0},
                          {"t1", c.transport.t1},
                          {"v0", c.transport.v0},
                          {"step", c.transport.step}};
    }
    return j;
}

namespace {

struct Runner {
    Runner(const RunConfig& c, Exec e) : cfg(c), exec(e) {}

    const RunConfig& cfg;
    Exec exec;
    int n = 0;
    std::vector<ChartPoint> samples;
    std::optional<FinslerMetric> metric;
    Spray spray;
    const CatalogEntry* entry = nullptr;
    std::vector<std::pair<CandidateSpec, InvariantCandidate>> candidates;

    Json report;
    std::vector<Check> checks;

    void check(const std::string& name, double residual, double tolerance) {
        checks.push_back(make_check(name, residual, tolerance));
    }
    void check_flag(const std::string& name, bool ok) { check(name, ok ? 0.0 : 1.0, 0.5); }
    void record_error(const std::string& analysis, const std::exception& e) {
        report["errors"].push_back({{"analysis", analysis}, {"message", e.what()}});
        check(analysis + "/evaluation", kInf, 0.5);
    }
    Json& point(std::size_t i) { return report["points"][i]; }

    ClosureOptions closure_options() const {
        return ClosureOptions{cfg.bracket_depth, cfg.taylor_order, cfg.tolerances.rank};
    }

    void build_model() {
        try {
            if (!cfg.catalog.empty()) {
                entry = &catalog_get(cfg.catalog);
                Model m = instantiate(*entry, samples);
                metric = std::move(m.metric);
                spray = std::move(m.spray);
            } else if (!cfg.finsler.empty()) {
                metric = FinslerMetric::from_expr(parse(cfg.finsler, n), samples);
                spray = Spray::from_coefficients(metric->geodesic_spray().coefficients(), samples);
            } else {
                std::vector<Expr> exprs;
                for (const auto& text : cfg.spray) exprs.push_back(parse(text, n));
                spray = Spray::from_exprs(exprs, samples);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("model rejected: ") + e.what());
        }

        std::vector<CandidateSpec> specs = cfg.candidates;
        if (specs.empty() && metric) {
            specs.push_back({"F", entry ? entry->finsler : cfg.finsler, 1.0});
        }
        for (const auto& spec : specs) {
            try {
                InvariantCandidate P(ScalarField::from_expr(parse(spec.expression, n)), spec.degree);
                P.validate(samples, cfg.tolerances.rank, cfg.taylor_order);
                candidates.emplace_back(spec, P);
            } catch (const Error& e) {
                throw ConfigError("candidate '" + spec.name + "' rejected: " + e.what());
            }
        }
    }

    void init_points() {
        report["points"] = Json::array();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            Json p;
            p["index"] = i;
            p["x"] = samples[i].x();
            p["y"] = samples[i].y();
            if (metric) {
                EvalContext ctx(samples[i], cfg.taylor_order);
                p["F"] = ctx.value(metric->F());
            }
            report["points"].push_back(p);
        }
    }

    void analyze() {
        struct Row {
            std::map<std::string, double> structure, metric;
            std::string error;
        };
        const int order = cfg.taylor_order;
        const auto rows = map_points(
            samples,
            [&](const ChartPoint& p) {
                Row r;
                try {
                    r.structure = structure_residuals(spray, {p}, order);
                    if (metric) r.metric = metric_residuals(*metric, spray, {p}, order);
                } catch (const std::exception& e) {
                    r.error = e.what();
                }
                return r;
            },
            exec);
        std::map<std::string, double> s_max, m_max;
        int failed = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            if (!r.error.empty()) {
                ++failed;
                point(i)["errors"].push_back({{"analysis", "analyze"}, {"message", r.error}});
                continue;
            }
            double ps = 0.0, pm = 0.0;
            for (const auto& [k, v] : r.structure) {
                s_max[k] = std::max(s_max[k], v);
                ps = std::max(ps, v);
            }
            for (const auto& [k, v] : r.metric) {
                m_max[k] = std::max(m_max[k], v);
                pm = std::max(pm, v);
            }
            point(i)["structure_max_residual"] = ps;
            if (metric) point(i)["metric_max_residual"] = pm;
        }
        for (const auto& [k, v] : s_max) check("structure/" + k, v, cfg.tolerances.residual);
        for (const auto& [k, v] : m_max) check("metric/" + k, v, cfg.tolerances.residual);
        if (failed > 0) check("analyze/evaluation", failed, 0.5);
    }

    void classify() {
        const SurfaceOptions opts{cfg.tolerances.frame_k, cfg.tolerances.classify, cfg.taylor_order};
        SurfaceReport rep;
        try {
            rep = analyze_surface(*metric, spray, samples, opts, exec);
        } catch (const Error& e) {
            record_error("classify", e);
            return;
        }
        for (std::size_t i = 0; i < rep.points.size(); ++i) {
            const SurfacePoint& sp = rep.points[i];
            Json s;
            s["k"] = sp.k;
            s["main_scalar"] = sp.main_scalar;
            s["s_of_i"] = sp.s_of_i;
            s["h_of_i"] = sp.h_of_i;
            s["s_of_k"] = sp.s_of_k;
            s["h_of_k"] = sp.h_of_k;
            s["v_of_k"] = sp.v_of_k;
            s["beta"] = sp.beta ? Json(*sp.beta) : Json();
            s["bianchi_residual"] = sp.bianchi_residual;
            s["beta_identity_residual"] = sp.beta_identity_residual ? Json(*sp.beta_identity_residual) : Json();
            s["classification"] = rep.classification.label;
            point(i)["surface"] = s;
        }
        for (const auto& [k, v] : rep.residuals) check("surface/" + k, v, rep.tolerances.at(k));
        Json theorems = Json::array();
        for (const auto& t : rep.theorems) {
            theorems.push_back({{"name", t.name}, {"applicable", t.applicable}, {"consistent", t.consistent},
                                {"detail", t.detail}});
            check_flag("theorem/" + t.name, t.consistent);
        }
        const Classification& c = rep.classification;
        report["classification"] = c.label;
        report["surface"] = {{"frame_defined", rep.frame_defined},
                             {"landsberg_precondition", rep.landsberg_precondition},
                             {"used_frame", c.used_frame},
                             {"riemannian", c.riemannian},
                             {"berwald", c.berwald},
                             {"landsberg", c.landsberg},
                             {"cartan_measure", c.cartan_measure},
                             {"landsberg_measure", c.landsberg_measure},
                             {"berwald_measure", c.berwald_measure},
                             {"theorems", theorems}};
        if (entry) {
            check_flag("catalog/classification", c.label == entry->classification);
            if (entry->flag_curvature) {
                double err = 0.0;
                for (const auto& sp : rep.points) err = std::max(err, std::abs(sp.k - *entry->flag_curvature));
                check("catalog/flag_curvature", err, *entry->flag_curvature == 0.0 ? 1e-9 : 1e-6);
            }
        }
        if (!cfg.surface_csv.empty()) {
            std::ofstream out(cfg.surface_csv);
            if (!out) throw ConfigError("cannot write '" + cfg.surface_csv + "'");
            write_csv(out, rep);
        }
    }

    void holonomy() {
        HolonomySummary h;
        try {
            h = holonomy_analysis(spray, samples, closure_options(), exec);
        } catch (const Error& e) {
            record_error("holonomy", e);
            return;
        }
        bool monotone = true;
        for (std::size_t i = 0; i < h.per_point.size(); ++i) {
            const ClosureResult& r = h.per_point[i];
            for (std::size_t d = 0; d < r.rank_sequence.size(); ++d) {
                if (r.rank_sequence[d] > 2 * n || (d > 0 && r.rank_sequence[d] < r.rank_sequence[d - 1])) {
                    monotone = false;
                }
            }
            point(i)["holonomy"] = {{"rank_sequence", r.rank_sequence},
                                    {"final_rank", r.final_rank},
                                    {"vertical_rank", r.vertical_rank},
                                    {"stabilization_depth", r.stabilization_depth},
                                    {"rank_margin", r.rank_margin},
                                    {"unstable", r.unstable}};
        }
        report["holonomy"] = {{"rank_sequence", h.rank_sequence},
                              {"final_rank", h.final_rank},
                              {"ms_estimate", h.ms_estimate},
                              {"vertical_rank", h.vertical_rank},
                              {"regular_across_samples", h.regular},
                              {"depth_cap_reached", h.depth_cap_reached},
                              {"any_unstable", h.any_unstable}};
        check_flag("holonomy/rank_sequence_monotone", monotone);
        if (entry) {
            check("catalog/ms_estimate", std::abs(h.ms_estimate - entry->ms_estimate), 0.5);
            check("catalog/vhol_rank", std::abs(h.vertical_rank - entry->vhol_rank), 0.5);
        }
    }

    void invariance() {
        const int order = cfg.taylor_order;
        const double tol = cfg.tolerances.residual;
        report["invariance"] = Json::object();
        for (const auto& [spec, P] : candidates) {
            const std::string pre = spec.name + "/";
            Json out;
            out["expression"] = spec.expression;
            out["degree"] = spec.degree;
            try {
                const double s_inv = check_s_invariance(P, spray, samples, order);
                out["s_invariance"] = s_inv;
                check(pre + "s_invariance", s_inv, tol);

                const LemmaReport lemma = lemma_suite(P, spray, samples, order, cfg.tolerances.rank);
                Json lr;
                for (const auto& [k, v] : lemma.residuals) lr[k] = v;
                out["lemma_residuals"] = lr;
                out["rank_VP"] = {lemma.min_rank_VP, lemma.max_rank_VP};
                out["rank_HP"] = {lemma.min_rank_HP, lemma.max_rank_HP};
                out["min_full_rank"] = lemma.min_full_rank;
                for (const auto& [k, v] : lemma.residuals) {
                    if (k == "horizontal_annihilates_P") continue;
                    check(pre + k, v, k == "involutivity_rank_increase" ? 0.5 : tol);
                }
                check(pre + "rank_VP",
                      std::max(std::abs(lemma.min_rank_VP - (n - 1)), std::abs(lemma.max_rank_VP - (n - 1))), 0.5);
                check(pre + "rank_HP",
                      std::max(std::abs(lemma.min_rank_HP - (n - 1)), std::abs(lemma.max_rank_HP - (n - 1))), 0.5);
                check(pre + "full_rank_decomposition", std::abs(lemma.min_full_rank - 2 * n), 0.5);
                check_flag(pre + "liouville_outside_VP", lemma.liouville_outside_VP);
                check_flag(pre + "spray_outside_HP", lemma.spray_outside_HP);
                check_flag(pre + "scaled_generators_identical", lemma.scaled_generators_identical);

                const Curvature k = curvature(spray, connection(spray));
                const double drp = check_dr_p(P, spray, k, samples, order);
                out["dr_p"] = drp;

                struct Inclusion {
                    std::optional<InclusionResult> result;
                    std::string precondition;
                };
                const auto inc = map_points(
                    samples,
                    [&](const ChartPoint& p) {
                        Inclusion r;
                        try {
                            r.result = check_vhol_in_vp(spray, P, p, closure_options(), cfg.tolerances.rank);
                        } catch (const PreconditionError& e) {
                            r.precondition = e.what();
                        }
                        return r;
                    },
                    exec);
                const bool holonomy_invariant =
                    std::all_of(inc.begin(), inc.end(), [](const Inclusion& r) { return r.result.has_value(); });
                out["holonomy_invariant"] = holonomy_invariant;
                if (holonomy_invariant) {
                    bool included = true, equal = true;
                    double residual = 0.0;
                    for (const auto& r : inc) {
                        included = included && r.result->included;
                        equal = equal && r.result->equal;
                        residual = std::max(residual, r.result->residual);
                    }
                    out["vhol_in_vp"] = {{"included", included},
                                         {"equal", equal},
                                         {"residual", residual},
                                         {"rank_vhol", inc.front().result->rank_vhol},
                                         {"rank_vp", inc.front().result->rank_vp}};
                    check_flag(pre + "vhol_in_vp", included);
                    check(pre + "dr_p", drp, tol);
                    check(pre + "horizontal_annihilates_P", lemma.residuals.at("horizontal_annihilates_P"), tol);
                } else {
                    for (const auto& r : inc) {
                        if (!r.result) {
                            out["vhol_in_vp"] = {{"applicable", false}, {"reason", r.precondition}};
                            break;
                        }
                    }
                }
            } catch (const Error& e) {
                out["error"] = e.what();
                record_error("invariance", e);
            }
            report["invariance"][spec.name] = out;
        }
    }

    void geodesic() {
        const GeodesicSpec& g = cfg.geodesic;
        std::vector<ChartPoint> starts(samples.begin(),
                                       samples.begin() + std::min<std::size_t>(samples.size(), g.starts));
        IntegratorConfig ic;
        ic.step = g.step;
        ic.drift_tol = g.drift;
        std::vector<Trajectory> trajectories;
        try {
            trajectories = map_points(
                starts, [&](const ChartPoint& p) { return integrate_geodesic(spray, p, g.t_end, ic); }, exec);
        } catch (const Error& e) {
            record_error("geodesic", e);
            return;
        }
        auto drift_of = [&](const ScalarField& f, bool relative) {
            double worst = 0.0;
            for (const auto& tr : trajectories) {
                EvalContext c0(tr.states.front(), 0);
                const double v0 = c0.value(f);
                for (const auto& st : tr.states) {
                    EvalContext c(st, 0);
                    const double d = std::abs(c.value(f) - v0) / (relative ? std::abs(v0) : 1.0);
                    worst = std::max(worst, std::isnan(d) ? kInf : d);
                }
            }
            return worst;
        };
        Json out;
        out["t_end"] = g.t_end;
        out["step"] = g.step;
        Json finals = Json::array();
        for (const auto& tr : trajectories) finals.push_back({{"x", tr.states.back().x()}, {"y", tr.states.back().y()}});
        out["final_states"] = finals;
        if (metric) {
            const double drift = drift_of(metric->F(), true);
            out["F_drift"] = drift;
            check("geodesic/F_drift", drift, g.drift);
        }
        Json cand = Json::object();
        for (const auto& [spec, P] : candidates) {
            try {
                const double drift = drift_of(P.P(), false);
                const double s_inv = check_s_invariance(P, spray, samples, cfg.taylor_order);
                cand[spec.name] = {{"drift", drift}, {"s_invariance", s_inv}};
                check_flag("geodesic/" + spec.name + "_drift_consistent",
                           (drift < g.drift) == (s_inv < cfg.tolerances.residual));
            } catch (const Error& e) {
                record_error("geodesic", e);
            }
        }
        out["candidates"] = cand;
        report["geodesic"] = out;
        if (!cfg.geodesic_csv.empty() && !trajectories.empty()) {
            std::ofstream csv(cfg.geodesic_csv);
            if (!csv) throw ConfigError("cannot write '" + cfg.geodesic_csv + "'");
            write_csv(csv, trajectories.front());
        }
    }

    void transport() {
        const TransportSpec& t = cfg.transport;
        IntegratorConfig ic;
        ic.step = t.step;
        try {
            const Curve curve = Curve::parse(t.curve, t.t0, t.t1);
            const Connection c = connection(spray);
            const std::vector<double> v1 = parallel_transport(spray, c, curve, t.v0, ic);
            const std::vector<double> back = parallel_transport(spray, c, curve.reversed(), v1, ic);
            Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(t.v0.data(), n);
            Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(back.data(), n);
            Json out;
            out["v0"] = t.v0;
            out["v1"] = v1;
            out["reverse_residual"] = relative_residual(a, b);
            check("transport/reverse_roundtrip", relative_residual(a, b), cfg.tolerances.residual);
            if (metric) {
                EvalContext c0(ChartPoint(curve.position(t.t0), t.v0), 0);
                EvalContext c1(ChartPoint(curve.position(t.t1), v1), 0);
                const double F0 = c0.value(metric->F());
                const double drift = std::abs(c1.value(metric->F()) - F0) / F0;
                out["F_drift"] = drift;
                check("transport/F_preserved", drift, cfg.geodesic.drift);
            }
            report["transport"] = out;
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            record_error("transport", e);
        }
    }
};

std::string summarize(const RunResult& r) {
    std::ostringstream s;
    const Json& rep = r.report;
    s << "model " << rep["config_echo"]["model"].dump() << ", " << rep["points"].size() << " points\n";
    if (rep.contains("classification") && !rep["classification"].is_null()) {
        s << "classification: " << rep["classification"].get<std::string>() << '\n';
    }
    if (rep.contains("holonomy") && !rep["holonomy"].is_null()) {
        const Json& h = rep["holonomy"];
        s << "holonomy: final rank " << h["final_rank"] << ", m_S estimate " << h["ms_estimate"]
          << ", vertical rank " << h["vertical_rank"] << ", regular " << h["regular_across_samples"] << '\n';
    }
    int failed = 0;
    for (const auto& c : r.checks) {
        if (!c.pass) ++failed;
        s << (c.pass ? "  pass  " : "  FAIL  ") << std::left << std::setw(52) << c.name << std::right
          << std::scientific << std::setprecision(3) << c.max_residual << "  < " << c.tolerance << '\n';
    }
    s << r.checks.size() - failed << '/' << r.checks.size() << " checks passed\n";
    return s.str();
}

}  // namespace

RunResult run(const RunConfig& config, Exec exec) {
    validate(config);
    Runner r(config, exec);
    r.n = config.dimension;
    r.samples = sample_points(config.sampling);
    r.build_model();

    r.report["config_echo"] = config_echo(config);
    r.init_points();
    const std::vector<std::string> analyses = config.analyses.empty() ? default_analyses(config) : config.analyses;
    for (const auto& a : analyses) {
        if (a == "analyze") r.analyze();
        else if (a == "classify") r.classify();
        else if (a == "holonomy") r.holonomy();
        else if (a == "invariance") r.invariance();
        else if (a == "geodesic") r.geodesic();
        else if (a == "transport") r.transport();
    }

    RunResult result;
    Json aggregates = Json::object();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        aggregates[c.name] = c.max_residual;
        checks.push_back(to_json(c));
    }
    Json& rep = r.report;
    Json ordered;
    ordered["config_echo"] = rep["config_echo"];
    ordered["points"] = rep["points"];
    ordered["aggregates"] = aggregates;
    ordered["checks"] = checks;
    ordered["classification"] = rep.contains("classification") ? rep["classification"] : Json();
    ordered["holonomy"] = rep.contains("holonomy") ? rep["holonomy"] : Json();
    for (const char* key : {"surface", "invariance", "geodesic", "transport", "errors"}) {
        if (rep.contains(key)) ordered[key] = rep[key];
    }
    const bool all_pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    ordered["pass"] = all_pass;
    result.report = std::move(ordered);
    result.checks = std::move(r.checks);
    result.exit_code = all_pass ? 0 : 1;
    result.summary = summarize(result);
    return result;
}

}  // namespace fk
