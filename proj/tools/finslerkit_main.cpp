#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "finslerkit/catalog.hpp"
#include "finslerkit/run.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<int> order;
    std::optional<int> depth;
    std::optional<int> threads;
    bool quiet = false;
};

void add_run_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "configuration file (JSON)")->required();
    cmd->add_option("--out", o.out, "report path (default: config output, else stdout)");
    cmd->add_option("--seed", o.seed, "sampling seed override");
    cmd->add_option("--points", o.points, "sample count override");
    cmd->add_option("--order", o.order, "Taylor order budget override");
    cmd->add_option("--depth", o.depth, "bracket depth override");
    cmd->add_option("--threads", o.threads, "worker threads; 1 selects the serial reference path");
    cmd->add_flag("--quiet", o.quiet, "suppress the summary");
}

int run_command(const std::string& name, const Options& o) {
    fk::RunConfig cfg = fk::load_config(o.config);
    if (o.seed) cfg.sampling.seed = *o.seed;
    if (o.points) cfg.sampling.count = *o.points;
    if (o.order) cfg.taylor_order = *o.order;
    if (o.depth) cfg.bracket_depth = *o.depth;
    if (name != "analyze") cfg.analyses = {name};
    if (!o.out.empty()) cfg.output = o.out;

    fk::Exec exec = fk::Exec::Parallel;
    if (o.threads) {
        if (*o.threads < 1) throw fk::ConfigError("--threads must be positive");
        fk::set_thread_count(*o.threads);
        if (*o.threads == 1) exec = fk::Exec::Serial;
    }
    const fk::RunResult result = fk::run(cfg, exec);

    if (cfg.output.empty()) {
        fk::write_json(std::cout, result.report);
        if (!o.quiet) std::cerr << result.summary;
    } else {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw fk::ConfigError("cannot write report to '" + cfg.output + "'");
        fk::write_json(out, result.report);
        if (!o.quiet) std::cout << result.summary;
    }
    return result.exit_code;
}

void list_catalog() {
    for (const auto& e : fk::catalog()) {
        std::cout << e.name << "  F = " << e.finsler << "  (" << e.description << ")\n";
        for (const auto& f : e.facts) {
            std::cout << "    " << f.name << " = " << f.value << "  [" << fk::to_string(f.provenance);
            if (!f.oracle.empty()) std::cout << ": " << f.oracle;
            std::cout << "]\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finslerkit: spray and Finsler geometry checks at sampled points"};
    app.require_subcommand(1);
    Options opts;
    std::string chosen;
    for (const auto& name : fk::analysis_names()) {
        CLI::App* cmd = app.add_subcommand(name, "run the " + name + " analysis" +
                                                     (name == "analyze" ? "es listed in the config" : ""));
        add_run_options(cmd, opts);
        cmd->callback([&chosen, name] { chosen = name; });
    }
    app.add_subcommand("list-catalog", "list the built-in models and their expected facts")->callback([&chosen] {
        chosen = "list-catalog";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (chosen == "list-catalog") {
            list_catalog();
            return 0;
        }
        return run_command(chosen, opts);
    } catch (const fk::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fk::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
