#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aps/aps.hpp"
#include "aps/service.hpp"

namespace aps::cli {

namespace detail {

inline std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return aps::detail::read_file(path);
}

/// Options shared by the analytics subcommands, mirrored 1:1 onto the HTTP
/// query parameters.
struct QueryOptions {
    std::string metric = "nDCG";
    int k = 10;
    std::string algorithms;
    std::string datasets;
    std::string missing = "drop-dataset";
    std::string space;
    std::string format = "json";

    void add_spec(CLI::App* app) {
        app->add_option("--metric", metric, "nDCG, Recall or HitRate")->capture_default_str();
        app->add_option("--k", k, "Cutoff K")->capture_default_str();
    }
    void add_algorithms(CLI::App* app) {
        app->add_option("--algorithms", algorithms, "Comma-separated algorithm axes (default: all)");
        app->add_option("--missing", missing, "Missing-cell policy: drop-dataset|drop-algorithm|fill-zero")
            ->capture_default_str();
    }
    void add_format(CLI::App* app) {
        app->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    }

    QueryParams params() const {
        QueryParams q{{"metric", metric}, {"k", std::to_string(k)}, {"missing", missing}, {"format", format}};
        if (!algorithms.empty()) q.set("algorithms", algorithms);
        if (!datasets.empty()) q.set("datasets", datasets);
        if (!space.empty()) q.set("space", space);
        return q;
    }
};

inline std::pair<std::string, int> split_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) fail(errc::invalid_argument, fmt::format("bind address '{}' must be host:port", bind));
    auto port = aps::detail::parse_int(std::string_view(bind).substr(colon + 1));
    if (!port || *port < 0 || *port > 65535) fail(errc::invalid_argument, fmt::format("bad port in '{}'", bind));
    return {bind.substr(0, colon), static_cast<int>(*port)};
}

} // namespace detail

/// Entry point for the `aps` command. Returns 0 on success, 2 on usage errors
/// and 1 on data errors (the error code is printed to `err`).
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Algorithm performance space explorer"};
    app.require_subcommand(1);

    std::string registry;
    app.add_option("--registry", registry, "Registry directory (default: $APS_REGISTRY or ./registry)");

    detail::QueryOptions opts;
    std::string name, input;
    int prune_k = 5, coldstart = 10, m = 0;
    std::string algo_a, algo_b, bind = "127.0.0.1:8080";
    double low_q = 0.25, high_q = 0.75;

    auto* ingest_results = app.add_subcommand("ingest-results", "Store a results CSV in the registry");
    ingest_results->add_option("--name", name, "Result set name")->required();
    ingest_results->add_option("file", input, "Results CSV ('-' for stdin)")->required();

    auto* ingest_dataset = app.add_subcommand("ingest-dataset", "Compute and store metadata for an interaction file");
    ingest_dataset->add_option("--name", name, "Dataset id")->required();
    ingest_dataset->add_option("file", input, "Interaction file ('-' for stdin)")->required();
    ingest_dataset->add_option("--prune-k", prune_k, "k-core threshold")->check(CLI::PositiveNumber)->capture_default_str();
    ingest_dataset->add_option("--coldstart-threshold", coldstart, "Cold-start interaction threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* meta = app.add_subcommand("meta", "List dataset metadata");
    meta->add_option("--datasets", opts.datasets, "Comma-separated dataset filter");
    opts.add_format(meta);

    auto* project = app.add_subcommand("project", "2D PCA projection with difficulty");
    auto* diff = app.add_subcommand("difficulty", "Difficulty scores and levels");
    for (auto* sub : {project, diff}) {
        opts.add_spec(sub);
        opts.add_algorithms(sub);
        sub->add_option("--datasets", opts.datasets, "Comma-separated datasets to show (projection unchanged)");
        opts.add_format(sub);
    }

    auto* compare = app.add_subcommand("compare", "Pairwise algorithm quadrant comparison");
    compare->add_option("--a", algo_a, "Algorithm on the x axis")->required();
    compare->add_option("--b", algo_b, "Algorithm on the y axis")->required();
    compare->add_option("--low-q", low_q, "Lower percentile")->capture_default_str();
    compare->add_option("--high-q", high_q, "Upper percentile")->capture_default_str();
    opts.add_spec(compare);
    opts.add_format(compare);

    auto* select = app.add_subcommand("select-diverse", "Greedy farthest-point dataset subset");
    select->add_option("--m", m, "Subset size")->required();
    select->add_option("--space", opts.space, "full|pca")->check(CLI::IsMember({"full", "pca"}));
    opts.add_spec(select);
    opts.add_algorithms(select);
    opts.add_format(select);

    auto* distances = app.add_subcommand("distances", "Pairwise dataset distances");
    distances->add_option("--space", opts.space, "full|pca")->check(CLI::IsMember({"full", "pca"}));
    opts.add_spec(distances);
    opts.add_algorithms(distances);
    opts.add_format(distances);

    auto* exp = app.add_subcommand("export", "Export dataset metadata as CSV");
    exp->add_option("--datasets", opts.datasets, "Comma-separated dataset filter");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--bind", bind, "host:port")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    if (registry.empty()) {
        const char* env = std::getenv("APS_REGISTRY");
        registry = env && *env ? env : "registry";
    }

    try {
        auto ws = std::make_shared<Workspace>(registry);
        auto emit = [&](const Rendered& r) { out << r.body; };
        auto query = opts.params();

        if (*ingest_results) {
            ws->ingest_results(name, detail::read_input(input));
            err << "stored result set '" << name << "' ("
                << ws->snapshot()->registry().result_sets.at(name).results.size() << " records)\n";
        } else if (*ingest_dataset) {
            const auto dm = ws->ingest_dataset(name, detail::read_input(input), PruneConfig{prune_k}, coldstart);
            out << render::dump(nlohmann::json(dm));
        } else if (*meta) {
            emit(render::datasets(*ws->snapshot(), query));
        } else if (*project) {
            emit(render::projection(*ws->snapshot(), query));
        } else if (*diff) {
            emit(render::difficulty(*ws->snapshot(), query));
        } else if (*compare) {
            query.set("a", algo_a);
            query.set("b", algo_b);
            query.set("low_q", fmt::format("{}", low_q));
            query.set("high_q", fmt::format("{}", high_q));
            emit(render::compare(*ws->snapshot(), query));
        } else if (*select) {
            query.set("m", std::to_string(m));
            emit(render::select(*ws->snapshot(), query));
        } else if (*distances) {
            emit(render::distances(*ws->snapshot(), query));
        } else if (*exp) {
            emit(render::export_metadata(*ws->snapshot(), query));
        } else if (*serve) {
            const auto [host, port] = detail::split_bind(bind);
            Service service(ws);
            const int bound = service.bind(host, port);
            err << "serving registry '" << registry << "' on http://" << host << ":" << bound << "/api/v1\n";
            service.run();
        }
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace aps::cli
