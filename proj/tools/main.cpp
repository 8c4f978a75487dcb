#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coordnet/config.hpp"
#include "coordnet/errors.hpp"
#include "coordnet/log.hpp"
#include "coordnet/pipeline.hpp"

namespace {

using coordnet::ConfigError;
using coordnet::IoError;
using coordnet::PipelineConfig;

PipelineConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return PipelineConfig{};
    return coordnet::load_config_file(config_path);
}

// The scenario file holds the scenario object itself (the same shape as the
// config file's "scenario" section).
void load_scenario_file(PipelineConfig& config, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file \"" + path + "\"");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ConfigError("scenario file \"" + path + "\": " + ex.what());
    }
    PipelineConfig wrapper = coordnet::config_from_json(nlohmann::json{{"scenario", doc}});
    config.scenario = std::move(wrapper.scenario);
}

std::string require_output_dir(const PipelineConfig& config) {
    if (config.output_dir.empty())
        throw ConfigError("an output directory is required (--output-dir or report.output_dir)");
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory \"" + config.output_dir + "\"");
    return config.output_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coordinated sharing detection over grouped social-media posts"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    app.add_option("--config", config_path, "pipeline config file (JSON)");
    auto* output_opt =
        app.add_option("--output-dir", output_dir, "directory for stage outputs");

    auto* ingest = app.add_subcommand("ingest", "parse, deduplicate, and filter a dataset");
    ingest->fallthrough();
    std::string input;
    std::string format;
    ingest->add_option("--input", input, "dataset path")->required();
    auto* format_opt = ingest->add_option("--format", format, "input format")
                           ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* detect = app.add_subcommand("detect", "detect coordination chains");
    detect->fallthrough();
    std::int64_t window_seconds = 30;
    double quantile = 0.10;
    auto* window_opt = detect->add_option("--window-seconds", window_seconds,
                                          "chain gap threshold in seconds");
    auto* estimate_flag = detect->add_flag("--estimate-threshold",
                                           "estimate the window from interarrival quantiles");
    auto* quantile_opt = detect->add_option("--quantile", quantile, "estimator quantile");
    window_opt->excludes(estimate_flag);
    estimate_flag->excludes(window_opt);

    auto* graph = app.add_subcommand("graph", "build and filter the group graph");
    graph->fallthrough();
    double min_degree = 100.0;
    auto* degree_opt = graph->add_option("--min-degree", min_degree,
                                         "weighted degree threshold");
    auto* no_iterate_flag = graph->add_flag("--no-iterate", "filter once instead of to a fixed point");

    auto* communities = app.add_subcommand("communities", "detect graph communities");
    communities->fallthrough();
    double resolution = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t best_of = 1;
    auto* resolution_opt = communities->add_option("--resolution", resolution,
                                                   "modularity resolution");
    auto* seed_opt = communities->add_option("--seed", seed, "community detection seed");
    auto* best_of_opt = communities->add_option("--best-of", best_of,
                                                "keep the best of this many seeded runs");

    auto* report = app.add_subcommand("report", "write analyst artifacts");
    report->fallthrough();
    std::size_t top_n = 5;
    auto* top_n_opt = report->add_option("--top-n", top_n, "narratives to keep");

    auto* simulate = app.add_subcommand("simulate", "generate a labeled synthetic corpus");
    simulate->fallthrough();
    std::string scenario_path;
    simulate->add_option("--scenario", scenario_path, "scenario file (JSON)");

    auto* run = app.add_subcommand("run", "execute the full pipeline");
    run->fallthrough();
    std::string run_input;
    run->add_option("--input", run_input, "dataset path, or \"synthetic\"")->required();
    std::uint64_t jobs = 1;
    run->add_option("--jobs", jobs, "worker cap (stages currently run single-threaded)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        PipelineConfig config = base_config(config_path);
        if (output_opt->count()) config.output_dir = output_dir;

        if (ingest->parsed()) {
            if (format_opt->count()) {
                config.input_format =
                    format == "csv" ? coordnet::InputFormat::csv : coordnet::InputFormat::jsonl;
            }
            coordnet::run_ingest(input, config, require_output_dir(config));
        } else if (detect->parsed()) {
            if (window_opt->count()) config.detection.window_seconds = window_seconds;
            if (estimate_flag->count()) config.estimate_threshold = true;
            if (quantile_opt->count()) config.quantile = quantile;
            if (config.detection.window_seconds < 1)
                throw ConfigError("window-seconds must be >= 1");
            if (!(config.quantile > 0.0) || config.quantile > 1.0)
                throw ConfigError("quantile must be in (0, 1]");
            coordnet::run_detect(config, require_output_dir(config));
        } else if (graph->parsed()) {
            if (degree_opt->count()) config.min_degree = min_degree;
            if (no_iterate_flag->count()) config.iterative_filter = false;
            if (config.min_degree < 0.0) throw ConfigError("min-degree must be >= 0");
            coordnet::run_graph(config, require_output_dir(config));
        } else if (communities->parsed()) {
            if (resolution_opt->count()) config.resolution = resolution;
            if (seed_opt->count()) config.seed = seed;
            if (best_of_opt->count()) config.best_of_k = best_of;
            if (config.resolution <= 0.0) throw ConfigError("resolution must be positive");
            if (config.best_of_k < 1) throw ConfigError("best-of must be >= 1");
            coordnet::run_communities(config, require_output_dir(config));
        } else if (report->parsed()) {
            if (top_n_opt->count()) config.top_n = top_n;
            if (config.top_n < 1) throw ConfigError("top-n must be >= 1");
            coordnet::run_report(config, require_output_dir(config));
        } else if (simulate->parsed()) {
            if (!scenario_path.empty()) load_scenario_file(config, scenario_path);
            coordnet::run_simulate(config, require_output_dir(config));
        } else if (run->parsed()) {
            coordnet::run_pipeline(config, run_input, require_output_dir(config));
        }
    } catch (const ConfigError& ex) {
        std::fprintf(stderr, "coordnet error: %s\n", ex.what());
        return 2;
    } catch (const IoError& ex) {
        std::fprintf(stderr, "coordnet error: %s\n", ex.what());
        return 3;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "coordnet error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
