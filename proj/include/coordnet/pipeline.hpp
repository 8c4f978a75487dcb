#pragma once

#include <string>
#include <vector>

#include "coordnet/config.hpp"
#include "coordnet/post.hpp"

namespace coordnet {

// Fixed output names under --output-dir. Every stage reads its inputs from
// and writes its results to these, so runs are resumable stage by stage.
namespace outfile {
inline constexpr const char* posts = "posts.jsonl";
inline constexpr const char* corpus_stats = "corpus_stats.json";
inline constexpr const char* parse_errors = "parse_errors.jsonl";
inline constexpr const char* ground_truth = "ground_truth.jsonl";
inline constexpr const char* chains = "chains.jsonl";
inline constexpr const char* edges = "edges.csv";
inline constexpr const char* vertices = "vertices.csv";
inline constexpr const char* communities = "communities.csv";
inline constexpr const char* gexf = "graph.gexf";
inline constexpr const char* narratives = "narratives.json";
inline constexpr const char* summary = "summary.json";
inline constexpr const char* manifest = "manifest.json";
}  // namespace outfile

// Each stage throws ConfigError / IoError on failure and logs progress at
// info level. output_dir must exist.

// input_path -> posts.jsonl (deduplicated, keyword-filtered when configured)
// + corpus_stats.json + parse_errors.jsonl
void run_ingest(const std::string& input_path, const PipelineConfig& config,
                const std::string& output_dir);

// scenario -> posts.jsonl + ground_truth.jsonl + corpus_stats.json +
// parse_errors.jsonl (empty)
void run_simulate(const PipelineConfig& config, const std::string& output_dir);

// posts.jsonl -> chains.jsonl. Returns the effective window seconds (differs
// from the configured one when estimate_threshold is on).
std::int64_t run_detect(const PipelineConfig& config, const std::string& output_dir);

// posts.jsonl + chains.jsonl -> edges.csv + vertices.csv (the degree-filtered
// graph)
void run_graph(const PipelineConfig& config, const std::string& output_dir);

// edges.csv + vertices.csv -> communities.csv (header-only for an empty
// graph)
void run_communities(const PipelineConfig& config, const std::string& output_dir);

// everything above -> narratives.json + summary.json + graph.gexf (omitted
// for an empty graph)
void run_report(const PipelineConfig& config, const std::string& output_dir);

// All stages in order; writes manifest.json (input/config hashes, stage
// timings) last. input_path "synthetic" runs the scenario generator instead
// of ingest. Partial outputs are removed when a stage fails.
void run_pipeline(const PipelineConfig& config, const std::string& input_path,
                  const std::string& output_dir);

// Lowercase hex SHA-256 of a file's bytes / a string. Throws IoError when
// the file cannot be read.
std::string sha256_file(const std::string& path);
std::string sha256_string(const std::string& data);

}  // namespace coordnet
