#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cqalog/eval.hpp"

namespace cqalog {

// Flat key = value config with a schema version; round-trips losslessly
// through serialize_config/parse_config. Environment variables
// (CQALOG_DUMP_DIR, CQALOG_OUT_DIR) may override the two paths at the CLI
// layer, never parameters.
struct PipelineConfig {
    std::string dump_dir;
    std::string excluded_forums;  // optional path
    std::uint64_t min_forum_questions = 100;
    std::uint64_t min_other_answers = 5;
    std::string length_dist = "uniform:1:5";
    std::uint64_t min_user_queries = 100;
    double mu = 2500;
    std::uint64_t k = 100;
    std::uint64_t seed = 1;
    std::string idf_variant = "smoothed";
    std::string strategy = "tfidf_top";  // or ranker:<model path>
    std::string length_sampling = "per_question";
    std::uint64_t materialize_negatives = 0;
    std::uint64_t sample_forums = 0;  // 0 = keep every eligible forum
    std::uint64_t sample_questions_per_forum = 0;
    std::uint64_t threads = 1;
    std::string out_dir;
};

PipelineConfig parse_config(std::string_view contents);
std::string serialize_config(const PipelineConfig& config);
PipelineConfig load_config_file(const std::filesystem::path& path);

// Validates values beyond syntax (length spec, strategy, variant names).
void validate_config(const PipelineConfig& config);

struct PipelineResult {
    std::filesystem::path out_dir;
    std::uint64_t n_questions_sampled = 0;
    std::uint64_t n_queries = 0;
    std::uint64_t n_users = 0;
    std::uint64_t n_documents = 0;
    EvalReport eval_raw;
    EvalReport eval_q2a;
};

// ingest -> filter/sample -> derive -> index (raw + q2a) -> search -> eval ->
// analyze, then manifest.json with config hash, seed, and per-artifact
// checksums. Reruns with identical config + input are byte-identical.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace cqalog
